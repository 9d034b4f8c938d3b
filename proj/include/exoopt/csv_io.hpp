#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "exoopt/controller.hpp"
#include "exoopt/optimizer.hpp"
#include "exoopt/sim.hpp"

namespace exoopt {

// CSV emitters.  `comments` go out first, one per line, prefixed with "# ";
// the header row names every column with its unit.

void write_csv(std::ostream& out, const SimTrace& trace,
               const std::vector<std::string>& comments = {});

void write_csv(std::ostream& out, const FrequencyResponse& fr,
               const std::vector<std::string>& comments = {});

void write_csv(std::ostream& out, const GridResult& grid,
               const std::vector<std::string>& comments = {});

void write_csv(std::ostream& out, const ControllerTrace& trace,
               const std::vector<std::string>& comments = {});

}  // namespace exoopt
