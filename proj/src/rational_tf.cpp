#include "exoopt/rational_tf.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace exoopt {

namespace {

std::complex<double> horner(const std::vector<double>& coeffs,
                            std::complex<double> s) {
  std::complex<double> acc{0.0, 0.0};
  for (double c : coeffs) acc = acc * s + c;
  return acc;
}

}  // namespace

RationalTF::RationalTF(std::vector<double> numerator,
                       std::vector<double> denominator)
    : num(std::move(numerator)), den(std::move(denominator)) {
  if (den.empty() || den.front() == 0.0) {
    throw std::invalid_argument(
        "transfer function denominator must have a nonzero leading "
        "coefficient");
  }
  if (num.empty()) num = {0.0};
  // Leading numerator zeros are allowed (padded storage) as long as the
  // effective degree stays proper.
  std::size_t lead = 0;
  while (lead + 1 < num.size() && num[lead] == 0.0) ++lead;
  if (num.size() - lead > den.size()) {
    throw std::invalid_argument("transfer function must be proper");
  }
}

std::complex<double> RationalTF::eval(std::complex<double> s) const {
  return horner(num, s) / horner(den, s);
}

double RationalTF::magnitude(double freq_hz) const {
  const double w = 2.0 * std::numbers::pi * freq_hz;
  return std::abs(eval({0.0, w}));
}

double RationalTF::dc_gain() const {
  if (den.back() == 0.0) {
    throw std::domain_error("transfer function has a pole at s = 0");
  }
  return num.back() / den.back();
}

}  // namespace exoopt
