#pragma once

#include <complex>
#include <vector>

namespace exoopt {

// Ratio of polynomials in the Laplace variable s.  Coefficients are stored
// in descending powers; the leading denominator coefficient must be nonzero
// and the numerator degree must not exceed the denominator degree.
struct RationalTF {
  std::vector<double> num;
  std::vector<double> den;

  RationalTF(std::vector<double> numerator, std::vector<double> denominator);

  std::complex<double> eval(std::complex<double> s) const;

  // Magnitude at s = j*2*pi*f.
  double magnitude(double freq_hz) const;

  // Gain at s = 0.  Throws std::domain_error when the denominator constant
  // term vanishes (pole at the origin).
  double dc_gain() const;

  int degree() const { return static_cast<int>(den.size()) - 1; }
};

}  // namespace exoopt
