#include <cmath>

#include "suitaeq/green.hpp"

namespace suitaeq::oracle {

double disk_green(Complex z, Complex pole) {
  return std::log(std::abs((z - pole) / (1.0 - std::conj(pole) * z)));
}

double disk_capacity(Complex pole) { return 1.0 / (1.0 - std::norm(pole)); }

// Harmonic correction h with h = -log|z - z0| on |z| = 1 and |z| = R, from the
// boundary Fourier expansions of log|z - z0|:
//   |z| = 1:  log|z - z0| = log|z0| - sum Re(z^n z0^-n)/n
//   |z| = R:  log|z - z0| = log R  - sum Re(conj(z0)^n R^-n (z/R)^-n ... )/n
// matched against h = a0 + b0 log r + sum Re[(a_n r^n + b_n r^-n) e^{i n t}].
AnnulusGreenSeries::AnnulusGreenSeries(double R, Complex pole, int terms)
    : R_(R), pole_(pole) {
  if (!(R > 1.0)) throw ConfigError("annulus oracle: R must exceed 1");
  const double r0 = std::abs(pole);
  if (!(r0 > 1.0 && r0 < R)) throw ConfigError("annulus oracle: pole outside the annulus");
  a0_ = -std::log(r0);
  b0_ = (std::log(r0) - std::log(R)) / std::log(R);
  an_.resize(terms + 1);
  bn_.resize(terms + 1);
  for (int n = 1; n <= terms; ++n) {
    const Complex e = std::pow(pole, -n) / double(n);                          // r = 1 target
    const Complex g = std::pow(std::conj(pole), n) * std::pow(R, -n) / double(n);  // r = R target
    const double Rn = std::pow(R, n), Rmn = std::pow(R, -n);
    an_[n] = (g - e * Rmn) / (Rn - Rmn);
    bn_[n] = e - an_[n];
  }
}

double AnnulusGreenSeries::correction(Complex z) const {
  const double r = std::abs(z);
  const Complex dir = z / r;
  double h = a0_ + b0_ * std::log(r);
  Complex dirn = dir;
  for (std::size_t n = 1; n < an_.size(); ++n) {
    h += ((an_[n] * std::pow(r, double(n)) + bn_[n] * std::pow(r, -double(n))) * dirn).real();
    dirn *= dir;
  }
  return h;
}

double AnnulusGreenSeries::value(Complex z) const {
  return std::log(std::abs(z - pole_)) + correction(z);
}

double AnnulusGreenSeries::capacity() const { return std::exp(correction(pole_)); }

}  // namespace suitaeq::oracle
