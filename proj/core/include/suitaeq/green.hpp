#pragma once

#include "suitaeq/harmonic.hpp"

namespace suitaeq {

/// Green function G(z, z0) = log|z - z0| + h(z) with h harmonic and G = 0 on
/// the boundary; h(z0) is the Robin constant, exp(h(z0)) the logarithmic
/// capacity at the pole.
class GreenFunction {
 public:
  GreenFunction(Complex pole, HarmonicFunction correction);

  Complex pole() const { return pole_; }
  const HarmonicFunction& correction() const { return correction_; }
  const std::shared_ptr<const Domain>& domain() const { return correction_.domain(); }

  double value(Complex z) const;  // errors at the pole
  Eigen::Vector2d gradient(Complex z) const;
  Complex analytic_derivative(Complex z) const;  // G_x - i G_y = 1/(z-z0) + h'
  double log_capacity() const;                   // exp(h(z0))
  double robin_constant() const { return correction_.value(pole_); }

  /// (1/2pi) oint_{component} dG/dn ds. Hole components use the outward
  /// (into-hole) normal and recover the harmonic measure u_k(z0); the outer
  /// component reports the into-domain-normal value (disk: -1).
  double boundary_flux(int component) const;

  /// Normalized conjugate period (1/2pi) oint_cycle dG~ =
  /// winding(cycle, pole) + log-coefficient of the correction.
  double cycle_period(const Cycle& cycle) const;
  double cycle_period(int hole) const;

  double boundary_residual() const { return correction_.boundary_residual(); }

 private:
  Complex pole_;
  HarmonicFunction correction_;
  mutable QuadratureSet flux_nodes_;  // lazily built
  mutable bool flux_ready_ = false;
};

GreenFunction green_function(std::shared_ptr<const Domain> domain, Complex pole,
                             SolveOptions options = {});
GreenFunction green_function(const DirichletSolver& solver, Complex pole);

double log_capacity(std::shared_ptr<const Domain> domain, Complex pole, SolveOptions options = {});

/// Numeric line integral of the conjugate differential around a cycle,
/// an independent cross-check of cycle_period.
double green_cycle_period_line_integral(const GreenFunction& g, const Cycle& cycle,
                                        int quadrature_nodes = 256);

namespace oracle {

/// Unit-disk Green function log|(z-z0)/(1-conj(z0) z)| and capacity 1-|z0|^2
/// reciprocal (Mobius closed forms).
double disk_green(Complex z, Complex pole);
double disk_capacity(Complex pole);

/// Annulus 1 < |z| < R: boundary-matched harmonic series (the closed-form
/// resummation of the image/reflection sum), truncated at `terms`.
class AnnulusGreenSeries {
 public:
  AnnulusGreenSeries(double R, Complex pole, int terms = 200);
  double value(Complex z) const;
  double capacity() const;  // exp(h(pole))
  double correction(Complex z) const;

 private:
  double R_;
  Complex pole_;
  double a0_, b0_;
  std::vector<Complex> an_, bn_;
};

}  // namespace oracle

}  // namespace suitaeq
