#include "suitaeq/green.hpp"

#include <cmath>
#include <numbers>

namespace suitaeq {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

GreenFunction::GreenFunction(Complex pole, HarmonicFunction correction)
    : pole_(pole), correction_(std::move(correction)) {
  if (!correction_.domain()->contains(pole_))
    throw ConfigError("green_function: pole must lie inside the domain");
}

double GreenFunction::value(Complex z) const {
  const double d = std::abs(z - pole_);
  if (d < 1e-14 * domain()->scale())
    throw std::domain_error("green function evaluated at its pole");
  return std::log(d) + correction_.value(z);
}

Complex GreenFunction::analytic_derivative(Complex z) const {
  return 1.0 / (z - pole_) + correction_.analytic_derivative(z);
}

Eigen::Vector2d GreenFunction::gradient(Complex z) const {
  const Complex d = analytic_derivative(z);
  return {d.real(), -d.imag()};
}

double GreenFunction::log_capacity() const { return std::exp(correction_.value(pole_)); }

double GreenFunction::boundary_flux(int component) const {
  const Domain& d = *domain();
  if (component < 0 || component >= d.components())
    throw ConfigError("boundary_flux: bad component index");
  if (!flux_ready_) {
    flux_nodes_ = d.boundary_nodes(std::max(256, 4 * correction_.basis()->degree()));
    flux_ready_ = true;
  }
  double s = 0.0;
  for (std::size_t i = flux_nodes_.component_begin[component];
       i < flux_nodes_.component_begin[component + 1]; ++i) {
    const Complex z = flux_nodes_.nodes[i];
    const Complex n = flux_nodes_.normals[i];
    const Complex gd = 1.0 / (z - pole_) + correction_.analytic_derivative(z);
    const double dn = gd.real() * n.real() - gd.imag() * n.imag();  // grad.dot(n)
    s += flux_nodes_.weights[i] * dn;
  }
  s /= kTwoPi;
  // Outer component: report the into-domain-normal value (see API note).
  return component == d.outer_index() ? -s : s;
}

double GreenFunction::cycle_period(const Cycle& cycle) const {
  const double clearance = std::abs(cycle.center - pole_) - cycle.radius;
  if (std::abs(clearance) < 1e-9 * domain()->scale())
    throw ConfigError("cycle_period: cycle passes through the pole");
  double winding = std::abs(pole_ - cycle.center) < cycle.radius ? 1.0 : 0.0;
  double period = winding;
  for (int k = 0; k < domain()->hole_count(); ++k) {
    // log|z - a_k| contributes its winding number around the cycle
    const bool enclosed = std::abs(domain()->anchor(k) - cycle.center) < cycle.radius;
    if (enclosed) period += correction_.conjugate_period(k);
  }
  return period;
}

double GreenFunction::cycle_period(int hole) const {
  return cycle_period(domain()->cycle(hole));
}

GreenFunction green_function(std::shared_ptr<const Domain> domain, Complex pole,
                             SolveOptions options) {
  DirichletSolver solver(std::move(domain), options);
  return green_function(solver, pole);
}

GreenFunction green_function(const DirichletSolver& solver, Complex pole) {
  return GreenFunction(pole, solver.solve(BoundaryData::log_distance(pole)));
}

double log_capacity(std::shared_ptr<const Domain> domain, Complex pole, SolveOptions options) {
  return green_function(std::move(domain), pole, options).log_capacity();
}

double green_cycle_period_line_integral(const GreenFunction& g, const Cycle& cycle,
                                        int quadrature_nodes) {
  double s = 0.0;
  for (int i = 0; i < quadrature_nodes; ++i) {
    const double t = kTwoPi * i / quadrature_nodes;
    const Complex tg = cycle.tangent(t);
    const Eigen::Vector2d gr = g.gradient(cycle.point(t));
    s += gr[0] * tg.imag() - gr[1] * tg.real();
  }
  return s / quadrature_nodes;
}

}  // namespace suitaeq
