#pragma once

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <optional>

#include "suitaeq/geometry.hpp"

namespace suitaeq {

/// Dirichlet boundary values, evaluated lazily per (component, point).
struct BoundaryData {
  std::function<double(int component, Complex z)> value;

  static BoundaryData constant(double c);
  /// 1 on component k, 0 elsewhere.
  static BoundaryData indicator(int k);
  /// -log|z - pole| (Green-function correction data).
  static BoundaryData log_distance(Complex pole);
  /// Per-component sample vectors; sizes must match the solver node counts.
  static BoundaryData samples(std::vector<std::vector<double>> values);

  std::optional<std::vector<std::vector<double>>> sample_values;  // set by samples()
};

struct SolveOptions {
  int degree = 24;               // harmonic expansion order per block (>= 4)
  int nodes_per_component = 0;   // 0 = automatic (>= 3x basis size)
  double flag_tolerance = 1e-6;  // boundary residual above this flags the result
};

/// Shared expansion basis: {1, Re/Im ((z-c0)/r0)^p} plus, per hole anchor a_k,
/// {log|z - a_k|, Re/Im (s_k/(z - a_k))^p}, p = 1..degree.
class HarmonicBasis {
 public:
  HarmonicBasis(std::shared_ptr<const Domain> domain, int degree);

  int size() const { return size_; }
  int degree() const { return degree_; }
  const std::shared_ptr<const Domain>& domain() const { return domain_; }

  /// Fills row[j] = basis_j(z) for all j.
  void values(Complex z, std::span<double> row) const;
  /// Fills row[j] = f_j'(z) where f_j is the analytic completion of basis_j.
  void analytic_derivatives(Complex z, std::span<Complex> row) const;
  /// Exact increment of the completion of basis_j along the segment [a, b]
  /// (log terms tracked by principal-argument accumulation; all other terms
  /// via closed-form antiderivatives).
  Complex completion_increment(int j, Complex a, Complex b) const;
  /// Index of the log|z - a_k| column, or -1.
  int log_column(int hole) const;

 private:
  std::shared_ptr<const Domain> domain_;
  int degree_;
  int size_;
  Complex c0_;
  double r0_;
  std::vector<Complex> anchors_;
  std::vector<double> scales_;
};

/// Harmonic function represented by basis coefficients on a fixed domain.
class HarmonicFunction {
 public:
  HarmonicFunction(std::shared_ptr<const HarmonicBasis> basis, Eigen::VectorXd coeffs,
                   double boundary_residual = 0.0, bool flagged = false);

  static HarmonicFunction zero(std::shared_ptr<const Domain> domain);

  double value(Complex z) const;                 // errors if z is outside the closure
  Eigen::Vector2d gradient(Complex z) const;     // (du/dx, du/dy)
  Complex analytic_derivative(Complex z) const;  // u_x - i u_y (holomorphic)
  /// Normalized conjugate period (1/2pi) oint_{gamma_k} du~ = log-coefficient d_k.
  double conjugate_period(int hole) const;
  /// Increment of the analytic completion along a polyline in the domain.
  Complex completion_increment(std::span<const Complex> polyline) const;

  double boundary_residual() const { return residual_; }
  bool flagged() const { return flagged_; }
  const std::shared_ptr<const Domain>& domain() const;
  const std::shared_ptr<const HarmonicBasis>& basis() const { return basis_; }
  const Eigen::VectorXd& coefficients() const { return coeffs_; }

  /// u = sum lambdas[i] * terms[i]; all terms must share one basis.
  static HarmonicFunction linear_combination(std::span<const double> lambdas,
                                             std::span<const HarmonicFunction> terms);

 private:
  std::shared_ptr<const HarmonicBasis> basis_;
  Eigen::VectorXd coeffs_;
  double residual_;
  bool flagged_;
};

/// Collocation least-squares solver with a cached column-scaled SVD; reuse it
/// for repeated solves on one (domain, degree) pair.
class DirichletSolver {
 public:
  DirichletSolver(std::shared_ptr<const Domain> domain, SolveOptions options = {});

  HarmonicFunction solve(const BoundaryData& data) const;
  const QuadratureSet& nodes() const { return nodes_; }
  const std::shared_ptr<const HarmonicBasis>& basis() const { return basis_; }
  const SolveOptions& options() const { return options_; }

 private:
  std::shared_ptr<const Domain> domain_;
  SolveOptions options_;
  std::shared_ptr<const HarmonicBasis> basis_;
  QuadratureSet nodes_;
  Eigen::MatrixXd collocation_;  // unweighted rows: basis values at nodes
  Eigen::BDCSVD<Eigen::MatrixXd> svd_;
  Eigen::VectorXd column_scale_;
  Eigen::VectorXd row_weight_;  // sqrt of quadrature weights
};

HarmonicFunction dirichlet_solve(std::shared_ptr<const Domain> domain, const BoundaryData& data,
                                 SolveOptions options = {});

/// Harmonic measures u_0..u_{n-2} of the holes (empty for the disk).
std::vector<HarmonicFunction> harmonic_measures(std::shared_ptr<const Domain> domain,
                                                SolveOptions options = {});
std::vector<HarmonicFunction> harmonic_measures(const DirichletSolver& solver);

/// Numeric line integral (1/2pi) oint (u_x dy - u_y dx) over the cycle;
/// independent cross-check of conjugate_period.
double conjugate_period_line_integral(const HarmonicFunction& u, const Cycle& cycle,
                                      int quadrature_nodes = 256);

}  // namespace suitaeq
