#include "suitaeq/harmonic.hpp"

#include <cmath>
#include <numbers>

namespace suitaeq {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

// ---------------------------------------------------------------------------
// BoundaryData

BoundaryData BoundaryData::constant(double c) {
  BoundaryData d;
  d.value = [c](int, Complex) { return c; };
  return d;
}

BoundaryData BoundaryData::indicator(int k) {
  BoundaryData d;
  d.value = [k](int component, Complex) { return component == k ? 1.0 : 0.0; };
  return d;
}

BoundaryData BoundaryData::log_distance(Complex pole) {
  BoundaryData d;
  d.value = [pole](int, Complex z) { return -std::log(std::abs(z - pole)); };
  return d;
}

BoundaryData BoundaryData::samples(std::vector<std::vector<double>> values) {
  BoundaryData d;
  d.sample_values = std::move(values);
  return d;
}

// ---------------------------------------------------------------------------
// HarmonicBasis

HarmonicBasis::HarmonicBasis(std::shared_ptr<const Domain> domain, int degree)
    : domain_(std::move(domain)), degree_(degree) {
  if (degree_ < 4) throw ConfigError("harmonic basis degree must be >= 4");
  c0_ = domain_->outer_circle().center;
  r0_ = domain_->outer_circle().radius;
  for (int k = 0; k < domain_->hole_count(); ++k) {
    anchors_.push_back(domain_->anchor(k));
    scales_.push_back(domain_->hole_circle(k).radius);
  }
  size_ = (1 + 2 * degree_) * (1 + domain_->hole_count());
}

int HarmonicBasis::log_column(int hole) const {
  if (hole < 0 || hole >= int(anchors_.size())) throw ConfigError("log_column: bad hole index");
  return (1 + 2 * degree_) * (1 + hole);  // start of the hole block
}

void HarmonicBasis::values(Complex z, std::span<double> row) const {
  row[0] = 1.0;
  int idx = 1;
  const Complex zeta = (z - c0_) / r0_;
  Complex pw = zeta;
  for (int p = 1; p <= degree_; ++p) {
    row[idx++] = pw.real();
    row[idx++] = pw.imag();
    pw *= zeta;
  }
  for (std::size_t k = 0; k < anchors_.size(); ++k) {
    const Complex w = z - anchors_[k];
    row[idx++] = std::log(std::abs(w));
    const Complex eta = scales_[k] / w;
    Complex ep = eta;
    for (int p = 1; p <= degree_; ++p) {
      row[idx++] = ep.real();
      row[idx++] = ep.imag();
      ep *= eta;
    }
  }
}

void HarmonicBasis::analytic_derivatives(Complex z, std::span<Complex> row) const {
  // f_j with Re f_j = basis_j; Im basis terms complete to -i f.
  row[0] = Complex(0.0, 0.0);
  int idx = 1;
  const Complex zeta = (z - c0_) / r0_;
  Complex pw = Complex(1.0, 0.0);  // zeta^{p-1}
  for (int p = 1; p <= degree_; ++p) {
    const Complex d = double(p) * pw / r0_;
    row[idx++] = d;
    row[idx++] = Complex(0.0, -1.0) * d;
    pw *= zeta;
  }
  for (std::size_t k = 0; k < anchors_.size(); ++k) {
    const Complex w = z - anchors_[k];
    row[idx++] = 1.0 / w;
    const Complex eta = scales_[k] / w;
    Complex ep = eta;  // eta^p
    for (int p = 1; p <= degree_; ++p) {
      const Complex d = -double(p) * ep * eta / scales_[k];
      row[idx++] = d;
      row[idx++] = Complex(0.0, -1.0) * d;
      ep *= eta;
    }
  }
}

Complex HarmonicBasis::completion_increment(int j, Complex a, Complex b) const {
  if (j == 0) return Complex(0.0, 0.0);
  const int block = 1 + 2 * degree_;
  if (j < block) {
    const int p = (j - 1) / 2 + 1;
    const bool imag_part = ((j - 1) % 2) == 1;
    const Complex va = std::pow((a - c0_) / r0_, p), vb = std::pow((b - c0_) / r0_, p);
    const Complex d = vb - va;
    return imag_part ? Complex(0.0, -1.0) * d : d;
  }
  const int k = (j - block) / block;
  const int off = (j - block) % block;
  const Complex wa = a - anchors_[k], wb = b - anchors_[k];
  if (off == 0) {
    // log branch tracked segment-wise: a straight segment subtends < pi.
    return Complex(std::log(std::abs(wb)) - std::log(std::abs(wa)), std::arg(wb / wa));
  }
  const int p = (off - 1) / 2 + 1;
  const bool imag_part = ((off - 1) % 2) == 1;
  const double s = scales_[k];
  const Complex d = std::pow(s / wb, p) - std::pow(s / wa, p);
  return imag_part ? Complex(0.0, -1.0) * d : d;
}

// ---------------------------------------------------------------------------
// HarmonicFunction

HarmonicFunction::HarmonicFunction(std::shared_ptr<const HarmonicBasis> basis,
                                   Eigen::VectorXd coeffs, double boundary_residual, bool flagged)
    : basis_(std::move(basis)),
      coeffs_(std::move(coeffs)),
      residual_(boundary_residual),
      flagged_(flagged) {
  if (coeffs_.size() != basis_->size()) throw ConfigError("coefficient/basis size mismatch");
}

HarmonicFunction HarmonicFunction::zero(std::shared_ptr<const Domain> domain) {
  auto basis = std::make_shared<const HarmonicBasis>(std::move(domain), 4);
  return HarmonicFunction(basis, Eigen::VectorXd::Zero(basis->size()));
}

const std::shared_ptr<const Domain>& HarmonicFunction::domain() const { return basis_->domain(); }

namespace {
void require_inside(const Domain& d, Complex z) {
  if (!d.contains_closure(z, 1e-9 * d.scale()))
    throw std::domain_error("evaluation point outside the domain");
}
}  // namespace

double HarmonicFunction::value(Complex z) const {
  require_inside(*domain(), z);
  std::vector<double> row(basis_->size());
  basis_->values(z, row);
  double s = 0.0;
  for (int j = 0; j < coeffs_.size(); ++j) s += coeffs_[j] * row[j];
  return s;
}

Complex HarmonicFunction::analytic_derivative(Complex z) const {
  require_inside(*domain(), z);
  std::vector<Complex> row(basis_->size());
  basis_->analytic_derivatives(z, row);
  Complex s{0.0, 0.0};
  for (int j = 0; j < coeffs_.size(); ++j) s += coeffs_[j] * row[j];
  return s;
}

Eigen::Vector2d HarmonicFunction::gradient(Complex z) const {
  const Complex d = analytic_derivative(z);  // u_x - i u_y
  return {d.real(), -d.imag()};
}

double HarmonicFunction::conjugate_period(int hole) const {
  return coeffs_[basis_->log_column(hole)];
}

Complex HarmonicFunction::completion_increment(std::span<const Complex> polyline) const {
  Complex total{0.0, 0.0};
  for (std::size_t i = 0; i + 1 < polyline.size(); ++i) {
    for (int j = 0; j < coeffs_.size(); ++j) {
      if (coeffs_[j] == 0.0) continue;
      total += coeffs_[j] * basis_->completion_increment(j, polyline[i], polyline[i + 1]);
    }
  }
  return total;
}

HarmonicFunction HarmonicFunction::linear_combination(std::span<const double> lambdas,
                                                      std::span<const HarmonicFunction> terms) {
  if (lambdas.size() != terms.size() || terms.empty())
    throw ConfigError("linear_combination: size mismatch");
  Eigen::VectorXd c = Eigen::VectorXd::Zero(terms[0].coefficients().size());
  double res = 0.0;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (terms[i].basis() != terms[0].basis())
      throw ConfigError("linear_combination: mixed bases");
    c += lambdas[i] * terms[i].coefficients();
    res += std::abs(lambdas[i]) * terms[i].boundary_residual();
  }
  return HarmonicFunction(terms[0].basis(), std::move(c), res);
}

// ---------------------------------------------------------------------------
// DirichletSolver

DirichletSolver::DirichletSolver(std::shared_ptr<const Domain> domain, SolveOptions options)
    : domain_(std::move(domain)), options_(options) {
  basis_ = std::make_shared<const HarmonicBasis>(domain_, options_.degree);
  const int n = domain_->components();
  int per = options_.nodes_per_component;
  if (per == 0) per = std::max(64, (3 * basis_->size() + n - 1) / n + 2);
  nodes_ = domain_->boundary_nodes(per);
  if (int(nodes_.size()) < 3 * basis_->size())
    throw ConfigError("dirichlet_solve: boundary node count below 3x basis size");

  const int rows = int(nodes_.size()), cols = basis_->size();
  collocation_.resize(rows, cols);
  row_weight_.resize(rows);
  std::vector<double> row(cols);
  for (int i = 0; i < rows; ++i) {
    basis_->values(nodes_.nodes[i], row);
    for (int j = 0; j < cols; ++j) collocation_(i, j) = row[j];
    row_weight_[i] = std::sqrt(nodes_.weights[i]);
  }
  Eigen::MatrixXd scaled = row_weight_.asDiagonal() * collocation_;
  column_scale_.resize(cols);
  for (int j = 0; j < cols; ++j) {
    const double nrm = scaled.col(j).norm();
    column_scale_[j] = nrm > 0.0 ? nrm : 1.0;
    scaled.col(j) /= column_scale_[j];
  }
  svd_.compute(scaled, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd_.setThreshold(1e-12);
}

HarmonicFunction DirichletSolver::solve(const BoundaryData& data) const {
  const int rows = int(nodes_.size());
  Eigen::VectorXd b(rows);
  if (data.sample_values) {
    const auto& sv = *data.sample_values;
    if (int(sv.size()) != domain_->components())
      throw ConfigError("boundary samples: component count mismatch");
    for (int k = 0; k < domain_->components(); ++k) {
      const auto span = nodes_.component_begin[k + 1] - nodes_.component_begin[k];
      if (sv[k].size() != span) throw ConfigError("boundary samples: node count mismatch");
      for (std::size_t i = 0; i < span; ++i) b[nodes_.component_begin[k] + i] = sv[k][i];
    }
  } else {
    for (int i = 0; i < rows; ++i) b[i] = data.value(nodes_.component[i], nodes_.nodes[i]);
  }

  const Eigen::VectorXd y = svd_.solve((row_weight_.array() * b.array()).matrix());
  const Eigen::VectorXd x = (y.array() / column_scale_.array()).matrix();
  const double residual = (collocation_ * x - b).lpNorm<Eigen::Infinity>();
  return HarmonicFunction(basis_, x, residual, residual > options_.flag_tolerance);
}

HarmonicFunction dirichlet_solve(std::shared_ptr<const Domain> domain, const BoundaryData& data,
                                 SolveOptions options) {
  return DirichletSolver(std::move(domain), options).solve(data);
}

std::vector<HarmonicFunction> harmonic_measures(const DirichletSolver& solver) {
  const int holes = solver.basis()->domain()->hole_count();
  std::vector<HarmonicFunction> out;
  out.reserve(holes);
  for (int k = 0; k < holes; ++k) out.push_back(solver.solve(BoundaryData::indicator(k)));
  return out;
}

std::vector<HarmonicFunction> harmonic_measures(std::shared_ptr<const Domain> domain,
                                                SolveOptions options) {
  if (domain->hole_count() == 0) return {};
  DirichletSolver solver(std::move(domain), options);
  return harmonic_measures(solver);
}

double conjugate_period_line_integral(const HarmonicFunction& u, const Cycle& cycle,
                                      int quadrature_nodes) {
  double s = 0.0;
  for (int i = 0; i < quadrature_nodes; ++i) {
    const double t = kTwoPi * i / quadrature_nodes;
    const Complex tg = cycle.tangent(t);
    const Eigen::Vector2d g = u.gradient(cycle.point(t));
    s += g[0] * tg.imag() - g[1] * tg.real();  // u_x dy - u_y dx
  }
  return s / quadrature_nodes;  // (1/2pi) * (2pi/M) * sum
}

}  // namespace suitaeq
