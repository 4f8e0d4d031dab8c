#include "suitaeq/suita.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace suitaeq {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double b = 1.0;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

}  // namespace

// ---------------------------------------------------------------------------
// WeightProfile / WeightSpec / JetConfig

WeightProfile WeightProfile::exponential(double decay, double weight) {
  WeightProfile p;
  p.terms = {{weight, decay}};
  p.validate();
  return p;
}

double WeightProfile::value(double t) const {
  double c = 0.0;
  for (const Term& term : terms) c += term.weight * std::exp(-term.decay * t);
  return c;
}

double WeightProfile::integral() const {
  double s = 0.0;
  for (const Term& term : terms) s += term.weight / (1.0 + term.decay);
  return s;
}

void WeightProfile::validate() const {
  if (terms.empty()) throw ConfigError("weight profile: no terms");
  double total = 0.0;
  for (const Term& term : terms) {
    if (term.weight < 0.0) throw ConfigError("weight profile: negative coefficient");
    if (term.decay < 0.0 || term.decay >= 1.0)
      throw ConfigError("weight profile: decay must lie in [0, 1)");
    total += term.weight;
  }
  if (total <= 0.0) throw ConfigError("weight profile: identically zero");
}

Complex WeightSpec::g_value(Complex z) const {
  Complex acc{0.0, 0.0};
  for (auto it = g.rbegin(); it != g.rend(); ++it) acc = acc * z + *it;
  return acc;
}

bool WeightSpec::u_vanishes() const {
  return !u || u->coefficients().lpNorm<Eigen::Infinity>() == 0.0;
}

double WeightSpec::u_value(Complex z) const { return u ? u->value(z) : 0.0; }

double WeightSpec::v_value(Complex z) const {
  return std::log(std::abs(g_value(z))) + u_value(z);
}

std::vector<Complex> WeightSpec::zeros_inside(const Domain& domain) const {
  // trim trailing ~zero coefficients
  double top = 0.0;
  for (Complex c : g) top = std::max(top, std::abs(c));
  if (top == 0.0) throw ConfigError("weight: zero polynomial");
  int deg = int(g.size()) - 1;
  while (deg > 0 && std::abs(g[deg]) < 1e-14 * top) --deg;
  if (deg == 0) return {};

  Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(deg, deg);
  for (int i = 1; i < deg; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < deg; ++i) companion(i, deg - 1) = -g[i] / g[deg];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(companion, false);
  std::vector<Complex> roots;
  for (int i = 0; i < deg; ++i) {
    const Complex r = es.eigenvalues()(i);
    if (domain.contains(r)) roots.push_back(r);
  }
  return roots;
}

void WeightSpec::validate() const {
  profile.validate();
  double top = 0.0;
  for (Complex c : g) top = std::max(top, std::abs(c));
  if (g.empty() || top == 0.0) throw ConfigError("weight: zero polynomial");
}

double JetConfig::order_weight_sum() const {
  double s = 0.0;
  for (int k : orders) s += k + 1.0;
  return s;
}

void JetConfig::validate(const Domain& domain, const WeightSpec& w) const {
  const int m = size();
  if (m == 0) throw ConfigError("jets: no points");
  if (int(orders.size()) != m) throw ConfigError("jets: orders/points size mismatch");
  if (!amplitudes.empty() && int(amplitudes.size()) != m)
    throw ConfigError("jets: amplitudes/points size mismatch");
  if (!weights.empty() && int(weights.size()) != m)
    throw ConfigError("jets: weights/points size mismatch");
  for (int j = 0; j < m; ++j) {
    if (orders[j] < 0) throw ConfigError("jets: negative vanishing order");
    if (!weights.empty() && !(weights[j] > 0.0)) throw ConfigError("jets: nonpositive weight");
    if (!amplitudes.empty() && std::abs(amplitudes[j]) == 0.0)
      throw ConfigError("jets: zero amplitude");
    if (!domain.contains(points[j])) throw ConfigError("jets: point outside the domain");
    if (std::abs(w.g_value(points[j])) < 1e-300)
      throw ConfigError("jets: weight polynomial vanishes at a jet point");
    for (int l = 0; l < j; ++l)
      if (std::abs(points[j] - points[l]) < 1e-12 * domain.scale())
        throw ConfigError("jets: coincident points");
  }
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::EqualityCapable: return "EQUALITY_CAPABLE";
    case Verdict::NotEquality: return "NOT_EQUALITY";
    case Verdict::ImpossibleByCount: return "IMPOSSIBLE_BY_COUNT";
    case Verdict::Undetermined: return "UNDETERMINED";
  }
  return "UNDETERMINED";
}

// ---------------------------------------------------------------------------
// Shared per-call state: one boundary solver, one Green function per jet.

namespace {

struct Context {
  std::shared_ptr<const Domain> domain;
  DirichletSolver solver;
  std::vector<GreenFunction> greens;

  Context(std::shared_ptr<const Domain> d, const JetConfig& jets, const SolveOptions& options)
      : domain(d), solver(d, options) {
    greens.reserve(jets.points.size());
    for (Complex p : jets.points) greens.push_back(green_function(solver, p));
  }
};

std::vector<double> alpha_impl(const Context& ctx, const WeightSpec& w, const JetConfig& jets) {
  const int m = jets.size();
  std::vector<double> alpha(m);
  for (int j = 0; j < m; ++j) {
    double s = 0.0;
    for (int l = 0; l < m; ++l)
      if (l != j) s += (jets.orders[l] + 1.0) * ctx.greens[l].value(jets.points[j]);
    alpha[j] = s + w.v_value(jets.points[j]);
  }
  return alpha;
}

double rhs_impl(const Context& ctx, const WeightSpec& w, const JetConfig& jets) {
  if (jets.amplitudes.empty()) throw ConfigError("rhs_sum: jet amplitudes required");
  const auto alpha = alpha_impl(ctx, w, jets);
  double s = 0.0;
  for (int j = 0; j < jets.size(); ++j) {
    const double cap = ctx.greens[j].log_capacity();
    s += kPi * std::norm(jets.amplitudes[j]) * std::exp(-2.0 * alpha[j]) /
         (jets.weight(j) * std::pow(cap, 2.0 * (jets.orders[j] + 1)));
  }
  return s;
}

std::vector<DeltaEntry> deltas_impl(const std::vector<HarmonicFunction>& measures,
                                    const WeightSpec& w, const JetConfig& jets) {
  std::vector<DeltaEntry> out;
  for (int k = 0; k < int(measures.size()); ++k) {
    double d = 0.0;
    for (int j = 0; j < jets.size(); ++j)
      d += (jets.orders[j] + 1.0) * measures[k].value(jets.points[j]);
    if (w.u && !w.u_vanishes()) d -= w.u->conjugate_period(k);
    out.push_back({d, std::abs(d - std::round(d))});
  }
  return out;
}

}  // namespace

std::vector<double> alpha_values(std::shared_ptr<const Domain> domain, const WeightSpec& w,
                                 const JetConfig& jets, SolveOptions options) {
  w.validate();
  jets.validate(*domain, w);
  Context ctx(domain, jets, options);
  return alpha_impl(ctx, w, jets);
}

double rhs_sum(std::shared_ptr<const Domain> domain, const WeightSpec& w, const JetConfig& jets,
               SolveOptions options) {
  w.validate();
  jets.validate(*domain, w);
  Context ctx(domain, jets, options);
  return rhs_impl(ctx, w, jets);
}

std::vector<DeltaEntry> integrality_deltas(std::shared_ptr<const Domain> domain,
                                           const WeightSpec& w, const JetConfig& jets,
                                           SolveOptions options) {
  w.validate();
  jets.validate(*domain, w);
  if (domain->hole_count() == 0) return {};
  return deltas_impl(harmonic_measures(domain, options), w, jets);
}

bool necessary_condition(std::shared_ptr<const Domain> domain, const WeightSpec& w,
                         const JetConfig& jets) {
  if (!w.u_vanishes())
    throw ConfigError("necessary_condition: requires a vanishing harmonic weight part");
  return domain->hole_count() + 1 <= jets.order_weight_sum();
}

AnnulusCriterion annulus_criterion(double R, double u_period, const JetConfig& jets,
                                   double tolerance) {
  if (!(R > 1.0)) throw ConfigError("annulus_criterion: R must exceed 1");
  if (jets.points.empty() || jets.orders.size() != jets.points.size())
    throw ConfigError("annulus_criterion: malformed jets");
  double lhs_log = 0.0;
  double base = u_period;
  for (int j = 0; j < jets.size(); ++j) {
    const double r = std::abs(jets.points[j]);
    if (!(r > 1.0 && r < R)) throw ConfigError("annulus_criterion: point outside the annulus");
    lhs_log += (jets.orders[j] + 1.0) * std::log(r);
    base += jets.orders[j] + 1.0;  // sum k_j + m
  }
  const double n_star = base - lhs_log / std::log(R);
  const long N = std::lround(n_star);
  const double residual = std::abs(lhs_log - (base - N) * std::log(R));
  return {residual <= tolerance * std::log(R), N, residual};
}

// ---------------------------------------------------------------------------
// Holomorphic trial space.

HolomorphicBasis::HolomorphicBasis(std::shared_ptr<const Domain> domain, int degree)
    : domain_(std::move(domain)), degree_(degree) {
  if (degree_ < 0) throw ConfigError("holomorphic basis: negative degree");
  c0_ = domain_->outer_circle().center;
  r0_ = domain_->outer_circle().radius;
  for (int k = 0; k < domain_->hole_count(); ++k) {
    anchors_.push_back(domain_->anchor(k));
    scales_.push_back(domain_->hole_circle(k).radius);
  }
  size_ = (degree_ + 1) + int(anchors_.size()) * degree_;
}

void HolomorphicBasis::values(Complex z, std::span<Complex> row) const {
  const Complex w = (z - c0_) / r0_;
  Complex p{1.0, 0.0};
  int col = 0;
  for (int n = 0; n <= degree_; ++n) {
    row[col++] = p;
    p *= w;
  }
  for (std::size_t k = 0; k < anchors_.size(); ++k) {
    const Complex q = scales_[k] / (z - anchors_[k]);
    Complex t = q;
    for (int n = 1; n <= degree_; ++n) {
      row[col++] = t;
      t *= q;
    }
  }
}

Complex HolomorphicBasis::taylor_coefficient(int j, Complex center, int order) const {
  if (j <= degree_) {  // ((z - c0)/r0)^n
    const int n = j;
    if (order > n) return {0.0, 0.0};
    const Complex w = (center - c0_) / r0_;
    Complex p{1.0, 0.0};
    for (int i = 0; i < n - order; ++i) p *= w;
    return binomial(n, order) * p / std::pow(r0_, double(order));
  }
  const int idx = j - degree_ - 1;
  const int hole = idx / degree_;
  const int n = idx % degree_ + 1;  // (s/(z-a))^n
  const Complex q = 1.0 / (center - anchors_[hole]);
  Complex p{1.0, 0.0};
  for (int i = 0; i < n + order; ++i) p *= q;
  const double sign = (order % 2 == 0) ? 1.0 : -1.0;
  return std::pow(scales_[hole], double(n)) * sign * binomial(n + order - 1, order) * p;
}

Complex MinimalResult::evaluate(Complex z) const {
  std::vector<Complex> row(basis->size());
  basis->values(z, row);
  Complex acc{0.0, 0.0};
  for (int i = 0; i < basis->size(); ++i) acc += coefficients(i) * row[i];
  return acc;
}

Complex MinimalResult::taylor(Complex center, int order) const {
  Complex acc{0.0, 0.0};
  for (int i = 0; i < basis->size(); ++i)
    acc += coefficients(i) * basis->taylor_coefficient(i, center, order);
  return acc;
}

// ---------------------------------------------------------------------------
// Weighted Gram assembly and the constrained quadratic program.

namespace {

// rho = exp(-2 sum (k_j+1-p_j) G_j - 2 v) * c(-2 sum p_j G_j) at every node.
Eigen::VectorXd weight_density(const Context& ctx, const WeightSpec& w, const JetConfig& jets,
                               const AreaQuadrature& mesh) {
  const auto& hb = *ctx.solver.basis();
  std::vector<double> row(hb.size());
  Eigen::VectorXd rho(mesh.nodes.size());
  const int m = jets.size();
  for (std::size_t q = 0; q < mesh.nodes.size(); ++q) {
    const Complex z = mesh.nodes[q];
    hb.values(z, row);
    double shape = 0.0, scale_arg = 0.0;
    for (int j = 0; j < m; ++j) {
      double corr = 0.0;
      const auto& coef = ctx.greens[j].correction().coefficients();
      for (int i = 0; i < hb.size(); ++i) corr += coef(i) * row[i];
      const double gj = std::log(std::abs(z - jets.points[j])) + corr;
      shape += (jets.orders[j] + 1.0 - jets.weight(j)) * gj;
      scale_arg += jets.weight(j) * gj;
    }
    const double ex = -2.0 * shape - 2.0 * w.v_value(z);
    const double val = std::exp(ex) * w.profile.value(-2.0 * scale_arg);
    if (!std::isfinite(val)) throw NumericError("minimal_l2: weight overflow at a mesh node");
    rho(q) = val;
  }
  return rho;
}

MinimalResult minimal_impl(const Context& ctx, const JetConfig& jets, int basis_degree,
                           const AreaQuadrature& mesh, const Eigen::VectorXd& rho) {
  if (jets.amplitudes.empty()) throw ConfigError("minimal_l2: jet amplitudes required");
  auto basis = std::make_shared<const HolomorphicBasis>(ctx.domain, basis_degree);
  const int B = basis->size();

  Eigen::MatrixXcd gram_lower = Eigen::MatrixXcd::Zero(B, B);
  Eigen::VectorXcd row(B);
  for (std::size_t q = 0; q < mesh.nodes.size(); ++q) {
    basis->values(mesh.nodes[q], std::span<Complex>(row.data(), B));
    gram_lower.selfadjointView<Eigen::Lower>().rankUpdate(row, mesh.weights[q] * rho(q));
  }
  const Eigen::MatrixXcd gram = gram_lower.selfadjointView<Eigen::Lower>();

  // jet constraint rows: Taylor orders 0..k_j-1 vanish, order k_j equals a_j
  int rows = 0;
  for (int k : jets.orders) rows += k + 1;
  Eigen::MatrixXcd A(rows, B);
  Eigen::VectorXcd b(rows);
  int r = 0;
  for (int j = 0; j < jets.size(); ++j)
    for (int t = 0; t <= jets.orders[j]; ++t, ++r) {
      for (int i = 0; i < B; ++i) A(r, i) = basis->taylor_coefficient(i, jets.points[j], t);
      b(r) = (t == jets.orders[j]) ? jets.amplitudes[j] : Complex{0.0, 0.0};
    }

  // column scaling by the Gram diagonal, row scaling of the constraints
  Eigen::VectorXd col(B);
  for (int i = 0; i < B; ++i) col(i) = std::sqrt(std::max(gram(i, i).real(), 1e-300));
  Eigen::MatrixXcd gs = gram;
  for (int i = 0; i < B; ++i)
    for (int l = 0; l < B; ++l) gs(i, l) /= col(i) * col(l);
  Eigen::MatrixXcd as = A;
  for (int i = 0; i < B; ++i) as.col(i) /= col(i);
  Eigen::VectorXcd bs = b;
  for (int i = 0; i < rows; ++i) {
    const double n = as.row(i).norm();
    if (n > 0.0) {
      as.row(i) /= n;
      bs(i) /= n;
    }
  }

  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(as, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  int rank = 0;
  while (rank < sv.size() && sv(rank) > 1e-12 * sv(0)) ++rank;

  Eigen::VectorXcd xp = Eigen::VectorXcd::Zero(B);
  {
    const Eigen::VectorXcd ub = svd.matrixU().leftCols(rank).adjoint() * bs;
    for (int i = 0; i < rank; ++i) xp += svd.matrixV().col(i) * (ub(i) / sv(i));
  }
  if ((as * xp - bs).norm() > 1e-10 * (bs.norm() + 1.0))
    throw NumericError("minimal_l2: infeasible jet constraints at this basis degree");

  Eigen::VectorXcd xs;
  if (rank < B) {
    const Eigen::MatrixXcd Z = svd.matrixV().rightCols(B - rank);
    const Eigen::MatrixXcd mr = Z.adjoint() * gs * Z;
    Eigen::LDLT<Eigen::MatrixXcd> ldlt(mr);
    if (ldlt.info() != Eigen::Success)
      throw NumericError("minimal_l2: Gram factorization failed");
    xs = xp + Z * ldlt.solve(-(Z.adjoint() * (gs * xp)));
  } else {
    xs = xp;
  }

  const Eigen::VectorXcd gx = gs * xs;
  const double c_val = 2.0 * xs.dot(gx).real();
  if (!(c_val > 0.0)) throw NumericError("minimal_l2: quadrature produced a nonpositive norm");

  MinimalResult out;
  out.value = c_val;
  out.coefficients = xs.cwiseQuotient(col.cast<Complex>());
  out.basis = basis;
  return out;
}

AreaQuadrature build_mesh(const Context& ctx, const WeightSpec& w, const JetConfig& jets,
                          const EqualityOptions& options) {
  std::vector<Complex> centers = jets.points;
  for (Complex z : w.zeros_inside(*ctx.domain)) centers.push_back(z);
  return ctx.domain->interior_mesh(options.mesh_target, centers);
}

}  // namespace

MinimalResult minimal_l2(std::shared_ptr<const Domain> domain, const WeightSpec& w,
                         const JetConfig& jets, int basis_degree, EqualityOptions options) {
  w.validate();
  jets.validate(*domain, w);
  Context ctx(domain, jets, options.solver);
  const AreaQuadrature mesh = build_mesh(ctx, w, jets, options);
  const Eigen::VectorXd rho = weight_density(ctx, w, jets, mesh);
  return minimal_impl(ctx, jets, basis_degree, mesh, rho);
}

// ---------------------------------------------------------------------------
// Analytic completions along hole-avoiding paths (the extremal form).

namespace {

struct Obstacle {
  Complex center;
  double radius;
};

// Straight path with recursive deflection around obstacles; obstacles that
// contain an endpoint are not deflected (the endpoint owns them).
void route_segment(const Domain& domain, Complex a, Complex b,
                   std::span<const Obstacle> obstacles, int depth, std::vector<Complex>& out) {
  const Obstacle* worst = nullptr;
  double worst_pen = 0.0;
  Complex worst_q;
  for (const Obstacle& o : obstacles) {
    if (std::abs(a - o.center) < o.radius || std::abs(b - o.center) < o.radius) continue;
    const Complex d = b - a;
    const double len2 = std::norm(d);
    if (len2 == 0.0) continue;
    double t = std::clamp(((o.center - a) / d).real(), 0.0, 1.0);
    const Complex q = a + t * d;
    const double pen = o.radius - std::abs(q - o.center);
    if (pen > worst_pen) {
      worst_pen = pen;
      worst = &o;
      worst_q = q;
    }
  }
  if (!worst) {
    out.push_back(b);
    return;
  }
  if (depth == 0) throw NumericError("path planning failed between interior points");
  Complex dir = worst_q - worst->center;
  if (std::abs(dir) < 1e-12 * worst->radius) dir = (b - a) * Complex{0.0, 1.0};
  dir /= std::abs(dir);
  Complex w = worst->center + dir * (1.2 * worst->radius);
  if (!domain.contains(w)) {
    w = worst->center - dir * (1.2 * worst->radius);
    if (!domain.contains(w)) throw NumericError("path planning failed between interior points");
  }
  route_segment(domain, a, w, obstacles, depth - 1, out);
  route_segment(domain, w, b, obstacles, depth - 1, out);
}

std::vector<Complex> route(const Domain& domain, Complex a, Complex b,
                           std::span<const Obstacle> obstacles) {
  std::vector<Complex> path{a};
  route_segment(domain, a, b, obstacles, 8, path);
  return path;
}

// Accumulated branch state of every completion at the end of a path.
struct Branch {
  std::vector<Complex> log_terms;  // log(z - z_l), continuously tracked
  std::vector<Complex> h_terms;    // completions of the Green corrections
  Complex v_term{0.0, 0.0};        // completion of u
};

class PathEngine {
 public:
  PathEngine(std::shared_ptr<const Domain> domain, const WeightSpec& w, const JetConfig& jets,
             std::vector<GreenFunction> greens, Complex base)
      : domain_(std::move(domain)), weight_(w), jets_(jets), greens_(std::move(greens)),
        base_(base) {
    // obstacle set: holes (kept clear via the mid moat) and jet points
    for (int k = 0; k < domain_->hole_count(); ++k) {
      const Circle h = domain_->hole_circle(k);
      const Cycle c = domain_->cycle(k);
      obstacles_.push_back({h.center, 0.5 * (h.radius + c.radius)});
    }
    for (int j = 0; j < jets_.size(); ++j) {
      double lim = domain_->boundary_clearance(jets_.points[j]);
      for (int l = 0; l < jets_.size(); ++l)
        if (l != j) lim = std::min(lim, std::abs(jets_.points[j] - jets_.points[l]));
      obstacles_.push_back({jets_.points[j], 0.35 * lim});
    }
  }

  Complex base() const { return base_; }
  const Domain& domain() const { return *domain_; }

  Branch start() const {
    Branch s;
    for (int l = 0; l < jets_.size(); ++l) {
      s.log_terms.push_back(std::log(base_ - jets_.points[l]));
      s.h_terms.push_back(Complex{greens_[l].correction().value(base_), 0.0});
    }
    s.v_term = {weight_.u_value(base_), 0.0};
    return s;
  }

  void advance(Branch& s, std::span<const Complex> path) const {
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      const Complex a = path[i], b = path[i + 1];
      const Complex seg[2] = {a, b};
      for (int l = 0; l < jets_.size(); ++l) {
        s.log_terms[l] += std::log(std::abs(b - jets_.points[l]) / std::abs(a - jets_.points[l])) +
                          Complex{0.0, std::arg((b - jets_.points[l]) / (a - jets_.points[l]))};
        s.h_terms[l] += greens_[l].correction().completion_increment(seg);
      }
      if (weight_.u && !weight_.u->coefficients().isZero())
        s.v_term += weight_.u->completion_increment(seg);
    }
  }

  Branch branch_at(Complex z) const {
    Branch s = start();
    advance(s, route(*domain_, base_, z, obstacles_));
    return s;
  }

  // density of Phi against dz, from an accumulated branch at z
  Complex density(Complex z, const Branch& s) const {
    Complex expo{0.0, 0.0};
    Complex deriv{0.0, 0.0};
    for (int l = 0; l < jets_.size(); ++l) {
      expo += (jets_.orders[l] + 1.0) * (s.log_terms[l] + s.h_terms[l]);
      deriv += jets_.weight(l) * greens_[l].analytic_derivative(z);
    }
    expo += s.v_term;
    return weight_.g_value(z) * std::exp(expo) * deriv;
  }

  Complex amplitude(int j) const {
    const Complex zj = jets_.points[j];
    Branch s = branch_at(zj);  // log_terms[j] is garbage at zj; excluded below
    Complex expo = (jets_.orders[j] + 1.0) * s.h_terms[j] + s.v_term;
    for (int l = 0; l < jets_.size(); ++l)
      if (l != j) expo += (jets_.orders[l] + 1.0) * (s.log_terms[l] + s.h_terms[l]);
    return jets_.weight(j) * weight_.g_value(zj) * std::exp(expo);
  }

  std::span<const Obstacle> obstacles() const { return obstacles_; }

 private:
  std::shared_ptr<const Domain> domain_;
  WeightSpec weight_;
  JetConfig jets_;
  std::vector<GreenFunction> greens_;
  Complex base_;
  std::vector<Obstacle> obstacles_;
};

// deterministic scan for a well-separated interior point
Complex pick_interior(const Domain& domain, const JetConfig& jets,
                      std::span<const Complex> extra_avoid) {
  const Circle outer = domain.outer_circle();
  Complex best{outer.center};
  double best_score = -1.0;
  for (int ir = 1; ir <= 8; ++ir)
    for (int it = 0; it < 24; ++it) {
      const Complex z =
          outer.center + std::polar(outer.radius * ir / 9.0, kTwoPi * (it + 0.33) / 24.0);
      if (!domain.contains(z)) continue;
      double score = domain.boundary_clearance(z);
      for (Complex p : jets.points) score = std::min(score, std::abs(z - p));
      for (Complex p : extra_avoid) score = std::min(score, std::abs(z - p));
      if (score > best_score) {
        best_score = score;
        best = z;
      }
    }
  if (best_score <= 0.0) throw NumericError("no usable interior point found");
  return best;
}

ExtremalForm extremal_impl(const Context& ctx, const WeightSpec& w, const JetConfig& jets,
                           const std::vector<HarmonicFunction>& measures,
                           const EqualityOptions& options) {
  for (const DeltaEntry& e : deltas_impl(measures, w, jets))
    if (e.integer_distance > options.criterion_tolerance)
      throw ConfigError("extremal_form: multi-valued (a period deviates from an integer)");

  const auto zeros = w.zeros_inside(*ctx.domain);
  std::vector<Complex> avoid = zeros;
  const Complex base = pick_interior(*ctx.domain, jets, avoid);
  auto engine = std::make_shared<const PathEngine>(ctx.domain, w, jets, ctx.greens, base);

  ExtremalForm out;
  for (int j = 0; j < jets.size(); ++j) out.amplitudes.push_back(engine->amplitude(j));

  // two-path probe: reach a far point directly and via a detour waypoint; in a
  // multiply connected domain the two homotopy classes may differ, so the
  // branches agreeing certifies single-valuedness numerically
  avoid.push_back(base);
  const Complex probe = pick_interior(*ctx.domain, jets, avoid);
  avoid.push_back(probe);
  const Complex waypoint = pick_interior(*ctx.domain, jets, avoid);
  Branch direct = engine->branch_at(probe);
  Branch detour = engine->start();
  engine->advance(detour, route(*ctx.domain, base, waypoint, engine->obstacles()));
  engine->advance(detour, route(*ctx.domain, waypoint, probe, engine->obstacles()));
  const Complex d1 = engine->density(probe, direct);
  const Complex d2 = engine->density(probe, detour);
  out.branch_residual = std::abs(d1 - d2) / (std::abs(d1) + std::abs(d2) + 1e-300);
  out.flagged = !(out.branch_residual < 1e-6);

  out.density = [engine](Complex z) { return engine->density(z, engine->branch_at(z)); };
  return out;
}

}  // namespace

ExtremalForm extremal_form(std::shared_ptr<const Domain> domain, const WeightSpec& w,
                           const JetConfig& jets, EqualityOptions options) {
  w.validate();
  jets.validate(*domain, w);
  Context ctx(domain, jets, options.solver);
  const auto measures =
      domain->hole_count() > 0 ? harmonic_measures(ctx.solver) : std::vector<HarmonicFunction>{};
  return extremal_impl(ctx, w, jets, measures, options);
}

EqualityReport equality_defect(std::shared_ptr<const Domain> domain, const WeightSpec& w,
                               const JetConfig& jets, int basis_degree, EqualityOptions options) {
  w.validate();
  jets.validate(*domain, w);
  if (jets.amplitudes.empty()) throw ConfigError("equality_defect: jet amplitudes required");
  Context ctx(domain, jets, options.solver);

  EqualityReport report;
  const auto measures =
      domain->hole_count() > 0 ? harmonic_measures(ctx.solver) : std::vector<HarmonicFunction>{};
  report.deltas = deltas_impl(measures, w, jets);
  report.necessary_condition_ok =
      !w.u_vanishes() || domain->hole_count() + 1 <= jets.order_weight_sum();
  report.weight_integral = w.profile.integral();
  report.rhs = rhs_impl(ctx, w, jets);

  const AreaQuadrature mesh = build_mesh(ctx, w, jets, options);
  const Eigen::VectorXd rho = weight_density(ctx, w, jets, mesh);
  const MinimalResult coarse = minimal_impl(ctx, jets, basis_degree, mesh, rho);
  const MinimalResult fine = minimal_impl(ctx, jets, 2 * basis_degree, mesh, rho);
  report.minimal_integral = fine.value;
  report.bergman = 2.0 / fine.value;
  report.defect = report.weight_integral * report.rhs * report.bergman - 1.0;
  const double defect_coarse = report.weight_integral * report.rhs * (2.0 / coarse.value) - 1.0;
  report.truncation_error = std::max(report.defect - defect_coarse, 0.0);

  // quadrature noise is not captured by the degree-doubling estimate; the
  // absolute floor keeps legitimate near-equality configs out of the trap
  if (report.defect < -std::max(10.0 * report.truncation_error, 1e-5))
    throw NumericError("equality_defect: negative defect beyond the truncation budget");

  const double tol = options.criterion_tolerance;
  double worst = 0.0;
  for (const DeltaEntry& e : report.deltas) worst = std::max(worst, e.integer_distance);
  if (w.u_vanishes() && !report.necessary_condition_ok) {
    report.verdict = Verdict::ImpossibleByCount;
  } else if (worst > 10.0 * tol) {
    report.verdict = Verdict::NotEquality;
  } else if (worst > tol) {
    report.verdict = Verdict::Undetermined;
  } else if (report.defect <= std::max(10.0 * report.truncation_error, 1e-3)) {
    report.verdict = Verdict::EqualityCapable;
  } else if (report.defect > std::max(100.0 * report.truncation_error, 5e-3)) {
    report.verdict = Verdict::NotEquality;
  } else {
    report.verdict = Verdict::Undetermined;
  }

  if (report.verdict == Verdict::EqualityCapable) {
    try {
      ExtremalForm ext = extremal_impl(ctx, w, jets, measures, options);
      report.extremal_amplitudes = std::move(ext.amplitudes);
      report.extremal_flagged = ext.flagged;
    } catch (const NumericError&) {
      report.extremal_flagged = true;
    }
  }
  return report;
}

}  // namespace suitaeq
