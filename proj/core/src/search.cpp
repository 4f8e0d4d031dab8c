#include "suitaeq/search.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace suitaeq {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Complex draw_point(const Domain& domain, std::mt19937_64& rng, double clearance) {
  const Circle outer = domain.outer_circle();
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int i = 0; i < 65536; ++i) {
    const Complex z = outer.center + outer.radius * Complex{unit(rng), unit(rng)};
    if (domain.contains(z) && domain.boundary_clearance(z) > clearance) return z;
  }
  throw NumericError("interior point sampling failed");
}

std::vector<Complex> draw_tuple(const Domain& domain, std::mt19937_64& rng, int m,
                                double separation, double clearance) {
  std::vector<Complex> points;
  int guard = 0;
  while (int(points.size()) < m) {
    const Complex z = draw_point(domain, rng, clearance);
    bool ok = true;
    for (Complex p : points)
      if (std::abs(z - p) < separation) ok = false;
    if (ok) points.push_back(z);
    if (++guard > 65536) throw NumericError("interior tuple sampling failed");
  }
  return points;
}

// real Jacobian of (U_1..U_h) in the mobile coordinates (x_j, y_j):
// du/dx = Re f', du/dy = -Im f' with f' the analytic derivative
Eigen::MatrixXd real_jacobian(std::span<const HarmonicFunction> measures,
                              std::span<const Complex> points, int mobile) {
  Eigen::MatrixXd jac(measures.size(), 2 * mobile);
  for (int k = 0; k < int(measures.size()); ++k)
    for (int j = 0; j < mobile; ++j) {
      const Complex fp = measures[k].analytic_derivative(points[j]);
      jac(k, 2 * j) = fp.real();
      jac(k, 2 * j + 1) = -fp.imag();
    }
  return jac;
}

}  // namespace

std::string_view to_string(SearchStatus s) {
  switch (s) {
    case SearchStatus::Found: return "FOUND";
    case SearchStatus::NotFound: return "NOT_FOUND";
    case SearchStatus::RankDeficient: return "RANK_DEFICIENT";
  }
  return "NOT_FOUND";
}

SearchResult jacobian_sample(std::shared_ptr<const Domain> domain,
                             std::span<const HarmonicFunction> measures, int m,
                             const SearchOptions& options) {
  if (m <= 0) throw ConfigError("jacobian_sample: need at least one point");
  if (m < int(measures.size()))
    throw ConfigError("jacobian_sample: fewer points than measures (rank impossible)");

  std::mt19937_64 rng(options.seed);
  const double scale = domain->scale();
  SearchResult out;
  for (int attempt = 1; attempt <= options.trials; ++attempt) {
    auto points = draw_tuple(*domain, rng, m, 0.05 * scale, 0.02 * scale);
    out.iterations = attempt;
    if (measures.empty()) {
      out.status = SearchStatus::Found;
      out.points = std::move(points);
      return out;
    }
    Eigen::MatrixXcd a(measures.size(), m);
    for (int k = 0; k < int(measures.size()); ++k)
      for (int j = 0; j < m; ++j) a(k, j) = measures[k].analytic_derivative(points[j]);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a);
    const auto& sv = svd.singularValues();
    if (sv(sv.size() - 1) > 1e-8 * sv(0)) {
      out.status = SearchStatus::Found;
      out.points = std::move(points);
      return out;
    }
  }
  out.status = SearchStatus::RankDeficient;
  return out;
}

SearchResult find_equality_config(std::shared_ptr<const Domain> domain, const WeightSpec& w,
                                  int m, int q_max, const SearchOptions& options) {
  w.validate();
  if (!w.u_vanishes())
    throw ConfigError("find_equality_config: requires a vanishing harmonic weight part");
  const int holes = domain->hole_count();
  if (holes < 1) throw ConfigError("find_equality_config: nothing to search on a disk");
  if (!(m >= holes || (m == holes - 1 && holes >= 2)))
    throw ConfigError("find_equality_config: m must be >= n-1, or n-2 with n > 2");
  if (q_max < 2) throw ConfigError("find_equality_config: q_max must be at least 2");

  DirichletSolver solver(domain, options.solver);
  const auto measures = harmonic_measures(solver);
  const int mobile = std::min(m, holes);  // surplus points stay frozen

  std::mt19937_64 rng(options.seed);
  const double scale = domain->scale();
  SearchResult out;

  // nondegenerate start: full row rank of the real Jacobian over the mobile
  // points (the frozen surplus does not enter the rank requirement)
  std::vector<Complex> points;
  {
    bool ok = false;
    for (int attempt = 1; attempt <= options.trials && !ok; ++attempt) {
      points = draw_tuple(*domain, rng, m, 0.05 * scale, 0.02 * scale);
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(real_jacobian(measures, points, mobile));
      const auto& sv = svd.singularValues();
      ok = sv(sv.size() - 1) > 1e-8 * sv(0);
      out.iterations = attempt;
    }
    if (!ok) {
      out.status = SearchStatus::RankDeficient;
      return out;
    }
  }

  auto targets_of = [&](int q, std::vector<long>& r) -> bool {
    r.resize(holes);
    long total = 0;
    for (int k = 0; k < holes; ++k) {
      double u = 0.0;
      for (Complex p : points) u += measures[k].value(p);
      r[k] = std::clamp(std::lround(q * u), 1l, long(q) * m - 1);
      total += r[k];
    }
    return total <= long(q) * m - 1;
  };

  // nearest rational target (r_1/q .. r_h/q) over common denominators q
  int best_q = 0;
  std::vector<long> best_r;
  double best_err = std::numeric_limits<double>::infinity();
  for (int q = 2; q <= q_max; ++q) {
    std::vector<long> r;
    if (!targets_of(q, r)) continue;
    double err = 0.0;
    for (int k = 0; k < holes; ++k) {
      double u = 0.0;
      for (Complex p : points) u += measures[k].value(p);
      err = std::max(err, std::abs(double(r[k]) / q - u));
    }
    if (err < best_err) {
      best_err = err;
      best_q = q;
      best_r = r;
    }
  }
  if (best_q == 0) {
    out.status = SearchStatus::NotFound;
    out.points = points;
    return out;
  }
  const int q = best_q;

  auto evaluate = [&](const std::vector<Complex>& pts, Eigen::VectorXd& f) {
    f.resize(holes);
    for (int k = 0; k < holes; ++k) {
      double u = 0.0;
      for (Complex p : pts) u += measures[k].value(p);
      f(k) = u - double(best_r[k]) / q;
    }
  };

  Eigen::VectorXd f;
  evaluate(points, f);
  const double goal = options.tolerance / (10.0 * q);
  int iter = 0;
  while (f.lpNorm<Eigen::Infinity>() > goal && iter < options.max_iterations) {
    ++iter;
    const Eigen::MatrixXd jac = real_jacobian(measures, points, mobile);
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(jac);
    const Eigen::VectorXd step = cod.solve(-f);

    double lambda = 1.0;
    bool moved = false;
    for (int halvings = 0; halvings < 30 && !moved; ++halvings, lambda *= 0.5) {
      std::vector<Complex> trial = points;
      for (int j = 0; j < mobile; ++j)
        trial[j] += lambda * Complex{step(2 * j), step(2 * j + 1)};
      bool feasible = true;
      for (int j = 0; j < m && feasible; ++j) {
        if (!domain->contains(trial[j]) ||
            domain->boundary_clearance(trial[j]) < 1e-6 * scale)
          feasible = false;
        for (int l = 0; l < j && feasible; ++l)
          if (std::abs(trial[j] - trial[l]) < options.separation) feasible = false;
      }
      if (!feasible) continue;
      Eigen::VectorXd ft;
      evaluate(trial, ft);
      if (ft.lpNorm<Eigen::Infinity>() < f.lpNorm<Eigen::Infinity>()) {
        points = std::move(trial);
        f = std::move(ft);
        moved = true;
      }
    }
    if (!moved) break;  // no improving damped step
  }
  out.iterations = iter;
  out.points = points;
  out.orders.assign(m, q - 1);

  // closed-loop verification through the public delta computation
  JetConfig jets;
  jets.points = points;
  jets.orders = out.orders;
  const auto deltas = integrality_deltas(domain, w, jets, options.solver);
  out.residual = 0.0;
  for (const DeltaEntry& e : deltas) {
    out.deltas.push_back(e.delta);
    out.residual = std::max(out.residual, e.integer_distance);
  }
  if (out.residual >= options.tolerance) {
    out.status = SearchStatus::NotFound;
    return out;
  }
  out.status = SearchStatus::Found;
  EqualityOptions eq;
  eq.criterion_tolerance = std::max(10.0 * options.tolerance, 1e-6);
  eq.solver = options.solver;
  try {
    out.amplitudes = extremal_form(domain, w, jets, eq).amplitudes;
  } catch (const NumericError&) {
    // a path-planning failure degrades the result but not the verdict
  }
  return out;
}

// ---------------------------------------------------------------------------
// Counterexample family.

namespace {

Circle mobius_image(Complex b, double a, double r) {
  const double denom = 1.0 - a * a * r * r;
  return {b * (1.0 - r * r) / denom, r * (1.0 - a * a) / denom};
}

bool collars_disjoint(std::span<const Complex> centers, double a, double r, double margin) {
  std::vector<Circle> images;
  for (Complex b : centers) images.push_back(mobius_image(b, a, r));
  for (std::size_t i = 0; i < images.size(); ++i) {
    if (std::abs(images[i].center) + images[i].radius >= 1.0 - margin) return false;
    for (std::size_t j = 0; j < i; ++j)
      if (std::abs(images[i].center - images[j].center) <=
          images[i].radius + images[j].radius + margin)
        return false;
  }
  return true;
}

}  // namespace

Complex CounterexampleSpec::mobius(int j, Complex z) const {
  const Complex b = mobius_centers.at(j);
  return (b - z) / (1.0 - std::conj(b) * z);
}

CounterexampleSpec build_counterexample_domain(int m, int n, int M, double a,
                                               std::span<const Circle> extra_holes) {
  if (m < 1) throw ConfigError("counterexample: m must be positive");
  if (M < 1) throw ConfigError("counterexample: M must be positive");
  if (!(a > 0.0 && a < 1.0)) throw ConfigError("counterexample: a must lie in (0,1)");
  if (n < m + 2) throw ConfigError("counterexample: need n >= m + 2");
  if (int(extra_holes.size()) != n - 2 - m)
    throw ConfigError("counterexample: extra hole count must equal n - 2 - m");

  CounterexampleSpec spec;
  spec.a = a;
  spec.m = m;
  spec.M = M;
  for (int j = 0; j <= m; ++j)
    spec.mobius_centers.push_back(std::polar(a, kTwoPi * j / (m + 1)));

  // largest collar radius with pairwise disjoint images, then back off
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    (collars_disjoint(spec.mobius_centers, a, mid, 0.0) ? lo : hi) = mid;
  }
  if (lo <= 0.0) throw NumericError("counterexample: no disjoint collar radius");
  spec.r0 = 0.8 * lo;
  spec.epsilon = 0.5 * std::pow(spec.r0, double((M + 1) * m));

  std::vector<Circle> holes;
  for (Complex b : spec.mobius_centers) holes.push_back(mobius_image(b, a, spec.epsilon));
  for (const Circle& extra : extra_holes) {
    for (Complex b : spec.mobius_centers) {
      const Circle collar = mobius_image(b, a, spec.r0);
      if (std::abs(extra.center - collar.center) <= extra.radius + collar.radius + 1e-6)
        throw ConfigError("counterexample: extra hole collides with a collar");
    }
    holes.push_back(extra);
  }
  for (std::size_t i = 0; i < holes.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (std::abs(holes[i].center - holes[j].center) <=
          holes[i].radius + holes[j].radius + 1e-6)
        throw ConfigError("counterexample: holes are not separated");

  spec.domain = build_domain(DomainSpec::circular({{0.0, 0.0}, 1.0}, holes));
  return spec;
}

CounterexampleCertificate certify_no_equality(const CounterexampleSpec& spec, int samples,
                                              const SearchOptions& options) {
  if (!spec.domain) throw ConfigError("certificate: empty counterexample spec");
  if (samples < 1) throw ConfigError("certificate: need at least one sample");

  DirichletSolver solver(spec.domain, options.solver);
  const auto measures = harmonic_measures(solver);
  double dirichlet_residual = 0.0;
  for (const auto& u : measures)
    dirichlet_residual = std::max(dirichlet_residual, u.boundary_residual());

  CounterexampleCertificate cert;
  cert.spec = spec;
  cert.samples = samples;
  cert.worst_margin = std::numeric_limits<double>::infinity();
  cert.comparison_slack = -std::numeric_limits<double>::infinity();

  const double threshold = 1.0 / ((spec.M + 1.0) * spec.m);
  const double log_eps = std::log(spec.epsilon);
  std::mt19937_64 rng(options.seed);
  bool all_below = true;

  for (int s = 0; s < samples; ++s) {
    const auto tuple = draw_tuple(*spec.domain, rng, spec.m,
                                  std::max(options.separation, 1e-3), 1e-3);
    int j0 = -1;
    for (int j = 0; j <= spec.m && j0 < 0; ++j) {
      bool empty = true;
      for (Complex z : tuple)
        if (std::abs(spec.mobius(j, z)) < spec.r0) empty = false;
      if (empty) j0 = j;
    }
    if (j0 < 0) throw NumericError("certificate: pigeonhole failed on disjoint collars");

    double max_measure = 0.0;
    for (Complex z : tuple) max_measure = std::max(max_measure, measures[j0].value(z));
    cert.records.push_back({j0, max_measure, threshold});
    cert.worst_margin = std::min(cert.worst_margin, threshold - max_measure);
    if (!(max_measure < threshold)) all_below = false;

    for (int j = 0; j <= spec.m; ++j)
      for (Complex z : tuple) {
        const double bound = std::log(std::abs(spec.mobius(j, z))) / log_eps;
        cert.comparison_slack = std::max(cert.comparison_slack, measures[j].value(z) - bound);
      }
  }

  const double allowance = 10.0 * std::max(dirichlet_residual, 1e-12);
  cert.passed = all_below && cert.comparison_slack <= allowance;
  return cert;
}

bool product_combine(std::span<const ProductFactor> factors, double tolerance) {
  if (factors.empty()) throw ConfigError("product: no factors");

  for (std::size_t j = 0; j < factors.size(); ++j) {
    const ProductFactor& f = factors[j];
    if (f.orders.empty() || f.orders.size() != f.weights.size())
      throw ConfigError("product: factor orders/weights malformed");
    for (double p : f.weights)
      if (!(p > 0.0)) throw ConfigError("product: nonpositive weight");
  }

  auto beta_string = [&](std::size_t deviant_factor, std::size_t deviant_index) {
    std::ostringstream os;
    os << "(";
    for (std::size_t j = 0; j < factors.size(); ++j)
      os << (j ? "," : "") << (j == deviant_factor ? deviant_index : 0);
    os << ")";
    return os.str();
  };

  // sum_j (gamma_{j,beta_j}+1)/p_{j,beta_j} = 1 for every beta: the ratio must
  // be constant within each factor and the constants must sum to one
  double total = 0.0;
  for (std::size_t j = 0; j < factors.size(); ++j) {
    const ProductFactor& f = factors[j];
    const double first = (f.orders[0] + 1.0) / f.weights[0];
    for (std::size_t k = 1; k < f.orders.size(); ++k) {
      const double ratio = (f.orders[k] + 1.0) / f.weights[k];
      if (std::abs(ratio - first) > 1e-9)
        throw ConfigError("product: normalization violated at beta = " + beta_string(j, k));
    }
    total += first;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw ConfigError("product: normalization violated at beta = " +
                      beta_string(factors.size(), 0));

  for (const ProductFactor& f : factors)
    for (const DeltaEntry& e : f.deltas)
      if (e.integer_distance > tolerance) return false;
  return true;
}

}  // namespace suitaeq
