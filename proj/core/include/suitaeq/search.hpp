#pragma once

#include "suitaeq/suita.hpp"

namespace suitaeq {

enum class SearchStatus { Found, NotFound, RankDeficient };
std::string_view to_string(SearchStatus s);

struct SearchOptions {
  int trials = 100;           // sampling attempts for a nondegenerate start
  int max_iterations = 60;    // Gauss-Newton cap
  double tolerance = 1e-8;    // accepted max distance of delta_k to integers
  double separation = 1e-4;   // minimal pairwise point distance kept by damping
  unsigned seed = 12345;
  SolveOptions solver;
};

struct SearchResult {
  SearchStatus status = SearchStatus::NotFound;
  std::vector<Complex> points;
  std::vector<int> orders;
  std::vector<Complex> amplitudes;  // extremal jets when Found
  std::vector<double> deltas;       // achieved delta_k
  double residual = std::numeric_limits<double>::infinity();
  int iterations = 0;
};

/// Random interior points z'_1..z'_m where the matrix d(u_k)/dz (z'_j) has
/// full rank (smallest singular value > 1e-8 x largest). Requires
/// m >= measures.size(); returns RankDeficient after `trials` failures.
SearchResult jacobian_sample(std::shared_ptr<const Domain> domain,
                             std::span<const HarmonicFunction> measures, int m,
                             const SearchOptions& options = {});

/// Find m points and a common order k+1 = q <= q_max with every
/// delta_k = sum_j (k_j+1) u_k(z_j) an integer: damped Gauss-Newton on
/// (z_1..z_m) -> (U_1..U_{n-1}) toward the nearest rational target
/// (r_1/q..r_{n-1}/q), verified through integrality_deltas, amplitudes from
/// extremal_form. Regimes: m >= n-1, or m = n-2 with n > 2.
SearchResult find_equality_config(std::shared_ptr<const Domain> domain, const WeightSpec& w,
                                  int m, int q_max, const SearchOptions& options = {});

/// Disk minus m+1 Mobius-image holes around a e^{2 pi i j/(m+1)} (plus
/// optional extra holes), sized so that no configuration with orders <= M
/// reaches integral deltas.
struct CounterexampleSpec {
  std::shared_ptr<const Domain> domain;
  double a = 0.0;
  int m = 0;
  int M = 0;
  double r0 = 0.0;       // collar radius: phi_j(disk(r0)) pairwise disjoint
  double epsilon = 0.0;  // hole radius parameter: r0^{(M+1)m}/2
  std::vector<Complex> mobius_centers;

  /// phi_j(z) = (b_j - z)/(1 - conj(b_j) z), an involution swapping 0 and b_j.
  Complex mobius(int j, Complex z) const;
};

CounterexampleSpec build_counterexample_domain(int m, int n, int M, double a,
                                               std::span<const Circle> extra_holes = {});

struct BoundRecord {
  int pigeonhole_index;  // j0 whose collar contains no sample point
  double max_measure;    // max_l u_{j0}(z_l)
  double threshold;      // 1/((M+1) m)
};

struct CounterexampleCertificate {
  CounterexampleSpec spec;
  std::vector<BoundRecord> records;
  int samples = 0;
  bool passed = false;
  double worst_margin = 0.0;      // min over records of threshold - max_measure
  double comparison_slack = 0.0;  // max over samples of u_j - log|phi_j|/log eps
};

/// Sampling validation of the impossibility bound: for random m-tuples the
/// pigeonhole hole j0 satisfies u_{j0}(z_l) < 1/((M+1)m), and every
/// u_j <= log|phi_j|/log eps (comparison principle). Violations beyond
/// 10x the Dirichlet residual mark the certificate failed.
CounterexampleCertificate certify_no_equality(const CounterexampleSpec& spec, int samples,
                                              const SearchOptions& options = {});

/// One factor of a product configuration: integrality results plus the
/// orders gamma_{j,k} and weights p_{j,k} of its points.
struct ProductFactor {
  std::vector<DeltaEntry> deltas;  // empty for simply connected factors
  std::vector<int> orders;
  std::vector<double> weights;
};

/// True iff every factor sits at an integrality point, after validating the
/// normalization sum_j (gamma_{j,beta_j}+1)/p_{j,beta_j} = 1 for every
/// multi-index beta (throws naming an offending beta otherwise).
bool product_combine(std::span<const ProductFactor> factors, double tolerance = 1e-6);

}  // namespace suitaeq
