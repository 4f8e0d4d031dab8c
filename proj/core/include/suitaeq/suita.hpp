#pragma once

#include <functional>
#include <optional>
#include <string_view>

#include "suitaeq/green.hpp"

namespace suitaeq {

/// Radial weight profile c(t) = sum_i w_i exp(-decay_i t), w_i >= 0,
/// decay_i in [0, 1). The menu keeps c(t) e^{-t} decreasing and gives the
/// moment integral int_0^inf c(s) e^{-s} ds in closed form.
struct WeightProfile {
  struct Term {
    double weight;
    double decay;
  };
  std::vector<Term> terms{{1.0, 0.0}};

  static WeightProfile constant() { return {}; }
  static WeightProfile exponential(double decay, double weight = 1.0);

  double value(double t) const;
  double integral() const;  // sum w_i / (1 + decay_i)
  void validate() const;    // throws ConfigError
};

/// Weight data v = log|g| + u with g a polynomial (ascending coefficients)
/// and u harmonic; rho is assembled from these plus the profile.
struct WeightSpec {
  std::vector<Complex> g{Complex{1.0, 0.0}};
  std::optional<HarmonicFunction> u;  // absent = identically zero
  WeightProfile profile;

  Complex g_value(Complex z) const;
  bool u_vanishes() const;
  double u_value(Complex z) const;  // 0 when absent
  double v_value(Complex z) const;  // log|g| + u; -inf at zeros of g
  double integral() const { return profile.integral(); }
  /// Roots of g strictly inside the domain (companion-matrix eigenvalues).
  std::vector<Complex> zeros_inside(const Domain& domain) const;
  void validate() const;
};

/// Jet data: distinct interior points z_j, vanishing orders k_j, prescribed
/// top coefficients a_j, and positive weights p_j (default k_j + 1).
struct JetConfig {
  std::vector<Complex> points;
  std::vector<int> orders;
  std::vector<Complex> amplitudes;  // empty, or one nonzero value per point
  std::vector<double> weights;      // empty -> k_j + 1

  int size() const { return int(points.size()); }
  double weight(int j) const { return weights.empty() ? orders[j] + 1.0 : weights[j]; }
  double order_weight_sum() const;  // sum (k_j + 1)
  void validate(const Domain& domain, const WeightSpec& w) const;
};

enum class Verdict { EqualityCapable, NotEquality, ImpossibleByCount, Undetermined };
std::string_view to_string(Verdict v);

struct EqualityOptions {
  double criterion_tolerance = 1e-6;  // |delta_k - round(delta_k)| threshold
  int mesh_target = 24000;
  SolveOptions solver;
};

struct DeltaEntry {
  double delta;
  double integer_distance;
};

struct EqualityReport {
  std::vector<DeltaEntry> deltas;  // k = 1..n-1; empty when n = 1
  bool necessary_condition_ok = true;
  double weight_integral = 0.0;   // I
  double rhs = 0.0;               // S
  double minimal_integral = 0.0;  // C
  double bergman = 0.0;           // B = 2 / C
  double defect = 0.0;            // I * S * B - 1
  double truncation_error = 0.0;  // defect shift under basis-degree doubling
  std::vector<Complex> extremal_amplitudes;  // filled when computable
  bool extremal_flagged = false;
  Verdict verdict = Verdict::Undetermined;
};

/// alpha_j = sum_{l != j} (k_l + 1) G(z_j, z_l) + v(z_j).
std::vector<double> alpha_values(std::shared_ptr<const Domain> domain, const WeightSpec& w,
                                 const JetConfig& jets, SolveOptions options = {});

/// S = sum_j pi |a_j|^2 e^{-2 alpha_j} / (p_j c(z_j)^{2(k_j+1)}), c = log capacity.
double rhs_sum(std::shared_ptr<const Domain> domain, const WeightSpec& w, const JetConfig& jets,
               SolveOptions options = {});

/// delta_k = sum_j (k_j + 1) u_k(z_j) - d_k(u) (into-hole-normal period of the
/// weight's u), with the distance to the nearest integer; empty for n = 1.
std::vector<DeltaEntry> integrality_deltas(std::shared_ptr<const Domain> domain,
                                           const WeightSpec& w, const JetConfig& jets,
                                           SolveOptions options = {});

/// n <= sum (k_j + 1); only meaningful when u = 0 (throws otherwise).
bool necessary_condition(std::shared_ptr<const Domain> domain, const WeightSpec& w,
                         const JetConfig& jets);

struct AnnulusCriterion {
  bool satisfied;
  long nearest_exponent;  // N
  double log_residual;    // | log LHS - log RHS(N) |
};

/// Product shortcut on the annulus 1 < |z| < R: does an integer N satisfy
/// |z_1|^{k_1+1} ... |z_m|^{k_m+1} = R^{k_1+...+k_m+m+c-N}? `u_period` is the
/// normalized into-hole period c of the weight's harmonic part (0 for u = 0).
AnnulusCriterion annulus_criterion(double R, double u_period, const JetConfig& jets,
                                   double tolerance = 1e-6);

/// Holomorphic trial space {((z-c0)/r0)^n, n <= degree} + per hole anchor
/// {(s_k/(z-a_k))^n, 1 <= n <= degree}.
class HolomorphicBasis {
 public:
  HolomorphicBasis(std::shared_ptr<const Domain> domain, int degree);

  int size() const { return size_; }
  int degree() const { return degree_; }
  const std::shared_ptr<const Domain>& domain() const { return domain_; }
  void values(Complex z, std::span<Complex> row) const;
  /// order-th Taylor coefficient of basis_j at `center` (closed form).
  Complex taylor_coefficient(int j, Complex center, int order) const;

 private:
  std::shared_ptr<const Domain> domain_;
  int degree_;
  int size_;
  Complex c0_;
  double r0_;
  std::vector<Complex> anchors_;
  std::vector<double> scales_;
};

struct MinimalResult {
  double value = 0.0;  // C = 2 int |h|^2 rho dA at the minimizer
  Eigen::VectorXcd coefficients;
  std::shared_ptr<const HolomorphicBasis> basis;

  Complex evaluate(Complex z) const;
  Complex taylor(Complex center, int order) const;
};

/// Constrained minimal weighted L2 mass of h dz: Taylor orders 0..k_j-1 of h
/// vanish at z_j and order k_j equals a_j; quadratic program solved by the
/// null-space method on the quadrature Gram matrix.
MinimalResult minimal_l2(std::shared_ptr<const Domain> domain, const WeightSpec& w,
                         const JetConfig& jets, int basis_degree, EqualityOptions options = {});

/// Full equality report: B = 2/C, defect = I*S*B - 1, truncation error from
/// degree doubling, verdict from the count condition and delta integrality.
EqualityReport equality_defect(std::shared_ptr<const Domain> domain, const WeightSpec& w,
                               const JetConfig& jets, int basis_degree,
                               EqualityOptions options = {});

struct ExtremalForm {
  std::vector<Complex> amplitudes;  // a*_j (base-point branch normalization)
  double branch_residual = 0.0;     // two-path consistency of the density
  bool flagged = false;
  std::function<Complex(Complex)> density;  // Phi = density(z) dz
};

/// Candidate equality form g * exp(sum (k_j+1) Gj + V) * sum p_j Gj', with the
/// analytic completions tracked along hole-avoiding paths from a fixed base
/// point. Requires all delta_k within the criterion tolerance of integers.
ExtremalForm extremal_form(std::shared_ptr<const Domain> domain, const WeightSpec& w,
                           const JetConfig& jets, EqualityOptions options = {});

}  // namespace suitaeq
