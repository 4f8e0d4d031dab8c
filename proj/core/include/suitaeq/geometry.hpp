#pragma once

#include <complex>
#include <memory>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace suitaeq {

using Complex = std::complex<double>;

/// Thrown on malformed inputs (bad domain specs, bad config values).
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Thrown when a computation cannot meet its numerical-quality contract.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Circle {
  Complex center{0.0, 0.0};
  double radius = 1.0;
};

/// Closed analytic curve given by a finite Fourier series
///   z(t) = center + sum_k coeff_k e^{ikt},  t in [0, 2pi).
/// Counterclockwise orientation is normalized at construction.
struct AnalyticCurve {
  Complex center{0.0, 0.0};
  std::vector<std::pair<int, Complex>> modes;  // (harmonic index k != 0, coefficient)

  Complex point(double t) const;
  Complex tangent(double t) const;  // dz/dt
  double enclosed_area() const;     // signed via Green's theorem, then abs
  double signed_area() const;
  void normalize_orientation();     // flips parametrization if clockwise
  double max_radius() const;        // max |z(t) - center| over a fine sample
};

struct DomainSpec {
  enum class Kind { Disk, Annulus, Circular, Parametric };
  Kind kind = Kind::Disk;

  double annulus_R = 0.0;                  // Annulus: 1 < |z| < R
  Circle outer;                            // Circular
  std::vector<Circle> holes;               // Circular
  AnalyticCurve outer_curve;               // Parametric
  std::vector<AnalyticCurve> hole_curves;  // Parametric

  static DomainSpec disk();
  static DomainSpec annulus(double R);
  static DomainSpec circular(Circle outer, std::vector<Circle> holes);
  static DomainSpec parametric(AnalyticCurve outer, std::vector<AnalyticCurve> holes);
};

/// Counterclockwise circle used as a homology cycle around one hole.
struct Cycle {
  Complex center{0.0, 0.0};
  double radius = 0.0;

  Complex point(double t) const { return center + radius * Complex(std::cos(t), std::sin(t)); }
  Complex tangent(double t) const { return radius * Complex(-std::sin(t), std::cos(t)); }
  /// Inscribed polygon (ccw, `segments` vertices, closed: first point repeated last).
  std::vector<Complex> polyline(int segments) const;
};

/// Boundary quadrature: trapezoidal nodes per component, spectrally accurate
/// for analytic integrands. Normals point out of the domain (into holes on
/// inner components, away from the domain on the outer one).
struct QuadratureSet {
  std::vector<Complex> nodes;
  std::vector<double> weights;   // arc-length weights
  std::vector<Complex> normals;  // unit, outward of the domain
  std::vector<int> component;    // component index per node
  std::vector<std::size_t> component_begin;  // size n_components + 1

  std::size_t size() const { return nodes.size(); }
  std::span<const Complex> component_nodes(int k) const;
};

struct AreaQuadrature {
  std::vector<Complex> nodes;
  std::vector<double> weights;  // positive; sum approximates area
  std::vector<Complex> singular_centers;

  double total_weight() const;
};

struct MeshOptions {
  int angular_hint = 0;        // min azimuthal resolution (0 = derive from target)
  double patch_inner = 1e-8;   // innermost ring radius around singular centers
};

/// Multiply connected planar domain. Boundary components are indexed
/// 0..n-2 (holes) with the outer component last (index n-1).
class Domain {
 public:
  explicit Domain(DomainSpec spec);

  const DomainSpec& spec() const { return spec_; }
  int components() const { return static_cast<int>(holes_.size()) + 1; }
  int hole_count() const { return static_cast<int>(holes_.size()); }
  int outer_index() const { return hole_count(); }

  /// Strict interior membership.
  bool contains(Complex z) const;
  /// Membership in the closure, with slack `tol` past the boundary.
  bool contains_closure(Complex z, double tol = 1e-9) const;
  /// Distance to the boundary (positive inside, negative outside).
  double boundary_clearance(Complex z) const;

  /// Enclosing circle of hole k (exact for circular holes).
  const Circle& hole_circle(int k) const;
  /// Anchor point strictly inside hole k (center / area centroid).
  Complex anchor(int k) const;
  const Cycle& cycle(int k) const;
  /// Outer circle (exact for disk/annulus/circular, enclosing for parametric).
  const Circle& outer_circle() const;
  /// Characteristic length scale (outer radius).
  double scale() const { return outer_.radius; }

  QuadratureSet boundary_nodes(int per_component) const;
  AreaQuadrature interior_mesh(int target_nodes, std::span<const Complex> singular_centers,
                               const MeshOptions& options = {}) const;

 private:
  DomainSpec spec_;
  Circle outer_;
  std::vector<Circle> holes_;    // enclosing circles, anchors at centers
  std::vector<Cycle> cycles_;
  bool circular_boundary_ = true;  // every component is a true circle

  void build_cycles();
  void validate() const;
};

std::shared_ptr<const Domain> build_domain(const DomainSpec& spec);

/// Winding number of a closed polyline around z0 (exact per-segment arguments).
int polyline_winding(std::span<const Complex> polyline, Complex z0);

/// Gauss-Legendre nodes/weights on [a, b] (Golub-Welsch, cached per order).
void gauss_legendre(int order, double a, double b, std::vector<double>& nodes,
                    std::vector<double>& weights);

}  // namespace suitaeq
