#include "suitaeq/geometry.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numbers>

namespace suitaeq {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Analytic step: erf transition over [0, 1], tails < 2e-17 outside (and exact
// 0/1 in double arithmetic a short distance past the endpoints). Analyticity
// keeps Gauss-Legendre panels geometrically convergent across the transition.
double smooth_step(double x) { return 0.5 * std::erfc(6.0 - 12.0 * x); }

// Radial cutoff: 1 on [*, t0], 0 on [t1, *].
double radial_cutoff(double t, double t0, double t1) {
  return 1.0 - smooth_step((t - t0) / (t1 - t0));
}

double principal_arg_ratio(Complex num, Complex den) {
  return std::arg(num / den);
}

}  // namespace

// ---------------------------------------------------------------------------
// AnalyticCurve

Complex AnalyticCurve::point(double t) const {
  Complex z = center;
  for (const auto& [k, c] : modes) z += c * std::polar(1.0, k * t);
  return z;
}

Complex AnalyticCurve::tangent(double t) const {
  Complex dz{0.0, 0.0};
  for (const auto& [k, c] : modes) dz += c * Complex(0.0, double(k)) * std::polar(1.0, k * t);
  return dz;
}

double AnalyticCurve::signed_area() const {
  // (1/2) Im oint conj(z) dz = pi * sum_k k |c_k|^2 exactly for Fourier curves.
  double s = 0.0;
  for (const auto& [k, c] : modes) s += double(k) * std::norm(c);
  return std::numbers::pi * s;
}

double AnalyticCurve::enclosed_area() const { return std::abs(signed_area()); }

void AnalyticCurve::normalize_orientation() {
  if (signed_area() >= 0.0) return;
  for (auto& [k, c] : modes) k = -k;  // t -> -t reversal
}

double AnalyticCurve::max_radius() const {
  double r = 0.0;
  constexpr int kSamples = 2048;
  for (int i = 0; i < kSamples; ++i) r = std::max(r, std::abs(point(kTwoPi * i / kSamples) - center));
  return r;
}

// ---------------------------------------------------------------------------
// DomainSpec factories

DomainSpec DomainSpec::disk() {
  DomainSpec s;
  s.kind = Kind::Disk;
  return s;
}

DomainSpec DomainSpec::annulus(double R) {
  DomainSpec s;
  s.kind = Kind::Annulus;
  s.annulus_R = R;
  return s;
}

DomainSpec DomainSpec::circular(Circle outer, std::vector<Circle> holes) {
  DomainSpec s;
  s.kind = Kind::Circular;
  s.outer = outer;
  s.holes = std::move(holes);
  return s;
}

DomainSpec DomainSpec::parametric(AnalyticCurve outer, std::vector<AnalyticCurve> holes) {
  DomainSpec s;
  s.kind = Kind::Parametric;
  s.outer_curve = std::move(outer);
  s.hole_curves = std::move(holes);
  return s;
}

// ---------------------------------------------------------------------------
// Cycle

std::vector<Complex> Cycle::polyline(int segments) const {
  std::vector<Complex> p;
  p.reserve(segments + 1);
  for (int i = 0; i <= segments; ++i) p.push_back(point(kTwoPi * i / segments));
  p.back() = p.front();
  return p;
}

// ---------------------------------------------------------------------------
// QuadratureSet / AreaQuadrature

std::span<const Complex> QuadratureSet::component_nodes(int k) const {
  return {nodes.data() + component_begin[k], component_begin[k + 1] - component_begin[k]};
}

double AreaQuadrature::total_weight() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

// ---------------------------------------------------------------------------
// Domain

Domain::Domain(DomainSpec spec) : spec_(std::move(spec)) {
  switch (spec_.kind) {
    case DomainSpec::Kind::Disk:
      outer_ = Circle{{0.0, 0.0}, 1.0};
      break;
    case DomainSpec::Kind::Annulus:
      if (!(spec_.annulus_R > 1.0))
        throw ConfigError("annulus outer radius must exceed 1");
      outer_ = Circle{{0.0, 0.0}, spec_.annulus_R};
      holes_.push_back(Circle{{0.0, 0.0}, 1.0});
      break;
    case DomainSpec::Kind::Circular:
      outer_ = spec_.outer;
      holes_ = spec_.holes;
      break;
    case DomainSpec::Kind::Parametric: {
      circular_boundary_ = false;
      spec_.outer_curve.normalize_orientation();
      for (auto& h : spec_.hole_curves) h.normalize_orientation();
      // Enclosing circles; anchors at area centroids.
      auto centroid = [](const AnalyticCurve& c) {
        constexpr int M = 1024;
        double a = c.signed_area(), cx = 0.0, cy = 0.0;
        for (int i = 0; i < M; ++i) {
          const double t = kTwoPi * i / M;
          const Complex z = c.point(t), dz = c.tangent(t);
          cx += 0.5 * z.real() * z.real() * dz.imag();
          cy -= 0.5 * z.imag() * z.imag() * dz.real();
        }
        cx *= kTwoPi / M;
        cy *= kTwoPi / M;
        return Complex(cx / a, cy / a);
      };
      {
        const Complex c0 = centroid(spec_.outer_curve);
        double r = 0.0;
        constexpr int M = 2048;
        for (int i = 0; i < M; ++i)
          r = std::max(r, std::abs(spec_.outer_curve.point(kTwoPi * i / M) - c0));
        outer_ = Circle{c0, r};
      }
      for (const auto& h : spec_.hole_curves) {
        const Complex c = centroid(h);
        double r = 0.0;
        constexpr int M = 2048;
        for (int i = 0; i < M; ++i) r = std::max(r, std::abs(h.point(kTwoPi * i / M) - c));
        holes_.push_back(Circle{c, r});
      }
      break;
    }
  }
  validate();
  build_cycles();
}

void Domain::validate() const {
  if (!(outer_.radius > 0.0)) throw ConfigError("outer radius must be positive");
  const double tol = 1e-12 * outer_.radius;
  for (std::size_t k = 0; k < holes_.size(); ++k) {
    if (!(holes_[k].radius > 0.0)) throw ConfigError("hole radius must be positive");
    const double reach = std::abs(holes_[k].center - outer_.center) + holes_[k].radius;
    if (!(reach < outer_.radius - tol))
      throw ConfigError("hole " + std::to_string(k) + " is not strictly inside the outer boundary");
    for (std::size_t l = k + 1; l < holes_.size(); ++l) {
      const double gap =
          std::abs(holes_[k].center - holes_[l].center) - holes_[k].radius - holes_[l].radius;
      if (!(gap > tol))
        throw ConfigError("holes " + std::to_string(k) + " and " + std::to_string(l) + " overlap");
    }
  }
}

void Domain::build_cycles() {
  cycles_.clear();
  for (std::size_t k = 0; k < holes_.size(); ++k) {
    const Circle& h = holes_[k];
    double gap = (outer_.radius - std::abs(h.center - outer_.center)) - h.radius;
    for (std::size_t l = 0; l < holes_.size(); ++l) {
      if (l == k) continue;
      gap = std::min(gap, std::abs(h.center - holes_[l].center) - holes_[l].radius - h.radius);
    }
    const double r = std::min(1.5 * h.radius, h.radius + 0.5 * gap);
    cycles_.push_back(Cycle{h.center, r});
  }
}

bool Domain::contains(Complex z) const {
  return boundary_clearance(z) > 0.0;
}

bool Domain::contains_closure(Complex z, double tol) const {
  return boundary_clearance(z) > -tol;
}

double Domain::boundary_clearance(Complex z) const {
  if (spec_.kind != DomainSpec::Kind::Parametric) {
    double d = outer_.radius - std::abs(z - outer_.center);
    for (const auto& h : holes_) d = std::min(d, std::abs(z - h.center) - h.radius);
    return d;
  }
  // Parametric: winding-number membership, distance to sampled boundary.
  constexpr int M = 512;
  auto curve_dist = [&](const AnalyticCurve& c) {
    double d = std::numeric_limits<double>::max();
    for (int i = 0; i < M; ++i) d = std::min(d, std::abs(z - c.point(kTwoPi * i / M)));
    return d;
  };
  auto winding = [&](const AnalyticCurve& c) {
    double w = 0.0;
    Complex prev = c.point(0.0);
    for (int i = 1; i <= M; ++i) {
      const Complex cur = c.point(kTwoPi * i / M);
      w += principal_arg_ratio(cur - z, prev - z);
      prev = cur;
    }
    return w / kTwoPi;
  };
  double d = curve_dist(spec_.outer_curve);
  bool inside = std::lround(winding(spec_.outer_curve)) == 1;
  for (const auto& h : spec_.hole_curves) {
    d = std::min(d, curve_dist(h));
    if (std::lround(winding(h)) != 0) inside = false;
  }
  return inside ? d : -d;
}

const Circle& Domain::hole_circle(int k) const { return holes_.at(k); }
Complex Domain::anchor(int k) const { return holes_.at(k).center; }
const Cycle& Domain::cycle(int k) const { return cycles_.at(k); }
const Circle& Domain::outer_circle() const { return outer_; }

QuadratureSet Domain::boundary_nodes(int per_component) const {
  if (per_component < 16) throw ConfigError("boundary_nodes: need at least 16 nodes per component");
  QuadratureSet q;
  const int n = components();
  q.component_begin.assign(n + 1, 0);
  const bool parametric = spec_.kind == DomainSpec::Kind::Parametric;

  auto add_circle = [&](const Circle& c, int comp, bool outer) {
    for (int i = 0; i < per_component; ++i) {
      const double t = kTwoPi * i / per_component;
      const Complex dir = std::polar(1.0, t);
      q.nodes.push_back(c.center + c.radius * dir);
      q.weights.push_back(kTwoPi * c.radius / per_component);
      q.normals.push_back(outer ? dir : -dir);
      q.component.push_back(comp);
    }
  };
  auto add_curve = [&](const AnalyticCurve& c, int comp, bool outer) {
    for (int i = 0; i < per_component; ++i) {
      const double t = kTwoPi * i / per_component;
      const Complex dz = c.tangent(t);
      const double speed = std::abs(dz);
      q.nodes.push_back(c.point(t));
      q.weights.push_back(speed * kTwoPi / per_component);
      // ccw curve: -i z' points away from the enclosed region
      const Complex away = dz * Complex(0.0, -1.0) / speed;
      q.normals.push_back(outer ? away : -away);
      q.component.push_back(comp);
    }
  };

  for (int k = 0; k < hole_count(); ++k) {
    q.component_begin[k] = q.nodes.size();
    if (parametric)
      add_curve(spec_.hole_curves[k], k, false);
    else
      add_circle(holes_[k], k, false);
  }
  q.component_begin[hole_count()] = q.nodes.size();
  if (parametric)
    add_curve(spec_.outer_curve, outer_index(), true);
  else
    add_circle(outer_, outer_index(), true);
  q.component_begin[n] = q.nodes.size();
  return q;
}

// ---------------------------------------------------------------------------
// Interior quadrature.
//
// The domain is split with a smooth partition of unity: graded polar patches
// around singular centers, smooth collars around holes (so the leftover
// integrand, extended by zero across the holes, stays C-infinity), and a polar
// background over the outer disk. Each cutoff is folded into the node weights,
// so the returned nodes/weights integrate f over the whole domain.

namespace {

struct Bump {  // radial cutoff around `center`: 1 inside r0, 0 outside r1
  Complex center;
  double r0, r1;
  double value(Complex z) const {
    const double s = std::abs(z - center);
    if (s <= r0) return 1.0;
    if (s >= r1) return 0.0;
    return radial_cutoff(s, r0, r1);
  }
};

void add_polar_ring(AreaQuadrature& q, Complex center, double r_lo, double r_hi, int gl_order,
                    int m_theta, const std::function<double(Complex, double)>& weight_factor) {
  std::vector<double> rn, rw;
  gauss_legendre(gl_order, r_lo, r_hi, rn, rw);
  for (std::size_t i = 0; i < rn.size(); ++i) {
    const double r = rn[i];
    const double wr = rw[i] * r * kTwoPi / m_theta;
    for (int j = 0; j < m_theta; ++j) {
      const double t = kTwoPi * (j + 0.5) / m_theta;
      const Complex z = center + std::polar(r, t);
      const double f = weight_factor(z, r);
      if (f > 1e-14) {
        q.nodes.push_back(z);
        q.weights.push_back(wr * f);
      }
    }
  }
}

}  // namespace

AreaQuadrature Domain::interior_mesh(int target_nodes, std::span<const Complex> singular_centers,
                                     const MeshOptions& options) const {
  if (target_nodes < 200) throw ConfigError("interior_mesh: target_nodes too small (< 200)");
  AreaQuadrature q;

  // Deduplicate and validate singular centers.
  std::vector<Complex> centers;
  for (Complex c : singular_centers) {
    if (!contains(c)) throw ConfigError("interior_mesh: singular center outside the domain");
    bool dup = false;
    for (Complex d : centers) dup |= std::abs(c - d) < 1e-12 * outer_.radius;
    if (!dup) centers.push_back(c);
  }
  q.singular_centers = centers;

  const bool parametric = spec_.kind == DomainSpec::Kind::Parametric;
  const bool radial_case =
      !parametric && (holes_.empty() ||
                      (holes_.size() == 1 && std::abs(holes_[0].center - outer_.center) <
                                                 1e-14 * outer_.radius));

  // -- hole collars (skipped in the concentric/radial case) ------------------
  struct Collar {
    int hole;
    double r_out;
  };
  std::vector<Collar> collars;
  if (!radial_case) {
    for (int k = 0; k < hole_count(); ++k) {
      const Circle& h = holes_[k];
      double gap = (outer_.radius - std::abs(h.center - outer_.center)) - h.radius;
      for (int l = 0; l < hole_count(); ++l)
        if (l != k)
          gap = std::min(gap, std::abs(h.center - holes_[l].center) - holes_[l].radius - h.radius);
      collars.push_back({k, h.radius + 0.45 * gap});
    }
    // Shrink collars that would swallow a singular center.
    for (Complex c : centers) {
      for (auto& col : collars) {
        const Circle& h = holes_[col.hole];
        const double d = std::abs(c - h.center) - h.radius;  // > 0 since c is interior
        if (col.r_out > h.radius + 0.55 * d) col.r_out = h.radius + 0.55 * d;
      }
    }
  }

  // -- singular patch radii ---------------------------------------------------
  std::vector<double> patch_radius(centers.size());
  for (std::size_t i = 0; i < centers.size(); ++i) {
    double lim = boundary_clearance(centers[i]);
    for (std::size_t j = 0; j < centers.size(); ++j)
      if (j != i) lim = std::min(lim, std::abs(centers[i] - centers[j]));
    for (const auto& col : collars)
      lim = std::min(lim, std::abs(centers[i] - holes_[col.hole].center) - col.r_out);
    patch_radius[i] = std::min(0.45 * lim, 0.25 * outer_.radius);
    if (!(patch_radius[i] > 4.0 * options.patch_inner))
      throw NumericError("interior_mesh: singular center too close to the boundary or a hole");
  }

  std::vector<Bump> bumps;  // all cutoff supports; background factor = 1 - sum
  for (const auto& col : collars) {
    const Circle& h = holes_[col.hole];
    bumps.push_back(Bump{h.center, h.radius + 0.25 * (col.r_out - h.radius),
                         h.radius + 0.9 * (col.r_out - h.radius)});
  }
  for (std::size_t i = 0; i < centers.size(); ++i)
    bumps.push_back(Bump{centers[i], 0.35 * patch_radius[i], 0.9 * patch_radius[i]});

  auto background_factor = [&](Complex z) {
    double f = 1.0;
    for (const auto& b : bumps) f -= b.value(z);
    return std::max(f, 0.0);
  };

  // -- singular patches: geometric rings down to patch_inner, then panels
  //    aligned with the cutoff transition ------------------------------------
  const int patch_theta = std::max(32, options.angular_hint / 4);
  for (std::size_t i = 0; i < centers.size(); ++i) {
    const Bump& b = bumps[collars.size() + i];
    auto factor = [&](Complex z, double) { return b.value(z); };
    double hi = b.r0;
    const double ratio = 2.5;
    while (hi > options.patch_inner) {
      const double lo = std::max(hi / ratio, options.patch_inner);
      add_polar_ring(q, centers[i], lo, hi, 12, patch_theta, factor);
      hi = lo;
    }
    for (int p = 0; p < 4; ++p)  // transition zone, aligned panels
      add_polar_ring(q, centers[i], b.r0 + (b.r1 - b.r0) * p / 4.0,
                     b.r0 + (b.r1 - b.r0) * (p + 1) / 4.0, 16, patch_theta, factor);
  }

  // -- hole collars: log-spaced panels in the flat zone, aligned panels across
  //    the transition ----------------------------------------------------------
  const int collar_theta = std::max(64, options.angular_hint);
  for (std::size_t ci = 0; ci < collars.size(); ++ci) {
    const Circle& h = holes_[collars[ci].hole];
    const Bump& b = bumps[ci];
    auto factor = [&](Complex z, double) { return b.value(z); };
    const double lo = h.radius, mid = b.r0;
    const int panels = std::max(3, int(std::ceil(std::log2(mid / lo))) + 2);
    for (int p = 0; p < panels; ++p)
      add_polar_ring(q, h.center, lo * std::pow(mid / lo, double(p) / panels),
                     lo * std::pow(mid / lo, double(p + 1) / panels), 12, collar_theta, factor);
    for (int p = 0; p < 4; ++p)
      add_polar_ring(q, h.center, b.r0 + (b.r1 - b.r0) * p / 4.0,
                     b.r0 + (b.r1 - b.r0) * (p + 1) / 4.0, 16, collar_theta, factor);
  }

  // -- background --------------------------------------------------------------
  const std::size_t fixed = q.nodes.size();
  const int remaining = std::max(1500, target_nodes - int(fixed));
  const double r_in = radial_case && !holes_.empty() ? holes_[0].radius : 0.0;
  const double r_out = outer_.radius;
  const double r_mid = 0.5 * (r_in + r_out);

  int m_theta = int(std::ceil(std::sqrt(remaining * kTwoPi * std::max(r_mid, 0.25 * r_out) /
                                        (r_out - r_in))));
  m_theta = std::clamp(m_theta, 64, 8192);
  m_theta = std::max(m_theta, options.angular_hint);
  // Off-center cutoff bands are crossed near-tangentially by some background
  // circles; those crossings set the angular resolution floor.
  double t_min = std::numeric_limits<double>::max();
  for (const auto& b : bumps)
    if (std::abs(b.center - outer_.center) > 1e-9 * outer_.radius)
      t_min = std::min(t_min, b.r1 - b.r0);
  if (t_min < (r_out - r_in)) m_theta = std::max(m_theta, 192);
  int n_r = std::max(24, remaining / m_theta);

  if (!parametric) {
    const int gl = 16;
    int panels = std::max(2, (n_r + gl - 1) / gl);
    // Panels must also resolve the radial profile of off-center cutoffs.
    if (t_min < (r_out - r_in))
      panels = std::max(panels, std::min(24, int(std::ceil((r_out - r_in) / (1.2 * t_min)))));
    // Radial panel edges: uniform, plus breakpoints aligned with any cutoff
    // transition that is concentric with the background's polar center (the
    // only case where its radial profile is seen coherently by every theta).
    std::vector<double> edges;
    for (int p = 0; p <= panels; ++p) edges.push_back(r_in + (r_out - r_in) * p / panels);
    for (const auto& b : bumps) {
      if (std::abs(b.center - outer_.center) > 1e-9 * outer_.radius) continue;
      for (int s = 0; s <= 4; ++s) {
        const double r = b.r0 + (b.r1 - b.r0) * s / 4.0;
        if (r > r_in + 1e-12 * outer_.radius && r < r_out - 1e-12 * outer_.radius)
          edges.push_back(r);
      }
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end(),
                            [&](double a, double c) { return c - a < 1e-10 * outer_.radius; }),
                edges.end());
    std::vector<double> rn, rw;
    for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
      gauss_legendre(gl, edges[p], edges[p + 1], rn, rw);
      for (std::size_t i = 0; i < rn.size(); ++i) {
        const double r = rn[i];
        const double wr = rw[i] * r * kTwoPi / m_theta;
        for (int j = 0; j < m_theta; ++j) {
          const double t = kTwoPi * (j + 0.5) / m_theta;
          const Complex z = outer_.center + std::polar(r, t);
          const double f = background_factor(z);
          if (f > 1e-14) {
            q.nodes.push_back(z);
            q.weights.push_back(wr * f);
          }
        }
      }
    }
  } else {
    // Star-shaped scaled-polar background over the outer curve; collars cover
    // the hole moats (parametric interior meshes are best-effort).
    const AnalyticCurve& oc = spec_.outer_curve;
    const Complex c0 = outer_.center;
    // radius function rho(theta), resolved by dense sampling + local refinement
    constexpr int MS = 4096;
    std::vector<double> ang(MS), rad(MS);
    for (int i = 0; i < MS; ++i) {
      const Complex z = oc.point(kTwoPi * i / MS) - c0;
      ang[i] = std::arg(z);
      rad[i] = std::abs(z);
    }
    auto rho = [&](double theta) {
      // nearest sampled angle (curves are required near-star-shaped; best-effort)
      double best = std::numeric_limits<double>::max(), r = 0.0;
      for (int i = 0; i < MS; ++i) {
        double d = std::remainder(ang[i] - theta, kTwoPi);
        if (std::abs(d) < best) {
          best = std::abs(d);
          r = rad[i];
        }
      }
      return r;
    };
    const int gl = 12;
    const int panels = std::max(2, (n_r + gl - 1) / gl);
    std::vector<double> sn, sw;
    for (int j = 0; j < m_theta; ++j) {
      const double t = kTwoPi * (j + 0.5) / m_theta;
      const double rmax = rho(t);
      for (int p = 0; p < panels; ++p) {
        gauss_legendre(gl, rmax * p / panels, rmax * (p + 1) / panels, sn, sw);
        for (std::size_t i = 0; i < sn.size(); ++i) {
          const Complex z = c0 + std::polar(sn[i], t);
          double f = background_factor(z);
          if (f <= 1e-14) continue;
          if (!holes_.empty() && !contains(z)) continue;  // guard: inside a hole curve
          q.nodes.push_back(z);
          q.weights.push_back(sw[i] * sn[i] * kTwoPi / m_theta * f);
        }
      }
    }
  }

  for (double w : q.weights)
    if (!(w > 0.0)) throw NumericError("interior_mesh: nonpositive weight");
  return q;
}

std::shared_ptr<const Domain> build_domain(const DomainSpec& spec) {
  return std::make_shared<const Domain>(spec);
}

int polyline_winding(std::span<const Complex> polyline, Complex z0) {
  double w = 0.0;
  for (std::size_t i = 0; i + 1 < polyline.size(); ++i)
    w += principal_arg_ratio(polyline[i + 1] - z0, polyline[i] - z0);
  return int(std::lround(w / kTwoPi));
}

void gauss_legendre(int order, double a, double b, std::vector<double>& nodes,
                    std::vector<double>& weights) {
  static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
  auto it = cache.find(order);
  if (it == cache.end()) {
    // Golub-Welsch on the Jacobi matrix for Legendre polynomials.
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(order, order);
    for (int i = 1; i < order; ++i) {
      const double bi = i / std::sqrt(4.0 * i * i - 1.0);
      J(i, i - 1) = J(i - 1, i) = bi;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    std::vector<double> xs(order), ws(order);
    for (int i = 0; i < order; ++i) {
      xs[i] = es.eigenvalues()(i);
      const double v = es.eigenvectors()(0, i);
      ws[i] = 2.0 * v * v;
    }
    it = cache.emplace(order, std::make_pair(std::move(xs), std::move(ws))).first;
  }
  const auto& [xs, ws] = it->second;
  nodes.resize(order);
  weights.resize(order);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (int i = 0; i < order; ++i) {
    nodes[i] = mid + half * xs[i];
    weights[i] = half * ws[i];
  }
}

}  // namespace suitaeq
