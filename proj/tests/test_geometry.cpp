#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <suitaeq/geometry.hpp>

using namespace suitaeq;
using std::numbers::pi;

namespace {

double ellipse_perimeter(double a, double b) {
  // Arc-length quadrature oracle, independent of AnalyticCurve internals.
  const int n = 20000;
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double t = 2.0 * pi * (i + 0.5) / n;
    s += std::hypot(a * std::sin(t), b * std::cos(t)) * 2.0 * pi / n;
  }
  return s;
}

}  // namespace

TEST_CASE("gauss_legendre integrates polynomials exactly") {
  std::vector<double> x, w;
  for (int n : {4, 8, 16}) {
    x.clear();
    w.clear();
    gauss_legendre(n, -1.0, 3.0, x, w);
    REQUIRE(x.size() == std::size_t(n));
    for (double xi : x) {
      CHECK(xi > -1.0);
      CHECK(xi < 3.0);
    }
    for (int k = 0; k <= 2 * n - 1; ++k) {
      double got = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) got += w[i] * std::pow(x[i], k);
      const double exact = (std::pow(3.0, k + 1) - std::pow(-1.0, k + 1)) / (k + 1);
      CHECK(got == doctest::Approx(exact).epsilon(1e-13));
    }
  }
}

TEST_CASE("domain validation rejects bad specs") {
  CHECK_THROWS_AS((void)build_domain(DomainSpec::circular({{0, 0}, -1.0}, {})), ConfigError);
  CHECK_THROWS_AS((void)build_domain(DomainSpec::annulus(1.0)), ConfigError);
  CHECK_THROWS_AS((void)build_domain(DomainSpec::annulus(0.5)), ConfigError);
  // hole sticking out of the outer circle
  CHECK_THROWS_AS((void)build_domain(DomainSpec::circular({{0, 0}, 1.0}, {Circle{{0.8, 0.0}, 0.3}})),
                  ConfigError);
  // overlapping holes
  CHECK_THROWS_AS((void)build_domain(DomainSpec::circular(
                      {{0, 0}, 2.0}, {Circle{{-0.5, 0.0}, 0.4}, Circle{{0.2, 0.0}, 0.4}})),
                  ConfigError);
}

TEST_CASE("containment and clearance") {
  auto ann = build_domain(DomainSpec::annulus(4.0));
  CHECK(ann->contains({2.0, 0.0}));
  CHECK(!ann->contains({0.5, 0.0}));   // inside the hole
  CHECK(!ann->contains({0.0, 4.5}));   // outside
  CHECK(!ann->contains({1.0, 0.0}));   // on the hole boundary
  CHECK(ann->contains_closure({1.0, 0.0}, 1e-9));
  CHECK(ann->boundary_clearance({2.5, 0.0}) == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(ann->hole_count() == 1);
  CHECK(ann->anchor(0) == Complex{0.0, 0.0});
  CHECK(ann->outer_circle().radius == doctest::Approx(4.0));

  auto disk = build_domain(DomainSpec::circular({{1.0, -2.0}, 3.0}, {}));
  CHECK(disk->contains({1.0, -2.0}));
  CHECK(disk->hole_count() == 0);
  CHECK(disk->scale() == doctest::Approx(3.0));
}

TEST_CASE("boundary nodes: lengths, orientation, Cauchy winding") {
  auto dom = build_domain(
      DomainSpec::circular({{0, 0}, 2.0}, {Circle{{-0.9, 0.0}, 0.3}, Circle{{0.8, 0.4}, 0.25}}));
  auto q = dom->boundary_nodes(64);
  REQUIRE(q.component_begin.size() == 4);  // 3 components + sentinel

  // per-component arc length
  const double radii[] = {0.3, 0.25, 2.0};
  for (int k = 0; k < 3; ++k) {
    double len = 0.0;
    for (std::size_t i = q.component_begin[k]; i < q.component_begin[k + 1]; ++i)
      len += q.weights[i];
    CHECK(len == doctest::Approx(2.0 * pi * radii[k]).epsilon(1e-12));
  }

  // normals point out of the domain
  const Complex centers[] = {{-0.9, 0.0}, {0.8, 0.4}, {0.0, 0.0}};
  for (int k = 0; k < 3; ++k) {
    for (std::size_t i = q.component_begin[k]; i < q.component_begin[k + 1]; ++i) {
      const double along = std::real(q.normals[i] * std::conj(q.nodes[i] - centers[k]));
      if (k < 2)
        CHECK(along < 0.0);  // into the hole
      else
        CHECK(along > 0.0);  // away from the outer center
    }
  }

  // (1/2 pi i) contour integral of dz/(z - z0), boundary oriented so the
  // domain lies to the left; tangent = i * outward normal on every component.
  auto winding = [&](Complex z0) {
    Complex acc{0.0, 0.0};
    for (std::size_t i = 0; i < q.nodes.size(); ++i)
      acc += q.weights[i] * Complex{0.0, 1.0} * q.normals[i] / (q.nodes[i] - z0);
    return acc / Complex{0.0, 2.0 * pi};
  };
  const Complex inside{0.0, 1.2};
  const Complex in_hole{-0.9, 0.0};
  const Complex outside{3.0, 0.0};
  CHECK(std::abs(winding(inside) - 1.0) < 1e-10);
  CHECK(std::abs(winding(in_hole)) < 1e-10);
  CHECK(std::abs(winding(outside)) < 1e-10);
}

TEST_CASE("analytic curves: tangent, area, boundary quadrature") {
  // ellipse with half-axes 1.2 / 0.8
  AnalyticCurve ell;
  ell.center = {0.0, 0.0};
  ell.modes = {{1, {1.0, 0.0}}, {-1, {0.2, 0.0}}};

  CHECK(ell.enclosed_area() == doctest::Approx(pi * 1.2 * 0.8).epsilon(1e-12));

  // finite-difference tangent check
  for (double t : {0.3, 1.7, 4.0}) {
    const double h = 1e-6;
    const Complex fd = (ell.point(t + h) - ell.point(t - h)) / (2.0 * h);
    CHECK(std::abs(fd - ell.tangent(t)) < 1e-7);
  }

  DomainSpec spec;
  spec.kind = DomainSpec::Kind::Parametric;
  spec.outer_curve = ell;
  auto dom = build_domain(spec);
  auto q = dom->boundary_nodes(512);
  double len = 0.0;
  for (double w : q.weights) len += w;
  CHECK(len == doctest::Approx(ellipse_perimeter(1.2, 0.8)).epsilon(1e-9));
  // outward normals, unit length
  for (std::size_t i = 0; i < q.nodes.size(); ++i) {
    CHECK(std::abs(q.normals[i]) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::real(q.normals[i] * std::conj(q.nodes[i])) > 0.0);
  }
}

TEST_CASE("polyline winding number") {
  std::vector<Complex> square = {{1, 1}, {-1, 1}, {-1, -1}, {1, -1}, {1, 1}};
  CHECK(polyline_winding(square, {0.0, 0.0}) == 1);
  CHECK(polyline_winding(square, {5.0, 0.0}) == 0);
  std::vector<Complex> rev(square.rbegin(), square.rend());
  CHECK(polyline_winding(rev, {0.0, 0.0}) == -1);
}

TEST_CASE("cycles surround their holes") {
  auto dom = build_domain(
      DomainSpec::circular({{0, 0}, 2.0}, {Circle{{-0.9, 0.0}, 0.3}, Circle{{0.8, 0.4}, 0.25}}));
  for (int k = 0; k < 2; ++k) {
    Cycle c = dom->cycle(k);
    CHECK(c.radius > dom->hole_circle(k).radius);
    auto poly = c.polyline(256);
    CHECK(polyline_winding(poly, dom->anchor(k)) == 1);
    CHECK(polyline_winding(poly, dom->anchor(1 - k)) == 0);
    for (Complex z : poly) CHECK(dom->contains(z));
  }
}

TEST_CASE("interior mesh: area sums and graded accuracy") {
  auto ann = build_domain(DomainSpec::annulus(2.0));
  auto mq = ann->interior_mesh(4000, {});
  CHECK(mq.total_weight() == doctest::Approx(3.0 * pi).epsilon(1e-10));
  for (double w : mq.weights) CHECK(w > 0.0);

  auto disk = build_domain(DomainSpec::disk());
  const Complex origin{0.0, 0.0};
  auto dq = disk->interior_mesh(5000, std::span<const Complex>(&origin, 1));
  REQUIRE(dq.singular_centers.size() == 1);
  CHECK(dq.total_weight() == doctest::Approx(pi).epsilon(1e-8));
  double ilog = 0.0;
  for (std::size_t i = 0; i < dq.nodes.size(); ++i)
    ilog += dq.weights[i] * std::log(1.0 / std::abs(dq.nodes[i]));
  CHECK(ilog == doctest::Approx(pi / 2.0).epsilon(1e-7));

  // graded patch away from the background's polar center
  const Complex off{0.3, 0.0};
  auto oq = disk->interior_mesh(12000, std::span<const Complex>(&off, 1));
  CHECK(oq.total_weight() == doctest::Approx(pi).epsilon(1e-7));
  double ilog2 = 0.0;
  for (std::size_t i = 0; i < oq.nodes.size(); ++i)
    ilog2 += oq.weights[i] * std::log(1.0 / std::abs(oq.nodes[i] - off));
  CHECK(ilog2 == doctest::Approx(pi * (1.0 - 0.09) / 2.0).epsilon(1e-6));

  auto dom3 = build_domain(
      DomainSpec::circular({{0, 0}, 1.0}, {Circle{{-0.45, 0.0}, 0.18}, Circle{{0.5, 0.1}, 0.15}}));
  auto m3 = dom3->interior_mesh(20000, {});
  const double area3 = pi * (1.0 - 0.18 * 0.18 - 0.15 * 0.15);
  CHECK(m3.total_weight() == doctest::Approx(area3).epsilon(2e-5));

  CHECK_THROWS_AS((void)disk->interior_mesh(100, {}), ConfigError);
  const Complex outside{2.0, 0.0};
  CHECK_THROWS_AS((void)disk->interior_mesh(5000, std::span<const Complex>(&outside, 1)),
                  ConfigError);
  const Complex hugging{0.99999999, 0.0};
  CHECK_THROWS_AS((void)disk->interior_mesh(5000, std::span<const Complex>(&hugging, 1)),
                  NumericError);
}
