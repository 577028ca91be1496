#include <doctest.h>

#include <cmath>
#include <complex>
#include <memory>

#include "kreinlab/boundary_ops.hpp"
#include "kreinlab/errors.hpp"
#include "kreinlab/graph_backend.hpp"
#include "kreinlab/graph_function.hpp"
#include "kreinlab/metric_graph.hpp"
#include "kreinlab/types.hpp"

using namespace kreinlab;

namespace {

constexpr double kPi = 3.14159265358979323846;

double oracle_root(const std::function<double(double)>& f, double a, double b) {
  double fa = f(a);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (a + b);
    const double fm = f(mid);
    if ((fm < 0) == (fa < 0)) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
    }
  }
  return 0.5 * (a + b);
}

Matrix coupling_example() {
  Matrix b(2, 2);
  b << Complex(1.0, 0.0), Complex(0.3, 0.0), Complex(0.3, 0.0),
      Complex(-0.5, 0.0);
  return b;
}

}  // namespace

TEST_CASE("boundary metric on the interval has the frozen hyperbolic form") {
  GraphBackend bk(MetricGraph::interval());
  const auto m = boundary_metric(bk);
  const double coth1 = std::cosh(1.0) / std::sinh(1.0);
  const double csch1 = 1.0 / std::sinh(1.0);

  CHECK(std::abs(m.lambda(0, 0) - Complex(coth1, 0.0)) <= 1e-12);
  CHECK(std::abs(m.lambda(0, 1) - Complex(-csch1, 0.0)) <= 1e-12);
  CHECK(std::abs(m.lambda(1, 0) - Complex(-csch1, 0.0)) <= 1e-12);
  CHECK(std::abs(m.lambda(1, 1) - Complex(coth1, 0.0)) <= 1e-12);

  // Closed-form inverse: (1/s) [[c, 1], [1, c]].
  CHECK(std::abs(m.inverse(0, 0) - Complex(coth1, 0.0)) <= 1e-12);
  CHECK(std::abs(m.inverse(0, 1) - Complex(csch1, 0.0)) <= 1e-12);

  CHECK((m.half * m.half - m.lambda).norm() <= 1e-12);
  CHECK((m.inv_half * m.lambda * m.inv_half - Matrix::Identity(2, 2)).norm() <=
        1e-12);
  CHECK(m.lambda_min == doctest::Approx(std::tanh(0.5)).epsilon(1e-12));
}

TEST_CASE("determinant of the interval flux map is -z") {
  GraphBackend bk(MetricGraph::interval());
  SUBCASE("real spectral parameters away from the Dirichlet spectrum") {
    Rng rng(0x5eed1001ULL);
    int tested = 0;
    while (tested < 60) {
      const double z = rng.uniform(-5.0, 28.0);
      if (std::abs(z - kPi * kPi) < 0.5) continue;
      const Matrix l = dtn(bk, Complex(z, 0.0));
      const Complex det = l(0, 0) * l(1, 1) - l(0, 1) * l(1, 0);
      CHECK(std::abs(det - Complex(-z, 0.0)) <= 1e-9 * (1.0 + std::abs(z)));
      ++tested;
    }
  }
  SUBCASE("complex spectral parameters") {
    for (Complex z : {Complex(2.0, 3.0), Complex(-1.5, 0.7),
                      Complex(11.0, -2.0)}) {
      const Matrix l = dtn(bk, z);
      const Complex det = l(0, 0) * l(1, 1) - l(0, 1) * l(1, 0);
      CHECK(std::abs(det + z) <= 1e-9 * (1.0 + std::abs(z)));
    }
  }
}

TEST_CASE("normalized Weyl family has the frozen values") {
  GraphBackend bk(MetricGraph::interval());
  const auto m = boundary_metric(bk);

  const Matrix at_minus_one = q0(bk, m, Complex(-1.0, 0.0));
  CHECK((at_minus_one - Matrix::Identity(2, 2)).norm() <= 1e-11);

  const Matrix at_zero = q0(bk, m, Complex(0.0, 0.0));
  const double t = std::tanh(0.5);
  CHECK(std::abs(at_zero(0, 0) - Complex(t, 0.0)) <= 1e-11);
  CHECK(std::abs(at_zero(0, 1) - Complex(-t, 0.0)) <= 1e-11);
  CHECK(std::abs(at_zero(1, 0) - Complex(-t, 0.0)) <= 1e-11);
  CHECK(std::abs(at_zero(1, 1) - Complex(t, 0.0)) <= 1e-11);
}

TEST_CASE("flux map decreases along the real axis") {
  GraphBackend bk(MetricGraph::interval());
  Rng rng(0x5eed1002ULL);
  for (int trial = 0; trial < 25; ++trial) {
    double z1 = rng.uniform(-4.0, 2.0);
    double z2 = rng.uniform(-4.0, 2.0);
    if (z1 > z2) std::swap(z1, z2);
    if (z2 - z1 < 1e-3) continue;
    const Matrix diff =
        dtn(bk, Complex(z1, 0.0)) - dtn(bk, Complex(z2, 0.0));
    const auto eig = hermitian_eig(diff);
    CHECK(eig.values.minCoeff() >= -1e-9);
  }
}

TEST_CASE("gamma-field adjoint applied to the constant is the unit vector") {
  GraphBackend bk(MetricGraph::interval());
  const auto m = boundary_metric(bk);
  const Vector v =
      beta_adjoint_apply(bk, m, Complex(-1.0, 0.0), bk.constant({1.0, 0.0}));
  CHECK(std::abs(v(0) - Complex(1.0, 0.0)) <= 1e-10);
  CHECK(std::abs(v(1) - Complex(1.0, 0.0)) <= 1e-10);
}

TEST_CASE("difference identity for the Weyl family") {
  // q0(z) - q0(conj w) = -(z - conj w) (beta^w)^* beta^z, columnwise.
  for (auto graph : {MetricGraph::interval(), MetricGraph::star(3)}) {
    GraphBackend bk(graph);
    const auto m = boundary_metric(bk);
    const int n = bk.boundary_dim();
    Rng rng(0x5eed1003ULL);
    for (int trial = 0; trial < 4; ++trial) {
      const Complex z = rng.complex_in(-3.0, 3.0, 0.4, 2.0);
      const Complex w = rng.complex_in(-3.0, 3.0, 0.4, 2.0);
      const Matrix lhs = q0(bk, m, z) - q0(bk, m, std::conj(w));
      Matrix rhs(n, n);
      for (int j = 0; j < n; ++j) {
        Vector e = Vector::Zero(n);
        e(j) = Complex(1.0, 0.0);
        rhs.col(j) =
            -(z - std::conj(w)) *
            beta_adjoint_apply(bk, m, w, bk.harmonic(z, e));
      }
      CHECK((lhs - rhs).norm() <= 5e-9 * (1.0 + lhs.norm()));
    }
  }
}

TEST_CASE("resolvent difference formula: frozen case") {
  const auto g = MetricGraph::interval();
  GraphBackend bk(g);
  const auto h = bk.constant({1.0, 0.0});
  const Matrix zero = Matrix::Zero(2, 2);
  const Complex z(-1.0, 0.0);

  const auto predicted = predicted_resolvent_diff(bk, z, zero, h);
  const auto actual = bk.combine(
      {{Complex(1.0, 0.0), bk.robin_resolve(z, zero, h)},
       {Complex(-1.0, 0.0), bk.resolvent(z, h)}});

  for (double x : {0.0, 0.21, 0.5, 0.83, 1.0}) {
    const double oracle = std::cosh(x - 0.5) / std::cosh(0.5);
    CHECK(std::abs(predicted->value(0, x) - Complex(oracle, 0.0)) <= 1e-10);
    CHECK(std::abs(actual->value(0, x) - Complex(oracle, 0.0)) <= 1e-10);
  }
}

TEST_CASE("resolvent difference formula: generic couplings and parameters") {
  for (auto graph : {MetricGraph::interval(), MetricGraph::star(3)}) {
    GraphBackend bk(graph);
    const int n = bk.boundary_dim();
    Matrix btilde = Matrix::Zero(n, n);
    btilde.topLeftCorner(2, 2) = coupling_example();
    const auto h = bk.constant({1.0, 0.0});

    for (Complex z : {Complex(-2.0, 0.0), Complex(0.7, 1.3)}) {
      const auto predicted = predicted_resolvent_diff(bk, z, btilde, h);
      const auto actual = bk.combine(
          {{Complex(1.0, 0.0), bk.robin_resolve(z, btilde, h)},
           {Complex(-1.0, 0.0), bk.resolvent(z, h)}});
      for (int e = 0; e < graph->edge_count(); ++e)
        for (double x : {0.13, 0.5, 0.92}) {
          CHECK(std::abs(predicted->value(e, x) - actual->value(e, x)) <=
                1e-9);
        }
      const Vector tp = bk.trace(predicted);
      const Vector ta = bk.trace(actual);
      CHECK((tp - ta).norm() <= 1e-9);
    }
  }
}

TEST_CASE("resolvent difference formula rejects coupled eigenvalues") {
  GraphBackend bk(MetricGraph::interval());
  const auto h = bk.constant({1.0, 0.0});
  CHECK_THROWS_AS(
      predicted_resolvent_diff(bk, Complex(0.0, 0.0), Matrix::Zero(2, 2), h),
      EigenvalueAt);
}

TEST_CASE("harmonic projection reproduces the closed form and is idempotent") {
  const auto g = MetricGraph::interval();
  GraphBackend bk(g);
  const auto f = std::make_shared<SmoothFunction>(
      g, [](int, double t) { return Complex(t, 0.0); },
      [](int, double) { return Complex(1.0, 0.0); },
      [](int, double) { return Complex(0.0, 0.0); }, 16);

  const Complex z(-1.0, 0.0);
  const auto p = harmonic_projection(bk, z, GraphBackend::Function(f));
  for (double x : {0.0, 0.3, 0.64, 1.0}) {
    const double oracle = std::sinh(x) / std::sinh(1.0);
    CHECK(std::abs(p->value(0, x) - Complex(oracle, 0.0)) <= 1e-10);
  }
  // Trace preserved.
  CHECK((bk.trace(p) - bk.trace(GraphBackend::Function(f))).norm() <= 1e-10);
  // Lands in the kernel of (Lap - z): laplacian + value vanishes.
  for (double x : {0.2, 0.8})
    CHECK(std::abs(p->laplacian(0, x) + p->value(0, x)) <= 1e-9);
  // Idempotent.
  const auto pp = harmonic_projection(bk, z, p);
  for (double x : {0.1, 0.5, 0.9})
    CHECK(std::abs(pp->value(0, x) - p->value(0, x)) <= 1e-9);
}

TEST_CASE("integration-by-parts residual vanishes for smooth pairs") {
  const auto g = MetricGraph::interval();
  GraphBackend bk(g);
  const auto f = std::make_shared<SmoothFunction>(
      g, [](int, double t) { return Complex(t * t * t - t, 0.0); },
      [](int, double t) { return Complex(3.0 * t * t - 1.0, 0.0); },
      [](int, double t) { return Complex(-6.0 * t, 0.0); }, 24);
  const auto h = std::make_shared<SmoothFunction>(
      g, [](int, double t) { return Complex(std::cos(t), 0.0); },
      [](int, double t) { return Complex(-std::sin(t), 0.0); },
      [](int, double t) { return Complex(std::cos(t), 0.0); }, 24);

  CHECK(std::abs(greens_identity_residual(bk, GraphBackend::Function(f),
                                          GraphBackend::Function(h))) <=
        1e-11);

  // Harmonic extensions at different parameters on the star.
  GraphBackend star(MetricGraph::star(3));
  Vector a(3), b(3);
  a << Complex(1.0, 0.0), Complex(-0.4, 0.2), Complex(0.0, 0.3);
  b << Complex(0.2, 0.0), Complex(0.9, 0.0), Complex(-0.1, -0.5);
  const auto u = star.harmonic(Complex(-2.0, 0.0), a);
  const auto v = star.harmonic(Complex(1.4, 0.0), b);
  CHECK(std::abs(greens_identity_residual(star, u, v)) <= 1e-10);
}

TEST_CASE("boundary relation scan matches the direct coupled spectrum") {
  GraphBackend bk(MetricGraph::interval());

  SUBCASE("identity coupling: one negative root, nothing excluded") {
    const auto scan =
        spectral_relation_scan(bk, {-5.0, 0.5}, Matrix::Identity(2, 2));
    const double kappa = oracle_root(
        [](double k) { return k * std::tanh(0.5 * k) - 1.0; }, 1.0, 2.0);
    REQUIRE(scan.roots.size() == 1);
    CHECK(scan.excluded.empty());
    CHECK(scan.roots[0].value ==
          doctest::Approx(-kappa * kappa).epsilon(1e-8));
    const auto direct = bk.robin_spectrum({-5.0, 0.5}, Matrix::Identity(2, 2));
    REQUIRE(direct.size() == 1);
    CHECK(scan.roots[0].value ==
          doctest::Approx(direct[0].value).epsilon(1e-8));
  }

  SUBCASE("zero coupling: root at zero, poles excluded by hypothesis") {
    const auto scan =
        spectral_relation_scan(bk, {-1.0, 45.0}, Matrix::Zero(2, 2));
    REQUIRE(scan.roots.size() == 1);
    CHECK(std::abs(scan.roots[0].value) <= 1e-8);
    REQUIRE(scan.excluded.size() == 2);
    CHECK(scan.excluded[0] == doctest::Approx(kPi * kPi).epsilon(1e-9));
    CHECK(scan.excluded[1] ==
          doctest::Approx(4.0 * kPi * kPi).epsilon(1e-9));

    // Every directly computed eigenvalue is a scan root or an excluded pole.
    const auto direct = bk.robin_spectrum({-1.0, 45.0}, Matrix::Zero(2, 2));
    REQUIRE(direct.size() == 3);
    for (const auto& ev : direct) {
      bool found = false;
      for (const auto& r : scan.roots)
        if (std::abs(r.value - ev.value) <= 1e-7 * (1.0 + std::abs(ev.value)))
          found = true;
      for (double x : scan.excluded)
        if (std::abs(x - ev.value) <= 1e-7 * (1.0 + std::abs(ev.value)))
          found = true;
      CHECK(found);
    }
  }

  SUBCASE("negative identity coupling: root of k tan(k/2) = 1") {
    const auto scan =
        spectral_relation_scan(bk, {0.5, 5.0}, -Matrix::Identity(2, 2));
    const double k = oracle_root(
        [](double t) { return t * std::tan(0.5 * t) - 1.0; }, 0.5, 2.0);
    REQUIRE(scan.roots.size() == 1);
    CHECK(scan.roots[0].value == doctest::Approx(k * k).epsilon(1e-8));
  }
}

TEST_CASE("kernel states of the boundary relation satisfy the coupling") {
  GraphBackend bk(MetricGraph::interval());
  const Matrix btilde = Matrix::Identity(2, 2);
  const auto scan = spectral_relation_scan(bk, {-5.0, 0.5}, btilde);
  REQUIRE(scan.roots.size() == 1);
  const Complex z(scan.roots[0].value, 0.0);
  const auto states = boundary_kernel_states(bk, z, btilde);
  REQUIRE(states.size() == 1);
  CHECK(bk.norm(states[0]) == doctest::Approx(1.0).epsilon(1e-10));
  const Vector resid =
      bk.normal_flux(states[0]) - btilde * bk.trace(states[0]);
  CHECK(resid.norm() <= 1e-7);
}

TEST_CASE("trace norm study saturates at the metric bound") {
  for (auto graph : {MetricGraph::interval(), MetricGraph::star(3)}) {
    GraphBackend bk(graph);
    const auto m = boundary_metric(bk);
    Rng rng(0x5eed1004ULL);
    const auto study = trace_norm_study(bk, m, 12, rng);
    CHECK(study.best_ratio <= study.bound * (1.0 + 1e-9));
    CHECK(study.best_ratio == doctest::Approx(study.bound).epsilon(1e-9));
  }
  GraphBackend bk(MetricGraph::interval());
  const auto m = boundary_metric(bk);
  CHECK(1.0 / m.lambda_min == doctest::Approx(1.0 / std::tanh(0.5)));
}

TEST_CASE("graph-norm orthogonality of harmonic and trace-free parts") {
  const auto g = MetricGraph::interval();
  GraphBackend bk(g);
  Vector xi(2);
  xi << Complex(0.7, 0.0), Complex(-0.2, 0.4);
  const auto u = bk.harmonic(Complex(-1.0, 0.0), xi);

  const auto bubble = std::make_shared<SmoothFunction>(
      g, [](int, double t) { return Complex(std::sin(kPi * t), 0.0); },
      [](int, double t) { return Complex(kPi * std::cos(kPi * t), 0.0); },
      [](int, double t) {
        return Complex(kPi * kPi * std::sin(kPi * t), 0.0);
      },
      24);
  const auto poly = std::make_shared<SmoothFunction>(
      g, [](int, double t) { return Complex(t * (1.0 - t), 0.0); },
      [](int, double t) { return Complex(1.0 - 2.0 * t, 0.0); },
      [](int, double) { return Complex(2.0, 0.0); }, 24);

  for (GraphBackend::Function b :
       {GraphBackend::Function(bubble), GraphBackend::Function(poly)}) {
    const Complex graph_ip = bk.inner(u, b) + bk.energy_inner(u, b);
    CHECK(std::abs(graph_ip) <= 1e-11);
  }
}
