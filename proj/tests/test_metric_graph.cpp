#include <doctest.h>

#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <sstream>

#include "kreinlab/errors.hpp"
#include "kreinlab/graph_backend.hpp"
#include "kreinlab/graph_function.hpp"
#include "kreinlab/metric_graph.hpp"
#include "kreinlab/types.hpp"

using namespace kreinlab;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Independent root finder for transcendental oracles.
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

std::shared_ptr<SmoothFunction> constant_one(
    std::shared_ptr<const MetricGraph> g) {
  return std::make_shared<SmoothFunction>(
      g, [](int, double) { return Complex(1.0, 0.0); },
      [](int, double) { return Complex(0.0, 0.0); },
      [](int, double) { return Complex(0.0, 0.0); }, 16);
}

}  // namespace

TEST_CASE("metric graph construction validates its input") {
  CHECK_THROWS_AS(MetricGraph(2, {}, {0}), ConfigError);
  CHECK_THROWS_AS(MetricGraph(2, {{0, 0, 1.0}}, {0}), ConfigError);
  CHECK_THROWS_AS(MetricGraph(2, {{0, 1, -1.0}}, {0}), ConfigError);
  CHECK_THROWS_AS(MetricGraph(2, {{0, 1, 0.0}}, {0}), ConfigError);
  CHECK_THROWS_AS(MetricGraph(2, {{0, 2, 1.0}}, {0}), ConfigError);
  CHECK_THROWS_AS(MetricGraph(2, {{0, 1, 1.0}}, {}), ConfigError);
  CHECK_THROWS_AS(MetricGraph(2, {{0, 1, 1.0}}, {0, 0}), ConfigError);
  CHECK_THROWS_AS(MetricGraph(2, {{0, 1, 1.0}}, {2}), ConfigError);
  // Vertex 2 unreachable: both the isolation and connectivity rules apply.
  CHECK_THROWS_AS(MetricGraph(3, {{0, 1, 1.0}}, {0}), ConfigError);
  // Two components, each with edges.
  CHECK_THROWS_AS(
      MetricGraph(4, {{0, 1, 1.0}, {2, 3, 1.0}}, {0}), ConfigError);

  const auto unit = MetricGraph::interval();
  CHECK(unit->vertex_count() == 2);
  CHECK(unit->edge_count() == 1);
  CHECK(unit->boundary() == std::vector<int>{0, 1});
  CHECK(unit->boundary_index(1) == 1);
  CHECK(unit->degree(0) == 1);

  const auto star = MetricGraph::star(3);
  CHECK(star->vertex_count() == 4);
  CHECK(star->edge_count() == 3);
  CHECK(star->boundary_dim() == 3);
  CHECK(star->degree(0) == 3);
  CHECK(!star->is_boundary(0));
  CHECK(star->total_length() == doctest::Approx(3.0));
}

TEST_CASE("harmonic extension on the interval matches the closed form") {
  GraphBackend bk(MetricGraph::interval());
  Vector g(2);
  g << Complex(1.0, 0.0), Complex(1.0, 0.0);
  const auto u = bk.dirichlet_solve(Complex(-1.0, 0.0), g);

  // (Delta + 1) u = 0 with u(0) = u(1) = 1 is cosh(x - 1/2) / cosh(1/2).
  for (double x : {0.0, 0.125, 0.37, 0.5, 0.81, 1.0}) {
    const double oracle = std::cosh(x - 0.5) / std::cosh(0.5);
    CHECK(std::abs(u.value(0, x) - Complex(oracle, 0.0)) <= 1e-12);
  }
  const Vector tr = bk.trace(u);
  CHECK(std::abs(tr(0) - g(0)) <= 1e-12);
  CHECK(std::abs(tr(1) - g(1)) <= 1e-12);

  // Both outward fluxes equal sinh(1/2)/cosh(1/2) by symmetry.
  const Vector fl = bk.normal_flux(u);
  CHECK(std::abs(fl(0) - Complex(std::tanh(0.5), 0.0)) <= 1e-12);
  CHECK(std::abs(fl(1) - Complex(std::tanh(0.5), 0.0)) <= 1e-12);
}

TEST_CASE("interval flux map reproduces frozen boundary matrices") {
  GraphBackend bk(MetricGraph::interval());
  const double c1 = std::cosh(1.0), s1 = std::sinh(1.0);

  SUBCASE("z = -1") {
    Matrix lambda(2, 2);
    for (int j = 0; j < 2; ++j) {
      Vector e = Vector::Zero(2);
      e(j) = 1.0;
      lambda.col(j) = bk.normal_flux(bk.dirichlet_solve({-1.0, 0.0}, e));
    }
    CHECK(std::abs(lambda(0, 0) - Complex(c1 / s1, 0.0)) <= 1e-12);
    CHECK(std::abs(lambda(1, 1) - Complex(c1 / s1, 0.0)) <= 1e-12);
    CHECK(std::abs(lambda(0, 1) - Complex(-1.0 / s1, 0.0)) <= 1e-12);
    CHECK(std::abs(lambda(1, 0) - Complex(-1.0 / s1, 0.0)) <= 1e-12);
  }
  SUBCASE("z = 0 gives the difference matrix") {
    Matrix lambda(2, 2);
    for (int j = 0; j < 2; ++j) {
      Vector e = Vector::Zero(2);
      e(j) = 1.0;
      lambda.col(j) = bk.normal_flux(bk.dirichlet_solve({0.0, 0.0}, e));
    }
    CHECK(std::abs(lambda(0, 0) - Complex(1.0, 0.0)) <= 1e-12);
    CHECK(std::abs(lambda(0, 1) - Complex(-1.0, 0.0)) <= 1e-12);
    CHECK(std::abs(lambda(1, 0) - Complex(-1.0, 0.0)) <= 1e-12);
    CHECK(std::abs(lambda(1, 1) - Complex(1.0, 0.0)) <= 1e-12);
  }
  SUBCASE("z = (pi/2)^2 has vanishing diagonal") {
    const double z = kPi * kPi / 4.0;
    Matrix lambda(2, 2);
    for (int j = 0; j < 2; ++j) {
      Vector e = Vector::Zero(2);
      e(j) = 1.0;
      lambda.col(j) = bk.normal_flux(bk.dirichlet_solve({z, 0.0}, e));
    }
    CHECK(std::abs(lambda(0, 0)) <= 1e-11);
    CHECK(std::abs(lambda(1, 1)) <= 1e-11);
    CHECK(std::abs(lambda(0, 1) - Complex(-kPi / 2.0, 0.0)) <= 1e-11);
    CHECK(std::abs(lambda(1, 0) - Complex(-kPi / 2.0, 0.0)) <= 1e-11);
  }
}

TEST_CASE("star flux map matches the rank-one-correction closed form") {
  // On the equilateral 3-star the flux map at z is
  // (s'/s) I - (1 / (3 c s)) J with J the all-ones matrix.
  GraphBackend bk(MetricGraph::star(3));
  const double z = -1.0;
  const double c = std::cosh(1.0), s = std::sinh(1.0);
  const double diag_part = c / s;  // s'(z,1)/s(z,1) with s' = cosh at z = -1
  const double jpart = 1.0 / (3.0 * c * s);
  Matrix lambda(3, 3);
  for (int j = 0; j < 3; ++j) {
    Vector e = Vector::Zero(3);
    e(j) = 1.0;
    lambda.col(j) = bk.normal_flux(bk.dirichlet_solve({z, 0.0}, e));
  }
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const double oracle = (i == j ? diag_part : 0.0) - jpart;
      CHECK(std::abs(lambda(i, j) - Complex(oracle, 0.0)) <= 1e-12);
    }
}

TEST_CASE("interval Dirichlet spectrum is n^2 pi^2") {
  GraphBackend bk(MetricGraph::interval());
  const auto spec = bk.dirichlet_spectrum({0.5, 45.0});
  REQUIRE(spec.size() == 2);
  CHECK(spec[0].value == doctest::Approx(kPi * kPi).epsilon(1e-10));
  CHECK(spec[0].multiplicity == 1);
  CHECK(spec[1].value == doctest::Approx(4.0 * kPi * kPi).epsilon(1e-10));
  CHECK(spec[1].multiplicity == 1);
}

TEST_CASE("star Dirichlet spectrum carries an even-multiplicity level") {
  GraphBackend bk(MetricGraph::star(3));
  const auto spec = bk.dirichlet_spectrum({0.5, 25.0});
  REQUIRE(spec.size() == 3);
  CHECK(spec[0].value == doctest::Approx(kPi * kPi / 4.0).epsilon(1e-10));
  CHECK(spec[0].multiplicity == 1);
  CHECK(spec[1].value == doctest::Approx(kPi * kPi).epsilon(1e-10));
  CHECK(spec[1].multiplicity == 2);
  CHECK(spec[2].value ==
        doctest::Approx(9.0 * kPi * kPi / 4.0).epsilon(1e-10));
  CHECK(spec[2].multiplicity == 1);
}

TEST_CASE("solution space at an eigenvalue returns normalized eigenfunctions") {
  GraphBackend bk(MetricGraph::interval());
  const auto fns = bk.solution_space(Complex(kPi * kPi, 0.0), std::nullopt);
  REQUIRE(fns.size() == 1);
  // Normalized eigenfunction is sqrt(2) sin(pi x) up to phase.
  const double mid = std::abs(fns[0].value(0, 0.5));
  CHECK(mid == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
  CHECK(std::abs(fns[0].value(0, 0.0)) <= 1e-9);

  GraphBackend star(MetricGraph::star(3));
  CHECK(star.solution_space(Complex(kPi * kPi, 0.0), std::nullopt).size() == 2);
  CHECK(star.solution_space(Complex(5.0, 0.0), std::nullopt).empty());
}

TEST_CASE("resolvent on the interval matches the closed form") {
  const auto g = MetricGraph::interval();
  GraphBackend bk(g);
  const auto one = constant_one(g);
  const auto u = bk.dirichlet_resolvent({-1.0, 0.0}, one);
  // (Delta + 1) u = 1 with u(0) = u(1) = 0: u = 1 - cosh(x-1/2)/cosh(1/2).
  for (double x : {0.0, 0.2, 0.5, 0.77, 1.0}) {
    const double oracle = 1.0 - std::cosh(x - 0.5) / std::cosh(0.5);
    CHECK(std::abs(u.value(0, x) - Complex(oracle, 0.0)) <= 1e-11);
  }
  // The stored calculus is exact: laplacian = z u + h by construction.
  const Complex resid =
      u.laplacian(0, 0.3) - (Complex(-1.0, 0.0) * u.value(0, 0.3) +
                             one->value(0, 0.3));
  CHECK(std::abs(resid) == 0.0);

  // Derivative of the closed form: -sinh(x - 1/2)/cosh(1/2).
  for (double x : {0.1, 0.6}) {
    const double oracle = -std::sinh(x - 0.5) / std::cosh(0.5);
    CHECK(std::abs(u.derivative(0, x) - Complex(oracle, 0.0)) <= 1e-11);
  }
}

TEST_CASE("flux-coupled resolvent reduces to known cases") {
  const auto g = MetricGraph::interval();
  GraphBackend bk(g);
  const auto one = constant_one(g);

  SUBCASE("zero coupling at z = -1 returns the constant") {
    const auto u = bk.robin_resolvent({-1.0, 0.0}, Matrix::Zero(2, 2), one);
    for (double x : {0.0, 0.3, 0.9})
      CHECK(std::abs(u.value(0, x) - Complex(1.0, 0.0)) <= 1e-11);
  }
  SUBCASE("an eigenvalue of the coupled operator is rejected") {
    CHECK_THROWS_AS(
        bk.robin_resolvent({kPi * kPi, 0.0}, Matrix::Zero(2, 2), one),
        EigenvalueAt);
  }
  SUBCASE("non-Hermitian coupling is rejected") {
    Matrix b(2, 2);
    b << Complex(0.0, 0.0), Complex(1.0, 0.0), Complex(2.0, 0.0),
        Complex(0.0, 0.0);
    CHECK_THROWS_AS(bk.robin_resolvent({-1.0, 0.0}, b, one), ContractError);
  }
}

TEST_CASE("coupled spectra match transcendental oracles") {
  GraphBackend bk(MetricGraph::interval());

  SUBCASE("identity coupling has a negative eigenvalue") {
    // z = -kappa^2 with kappa tanh(kappa/2) = 1.
    const double kappa = oracle_root(
        [](double k) { return k * std::tanh(0.5 * k) - 1.0; }, 1.0, 2.0);
    const auto spec = bk.robin_spectrum({-5.0, 0.5}, Matrix::Identity(2, 2));
    REQUIRE(spec.size() == 1);
    CHECK(spec[0].value == doctest::Approx(-kappa * kappa).epsilon(1e-9));
    CHECK(spec[0].multiplicity == 1);
  }
  SUBCASE("negative identity coupling has a root of k tan(k/2) = 1") {
    const double k = oracle_root(
        [](double t) { return t * std::tan(0.5 * t) - 1.0; }, 0.5, 2.0);
    const auto spec =
        bk.robin_spectrum({0.5, 5.0}, -Matrix::Identity(2, 2));
    REQUIRE(spec.size() == 1);
    CHECK(spec[0].value == doctest::Approx(k * k).epsilon(1e-9));
  }
  SUBCASE("zero coupling gives the free spectrum {0, pi^2, 4 pi^2}") {
    const auto spec = bk.robin_spectrum({-1.0, 45.0}, Matrix::Zero(2, 2));
    REQUIRE(spec.size() == 3);
    CHECK(std::abs(spec[0].value) <= 1e-9);
    CHECK(spec[1].value == doctest::Approx(kPi * kPi).epsilon(1e-10));
    CHECK(spec[2].value == doctest::Approx(4 * kPi * kPi).epsilon(1e-10));
  }
}

TEST_CASE("operations near the Dirichlet spectrum are rejected") {
  GraphBackend bk(MetricGraph::interval());
  Vector g(2);
  g << Complex(1.0, 0.0), Complex(0.0, 0.0);
  CHECK_THROWS_AS(bk.dirichlet_solve({kPi * kPi, 0.0}, g),
                  NearDirichletSpectrum);
  CHECK_THROWS_AS(bk.dirichlet_solve({kPi * kPi + 1e-9, 0.0}, g),
                  NearDirichletSpectrum);
  // Outside the exclusion ball the solve goes through.
  CHECK_NOTHROW(bk.dirichlet_solve({kPi * kPi + 1e-3, 0.0}, g));
  // Complex z clear of the real axis is always regular.
  CHECK_NOTHROW(bk.dirichlet_solve({kPi * kPi, 0.1}, g));

  try {
    bk.dirichlet_solve({kPi * kPi + 1e-9, 0.0}, g);
    CHECK(false);
  } catch (const NearDirichletSpectrum& e) {
    CHECK(e.distance <= 1.1e-9);
  }
}

TEST_CASE("trace, flux and inner products on explicit functions") {
  const auto g = MetricGraph::interval();
  GraphBackend bk(g);
  SmoothFunction f(
      g, [](int, double t) { return Complex(t * t + 1.0, 0.0); },
      [](int, double t) { return Complex(2.0 * t, 0.0); },
      [](int, double) { return Complex(-2.0, 0.0); }, 16);
  const Vector tr = bk.trace(f);
  CHECK(std::abs(tr(0) - Complex(1.0, 0.0)) <= 1e-15);
  CHECK(std::abs(tr(1) - Complex(2.0, 0.0)) <= 1e-15);
  const Vector fl = bk.normal_flux(f);
  CHECK(std::abs(fl(0) - Complex(0.0, 0.0)) <= 1e-15);
  CHECK(std::abs(fl(1) - Complex(2.0, 0.0)) <= 1e-15);

  SmoothFunction x1(
      g, [](int, double t) { return Complex(t, 0.0); },
      [](int, double) { return Complex(1.0, 0.0); },
      [](int, double) { return Complex(0.0, 0.0); }, 16);
  SmoothFunction x2(
      g, [](int, double t) { return Complex(t * t, 0.0); },
      [](int, double t) { return Complex(2.0 * t, 0.0); },
      [](int, double) { return Complex(-2.0, 0.0); }, 16);
  CHECK(std::abs(bk.inner(x1, x2) - Complex(0.25, 0.0)) <= 1e-14);

  // Conjugate-linear in the first argument.
  LinearCombination ix(
      g, {{Complex(0.0, 1.0),
           std::make_shared<SmoothFunction>(
               g, [](int, double t) { return Complex(t, 0.0); },
               [](int, double) { return Complex(1.0, 0.0); },
               [](int, double) { return Complex(0.0, 0.0); }, 16)}});
  const Complex v = bk.inner(ix, x2);
  CHECK(std::abs(v - Complex(0.0, -0.25)) <= 1e-14);

  CHECK(bk.norm(x1) == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-13));
}

TEST_CASE("csv sampling is deterministic and well-formed") {
  const auto g = MetricGraph::interval();
  GraphBackend bk(g);
  Vector bd(2);
  bd << Complex(1.0, 0.0), Complex(-0.5, 0.0);
  const auto u = bk.dirichlet_solve({-1.0, 0.0}, bd);
  std::ostringstream first, second;
  sample_csv(first, u, 9);
  sample_csv(second, u, 9);
  CHECK(first.str() == second.str());
  std::istringstream lines(first.str());
  std::string line;
  int count = 0;
  std::getline(lines, line);
  CHECK(line == "edge_id,t,value_re,value_im");
  while (std::getline(lines, line)) ++count;
  CHECK(count == 9);
  CHECK_THROWS_AS(sample_csv(first, u, 1), ConfigError);
}
