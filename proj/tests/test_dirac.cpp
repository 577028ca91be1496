#include <doctest.h>

#include <cmath>
#include <complex>
#include <memory>
#include <vector>

#include "kreinlab/boundary_ops.hpp"
#include "kreinlab/dirac.hpp"
#include "kreinlab/errors.hpp"
#include "kreinlab/graph_backend.hpp"
#include "kreinlab/graph_function.hpp"
#include "kreinlab/metric_graph.hpp"
#include "kreinlab/types.hpp"

using namespace kreinlab;

namespace {

constexpr double kPi = 3.14159265358979323846;
const Complex kI{0.0, 1.0};

GraphBackend::Function smooth(const GraphBackend& bk,
                              SmoothFunction::Field value,
                              SmoothFunction::Field derivative,
                              SmoothFunction::Field laplacian) {
  return std::make_shared<SmoothFunction>(bk.graph_ptr(), std::move(value),
                                          std::move(derivative),
                                          std::move(laplacian), 48);
}

// Test pair with polynomial / trigonometric components and exact closures.
FormPair smooth_pair(const GraphBackend& bk) {
  auto f0 = smooth(
      bk,
      [](int, double t) { return Complex(t * t, 0.3 * t); },
      [](int, double t) { return Complex(2.0 * t, 0.3); },
      [](int, double) { return Complex(-2.0, 0.0); });
  auto f1 = smooth(
      bk,
      [](int, double t) { return Complex(std::cos(1.3 * t), 0.0); },
      [](int, double t) { return Complex(-1.3 * std::sin(1.3 * t), 0.0); },
      [](int, double t) { return Complex(1.69 * std::cos(1.3 * t), 0.0); });
  return {f0, f1};
}

// Pair vanishing (both components) at every boundary vertex of the interval.
FormPair minimal_pair(const GraphBackend& bk) {
  auto f0 = smooth(
      bk,
      [](int, double t) { return Complex(t * t * (1.0 - t), 0.0); },
      [](int, double t) { return Complex(2.0 * t - 3.0 * t * t, 0.0); },
      [](int, double t) { return Complex(6.0 * t - 2.0, 0.0); });
  auto f1 = smooth(
      bk,
      [](int, double t) { return Complex(std::sin(kPi * t), 0.0); },
      [](int, double t) { return Complex(kPi * std::cos(kPi * t), 0.0); },
      [](int, double t) {
        return Complex(kPi * kPi * std::sin(kPi * t), 0.0);
      });
  return {f0, f1};
}

double pair_distance(const GraphBackend& bk, const FormPair& a,
                     const FormPair& b) {
  const FormPair diff = form_combine(bk, {1.0, 0.0}, a, {-1.0, 0.0}, b);
  double worst = 0.0;
  for (int e = 0; e < bk.graph().edge_count(); ++e)
    for (double t : {0.0, 0.13, 0.37, 0.5, 0.71, 0.92, 1.0}) {
      const double s = t * bk.graph().edge(e).length;
      worst = std::max(worst, std::abs(diff.component0->value(e, s)));
      worst = std::max(worst, std::abs(diff.component1->value(e, s)));
    }
  return worst;
}

// Unit interval closed forms for the two Dirichlet-to-Neumann matrices used
// as independent oracles below.
Matrix interval_lambda_at(double kappa) {
  Matrix m(2, 2);
  const double d = kappa / std::tanh(kappa);
  const double o = -kappa / std::sinh(kappa);
  m << Complex(d, 0.0), Complex(o, 0.0), Complex(o, 0.0), Complex(d, 0.0);
  return m;
}

Matrix interval_lambda_inverse() {
  Matrix m(2, 2);
  const double d = 1.0 / std::tanh(1.0);
  const double o = 1.0 / std::sinh(1.0);
  m << Complex(d, 0.0), Complex(o, 0.0), Complex(o, 0.0), Complex(d, 0.0);
  return m;
}

Complex graph_inner(const GraphBackend& bk, const FormPair& f,
                    const FormPair& g) {
  return form_inner(bk, f, g) +
         form_inner(bk, dirac_apply(bk, f), dirac_apply(bk, g));
}

}  // namespace

TEST_CASE("first-order weyl matrix at the normalization point is -i") {
  GraphBackend bk(MetricGraph::interval());
  const BoundaryMetric m = boundary_metric(bk);
  const Matrix q = dirac_q(bk, m, kI);
  CHECK((q - (-kI) * Matrix::Identity(2, 2)).norm() <= 1e-12);
}

TEST_CASE("first-order weyl matrix reduces to the second-order family") {
  for (auto graph : {MetricGraph::interval(), MetricGraph::star(3)}) {
    GraphBackend bk(graph);
    const BoundaryMetric m = boundary_metric(bk);
    for (Complex w : {Complex(0.0, 1.0), Complex(0.6, 0.0),
                      Complex(1.0, 0.5), Complex(0.0, 2.2)}) {
      const Matrix direct = dirac_q(bk, m, w);
      const Matrix reduced = (Complex(1.0, 0.0) / w) * q0(bk, m, w * w);
      CHECK((direct - reduced).norm() <= 1e-10 * (1.0 + reduced.norm()));
    }
  }
}

TEST_CASE("gamma field lifts boundary data to exact eigenpairs") {
  for (auto graph : {MetricGraph::interval(), MetricGraph::star(3)}) {
    GraphBackend bk(graph);
    const int n = bk.boundary_dim();
    for (Complex w : {Complex(0.0, 1.0), Complex(0.7, 0.4)}) {
      for (int j = 0; j < n; ++j) {
        Vector e = Vector::Zero(n);
        e(j) = Complex(1.0, 0.0);
        const FormPair f = dirac_gamma_field(bk, w, e);
        // Boundary data is reproduced by the function trace.
        CHECK((bk.trace(f.component0) - e).norm() <= 1e-12);
        // (D - w) annihilates the field.
        CHECK(dirac_defect_residual(bk, w, f) <= 1e-13);
      }
    }
  }
}

TEST_CASE("normalized lift of a harmonic function has the expected size") {
  GraphBackend bk(MetricGraph::interval());
  Vector phi(2);
  phi << Complex(0.0, 0.0), Complex(1.0, 0.0);
  auto u = bk.harmonic(Complex(-1.0, 0.0), phi);
  const FormPair psi = psi_map(bk, kI, u);

  // |psi|^2 = (|u|^2 + |u'|^2) / 2 = coth(1) / 2 for u = sinh(x)/sinh(1).
  const double expected = 0.5 / std::tanh(1.0);
  const double got = form_norm(bk, psi);
  CHECK(std::abs(got * got - expected) <= 1e-11);
  CHECK(dirac_defect_residual(bk, kI, psi) <= 1e-13);

  // The lift is the gamma field scaled by 1/sqrt(2).
  const FormPair field = dirac_gamma_field(bk, kI, phi);
  const FormPair scaled = form_combine(
      bk, Complex(1.0 / std::sqrt(2.0), 0.0), field, {0.0, 0.0}, field);
  CHECK(pair_distance(bk, psi, scaled) <= 1e-12);
}

TEST_CASE("difference identity for the first-order weyl family") {
  // Closed-form anchor: w1 = i, w2 = 2i on the interval.  The metric-adjoint
  // difference equals -(w1 - conj w2) times the renormalized gram matrix of
  // the two defect bases, and evaluates to -i (I + Q0(-4) / 2).
  GraphBackend bk(MetricGraph::interval());
  const BoundaryMetric m = boundary_metric(bk);
  const int n = bk.boundary_dim();

  auto gram = [&](Complex w_left, Complex w_right) {
    Matrix g(n, n);
    std::vector<FormPair> left, right;
    for (int j = 0; j < n; ++j) {
      Vector e = Vector::Zero(n);
      e(j) = Complex(1.0, 0.0);
      left.push_back(dirac_gamma_field(bk, w_left, e));
      right.push_back(dirac_gamma_field(bk, w_right, e));
    }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) g(i, j) = form_inner(bk, left[i], right[j]);
    return g;
  };

  auto check_pair = [&](Complex w1, Complex w2, double tol) {
    const Matrix q1 = dirac_q(bk, m, w1);
    const Matrix q2 = dirac_q(bk, m, w2);
    const Matrix lhs = q1 - m.inverse * q2.adjoint() * m.lambda;
    const Matrix rhs =
        -(w1 - std::conj(w2)) * (m.inverse * gram(w2, w1));
    CHECK((lhs - rhs).norm() <= tol * (1.0 + lhs.norm()));
    // The opposite orientation is sharply rejected.
    CHECK((lhs + rhs).norm() > 1e3 * (lhs - rhs).norm());
    return lhs;
  };

  const Matrix anchored = check_pair(kI, 2.0 * kI, 1e-10);
  const Matrix q0_m4 = interval_lambda_inverse() * interval_lambda_at(2.0);
  const Matrix expected =
      -kI * (Matrix::Identity(2, 2) + 0.5 * q0_m4);
  CHECK((anchored - expected).norm() <= 1e-12);

  check_pair(Complex(0.9, 0.6), Complex(-0.3, 1.1), 1e-9);

  GraphBackend star(MetricGraph::star(3));
  const BoundaryMetric ms = boundary_metric(star);
  const Matrix qs1 = dirac_q(star, ms, Complex(0.8, 0.5));
  const Matrix qs2 = dirac_q(star, ms, Complex(0.2, 1.3));
  Matrix gs(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      Vector ei = Vector::Zero(3), ej = Vector::Zero(3);
      ei(i) = Complex(1.0, 0.0);
      ej(j) = Complex(1.0, 0.0);
      gs(i, j) = form_inner(star, dirac_gamma_field(star, Complex(0.2, 1.3), ei),
                            dirac_gamma_field(star, Complex(0.8, 0.5), ej));
    }
  const Matrix lhs_s =
      qs1 - ms.inverse * qs2.adjoint() * ms.lambda;
  const Matrix rhs_s = -(Complex(0.8, 0.5) - std::conj(Complex(0.2, 1.3))) *
                       (ms.inverse * gs);
  CHECK((lhs_s - rhs_s).norm() <= 1e-9 * (1.0 + lhs_s.norm()));
}

TEST_CASE("gamma fields at two parameters are linked by the resolvent") {
  GraphBackend bk(MetricGraph::interval());
  Vector phi(2);
  phi << Complex(1.0, 0.0), Complex(-0.4, 0.7);
  for (Complex w1 : {kI, Complex(0.5, 0.8)}) {
    for (Complex w2 : {Complex(0.0, 0.9), Complex(1.0, 0.6), 2.0 * kI}) {
      const FormPair f1 = dirac_gamma_field(bk, w1, phi);
      const FormPair shift = dirac_resolvent(bk, w2, f1);
      const FormPair predicted = form_combine(bk, {1.0, 0.0}, f1, w2 - w1, shift);
      const FormPair f2 = dirac_gamma_field(bk, w2, phi);
      const double err = form_norm(
          bk, form_combine(bk, {1.0, 0.0}, f2, {-1.0, 0.0}, predicted));
      CHECK(err <= 1e-9 * (1.0 + form_norm(bk, f2)));
    }
  }
}

TEST_CASE("first-order integration by parts pairs traces of both components") {
  GraphBackend bk(MetricGraph::interval());
  const FormPair f = smooth_pair(bk);
  const FormPair g = minimal_pair(bk);
  CHECK(std::abs(dirac_green_residual(bk, f, g)) <= 1e-10);
  CHECK(std::abs(dirac_green_residual(bk, f, f)) <= 1e-10);

  GraphBackend star(MetricGraph::star(3));
  Vector a(3), b(3);
  a << Complex(1.0, 0.0), Complex(-0.5, 0.2), Complex(0.3, -0.4);
  b << Complex(0.2, 0.1), Complex(1.1, 0.0), Complex(-0.7, 0.6);
  const FormPair fs = dirac_gamma_field(star, Complex(0.0, 0.9), a);
  const FormPair gs = dirac_gamma_field(star, Complex(1.1, 0.2), b);
  CHECK(std::abs(dirac_green_residual(star, fs, gs)) <=
        1e-9 * (1.0 + form_norm(star, fs) * form_norm(star, gs)));
}

TEST_CASE("first-order resolvent solves the off-diagonal system") {
  GraphBackend bk(MetricGraph::interval());
  auto h0 = smooth(
      bk,
      [](int, double t) { return Complex(std::sin(2.0 * t), 0.0); },
      [](int, double t) { return Complex(2.0 * std::cos(2.0 * t), 0.0); },
      [](int, double t) { return Complex(4.0 * std::sin(2.0 * t), 0.0); });
  auto h1 = smooth(
      bk,
      [](int, double t) { return Complex(t * t * t, 0.0); },
      [](int, double t) { return Complex(3.0 * t * t, 0.0); },
      [](int, double t) { return Complex(-6.0 * t, 0.0); });
  const FormPair h{h0, h1};

  for (Complex w : {Complex(0.4, 0.9), Complex(0.7, 0.0)}) {
    const FormPair r = dirac_resolvent(bk, w, h);
    const FormPair dr = dirac_apply(bk, r);
    for (double t : {0.1, 0.37, 0.5, 0.83, 0.99}) {
      const Complex r0 =
          dr.component0->value(0, t) - w * r.component0->value(0, t) -
          h0->value(0, t);
      const Complex r1 =
          dr.component1->value(0, t) - w * r.component1->value(0, t) -
          h1->value(0, t);
      CHECK(std::abs(r0) <= 1e-10);
      CHECK(std::abs(r1) <= 1e-10);
    }
    // The function component carries the Dirichlet-type boundary condition.
    CHECK(bk.trace(r.component0).norm() <= 1e-9);
  }

  CHECK_THROWS_AS(dirac_resolvent(bk, Complex(kPi, 0.0), h),
                  NearDirichletSpectrum);
  CHECK_THROWS_AS(dirac_resolvent(bk, Complex(1e-9, 0.0), h), EigenvalueAt);
}

TEST_CASE("defect projection: pinned value, idempotence, range and kernel") {
  GraphBackend bk(MetricGraph::interval());

  // P at w = i applied to (x, 0) is (sinh x, -i cosh x) / (2 sinh 1).
  auto x0 = smooth(
      bk, [](int, double t) { return Complex(t, 0.0); },
      [](int, double) { return Complex(1.0, 0.0); },
      [](int, double) { return Complex(0.0, 0.0); });
  const FormPair xpair{x0, bk.constant({0.0, 0.0})};
  const FormPair px = dirac_projection(bk, kI, xpair);
  const double s1 = std::sinh(1.0);
  for (double t : {0.0, 0.25, 0.6, 1.0}) {
    CHECK(std::abs(px.component0->value(0, t) -
                   Complex(0.5 * std::sinh(t) / s1, 0.0)) <= 1e-10);
    CHECK(std::abs(px.component1->value(0, t) -
                   Complex(0.0, -0.5 * std::cosh(t) / s1)) <= 1e-10);
  }

  for (Complex w : {kI, Complex(0.8, 0.6)}) {
    const FormPair f = smooth_pair(bk);
    const FormPair pf = dirac_projection(bk, w, f);
    const FormPair ppf = dirac_projection(bk, w, pf);
    CHECK(pair_distance(bk, pf, ppf) <= 1e-9);
    CHECK(dirac_defect_residual(bk, w, pf) <= 1e-9);

    Vector phi(2);
    phi << Complex(0.7, 0.1), Complex(-0.4, 0.5);
    // Fields at +w are fixed, fields at -w are annihilated.
    const FormPair plus = dirac_gamma_field(bk, w, phi);
    const FormPair minus = dirac_gamma_field(bk, -w, phi);
    const FormPair zero{bk.constant({0.0, 0.0}), bk.constant({0.0, 0.0})};
    CHECK(pair_distance(bk, dirac_projection(bk, w, plus), plus) <= 1e-9);
    CHECK(pair_distance(bk, dirac_projection(bk, w, minus), zero) <= 1e-9);
  }
}

TEST_CASE("graph-inner-product orthogonality of the defect decomposition") {
  GraphBackend bk(MetricGraph::interval());
  Vector phi(2), chi(2);
  phi << Complex(1.0, 0.0), Complex(-0.5, 0.2);
  chi << Complex(0.3, 0.4), Complex(1.0, 0.0);
  const FormPair plus = dirac_gamma_field(bk, kI, phi);
  const FormPair minus = dirac_gamma_field(bk, -kI, chi);
  const FormPair interior = minimal_pair(bk);

  const double np = form_norm(bk, plus);
  const double nm = form_norm(bk, minus);
  const double ni = form_norm(bk, interior);

  // Positive control: on an eigenpair at i the graph inner product doubles
  // the plain one.
  CHECK(std::abs(graph_inner(bk, plus, plus) -
                 2.0 * form_inner(bk, plus, plus)) <= 1e-10 * np * np);

  CHECK(std::abs(graph_inner(bk, plus, minus)) <= 1e-10 * (1.0 + np * nm));
  CHECK(std::abs(graph_inner(bk, plus, interior)) <= 1e-10 * (1.0 + np * ni));
  CHECK(std::abs(graph_inner(bk, minus, interior)) <= 1e-10 * (1.0 + nm * ni));
}

TEST_CASE("defect dimensions count boundary degrees of freedom") {
  GraphBackend interval(MetricGraph::interval());
  GraphBackend star(MetricGraph::star(3));
  for (Complex w : {kI, Complex(0.8, 0.3)}) {
    CHECK(dirac_defect_dimensions(interval, w) == std::make_pair(2, 2));
    CHECK(dirac_defect_dimensions(star, w) == std::make_pair(3, 3));
  }
}

TEST_CASE("stacked boundary maps of the defect bases have full rank") {
  GraphBackend interval(MetricGraph::interval());
  const BoundaryMetric mi = boundary_metric(interval);
  CHECK(dirac_boundary_map_rank(interval, mi, kI) == 4);
  CHECK(dirac_boundary_map_rank(interval, mi, Complex(0.9, 0.4)) == 4);

  GraphBackend star(MetricGraph::star(3));
  const BoundaryMetric ms = boundary_metric(star);
  CHECK(dirac_boundary_map_rank(star, ms, kI) == 6);
}
