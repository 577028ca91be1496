#include "kreinlab/dirac.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <memory>

#include "kreinlab/errors.hpp"
#include "kreinlab/graph_function.hpp"
#include "kreinlab/vertex_system.hpp"

namespace kreinlab {

namespace {

using Fn = GraphBackend::Function;

Fn make_field(const GraphBackend& bk, SmoothFunction::Field value,
              SmoothFunction::Field derivative, SmoothFunction::Field lap,
              int hint) {
  return std::make_shared<SmoothFunction>(bk.graph_ptr(), std::move(value),
                                          std::move(derivative),
                                          std::move(lap), hint);
}

}  // namespace

Vector signed_form_trace(const GraphBackend& bk, const Fn& f1) {
  const MetricGraph& g = bk.graph();
  Vector out = Vector::Zero(bk.boundary_dim());
  for (int i = 0; i < bk.boundary_dim(); ++i) {
    const int v = g.boundary()[i];
    for (const Incidence& inc : g.incidences(v)) {
      if (inc.at_head)
        out(i) += f1->value(inc.edge, g.edge(inc.edge).length);
      else
        out(i) -= f1->value(inc.edge, 0.0);
    }
  }
  return out;
}

Fn derivative_over(const GraphBackend& bk, Complex w, const Fn& f) {
  if (w == Complex(0.0, 0.0))
    throw ContractError("derivative_over: parameter must be nonzero");
  const Complex inv = Complex(1.0, 0.0) / w;
  auto src = f;
  return make_field(
      bk, [src, inv](int e, double t) { return inv * src->derivative(e, t); },
      // f'' = -Lap f = -w^2 f for harmonic input.
      [src, inv](int e, double t) { return -inv * src->laplacian(e, t); },
      [src, w](int e, double t) { return w * src->derivative(e, t); },
      f->quadrature_hint());
}

FormPair psi_map(const GraphBackend& bk, Complex w, const Fn& f0) {
  const Complex half{1.0 / std::sqrt(2.0), 0.0};
  return {bk.combine({{half, f0}}),
          bk.combine({{half, derivative_over(bk, w, f0)}})};
}

FormPair dirac_gamma_field(const GraphBackend& bk, Complex w,
                           const Vector& phi) {
  auto u = bk.harmonic(w * w, phi);
  auto form = derivative_over(bk, w, u);
  return {std::move(u), std::move(form)};
}

FormPair dirac_apply(const GraphBackend& bk, const FormPair& f) {
  auto f0 = f.component0;
  auto f1 = f.component1;
  const int hint =
      std::max(f0->quadrature_hint(), f1->quadrature_hint());
  // (D f)_0 = -f1', with derivative -f1'' = Lap f1.
  Fn out0 = make_field(
      bk, [f1](int e, double t) { return -f1->derivative(e, t); },
      [f1](int e, double t) { return f1->laplacian(e, t); },
      SmoothFunction::Field{}, hint);
  // (D f)_1 = f0', with derivative f0'' = -Lap f0.
  Fn out1 = make_field(
      bk, [f0](int e, double t) { return f0->derivative(e, t); },
      [f0](int e, double t) { return -f0->laplacian(e, t); },
      SmoothFunction::Field{}, hint);
  return {std::move(out0), std::move(out1)};
}

FormPair form_combine(const GraphBackend& bk, Complex a, const FormPair& f,
                      Complex b, const FormPair& g) {
  return {bk.combine({{a, f.component0}, {b, g.component0}}),
          bk.combine({{a, f.component1}, {b, g.component1}})};
}

Complex form_inner(const GraphBackend& bk, const FormPair& f,
                   const FormPair& g) {
  return bk.inner(f.component0, g.component0) +
         bk.inner(f.component1, g.component1);
}

double form_norm(const GraphBackend& bk, const FormPair& f) {
  return std::sqrt(std::max(0.0, form_inner(bk, f, f).real()));
}

FormPair dirac_resolvent(const GraphBackend& bk, Complex w,
                         const FormPair& h) {
  const Complex z = w * w;
  const int n = bk.boundary_dim();
  auto u0 = bk.resolvent(z, h.component0);
  auto u1 = bk.robin_resolve(z, Matrix::Zero(n, n), h.component1);
  auto h0 = h.component0;
  auto h1 = h.component1;
  const int hint = std::max(u0->quadrature_hint(), u1->quadrature_hint());

  // First component -u1' + w u0; second u0' + w u1.  Derivatives close
  // through the stored sources, laplacians additionally need the sources'
  // derivatives.
  Fn out0 = make_field(
      bk,
      [u0, u1, w](int e, double t) {
        return -u1->derivative(e, t) + w * u0->value(e, t);
      },
      [u0, u1, w](int e, double t) {
        return u1->laplacian(e, t) + w * u0->derivative(e, t);
      },
      [u0, u1, h0, h1, w, z](int e, double t) {
        const Complex comp0 = -u1->derivative(e, t) + w * u0->value(e, t);
        return z * comp0 + w * h0->value(e, t) - h1->derivative(e, t);
      },
      hint);
  Fn out1 = make_field(
      bk,
      [u0, u1, w](int e, double t) {
        return u0->derivative(e, t) + w * u1->value(e, t);
      },
      [u0, u1, w](int e, double t) {
        return -u0->laplacian(e, t) + w * u1->derivative(e, t);
      },
      [u0, u1, h0, h1, w, z](int e, double t) {
        const Complex comp1 = u0->derivative(e, t) + w * u1->value(e, t);
        return z * comp1 + h0->derivative(e, t) + w * h1->value(e, t);
      },
      hint);
  return {std::move(out0), std::move(out1)};
}

Matrix dirac_q(const GraphBackend& bk, const BoundaryMetric& m, Complex w) {
  const int n = bk.boundary_dim();
  Matrix raw(n, n);
  for (int j = 0; j < n; ++j) {
    Vector e = Vector::Zero(n);
    e(j) = Complex(1.0, 0.0);
    const FormPair f = dirac_gamma_field(bk, w, e);
    raw.col(j) = signed_form_trace(bk, f.component1);
  }
  return m.inverse * raw;
}

FormPair dirac_projection(const GraphBackend& bk, Complex w,
                          const FormPair& f) {
  const Complex z = w * w;
  const int n = bk.boundary_dim();
  auto p0 = harmonic_projection(bk, z, f.component0);
  // Projection on one-forms: subtract the Neumann-type resolvent image.
  auto image1 = bk.operator_image(z, f.component1);
  auto r1 = bk.robin_resolve(z, Matrix::Zero(n, n), image1);
  auto p1 = bk.combine(
      {{Complex(1.0, 0.0), f.component1}, {Complex(-1.0, 0.0), r1}});

  const Complex half{0.5, 0.0};
  return {bk.combine({{half, p0}, {-half, derivative_over(bk, w, p1)}}),
          bk.combine({{half, derivative_over(bk, w, p0)}, {half, p1}})};
}

Complex dirac_green_residual(const GraphBackend& bk, const FormPair& f,
                             const FormPair& g) {
  const FormPair df = dirac_apply(bk, f);
  const FormPair dg = dirac_apply(bk, g);
  const Complex lhs = form_inner(bk, df, g) - form_inner(bk, f, dg);
  const Vector tf0 = bk.trace(f.component0);
  const Vector tg0 = bk.trace(g.component0);
  const Vector sf1 = signed_form_trace(bk, f.component1);
  const Vector sg1 = signed_form_trace(bk, g.component1);
  const Complex rhs =
      (tf0.adjoint() * sg1).value() - (sf1.adjoint() * tg0).value();
  return lhs - rhs;
}

double dirac_defect_residual(const GraphBackend& bk, Complex w,
                             const FormPair& f) {
  const FormPair df = dirac_apply(bk, f);
  const FormPair resid = form_combine(bk, {1.0, 0.0}, df, -w, f);
  return form_norm(bk, resid);
}

std::pair<int, int> dirac_defect_dimensions(const GraphBackend& bk,
                                            Complex w) {
  const MetricGraph& g = bk.graph();
  const Matrix full = assemble_vertex_system(
                          g, w * w,
                          BoundaryData::dirichlet_data(
                              Vector::Zero(g.boundary_dim())))
                          .a;
  // Row blocks follow vertex order, one row per incidence; collect the rows
  // of interior vertices (continuity and flux balance).
  std::vector<int> interior_rows;
  int row = 0;
  for (int v = 0; v < g.vertex_count(); ++v) {
    for (int k = 0; k < g.degree(v); ++k, ++row)
      if (!g.is_boundary(v)) interior_rows.push_back(row);
  }
  int rank = 0;
  if (!interior_rows.empty()) {
    Matrix sub(interior_rows.size(), full.cols());
    for (size_t i = 0; i < interior_rows.size(); ++i)
      sub.row(i) = full.row(interior_rows[i]);
    Eigen::JacobiSVD<Matrix> svd(sub);
    const auto& sv = svd.singularValues();
    for (int i = 0; i < sv.size(); ++i)
      if (sv(i) > 1e-10 * sv(0)) ++rank;
  }
  const int defect = 2 * g.edge_count() - rank;
  return {defect, defect};
}

int dirac_boundary_map_rank(const GraphBackend& bk, const BoundaryMetric& m,
                            Complex w) {
  const int n = bk.boundary_dim();
  Matrix stacked(2 * n, 2 * n);
  int col = 0;
  for (Complex s : {w, -w}) {
    for (int j = 0; j < n; ++j, ++col) {
      Vector e = Vector::Zero(n);
      e(j) = Complex(1.0, 0.0);
      const FormPair f = dirac_gamma_field(bk, s, e);
      stacked.block(0, col, n, 1) = bk.trace(f.component0);
      stacked.block(n, col, n, 1) =
          m.inverse * signed_form_trace(bk, f.component1);
    }
  }
  Eigen::JacobiSVD<Matrix> svd(stacked);
  const auto& sv = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > 1e-10 * sv(0)) ++rank;
  return rank;
}

}  // namespace kreinlab
