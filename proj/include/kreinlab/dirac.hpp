#pragma once

#include <utility>
#include <vector>

#include "kreinlab/boundary_ops.hpp"
#include "kreinlab/graph_backend.hpp"
#include "kreinlab/types.hpp"

namespace kreinlab {

/// First-order supersymmetric operator built from the derivative d and its
/// formal adjoint: D (f0, f1) = (-f1', f0') acting on pairs
/// (function, one-form).  Its square is the Laplacian acting diagonally, so
/// every boundary object here reduces to the second-order calculus at
/// z = w^2.
struct FormPair {
  GraphBackend::Function component0;  // function part
  GraphBackend::Function component1;  // one-form part
};

/// Signed endpoint trace of a one-form: -f(0) at a tail endpoint, +f(length)
/// at a head endpoint (the outward pairing that appears in the first-order
/// integration-by-parts identity).
Vector signed_form_trace(const GraphBackend& bk,
                         const GraphBackend::Function& f1);

/// (1/w) f' as a function with exact derivative data; the input must satisfy
/// (Lap - z) f = 0 with z = w^2.
GraphBackend::Function derivative_over(const GraphBackend& bk, Complex w,
                                       const GraphBackend::Function& f);

/// Unitary-normalized lift of a w^2-harmonic function into an eigenpair of
/// D at w: (1/sqrt 2) (f0, (1/w) f0').
FormPair psi_map(const GraphBackend& bk, Complex w,
                 const GraphBackend::Function& f0);

/// Gamma field of D at w: boundary data phi to the D-eigenpair whose
/// function part is the w^2-harmonic extension of phi.
FormPair dirac_gamma_field(const GraphBackend& bk, Complex w,
                           const Vector& phi);

/// D applied componentwise: (-f1', f0').
FormPair dirac_apply(const GraphBackend& bk, const FormPair& f);

/// a * f + b * g componentwise.
FormPair form_combine(const GraphBackend& bk, Complex a, const FormPair& f,
                      Complex b, const FormPair& g);

/// Inner product on pairs (sum over components, conjugate-linear first).
Complex form_inner(const GraphBackend& bk, const FormPair& f,
                   const FormPair& g);
double form_norm(const GraphBackend& bk, const FormPair& f);

/// Resolvent of the Dirichlet-type restriction of D (function traces pinned
/// to zero): (D_dir - w)^{-1} h computed as (D + w) applied to the diagonal
/// second-order resolvent at w^2, with the Dirichlet Laplacian on functions
/// and the Neumann-type Laplacian on one-forms.  The source components must
/// provide derivatives (used for the exact derivative data of the output).
FormPair dirac_resolvent(const GraphBackend& bk, Complex w, const FormPair& h);

/// Weyl family of D computed on the Dirac side: signed form traces of the
/// gamma field, renormalized by the boundary metric.  Coincides with
/// (1/w) q0(w^2).
Matrix dirac_q(const GraphBackend& bk, const BoundaryMetric& m, Complex w);

/// Spectral-type projection onto the eigenpair space of D at w, assembled
/// from the harmonic projections on functions and on one-forms:
///   (1/2) [[P0, (1/w) delta P1], [(1/w) d P0, P1]].
FormPair dirac_projection(const GraphBackend& bk, Complex w, const FormPair& f);

/// Residual of the first-order integration-by-parts identity
/// <D f, g> - <f, D g> = <trace f0, strace g1> - <strace f1, trace g0>.
Complex dirac_green_residual(const GraphBackend& bk, const FormPair& f,
                             const FormPair& g);

/// L2 norm of (D - w) f; vanishes on the range of the gamma field and of
/// the projection.
double dirac_defect_residual(const GraphBackend& bk, Complex w,
                             const FormPair& f);

/// Dimensions of the defect spaces of the minimal restriction at (w, conj w):
/// the count of free coefficients of the w^2-harmonic system once interior
/// matching rows are imposed (2E minus their rank); equal at both parameters.
std::pair<int, int> dirac_defect_dimensions(const GraphBackend& bk, Complex w);

/// Rank of the stacked boundary evaluation (trace, renormalized signed form
/// trace) over the defect basis at +/- w; full rank 2 * boundary_dim shows
/// the pair of boundary maps is jointly surjective.
int dirac_boundary_map_rank(const GraphBackend& bk, const BoundaryMetric& m,
                            Complex w);

}  // namespace kreinlab
