#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kreinlab/graph_backend.hpp"
#include "kreinlab/model_config.hpp"
#include "kreinlab/report.hpp"

namespace kreinlab {

/// Random per-edge cubic-plus-trig probe with exact derivative and
/// Laplacian data.  It is smooth on every edge but satisfies no vertex
/// matching, so on graphs with interior vertices it is an L2 source, not an
/// element of the form domain.
GraphBackend::Function random_edge_smooth(const GraphBackend& bk, Rng& rng,
                                          int quadrature_hint = 48);

/// Random element of the operator domain: a zero-trace resolvent image plus
/// a harmonic extension of random boundary data.  Continuous with matched
/// fluxes at interior vertices, generic trace and normal flux at the
/// boundary, exact Laplacian data.
GraphBackend::Function random_domain_probe(const GraphBackend& bk, Rng& rng,
                                           int quadrature_hint = 48);

Vector random_boundary_data(int dim, Rng& rng);

/// Deliberate defect injected into a verification run, used to exercise the
/// failure paths end to end.  FlipFluxSign negates the outward normal flux
/// exactly where the identity checks consume it, so the integration-by-parts
/// check (and the flux reference checks) fail while unrelated checks pass.
enum class FaultInjection { None, FlipFluxSign };

/// Parses "none" / "flip-flux-sign"; anything else is a ConfigError.
FaultInjection parse_fault(const std::string& name);
std::string fault_name(FaultInjection fault);

struct VerifyOptions {
  FaultInjection fault = FaultInjection::None;
  /// Multiplies every check tolerance (set from the command line or the
  /// KREINLAB_TOL_SCALE environment variable).
  double tolerance_scale = 1.0;
  /// Number of random probe pairs per sampling-based check.
  int random_pairs = 16;
  std::uint64_t seed = 0x6b7265696e6c6162ULL;
};

/// Runs the named check suite for the model the config describes:
/// continuum models get the boundary-calculus checks (plus the first-order
/// suite when the model is a single interval); discrete models get the
/// finite-dimensional exactness checks.  Failures are data, not exceptions:
/// every check always produces a CheckResult.
std::vector<CheckResult> verify_model(const ModelConfig& config,
                                      const VerifyOptions& options);

/// The first-order subset alone (single-interval models only; the caller
/// must enforce the scope rule).
std::vector<CheckResult> first_order_checks(const ModelConfig& config,
                                            const VerifyOptions& options);

}  // namespace kreinlab
