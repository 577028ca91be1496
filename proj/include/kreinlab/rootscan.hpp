#pragma once

#include <functional>
#include <vector>

#include "kreinlab/types.hpp"

namespace kreinlab {

/// Ball around a point that the scanner must stay away from (used for the
/// Dirichlet spectrum, where secular functions have poles).  Roots inside an
/// exclusion ball are never reported.
struct Exclusion {
  double center = 0.0;
  double radius = 0.0;
};

struct RootHit {
  double z = 0.0;
  int multiplicity = 1;  ///< nullity hint when a matrix evaluator is supplied
};

struct ScanOptions {
  double root_rel_tol = 1e-10;    ///< bracket width <= tol * (1 + |z|)
  double nullity_rel_tol = 1e-8;  ///< sigma cutoff relative to sigma_max
  int refine_fanout = 8;          ///< subdivision factor for candidate cells
  int max_refine_depth = 6;
};

/// Find real roots of f on the open window by derivative-free bracketing.
///
/// Detection is two-fold: every sign change on the (locally refined) grid is
/// bisected to tolerance, and — when a matrix evaluator m is supplied — local
/// minima of the smallest singular value of m(z) are driven down by
/// golden-section search and accepted as roots only if sigma_min ends up
/// below the nullity threshold.  The second detector is what catches roots of
/// even multiplicity, which produce no sign change.  No derivatives are ever
/// taken.
///
/// The multiplicity hint of each root is the nullity of m(root) when m is
/// given, else 1.  Throws ConfigError for bad windows/grids, for window
/// endpoints inside an exclusion ball, and when the grid is too coarse to
/// separate two exclusion balls.
std::vector<RootHit> scan_real_roots(
    const std::function<double(double)>& f, Window window,
    const std::vector<Exclusion>& exclusions, int grid,
    const std::function<Matrix(double)>& m = nullptr,
    const ScanOptions& options = ScanOptions{});

}  // namespace kreinlab
