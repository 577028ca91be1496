#include "kreinlab/rootscan.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>

#include "kreinlab/errors.hpp"
#include "kreinlab/linalg.hpp"

namespace kreinlab {

namespace {

struct Segment {
  double lo, hi;
};

struct SigmaPair {
  double min = std::numeric_limits<double>::quiet_NaN();
  double max = 0.0;
};

SigmaPair sigma_extremes(const std::function<Matrix(double)>& m, double z) {
  const Matrix mat = m(z);
  Eigen::JacobiSVD<Matrix> svd(mat);
  SigmaPair out;
  const auto& sv = svd.singularValues();
  if (sv.size() > 0) {
    out.max = sv[0];
    out.min = sv[sv.size() - 1];
  }
  return out;
}

class Scanner {
 public:
  Scanner(const std::function<double(double)>& f,
          const std::function<Matrix(double)>& m, const ScanOptions& opt)
      : f_(f), m_(m), opt_(opt) {}

  std::vector<double> roots;

  void scan_segment(double lo, double hi, int points) {
    std::vector<double> xs(points), fv(points), sv(points, 0.0);
    for (int i = 0; i < points; ++i) {
      xs[i] = (i == points - 1) ? hi : lo + (hi - lo) * i / double(points - 1);
      fv[i] = f_(xs[i]);
      if (m_) {
        const SigmaPair sig = sigma_extremes(m_, xs[i]);
        sv[i] = sig.min;
        sigma_samples_.push_back(sig.max);
      }
    }
    process_points(xs, fv);
    if (!m_) return;
    for (int i = 0; i < points; ++i) {
      const bool left_ok = i == 0 || sv[i] <= sv[i - 1];
      const bool right_ok = i + 1 >= points || sv[i] <= sv[i + 1];
      if (left_ok && right_ok)
        refine_dip(xs[std::max(i - 1, 0)], xs[std::min(i + 1, points - 1)], 0);
    }
  }

  /// Robust magnitude of the matrix family over the window, immune to pole
  /// blowups near excluded points: the median of the observed sigma_max.
  double matrix_scale() const {
    if (sigma_samples_.empty()) return 0.0;
    std::vector<double> tmp = sigma_samples_;
    const size_t mid = tmp.size() / 2;
    std::nth_element(tmp.begin(), tmp.begin() + mid, tmp.end());
    return tmp[mid];
  }

 private:
  double tol_at(double z) const { return opt_.root_rel_tol * (1.0 + std::abs(z)); }

  // Record exact zeros at sample points and bisect every sign change; when an
  // endpoint is an exact zero, the cell is re-examined from a nudged endpoint
  // so that a second root hiding in the same cell is still seen.
  void process_points(const std::vector<double>& xs,
                      const std::vector<double>& fv) {
    const int n = static_cast<int>(xs.size());
    for (int i = 0; i < n; ++i)
      if (fv[i] == 0.0) roots.push_back(xs[i]);
    for (int i = 0; i + 1 < n; ++i) {
      double a = xs[i], b = xs[i + 1];
      double fa = fv[i], fb = fv[i + 1];
      const double nudge = 1e-3 * (b - a);
      if (fa == 0.0) {
        a += nudge;
        fa = f_(a);
      }
      if (fb == 0.0) {
        b -= nudge;
        fb = f_(b);
      }
      if (fa == 0.0 || fb == 0.0) continue;  // flat around the zero
      if (std::signbit(fa) != std::signbit(fb)) roots.push_back(bisect(a, b, fa));
    }
  }

  double bisect(double a, double b, double fa) {
    for (int iter = 0; iter < 200; ++iter) {
      const double mid = 0.5 * (a + b);
      if (b - a <= tol_at(mid)) return mid;
      const double fm = f_(mid);
      if (fm == 0.0) return mid;
      if (std::signbit(fm) == std::signbit(fa)) {
        a = mid;
        fa = fm;
      } else {
        b = mid;
      }
    }
    return 0.5 * (a + b);
  }

  // A cell whose sigma_min dips without a sign change: subdivide and look
  // again; at the bottom, golden-section the dip and accept as a root only if
  // the smallest singular value really reaches the nullity threshold.  This
  // is the detector for roots of even multiplicity.
  void refine_dip(double lo, double hi, int depth) {
    const int n = opt_.refine_fanout + 1;
    std::vector<double> xs(n), fv(n), sv(n);
    for (int i = 0; i < n; ++i) {
      xs[i] = (i == n - 1) ? hi : lo + (hi - lo) * i / double(n - 1);
      fv[i] = f_(xs[i]);
      sv[i] = sigma_extremes(m_, xs[i]).min;
    }
    const size_t before = roots.size();
    process_points(xs, fv);
    if (roots.size() > before) return;

    int argmin = 0;
    for (int i = 1; i < n; ++i)
      if (sv[i] < sv[argmin]) argmin = i;
    const double a = xs[std::max(argmin - 1, 0)];
    const double b = xs[std::min(argmin + 1, n - 1)];
    if (depth < opt_.max_refine_depth && (b - a) > tol_at(0.5 * (a + b))) {
      refine_dip(a, b, depth + 1);
      return;
    }
    golden_accept(a, b);
  }

  void golden_accept(double a, double b) {
    const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double s1 = sigma_extremes(m_, x1).min;
    double s2 = sigma_extremes(m_, x2).min;
    while (b - a > tol_at(0.5 * (a + b))) {
      if (s1 <= s2) {
        b = x2;
        x2 = x1;
        s2 = s1;
        x1 = b - inv_phi * (b - a);
        s1 = sigma_extremes(m_, x1).min;
      } else {
        a = x1;
        x1 = x2;
        s1 = s2;
        x2 = a + inv_phi * (b - a);
        s2 = sigma_extremes(m_, x2).min;
      }
    }
    const double z = 0.5 * (a + b);
    const SigmaPair sig = sigma_extremes(m_, z);
    // Accept against the window-level scale: the local sigma_max collapses
    // when the whole matrix vanishes at the root, and it blows up next to
    // poles where small sigma_min dips are not roots.
    const double scale = matrix_scale();
    if (scale > 0.0 && sig.min <= opt_.nullity_rel_tol * scale)
      roots.push_back(z);
  }

  const std::function<double(double)>& f_;
  const std::function<Matrix(double)>& m_;
  const ScanOptions& opt_;
  std::vector<double> sigma_samples_;
};

}  // namespace

std::vector<RootHit> scan_real_roots(const std::function<double(double)>& f,
                                     Window window,
                                     const std::vector<Exclusion>& exclusions,
                                     int grid,
                                     const std::function<Matrix(double)>& m,
                                     const ScanOptions& options) {
  if (!f) throw ConfigError("scan_real_roots: no function supplied");
  if (!(window.lo < window.hi))
    throw ConfigError("scan_real_roots: window must satisfy lo < hi");
  if (grid < 2) throw ConfigError("scan_real_roots: grid must be >= 2");

  // Normalize exclusions: sort, merge overlaps, check the window endpoints.
  std::vector<Exclusion> balls;
  for (const auto& e : exclusions) {
    if (e.radius < 0.0)
      throw ConfigError("scan_real_roots: negative exclusion radius");
    if (e.center + e.radius <= window.lo || e.center - e.radius >= window.hi)
      continue;
    balls.push_back(e);
  }
  std::sort(balls.begin(), balls.end(), [](const Exclusion& a, const Exclusion& b) {
    return a.center < b.center;
  });
  std::vector<std::pair<double, double>> holes;
  for (const auto& e : balls) {
    const double lo = e.center - e.radius;
    const double hi = e.center + e.radius;
    if (!holes.empty() && lo <= holes.back().second)
      holes.back().second = std::max(holes.back().second, hi);
    else
      holes.emplace_back(lo, hi);
  }
  for (const auto& h : holes)
    if ((window.lo > h.first && window.lo < h.second) ||
        (window.hi > h.first && window.hi < h.second))
      throw ConfigError("scan_real_roots: window endpoint inside an exclusion ball");

  // Segments stop a small fraction of the ball radius inside each exclusion
  // edge, so grid points can never land inside a ball through rounding.
  const double step = window.width() / grid;
  std::vector<Segment> segments;
  double cursor = window.lo;
  for (const auto& h : holes) {
    const double slack = 1e-3 * 0.5 * (h.second - h.first);
    if (h.first - slack > cursor)
      segments.push_back({cursor, h.first - slack});
    cursor = std::max(cursor, h.second + slack);
  }
  if (cursor < window.hi) segments.push_back({cursor, window.hi});

  // Gaps between consecutive exclusion balls must be resolvable by the grid.
  for (size_t i = 0; i + 1 < holes.size(); ++i) {
    const double gap = holes[i + 1].first - holes[i].second;
    if (gap > 0.0 && step > gap)
      throw ConfigError(
          "scan_real_roots: grid too coarse to separate exclusion windows");
  }

  Scanner scanner(f, m, options);
  for (const auto& seg : segments) {
    const int pts =
        std::max(8, static_cast<int>(std::ceil((seg.hi - seg.lo) / step))) + 1;
    scanner.scan_segment(seg.lo, seg.hi, pts);
  }

  // Drop anything inside an exclusion ball, dedupe, sort, attach nullities.
  std::vector<double> zs;
  for (double z : scanner.roots) {
    bool excluded = false;
    for (const auto& h : holes)
      if (z > h.first && z < h.second) excluded = true;
    if (!excluded && z > window.lo && z < window.hi) zs.push_back(z);
  }
  std::sort(zs.begin(), zs.end());
  std::vector<RootHit> out;
  const double scale = scanner.matrix_scale();
  for (double z : zs) {
    if (!out.empty() && std::abs(z - out.back().z) <= 1e-7 * (1.0 + std::abs(z)))
      continue;
    RootHit hit;
    hit.z = z;
    if (m) {
      const Matrix mat = m(z);
      Eigen::JacobiSVD<Matrix> svd(mat);
      const auto& sv = svd.singularValues();
      const double cut =
          options.nullity_rel_tol * std::max(sv.size() ? sv[0] : 0.0, scale);
      int nullity = 0;
      for (int i = 0; i < sv.size(); ++i)
        if (sv[i] <= cut) ++nullity;
      hit.multiplicity = std::max(1, nullity);
    }
    out.push_back(hit);
  }
  return out;
}

}  // namespace kreinlab
