#pragma once

// Finite target unions of arcs B(q theta mod 1, psi(q)) on the circle [0, 1),
// their exact measure, and pointwise hit counting.

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "cfomega/cf_core.hpp"
#include "cfomega/exact_sum.hpp"
#include "cfomega/sequences.hpp"

namespace cfomega {

inline constexpr double kDefaultDelta = 1e-15;

struct Arc {
  double l = 0.0;
  double r = 0.0;
  bool operator==(const Arc&) const = default;
};

/// Which arc to insert for a center known only up to its error bound.
enum class Bound {
  nominal,  ///< radius as given
  inner,    ///< radius shrunk by the certified error: contained in the true arc
  outer,    ///< radius grown by the certified error: contains the true arc
};

/// Disjoint half-open arcs [l, r) of [0, 1), sorted and merged whenever they
/// touch, so equal sets have identical arc lists. The measure is the exact
/// sum of r - l over the stored endpoints, rounded once.
class ArcUnion {
 public:
  /// Adds [l, r) with 0 <= l <= r <= 1; empty intervals are ignored.
  void insert(double l, double r);

  /// Adds the arc of the given radius around `center`, split at 0 when it
  /// wraps. A radius of at least 1/2 covers the circle.
  void insert_arc(double center, double radius);
  void insert_arc(const CirclePoint& center, double radius, Bound bound);

  bool contains(double x) const;
  std::vector<Arc> arcs() const;
  std::size_t size() const { return arcs_.size(); }
  double measure() const { return total_.value(); }

 private:
  std::map<double, double> arcs_;  // l -> r
  ExactSum total_;
};

/// Padding applied on top of a center's error bound for endpoint rounding.
double endpoint_slack(const CirclePoint& center);

/// q theta mod 1 for q = Q0..Q with certified errors.
std::vector<CirclePoint> orbit_points(const ThetaSpec& theta, std::uint64_t Q0, std::uint64_t Q,
                                      double delta = kDefaultDelta);

ArcUnion target_union(const ThetaSpec& theta, const PsiSpec& psi, std::uint64_t Q0, std::uint64_t Q,
                      double delta = kDefaultDelta, Bound bound = Bound::nominal);

/// Circle distance ||x - s||.
double circle_distance(double x, double s);

struct Hit {
  std::uint64_t q = 0;
  double distance = 0.0;
  double psi_q = 0.0;
  double margin = 0.0;  ///< psi(q) - distance
  bool certain = true;
};

/// `count` is the number of certain hits. Entries whose margin is within the
/// certified error are listed with certain = false and counted in
/// `uncertain`, never resolved.
struct HitReport {
  std::size_t count = 0;
  std::size_t uncertain = 0;
  std::vector<Hit> hits;
};

using RadiusFn = std::function<double(std::uint64_t)>;

/// Hits of s among precomputed points, points[i] being the orbit at Q0 + i.
HitReport hit_count(std::span<const CirclePoint> points, std::uint64_t Q0, const RadiusFn& radius, double s);

HitReport hit_count(const ThetaSpec& theta, const PsiSpec& psi, double s, std::uint64_t Q,
                    double delta = kDefaultDelta, std::uint64_t Q0 = 1);

struct ProfilePoint {
  std::uint64_t Q = 0;
  double inner = 0.0;
  double outer = 0.0;
  double union_bound = 0.0;  ///< sum of min(2 psi(q), 1) over [Q0, Q]
};

struct MeasureProfile {
  std::uint64_t Q0 = 0;
  std::vector<ProfilePoint> points;
};

/// Measures of the window [Q0, Q_j] for each checkpoint; checkpoints must be
/// strictly increasing and at least Q0.
MeasureProfile tail_measure_profile(const ThetaSpec& theta, const PsiSpec& psi, std::uint64_t Q0,
                                    std::span<const std::uint64_t> checkpoints, double delta = kDefaultDelta);

std::string profile_csv(const MeasureProfile& profile);
std::string hits_csv(const HitReport& report);

}  // namespace cfomega
