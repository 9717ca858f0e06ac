#include "cfomega/orbit_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cfomega/error.hpp"
#include "cfomega/format.hpp"

namespace cfomega {

namespace {

constexpr double kUlp = std::numeric_limits<double>::epsilon() / 2.0;  // 2^-53

}  // namespace

void ArcUnion::insert(double l, double r) {
  if (!(l >= 0.0 && r <= 1.0 && l <= r)) {
    throw Error(Errc::domain_error, "arc endpoints must satisfy 0 <= l <= r <= 1");
  }
  if (l == r) return;

  // First arc that could touch [l, r): the last one starting at or before l.
  auto it = arcs_.upper_bound(l);
  if (it != arcs_.begin()) {
    auto prev = std::prev(it);
    if (prev->second >= l) it = prev;
  }
  while (it != arcs_.end() && it->first <= r) {
    l = std::min(l, it->first);
    r = std::max(r, it->second);
    total_.add(it->first);
    total_.add(-it->second);
    it = arcs_.erase(it);
  }
  arcs_.emplace(l, r);
  total_.add(r);
  total_.add(-l);
}

void ArcUnion::insert_arc(double center, double radius) {
  if (!(radius >= 0.0)) throw Error(Errc::domain_error, "radius must be nonnegative");
  if (radius >= 0.5) {
    insert(0.0, 1.0);
    return;
  }
  if (radius == 0.0) return;
  const double l = center - radius;
  const double r = center + radius;
  if (l < 0.0) {
    insert(0.0, r);
    insert(std::min(l + 1.0, 1.0), 1.0);
  } else if (r > 1.0) {
    insert(l, 1.0);
    insert(0.0, r - 1.0);
  } else {
    insert(l, r);
  }
}

void ArcUnion::insert_arc(const CirclePoint& center, double radius, Bound bound) {
  switch (bound) {
    case Bound::nominal:
      insert_arc(center.value, radius);
      return;
    case Bound::inner: {
      const double shrunk = radius - endpoint_slack(center);
      if (shrunk > 0.0) insert_arc(center.value, shrunk);
      return;
    }
    case Bound::outer:
      insert_arc(center.value, radius + endpoint_slack(center));
      return;
  }
}

bool ArcUnion::contains(double x) const {
  auto it = arcs_.upper_bound(x);
  if (it == arcs_.begin()) return false;
  --it;
  return x < it->second;
}

std::vector<Arc> ArcUnion::arcs() const {
  std::vector<Arc> out;
  out.reserve(arcs_.size());
  for (const auto& [l, r] : arcs_) out.push_back({l, r});
  return out;
}

double endpoint_slack(const CirclePoint& center) { return center.error_bound + 4.0 * kUlp; }

std::vector<CirclePoint> orbit_points(const ThetaSpec& theta, std::uint64_t Q0, std::uint64_t Q, double delta) {
  if (Q0 < 1 || Q < Q0) throw Error(Errc::domain_error, "window needs 1 <= Q0 <= Q");
  const ConvergentTable table = table_for_precision(theta, Q, delta);
  std::vector<CirclePoint> points;
  points.reserve(Q - Q0 + 1);
  for (std::uint64_t q = Q0; q <= Q; ++q) points.push_back(frac_multiple(table, q, delta));
  return points;
}

ArcUnion target_union(const ThetaSpec& theta, const PsiSpec& psi, std::uint64_t Q0, std::uint64_t Q,
                      double delta, Bound bound) {
  const auto points = orbit_points(theta, Q0, Q, delta);
  ArcUnion u;
  for (std::uint64_t i = 0; i < points.size(); ++i) u.insert_arc(points[i], psi(Q0 + i), bound);
  return u;
}

double circle_distance(double x, double s) {
  const double d = std::fabs(x - s);
  return std::min(d, 1.0 - d);
}

HitReport hit_count(std::span<const CirclePoint> points, std::uint64_t Q0, const RadiusFn& radius, double s) {
  HitReport report;
  for (std::uint64_t i = 0; i < points.size(); ++i) {
    const std::uint64_t q = Q0 + i;
    const double r = radius(q);
    const double d = circle_distance(points[i].value, s);
    const double margin = r - d;
    const bool certain = std::fabs(margin) > endpoint_slack(points[i]);
    if (!certain) {
      ++report.uncertain;
      report.hits.push_back({q, d, r, margin, false});
    } else if (margin > 0.0) {
      ++report.count;
      report.hits.push_back({q, d, r, margin, true});
    }
  }
  return report;
}

HitReport hit_count(const ThetaSpec& theta, const PsiSpec& psi, double s, std::uint64_t Q, double delta,
                    std::uint64_t Q0) {
  const auto points = orbit_points(theta, Q0, Q, delta);
  return hit_count(points, Q0, [&psi](std::uint64_t q) { return psi(q); }, s);
}

MeasureProfile tail_measure_profile(const ThetaSpec& theta, const PsiSpec& psi, std::uint64_t Q0,
                                    std::span<const std::uint64_t> checkpoints, double delta) {
  if (checkpoints.empty()) throw Error(Errc::domain_error, "no checkpoints");
  for (std::size_t j = 0; j < checkpoints.size(); ++j) {
    if (checkpoints[j] < Q0 || (j > 0 && checkpoints[j] <= checkpoints[j - 1])) {
      throw Error(Errc::domain_error, "checkpoints must increase and be at least Q0");
    }
  }
  const auto points = orbit_points(theta, Q0, checkpoints.back(), delta);
  MeasureProfile profile;
  profile.Q0 = Q0;
  ArcUnion inner, outer;
  ExactSum bound;
  std::size_t next = 0;
  for (std::uint64_t i = 0; i < points.size(); ++i) {
    const std::uint64_t q = Q0 + i;
    const double r = psi(q);
    inner.insert_arc(points[i], r, Bound::inner);
    outer.insert_arc(points[i], r, Bound::outer);
    bound.add(std::min(2.0 * r, 1.0));
    if (q == checkpoints[next]) {
      profile.points.push_back({q, inner.measure(), outer.measure(), bound.value()});
      ++next;
    }
  }
  return profile;
}

std::string profile_csv(const MeasureProfile& profile) {
  std::string out = "Q,inner_measure,outer_measure,union_bound\n";
  for (const auto& p : profile.points) {
    out += std::to_string(p.Q) + ',' + format_double(p.inner) + ',' + format_double(p.outer) + ',' +
           format_double(p.union_bound) + '\n';
  }
  return out;
}

std::string hits_csv(const HitReport& report) {
  std::string out = "q,distance,psi_q,margin,certain\n";
  for (const auto& h : report.hits) {
    out += std::to_string(h.q) + ',' + format_double(h.distance) + ',' + format_double(h.psi_q) + ',' +
           format_double(h.margin) + ',' + (h.certain ? "true" : "false") + '\n';
  }
  return out;
}

}  // namespace cfomega
