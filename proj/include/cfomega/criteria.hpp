#pragma once

// Decision functionals on the convergent denominators q_k, evaluated at a
// finite depth K. limsup values are estimated by window maxima over
// k in [ceil(rho K), K]; every verdict is evidence at truncation only.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cfomega/cf_core.hpp"
#include "cfomega/error.hpp"
#include "cfomega/sequences.hpp"

namespace cfomega {

/// Sum of the floor(alpha) largest entries; the full sum once floor(alpha)
/// reaches the length. Entries are added largest first.
template <class T>
T sum_largest(std::span<const T> values, double alpha) {
  if (!(alpha >= 0.0)) throw Error(Errc::domain_error, "alpha must be nonnegative");
  for (const auto& x : values) {
    if (x < T(0)) throw Error(Errc::domain_error, "entries must be nonnegative");
  }
  const std::size_t n = values.size();
  const double m_real = std::floor(alpha);
  const std::size_t m = m_real >= static_cast<double>(n) ? n : static_cast<std::size_t>(m_real);
  std::vector<T> v(values.begin(), values.end());
  std::partial_sort(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(m), v.end(), std::greater<T>{});
  T total = T(0);
  for (std::size_t i = 0; i < m; ++i) total += v[i];
  return total;
}

enum class Verdict { holds, fails, inconclusive };
enum class OmegaVerdict { in_omega, not_in_omega, inconclusive };

std::string_view to_string(Verdict v);
std::string_view to_string(OmegaVerdict v);

struct WindowConfig {
  double fraction = 0.5;         ///< rho: window is [ceil(rho K), K]
  double stability_gap = 0.05;
  double growth_factor = 1.25;   ///< trailing/leading ratio read as growth
  double divergence_slope = 0.05;
};

/// Window summary of a k-indexed series. The window [lo, hi] splits into a
/// leading half [lo, mid) and a trailing half [mid, hi]; `stable` means the
/// window maximum is attained, within the gap, in the trailing half.
struct WindowStats {
  std::size_t lo = 0;
  std::size_t mid = 0;
  std::size_t hi = 0;
  std::size_t count = 0;
  double max = NAN;
  double min = NAN;
  double leading_max = NAN;
  double trailing_max = NAN;
  bool stable = false;
};

WindowStats window_stats(std::span<const std::optional<double>> series, std::size_t K,
                         const WindowConfig& cfg);

struct CriterionEntry {
  std::string name;
  std::string statistic;
  std::vector<std::optional<double>> series;  ///< indexed by k, null where undefined
  WindowStats window;
  double estimate = NAN;                      ///< window-limsup estimate (window max)
  Verdict verdict = Verdict::inconclusive;
  std::optional<double> eps;
  std::optional<OmegaVerdict> implies;        ///< conclusion when the condition holds
};

/// First k >= 2 with q_k >= 3, where ln ln q_k > 0.
std::size_t first_admissible_index(const ConvergentTable& table);

/// (1/ln q_k) * sum of the floor(eps ln q_k / ln ln q_k) largest of
/// ln(q_{i+1}/q_i), i < k. Exactly 1 once that count reaches k.
double condition_b_statistic(const ConvergentTable& table, double eps, std::size_t k);

std::vector<double> default_eps_grid();

struct ConditionBReport {
  std::vector<CriterionEntry> per_eps;
  Verdict verdict = Verdict::inconclusive;
  std::size_t first_admissible = 0;
};

/// Requires a nonempty, decreasing grid of positive eps and at least ten
/// admissible indices.
ConditionBReport condition_b_report(const ConvergentTable& table, std::span<const double> eps_grid,
                                    const WindowConfig& cfg = {});

struct KimOptions {
  std::optional<std::size_t> start;  ///< first summed index; default: first k with phi(q_k) >= 1
  double window_fraction = 0.5;
  double tail_fraction = 0.1;
  double divergence_slope = 0.05;
};

/// Terms (ln phi(q_k) min ln(q_{k+1}/q_k)) / phi(q_k) and their partial sums.
/// `slope` fits partial sums against ln k over the window; it is a heuristic
/// signal of divergence, not a proof.
struct KimSeriesTrace {
  std::size_t start = 0;
  std::size_t last = 0;
  std::vector<std::optional<double>> terms;
  std::vector<std::optional<double>> partial_sums;
  double slope = 0.0;
  double window_increment = 0.0;  ///< S_K - S_{ceil(rho K) - 1}
  double cauchy_tail = 0.0;       ///< S_K - S_{ceil((1 - tail_fraction) K) - 1}
  bool divergence_evidence = false;
};

KimSeriesTrace kim_series(const ConvergentTable& table, const PhiSpec& phi, std::size_t K,
                          const KimOptions& opts = {});

struct CriterionReport {
  std::size_t depth = 0;
  WindowConfig config;
  std::vector<CriterionEntry> entries;
  OmegaVerdict omega = OmegaVerdict::inconclusive;
  bool conflict = false;  ///< a membership and a non-membership condition both hold
};

/// Five growth statistics of q_k with verdicts; membership is decided by any
/// holding sufficient condition, with conflicts reported as inconclusive.
CriterionReport classify(const ConvergentTable& table, const WindowConfig& cfg = {});

}  // namespace cfomega
