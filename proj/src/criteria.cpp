#include "cfomega/criteria.hpp"

#include <limits>
#include <string>

namespace cfomega {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double scale(double x) { return std::max(1.0, std::fabs(x)); }

bool flat(const WindowStats& w, const WindowConfig& cfg) {
  return w.trailing_max <= w.leading_max + cfg.stability_gap * scale(w.leading_max);
}

bool growing(const WindowStats& w, const WindowConfig& cfg) {
  if (std::isinf(w.trailing_max)) return !std::isinf(w.leading_max);
  return w.trailing_max >= cfg.growth_factor * w.leading_max &&
         w.trailing_max - w.leading_max > cfg.stability_gap * scale(w.leading_max);
}

bool halves_defined(const WindowStats& w) {
  return !std::isnan(w.leading_max) && !std::isnan(w.trailing_max);
}

// limsup < infinity
Verdict bounded_verdict(const WindowStats& w, const WindowConfig& cfg) {
  if (!halves_defined(w)) return Verdict::inconclusive;
  if (std::isinf(w.max)) return Verdict::fails;
  if (flat(w, cfg)) return Verdict::holds;
  if (growing(w, cfg)) return Verdict::fails;
  return Verdict::inconclusive;
}

// limsup = infinity
Verdict unbounded_verdict(const WindowStats& w, const WindowConfig& cfg) {
  if (!halves_defined(w)) return Verdict::inconclusive;
  if (std::isinf(w.leading_max) && std::isinf(w.trailing_max)) return Verdict::holds;
  if (growing(w, cfg)) return Verdict::holds;
  if (flat(w, cfg)) return Verdict::fails;
  return Verdict::inconclusive;
}

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() < 2) return 0.0;
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

// Slope of a series against ln k over k in [lo, hi], k >= 1.
double slope_vs_log_k(std::span<const std::optional<double>> series, std::size_t lo, std::size_t hi) {
  std::vector<double> x, y;
  for (std::size_t k = std::max<std::size_t>(lo, 1); k <= hi && k < series.size(); ++k) {
    if (!series[k]) continue;
    x.push_back(std::log(static_cast<double>(k)));
    y.push_back(*series[k]);
  }
  return ls_slope(x, y);
}

// Last defined value at an index < k, or 0 when none.
double value_before(std::span<const std::optional<double>> series, std::size_t k) {
  for (std::size_t j = std::min(k, series.size()); j-- > 0;) {
    if (series[j]) return *series[j];
  }
  return 0.0;
}

std::size_t window_start(double fraction, std::size_t K) {
  return static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(K)));
}

void check_telescoping(const ConvergentTable& table) {
  double total = 0.0;
  for (double r : table.log_ratios()) total += r;
  const double lq = table.log_q(table.depth());
  if (std::fabs(total - lq) > 1e-9 * scale(lq)) {
    throw Error(Errc::domain_error, "log ratios do not telescope to ln q_K");
  }
}

CriterionEntry make_entry(std::string name, std::string statistic, std::vector<std::optional<double>> series,
                          std::size_t K, const WindowConfig& cfg) {
  CriterionEntry e;
  e.name = std::move(name);
  e.statistic = std::move(statistic);
  e.series = std::move(series);
  e.window = window_stats(e.series, K, cfg);
  e.estimate = e.window.max;
  return e;
}

}  // namespace

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::holds: return "holds";
    case Verdict::fails: return "fails";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

std::string_view to_string(OmegaVerdict v) {
  switch (v) {
    case OmegaVerdict::in_omega: return "in Ω";
    case OmegaVerdict::not_in_omega: return "not in Ω";
    case OmegaVerdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

WindowStats window_stats(std::span<const std::optional<double>> series, std::size_t K,
                         const WindowConfig& cfg) {
  WindowStats w;
  w.lo = window_start(cfg.fraction, K);
  w.hi = K;
  w.mid = w.lo + (w.hi - w.lo + 1) / 2;
  for (std::size_t k = w.lo; k <= w.hi && k < series.size(); ++k) {
    if (!series[k]) continue;
    const double v = *series[k];
    ++w.count;
    w.max = std::isnan(w.max) ? v : std::max(w.max, v);
    w.min = std::isnan(w.min) ? v : std::min(w.min, v);
    double& half = k < w.mid ? w.leading_max : w.trailing_max;
    half = std::isnan(half) ? v : std::max(half, v);
  }
  if (w.count > 0 && !std::isnan(w.trailing_max)) {
    w.stable = std::isinf(w.max) ? std::isinf(w.trailing_max)
                                 : w.trailing_max >= w.max - cfg.stability_gap * scale(w.max);
  }
  return w;
}

std::size_t first_admissible_index(const ConvergentTable& table) {
  for (std::size_t k = 2; k <= table.depth(); ++k) {
    if (!table.is_exact(k) || table.q(k) >= 3) return k;
  }
  return table.depth() + 1;
}

double condition_b_statistic(const ConvergentTable& table, double eps, std::size_t k) {
  if (!(eps > 0.0)) throw Error(Errc::domain_error, "eps must be positive");
  if (k > table.depth()) throw Error(Errc::insufficient_depth, "k = " + std::to_string(k) + " beyond table");
  if (k < 2 || (table.is_exact(k) && table.q(k) < 3)) {
    throw Error(Errc::below_admissible_index, "ln ln q_k <= 0 at k = " + std::to_string(k));
  }
  const double lq = table.log_q(k);
  const double cutoff = eps * lq / std::log(lq);
  if (std::floor(cutoff) >= static_cast<double>(k)) return 1.0;
  const double top = sum_largest(table.log_ratios().first(k), cutoff);
  return std::min(1.0, top / lq);
}

std::vector<double> default_eps_grid() {
  std::vector<double> grid;
  for (int j = 0; j <= 8; ++j) grid.push_back(std::ldexp(1.0, -j));
  return grid;
}

ConditionBReport condition_b_report(const ConvergentTable& table, std::span<const double> eps_grid,
                                    const WindowConfig& cfg) {
  if (eps_grid.empty()) throw Error(Errc::domain_error, "empty eps grid");
  for (std::size_t i = 0; i < eps_grid.size(); ++i) {
    if (!(eps_grid[i] > 0.0)) throw Error(Errc::domain_error, "eps must be positive");
    if (i > 0 && eps_grid[i] > eps_grid[i - 1]) throw Error(Errc::domain_error, "eps grid must be decreasing");
  }
  const std::size_t K = table.depth();
  const std::size_t k0 = first_admissible_index(table);
  if (k0 > K || K - k0 + 1 < 10) {
    throw Error(Errc::insufficient_depth, "condition B needs at least 10 admissible indices");
  }
  check_telescoping(table);

  ConditionBReport report;
  report.first_admissible = k0;
  const double threshold = 1.0 - cfg.stability_gap;
  bool any_holds = false;
  bool all_fail = true;
  for (double eps : eps_grid) {
    std::vector<std::optional<double>> series(K + 1);
    for (std::size_t k = k0; k <= K; ++k) series[k] = condition_b_statistic(table, eps, k);
    auto e = make_entry("condition_b", "sum of largest log ratios / ln q_k", std::move(series), K, cfg);
    e.eps = eps;
    e.implies = OmegaVerdict::in_omega;
    if (e.estimate < threshold) {
      e.verdict = Verdict::holds;
    } else if (e.estimate > threshold && e.window.stable) {
      e.verdict = Verdict::fails;
    } else {
      e.verdict = Verdict::inconclusive;
    }
    any_holds = any_holds || e.verdict == Verdict::holds;
    all_fail = all_fail && e.verdict == Verdict::fails;
    report.per_eps.push_back(std::move(e));
  }
  report.verdict = any_holds ? Verdict::holds : (all_fail ? Verdict::fails : Verdict::inconclusive);
  return report;
}

KimSeriesTrace kim_series(const ConvergentTable& table, const PhiSpec& phi, std::size_t K,
                          const KimOptions& opts) {
  if (K + 1 > table.depth() || K > table.exact_depth()) {
    throw Error(Errc::insufficient_depth, "Kim series to K = " + std::to_string(K) + " needs q_{K+1}");
  }
  std::vector<double> phis(K + 1);
  for (std::size_t k = 0; k <= K; ++k) {
    phis[k] = phi(table.q(k));
    if (k > 0 && phis[k] < phis[k - 1] * (1.0 - 1e-12)) {
      throw Error(Errc::domain_error, "phi is not nondecreasing along q_k");
    }
  }
  std::size_t start = 0;
  if (opts.start) {
    start = *opts.start;
  } else {
    while (start <= K && phis[start] < 1.0) ++start;
    if (start > K) throw Error(Errc::phi_below_one, "phi(q_k) < 1 for every k <= K");
  }
  KimSeriesTrace trace;
  trace.start = start;
  trace.last = K;
  trace.terms.resize(K + 1);
  trace.partial_sums.resize(K + 1);
  double sum = 0.0;
  for (std::size_t k = start; k <= K; ++k) {
    if (phis[k] < 1.0) throw Error(Errc::phi_below_one, "phi(q_" + std::to_string(k) + ") < 1");
    const double t = std::min(std::log(phis[k]), table.log_ratio(k)) / phis[k];
    trace.terms[k] = t;
    sum += t;
    trace.partial_sums[k] = sum;
  }
  const std::size_t lo = std::max(start, window_start(opts.window_fraction, K));
  trace.slope = slope_vs_log_k(trace.partial_sums, lo, K);
  trace.window_increment = sum - value_before(trace.partial_sums, lo);
  const std::size_t tail_lo = std::max(start, window_start(1.0 - opts.tail_fraction, K));
  trace.cauchy_tail = sum - value_before(trace.partial_sums, tail_lo);
  trace.divergence_evidence = trace.slope >= opts.divergence_slope;
  return trace;
}

CriterionReport classify(const ConvergentTable& table, const WindowConfig& cfg) {
  const std::size_t K = table.depth();
  const std::size_t k0 = first_admissible_index(table);
  if (k0 > K || K - k0 + 1 < 10) throw Error(Errc::insufficient_depth, "classify needs 10 admissible indices");

  std::vector<std::optional<double>> s1(K + 1), s2(K + 1), s3(K + 1), s4(K + 1), s5(K + 1);
  double inverse_log_sum = 0.0;
  for (std::size_t k = 1; k <= K; ++k) {
    const double lq = table.log_q(k);
    const auto kd = static_cast<double>(k);
    s1[k] = lq / kd;
    if (k >= 2) {
      s2[k] = lq / (kd * std::log(kd));
      inverse_log_sum += 1.0 / lq;
      s3[k] = inverse_log_sum;
    }
    if (k < K && lq > 0.0) {
      s4[k] = table.ratio(k) / lq;
      s5[k] = table.log_ratio(k) / lq;
    }
  }

  CriterionReport report;
  report.depth = K;
  report.config = cfg;

  auto e1 = make_entry("i", "ln(q_k)/k", std::move(s1), K, cfg);
  e1.verdict = bounded_verdict(e1.window, cfg);
  e1.implies = OmegaVerdict::in_omega;

  auto e2 = make_entry("ii", "ln(q_k)/(k ln k)", std::move(s2), K, cfg);
  e2.verdict = unbounded_verdict(e2.window, cfg);
  e2.implies = OmegaVerdict::not_in_omega;

  auto e3 = make_entry("iii", "partial sums of 1/ln(q_k), k >= 2", std::move(s3), K, cfg);
  {
    const double increment = inverse_log_sum - value_before(e3.series, e3.window.mid);
    if (increment <= cfg.stability_gap) {
      e3.verdict = Verdict::holds;
    } else if (slope_vs_log_k(e3.series, e3.window.lo, K) >= cfg.divergence_slope) {
      e3.verdict = Verdict::fails;
    } else {
      e3.verdict = Verdict::inconclusive;
    }
  }
  e3.implies = OmegaVerdict::not_in_omega;

  auto e4 = make_entry("iv", "(q_{k+1}/q_k)/ln(q_k)", std::move(s4), K, cfg);
  e4.verdict = bounded_verdict(e4.window, cfg);
  e4.implies = OmegaVerdict::in_omega;

  auto e5 = make_entry("v", "ln(q_{k+1}/q_k)/ln(q_k)", std::move(s5), K, cfg);
  e5.verdict = unbounded_verdict(e5.window, cfg);
  e5.implies = OmegaVerdict::not_in_omega;

  for (auto* e : {&e1, &e2, &e3, &e4, &e5}) report.entries.push_back(std::move(*e));

  bool member = false;
  bool non_member = false;
  for (const auto& e : report.entries) {
    if (e.verdict != Verdict::holds) continue;
    if (e.implies == OmegaVerdict::in_omega) member = true;
    if (e.implies == OmegaVerdict::not_in_omega) non_member = true;
  }
  report.conflict = member && non_member;
  if (report.conflict) {
    report.omega = OmegaVerdict::inconclusive;
  } else if (member) {
    report.omega = OmegaVerdict::in_omega;
  } else if (non_member) {
    report.omega = OmegaVerdict::not_in_omega;
  }
  return report;
}

}  // namespace cfomega
