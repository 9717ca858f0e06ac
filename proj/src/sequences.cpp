#include "cfomega/sequences.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "cfomega/exact_sum.hpp"

namespace cfomega {

namespace {

// Evaluation point with both exact and floating views of q.
struct Arg {
  std::uint64_t small = 0;
  const mpz_class* big = nullptr;
  double value = 0.0;
  double log = 0.0;

  // ln(q + e)
  double log_shift_e() const {
    if (std::isfinite(value) && value < 1e300) return std::log(value + std::numbers::e);
    return log;
  }
};

Arg make_arg(std::uint64_t q) {
  if (q == 0) throw Error(Errc::domain_error, "sequences are defined for q >= 1");
  const double v = static_cast<double>(q);
  return {q, nullptr, v, std::log(v)};
}

Arg make_arg(const mpz_class& q) {
  if (q < 1) throw Error(Errc::domain_error, "sequences are defined for q >= 1");
  if (q.fits_ulong_p()) return make_arg(static_cast<std::uint64_t>(q.get_ui()));
  return {0, &q, q.get_d(), log_big(q)};
}

std::optional<std::size_t> lookup(const StepFunction& f, const Arg& x) {
  return x.big ? f.block_of(*x.big) : f.block_of(x.small);
}

double psi_closed(const PsiSpec::Closed& c, const Arg& x) {
  switch (c.family) {
    case PsiFamily::inv_q: return c.c / x.value;
    case PsiFamily::inv_q_log: return c.c / (x.value * x.log_shift_e());
    case PsiFamily::inv_q_log2: {
      const double L = x.log_shift_e();
      return c.c / (x.value * L * L);
    }
    case PsiFamily::inv_q2: return c.c / (x.value * x.value);
    case PsiFamily::constant: return c.c;
  }
  return 0.0;
}

double psi_closed_weight(const PsiSpec::Closed& c, const Arg& x) {
  switch (c.family) {
    case PsiFamily::inv_q: return c.c;
    case PsiFamily::inv_q_log: return c.c / x.log_shift_e();
    case PsiFamily::inv_q_log2: {
      const double L = x.log_shift_e();
      return c.c / (L * L);
    }
    case PsiFamily::inv_q2: return c.c / x.value;
    case PsiFamily::constant: return c.c * x.value;
  }
  return 0.0;
}

double phi_closed(const PhiSpec::Closed& c, const Arg& x) {
  switch (c.family) {
    case PhiFamily::constant: return c.c;
    case PhiFamily::log: return c.c * x.log;
    case PhiFamily::log2: return c.c * x.log * x.log;
  }
  return 0.0;
}

double phi_eval(const PhiSpec& phi, const Arg& x);
double psi_weight_eval(const PsiSpec& psi, const Arg& x);

double psi_eval(const PsiSpec& psi, const Arg& x) {
  const auto& rep = psi.rep();
  if (const auto* c = std::get_if<PsiSpec::Closed>(&rep)) return psi_closed(*c, x);
  if (const auto* f = std::get_if<StepFunction>(&rep)) {
    const auto j = lookup(*f, x);
    if (!j) throw Error(Errc::domain_error, "psi step evaluated outside its range");
    return f->values()[*j];
  }
  const auto& phi = *std::get<std::shared_ptr<const PhiSpec>>(rep);
  return 1.0 / (x.value * phi_eval(phi, x));
}

double psi_weight_eval(const PsiSpec& psi, const Arg& x) {
  const auto& rep = psi.rep();
  if (const auto* c = std::get_if<PsiSpec::Closed>(&rep)) return psi_closed_weight(*c, x);
  if (const auto* f = std::get_if<StepFunction>(&rep)) {
    const auto j = lookup(*f, x);
    if (!j) throw Error(Errc::domain_error, "psi step evaluated outside its range");
    return x.value * f->values()[*j];
  }
  const auto& phi = *std::get<std::shared_ptr<const PhiSpec>>(rep);
  return 1.0 / phi_eval(phi, x);
}

double phi_eval(const PhiSpec& phi, const Arg& x) {
  const auto& rep = phi.rep();
  if (const auto* c = std::get_if<PhiSpec::Closed>(&rep)) return phi_closed(*c, x);
  if (const auto* f = std::get_if<StepFunction>(&rep)) {
    const auto j = lookup(*f, x);
    if (!j) throw Error(Errc::phi_evaluation_error, "phi step evaluated outside its range");
    return f->values()[*j];
  }
  const auto& psi = *std::get<std::shared_ptr<const PsiSpec>>(rep);
  return 1.0 / psi_weight_eval(psi, x);
}

void check_scale(double c) {
  if (!(c > 0.0) || !std::isfinite(c)) throw Error(Errc::domain_error, "scale c must be positive");
}

double ls_slope(std::span<const double> x, std::span<const double> y) {
  const auto n = static_cast<double>(x.size());
  if (x.size() < 2) return 0.0;
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

}  // namespace

std::string_view to_string(PsiFamily f) {
  switch (f) {
    case PsiFamily::inv_q: return "inv_q";
    case PsiFamily::inv_q_log: return "inv_q_log";
    case PsiFamily::inv_q_log2: return "inv_q_log2";
    case PsiFamily::inv_q2: return "inv_q2";
    case PsiFamily::constant: return "constant";
  }
  return "unknown";
}

std::string_view to_string(PhiFamily f) {
  switch (f) {
    case PhiFamily::constant: return "constant";
    case PhiFamily::log: return "log";
    case PhiFamily::log2: return "log2";
  }
  return "unknown";
}

std::optional<PsiFamily> psi_family_from_name(std::string_view name) {
  for (auto f : {PsiFamily::inv_q, PsiFamily::inv_q_log, PsiFamily::inv_q_log2, PsiFamily::inv_q2,
                 PsiFamily::constant}) {
    if (to_string(f) == name) return f;
  }
  return std::nullopt;
}

std::optional<PhiFamily> phi_family_from_name(std::string_view name) {
  for (auto f : {PhiFamily::constant, PhiFamily::log, PhiFamily::log2}) {
    if (to_string(f) == name) return f;
  }
  return std::nullopt;
}

StepFunction::StepFunction(std::vector<mpz_class> breakpoints, std::vector<double> values)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
  if (breakpoints_.size() < 2 || values_.size() + 1 != breakpoints_.size()) {
    throw Error(Errc::domain_error, "step function needs J+1 breakpoints for J values");
  }
  if (breakpoints_.front() < 1) throw Error(Errc::domain_error, "first breakpoint must be >= 1");
  for (std::size_t j = 1; j < breakpoints_.size(); ++j) {
    if (breakpoints_[j] <= breakpoints_[j - 1]) {
      throw Error(Errc::domain_error, "breakpoints must be strictly increasing");
    }
  }
  for (double v : values_) {
    if (!(v > 0.0) || !std::isfinite(v)) throw Error(Errc::domain_error, "step values must be positive");
  }
  small_breakpoints_.reserve(breakpoints_.size());
  for (const auto& b : breakpoints_) {
    small_breakpoints_.push_back(b.fits_ulong_p() ? b.get_ui() : std::numeric_limits<std::uint64_t>::max());
  }
}

std::optional<std::size_t> StepFunction::block_of(const mpz_class& q) const {
  const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), q);
  if (it == breakpoints_.begin() || it == breakpoints_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
}

std::optional<std::size_t> StepFunction::block_of(std::uint64_t q) const {
  const auto it = std::upper_bound(small_breakpoints_.begin(), small_breakpoints_.end(), q);
  if (it == small_breakpoints_.begin() || it == small_breakpoints_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - small_breakpoints_.begin()) - 1;
}

PsiSpec PsiSpec::closed(PsiFamily family, double c) {
  check_scale(c);
  return PsiSpec(Closed{family, c});
}

PsiSpec PsiSpec::step(StepFunction f) { return PsiSpec(std::move(f)); }

double PsiSpec::operator()(std::uint64_t q) const { return psi_eval(*this, make_arg(q)); }
double PsiSpec::operator()(const mpz_class& q) const { return psi_eval(*this, make_arg(q)); }
double PsiSpec::weight(std::uint64_t q) const { return psi_weight_eval(*this, make_arg(q)); }
double PsiSpec::weight(const mpz_class& q) const { return psi_weight_eval(*this, make_arg(q)); }

PhiSpec PhiSpec::closed(PhiFamily family, double c) {
  check_scale(c);
  return PhiSpec(Closed{family, c});
}

PhiSpec PhiSpec::step(StepFunction f) { return PhiSpec(std::move(f)); }

double PhiSpec::operator()(std::uint64_t q) const { return phi_eval(*this, make_arg(q)); }
double PhiSpec::operator()(const mpz_class& q) const { return phi_eval(*this, make_arg(q)); }

PhiSpec dual(const PsiSpec& psi) {
  if (const auto* inner = std::get_if<std::shared_ptr<const PhiSpec>>(&psi.rep())) return **inner;
  return PhiSpec(std::make_shared<const PsiSpec>(psi));
}

PsiSpec dual(const PhiSpec& phi) {
  if (const auto* inner = std::get_if<std::shared_ptr<const PsiSpec>>(&phi.rep())) return **inner;
  return PsiSpec(std::make_shared<const PhiSpec>(phi));
}

double phi_of(const PsiSpec& psi, const mpz_class& q) {
  const double w = psi.weight(q);
  if (!(w > 0.0)) throw Error(Errc::domain_error, "q psi(q) must be positive");
  return 1.0 / w;
}

double psi_of(const PhiSpec& phi, const mpz_class& q) {
  const Arg x = make_arg(q);
  const double v = phi_eval(phi, x);
  if (!(v > 0.0)) throw Error(Errc::domain_error, "phi(q) must be positive");
  return 1.0 / (x.value * v);
}

KhinchinReport khinchin_validate(const PsiSpec& psi, std::uint64_t Q, const KhinchinOptions& opts) {
  if (Q < 10) throw Error(Errc::domain_error, "Khinchin check needs Q >= 10");

  // Log-spaced checkpoints over [sqrt(Q), Q] for the growth fit.
  std::vector<std::uint64_t> marks;
  const double lo = 0.5 * std::log(static_cast<double>(Q));
  const double hi = std::log(static_cast<double>(Q));
  const std::size_t n = std::max<std::size_t>(opts.fit_points, 2);
  for (std::size_t j = 0; j < n; ++j) {
    const double t = lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(n - 1);
    const auto q = std::clamp<std::uint64_t>(static_cast<std::uint64_t>(std::llround(std::exp(t))), 3, Q);
    if (marks.empty() || q > marks.back()) marks.push_back(q);
  }

  KhinchinReport report;
  report.range = Q;
  ExactSum sum;
  std::vector<double> xs_log, xs_loglog, ys;
  std::size_t next_mark = 0;
  double prev_weight = 0.0;
  for (std::uint64_t q = 1; q <= Q; ++q) {
    const double value = psi(q);
    if (!(value > 0.0)) throw Error(Errc::domain_error, "psi must be positive at q = " + std::to_string(q));
    const double w = psi.weight(q);
    if (q > 1 && w > prev_weight * (1.0 + opts.monotone_tolerance) && report.monotone_ok) {
      report.monotone_ok = false;
      report.first_violation = q - 1;
    }
    prev_weight = w;
    sum.add(value);
    if (next_mark < marks.size() && marks[next_mark] == q) {
      const double lq = std::log(static_cast<double>(q));
      xs_log.push_back(lq);
      xs_loglog.push_back(std::log(lq));
      ys.push_back(sum.value());
      ++next_mark;
    }
  }
  report.divergence_partial_sum = sum.value();
  report.slope_log = ls_slope(xs_log, ys);
  report.slope_loglog = ls_slope(xs_loglog, ys);
  report.divergence_evidence = report.slope_log >= opts.divergence_slope;
  return report;
}

PsiSpec remark_counterexample(std::span<const int> n) {
  if (n.size() < 2) throw Error(Errc::invalid_gap_sequence, "need n_0 and at least one n_k");
  if (n[0] != 0) throw Error(Errc::invalid_gap_sequence, "n_0 must be 0");
  for (std::size_t k = 1; k < n.size(); ++k) {
    const long gap = static_cast<long>(n[k]) - n[k - 1];
    if (gap < static_cast<long>(k)) {
      throw Error(Errc::invalid_gap_sequence,
                  "n_" + std::to_string(k) + " - n_" + std::to_string(k - 1) + " = " + std::to_string(gap) +
                      " < " + std::to_string(k));
    }
  }
  if (n.back() > 1022) throw Error(Errc::invalid_gap_sequence, "2^-n_k must be a normal double");
  std::vector<mpz_class> breakpoints;
  std::vector<double> values;
  for (std::size_t k = 0; k < n.size(); ++k) {
    mpz_class b;
    mpz_ui_pow_ui(b.get_mpz_t(), 2, static_cast<unsigned long>(n[k]));
    breakpoints.push_back(std::move(b));
    if (k > 0) values.push_back(std::ldexp(1.0, -n[k]));
  }
  return PsiSpec::step(StepFunction(std::move(breakpoints), std::move(values)));
}

std::vector<mpq_class> block_sums(const StepFunction& f) {
  std::vector<mpq_class> out;
  out.reserve(f.blocks());
  const auto& b = f.breakpoints();
  for (std::size_t j = 0; j < f.blocks(); ++j) {
    mpq_class width(b[j + 1] - b[j]);
    out.push_back(width * mpq_class(f.values()[j]));
  }
  return out;
}

Minorant greatest_khinchin_minorant(const PsiSpec& psi, std::uint64_t Q, MinorantKind kind) {
  if (Q < 1) throw Error(Errc::domain_error, "minorant needs Q >= 1");
  Minorant m;
  m.kind = kind;
  m.g.resize(Q);
  for (std::uint64_t q = 1; q <= Q; ++q) m.g[q - 1] = psi.weight(q);
  if (kind == MinorantKind::running) {
    for (std::uint64_t i = 1; i < Q; ++i) m.g[i] = std::min(m.g[i], m.g[i - 1]);
  } else {
    for (std::uint64_t i = Q - 1; i-- > 0;) m.g[i] = std::min(m.g[i], m.g[i + 1]);
  }
  m.partial_sums.resize(Q);
  double s = 0.0;
  for (std::uint64_t q = 1; q <= Q; ++q) {
    s += m.g[q - 1] / static_cast<double>(q);
    m.partial_sums[q - 1] = s;
  }
  return m;
}

PhiSpec phi_from_proof(const ConvergentTable& table, std::span<const std::size_t> k_seq) {
  if (k_seq.size() < 2 || k_seq[0] != 0) {
    throw Error(Errc::invalid_index_sequence, "need k_0 = 0 followed by at least one index");
  }
  for (std::size_t n = 1; n < k_seq.size(); ++n) {
    if (k_seq[n] <= k_seq[n - 1]) throw Error(Errc::invalid_index_sequence, "indices must increase");
  }
  if (k_seq.back() > table.exact_depth()) {
    throw Error(Errc::invalid_index_sequence, "index beyond the exact table");
  }
  if (table.q(k_seq[1]) < 3) throw Error(Errc::invalid_index_sequence, "q_{k_1} must be at least 3");
  std::vector<mpz_class> breakpoints;
  std::vector<double> values;
  for (std::size_t n = 0; n < k_seq.size(); ++n) {
    breakpoints.push_back(table.q(k_seq[n]));
    if (n > 0) values.push_back(table.log_q(k_seq[n]));
  }
  return PhiSpec::step(StepFunction(std::move(breakpoints), std::move(values)));
}

DyadicReport dyadic_diagnostics(const ConvergentTable& table, const PhiSpec& phi, int m_max) {
  if (m_max < 0) throw Error(Errc::domain_error, "m_max must be nonnegative");
  const std::size_t E = table.exact_depth();
  if (E < 1) throw Error(Errc::insufficient_depth, "need at least two exact convergents");

  DyadicReport report;
  report.range_max = table.q(E);

  constexpr double kTieTolerance = 1e-12;
  double prev_phi = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < E; ++k) {
    Membership mem;
    mem.k = k;
    mem.phi_qk = phi(table.q(k));
    mem.ratio = table.ratio(k);
    if (mem.phi_qk < prev_phi * (1.0 - kTieTolerance)) {
      throw Error(Errc::domain_error, "phi is not nondecreasing along q_k");
    }
    prev_phi = mem.phi_qk;
    mem.tie = std::fabs(mem.phi_qk - mem.ratio) <= kTieTolerance * std::max(1.0, mem.ratio);
    mem.in_S = mem.tie || mem.phi_qk <= mem.ratio;
    report.membership.push_back(mem);
  }

  const mpz_class one(1);
  for (int m = 0; m <= m_max; ++m) {
    DyadicRecord rec;
    rec.m = m;
    const double threshold = std::ldexp(1.0, m);
    if (phi(one) <= threshold) {
      if (phi(report.range_max) <= threshold) {
        rec.Q_m = report.range_max;
        rec.capped = true;
      } else {
        mpz_class lo = 1;
        mpz_class hi = report.range_max;
        while (hi - lo > 1) {
          mpz_class mid = (lo + hi) / 2;
          if (phi(mid) <= threshold) {
            lo = mid;
          } else {
            hi = mid;
          }
        }
        rec.Q_m = lo;
      }
      for (const auto& mem : report.membership) {
        if (table.q(mem.k) > *rec.Q_m) continue;
        if (mem.in_S) {
          ++rec.count_S;
        } else {
          ++rec.count_T;
          rec.log_sum_T += table.log_ratio(mem.k);
        }
      }
      const double md = static_cast<double>(m);
      rec.kappa = md / threshold * static_cast<double>(rec.count_S);
      const double log_Q = log_big(*rec.Q_m);
      if (log_Q > 0.0) rec.lambda = (md * static_cast<double>(rec.count_S) + rec.log_sum_T) / log_Q;
    }
    report.records.push_back(std::move(rec));
  }
  return report;
}

}  // namespace cfomega
