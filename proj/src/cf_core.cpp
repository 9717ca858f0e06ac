#include "cfomega/cf_core.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace cfomega {

namespace {

std::string quotient_detail(std::size_t k, const mpz_class& a) {
  return "a_" + std::to_string(k) + " = " + a.get_str();
}

void check_quotient(std::size_t k, const mpz_class& a) {
  if ((k == 0 && sgn(a) < 0) || (k > 0 && a < 1)) {
    throw Error(Errc::invalid_quotient, quotient_detail(k, a));
  }
}

// num/den for positive integers of any size, relative error a few ulps.
double ratio_double(const mpz_class& num, const mpz_class& den) {
  if (sgn(num) == 0) return 0.0;
  long e_num = 0;
  long e_den = 0;
  const double m_num = mpz_get_d_2exp(&e_num, num.get_mpz_t());
  const double m_den = mpz_get_d_2exp(&e_den, den.get_mpz_t());
  const long shift = e_num - e_den;
  if (shift > std::numeric_limits<double>::max_exponent + 1) {
    return std::numeric_limits<double>::infinity();
  }
  if (shift < std::numeric_limits<double>::min_exponent - 60) return 0.0;
  return std::ldexp(m_num / m_den, static_cast<int>(shift));
}

std::size_t bit_length(const mpz_class& n) {
  return sgn(n) == 0 ? 0 : mpz_sizeinbase(n.get_mpz_t(), 2);
}

constexpr double kTwo53 = 9007199254740992.0;

}  // namespace

std::string_view to_string(GrowthRule rule) {
  switch (rule) {
    case GrowthRule::liouville: return "liouville";
    case GrowthRule::square: return "square";
    case GrowthRule::linear: return "linear";
  }
  return "unknown";
}

std::optional<GrowthRule> growth_rule_from_name(std::string_view name) {
  if (name == "liouville") return GrowthRule::liouville;
  if (name == "square") return GrowthRule::square;
  if (name == "linear") return GrowthRule::linear;
  return std::nullopt;
}

std::string_view to_string(ThetaSpec::Kind kind) {
  switch (kind) {
    case ThetaSpec::Kind::explicit_list: return "explicit";
    case ThetaSpec::Kind::periodic: return "periodic";
    case ThetaSpec::Kind::e_pattern: return "e_pattern";
    case ThetaSpec::Kind::growth_rule: return "growth_rule";
  }
  return "unknown";
}

ThetaSpec ThetaSpec::explicit_list(std::vector<mpz_class> quotients) {
  ThetaSpec s;
  s.kind = Kind::explicit_list;
  s.seed = std::move(quotients);
  return s;
}

ThetaSpec ThetaSpec::periodic(std::vector<mpz_class> preperiod, std::vector<mpz_class> period) {
  ThetaSpec s;
  s.kind = Kind::periodic;
  s.preperiod = std::move(preperiod);
  s.period = std::move(period);
  return s;
}

ThetaSpec ThetaSpec::e_pattern() {
  ThetaSpec s;
  s.kind = Kind::e_pattern;
  return s;
}

ThetaSpec ThetaSpec::growth(GrowthRule rule, std::vector<mpz_class> seed, std::size_t bit_cap) {
  ThetaSpec s;
  s.kind = Kind::growth_rule;
  s.rule = rule;
  s.seed = std::move(seed);
  s.bit_cap = bit_cap;
  return s;
}

// Incremental p_k/q_k recurrence shared by every construction path.
class TableBuilder {
 public:
  std::size_t size() const { return table_.logq_.size(); }
  bool in_log_tail() const { return log_tail_; }
  const mpz_class& last_q() const { return table_.q_.back(); }
  double last_log_q() const { return table_.logq_.back(); }

  void push_exact(const mpz_class& a) {
    const std::size_t k = size();
    check_quotient(k, a);
    mpz_class p = a * p1_ + p2_;
    mpz_class q = a * q1_ + q2_;
    if (k > 0) {
      // q_k/q_{k-1} = a_k + q_{k-2}/q_{k-1}
      const double frac = ratio_double(q2_, q1_);
      double lr = 0.0;
      double r = 0.0;
      if (a < kTwo53) {
        r = a.get_d() + frac;
        lr = std::log(r);
      } else {
        lr = log_big(a) + std::log1p(frac / a.get_d());
        r = ratio_double(q, q1_);
      }
      table_.log_ratio_.push_back(lr);
      table_.ratio_.push_back(r);
    }
    table_.logq_.push_back(log_big(q));
    table_.a_.push_back(a);
    p2_ = p1_;
    q2_ = q1_;
    p1_ = p;
    q1_ = q;
    table_.p_.push_back(std::move(p));
    table_.q_.push_back(std::move(q));
  }

  /// Appends an index known only through ln a_k (requires k >= 2).
  void push_log(double log_a) {
    const std::size_t k = size();
    if (k < 2) throw Error(Errc::bit_cap_exceeded, "log-domain tail needs two exact convergents");
    const double lq1 = table_.logq_[k - 1];
    const double lq2 = table_.logq_[k - 2];
    const double lr = log_a + std::log1p(std::exp(lq2 - log_a - lq1));
    table_.log_ratio_.push_back(lr);
    table_.ratio_.push_back(lr > 709.0 ? std::numeric_limits<double>::infinity() : std::exp(lr));
    table_.logq_.push_back(lq1 + lr);
    log_tail_ = true;
  }

  ConvergentTable finish() && { return std::move(table_); }

 private:
  ConvergentTable table_;
  bool log_tail_ = false;
  // (p_{k-1}, p_{k-2}) and (q_{k-1}, q_{k-2}), starting from p_{-1}=1, p_{-2}=0,
  // q_{-1}=0, q_{-2}=1.
  mpz_class p1_ = 1, p2_ = 0, q1_ = 0, q2_ = 1;
};

namespace {

mpz_class rule_quotient(GrowthRule rule, std::size_t k, const mpz_class& qk) {
  switch (rule) {
    case GrowthRule::liouville: {
      mpz_class a;
      mpz_pow_ui(a.get_mpz_t(), qk.get_mpz_t(), static_cast<unsigned long>(k));
      return a;
    }
    case GrowthRule::square: return qk;
    case GrowthRule::linear: return mpz_class(static_cast<unsigned long>(k + 1));
  }
  return mpz_class(1);
}

std::size_t rule_bits(GrowthRule rule, std::size_t k, const mpz_class& qk) {
  switch (rule) {
    case GrowthRule::liouville: return k * bit_length(qk);
    case GrowthRule::square: return bit_length(qk);
    case GrowthRule::linear: return 64;
  }
  return 0;
}

double rule_log_quotient(GrowthRule rule, std::size_t k, double log_qk) {
  switch (rule) {
    case GrowthRule::liouville: return static_cast<double>(k) * log_qk;
    case GrowthRule::square: return log_qk;
    case GrowthRule::linear: return std::log(static_cast<double>(k + 1));
  }
  return 0.0;
}

mpz_class nth_quotient(const ThetaSpec& spec, std::size_t k) {
  switch (spec.kind) {
    case ThetaSpec::Kind::explicit_list:
      if (k >= spec.seed.size()) {
        throw Error(Errc::insufficient_quotients,
                    "need " + std::to_string(k + 1) + ", have " + std::to_string(spec.seed.size()));
      }
      return spec.seed[k];
    case ThetaSpec::Kind::periodic:
      if (spec.period.empty()) throw Error(Errc::insufficient_quotients, "empty period");
      if (k < spec.preperiod.size()) return spec.preperiod[k];
      return spec.period[(k - spec.preperiod.size()) % spec.period.size()];
    case ThetaSpec::Kind::e_pattern:
      if (k == 0) return 2;
      if (k % 3 == 2) return mpz_class(static_cast<unsigned long>(2 * (k + 1) / 3));
      return 1;
    case ThetaSpec::Kind::growth_rule: break;
  }
  throw Error(Errc::domain_error, "growth rules are expanded sequentially");
}

// Drives the growth-rule recurrence up to index K. Quotients past the bit cap
// either throw or continue in the log domain, per `policy`.
void grow(const ThetaSpec& spec, std::size_t K, TailPolicy policy, TableBuilder& builder,
          std::vector<mpz_class>* quotients) {
  if (spec.seed.empty()) throw Error(Errc::insufficient_quotients, "growth rule needs a seed");
  for (std::size_t k = 0; k < spec.seed.size() && k <= K; ++k) {
    builder.push_exact(spec.seed[k]);
    if (quotients) quotients->push_back(spec.seed[k]);
  }
  while (builder.size() <= K) {
    const std::size_t k = builder.size() - 1;  // produce a_{k+1}
    if (builder.in_log_tail()) {
      builder.push_log(rule_log_quotient(spec.rule, k, builder.last_log_q()));
      continue;
    }
    const std::size_t bits = rule_bits(spec.rule, k, builder.last_q());
    if (bits > spec.bit_cap) {
      if (policy == TailPolicy::exact_only) {
        throw Error(Errc::bit_cap_exceeded, "a_" + std::to_string(k + 1) + " needs about " +
                                                std::to_string(bits) + " bits, cap " +
                                                std::to_string(spec.bit_cap));
      }
      builder.push_log(rule_log_quotient(spec.rule, k, builder.last_log_q()));
      continue;
    }
    mpz_class a = rule_quotient(spec.rule, k, builder.last_q());
    if (a < 1) throw Error(Errc::invalid_quotient, quotient_detail(k + 1, a));
    builder.push_exact(a);
    if (quotients) quotients->push_back(std::move(a));
  }
}

}  // namespace

std::vector<mpz_class> expand_theta(const ThetaSpec& spec, std::size_t K) {
  if (K < 1) throw Error(Errc::domain_error, "K must be at least 1");
  std::vector<mpz_class> out;
  out.reserve(K + 1);
  if (spec.kind == ThetaSpec::Kind::growth_rule) {
    TableBuilder builder;
    grow(spec, K, TailPolicy::exact_only, builder, &out);
    return out;
  }
  for (std::size_t k = 0; k <= K; ++k) {
    mpz_class a = nth_quotient(spec, k);
    check_quotient(k, a);
    out.push_back(std::move(a));
  }
  return out;
}

const mpz_class& ConvergentTable::a(std::size_t k) const {
  if (k >= a_.size()) throw Error(Errc::insufficient_precision, "a_" + std::to_string(k) + " is log-only");
  return a_[k];
}

const mpz_class& ConvergentTable::p(std::size_t k) const {
  if (k >= p_.size()) throw Error(Errc::insufficient_precision, "p_" + std::to_string(k) + " is log-only");
  return p_[k];
}

const mpz_class& ConvergentTable::q(std::size_t k) const {
  if (k >= q_.size()) throw Error(Errc::insufficient_precision, "q_" + std::to_string(k) + " is log-only");
  return q_[k];
}

ConvergentTable build_convergents(std::span<const mpz_class> a) {
  if (a.empty()) throw Error(Errc::no_quotients);
  TableBuilder builder;
  for (const auto& ak : a) builder.push_exact(ak);
  return std::move(builder).finish();
}

ConvergentTable build_convergents(const ThetaSpec& spec, std::size_t K, TailPolicy policy) {
  if (spec.kind != ThetaSpec::Kind::growth_rule) {
    const auto a = expand_theta(spec, K);
    return build_convergents(a);
  }
  TableBuilder builder;
  grow(spec, K, policy, builder, nullptr);
  return std::move(builder).finish();
}

double multiple_error_bound(const ConvergentTable& table, std::uint64_t q) {
  const std::size_t K = table.exact_depth();
  if (K < 1) throw Error(Errc::insufficient_precision, "need at least two convergents");
  if (q == 0) return 0.0;
  const mpz_class& qK = table.q(K);
  const mpz_class den = qK * (qK + table.q(K - 1));
  const double bound = ratio_double(mpz_class(static_cast<unsigned long>(q)), den);
  return bound * (1.0 + 8.0 * std::numeric_limits<double>::epsilon());
}

CirclePoint frac_multiple(const ConvergentTable& table, std::uint64_t q, double delta) {
  if (q == 0) return {0.0, 0.0};
  if (!(delta > 0.0)) throw Error(Errc::domain_error, "delta must be positive");
  const double bound = multiple_error_bound(table, q);
  if (bound > delta) {
    throw Error(Errc::insufficient_precision,
                "q = " + std::to_string(q) + " needs a deeper table for delta " + std::to_string(delta));
  }
  const std::size_t K = table.exact_depth();
  const mpz_class& qK = table.q(K);
  mpz_class r = mpz_class(static_cast<unsigned long>(q)) * table.p(K);
  mpz_fdiv_r(r.get_mpz_t(), r.get_mpz_t(), qK.get_mpz_t());
  // t = floor(r * 2^53 / q_K) < 2^53, so t * 2^-53 is exact and below one.
  mpz_class t = r << 53;
  mpz_fdiv_q(t.get_mpz_t(), t.get_mpz_t(), qK.get_mpz_t());
  const double value = std::ldexp(t.get_d(), -53);
  return {value, bound + std::ldexp(1.0, -53)};
}

ConvergentTable table_for_precision(const ThetaSpec& spec, std::uint64_t q_max, double delta) {
  if (!(delta > 0.0)) throw Error(Errc::domain_error, "delta must be positive");
  if (!spec.extendable()) {
    if (spec.seed.size() < 2) throw Error(Errc::insufficient_precision, "explicit list too short");
    auto table = build_convergents(spec.seed);
    if (multiple_error_bound(table, q_max) > delta) {
      throw Error(Errc::insufficient_precision, "explicit list too short for q = " + std::to_string(q_max));
    }
    return table;
  }
  for (std::size_t K = 4; K <= (std::size_t{1} << 22); K *= 2) {
    ConvergentTable table;
    try {
      table = build_convergents(spec, K, TailPolicy::exact_only);
    } catch (const Error& e) {
      if (e.code() == Errc::bit_cap_exceeded) throw Error(Errc::insufficient_precision, e.what());
      throw;
    }
    if (multiple_error_bound(table, q_max) <= delta) return table;
  }
  throw Error(Errc::insufficient_precision, "depth limit reached");
}

double log_big(const mpz_class& n) {
  if (sgn(n) <= 0) throw Error(Errc::domain_error, "log of nonpositive integer");
  if (n == 1) return 0.0;
  if (n < kTwo53) return std::log(n.get_d());
  long exp = 0;
  const double mantissa = mpz_get_d_2exp(&exp, n.get_mpz_t());
  return std::log(mantissa) + static_cast<double>(exp) * std::numbers::ln2;
}

}  // namespace cfomega
