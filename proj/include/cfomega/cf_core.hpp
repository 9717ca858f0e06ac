#pragma once

// Continued-fraction machinery: partial quotients from a theta description,
// exact convergent tables, and certified fractional parts of q*theta.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <gmpxx.h>

#include "cfomega/error.hpp"

namespace cfomega {

inline constexpr std::size_t kDefaultBitCap = 1'000'000;

/// Rules computing a_{k+1} from (k, q_k).
enum class GrowthRule {
  liouville,  ///< a_{k+1} = q_k^k
  square,     ///< a_{k+1} = q_k
  linear,     ///< a_{k+1} = k + 1
};

std::string_view to_string(GrowthRule rule);
std::optional<GrowthRule> growth_rule_from_name(std::string_view name);

/// Describes theta through its partial quotients a_0, a_1, ...
///
/// `seed` holds the explicit list for `explicit_list` and the starting
/// quotients a_0..a_{s-1} for `growth_rule`; the rule then produces every
/// later quotient.
struct ThetaSpec {
  enum class Kind { explicit_list, periodic, e_pattern, growth_rule };

  Kind kind = Kind::explicit_list;
  std::vector<mpz_class> seed;
  std::vector<mpz_class> preperiod;
  std::vector<mpz_class> period;
  GrowthRule rule = GrowthRule::liouville;
  std::size_t bit_cap = kDefaultBitCap;

  static ThetaSpec explicit_list(std::vector<mpz_class> quotients);
  static ThetaSpec periodic(std::vector<mpz_class> preperiod, std::vector<mpz_class> period);
  static ThetaSpec e_pattern();
  static ThetaSpec growth(GrowthRule rule, std::vector<mpz_class> seed,
                          std::size_t bit_cap = kDefaultBitCap);

  /// Whether the description yields quotients at every depth.
  bool extendable() const { return kind != Kind::explicit_list; }
};

std::string_view to_string(ThetaSpec::Kind kind);

/// Returns a_0..a_K. Growth rules interleave the q_k recurrence.
/// Throws `insufficient_quotients`, `invalid_quotient`, `bit_cap_exceeded`.
std::vector<mpz_class> expand_theta(const ThetaSpec& spec, std::size_t K);

/// How `build_convergents(spec, ...)` continues once a growth rule would
/// exceed its bit cap.
enum class TailPolicy {
  exact_only,  ///< throw `bit_cap_exceeded`
  log_domain,  ///< keep only ln a_k, ln q_k and the log ratios beyond the cap
};

/// Convergent denominators and numerators with cached logarithms.
///
/// Indices 0..exact_depth() carry exact integers. When built with
/// `TailPolicy::log_domain`, indices exact_depth()+1..depth() carry only the
/// logarithmic data; integer accessors throw `insufficient_precision` there.
class ConvergentTable {
 public:
  std::size_t depth() const { return logq_.size() - 1; }
  std::size_t exact_depth() const { return q_.size() - 1; }
  bool is_exact(std::size_t k) const { return k < q_.size(); }

  const mpz_class& a(std::size_t k) const;
  const mpz_class& p(std::size_t k) const;
  const mpz_class& q(std::size_t k) const;

  double log_q(std::size_t k) const { return logq_.at(k); }
  /// ln(q_{k+1}/q_k), for k < depth().
  double log_ratio(std::size_t k) const { return log_ratio_.at(k); }
  /// q_{k+1}/q_k rounded to double; +inf when it overflows.
  double ratio(std::size_t k) const { return ratio_.at(k); }

  std::span<const double> log_qs() const { return logq_; }
  std::span<const double> log_ratios() const { return log_ratio_; }

 private:
  friend class TableBuilder;

  std::vector<mpz_class> a_, p_, q_;
  std::vector<double> logq_, log_ratio_, ratio_;
};

/// Throws `no_quotients` on an empty list and `invalid_quotient` when
/// a_0 < 0 or a_k < 1 for k >= 1.
ConvergentTable build_convergents(std::span<const mpz_class> a);

ConvergentTable build_convergents(const ThetaSpec& spec, std::size_t K,
                                  TailPolicy policy = TailPolicy::exact_only);

/// A point of [0, 1) with a certified absolute error.
struct CirclePoint {
  double value = 0.0;
  double error_bound = 0.0;
};

/// Certified bound on |q*theta - q*p_K/q_K| using the deepest exact convergent
/// K and q_{K+1} >= q_K + q_{K-1}. Rounded upward.
double multiple_error_bound(const ConvergentTable& table, std::uint64_t q);

/// Fractional part of q*theta from the deepest exact convergent, computed in
/// rational arithmetic and rounded once. error_bound <= delta + 2^-53.
/// Throws `insufficient_precision` when the table is too shallow for delta.
CirclePoint frac_multiple(const ConvergentTable& table, std::uint64_t q, double delta);

/// Smallest doubling depth whose table certifies every multiple q <= q_max to
/// within delta. Throws `insufficient_precision` when the spec cannot be
/// extended far enough.
ConvergentTable table_for_precision(const ThetaSpec& spec, std::uint64_t q_max, double delta);

/// ln n for arbitrary-size n >= 1 via top mantissa bits and bit length.
double log_big(const mpz_class& n);

}  // namespace cfomega
