#pragma once

// Positive sequences psi (approximation radii) and their duals
// phi(q) = 1/(q psi(q)): closed-form families, step functions, Khinchin
// checks, and the constructions used to probe the Omega criterion.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include <gmpxx.h>

#include "cfomega/cf_core.hpp"

namespace cfomega {

/// Closed-form psi families, each scaled by a constant c > 0.
enum class PsiFamily {
  inv_q,        ///< c / q
  inv_q_log,    ///< c / (q ln(q + e))
  inv_q_log2,   ///< c / (q ln^2(q + e))
  inv_q2,       ///< c / q^2
  constant,     ///< c
};

/// Closed-form phi families, each scaled by a constant c > 0.
enum class PhiFamily {
  constant,  ///< c
  log,       ///< c ln q
  log2,      ///< c ln^2 q
};

std::string_view to_string(PsiFamily f);
std::string_view to_string(PhiFamily f);
std::optional<PsiFamily> psi_family_from_name(std::string_view name);
std::optional<PhiFamily> phi_family_from_name(std::string_view name);

/// Piecewise-constant function on [b_0, b_J): value v_j on [b_{j-1}, b_j).
/// Blocks are closed on the left and open on the right.
class StepFunction {
 public:
  /// Requires b strictly increasing, b_0 >= 1, one positive value per block.
  StepFunction(std::vector<mpz_class> breakpoints, std::vector<double> values);

  const std::vector<mpz_class>& breakpoints() const { return breakpoints_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t blocks() const { return values_.size(); }

  /// Largest argument covered, b_J - 1.
  mpz_class range_max() const { return breakpoints_.back() - 1; }

  /// Index j-1 of the block containing q, or nullopt outside [b_0, b_J).
  std::optional<std::size_t> block_of(const mpz_class& q) const;
  std::optional<std::size_t> block_of(std::uint64_t q) const;

 private:
  std::vector<mpz_class> breakpoints_;
  std::vector<std::uint64_t> small_breakpoints_;  // saturated copies for fast lookup
  std::vector<double> values_;
};

class PhiSpec;

/// A positive sequence psi on q >= 1.
class PsiSpec {
 public:
  struct Closed {
    PsiFamily family;
    double c;
  };
  using Rep = std::variant<Closed, StepFunction, std::shared_ptr<const PhiSpec>>;

  static PsiSpec closed(PsiFamily family, double c);
  static PsiSpec step(StepFunction f);

  const Rep& rep() const { return rep_; }

  double operator()(std::uint64_t q) const;
  double operator()(const mpz_class& q) const;
  /// q * psi(q), the quantity a Khinchin sequence keeps nonincreasing.
  double weight(std::uint64_t q) const;
  double weight(const mpz_class& q) const;

 private:
  friend PsiSpec dual(const PhiSpec& phi);
  explicit PsiSpec(Rep rep) : rep_(std::move(rep)) {}
  Rep rep_;
};

/// A positive sequence phi on q >= 1.
class PhiSpec {
 public:
  struct Closed {
    PhiFamily family;
    double c;
  };
  using Rep = std::variant<Closed, StepFunction, std::shared_ptr<const PsiSpec>>;

  static PhiSpec closed(PhiFamily family, double c = 1.0);
  static PhiSpec step(StepFunction f);

  const Rep& rep() const { return rep_; }

  double operator()(std::uint64_t q) const;
  double operator()(const mpz_class& q) const;

 private:
  friend PhiSpec dual(const PsiSpec& psi);
  explicit PhiSpec(Rep rep) : rep_(std::move(rep)) {}
  Rep rep_;
};

/// phi(q) = 1/(q psi(q)) and psi(q) = 1/(q phi(q)). Dualizing a dual returns
/// the original object.
PhiSpec dual(const PsiSpec& psi);
PsiSpec dual(const PhiSpec& phi);

double phi_of(const PsiSpec& psi, const mpz_class& q);
double psi_of(const PhiSpec& phi, const mpz_class& q);

struct KhinchinReport {
  std::uint64_t range = 0;
  bool monotone_ok = true;
  std::optional<std::uint64_t> first_violation;  ///< smallest q with (q+1)psi(q+1) > q psi(q)
  double divergence_partial_sum = 0.0;           ///< sum of psi(q), q <= range
  double slope_log = 0.0;                        ///< LS slope of partial sums vs ln q
  double slope_loglog = 0.0;                     ///< LS slope of partial sums vs ln ln q
  bool divergence_evidence = false;              ///< heuristic, never a proof
};

struct KhinchinOptions {
  double monotone_tolerance = 1e-12;  ///< relative slack for rounding in q psi(q)
  double divergence_slope = 0.05;
  std::size_t fit_points = 64;
};

/// Checks q psi(q) nonincreasing on every consecutive pair in [1, Q] and
/// fits the growth of the partial sums over the upper half of [1, Q] on a log
/// scale. Requires Q >= 10.
KhinchinReport khinchin_validate(const PsiSpec& psi, std::uint64_t Q, const KhinchinOptions& opts = {});

/// psi(q) = 2^-n_k on [2^{n_{k-1}}, 2^{n_k}). Requires n_0 = 0 and
/// n_k - n_{k-1} >= k.
PsiSpec remark_counterexample(std::span<const int> n);

/// Exact sum of a step psi over each block: (b_j - b_{j-1}) v_j.
std::vector<mpq_class> block_sums(const StepFunction& f);

/// How a minorant of the weight w(q) = q psi(q) is formed on [1, Q].
enum class MinorantKind {
  running,  ///< g(q) = min_{1 <= q' <= q} w(q'): the greatest nonincreasing g <= w
  tail,     ///< g(q) = min_{q <= q' <= Q} w(q'): suffix minimum, nondecreasing in q
};

struct Minorant {
  MinorantKind kind = MinorantKind::running;
  std::vector<double> g;             ///< g[q-1]
  std::vector<double> partial_sums;  ///< running sum of g(q)/q
};

/// With `running`, g(q)/q is the largest psi' <= psi on [1, Q] whose weight
/// q psi'(q) is nonincreasing, i.e. the largest candidate Khinchin minorant.
/// `tail` gives the suffix-minimum diagnostic instead.
Minorant greatest_khinchin_minorant(const PsiSpec& psi, std::uint64_t Q,
                                    MinorantKind kind = MinorantKind::running);

/// phi(q) = ln q_{k_n} on [q_{k_{n-1}}, q_{k_n}), a nondecreasing step.
/// Requires k_0 = 0, strictly increasing indices within the exact table and
/// q_{k_1} >= 3.
PhiSpec phi_from_proof(const ConvergentTable& table, std::span<const std::size_t> k_seq);

struct DyadicRecord {
  int m = 0;
  std::optional<mpz_class> Q_m;  ///< largest q <= range with phi(q) <= 2^m
  bool capped = false;           ///< Q_m hit the range maximum
  std::size_t count_S = 0;       ///< #{k in S : q_k <= Q_m}
  std::size_t count_T = 0;       ///< #{k in T : q_k <= Q_m}
  double log_sum_T = 0.0;        ///< sum over k in T, q_k <= Q_m, of ln(q_{k+1}/q_k)
  double kappa = 0.0;
  std::optional<double> lambda;  ///< undefined while ln Q_m = 0
};

struct Membership {
  std::size_t k = 0;
  bool in_S = false;
  bool tie = false;  ///< phi(q_k) and q_{k+1}/q_k agree within certification
  double phi_qk = 0.0;
  double ratio = 0.0;
};

struct DyadicReport {
  mpz_class range_max;  ///< q_K of the deepest exact convergent
  std::vector<Membership> membership;
  std::vector<DyadicRecord> records;
};

/// Q_m, kappa_m, lambda_m and the S/T split for m = 0..m_max, where
/// S = {k : phi(q_k) <= q_{k+1}/q_k}. Requires phi nondecreasing.
DyadicReport dyadic_diagnostics(const ConvergentTable& table, const PhiSpec& phi, int m_max);

}  // namespace cfomega
