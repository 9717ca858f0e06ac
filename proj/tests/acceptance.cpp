// Acceptance checks: one [PASS]/[FAIL] line per criterion, exit status 1 if
// any fails.

#include <chrono>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "cfomega/criteria.hpp"
#include "cfomega/orbit_sim.hpp"
#include "cfomega/sequences.hpp"
#include "oracles/oracles.hpp"

using namespace cfomega;

namespace {

const ThetaSpec kGolden = ThetaSpec::periodic({}, {1});

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail << "first failure: " << what << "; ";
      pass = false;
    }
  }
};

const CriterionEntry& entry(const CriterionReport& r, const std::string& name) {
  for (const auto& e : r.entries) {
    if (e.name == name) return e;
  }
  throw Error(Errc::domain_error, "missing classifier " + name);
}

// 1. Exact convergent invariants on random quotient lists.
void exact_invariants(Outcome& out) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> len(1, 60), quot(1, 10), lead(0, 10);
  std::size_t checked = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<mpz_class> a{lead(rng)};
    const int n = len(rng);
    for (int i = 1; i < n; ++i) a.push_back(quot(rng));
    const auto t = build_convergents(a);
    for (std::size_t k = 0; k < a.size(); ++k) {
      const auto [p, q] = oracle::convergent_by_matrix(a, k);
      out.require(t.p(k) == p && t.q(k) == q, "matrix product agrees");
      if (k >= 2) {
        out.require(t.q(k) == a[k] * t.q(k - 1) + t.q(k - 2), "q recurrence");
        out.require(t.p(k) == a[k] * t.p(k - 1) + t.p(k - 2), "p recurrence");
      }
      if (k >= 2) out.require(t.q(k) > t.q(k - 1), "q_k strictly increasing");
      mpz_class g;
      mpz_gcd(g.get_mpz_t(), t.p(k).get_mpz_t(), t.q(k).get_mpz_t());
      out.require(g == 1, "gcd(p_k, q_k) = 1");
      if (k >= 1) {
        const mpz_class det = t.p(k) * t.q(k - 1) - t.p(k - 1) * t.q(k);
        out.require(det == ((k % 2 == 1) ? 1 : -1), "determinant (-1)^(k-1)");
      }
      ++checked;
    }
  }
  out.detail << checked << " convergents from 1000 lists";
}

// 2. Sigma operator against a sort-prefix oracle.
void sigma_operator(Outcome& out) {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> len(0, 40), num(0, 1000), den(1, 50);
  std::uniform_real_distribution<double> alpha(0.0, 45.0);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<mpq_class> v;
    const int n = len(rng);
    for (int i = 0; i < n; ++i) {
      mpq_class x(num(rng), den(rng));
      x.canonicalize();
      v.push_back(x);
    }
    const double a = alpha(rng);
    const mpq_class got = sum_largest<mpq_class>(v, a);
    out.require(got == oracle::sort_prefix_sum(v, a), "exact agreement with sort-prefix");
    out.require(sum_largest<mpq_class>(v, a + 1.0) >= got, "monotone in alpha");
    mpq_class full = 0;
    for (const auto& x : v) full += x;
    out.require(sum_largest<mpq_class>(v, static_cast<double>(n)) == full, "m = n gives the full sum");
    out.require(sum_largest<mpq_class>(v, static_cast<double>(n) + a) == full, "m > n gives the full sum");
  }
  out.detail << "1000 rational instances";
}

// 3. Golden ratio: bounded quotients.
void golden_ratio(Outcome& out) {
  const double ln_phi = std::log(std::numbers::phi);
  const auto r = classify(build_convergents(kGolden, 500));
  const double est = entry(r, "i").estimate;
  out.require(std::fabs(est - ln_phi) < 1e-3, "(i) estimate within 1e-3 of ln phi");

  const auto t = build_convergents(kGolden, 200);
  const auto b = condition_b_report(t, default_eps_grid());
  out.require(b.verdict == Verdict::holds, "condition B holds");
  double worst = 0.0;
  for (const auto& e : b.per_eps) worst = std::max(worst, e.estimate);
  out.require(worst < 0.5, "every condition B estimate < 0.5");
  out.detail << "(i) = " << est << " vs " << ln_phi << ", max B estimate " << worst;
}

// 4. Liouville growth rule.
void liouville(Outcome& out) {
  const auto t = build_convergents(ThetaSpec::growth(GrowthRule::liouville, {0, 2}), 12, TailPolicy::log_domain);
  const auto r = classify(t);
  const auto& v = entry(r, "v");
  for (std::size_t k = 10; k < t.depth(); ++k) {
    out.require(v.series[k].has_value() && *v.series[k] > 5.0, "(v) > 5 from k = 10");
  }
  out.require(v.window.min > 5.0, "(v) window min > 5");
  const auto b = condition_b_report(t, default_eps_grid());
  out.require(b.verdict == Verdict::fails, "condition B fails");
  double least = 1.0;
  for (const auto& e : b.per_eps) least = std::min(least, e.estimate);
  out.require(least > 0.99, "every condition B estimate > 0.99");
  out.detail << "(v) window min " << v.window.min << ", min B estimate " << least << ", exact depth "
             << t.exact_depth();
}

// 5. e pattern: (iv) bounded, against a direct MPFR sweep.
void e_pattern(Outcome& out) {
  const std::size_t K = 3000;
  const auto t = build_convergents(ThetaSpec::e_pattern(), K);
  const auto r = classify(t);
  const auto& iv = entry(r, "iv");
  out.require(iv.window.max < 3.0, "(iv) window max < 3");

  double direct = 0.0;
  for (std::size_t k = iv.window.lo; k <= iv.window.hi && k < t.exact_depth(); ++k) {
    oracle::Real ratio(256), lq(256);
    mpfr_set_z(ratio.get(), t.q(k + 1).get_mpz_t(), MPFR_RNDN);
    mpfr_div_z(ratio.get(), ratio.get(), t.q(k).get_mpz_t(), MPFR_RNDN);
    mpfr_set_z(lq.get(), t.q(k).get_mpz_t(), MPFR_RNDN);
    mpfr_log(lq.get(), lq.get(), MPFR_RNDN);
    mpfr_div(ratio.get(), ratio.get(), lq.get(), MPFR_RNDN);
    direct = std::max(direct, ratio.to_double());
  }
  out.require(std::fabs(iv.window.max - direct) <= 1e-12 * direct, "window max matches direct sweep");
  out.detail << "(iv) window max " << iv.window.max << ", direct " << direct;
}

// Kim partial sum from MPFR logs.
double kim_direct(const ConvergentTable& t, std::size_t start, std::size_t K, bool squared) {
  oracle::Real sum(256);
  for (std::size_t k = start; k <= K; ++k) {
    oracle::Real phi(256), lr(256), lphi(256);
    mpfr_set_z(phi.get(), t.q(k).get_mpz_t(), MPFR_RNDN);
    mpfr_log(phi.get(), phi.get(), MPFR_RNDN);
    if (squared) mpfr_sqr(phi.get(), phi.get(), MPFR_RNDN);
    mpfr_set_z(lr.get(), t.q(k + 1).get_mpz_t(), MPFR_RNDN);
    mpfr_div_z(lr.get(), lr.get(), t.q(k).get_mpz_t(), MPFR_RNDN);
    mpfr_log(lr.get(), lr.get(), MPFR_RNDN);
    mpfr_log(lphi.get(), phi.get(), MPFR_RNDN);
    mpfr_min(lphi.get(), lphi.get(), lr.get(), MPFR_RNDN);
    mpfr_div(lphi.get(), lphi.get(), phi.get(), MPFR_RNDN);
    mpfr_add(sum.get(), sum.get(), lphi.get(), MPFR_RNDN);
  }
  return sum.to_double();
}

// 6. Kim series: divergence for ln, convergence for ln^2.
void kim(Outcome& out) {
  const std::size_t K = 2000;
  const auto t = build_convergents(kGolden, K + 1);
  const auto ln = kim_series(t, PhiSpec::closed(PhiFamily::log), K);
  out.require(ln.slope >= 0.5, "ln: slope vs ln k >= 0.5");
  const double ln_direct = kim_direct(t, ln.start, K, false);
  out.require(std::fabs(*ln.partial_sums[K] - ln_direct) <= 1e-10 * ln_direct, "ln: partial sum matches MPFR sum");

  const auto sq = kim_series(t, PhiSpec::closed(PhiFamily::log2), K);
  const double s = *sq.partial_sums[K];
  out.require(s < 2.0, "ln^2: partial sum < 2");
  out.require(sq.cauchy_tail < 1e-3, "ln^2: Cauchy tail < 1e-3");
  const double sq_direct = kim_direct(t, sq.start, K, true);
  out.require(std::fabs(s - sq_direct) <= 1e-10 * sq_direct, "ln^2: partial sum matches MPFR sum");
  out.detail << "ln slope " << ln.slope << "; ln^2 S = " << s << " (direct " << sq_direct << "), tail "
             << sq.cauchy_tail;
}

// 7. Remark counterexample with n_k = k(k+1)/2, k <= 6.
void remark(Outcome& out) {
  std::vector<int> n;
  for (int k = 0; k <= 6; ++k) n.push_back(k * (k + 1) / 2);
  const auto psi = remark_counterexample(n);
  const auto sums = block_sums(std::get<StepFunction>(psi.rep()));
  for (std::size_t k = 1; k < n.size(); ++k) {
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), 2, static_cast<unsigned long>(n[k] - n[k - 1]));
    out.require(sums[k - 1] == 1 - mpq_class(1, den), "block sum 1 - 2^(n_{k-1} - n_k)");
  }
  const std::uint64_t Q = (std::uint64_t{1} << n.back()) - 1;
  out.require(!khinchin_validate(psi, Q).monotone_ok, "monotone_ok = false");

  const auto w = [&](std::uint64_t q) { return psi.weight(q); };
  const auto tail = greatest_khinchin_minorant(psi, Q, MinorantKind::tail);
  const auto running = greatest_khinchin_minorant(psi, Q, MinorantKind::running);

  // brute force one q at a time: every q below 2^10, then a sample across the range
  std::vector<std::uint64_t> qs;
  for (std::uint64_t q = 1; q < 1024; ++q) qs.push_back(q);
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::uint64_t> pick(1, Q);
  for (int i = 0; i < 40; ++i) qs.push_back(pick(rng));
  for (int k = 0; k <= 6; ++k) {
    qs.push_back(std::uint64_t{1} << n[k]);
    if (n[k] > 0) qs.push_back((std::uint64_t{1} << n[k]) - 1);
  }
  const double beyond = oracle::suffix_min_at(w, 1024, Q);
  for (std::uint64_t q : qs) {
    if (q > Q) continue;
    const double g_tail =
        q < 1024 ? std::min(oracle::suffix_min_at(w, q, 1023), beyond) : oracle::remark_tail_minorant(n, q);
    out.require(tail.g[q - 1] == g_tail, "suffix minimum matches brute force");
    out.require(tail.g[q - 1] == oracle::remark_tail_minorant(n, q), "suffix minimum matches block formula");
    out.require(running.g[q - 1] == oracle::prefix_min_at(w, q), "running minimum matches brute force");
  }
  for (int i = 0; i < 5; ++i) {
    const std::uint64_t q = pick(rng);
    out.require(tail.g[q - 1] == oracle::suffix_min_at(w, q, Q), "suffix minimum matches full scan");
  }
  double tail_max = 0.0, running_max = 0.0;
  for (double s : tail.partial_sums) tail_max = std::max(tail_max, s);
  for (double s : running.partial_sums) running_max = std::max(running_max, s);
  out.require(tail_max <= 2.0, "suffix-minimum partial sums <= 2");
  out.require(running_max <= 2.0, "running-minimum partial sums <= 2");
  out.detail << "range [1, " << Q << "], sum g(q)/q: suffix " << tail_max << ", running " << running_max;
}

// 8. Dyadic diagnostics for phi = ln on the golden ratio.
void dyadic(Outcome& out) {
  const std::size_t K = 80;
  const int m_max = 8;
  const auto t = build_convergents(kGolden, K);
  const auto report = dyadic_diagnostics(t, PhiSpec::closed(PhiFamily::log), m_max);
  out.require(report.records.size() == static_cast<std::size_t>(m_max + 1), "one record per m");
  out.require(report.records[0].Q_m && *report.records[0].Q_m == 2, "Q_0 = 2");

  // S membership from MPFR: ln q_k <= q_{k+1}/q_k
  std::vector<bool> in_S(K);
  for (std::size_t k = 0; k < K; ++k) {
    oracle::Real lq(256), ratio(256);
    mpfr_set_z(lq.get(), t.q(k).get_mpz_t(), MPFR_RNDN);
    mpfr_log(lq.get(), lq.get(), MPFR_RNDN);
    mpfr_set_z(ratio.get(), t.q(k + 1).get_mpz_t(), MPFR_RNDN);
    mpfr_div_z(ratio.get(), ratio.get(), t.q(k).get_mpz_t(), MPFR_RNDN);
    in_S[k] = mpfr_lessequal_p(lq.get(), ratio.get()) != 0;
  }
  double worst = 0.0;
  for (int m = 0; m <= m_max; ++m) {
    const auto& rec = report.records[static_cast<std::size_t>(m)];
    // Q_m = min(floor(exp(2^m)), q_K)
    oracle::Real e(4096);
    mpfr_set_ui_2exp(e.get(), 1, m, MPFR_RNDN);
    mpfr_exp(e.get(), e.get(), MPFR_RNDN);
    mpz_class Q;
    mpfr_get_z(Q.get_mpz_t(), e.get(), MPFR_RNDD);
    if (Q > t.q(K)) Q = t.q(K);
    out.require(rec.Q_m && *rec.Q_m == Q, "Q_m = min(floor(e^(2^m)), q_K)");
    if (m > 0) out.require(*rec.Q_m >= *report.records[static_cast<std::size_t>(m - 1)].Q_m, "Q_m nondecreasing");

    oracle::Real num(256);
    std::size_t count_S = 0;
    for (std::size_t k = 0; k < K; ++k) {
      if (t.q(k) > Q) continue;
      if (in_S[k]) {
        ++count_S;
      } else {
        oracle::Real lr(256);
        mpfr_set_z(lr.get(), t.q(k + 1).get_mpz_t(), MPFR_RNDN);
        mpfr_div_z(lr.get(), lr.get(), t.q(k).get_mpz_t(), MPFR_RNDN);
        mpfr_log(lr.get(), lr.get(), MPFR_RNDN);
        mpfr_add(num.get(), num.get(), lr.get(), MPFR_RNDN);
      }
    }
    mpfr_add_ui(num.get(), num.get(), static_cast<unsigned long>(m) * count_S, MPFR_RNDN);
    oracle::Real lQ(256);
    mpfr_set_z(lQ.get(), Q.get_mpz_t(), MPFR_RNDN);
    mpfr_log(lQ.get(), lQ.get(), MPFR_RNDN);
    mpfr_div(num.get(), num.get(), lQ.get(), MPFR_RNDN);
    const double lambda = num.to_double();
    out.require(rec.lambda.has_value(), "lambda defined");
    if (rec.lambda) {
      const double rel = std::fabs(*rec.lambda - lambda) / std::max(std::fabs(lambda), 1e-300);
      worst = std::max(worst, rel);
      out.require(rel <= 1e-10, "lambda_m matches direct sum to 1e-10");
    }
  }
  out.detail << "m = 0.." << m_max << ", worst lambda relative error " << worst;
}

// 9. ArcUnion measure against grid counting and insertion order.
void arc_union(Outcome& out) {
  constexpr std::size_t G = 1'000'000;
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<std::uint64_t> center(0, G - 1), count(1, 300), radius(0, 20000);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::pair<double, double>> arcs;
    const auto n = count(rng);
    for (std::uint64_t i = 0; i < n; ++i) {
      // grid-aligned endpoints so the grid count is exact
      const std::uint64_t r = radius(rng) >> (trial % 8);
      arcs.emplace_back(static_cast<double>(center(rng)) / G, static_cast<double>(r) / G);
    }
    ArcUnion u;
    for (const auto& [c, r] : arcs) u.insert_arc(c, r);
    std::vector<std::pair<double, double>> normal;
    for (const auto& a : u.arcs()) normal.emplace_back(a.l, a.r);
    const double diff = std::fabs(u.measure() - oracle::rasterize(normal, G));
    // and directly from the inserted arcs, unmerged
    std::vector<std::pair<double, double>> raw;
    for (const auto& [c, r] : arcs) {
      if (r >= 0.5) {
        raw.emplace_back(0.0, 1.0);
      } else {
        raw.emplace_back(c - r, c + r);
        raw.emplace_back(c - r + 1.0, c + r + 1.0);
        raw.emplace_back(c - r - 1.0, c + r - 1.0);
      }
    }
    const double diff_raw = std::fabs(u.measure() - oracle::rasterize(raw, G));
    worst = std::max({worst, diff, diff_raw});
    out.require(diff <= 2e-6 && diff_raw <= 2e-6, "measure within 2e-6 of the grid count");

    for (int s = 0; s < 3; ++s) {
      std::shuffle(arcs.begin(), arcs.end(), rng);
      ArcUnion v;
      for (const auto& [c, r] : arcs) v.insert_arc(c, r);
      out.require(v.arcs() == u.arcs(), "identical normal form after shuffling");
      out.require(std::bit_cast<std::uint64_t>(v.measure()) == std::bit_cast<std::uint64_t>(u.measure()),
                  "identical measure bits after shuffling");
    }
  }
  out.detail << "100 arc sets, worst deviation " << worst;
}

// 10. Tail measure profiles.
void simulation(Outcome& out) {
  const std::vector<std::uint64_t> cps{1000, 10000, 100000};
  const auto kh = tail_measure_profile(kGolden, PsiSpec::closed(PsiFamily::inv_q_log, 1.0), 100, cps);
  for (std::size_t j = 1; j < kh.points.size(); ++j) {
    out.require(kh.points[j].inner >= kh.points[j - 1].inner, "inner measure monotone");
    out.require(kh.points[j].outer >= kh.points[j - 1].outer, "outer measure monotone");
  }
  out.require(kh.points.back().inner >= 0.9, "Khinchin inner measure >= 0.9 at 1e5");

  // sum_{q >= 100} 2/q^2 = 2 (pi^2/6 - sum_{q < 100} 1/q^2)
  oracle::Real bound(256), term(256);
  mpfr_const_pi(bound.get(), MPFR_RNDN);
  mpfr_sqr(bound.get(), bound.get(), MPFR_RNDN);
  mpfr_div_ui(bound.get(), bound.get(), 6, MPFR_RNDN);
  for (unsigned long q = 1; q < 100; ++q) {
    mpfr_set_ui(term.get(), 1, MPFR_RNDN);
    mpfr_div_ui(term.get(), term.get(), q * q, MPFR_RNDN);
    mpfr_sub(bound.get(), bound.get(), term.get(), MPFR_RNDN);
  }
  mpfr_mul_ui(bound.get(), bound.get(), 2, MPFR_RNDN);
  const double tail_bound = bound.to_double();
  const auto sq = tail_measure_profile(kGolden, PsiSpec::closed(PsiFamily::inv_q2, 1.0), 100, cps);
  out.require(sq.points.back().outer <= tail_bound, "1/q^2 outer measure <= sum of 2/q^2");
  out.require(sq.points.back().inner <= sq.points.back().union_bound, "1/q^2 inner measure <= finite union bound");
  out.detail << "Khinchin inner " << kh.points.back().inner << "; 1/q^2 outer " << sq.points.back().outer
             << " <= " << tail_bound;
}

// 11. hit_count against target_union membership.
void coherence(Outcome& out) {
  struct Config {
    const char* name;
    ThetaSpec theta;
    PsiSpec psi;
    std::uint64_t Q0, Q;
  };
  const std::vector<Config> configs{
      {"golden, Khinchin", kGolden, PsiSpec::closed(PsiFamily::inv_q_log, 1.0), 1, 20000},
      {"golden, 1/q^2", kGolden, PsiSpec::closed(PsiFamily::inv_q2, 1.0), 1, 20000},
      {"sqrt 2, 1/(2q)", ThetaSpec::periodic({1}, {2}), PsiSpec::closed(PsiFamily::inv_q, 0.5), 100, 20000},
      {"e, Khinchin", ThetaSpec::e_pattern(), PsiSpec::closed(PsiFamily::inv_q_log, 1.0), 1, 20000},
  };
  std::mt19937_64 rng(20240601);
  std::size_t contradictions = 0, uncertain = 0, hits = 0;
  for (const auto& c : configs) {
    const auto points = orbit_points(c.theta, c.Q0, c.Q);
    ArcUnion u;
    for (std::size_t i = 0; i < points.size(); ++i) u.insert_arc(points[i], c.psi(c.Q0 + i), Bound::nominal);
    for (int i = 0; i < 200; ++i) {
      const double s = static_cast<double>(rng() >> 11) * 0x1p-53;
      const auto r = hit_count(points, c.Q0, [&](std::uint64_t q) { return c.psi(q); }, s);
      if (r.uncertain > 0) {
        ++uncertain;
        continue;
      }
      if ((r.count > 0) != u.contains(s)) ++contradictions;
      if (r.count > 0) ++hits;
    }
  }
  out.require(contradictions == 0, "no contradictions");
  out.detail << "4 x 200 points, " << hits << " hit, " << uncertain << " with uncertain margins, " << contradictions
             << " contradictions";
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    void (*run)(Outcome&);
    double limit_seconds;  // 0: no limit
  };
  const Criterion criteria[] = {
      {1, "exact convergent invariants", exact_invariants, 10.0},
      {2, "sum of largest entries", sigma_operator, 0.0},
      {3, "golden ratio classification", golden_ratio, 5.0},
      {4, "Liouville growth rule", liouville, 5.0},
      {5, "e pattern", e_pattern, 0.0},
      {6, "Kim series", kim, 0.0},
      {7, "dyadic step counterexample", remark, 0.0},
      {8, "dyadic diagnostics", dyadic, 0.0},
      {9, "arc union exactness", arc_union, 0.0},
      {10, "tail measure profiles", simulation, 60.0},
      {11, "hit count coherence", coherence, 0.0},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome out;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.run(out);
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail << "exception: " << e.what();
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limit_seconds > 0.0 && seconds >= c.limit_seconds) {
      out.pass = false;
      out.detail << "; over the " << c.limit_seconds << " s limit";
    }
    if (!out.pass) ++failures;
    std::printf("[%s] %2d %-30s %7.3f s  %s\n", out.pass ? "PASS" : "FAIL", c.id, c.name, seconds,
                out.detail.str().c_str());
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(std::size(criteria)) - failures, std::size(criteria));
  return failures == 0 ? 0 : 1;
}
