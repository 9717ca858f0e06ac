#include "doctest.h"

#include <numbers>
#include <random>

#include "cfomega/criteria.hpp"
#include "oracles/oracles.hpp"

using namespace cfomega;

namespace {

const ThetaSpec kGolden = ThetaSpec::periodic({}, {1});

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return Errc::domain_error;
}

const CriterionEntry& entry(const CriterionReport& r, const std::string& name) {
  for (const auto& e : r.entries) {
    if (e.name == name) return e;
  }
  FAIL("missing entry " << name);
  return r.entries.front();
}

}  // namespace

TEST_CASE("sum_largest: examples and errors") {
  const std::vector<double> v{3, 1, 2};
  CHECK(sum_largest<double>(v, 2) == 5);
  CHECK(sum_largest<double>(v, 0.9) == 0);
  CHECK(sum_largest<double>(v, 7) == 6);
  CHECK(sum_largest<double>(v, 3) == 6);
  CHECK(sum_largest<double>({}, 4) == 0);
  CHECK(code_of([&] { sum_largest<double>(v, -1); }) == Errc::domain_error);
  CHECK(code_of([&] { sum_largest<double>(v, NAN); }) == Errc::domain_error);
  const std::vector<double> neg{1, -2};
  CHECK(code_of([&] { sum_largest<double>(neg, 1); }) == Errc::domain_error);
}

TEST_CASE("sum_largest: exact rationals against sort-prefix") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    std::uniform_int_distribution<int> len(0, 30), num(0, 1000), den(1, 97);
    std::vector<mpq_class> xs;
    const int n = len(rng);
    for (int i = 0; i < n; ++i) {
      mpq_class x(num(rng), den(rng));
      x.canonicalize();
      xs.push_back(x);
    }
    const double alpha = std::uniform_real_distribution<double>(0, 40)(rng);
    CHECK(sum_largest<mpq_class>(xs, alpha) == oracle::sort_prefix_sum(xs, alpha));
  }
}

TEST_CASE("sum_largest: monotone in alpha and in entries") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(0, 10);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> xs(20);
    for (auto& x : xs) x = std::floor(u(rng) * 8) / 8;  // dyadic, sums exact
    double prev = 0;
    for (double alpha = 0; alpha <= 25; alpha += 0.5) {
      const double s = sum_largest<double>(xs, alpha);
      CHECK(s >= prev);
      prev = s;
    }
    auto bumped = xs;
    bumped[trial % 20] += 1.0;
    for (double alpha : {1.0, 5.0, 19.0}) CHECK(sum_largest<double>(bumped, alpha) >= sum_largest<double>(xs, alpha));
  }
}

TEST_CASE("condition B statistic: golden ratio at k = 100") {
  const auto t = build_convergents(kGolden, 120);
  // cutoff floor(ln q_100 / ln ln q_100) = 12 largest log ratios
  CHECK(condition_b_statistic(t, 1.0, 100) == doctest::Approx(0.12597098552300448).epsilon(1e-12));
  CHECK(condition_b_statistic(t, 1e-3, 100) == 0.0);
  CHECK(code_of([&] { condition_b_statistic(t, 1.0, 2); }) == Errc::below_admissible_index);
  CHECK(code_of([&] { condition_b_statistic(t, 1.0, 121); }) == Errc::insufficient_depth);
  CHECK(first_admissible_index(t) == 3);  // q_3 = 3
}

TEST_CASE("condition B statistic: direct oracle, bounds and monotonicity in eps") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    std::uniform_int_distribution<long> a(1, trial % 2 ? 3 : 200);
    std::vector<mpz_class> quotients{0};
    for (int i = 0; i < 80; ++i) quotients.emplace_back(a(rng));
    const auto t = build_convergents(quotients);
    const auto q = oracle::denominators(quotients);
    const std::size_t k0 = first_admissible_index(t);
    for (std::size_t k = k0; k <= 80; k += 7) {
      double prev = 0.0;
      for (double eps : {0.01, 0.1, 0.5, 1.0, 2.0, 8.0, 100.0}) {
        const double s = condition_b_statistic(t, eps, k);
        CHECK(s >= 0.0);
        CHECK(s <= 1.0);
        CHECK(s >= prev);
        prev = s;
        CHECK(s == doctest::Approx(oracle::condition_b_direct(q, eps, k)).epsilon(1e-12));
      }
    }
    CHECK(condition_b_statistic(t, 1e9, 80) == 1.0);
  }
}

TEST_CASE("condition B report") {
  const auto golden = build_convergents(kGolden, 200);
  const std::vector<double> grid{1, 0.5, 0.25};
  const auto report = condition_b_report(golden, grid);
  CHECK(report.verdict == Verdict::holds);
  for (const auto& e : report.per_eps) CHECK(e.estimate < 0.5);

  const auto liouville =
      build_convergents(ThetaSpec::growth(GrowthRule::liouville, {0, 2}), 12, TailPolicy::log_domain);
  const auto lr = condition_b_report(liouville, default_eps_grid());
  CHECK(lr.verdict == Verdict::fails);
  for (const auto& e : lr.per_eps) CHECK(e.estimate > 0.99);

  const auto shallow = build_convergents(kGolden, 5);
  CHECK(code_of([&] { condition_b_report(shallow, grid); }) == Errc::insufficient_depth);
  const std::vector<double> increasing{0.25, 0.5};
  CHECK(code_of([&] { condition_b_report(golden, increasing); }) == Errc::domain_error);
  CHECK(code_of([&] { condition_b_report(golden, std::vector<double>{}); }) == Errc::domain_error);
}

TEST_CASE("window statistics") {
  std::vector<std::optional<double>> s(11);
  for (std::size_t k = 1; k <= 10; ++k) s[k] = static_cast<double>(k % 4);
  const auto w = window_stats(s, 10, WindowConfig{});
  CHECK(w.lo == 5);
  CHECK(w.mid == 8);
  CHECK(w.hi == 10);
  CHECK(w.count == 6);
  CHECK(w.max == 3);
  CHECK(w.min == 0);
  CHECK(w.leading_max == 3);   // k = 7
  CHECK(w.trailing_max == 2);  // k = 10
  CHECK_FALSE(w.stable);
}

TEST_CASE("Kim series") {
  const auto t = build_convergents(kGolden, 2100);
  const auto trace = kim_series(t, PhiSpec::closed(PhiFamily::log), 2000);
  REQUIRE(trace.terms[10]);
  CHECK(*trace.terms[10] == doctest::Approx(0.10719891080697524).epsilon(1e-13));
  CHECK(trace.start == 3);  // ln q_3 = ln 3 >= 1
  CHECK(trace.slope >= 0.5);
  CHECK(trace.divergence_evidence);
  for (std::size_t k = trace.start + 1; k <= 2000; ++k) CHECK(*trace.partial_sums[k] >= *trace.partial_sums[k - 1]);

  const auto sq = kim_series(t, PhiSpec::closed(PhiFamily::log2), 2000);
  CHECK(*sq.partial_sums[2000] < 2.0);
  CHECK(*sq.partial_sums[2000] == doctest::Approx(0.87721).epsilon(1e-4));
  CHECK(sq.cauchy_tail < 1e-3);
  CHECK(sq.cauchy_tail == doctest::Approx(1.156e-4).epsilon(1e-2));
  CHECK_FALSE(sq.divergence_evidence);

  const auto one = kim_series(t, PhiSpec::closed(PhiFamily::constant, 1.0), 100);
  CHECK(one.start == 0);
  for (std::size_t k = 0; k <= 100; ++k) CHECK(*one.partial_sums[k] == 0.0);

  CHECK(code_of([&] { kim_series(t, PhiSpec::closed(PhiFamily::constant, 0.5), 100); }) == Errc::phi_below_one);
  KimOptions forced;
  forced.start = 0;
  CHECK(code_of([&] { kim_series(t, PhiSpec::closed(PhiFamily::log), 100, forced); }) == Errc::phi_below_one);
  CHECK(code_of([&] { kim_series(t, PhiSpec::closed(PhiFamily::log), 2100); }) == Errc::insufficient_depth);
}

TEST_CASE("Kim series reads phi only at q_k") {
  const auto t = build_convergents(kGolden, 60);
  std::vector<mpz_class> breaks{1};
  std::vector<double> values;
  for (std::size_t k = 2; k <= 60; ++k) {
    breaks.push_back(t.q(k));
    values.push_back(std::max(1.0, std::log(t.q(k - 1).get_d())));
  }
  breaks.push_back(t.q(60) + 1);
  values.push_back(std::log(t.q(60).get_d()));
  // a step phi that agrees with max(1, ln q) exactly at every q_k, k >= 1
  const PhiSpec step = PhiSpec::step(StepFunction(breaks, values));
  const PhiSpec closed = PhiSpec::closed(PhiFamily::log);
  KimOptions opts;
  opts.start = 3;
  const auto a = kim_series(t, closed, 59, opts);
  const auto b = kim_series(t, step, 59, opts);
  for (std::size_t k = 3; k <= 59; ++k) CHECK(*a.terms[k] == doctest::Approx(*b.terms[k]).epsilon(1e-15));
}

TEST_CASE("classify: golden ratio") {
  const auto t = build_convergents(kGolden, 500);
  const auto r = classify(t);
  CHECK(r.omega == OmegaVerdict::in_omega);
  CHECK_FALSE(r.conflict);
  const double ln_phi = std::log(std::numbers::phi);
  CHECK(std::fabs(entry(r, "i").estimate - ln_phi) < 1e-3);
  CHECK(entry(r, "i").verdict == Verdict::holds);
  CHECK(entry(r, "iv").verdict == Verdict::holds);
  CHECK(entry(r, "v").verdict == Verdict::fails);
}

TEST_CASE("classify: Liouville growth") {
  const auto t = build_convergents(ThetaSpec::growth(GrowthRule::liouville, {0, 2}), 12, TailPolicy::log_domain);
  const auto r = classify(t);
  CHECK(r.omega == OmegaVerdict::not_in_omega);
  const auto& v = entry(r, "v");
  CHECK(v.verdict == Verdict::holds);
  for (std::size_t k = 10; k < 12; ++k) CHECK(*v.series[k] > 5.0);
  CHECK(v.window.min > 5.0);
}

TEST_CASE("classify: e pattern") {
  const auto t = build_convergents(ThetaSpec::e_pattern(), 3000);
  const auto r = classify(t);
  CHECK(r.omega == OmegaVerdict::in_omega);
  const auto& iv = entry(r, "iv");
  CHECK(iv.window.max < 3.0);
  CHECK(iv.window.max == doctest::Approx(0.30306).epsilon(1e-4));
  CHECK(iv.verdict == Verdict::holds);
}

TEST_CASE("classify: no conflicts across the corpus") {
  std::vector<std::pair<ThetaSpec, std::size_t>> corpus{
      {kGolden, 300},
      {ThetaSpec::periodic({1}, {2}), 300},
      {ThetaSpec::periodic({3}, {7, 1, 15, 1, 292}), 300},
      {ThetaSpec::e_pattern(), 1000},
      {ThetaSpec::growth(GrowthRule::linear, {0, 1}), 300},
      {ThetaSpec::growth(GrowthRule::square, {0, 1}), 30},
      {ThetaSpec::growth(GrowthRule::liouville, {0, 2}), 12},
  };
  for (const auto& [spec, K] : corpus) {
    const auto policy = spec.kind == ThetaSpec::Kind::growth_rule ? TailPolicy::log_domain : TailPolicy::exact_only;
    const auto r = classify(build_convergents(spec, K, policy));
    CHECK_FALSE(r.conflict);
    CHECK(r.omega != OmegaVerdict::inconclusive);
  }
  CHECK(classify(build_convergents(ThetaSpec::growth(GrowthRule::square, {0, 1}), 30, TailPolicy::log_domain)).omega ==
        OmegaVerdict::not_in_omega);
  CHECK(classify(build_convergents(ThetaSpec::growth(GrowthRule::linear, {0, 1}), 300)).omega ==
        OmegaVerdict::in_omega);
}

TEST_CASE("classify: shallow table") {
  CHECK(code_of([] { classify(build_convergents(kGolden, 8)); }) == Errc::insufficient_depth);
}
