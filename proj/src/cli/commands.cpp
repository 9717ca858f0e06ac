#include "cfomega/cli/commands.hpp"

#include <algorithm>
#include <random>

#include "cfomega/cli/spec_file.hpp"
#include "cfomega/error.hpp"
#include "cfomega/format.hpp"

namespace cfomega::cli {

using json = nlohmann::ordered_json;

namespace {

OmegaVerdict from_condition_b(Verdict v) {
  switch (v) {
    case Verdict::holds: return OmegaVerdict::in_omega;
    case Verdict::fails: return OmegaVerdict::not_in_omega;
    case Verdict::inconclusive: return OmegaVerdict::inconclusive;
  }
  return OmegaVerdict::inconclusive;
}

bool wants_csv(const RunConfig& cfg) { return cfg.format != OutputFormat::json_tree; }
bool wants_json(const RunConfig& cfg) { return cfg.format != OutputFormat::csv; }

const std::string& require_path(const std::string& path, const char* flag) {
  if (path.empty()) throw Error(Errc::domain_error, std::string(flag) + " is required");
  return path;
}

// Uniform doubles in [0, 1) from the top 53 bits of mt19937_64.
std::vector<double> sample_points(std::uint64_t seed, std::size_t n) {
  std::mt19937_64 gen(seed);
  std::vector<double> s(n);
  for (auto& x : s) x = std::ldexp(static_cast<double>(gen() >> 11), -53);
  return s;
}

std::vector<std::uint64_t> default_checkpoints(std::uint64_t Q0, std::uint64_t Q) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t c = 10; c < Q; c *= 10) {
    if (c >= Q0) out.push_back(c);
  }
  out.push_back(Q);
  return out;
}

std::string q_text(const mpz_class& q) { return q.get_str(); }

}  // namespace

AnalyzeResult combine(CriterionReport classify, ConditionBReport condition_b) {
  AnalyzeResult r;
  r.classify = std::move(classify);
  r.condition_b = std::move(condition_b);
  const OmegaVerdict c = r.classify.omega;
  const OmegaVerdict b = from_condition_b(r.condition_b.verdict);
  if (r.classify.conflict) {
    r.conflict = true;
  } else if (c != OmegaVerdict::inconclusive && b != OmegaVerdict::inconclusive && c != b) {
    r.conflict = true;
  } else {
    r.omega = c != OmegaVerdict::inconclusive ? c : b;
  }
  if (r.omega != OmegaVerdict::inconclusive) {
    for (const auto& e : r.classify.entries) {
      if (e.verdict == Verdict::holds && e.implies == r.omega) r.decided_by.push_back(e.name);
    }
    if (b == r.omega) r.decided_by.push_back("condition_b");
  }
  return r;
}

ConvergentTable analysis_table(const ThetaSpec& theta, std::optional<std::size_t> depth, std::size_t fallback) {
  if (theta.kind == ThetaSpec::Kind::explicit_list) {
    const std::size_t available = theta.seed.size() - 1;
    const std::size_t K = depth.value_or(available);
    if (K > available) {
      throw Error(Errc::insufficient_quotients,
                  "depth " + std::to_string(K) + " needs " + std::to_string(K + 1) + " quotients, have " +
                      std::to_string(available + 1));
    }
    return build_convergents(std::span(theta.seed).first(K + 1));
  }
  const auto policy =
      theta.kind == ThetaSpec::Kind::growth_rule ? TailPolicy::log_domain : TailPolicy::exact_only;
  return build_convergents(theta, depth.value_or(fallback), policy);
}

int run_analyze(const RunConfig& cfg, std::ostream& log) {
  const ThetaSpec theta = load_theta_spec(require_path(cfg.theta_path, "--theta"));
  const ConvergentTable table = analysis_table(theta, cfg.depth, 200);
  WindowConfig wc;
  wc.fraction = cfg.window;
  const std::vector<double> grid = cfg.eps_grid.empty() ? default_eps_grid() : cfg.eps_grid;
  const AnalyzeResult result = combine(classify(table, wc), condition_b_report(table, grid, wc));

  const json header = header_json(cfg, json{{"theta", write_theta_spec(theta)}});
  if (wants_json(cfg)) {
    json doc;
    doc["header"] = header;
    doc["depth"] = table.depth();
    doc["exact_depth"] = table.exact_depth();
    doc["verdict"] = to_string(result.omega);
    doc["conflict"] = result.conflict;
    doc["decided_by"] = result.decided_by;
    doc["classifiers"] = to_json(result.classify);
    doc["condition_b"] = to_json(result.condition_b);
    write_output(cfg.out_dir, "analyze.json", dump(doc));
  }
  if (wants_csv(cfg)) {
    write_output(cfg.out_dir, "analyze.csv",
                 header_comment(header) + criteria_csv(table, result.classify, &result.condition_b));
  }
  log << "verdict: " << to_string(result.omega);
  if (!result.decided_by.empty()) {
    log << " (";
    for (std::size_t i = 0; i < result.decided_by.size(); ++i) log << (i ? ", " : "") << result.decided_by[i];
    log << ")";
  }
  if (result.conflict) log << " [conflicting conditions]";
  log << "\n";
  return result.omega == OmegaVerdict::inconclusive ? kExitInconclusive : kExitOk;
}

int run_kim_series(const RunConfig& cfg, std::ostream& log) {
  const ThetaSpec theta = load_theta_spec(require_path(cfg.theta_path, "--theta"));
  const SequenceSpec seq = load_sequence_spec(require_path(cfg.psi_path, "--psi"));
  const PhiSpec phi = as_phi(seq);
  const std::size_t K = cfg.depth.value_or(2000);
  const ConvergentTable table = theta.kind == ThetaSpec::Kind::explicit_list
                                    ? analysis_table(theta, K + 1, K + 1)
                                    : build_convergents(theta, K + 1, TailPolicy::exact_only);
  KimOptions opts;
  opts.window_fraction = cfg.window;
  const KimSeriesTrace trace = kim_series(table, phi, K, opts);

  const json header =
      header_json(cfg, json{{"theta", write_theta_spec(theta)}, {"psi", write_sequence_spec(seq)}});
  if (wants_json(cfg)) {
    json doc;
    doc["header"] = header;
    doc["kim_series"] = to_json(trace);
    write_output(cfg.out_dir, "kim_series.json", dump(doc));
  }
  if (wants_csv(cfg)) write_output(cfg.out_dir, "kim_series.csv", header_comment(header) + kim_csv(table, phi, trace));
  log << "partial sum S_" << trace.last << " = " << format_double(trace.partial_sums[trace.last].value_or(0.0))
      << ", slope vs ln k = " << format_double(trace.slope) << ", tail = " << format_double(trace.cauchy_tail)
      << (trace.divergence_evidence ? " (divergence evidence)" : " (no divergence evidence)") << "\n";
  return kExitOk;
}

int run_simulate(const RunConfig& cfg, std::ostream& log) {
  const ThetaSpec theta = load_theta_spec(require_path(cfg.theta_path, "--theta"));
  const SequenceSpec seq = load_sequence_spec(require_path(cfg.psi_path, "--psi"));
  const PsiSpec psi = as_psi(seq);
  const std::uint64_t Q0 = cfg.q0.value_or(1);
  const std::uint64_t Q = cfg.q.value_or(10000);
  if (Q < Q0) throw Error(Errc::domain_error, "--q must be at least --q0");
  const std::vector<std::uint64_t> checkpoints = cfg.checkpoints.empty() ? default_checkpoints(Q0, Q) : cfg.checkpoints;
  if (checkpoints.back() != Q) throw Error(Errc::domain_error, "last checkpoint must equal --q");

  const MeasureProfile profile = tail_measure_profile(theta, psi, Q0, checkpoints, cfg.delta);
  const auto points = orbit_points(theta, Q0, Q, cfg.delta);
  ArcUnion nominal;
  for (std::uint64_t i = 0; i < points.size(); ++i) nominal.insert_arc(points[i], psi(Q0 + i), Bound::nominal);

  const auto s = sample_points(cfg.seed, cfg.samples);
  const RadiusFn radius = [&psi](std::uint64_t q) { return psi(q); };
  std::string samples = "sample,s,hits,uncertain,in_union\n";
  std::string hits = "sample,q,distance,psi_q,margin,certain\n";
  std::size_t contradictions = 0;
  std::size_t undecided = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const HitReport report = hit_count(points, Q0, radius, s[i]);
    const bool in_union = nominal.contains(s[i]);
    if (report.uncertain > 0) {
      ++undecided;
    } else if ((report.count > 0) != in_union) {
      ++contradictions;
    }
    samples += std::to_string(i) + "," + format_double(s[i]) + "," + std::to_string(report.count) + "," +
               std::to_string(report.uncertain) + "," + (in_union ? "true" : "false") + "\n";
    for (const auto& h : report.hits) {
      hits += std::to_string(i) + "," + std::to_string(h.q) + "," + format_double(h.distance) + "," +
              format_double(h.psi_q) + "," + format_double(h.margin) + "," + (h.certain ? "true" : "false") + "\n";
    }
  }

  bool monotone = true;
  bool below_bound = true;
  for (std::size_t j = 0; j < profile.points.size(); ++j) {
    const auto& p = profile.points[j];
    if (j > 0 && (p.inner < profile.points[j - 1].inner || p.outer < profile.points[j - 1].outer)) monotone = false;
    if (p.inner > p.union_bound) below_bound = false;
  }

  const json header =
      header_json(cfg, json{{"theta", write_theta_spec(theta)}, {"psi", write_sequence_spec(seq)}});
  const auto& last = profile.points.back();
  if (wants_json(cfg)) {
    json doc;
    doc["header"] = header;
    doc["Q0"] = profile.Q0;
    json pts = json::array();
    for (const auto& p : profile.points) {
      pts.push_back({{"Q", p.Q}, {"inner_measure", number(p.inner)}, {"outer_measure", number(p.outer)},
                     {"union_bound", number(p.union_bound)}});
    }
    doc["profile"] = std::move(pts);
    doc["monotone"] = monotone;
    doc["inner_below_union_bound"] = below_bound;
    doc["nominal_measure"] = number(nominal.measure());
    doc["samples"] = cfg.samples;
    doc["samples_with_uncertain_hits"] = undecided;
    doc["union_contradictions"] = contradictions;
    write_output(cfg.out_dir, "simulate.json", dump(doc));
  }
  if (wants_csv(cfg)) {
    const std::string comment = header_comment(header);
    write_output(cfg.out_dir, "profile.csv", comment + profile_csv(profile));
    write_output(cfg.out_dir, "samples.csv", comment + samples);
    write_output(cfg.out_dir, "hits.csv", comment + hits);
  }
  log << "measure at Q = " << last.Q << ": inner " << format_double(last.inner) << ", outer "
      << format_double(last.outer) << ", union bound " << format_double(last.union_bound) << "\n";
  return kExitOk;
}

int run_construct_psi(const RunConfig& cfg, std::ostream& log) {
  json doc;
  std::string blocks;
  json inputs = json::object();
  std::string spec_text;
  std::string spec_name;

  if (cfg.construct == "remark") {
    std::vector<int> n = cfg.n;
    if (n.empty()) {
      for (int k = 0; k <= 6; ++k) n.push_back(k * (k + 1) / 2);
    }
    const PsiSpec psi = remark_counterexample(n);
    const auto& step = std::get<StepFunction>(psi.rep());
    const auto sums = block_sums(step);
    blocks = "block,left,right,value,block_sum,block_sum_exact\n";
    json jblocks = json::array();
    for (std::size_t j = 0; j < step.blocks(); ++j) {
      const auto& l = step.breakpoints()[j];
      const auto& r = step.breakpoints()[j + 1];
      blocks += std::to_string(j + 1) + "," + q_text(l) + "," + q_text(r) + "," + format_double(step.values()[j]) +
                "," + format_double(sums[j].get_d()) + "," + sums[j].get_str() + "\n";
      jblocks.push_back({{"left", q_text(l)}, {"right", q_text(r)}, {"block_sum", sums[j].get_str()}});
    }
    const mpz_class range = step.range_max();
    if (!range.fits_ulong_p() || range > mpz_class(1UL << 26)) {
      throw Error(Errc::domain_error, "range " + range.get_str() + " too large for the Khinchin check");
    }
    const std::uint64_t Q = range.get_ui();
    doc["n"] = n;
    doc["blocks"] = std::move(jblocks);
    if (Q >= 10) doc["khinchin"] = to_json(khinchin_validate(psi, Q));
    const Minorant minorant = greatest_khinchin_minorant(psi, Q);
    const Minorant tail = greatest_khinchin_minorant(psi, Q, MinorantKind::tail);
    doc["minorant_partial_sum"] = number(minorant.partial_sums.back());
    doc["tail_minorant_partial_sum"] = number(tail.partial_sums.back());
    spec_text = write_sequence_spec(psi);
    spec_name = "construct_psi.spec";
    log << "remark construction on [1, " << Q << "]: minorant partial sum "
        << format_double(minorant.partial_sums.back()) << "\n";
  } else if (cfg.construct == "phi-from-proof") {
    const ThetaSpec theta = load_theta_spec(require_path(cfg.theta_path, "--theta"));
    if (cfg.k_seq.empty()) throw Error(Errc::invalid_index_sequence, "--k-seq is required");
    const std::size_t K = cfg.depth.value_or(cfg.k_seq.back());
    const ConvergentTable table = theta.kind == ThetaSpec::Kind::explicit_list
                                      ? analysis_table(theta, K, K)
                                      : build_convergents(theta, K, TailPolicy::exact_only);
    const PhiSpec phi = phi_from_proof(table, cfg.k_seq);
    const auto& step = std::get<StepFunction>(phi.rep());
    blocks = "block,left,right,value\n";
    for (std::size_t j = 0; j < step.blocks(); ++j) {
      blocks += std::to_string(j + 1) + "," + q_text(step.breakpoints()[j]) + "," +
                q_text(step.breakpoints()[j + 1]) + "," + format_double(step.values()[j]) + "\n";
    }
    inputs["theta"] = write_theta_spec(theta);
    doc["k_seq"] = cfg.k_seq;
    doc["blocks"] = step.blocks();
    spec_text = write_sequence_spec(phi);
    spec_name = "construct_phi.spec";
    log << "phi step function with " << step.blocks() << " blocks\n";
  } else {
    throw Error(Errc::domain_error, "unknown construction '" + cfg.construct + "'");
  }

  const json header = header_json(cfg, inputs);
  write_output(cfg.out_dir, spec_name, header_comment(header) + spec_text);
  if (wants_json(cfg)) {
    json out;
    out["header"] = header;
    for (auto& [k, v] : doc.items()) out[k] = v;
    write_output(cfg.out_dir, "construct.json", dump(out));
  }
  if (wants_csv(cfg)) write_output(cfg.out_dir, "blocks.csv", header_comment(header) + blocks);
  return kExitOk;
}

int run_diagnostics(const RunConfig& cfg, std::ostream& log) {
  const ThetaSpec theta = load_theta_spec(require_path(cfg.theta_path, "--theta"));
  const SequenceSpec seq = load_sequence_spec(require_path(cfg.psi_path, "--psi"));
  const PhiSpec phi = as_phi(seq);
  const std::size_t K = cfg.depth.value_or(60);
  const ConvergentTable table = theta.kind == ThetaSpec::Kind::explicit_list
                                    ? analysis_table(theta, K, K)
                                    : build_convergents(theta, K, TailPolicy::exact_only);
  const DyadicReport report = dyadic_diagnostics(table, phi, cfg.m_max);

  const json header =
      header_json(cfg, json{{"theta", write_theta_spec(theta)}, {"psi", write_sequence_spec(seq)}});
  if (wants_json(cfg)) {
    json doc;
    doc["header"] = header;
    doc["range_max"] = report.range_max.get_str();
    json recs = json::array();
    for (const auto& r : report.records) recs.push_back(to_json(r));
    doc["records"] = std::move(recs);
    write_output(cfg.out_dir, "diagnostics.json", dump(doc));
  }
  if (wants_csv(cfg)) {
    const std::string comment = header_comment(header);
    write_output(cfg.out_dir, "dyadic.csv", comment + dyadic_csv(report));
    write_output(cfg.out_dir, "membership.csv", comment + membership_csv(report));
  }
  log << report.records.size() << " dyadic records, range q_K = " << report.range_max.get_str() << "\n";
  return kExitOk;
}

int run(const RunConfig& cfg, std::ostream& log) {
  validate(cfg);
  if (cfg.command == "analyze") return run_analyze(cfg, log);
  if (cfg.command == "kim-series") return run_kim_series(cfg, log);
  if (cfg.command == "simulate") return run_simulate(cfg, log);
  if (cfg.command == "construct-psi") return run_construct_psi(cfg, log);
  if (cfg.command == "diagnostics") return run_diagnostics(cfg, log);
  throw Error(Errc::domain_error, "unknown command '" + cfg.command + "'");
}

}  // namespace cfomega::cli
