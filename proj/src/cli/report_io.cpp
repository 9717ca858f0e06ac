#include "cfomega/cli/report_io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cfomega/error.hpp"
#include "cfomega/format.hpp"

namespace cfomega::cli {

using json = nlohmann::ordered_json;

namespace {

std::string_view format_name(OutputFormat f) {
  switch (f) {
    case OutputFormat::csv: return "csv";
    case OutputFormat::json_tree: return "json-tree";
    case OutputFormat::both: return "both";
  }
  return "both";
}

std::string cell(const std::optional<double>& x) { return x ? format_double(*x) : std::string(); }

}  // namespace

void validate(const RunConfig& cfg) {
  auto positive = [](bool ok, const char* name) {
    if (!ok) throw Error(Errc::domain_error, std::string(name) + " must be positive");
  };
  if (cfg.depth) positive(*cfg.depth > 0, "--depth");
  for (double e : cfg.eps_grid) positive(e > 0.0, "--eps-grid");
  positive(cfg.window > 0.0 && cfg.window <= 1.0, "--window (in (0, 1])");
  if (cfg.q0) positive(*cfg.q0 > 0, "--q0");
  if (cfg.q) positive(*cfg.q > 0, "--q");
  for (auto c : cfg.checkpoints) positive(c > 0, "--checkpoints");
  positive(cfg.m_max >= 0, "--m-max");
  positive(cfg.samples > 0, "--samples");
  positive(cfg.delta > 0.0, "--delta");
}

json to_json(const RunConfig& cfg) {
  json j;
  j["command"] = cfg.command;
  j["theta"] = cfg.theta_path;
  j["psi"] = cfg.psi_path;
  j["depth"] = cfg.depth ? json(*cfg.depth) : json(nullptr);
  j["eps_grid"] = cfg.eps_grid;
  j["window"] = cfg.window;
  j["q0"] = cfg.q0 ? json(*cfg.q0) : json(nullptr);
  j["q"] = cfg.q ? json(*cfg.q) : json(nullptr);
  j["checkpoints"] = cfg.checkpoints;
  j["seed"] = cfg.seed;
  j["format"] = format_name(cfg.format);
  j["m_max"] = cfg.m_max;
  j["samples"] = cfg.samples;
  j["n"] = cfg.n;
  j["k_seq"] = cfg.k_seq;
  j["construct"] = cfg.construct;
  j["delta"] = cfg.delta;
  return j;
}

json header_json(const RunConfig& cfg, const json& inputs) {
  json h;
  h["tool"] = "cfomega";
  h["version"] = CFOMEGA_VERSION;
  h["command"] = cfg.command;
  h["seed"] = cfg.seed;
  h["config"] = to_json(cfg);
  h["inputs"] = inputs;
  return h;
}

std::string header_comment(const json& header) {
  std::string out;
  out += "# " + header["tool"].get<std::string>() + " " + header["version"].get<std::string>() + "\n";
  out += "# command: " + header["command"].get<std::string>() + "\n";
  out += "# seed: " + std::to_string(header["seed"].get<std::uint64_t>()) + "\n";
  out += "# config: " + header["config"].dump() + "\n";
  for (const auto& [name, text] : header["inputs"].items()) {
    out += "# input " + name + ":";
    std::istringstream lines(text.get<std::string>());
    std::string line;
    bool first = true;
    while (std::getline(lines, line)) {
      out += (first ? " " : "; ") + line;
      first = false;
    }
    out += "\n";
  }
  return out;
}

json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }
json number(const std::optional<double>& x) { return x ? number(*x) : json(nullptr); }

json to_json(const WindowStats& w) {
  json j;
  j["lo"] = w.lo;
  j["mid"] = w.mid;
  j["hi"] = w.hi;
  j["count"] = w.count;
  j["max"] = number(w.max);
  j["min"] = number(w.min);
  j["leading_max"] = number(w.leading_max);
  j["trailing_max"] = number(w.trailing_max);
  j["max_is_infinite"] = std::isinf(w.max);
  j["stable"] = w.stable;
  return j;
}

json to_json(const CriterionEntry& e, bool with_series) {
  json j;
  j["name"] = e.name;
  j["statistic"] = e.statistic;
  if (e.eps) j["eps"] = *e.eps;
  j["estimate"] = number(e.estimate);
  j["verdict"] = to_string(e.verdict);
  if (e.implies) j["implies"] = to_string(*e.implies);
  j["window"] = to_json(e.window);
  if (with_series) {
    json s = json::array();
    for (const auto& v : e.series) s.push_back(number(v));
    j["series"] = std::move(s);
  }
  return j;
}

json to_json(const CriterionReport& r) {
  json j;
  j["depth"] = r.depth;
  j["window_fraction"] = r.config.fraction;
  j["stability_gap"] = r.config.stability_gap;
  j["growth_factor"] = r.config.growth_factor;
  j["divergence_slope"] = r.config.divergence_slope;
  json entries = json::array();
  for (const auto& e : r.entries) entries.push_back(to_json(e));
  j["conditions"] = std::move(entries);
  j["verdict"] = to_string(r.omega);
  j["conflict"] = r.conflict;
  return j;
}

json to_json(const ConditionBReport& r) {
  json j;
  j["first_admissible"] = r.first_admissible;
  json per = json::array();
  for (const auto& e : r.per_eps) per.push_back(to_json(e));
  j["per_eps"] = std::move(per);
  j["verdict"] = to_string(r.verdict);
  return j;
}

json to_json(const KimSeriesTrace& t) {
  json j;
  j["start"] = t.start;
  j["last"] = t.last;
  j["partial_sum"] = number(t.partial_sums.empty() ? std::nullopt : t.partial_sums.back());
  j["slope_vs_log_k"] = number(t.slope);
  j["window_increment"] = number(t.window_increment);
  j["cauchy_tail"] = number(t.cauchy_tail);
  j["divergence_evidence"] = t.divergence_evidence;
  return j;
}

json to_json(const KhinchinReport& r) {
  json j;
  j["range"] = r.range;
  j["monotone_ok"] = r.monotone_ok;
  j["first_violation"] = r.first_violation ? json(*r.first_violation) : json(nullptr);
  j["divergence_partial_sum"] = number(r.divergence_partial_sum);
  j["slope_log"] = number(r.slope_log);
  j["slope_loglog"] = number(r.slope_loglog);
  j["divergence_evidence"] = r.divergence_evidence;
  return j;
}

json to_json(const DyadicRecord& r) {
  json j;
  j["m"] = r.m;
  j["Q_m"] = r.Q_m ? json(r.Q_m->get_str()) : json(nullptr);
  j["capped"] = r.capped;
  j["count_S"] = r.count_S;
  j["count_T"] = r.count_T;
  j["log_sum_T"] = number(r.log_sum_T);
  j["kappa"] = number(r.kappa);
  j["lambda"] = number(r.lambda);
  return j;
}

std::string criteria_csv(const ConvergentTable& table, const CriterionReport& report,
                         const ConditionBReport* condition_b) {
  std::string out = "k,log_q,log_ratio";
  for (const auto& e : report.entries) out += "," + e.name;
  if (condition_b) {
    for (const auto& e : condition_b->per_eps) out += ",b_eps_" + format_double(*e.eps);
  }
  out += "\n";
  for (std::size_t k = 0; k <= table.depth(); ++k) {
    out += std::to_string(k) + "," + format_double(table.log_q(k)) + ",";
    if (k < table.depth()) out += format_double(table.log_ratio(k));
    for (const auto& e : report.entries) out += "," + cell(k < e.series.size() ? e.series[k] : std::nullopt);
    if (condition_b) {
      for (const auto& e : condition_b->per_eps) out += "," + cell(k < e.series.size() ? e.series[k] : std::nullopt);
    }
    out += "\n";
  }
  return out;
}

std::string kim_csv(const ConvergentTable& table, const PhiSpec& phi, const KimSeriesTrace& trace) {
  std::string out = "k,log_q,log_ratio,phi_qk,term,partial_sum\n";
  for (std::size_t k = 0; k <= trace.last; ++k) {
    out += std::to_string(k) + "," + format_double(table.log_q(k)) + "," + format_double(table.log_ratio(k)) + "," +
           format_double(phi(table.q(k))) + "," + cell(trace.terms[k]) + "," + cell(trace.partial_sums[k]) + "\n";
  }
  return out;
}

std::string dyadic_csv(const DyadicReport& report) {
  std::string out = "m,Q_m,capped,count_S,count_T,log_sum_T,kappa,lambda\n";
  for (const auto& r : report.records) {
    out += std::to_string(r.m) + "," + (r.Q_m ? r.Q_m->get_str() : std::string()) + "," +
           (r.capped ? "true" : "false") + "," + std::to_string(r.count_S) + "," + std::to_string(r.count_T) + "," +
           format_double(r.log_sum_T) + "," + format_double(r.kappa) + "," + cell(r.lambda) + "\n";
  }
  return out;
}

std::string membership_csv(const DyadicReport& report) {
  std::string out = "k,in_S,tie,phi_qk,ratio\n";
  for (const auto& m : report.membership) {
    out += std::to_string(m.k) + "," + (m.in_S ? "true" : "false") + "," + (m.tie ? "true" : "false") + "," +
           format_double(m.phi_qk) + "," + format_double(m.ratio) + "\n";
  }
  return out;
}

void write_output(const std::string& dir, const std::string& name, const std::string& content) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  const auto path = std::filesystem::path(dir) / name;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io_error, "cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw Error(Errc::io_error, "write failed for '" + path.string() + "'");
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace cfomega::cli
