#pragma once

// Run configuration and deterministic report serialization.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "cfomega/criteria.hpp"
#include "cfomega/orbit_sim.hpp"
#include "cfomega/sequences.hpp"

namespace cfomega::cli {

enum class OutputFormat { csv, json_tree, both };

struct RunConfig {
  std::string command;
  std::string theta_path;
  std::string psi_path;
  std::optional<std::size_t> depth;
  std::vector<double> eps_grid;
  double window = 0.5;
  std::optional<std::uint64_t> q0;
  std::optional<std::uint64_t> q;
  std::vector<std::uint64_t> checkpoints;
  std::uint64_t seed = 20240601;
  std::string out_dir = ".";
  OutputFormat format = OutputFormat::both;

  int m_max = 16;
  std::size_t samples = 200;
  std::vector<int> n;                 ///< gap sequence for construct-psi remark
  std::vector<std::size_t> k_seq;     ///< index sequence for construct-psi phi-from-proof
  std::string construct = "remark";   ///< remark | phi-from-proof
  double delta = kDefaultDelta;
};

/// Throws `domain_error` naming the first nonpositive parameter.
void validate(const RunConfig& cfg);

nlohmann::ordered_json to_json(const RunConfig& cfg);

/// `{"tool", "version", "command", "config", "seed", "inputs"}`; inputs
/// holds the canonical text of every spec file read.
nlohmann::ordered_json header_json(const RunConfig& cfg, const nlohmann::ordered_json& inputs);

/// The header as `# ` comment lines for CSV files.
std::string header_comment(const nlohmann::ordered_json& header);

/// A number, or null when it is not finite.
nlohmann::ordered_json number(double x);
nlohmann::ordered_json number(const std::optional<double>& x);

nlohmann::ordered_json to_json(const WindowStats& w);
nlohmann::ordered_json to_json(const CriterionEntry& e, bool with_series = false);
nlohmann::ordered_json to_json(const CriterionReport& r);
nlohmann::ordered_json to_json(const ConditionBReport& r);
nlohmann::ordered_json to_json(const KimSeriesTrace& t);
nlohmann::ordered_json to_json(const KhinchinReport& r);
nlohmann::ordered_json to_json(const DyadicRecord& r);

/// One row per k with a column per statistic and per eps.
std::string criteria_csv(const ConvergentTable& table, const CriterionReport& report,
                         const ConditionBReport* condition_b);

std::string kim_csv(const ConvergentTable& table, const PhiSpec& phi, const KimSeriesTrace& trace);
std::string dyadic_csv(const DyadicReport& report);
std::string membership_csv(const DyadicReport& report);

/// Writes with LF line endings, creating the directory when needed.
void write_output(const std::string& dir, const std::string& name, const std::string& content);

std::string dump(const nlohmann::ordered_json& j);

}  // namespace cfomega::cli
