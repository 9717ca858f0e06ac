// cfomega: membership criteria and circle-rotation simulation for theta
// given by its continued fraction.

#include <iostream>

#include "CLI11.hpp"

#include "cfomega/cli/commands.hpp"
#include "cfomega/error.hpp"

namespace {

using cfomega::cli::OutputFormat;
using cfomega::cli::RunConfig;

void add_common(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--theta", cfg.theta_path, "theta spec file");
  sub->add_option("--out", cfg.out_dir, "output directory")->capture_default_str();
  sub->add_option("--format", cfg.format, "csv or json-tree (default: both)")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, OutputFormat>{{"csv", OutputFormat::csv}, {"json-tree", OutputFormat::json_tree}},
          CLI::ignore_case));
  sub->add_option("--seed", cfg.seed, "seed recorded in every header")->capture_default_str();
  sub->add_option("--depth", cfg.depth, "truncation depth K");
  sub->add_option("--window", cfg.window, "window fraction rho")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Continued-fraction membership criteria and orbit simulation"};
  app.set_version_flag("--version", CFOMEGA_VERSION);
  app.require_subcommand(1);
  RunConfig cfg;

  auto* analyze = app.add_subcommand("analyze", "classify theta and evaluate condition B");
  add_common(analyze, cfg);
  analyze->add_option("--eps-grid", cfg.eps_grid, "decreasing eps values")->delimiter(',');

  auto* kim = app.add_subcommand("kim-series", "partial sums of the Kim series along q_k");
  add_common(kim, cfg);
  kim->add_option("--psi", cfg.psi_path, "psi or phi spec file");

  auto* simulate = app.add_subcommand("simulate", "measure profile and hit counts on the circle");
  add_common(simulate, cfg);
  simulate->add_option("--psi", cfg.psi_path, "psi or phi spec file");
  simulate->add_option("--q0", cfg.q0, "window start");
  simulate->add_option("--q", cfg.q, "window end");
  simulate->add_option("--checkpoints", cfg.checkpoints, "increasing checkpoints ending at --q")->delimiter(',');
  simulate->add_option("--samples", cfg.samples, "random points s")->capture_default_str();
  simulate->add_option("--delta", cfg.delta, "certified center tolerance")->capture_default_str();

  auto* construct = app.add_subcommand("construct-psi", "build the step-function constructions");
  add_common(construct, cfg);
  construct->add_option("--kind", cfg.construct, "remark or phi-from-proof")
      ->check(CLI::IsMember({"remark", "phi-from-proof"}))
      ->capture_default_str();
  construct->add_option("--n", cfg.n, "gap sequence n_0, n_1, ...")->delimiter(',');
  construct->add_option("--k-seq", cfg.k_seq, "index sequence k_0, k_1, ...")->delimiter(',');

  auto* diagnostics = app.add_subcommand("diagnostics", "dyadic Q_m, kappa_m, lambda_m diagnostics");
  add_common(diagnostics, cfg);
  diagnostics->add_option("--psi", cfg.psi_path, "psi or phi spec file");
  diagnostics->add_option("--m-max", cfg.m_max, "largest m")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cfomega::cli::kExitOk : cfomega::cli::kExitError;
  }
  for (auto* sub : app.get_subcommands()) cfg.command = sub->get_name();

  try {
    return cfomega::cli::run(cfg, std::cout);
  } catch (const cfomega::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return cfomega::cli::kExitError;
}
