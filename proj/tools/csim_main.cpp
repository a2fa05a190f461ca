#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "csim/cli.hpp"

namespace {

struct Flags {
  std::string config_path;
  std::string out_dir;
  bool out_set = false;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int m = 0;
  bool m_set = false;
  int k = -1;
  double eta = -1.0;
  double T = -1.0;
  int n_starts = 0;
  double alpha = 0.0;
  bool alpha_set = false;
  double beta = 0.0;
  bool beta_set = false;
};

void add_common(CLI::App* cmd, Flags& flags) {
  cmd->add_option("--config", flags.config_path, "JSON run configuration");
  cmd->add_option("--out", flags.out_dir, "output directory")
      ->each([&](const std::string&) { flags.out_set = true; });
  cmd->add_option("--seed", flags.seed, "quasi-random sequence seed")
      ->each([&](const std::string&) { flags.seed_set = true; });
  cmd->add_option("--m", flags.m, "mesh resolution")
      ->each([&](const std::string&) { flags.m_set = true; });
  cmd->add_option("--k", flags.k, "certificate degree");
  cmd->add_option("--eta", flags.eta, "exponent-gap threshold");
  cmd->add_option("--T", flags.T, "orbit horizon");
  cmd->add_option("--starts", flags.n_starts, "number of probe starts");
  cmd->add_option("--alpha", flags.alpha, "cyclic coupling alpha")
      ->each([&](const std::string&) { flags.alpha_set = true; });
  cmd->add_option("--beta", flags.beta, "cyclic coupling beta")
      ->each([&](const std::string&) { flags.beta_set = true; });
}

int dispatch(const Flags& flags, const std::string& command, bool demo_ml) {
  try {
    csim::RunConfig cfg;
    if (!flags.config_path.empty()) {
      cfg = csim::load_config(flags.config_path);
    } else if (demo_ml) {
      cfg.kind = "may_leonard";
      cfg.alpha = 1.4;
      cfg.beta = 0.9;
    } else {
      cfg.kind = "builtin_demo";
    }
    if (demo_ml && cfg.kind != "may_leonard")
      throw csim::ConfigError("demo may-leonard needs system.kind = may_leonard");

    if (flags.out_set) cfg.out_dir = flags.out_dir;
    if (flags.seed_set) cfg.seed = flags.seed;
    if (flags.m_set) cfg.m = flags.m;
    if (flags.k >= 0) cfg.k = flags.k;
    if (flags.eta >= 0.0) cfg.eta = flags.eta;
    if (flags.T > 0.0) cfg.T = flags.T;
    if (flags.n_starts > 0) cfg.n_starts = flags.n_starts;
    if (flags.alpha_set) cfg.alpha = flags.alpha;
    if (flags.beta_set) cfg.beta = flags.beta;

    // Re-validate after overrides by round-tripping the echoed document.
    cfg = csim::parse_config_text(csim::config_to_json(cfg));
    return csim::run_command(cfg, command);
  } catch (const csim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"carrying-simplex analysis for competitive population models"};
  app.require_subcommand(1);

  Flags flags;
  const char* names[] = {"check",  "rest-points", "exponents",
                         "simplex", "certify",    "permanence"};
  const char* descs[] = {
      "growth-margin and competitiveness checks",
      "rest points on all faces with their spectra",
      "Lyapunov exponents of sampled invariant measures",
      "reconstruct the carrying simplex and emit sigma.csv",
      "smoothness certificate for the requested degree",
      "persistence probe on every face subsystem"};
  std::vector<CLI::App*> cmds;
  for (int i = 0; i < 6; ++i) {
    CLI::App* c = app.add_subcommand(names[i], descs[i]);
    add_common(c, flags);
    cmds.push_back(c);
  }
  CLI::App* demo = app.add_subcommand("demo", "built-in demonstration runs");
  demo->require_subcommand(1);
  CLI::App* demo_ml =
      demo->add_subcommand("may-leonard", "cyclic three-species walkthrough");
  add_common(demo_ml, flags);

  CLI11_PARSE(app, argc, argv);

  for (int i = 0; i < 6; ++i)
    if (cmds[i]->parsed()) return dispatch(flags, names[i], false);
  if (demo_ml->parsed()) return dispatch(flags, "demo may-leonard", true);
  std::cerr << "no command\n";
  return 2;
}
