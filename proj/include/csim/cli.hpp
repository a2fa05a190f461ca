#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>

#include "csim/flow.hpp"
#include "csim/simplex.hpp"
#include "csim/sysmodel.hpp"

namespace csim {

inline constexpr const char* kToolVersion = "1.0.0";

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  // system
  std::string kind;  // lotka_volterra | may_leonard | builtin_demo
  Vec b;
  Mat a;
  double alpha = 0.0;
  double beta = 0.0;

  IntegratorConfig integrator;

  // command parameters
  int m = 40;              // mesh resolution (simplex)
  int k = 1;               // certificate degree (certify)
  double eta = 1e-3;       // gap threshold (certify)
  double T = 200.0;        // orbit horizon (exponents)
  double T_permanence = 500.0;
  int n_starts = 100;      // permanence starts
  double permanence_floor = 1e-3;

  std::uint64_t seed = 0;
  std::string out_dir = ".";
};

/// Parses and validates the JSON run configuration. Unknown keys are
/// rejected with their path; throws ConfigError.
RunConfig load_config(const std::string& path);

/// Same validation applied to an in-memory JSON document (text).
RunConfig parse_config_text(const std::string& text);

/// JSON echo of a fully-defaulted config; load of the echo round-trips.
std::string config_to_json(const RunConfig& config);

std::shared_ptr<const System> build_system(const RunConfig& config);

/// Dispatches one subcommand, writes <out_dir>/report.json (and sigma.csv
/// for the reconstruction command). Returns the process exit code:
/// 0 success, 1 requested check failed, 2 config error, 3 numerical failure.
int run_command(const RunConfig& config, const std::string& command);

}  // namespace csim
