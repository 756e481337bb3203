#pragma once

#include <nlohmann/json_fwd.hpp>

#include <optional>
#include <string>

#include "pursuit/sim_engine.hpp"

namespace pursuit {

inline constexpr const char* kToolVersion = "0.1.0";

enum class GameKind { simple_motion, pontryagin, general };

/// A general linear game parsed from a scenario file, with a constant kernel
/// matrix; used by the numeric resolving-function oracle, not the simulator.
struct GeneralGameConfig {
  GameSpec game;
  MatrixXd kernel;
};

/// Parsed and validated run description.
struct ScenarioConfig {
  GameKind game = GameKind::simple_motion;

  SimpleMotionParams sm;
  VectorXd sm_z0;

  PontryaginParams pg;
  PontryaginState pg_z0;

  std::optional<GeneralGameConfig> general;

  EvaderSpec evader;
  double dt = 0.0;  ///< resolved; defaults to bound/5000
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  bool emit_trajectory_csv = true;
  bool emit_summary_json = true;
  bool emit_plot_data = true;
  std::string name = "scenario";

  /// Guaranteed-time bound of the configured game.
  double bound() const;

  bool operator==(const ScenarioConfig& other) const;
};

/// Reads and validates a scenario file. ParseError carries the location of
/// malformed JSON; ValidationError names the violated precondition.
ScenarioConfig parse_scenario(const std::string& path);

/// Same from an in-memory document; name becomes the output file stem.
ScenarioConfig parse_scenario_json(const nlohmann::json& doc,
                                   const std::string& name);

nlohmann::json to_json(const ScenarioConfig& config);
nlohmann::json report_to_json(const RunReport& report);
RunReport report_from_json(const nlohmann::json& doc);

/// Trajectory CSV: header t, z[0..], |z|, u[0..], v[0..], lambda, r, u_spent,
/// v_spent; '.' decimals, '\n' line endings, no quoting.
std::string trajectory_csv(const Trajectory& traj, const ScenarioConfig& config);

/// Writes the emit set (trajectory CSV, summary JSON, two-column plot series)
/// into config.output_dir. Throws IoError on unwritable paths.
void write_outputs(const Trajectory& traj, const RunReport& report,
                   const ScenarioConfig& config);

/// Runs a parsed scenario (simple_motion or pontryagin).
std::pair<Trajectory, RunReport> run_scenario(const ScenarioConfig& config);

/// Exit-code mapping: 0 clean, 1 invariant or bound violation, 2 config error.
int exit_code_for(const RunReport& report);

/// CLI entry point: subcommands run, batch, verify, nu, lambda.
int cli_main(int argc, char** argv);

}  // namespace pursuit
