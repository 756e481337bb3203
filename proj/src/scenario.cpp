#include "pursuit/scenario.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace pursuit {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt_num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

std::string fmt_full(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

double require_number(const json& doc, const std::string& field) {
  if (!doc.contains(field))
    throw ValidationError("missing required field '" + field + "'");
  if (!doc[field].is_number())
    throw ValidationError("field '" + field + "' must be a number");
  return doc[field].get<double>();
}

double number_or(const json& doc, const std::string& field, double fallback) {
  if (!doc.contains(field)) return fallback;
  if (!doc[field].is_number())
    throw ValidationError("field '" + field + "' must be a number");
  return doc[field].get<double>();
}

VectorXd parse_vector(const json& arr, const std::string& field) {
  if (!arr.is_array() || arr.empty())
    throw ValidationError("field '" + field + "' must be a nonempty array");
  VectorXd v(static_cast<Index>(arr.size()));
  for (Index i = 0; i < v.size(); ++i) {
    if (!arr[static_cast<std::size_t>(i)].is_number())
      throw ValidationError("field '" + field + "' must contain numbers");
    v(i) = arr[static_cast<std::size_t>(i)].get<double>();
  }
  return v;
}

VectorXd require_vector(const json& doc, const std::string& field) {
  if (!doc.contains(field))
    throw ValidationError("missing required field '" + field + "'");
  return parse_vector(doc[field], field);
}

MatrixXd parse_matrix(const json& arr, const std::string& field) {
  if (!arr.is_array() || arr.empty())
    throw ValidationError("field '" + field + "' must be an array of rows");
  const Index rows = static_cast<Index>(arr.size());
  const VectorXd first = parse_vector(arr[0], field);
  MatrixXd m(rows, first.size());
  m.row(0) = first;
  for (Index i = 1; i < rows; ++i) {
    const VectorXd row = parse_vector(arr[static_cast<std::size_t>(i)], field);
    if (row.size() != m.cols())
      throw ValidationError("field '" + field + "' has ragged rows");
    m.row(i) = row;
  }
  return m;
}

json vector_to_json(const VectorXd& v) {
  json arr = json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

json matrix_to_json(const MatrixXd& m) {
  json arr = json::array();
  for (Index i = 0; i < m.rows(); ++i) arr.push_back(vector_to_json(m.row(i)));
  return arr;
}

const char* kind_name(EvaderKind kind) {
  switch (kind) {
    case EvaderKind::zero: return "zero";
    case EvaderKind::constant_decay: return "constant_decay";
    case EvaderKind::radial_flee: return "radial_flee";
    case EvaderKind::perpendicular: return "perpendicular";
    case EvaderKind::piecewise: return "piecewise";
    case EvaderKind::seeded_random: return "seeded_random";
  }
  return "?";
}

EvaderKind kind_from_name(const std::string& name) {
  if (name == "zero") return EvaderKind::zero;
  if (name == "constant_decay") return EvaderKind::constant_decay;
  if (name == "radial_flee") return EvaderKind::radial_flee;
  if (name == "perpendicular") return EvaderKind::perpendicular;
  if (name == "piecewise") return EvaderKind::piecewise;
  if (name == "seeded_random") return EvaderKind::seeded_random;
  throw ValidationError("unknown evader kind '" + name + "'");
}

const char* game_name(GameKind kind) {
  switch (kind) {
    case GameKind::simple_motion: return "simple_motion";
    case GameKind::pontryagin: return "pontryagin";
    case GameKind::general: return "general";
  }
  return "?";
}

EvaderSpec parse_evader(const json& doc, std::uint64_t default_seed) {
  if (!doc.is_object()) throw ValidationError("'evader' must be an object");
  EvaderSpec spec;
  if (!doc.contains("kind"))
    throw ValidationError("missing required field 'evader.kind'");
  spec.kind = kind_from_name(doc["kind"].get<std::string>());
  spec.decay = number_or(doc, "decay", 1.0);
  if (!(spec.decay > 0.0))
    throw ValidationError("evader decay rate must be positive: " +
                          fmt_num(spec.decay) + " <= 0");
  spec.budget_fraction = number_or(doc, "budget_fraction", 1.0);
  if (!(spec.budget_fraction >= 0.0 && spec.budget_fraction <= 1.0))
    throw ValidationError("evader budget_fraction must lie in [0, 1]");
  spec.seed = doc.contains("seed")
                  ? doc["seed"].get<std::uint64_t>()
                  : default_seed;
  if (doc.contains("direction"))
    spec.direction = parse_vector(doc["direction"], "evader.direction");
  if (doc.contains("breakpoints")) {
    if (!doc["breakpoints"].is_array())
      throw ValidationError("evader.breakpoints must be an array");
    for (const auto& bp : doc["breakpoints"]) {
      if (!bp.is_number() || !(bp.get<double>() > 0.0))
        throw ValidationError("evader.breakpoints must be positive numbers");
      spec.breakpoints.push_back(bp.get<double>());
    }
  }
  return spec;
}

json evader_to_json(const EvaderSpec& spec) {
  json doc;
  doc["kind"] = kind_name(spec.kind);
  doc["decay"] = spec.decay;
  doc["seed"] = spec.seed;
  doc["budget_fraction"] = spec.budget_fraction;
  if (spec.direction.size() > 0) doc["direction"] = vector_to_json(spec.direction);
  if (!spec.breakpoints.empty()) doc["breakpoints"] = spec.breakpoints;
  return doc;
}

bool evader_equal(const EvaderSpec& a, const EvaderSpec& b) {
  return a.kind == b.kind && a.decay == b.decay && a.seed == b.seed &&
         a.budget_fraction == b.budget_fraction &&
         a.direction.size() == b.direction.size() &&
         (a.direction.size() == 0 || a.direction == b.direction) &&
         a.breakpoints == b.breakpoints;
}

}  // namespace

double ScenarioConfig::bound() const {
  switch (game) {
    case GameKind::simple_motion:
      return capture_bound(sm_z0, sm.rho, sm.sigma, sm.l);
    case GameKind::pontryagin:
      return guaranteed_time_theta(pg, pg_z0);
    case GameKind::general:
      return 0.0;
  }
  return 0.0;
}

bool ScenarioConfig::operator==(const ScenarioConfig& other) const {
  if (game != other.game || dt != other.dt || seed != other.seed ||
      output_dir != other.output_dir || name != other.name ||
      emit_trajectory_csv != other.emit_trajectory_csv ||
      emit_summary_json != other.emit_summary_json ||
      emit_plot_data != other.emit_plot_data ||
      !evader_equal(evader, other.evader))
    return false;
  switch (game) {
    case GameKind::simple_motion:
      return sm.rho == other.sm.rho && sm.sigma == other.sm.sigma &&
             sm.l == other.sm.l && sm.n == other.sm.n && sm_z0 == other.sm_z0;
    case GameKind::pontryagin:
      return pg.alpha == other.pg.alpha && pg.beta == other.pg.beta &&
             pg.b == other.pg.b && pg.c == other.pg.c && pg.rho == other.pg.rho &&
             pg.sigma == other.pg.sigma && pg.n == other.pg.n &&
             pg_z0.z1 == other.pg_z0.z1 && pg_z0.z2 == other.pg_z0.z2 &&
             pg_z0.z3 == other.pg_z0.z3;
    case GameKind::general:
      return general.has_value() && other.general.has_value() &&
             general->game.A == other.general->game.A &&
             general->game.B == other.general->game.B &&
             general->game.C == other.general->game.C &&
             general->game.p == other.general->game.p &&
             general->game.rho == other.general->game.rho &&
             general->game.sigma == other.general->game.sigma &&
             general->game.terminal.l == other.general->game.terminal.l &&
             general->game.terminal.m0_basis ==
                 other.general->game.terminal.m0_basis &&
             general->kernel == other.general->kernel;
  }
  return false;
}

ScenarioConfig parse_scenario_json(const json& doc, const std::string& name) {
  if (!doc.is_object()) throw ValidationError("scenario must be a JSON object");
  ScenarioConfig config;
  config.name = doc.contains("name") ? doc["name"].get<std::string>() : name;

  if (!doc.contains("game"))
    throw ValidationError("missing required field 'game'");
  const std::string game = doc["game"].get<std::string>();

  config.seed = doc.contains("seed") ? doc["seed"].get<std::uint64_t>() : 0;

  if (game == "simple_motion") {
    config.game = GameKind::simple_motion;
    config.sm.rho = require_number(doc, "rho");
    config.sm.sigma = require_number(doc, "sigma");
    config.sm.l = number_or(doc, "l", 0.0);
    config.sm_z0 = require_vector(doc, "z0");
    config.sm.n = config.sm_z0.size();
    if (!(config.sm.rho > 0.0)) throw ValidationError("rho must be positive");
    if (!(config.sm.sigma >= 0.0))
      throw ValidationError("sigma must be nonnegative");
    if (!(config.sm.rho > config.sm.sigma))
      throw ValidationError("rho must exceed sigma: " + fmt_num(config.sm.rho) +
                            " <= " + fmt_num(config.sm.sigma));
    if (!(config.sm.l >= 0.0)) throw ValidationError("l must be nonnegative");
    if (config.sm_z0.norm() <= config.sm.l)
      throw ValidationError("initial state inside terminal set: |z0| = " +
                            fmt_num(config.sm_z0.norm()) +
                            " <= l = " + fmt_num(config.sm.l));
  } else if (game == "pontryagin") {
    config.game = GameKind::pontryagin;
    config.pg.alpha = require_number(doc, "alpha");
    config.pg.beta = require_number(doc, "beta");
    config.pg.b = require_number(doc, "b");
    config.pg.c = require_number(doc, "c");
    config.pg.rho = require_number(doc, "rho");
    config.pg.sigma = require_number(doc, "sigma");
    if (!doc.contains("z0") || !doc["z0"].is_object())
      throw ValidationError("field 'z0' must be an object with z1, z2, z3");
    if (!doc["z0"].contains("z1"))
      throw ValidationError("missing required field 'z0.z1'");
    config.pg_z0.z1 = parse_vector(doc["z0"]["z1"], "z0.z1");
    config.pg.n = config.pg_z0.z1.size();
    config.pg_z0.z2 = doc["z0"].contains("z2")
                          ? parse_vector(doc["z0"]["z2"], "z0.z2")
                          : VectorXd::Zero(config.pg.n);
    config.pg_z0.z3 = doc["z0"].contains("z3")
                          ? parse_vector(doc["z0"]["z3"], "z0.z3")
                          : VectorXd::Zero(config.pg.n);
    if (config.pg_z0.z2.size() != config.pg.n ||
        config.pg_z0.z3.size() != config.pg.n)
      throw ValidationError("z0 blocks must share one dimension");
    try {
      config.pg.validate();
    } catch (const Error& err) {
      throw ValidationError(err.what());
    }
    if (config.pg_z0.z1.norm() == 0.0)
      throw ValidationError("initial state inside terminal set: z01 = 0");
  } else if (game == "general") {
    config.game = GameKind::general;
    GeneralGameConfig gen;
    gen.game.A = parse_matrix(doc.contains("A") ? doc["A"] : json(), "A");
    gen.game.B = parse_matrix(doc.contains("B") ? doc["B"] : json(), "B");
    gen.game.C = parse_matrix(doc.contains("C") ? doc["C"] : json(), "C");
    gen.game.p = number_or(doc, "p", 2.0);
    gen.game.rho = require_number(doc, "rho");
    gen.game.sigma = require_number(doc, "sigma");
    if (doc.contains("terminal")) {
      const json& term = doc["terminal"];
      gen.game.terminal.l = number_or(term, "l", 0.0);
      if (term.contains("M0_basis"))
        gen.game.terminal.m0_basis = parse_matrix(term["M0_basis"], "M0_basis").transpose();
      else
        gen.game.terminal.m0_basis = MatrixXd(gen.game.A.rows(), 0);
    } else {
      gen.game.terminal.m0_basis = MatrixXd(gen.game.A.rows(), 0);
    }
    if (!doc.contains("kernel") || !doc["kernel"].is_object() ||
        !doc["kernel"].contains("matrix"))
      throw ValidationError("general games require kernel.matrix");
    gen.kernel = parse_matrix(doc["kernel"]["matrix"], "kernel.matrix");
    try {
      gen.game.validate();
    } catch (const Error& err) {
      throw ValidationError(err.what());
    }
    config.general = std::move(gen);
  } else {
    throw ValidationError("unknown game '" + game + "'");
  }

  config.evader = doc.contains("evader")
                      ? parse_evader(doc["evader"], config.seed)
                      : EvaderSpec{};
  if (config.evader.kind == EvaderKind::zero && !doc.contains("evader")) {
    config.evader.seed = config.seed;
  }

  if (config.game != GameKind::general) {
    const double bound = config.bound();
    config.dt = number_or(doc, "dt", bound / 5000.0);
    if (!(config.dt > 0.0))
      throw ValidationError("dt must be positive");
    if (config.dt > bound / 1000.0)
      throw ValidationError("dt too coarse: need dt <= bound/1000 = " +
                            fmt_num(bound / 1000.0));
  } else {
    config.dt = number_or(doc, "dt", 0.0);
  }

  config.output_dir = doc.contains("output_dir")
                          ? doc["output_dir"].get<std::string>()
                          : std::string("out");
  if (doc.contains("emit")) {
    if (!doc["emit"].is_array())
      throw ValidationError("'emit' must be an array");
    config.emit_trajectory_csv = false;
    config.emit_summary_json = false;
    config.emit_plot_data = false;
    for (const auto& e : doc["emit"]) {
      const std::string tag = e.get<std::string>();
      if (tag == "trajectory_csv")
        config.emit_trajectory_csv = true;
      else if (tag == "summary_json")
        config.emit_summary_json = true;
      else if (tag == "plot_data")
        config.emit_plot_data = true;
      else
        throw ValidationError("unknown emit target '" + tag + "'");
    }
  }
  return config;
}

ScenarioConfig parse_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario file: " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& err) {
    throw ParseError("malformed JSON in " + path + ": " + err.what());
  }
  return parse_scenario_json(doc, fs::path(path).stem().string());
}

json to_json(const ScenarioConfig& config) {
  json doc;
  doc["game"] = game_name(config.game);
  doc["name"] = config.name;
  doc["seed"] = config.seed;
  doc["dt"] = config.dt;
  doc["output_dir"] = config.output_dir;
  json emit = json::array();
  if (config.emit_trajectory_csv) emit.push_back("trajectory_csv");
  if (config.emit_summary_json) emit.push_back("summary_json");
  if (config.emit_plot_data) emit.push_back("plot_data");
  doc["emit"] = emit;
  doc["evader"] = evader_to_json(config.evader);
  switch (config.game) {
    case GameKind::simple_motion:
      doc["rho"] = config.sm.rho;
      doc["sigma"] = config.sm.sigma;
      doc["l"] = config.sm.l;
      doc["z0"] = vector_to_json(config.sm_z0);
      break;
    case GameKind::pontryagin:
      doc["alpha"] = config.pg.alpha;
      doc["beta"] = config.pg.beta;
      doc["b"] = config.pg.b;
      doc["c"] = config.pg.c;
      doc["rho"] = config.pg.rho;
      doc["sigma"] = config.pg.sigma;
      doc["z0"] = {{"z1", vector_to_json(config.pg_z0.z1)},
                   {"z2", vector_to_json(config.pg_z0.z2)},
                   {"z3", vector_to_json(config.pg_z0.z3)}};
      break;
    case GameKind::general:
      doc["A"] = matrix_to_json(config.general->game.A);
      doc["B"] = matrix_to_json(config.general->game.B);
      doc["C"] = matrix_to_json(config.general->game.C);
      doc["p"] = config.general->game.p;
      doc["rho"] = config.general->game.rho;
      doc["sigma"] = config.general->game.sigma;
      doc["terminal"] = {
          {"l", config.general->game.terminal.l},
          {"M0_basis",
           matrix_to_json(config.general->game.terminal.m0_basis.transpose())}};
      doc["kernel"] = {{"matrix", matrix_to_json(config.general->kernel)}};
      break;
  }
  return doc;
}

json report_to_json(const RunReport& report) {
  json doc;
  doc["captured"] = report.captured;
  if (report.capture_time)
    doc["capture_time"] = *report.capture_time;
  else
    doc["capture_time"] = nullptr;
  doc["bound_theta"] = report.bound_theta;
  doc["final_miss"] = report.final_miss;
  doc["budget_ok_u"] = report.budget_ok_u;
  doc["budget_ok_v"] = report.budget_ok_v;
  doc["invariant_violations"] = report.invariant_violations;
  return doc;
}

RunReport report_from_json(const json& doc) {
  RunReport report;
  report.captured = doc.at("captured").get<bool>();
  if (!doc.at("capture_time").is_null())
    report.capture_time = doc["capture_time"].get<double>();
  report.bound_theta = doc.at("bound_theta").get<double>();
  report.final_miss = doc.at("final_miss").get<double>();
  report.budget_ok_u = doc.at("budget_ok_u").get<bool>();
  report.budget_ok_v = doc.at("budget_ok_v").get<bool>();
  report.invariant_violations =
      doc.at("invariant_violations").get<std::vector<std::string>>();
  return report;
}

std::string trajectory_csv(const Trajectory& traj, const ScenarioConfig& config) {
  const Index state_dim = traj.z.empty() ? 0 : traj.z.front().size();
  const Index ctrl_dim = traj.u.empty() ? 0 : traj.u.front().size();
  const Index miss_dim =
      config.game == GameKind::pontryagin ? config.pg.n : state_dim;

  std::ostringstream out;
  out << "t";
  for (Index i = 0; i < state_dim; ++i) out << ",z[" << i << "]";
  out << ",|z|";
  for (Index i = 0; i < ctrl_dim; ++i) out << ",u[" << i << "]";
  for (Index i = 0; i < ctrl_dim; ++i) out << ",v[" << i << "]";
  out << ",lambda,r,u_spent,v_spent\n";
  for (std::size_t k = 0; k < traj.rows(); ++k) {
    out << fmt_full(traj.times[k]);
    for (Index i = 0; i < state_dim; ++i) out << ',' << fmt_full(traj.z[k](i));
    out << ',' << fmt_full(traj.z[k].head(miss_dim).norm());
    for (Index i = 0; i < ctrl_dim; ++i) out << ',' << fmt_full(traj.u[k](i));
    for (Index i = 0; i < ctrl_dim; ++i) out << ',' << fmt_full(traj.v[k](i));
    out << ',' << fmt_full(traj.lambda[k]) << ',' << fmt_full(traj.r[k]) << ','
        << fmt_full(traj.u_spent[k]) << ',' << fmt_full(traj.v_spent[k]) << '\n';
  }
  return out.str();
}

namespace {

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out) throw IoError("write failed for " + path.string());
}

std::string series(const Trajectory& traj,
                   const std::function<double(std::size_t)>& y) {
  std::ostringstream out;
  for (std::size_t k = 0; k < traj.rows(); ++k)
    out << fmt_full(traj.times[k]) << '\t' << fmt_full(y(k)) << '\n';
  return out.str();
}

}  // namespace

void write_outputs(const Trajectory& traj, const RunReport& report,
                   const ScenarioConfig& config) {
  std::error_code ec;
  fs::create_directories(config.output_dir, ec);
  if (ec) throw IoError("cannot create output directory " + config.output_dir);
  const fs::path dir(config.output_dir);

  if (config.emit_trajectory_csv)
    write_file(dir / (config.name + "_trajectory.csv"),
               trajectory_csv(traj, config));
  if (config.emit_summary_json) {
    json doc;
    doc["version"] = kToolVersion;
    doc["report"] = report_to_json(report);
    doc["config"] = to_json(config);
    write_file(dir / (config.name + "_summary.json"), doc.dump(2) + "\n");
  }
  if (config.emit_plot_data) {
    const Index miss_dim = config.game == GameKind::pontryagin
                               ? config.pg.n
                               : (traj.z.empty() ? 0 : traj.z.front().size());
    const double l = config.game == GameKind::simple_motion ? config.sm.l : 0.0;
    write_file(dir / (config.name + "_miss.tsv"),
               series(traj, [&](std::size_t k) {
                 return traj.z[k].head(miss_dim).norm() - l;
               }));
    write_file(dir / (config.name + "_resource.tsv"),
               series(traj, [&](std::size_t k) { return traj.r[k]; }));
    write_file(dir / (config.name + "_budget_pursuer.tsv"),
               series(traj, [&](std::size_t k) { return traj.u_spent[k]; }));
    write_file(dir / (config.name + "_budget_evader.tsv"),
               series(traj, [&](std::size_t k) { return traj.v_spent[k]; }));
  }
}

std::pair<Trajectory, RunReport> run_scenario(const ScenarioConfig& config) {
  switch (config.game) {
    case GameKind::simple_motion:
      return run_simple_motion(config.sm, config.sm_z0, config.evader,
                               config.dt);
    case GameKind::pontryagin:
      return run_pontryagin(config.pg, config.pg_z0, config.evader, config.dt);
    case GameKind::general:
      throw ValidationError(
          "general games have no synthesized pursuit strategy; use the lambda "
          "subcommand");
  }
  throw ValidationError("unknown game kind");
}

int exit_code_for(const RunReport& report) {
  if (!report.captured || !report.budget_ok_u || !report.budget_ok_v ||
      !report.invariant_violations.empty())
    return 1;
  return 0;
}

namespace {

VectorXd parse_csv_vector(const std::string& text, const std::string& flag) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      values.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ValidationError("cannot parse number '" + item + "' in " + flag);
    }
  }
  if (values.empty()) throw ValidationError(flag + " must contain numbers");
  VectorXd v(static_cast<Index>(values.size()));
  for (Index i = 0; i < v.size(); ++i) v(i) = values[static_cast<std::size_t>(i)];
  return v;
}

int run_one(const std::string& path, bool verbose) {
  const ScenarioConfig config = parse_scenario(path);
  const auto [traj, report] = run_scenario(config);
  write_outputs(traj, report, config);
  std::cout << config.name << ": captured=" << (report.captured ? "yes" : "no");
  if (report.capture_time)
    std::cout << " capture_time=" << fmt_full(*report.capture_time);
  std::cout << " bound=" << fmt_full(report.bound_theta)
            << " final_miss=" << fmt_full(report.final_miss) << "\n";
  if (verbose || !report.invariant_violations.empty()) {
    if (report.invariant_violations.empty()) {
      std::cout << "invariants: clean\n";
    } else {
      for (const auto& v : report.invariant_violations)
        std::cout << "violation: " << v << "\n";
    }
    std::cout << "budgets: pursuer " << (report.budget_ok_u ? "ok" : "EXCEEDED")
              << ", evader " << (report.budget_ok_v ? "ok" : "EXCEEDED") << "\n";
  }
  return exit_code_for(report);
}

unsigned batch_threads() {
  unsigned n = std::thread::hardware_concurrency();
  if (n == 0) n = 1;
  if (const char* env = std::getenv("PURSUIT_RF_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap > 0) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
  }
  return n;
}

int run_batch(const std::string& dir, const std::string& aggregate_path) {
  std::vector<std::string> files;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(dir, ec))
    if (entry.path().extension() == ".json")
      files.push_back(entry.path().string());
  if (ec) throw IoError("cannot read scenario directory " + dir);
  if (files.empty()) throw ValidationError("no .json scenarios in " + dir);
  std::sort(files.begin(), files.end());

  struct Row {
    std::string name;
    int code = 2;
    json summary;
  };
  std::vector<Row> rows(files.size());
  std::atomic<std::size_t> next{0};

  const auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= files.size()) return;
      Row& row = rows[i];
      row.name = fs::path(files[i]).stem().string();
      try {
        const ScenarioConfig config = parse_scenario(files[i]);
        const auto [traj, report] = run_scenario(config);
        write_outputs(traj, report, config);
        row.code = exit_code_for(report);
        row.summary = {{"scenario", config.name},
                       {"captured", report.captured},
                       {"capture_time", report.capture_time
                                            ? json(*report.capture_time)
                                            : json(nullptr)},
                       {"bound", report.bound_theta},
                       {"violations", report.invariant_violations.size()}};
      } catch (const Error& err) {
        row.code = 2;
        row.summary = {{"scenario", row.name}, {"error", err.what()}};
      }
    }
  };

  const unsigned n_threads =
      std::min<unsigned>(batch_threads(), static_cast<unsigned>(files.size()));
  std::vector<std::thread> pool;
  for (unsigned i = 0; i + 1 < n_threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  json aggregate = json::array();
  int code = 0;
  for (const auto& row : rows) {
    aggregate.push_back(row.summary);
    code = std::max(code, row.code);
    std::cout << row.name << ": exit " << row.code << "\n";
  }
  write_file(aggregate_path, aggregate.dump(2) + "\n");
  std::cout << "aggregate report: " << aggregate_path << "\n";
  return code;
}

int run_nu(double alpha, double beta, double b, double c, double horizon,
           int samples) {
  PontryaginParams params;
  params.alpha = alpha;
  params.beta = beta;
  params.b = b;
  params.c = c;
  const double closed = nu_closed(params);
  const NuEstimate est =
      estimate_nu(make_pontryagin_kernel(params), 2.0, horizon, samples);
  const double numeric = std::sqrt(est.nu_p);
  std::cout << "nu closed form: " << fmt_full(closed) << "\n"
            << "nu numeric:     " << fmt_full(numeric) << " (argmax s = "
            << fmt_num(est.argmax_s) << ", horizon " << fmt_num(horizon)
            << ")\n"
            << "abs difference: " << fmt_full(std::abs(closed - numeric))
            << "\n";
  return 0;
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"Pursuit games with integral control constraints: resolving "
               "functions, guaranteed-capture strategies and simulation"};
  app.require_subcommand(1);

  std::string scenario_path;
  auto* cmd_run = app.add_subcommand("run", "run one scenario and write outputs");
  cmd_run->add_option("scenario", scenario_path, "scenario JSON file")->required();

  std::string batch_dir;
  std::string batch_out = "batch_report.json";
  auto* cmd_batch =
      app.add_subcommand("batch", "run every scenario in a directory");
  cmd_batch->add_option("dir", batch_dir, "directory of scenario JSON files")
      ->required();
  cmd_batch->add_option("--out", batch_out, "aggregate report path");

  std::string verify_path;
  auto* cmd_verify =
      app.add_subcommand("verify", "run one scenario with the full invariant suite");
  cmd_verify->add_option("scenario", verify_path, "scenario JSON file")
      ->required();

  double nu_alpha = 1.0, nu_beta = 1.0, nu_b = 1.0, nu_c = 1.0;
  double nu_horizon = 250.0;
  int nu_samples = 4000;
  auto* cmd_nu =
      app.add_subcommand("nu", "kernel gain: closed form vs numeric estimate");
  cmd_nu->add_option("--alpha", nu_alpha)->required();
  cmd_nu->add_option("--beta", nu_beta)->required();
  cmd_nu->add_option("--b", nu_b)->required();
  cmd_nu->add_option("--c", nu_c)->required();
  cmd_nu->add_option("--horizon", nu_horizon);
  cmd_nu->add_option("--samples", nu_samples);

  std::string lambda_game;
  std::string lambda_z0, lambda_v, lambda_z1, lambda_z2, lambda_z3;
  std::string lambda_scenario;
  double lam_rho = 2.0, lam_sigma = 1.0, lam_l = 0.0;
  double lam_alpha = 1.0, lam_beta = 1.0, lam_b = 1.0, lam_c = 1.0;
  double lam_t = 1.0, lam_tau = 0.0;
  auto* cmd_lambda = app.add_subcommand(
      "lambda", "resolving function: closed form vs numeric oracle");
  cmd_lambda
      ->add_option("game", lambda_game,
                   "simple_motion | pontryagin | general")
      ->required();
  cmd_lambda->add_option("--z0", lambda_z0, "comma-separated vector");
  cmd_lambda->add_option("--v", lambda_v, "comma-separated vector");
  cmd_lambda->add_option("--rho", lam_rho);
  cmd_lambda->add_option("--sigma", lam_sigma);
  cmd_lambda->add_option("--l", lam_l);
  cmd_lambda->add_option("--alpha", lam_alpha);
  cmd_lambda->add_option("--beta", lam_beta);
  cmd_lambda->add_option("--b", lam_b);
  cmd_lambda->add_option("--c", lam_c);
  cmd_lambda->add_option("--t", lam_t);
  cmd_lambda->add_option("--tau", lam_tau);
  cmd_lambda->add_option("--z1", lambda_z1, "comma-separated vector");
  cmd_lambda->add_option("--z2", lambda_z2, "comma-separated vector");
  cmd_lambda->add_option("--z3", lambda_z3, "comma-separated vector");
  cmd_lambda->add_option("--scenario", lambda_scenario,
                         "general-game scenario file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (cmd_run->parsed()) return run_one(scenario_path, false);
    if (cmd_verify->parsed()) return run_one(verify_path, true);
    if (cmd_batch->parsed()) return run_batch(batch_dir, batch_out);
    if (cmd_nu->parsed())
      return run_nu(nu_alpha, nu_beta, nu_b, nu_c, nu_horizon, nu_samples);
    if (cmd_lambda->parsed()) {
      if (lambda_game == "simple_motion") {
        if (lambda_z0.empty() || lambda_v.empty())
          throw ValidationError("lambda simple_motion requires --z0 and --v");
        const VectorXd z0 = parse_csv_vector(lambda_z0, "--z0");
        const VectorXd v = parse_csv_vector(lambda_v, "--v");
        if (v.size() != z0.size())
          throw ValidationError("--z0 and --v must share one dimension");
        SimpleMotionParams params;
        params.rho = lam_rho;
        params.sigma = lam_sigma;
        params.l = lam_l;
        params.n = z0.size();
        params.validate();
        if (z0.norm() <= params.l)
          throw ValidationError("initial state inside terminal set");
        const double closed = lambda_l(v, z0, params.delta(), params.l);
        const auto sample = resolve_lambda_numeric(
            make_simple_motion_context(params), 1.0, 0.0, v, z0);
        std::cout << "lambda closed form: " << fmt_full(closed) << "\n"
                  << "lambda numeric:     " << fmt_full(sample.lambda) << " ("
                  << sample.iterations << " margin evaluations)\n";
        return 0;
      }
      if (lambda_game == "pontryagin") {
        if (lambda_z1.empty() || lambda_v.empty())
          throw ValidationError("lambda pontryagin requires --z1 and --v");
        PontryaginState z0;
        z0.z1 = parse_csv_vector(lambda_z1, "--z1");
        const Index n = z0.z1.size();
        z0.z2 = lambda_z2.empty() ? VectorXd::Zero(n)
                                  : parse_csv_vector(lambda_z2, "--z2");
        z0.z3 = lambda_z3.empty() ? VectorXd::Zero(n)
                                  : parse_csv_vector(lambda_z3, "--z3");
        const VectorXd v = parse_csv_vector(lambda_v, "--v");
        if (v.size() != n || z0.z2.size() != n || z0.z3.size() != n)
          throw ValidationError("--z1, --z2, --z3, --v must share one dimension");
        PontryaginParams params;
        params.alpha = lam_alpha;
        params.beta = lam_beta;
        params.b = lam_b;
        params.c = lam_c;
        params.rho = lam_rho;
        params.sigma = lam_sigma;
        params.n = n;
        params.validate();
        if (!(lam_tau >= 0.0 && lam_tau <= lam_t))
          throw ValidationError("need 0 <= tau <= t");
        const double closed = lambda_pontryagin(params, lam_t, lam_tau, v, z0);
        const auto sample = resolve_lambda_numeric(
            make_pontryagin_context(params), lam_t, lam_tau, v, stack_state(z0));
        std::cout << "lambda closed form: " << fmt_full(closed) << "\n"
                  << "lambda numeric:     " << fmt_full(sample.lambda) << " ("
                  << sample.iterations << " margin evaluations)\n";
        return 0;
      }
      if (lambda_game == "general") {
        if (lambda_scenario.empty() || lambda_z0.empty() || lambda_v.empty())
          throw ValidationError(
              "lambda general requires --scenario, --z0 and --v");
        const ScenarioConfig config = parse_scenario(lambda_scenario);
        if (config.game != GameKind::general || !config.general)
          throw ValidationError("scenario does not describe a general game");
        const VectorXd z0 = parse_csv_vector(lambda_z0, "--z0");
        const VectorXd v = parse_csv_vector(lambda_v, "--v");
        ResolvingContext ctx;
        ctx.game = config.general->game;
        ctx.pi = make_projector(ctx.game.n(), ctx.game.terminal.m0_basis);
        const MatrixXd kernel = config.general->kernel;
        ctx.kernel = {[kernel](double) { return kernel; }, "constant kernel"};
        ctx.nu_p = estimate_nu(ctx.kernel, ctx.game.p, 1.0, 100).nu_p;
        if (z0.size() != ctx.game.n() || v.size() != ctx.game.k())
          throw ValidationError("--z0 / --v dimensions do not match the game");
        const auto sample = resolve_lambda_numeric(ctx, lam_t, lam_tau, v, z0);
        std::cout << "lambda numeric: " << fmt_full(sample.lambda) << " ("
                  << sample.iterations << " margin evaluations)\n";
        return 0;
      }
      throw ValidationError("unknown game '" + lambda_game + "'");
    }
  } catch (const Error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace pursuit
