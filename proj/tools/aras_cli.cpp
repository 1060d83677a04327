#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "aras/errors.hpp"
#include "aras/problem_file.hpp"
#include "aras/random.hpp"
#include "aras/report.hpp"
#include "aras/synthesis.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitSuccess = 0;
constexpr int kExitFailed = 1;
constexpr int kExitInconclusive = 2;
constexpr int kExitError = 3;

int ExitCode(aras::Verdict v) {
  switch (v) {
    case aras::Verdict::kSuccess: return kExitSuccess;
    case aras::Verdict::kFailed: return kExitFailed;
    case aras::Verdict::kInconclusive: return kExitInconclusive;
  }
  return kExitError;
}

struct Common {
  std::string spec;
  std::string out = ".";
  std::uint64_t seed = 1;
  int threads = 1;
  double eps = 0.0;
  double tol = 1e-4;
  std::size_t samples = 1000;
  std::string smtlib;
};

class Stopwatch {
 public:
  double Seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

fs::path OutDir(const Common& c) {
  fs::path dir(c.out);
  fs::create_directories(dir);
  return dir;
}

std::string Csv(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

json ControlFile(const aras::ControlSequence& u) {
  return {{"m", u.dim()}, {"T", u.horizon()}, {"control", aras::ToJson(u)}};
}

aras::ControlSequence ReadControl(const std::string& path, const aras::LtvSystem& sys) {
  std::ifstream in(path);
  if (!in) throw aras::Error(aras::ErrorCode::kParseError, "cannot open " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw aras::Error(aras::ErrorCode::kParseError, path + ": " + e.what());
  }
  if (!j.contains("control") || !j["control"].is_array() ||
      static_cast<int>(j["control"].size()) != sys.horizon()) {
    throw aras::Error(aras::ErrorCode::kSchemaViolation,
                      "control: expected " + std::to_string(sys.horizon()) + " rows");
  }
  const int m = sys.num_controls();
  Eigen::VectorXd stacked(m * sys.horizon());
  for (int t = 0; t < sys.horizon(); ++t) {
    const json& row = j["control"][t];
    if (!row.is_array() || static_cast<int>(row.size()) != m) {
      throw aras::Error(aras::ErrorCode::kSchemaViolation,
                        "control[" + std::to_string(t) + "]: expected " +
                            std::to_string(m) + " entries");
    }
    for (int i = 0; i < m; ++i) stacked[t * m + i] = row[i].get<double>();
  }
  return aras::ControlSequence(m, sys.horizon(), stacked);
}

int CmdSynth(const Common& c) {
  Stopwatch clock;
  const aras::ArasProblem p = aras::LoadProblem(c.spec);
  const fs::path dir = OutDir(c);
  if (!c.smtlib.empty()) {
    std::ofstream smt(c.smtlib);
    smt << aras::ToSmtLib(aras::BuildSynthesisFormula(p, nullptr, nullptr), "u");
  }
  const aras::SynthesisOutcome r = aras::Synthesize(p);
  aras::RunReport report;
  report.command = "synth";
  report.outcome = aras::ToString(r.verdict);
  report.formula = r.formula;
  report.stats = r.stats;
  if (r.control) {
    aras::WriteJson((dir / "control.json").string(), ControlFile(*r.control));
    report.payload["control"] = aras::ToJson(*r.control);
    if (c.samples > 0) {
      report.validation = aras::ValidateControl(p, *r.control, c.samples, c.seed);
    }
  }
  report.wall_seconds = clock.Seconds();
  aras::WriteJson((dir / "report.json").string(), report.ToJson());
  std::cout << report.outcome << " |phi|=" << r.formula.total
            << " lp_calls=" << r.stats.lp_calls << " branches=" << r.stats.branches
            << " time=" << report.wall_seconds << "s\n";
  if (report.validation && report.validation->violations() > 0) {
    std::cerr << "validation: " << report.validation->first_violation << "\n";
  }
  return ExitCode(r.verdict);
}

int CmdTable(const Common& c) {
  Stopwatch clock;
  const aras::ArasProblem p = aras::LoadProblem(c.spec);
  const fs::path dir = OutDir(c);
  aras::TableOptions opts;
  opts.eps_min = c.eps;
  const aras::TableOutcome r = aras::TableSynthesize(p, opts);
  aras::RunReport report;
  report.command = "table-synth";
  report.outcome = aras::ToString(r.verdict);
  report.payload["entries"] = r.table.entries.size();
  report.payload["synth_calls"] = r.synth_calls;
  if (r.witness) report.payload["witness"] = aras::ToJson(*r.witness);
  if (r.stuck_cell) {
    report.payload["stuck_cell"] = {{"center", aras::ToJson(r.stuck_cell->center)},
                                    {"radius", r.stuck_cell->radius}};
  }
  if (r.verdict == aras::Verdict::kSuccess) {
    aras::WriteJson((dir / "table.json").string(), aras::ToJson(r.table));
  }
  report.wall_seconds = clock.Seconds();
  aras::WriteJson((dir / "report.json").string(), report.ToJson());
  std::cout << report.outcome << " entries=" << r.table.entries.size()
            << " synth_calls=" << r.synth_calls << "\n";
  return ExitCode(r.verdict);
}

struct GridOptions {
  std::vector<int> axes{0, 1};
  std::vector<double> x_range;
  std::vector<double> y_range;
  int cells = 10;
};

int CmdVuln(const Common& c, const GridOptions& g) {
  Stopwatch clock;
  const aras::ArasProblem p = aras::LoadProblem(c.spec);
  const int n = p.sys.num_states();
  if (g.axes.size() != 2 || g.axes[0] < 0 || g.axes[0] >= n || g.axes[1] < 0 ||
      g.axes[1] >= n) {
    throw aras::Error(aras::ErrorCode::kInvalidProblem, "--axes needs two state indices");
  }
  if (g.x_range.size() != 2 || g.y_range.size() != 2 || g.cells < 1) {
    throw aras::Error(aras::ErrorCode::kInvalidProblem,
                      "--x-range and --y-range need two values, --cells >= 1");
  }
  std::vector<Eigen::VectorXd> centers;
  for (int i = 0; i < g.cells; ++i) {
    for (int j = 0; j < g.cells; ++j) {
      Eigen::VectorXd x = p.init.center;
      auto at = [&](const std::vector<double>& r, int k) {
        return g.cells == 1 ? 0.5 * (r[0] + r[1])
                            : r[0] + (r[1] - r[0]) * k / (g.cells - 1);
      };
      x[g.axes[0]] = at(g.x_range, i);
      x[g.axes[1]] = at(g.y_range, j);
      centers.push_back(std::move(x));
    }
  }
  const std::vector<double> budgets =
      aras::VulnerabilityGrid(p, centers, c.tol, c.threads);
  const fs::path dir = OutDir(c);
  std::ofstream csv(dir / "vuln.csv");
  csv << "x" << g.axes[0] << ",x" << g.axes[1] << ",b_mfc\n";
  for (std::size_t k = 0; k < centers.size(); ++k) {
    csv << Csv(centers[k][g.axes[0]]) << "," << Csv(centers[k][g.axes[1]]) << ","
        << Csv(budgets[k]) << "\n";
  }
  aras::RunReport report;
  report.command = "vuln";
  report.outcome = "success";
  report.payload["cells"] = centers.size();
  report.wall_seconds = clock.Seconds();
  aras::WriteJson((dir / "report.json").string(), report.ToJson());
  std::cout << "vuln cells=" << centers.size() << "\n";
  return kExitSuccess;
}

int CmdAttack(const Common& c) {
  Stopwatch clock;
  const aras::ProblemSpecFile spec = aras::ReadProblemFile(c.spec);
  if (!spec.attack) {
    throw aras::Error(aras::ErrorCode::kSchemaViolation, "attack: missing");
  }
  const aras::AttackSpec& a = *spec.attack;
  const aras::LtvSystem sys = spec.System();
  const auto unsafe = a.UnsafeSets();
  const double eps = c.eps > 0.0 ? c.eps : a.cover_eps;
  const aras::AttackTable table = aras::SynthesizeAttackTable(
      sys, a.states, eps, unsafe, aras::ExpandStacked(a.adv, spec.T), a.ctr_budget,
      c.threads);
  const fs::path dir = OutDir(c);
  aras::WriteJson((dir / "attack_table.json").string(), aras::ToJson(table));
  std::ofstream csv(dir / "vulnerable_cells.csv");
  for (int i = 0; i < spec.n; ++i) csv << "x" << i << ",";
  csv << "radius,step,unsafe_index\n";
  for (const auto& e : table.entries) {
    for (int i = 0; i < spec.n; ++i) csv << Csv(e.cell.center[i]) << ",";
    csv << Csv(e.cell.radius) << "," << e.step << "," << e.unsafe_index << "\n";
  }
  aras::RunReport report;
  report.command = "attack";
  report.outcome = "success";
  report.payload["cells_examined"] = table.cells_examined;
  report.payload["vulnerable_cells"] = table.entries.size();
  report.wall_seconds = clock.Seconds();
  aras::WriteJson((dir / "report.json").string(), report.ToJson());
  std::cout << "attack cells=" << table.cells_examined
            << " vulnerable=" << table.entries.size() << "\n";
  return kExitSuccess;
}

int CmdSimulate(const Common& c, const std::string& control_path, bool exhaust) {
  const aras::ArasProblem p = aras::LoadProblem(c.spec);
  const aras::ControlSequence u = control_path.empty()
                                      ? aras::ControlSequence::Zero(p.sys)
                                      : ReadControl(control_path, p.sys);
  const int n = p.sys.num_states();
  const int T = p.sys.horizon();
  const int l = p.sys.num_adversary();
  const double radius = std::sqrt(p.adv_budget);
  aras::Rng rng(c.seed);
  const fs::path dir = OutDir(c);
  std::ofstream csv(dir / "trajectories.csv");
  csv << "sample,t";
  for (int i = 0; i < n; ++i) csv << ",x" << i + 1;
  csv << "\n";
  for (std::size_t k = 0; k < c.samples; ++k) {
    const Eigen::VectorXd x0 = p.init.center + rng.InBall(n, p.init.radius);
    const Eigen::VectorXd a =
        exhaust ? rng.OnSphere(l * T, radius) : rng.InBall(l * T, radius);
    const aras::Trajectory traj =
        aras::Simulate(p.sys, x0, u, aras::AdversarySequence(l, T, a));
    for (int t = 0; t <= T; ++t) {
      csv << k << "," << t;
      for (int i = 0; i < n; ++i) csv << "," << Csv(traj.states[t][i]);
      csv << "\n";
    }
  }
  std::cout << "simulated " << c.samples << " trajectories\n";
  return kExitSuccess;
}

int CmdGen(const Common& c, const std::string& kind, int T, int obstacles) {
  aras::ProblemSpecFile spec;
  if (kind == "vehicle") {
    spec = aras::GenVehicle(T, obstacles, c.seed);
  } else if (kind == "helicopter") {
    spec = aras::GenHelicopterLike(T, c.seed);
  } else {
    throw aras::Error(aras::ErrorCode::kInvalidProblem,
                      "--kind must be vehicle or helicopter");
  }
  const fs::path out(c.out);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  aras::WriteProblemFile(out.string(), spec);
  return kExitSuccess;
}

void AddCommon(CLI::App* cmd, Common& c, bool needs_spec = true) {
  auto* spec = cmd->add_option("--spec", c.spec, "Problem file (JSON)");
  if (needs_spec) spec->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", c.out, "Output directory");
  cmd->add_option("--seed", c.seed, "Random seed");
  cmd->add_option("--threads", c.threads, "Worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--eps", c.eps, "Cover or refinement radius");
  cmd->add_option("--tol", c.tol, "Budget search tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--samples", c.samples, "Monte Carlo samples");
  cmd->add_option("--emit-smtlib", c.smtlib, "Write the synthesis formula as SMT-LIB");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adversarial reach-avoid synthesis for linear systems"};
  app.require_subcommand(1);
  Common common;

  auto* synth = app.add_subcommand("synth", "Open-loop control synthesis");
  AddCommon(synth, common);
  auto* table = app.add_subcommand("table-synth", "Look-up table synthesis over Init");
  AddCommon(table, common);

  GridOptions grid;
  auto* vuln = app.add_subcommand("vuln", "Maximum feasible adversary budget grid");
  AddCommon(vuln, common);
  vuln->add_option("--axes", grid.axes, "Two state indices spanning the grid")
      ->expected(2);
  vuln->add_option("--x-range", grid.x_range, "Range on the first axis")
      ->expected(2)
      ->required();
  vuln->add_option("--y-range", grid.y_range, "Range on the second axis")
      ->expected(2)
      ->required();
  vuln->add_option("--cells", grid.cells, "Grid points per axis");

  auto* attack = app.add_subcommand("attack", "Attack table over the state box");
  AddCommon(attack, common);

  std::string control_path;
  bool exhaust = false;
  auto* simulate = app.add_subcommand("simulate", "Trajectories under random adversaries");
  AddCommon(simulate, common);
  simulate->add_option("--control", control_path, "control.json (default: zero)");
  simulate->add_flag("--budget-exhaust", exhaust, "Adversaries on the budget sphere");

  std::string kind = "vehicle";
  int horizon = 10;
  int obstacles = 0;
  auto* gen = app.add_subcommand("gen", "Write a benchmark problem file");
  AddCommon(gen, common, false);
  gen->add_option("--kind", kind, "vehicle or helicopter");
  gen->add_option("--T", horizon, "Horizon")->check(CLI::PositiveNumber);
  gen->add_option("--obstacles", obstacles, "Obstacle count (vehicle)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitError;
  }

  try {
    if (*synth) return CmdSynth(common);
    if (*table) return CmdTable(common);
    if (*vuln) return CmdVuln(common, grid);
    if (*attack) return CmdAttack(common);
    if (*simulate) return CmdSimulate(common, control_path, exhaust);
    if (*gen) return CmdGen(common, kind, horizon, obstacles);
  } catch (const aras::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
