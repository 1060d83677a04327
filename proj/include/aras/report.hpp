#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "aras/lra_solver.hpp"
#include "aras/model.hpp"
#include "aras/synthesis.hpp"

namespace aras {

nlohmann::json ToJson(const Eigen::VectorXd& v);
/// Per-step rows: [[u_0], [u_1], ...].
nlohmann::json ToJson(const ControlSequence& u);
nlohmann::json ToJson(const AdversarySequence& a);
nlohmann::json ToJson(const SolveStats& s);
nlohmann::json ToJson(const FormulaSize& f);
nlohmann::json ToJson(const ValidationReport& v);
nlohmann::json ToJson(const LookupTable& table);
nlohmann::json ToJson(const AttackTable& table);

/// Summary of one CLI run, written as report.json.
struct RunReport {
  std::string command;
  std::string outcome;
  std::optional<FormulaSize> formula;
  std::optional<SolveStats> stats;
  double wall_seconds = 0.0;
  std::optional<ValidationReport> validation;
  /// Command-specific extras (control, witness, table size, ...).
  nlohmann::json payload = nlohmann::json::object();

  nlohmann::json ToJson() const;
};

void WriteJson(const std::string& path, const nlohmann::json& j);

}  // namespace aras
