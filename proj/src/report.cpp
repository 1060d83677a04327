#include "aras/report.hpp"

#include <fstream>

#include "aras/errors.hpp"

namespace aras {

using nlohmann::json;

json ToJson(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json ToJson(const ControlSequence& u) {
  json rows = json::array();
  for (int t = 0; t < u.horizon(); ++t) rows.push_back(ToJson(u.step(t)));
  return rows;
}

json ToJson(const AdversarySequence& a) {
  json rows = json::array();
  for (int t = 0; t < a.horizon(); ++t) rows.push_back(ToJson(a.step(t)));
  return rows;
}

json ToJson(const SolveStats& s) {
  return {{"atoms", s.atom_count},
          {"clauses", s.clause_count},
          {"lp_calls", s.lp_calls},
          {"branches", s.branches},
          {"max_depth", s.max_depth}};
}

json ToJson(const FormulaSize& f) {
  return {{"safe", f.safe}, {"goal", f.goal}, {"ctr", f.ctr}, {"total", f.total}};
}

json ToJson(const ValidationReport& v) {
  return {{"samples", v.samples},
          {"safe_violations", v.safe_violations},
          {"goal_violations", v.goal_violations},
          {"ctr_violations", v.ctr_violations},
          {"first_violation", v.first_violation}};
}

json ToJson(const LookupTable& table) {
  json entries = json::array();
  for (const auto& e : table.entries) {
    entries.push_back({{"center", ToJson(e.cell.center)},
                       {"radius", e.cell.radius},
                       {"control", ToJson(e.u)}});
  }
  return {{"entries", std::move(entries)}};
}

json ToJson(const AttackTable& table) {
  json entries = json::array();
  for (const auto& e : table.entries) {
    entries.push_back({{"center", ToJson(e.cell.center)},
                       {"radius", e.cell.radius},
                       {"step", e.step},
                       {"unsafe_index", e.unsafe_index},
                       {"attack", ToJson(e.a)}});
  }
  return {{"cells_examined", table.cells_examined}, {"entries", std::move(entries)}};
}

json RunReport::ToJson() const {
  json j = {{"command", command}, {"outcome", outcome}, {"wall_seconds", wall_seconds}};
  if (formula) {
    j["formula"] = aras::ToJson(*formula);
    j["phi"] = formula->total;
  }
  if (stats) j["solver"] = aras::ToJson(*stats);
  if (validation) j["validation"] = aras::ToJson(*validation);
  for (const auto& [key, value] : payload.items()) j[key] = value;
  return j;
}

void WriteJson(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kInvalidProblem, "cannot write " + path);
  out << j.dump(2) << "\n";
}

}  // namespace aras
