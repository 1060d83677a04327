#include "aras/problem_file.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "aras/errors.hpp"

namespace aras {
namespace {

using nlohmann::json;

[[noreturn]] void Schema(const std::string& field, const std::string& what) {
  throw Error(ErrorCode::kSchemaViolation, field + ": " + what);
}

const json& Field(const json& obj, const std::string& path, const char* key) {
  if (!obj.is_object()) Schema(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) Schema(path.empty() ? key : path + "." + key, "missing");
  return *it;
}

std::string Join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

double Number(const json& j, const std::string& path) {
  if (!j.is_number()) Schema(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) Schema(path, "must be finite");
  return v;
}

int Count(const json& j, const std::string& path, int min) {
  if (!j.is_number_integer()) Schema(path, "expected an integer");
  const auto v = j.get<long long>();
  if (v < min || v > 1000000) {
    Schema(path, "must be an integer >= " + std::to_string(min));
  }
  return static_cast<int>(v);
}

Eigen::VectorXd Vector(const json& j, const std::string& path, int expected = -1) {
  if (!j.is_array()) Schema(path, "expected an array of numbers");
  if (expected >= 0 && static_cast<int>(j.size()) != expected) {
    Schema(path, "expected " + std::to_string(expected) + " entries, got " +
                     std::to_string(j.size()));
  }
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    v[i] = Number(j[i], path + "[" + std::to_string(i) + "]");
  }
  return v;
}

// Row-major nested array [[row0], [row1], ...].
Eigen::MatrixXd Matrix(const json& j, const std::string& path, int rows, int cols) {
  if (!j.is_array() || static_cast<int>(j.size()) != rows) {
    Schema(path, "expected a " + std::to_string(rows) + "x" + std::to_string(cols) +
                     " matrix (array of " + std::to_string(rows) + " rows)");
  }
  Eigen::MatrixXd M(rows, cols);
  for (int r = 0; r < rows; ++r) {
    M.row(r) = Vector(j[r], path + "[" + std::to_string(r) + "]", cols).transpose();
  }
  return M;
}

std::vector<Eigen::MatrixXd> Matrices(const json& j, const std::string& path,
                                      bool time_invariant, int T, int rows,
                                      int cols) {
  if (time_invariant) return {Matrix(j, path, rows, cols)};
  if (!j.is_array() || static_cast<int>(j.size()) != T) {
    Schema(path, "time-varying system needs an array of T = " + std::to_string(T) +
                     " matrices");
  }
  std::vector<Eigen::MatrixXd> out;
  for (int t = 0; t < T; ++t) {
    out.push_back(Matrix(j[t], path + "[" + std::to_string(t) + "]", rows, cols));
  }
  return out;
}

PolytopicSet Clauses(const json& obj, const std::string& path, int dim) {
  const json& cl = Field(obj, path, "clauses");
  const std::string cpath = Join(path, "clauses");
  if (!cl.is_array()) Schema(cpath, "expected an array of clauses");
  PolytopicSet set(dim);
  for (std::size_t i = 0; i < cl.size(); ++i) {
    const std::string ipath = cpath + "[" + std::to_string(i) + "]";
    if (!cl[i].is_array() || cl[i].empty()) {
      Schema(ipath, "expected a non-empty array of atoms");
    }
    Clause clause;
    for (std::size_t k = 0; k < cl[i].size(); ++k) {
      const std::string apath = ipath + "[" + std::to_string(k) + "]";
      clause.push_back({Vector(Field(cl[i][k], apath, "c"), apath + ".c", dim),
                        Number(Field(cl[i][k], apath, "rhs"), apath + ".rhs")});
    }
    set.AddClause(std::move(clause));
  }
  return set;
}

Halfspaces Polytope(const json& j, const std::string& path, int dim) {
  const json& b = Field(j, path, "b");
  const Eigen::VectorXd bv = Vector(b, path + ".b");
  if (bv.size() == 0) Schema(path + ".b", "needs at least one face");
  return {Matrix(Field(j, path, "A"), path + ".A", static_cast<int>(bv.size()), dim),
          bv};
}

std::vector<Halfspaces> Polytopes(const json& j, const std::string& path, int dim) {
  if (!j.is_array()) Schema(path, "expected an array of {A, b} polytopes");
  std::vector<Halfspaces> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(Polytope(j[i], path + "[" + std::to_string(i) + "]", dim));
  }
  return out;
}

StackedConstraint Stacked(const json& j, const std::string& path, int step_dim,
                          int T) {
  if (j.is_object() && j.contains("step_box")) {
    const json& box = j["step_box"];
    const std::string bpath = path + ".step_box";
    StepBox sb{Vector(Field(box, bpath, "lo"), bpath + ".lo", step_dim),
               Vector(Field(box, bpath, "hi"), bpath + ".hi", step_dim)};
    if ((sb.lo.array() > sb.hi.array()).any()) Schema(bpath, "lo > hi");
    return sb;
  }
  return Clauses(j, path, step_dim * T);
}

json ToJson(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json ToJson(const Eigen::MatrixXd& M) {
  json a = json::array();
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    a.push_back(ToJson(Eigen::VectorXd(M.row(r).transpose())));
  }
  return a;
}

json ToJson(const PolytopicSet& set) {
  json clauses = json::array();
  for (const auto& clause : set.clauses) {
    json atoms = json::array();
    for (const auto& atom : clause) {
      atoms.push_back({{"c", ToJson(atom.c)}, {"rhs", atom.rhs}});
    }
    clauses.push_back(std::move(atoms));
  }
  return {{"clauses", std::move(clauses)}};
}

json ToJson(const StackedConstraint& c) {
  if (const auto* sb = std::get_if<StepBox>(&c)) {
    return {{"step_box", {{"lo", ToJson(sb->lo)}, {"hi", ToJson(sb->hi)}}}};
  }
  return ToJson(std::get<PolytopicSet>(c));
}

json ToJson(const std::vector<Halfspaces>& polys) {
  json a = json::array();
  for (const auto& p : polys) a.push_back({{"A", ToJson(p.A)}, {"b", ToJson(p.b)}});
  return a;
}

json ToJson(const std::vector<Eigen::MatrixXd>& Ms, bool time_invariant) {
  if (time_invariant) return ToJson(Ms.front());
  json a = json::array();
  for (const auto& M : Ms) a.push_back(ToJson(M));
  return a;
}

}  // namespace

PolytopicSet ExpandStacked(const StackedConstraint& c, int horizon) {
  if (const auto* sb = std::get_if<StepBox>(&c)) {
    return StackedBoxSet(sb->lo, sb->hi, horizon);
  }
  return std::get<PolytopicSet>(c);
}

std::vector<PolytopicSet> AttackSpec::UnsafeSets() const {
  std::vector<PolytopicSet> out;
  for (const auto& p : unsafe) {
    PolytopicSet set(static_cast<int>(p.A.cols()));
    for (Eigen::Index r = 0; r < p.A.rows(); ++r) {
      set.AddAtom({p.A.row(r).transpose(), p.b[r]});
    }
    out.push_back(std::move(set));
  }
  return out;
}

LtvSystem ProblemSpecFile::System() const {
  if (time_invariant) return LtvSystem::TimeInvariant(A.at(0), B.at(0), C.at(0), T);
  return LtvSystem(A, B, C);
}

PolytopicSet ProblemSpecFile::SafeWithObstacles() const {
  PolytopicSet out = safe;
  for (const auto& o : obstacles) out.AddClause(NegatePolytope(o.A, o.b));
  return out;
}

ArasProblem ProblemSpecFile::ToProblem() const {
  ArasProblem p{System(),         Ball{theta, delta}, SafeWithObstacles(), goal,
                ExpandStacked(ctr, T), adv_budget};
  p.Validate();
  return p;
}

ProblemSpecFile ParseProblem(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw Error(ErrorCode::kParseError, "line " + std::to_string(line) + ", column " +
                                            std::to_string(col) + ": " + e.what());
  }
  if (!doc.is_object()) Schema("(root)", "expected an object");

  ProblemSpecFile s;
  const json& sys = Field(doc, "", "system");
  s.n = Count(Field(sys, "system", "n"), "system.n", 1);
  s.m = Count(Field(sys, "system", "m"), "system.m", 0);
  s.l = Count(Field(sys, "system", "l"), "system.l", 0);
  s.T = Count(Field(sys, "system", "T"), "system.T", 1);
  if (sys.contains("time_invariant")) {
    if (!sys["time_invariant"].is_boolean()) {
      Schema("system.time_invariant", "expected true or false");
    }
    s.time_invariant = sys["time_invariant"].get<bool>();
  }
  s.A = Matrices(Field(sys, "system", "A"), "system.A", s.time_invariant, s.T, s.n, s.n);
  s.B = Matrices(Field(sys, "system", "B"), "system.B", s.time_invariant, s.T, s.n, s.m);
  s.C = Matrices(Field(sys, "system", "C"), "system.C", s.time_invariant, s.T, s.n, s.l);

  const json& init = Field(doc, "", "init");
  s.theta = Vector(Field(init, "init", "theta"), "init.theta", s.n);
  s.delta = Number(Field(init, "init", "delta"), "init.delta");
  if (s.delta < 0.0) Schema("init.delta", "must be >= 0");

  s.safe = Clauses(Field(doc, "", "safe"), "safe", s.n);
  if (doc.contains("obstacles")) s.obstacles = Polytopes(doc["obstacles"], "obstacles", s.n);
  s.goal = Clauses(Field(doc, "", "goal"), "goal", s.n);
  s.ctr = Stacked(Field(doc, "", "ctr"), "ctr", s.m, s.T);

  const json& adv = Field(doc, "", "adversary");
  s.adv_budget = Number(Field(adv, "adversary", "budget"), "adversary.budget");
  if (s.adv_budget < 0.0) Schema("adversary.budget", "must be >= 0");

  if (doc.contains("attack")) {
    const json& a = doc["attack"];
    AttackSpec at;
    at.ctr_budget = Number(Field(a, "attack", "ctr_budget"), "attack.ctr_budget");
    if (at.ctr_budget < 0.0) Schema("attack.ctr_budget", "must be >= 0");
    at.adv = Stacked(Field(a, "attack", "adv"), "attack.adv", s.l, s.T);
    at.unsafe = Polytopes(Field(a, "attack", "unsafe"), "attack.unsafe", s.n);
    const json& st = Field(a, "attack", "states");
    at.states = {Vector(Field(st, "attack.states", "lo"), "attack.states.lo", s.n),
                 Vector(Field(st, "attack.states", "hi"), "attack.states.hi", s.n)};
    if ((at.states.lo.array() > at.states.hi.array()).any()) {
      Schema("attack.states", "lo > hi");
    }
    at.cover_eps = Number(Field(a, "attack", "cover_eps"), "attack.cover_eps");
    if (at.cover_eps <= 0.0) Schema("attack.cover_eps", "must be > 0");
    s.attack = std::move(at);
  }
  return s;
}

ProblemSpecFile ReadProblemFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParseError, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return ParseProblem(buf.str());
}

ArasProblem LoadProblem(const std::string& path) {
  return ReadProblemFile(path).ToProblem();
}

std::string SerializeProblem(const ProblemSpecFile& s) {
  json doc;
  doc["system"] = {{"n", s.n},
                   {"m", s.m},
                   {"l", s.l},
                   {"T", s.T},
                   {"time_invariant", s.time_invariant},
                   {"A", ToJson(s.A, s.time_invariant)},
                   {"B", ToJson(s.B, s.time_invariant)},
                   {"C", ToJson(s.C, s.time_invariant)}};
  doc["init"] = {{"theta", ToJson(s.theta)}, {"delta", s.delta}};
  doc["safe"] = ToJson(s.safe);
  if (!s.obstacles.empty()) doc["obstacles"] = ToJson(s.obstacles);
  doc["goal"] = ToJson(s.goal);
  doc["ctr"] = ToJson(s.ctr);
  doc["adversary"] = {{"budget", s.adv_budget}};
  if (s.attack) {
    const AttackSpec& a = *s.attack;
    doc["attack"] = {{"ctr_budget", a.ctr_budget},
                     {"adv", ToJson(a.adv)},
                     {"unsafe", ToJson(a.unsafe)},
                     {"states", {{"lo", ToJson(a.states.lo)}, {"hi", ToJson(a.states.hi)}}},
                     {"cover_eps", a.cover_eps}};
  }
  return doc.dump(2) + "\n";
}

void WriteProblemFile(const std::string& path, const ProblemSpecFile& spec) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kInvalidProblem, "cannot write " + path);
  out << SerializeProblem(spec);
}

}  // namespace aras
