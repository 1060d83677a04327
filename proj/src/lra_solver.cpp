#include "aras/lra_solver.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <tuple>

#include "aras/errors.hpp"

namespace aras {

LinFormula LinFormula::Atom(LinAtom a) {
  LinFormula f;
  f.kind = Kind::kAtom;
  f.atom = std::move(a);
  return f;
}

LinFormula LinFormula::And(std::vector<LinFormula> children) {
  LinFormula f;
  f.kind = Kind::kAnd;
  f.children = std::move(children);
  return f;
}

LinFormula LinFormula::Or(std::vector<LinFormula> children) {
  LinFormula f;
  f.kind = Kind::kOr;
  f.children = std::move(children);
  return f;
}

LinFormula LinFormula::FromCnf(const PolytopicSet& set) {
  std::vector<LinFormula> conjuncts;
  conjuncts.reserve(set.clauses.size());
  for (const auto& clause : set.clauses) {
    if (clause.size() == 1) {
      conjuncts.push_back(Atom(clause.front()));
      continue;
    }
    std::vector<LinFormula> disjuncts;
    disjuncts.reserve(clause.size());
    for (const auto& a : clause) disjuncts.push_back(Atom(a));
    conjuncts.push_back(Or(std::move(disjuncts)));
  }
  return And(std::move(conjuncts));
}

std::size_t LinFormula::CountAtoms() const {
  if (kind == Kind::kAtom) return 1;
  std::size_t count = 0;
  for (const auto& c : children) count += c.CountAtoms();
  return count;
}

int LinFormula::Dim() const {
  if (kind == Kind::kAtom) return static_cast<int>(atom.c.size());
  for (const auto& c : children) {
    if (int d = c.Dim(); d > 0) return d;
  }
  return 0;
}

bool Evaluate(const LinFormula& f, const Eigen::VectorXd& x, double slack) {
  switch (f.kind) {
    case LinFormula::Kind::kAtom:
      if (f.atom.c.size() != x.size()) {
        throw Error(ErrorCode::kDimensionMismatch, "formula evaluation");
      }
      return f.atom.Holds(x, slack);
    case LinFormula::Kind::kAnd:
      return std::all_of(f.children.begin(), f.children.end(),
                         [&](const LinFormula& c) { return Evaluate(c, x, slack); });
    case LinFormula::Kind::kOr:
      return std::any_of(f.children.begin(), f.children.end(),
                         [&](const LinFormula& c) { return Evaluate(c, x, slack); });
  }
  return false;
}

struct LraSolver::Frame {
  struct Pending {
    const LinFormula* node;
    std::size_t seq;
    bool resolved = false;
  };

  std::vector<LinAtom> committed;
  std::vector<Pending> pending;
  std::size_t next_seq = 0;
  int contradictions = 0;

  // Splits f into committed atoms and pending disjunctions.
  void Add(const LinFormula& f) {
    switch (f.kind) {
      case LinFormula::Kind::kAtom:
        committed.push_back(f.atom);
        break;
      case LinFormula::Kind::kAnd:
        for (const auto& c : f.children) Add(c);
        break;
      case LinFormula::Kind::kOr:
        if (f.children.empty()) {
          ++contradictions;
        } else if (f.children.size() == 1) {
          Add(f.children.front());
        } else {
          pending.push_back({&f, next_seq++});
        }
        break;
    }
  }

  // Undo log for Add(): sizes before the call.
  struct Mark {
    std::size_t committed;
    std::size_t pending;
    int contradictions;
  };
  Mark Save() const { return {committed.size(), pending.size(), contradictions}; }
  void Restore(const Mark& m) {
    committed.resize(m.committed);
    pending.resize(m.pending);
    contradictions = m.contradictions;
  }
};

bool LraSolver::Search(Frame& frame, std::size_t depth, Eigen::VectorXd& model) {
  stats_.max_depth = std::max(stats_.max_depth, depth);
  if (frame.contradictions > 0) return false;
  ++stats_.lp_calls;
  std::optional<Eigen::VectorXd> point =
      LpFeasible(frame.committed, dim_, options_);
  if (!point) return false;

  // Smallest falsified disjunction, formula order among equals.
  std::size_t chosen = frame.pending.size();
  for (std::size_t i = 0; i < frame.pending.size(); ++i) {
    const auto& p = frame.pending[i];
    if (p.resolved || Evaluate(*p.node, *point, 0.0)) continue;
    if (chosen == frame.pending.size() ||
        std::make_tuple(p.node->children.size(), p.seq) <
            std::make_tuple(frame.pending[chosen].node->children.size(),
                            frame.pending[chosen].seq)) {
      chosen = i;
    }
  }
  if (chosen == frame.pending.size()) {
    model = std::move(*point);
    return true;
  }

  const LinFormula* node = frame.pending[chosen].node;
  frame.pending[chosen].resolved = true;
  for (const auto& child : node->children) {
    ++stats_.branches;
    const Frame::Mark mark = frame.Save();
    frame.Add(child);
    const bool found = Search(frame, depth + 1, model);
    frame.Restore(mark);
    if (found) {
      frame.pending[chosen].resolved = false;
      return true;
    }
  }
  frame.pending[chosen].resolved = false;
  return false;
}

SolveResult LraSolver::Solve(const LinFormula& f) {
  stats_ = SolveStats{};
  stats_.atom_count = f.CountAtoms();
  // Top-level conjuncts after flattening nested ANDs.
  std::vector<const LinFormula*> stack{&f};
  while (!stack.empty()) {
    const LinFormula* node = stack.back();
    stack.pop_back();
    if (node->kind == LinFormula::Kind::kAnd) {
      for (const auto& c : node->children) stack.push_back(&c);
    } else {
      ++stats_.clause_count;
    }
  }
  dim_ = f.Dim();

  Frame frame;
  frame.Add(f);
  SolveResult result;
  result.sat = Search(frame, 0, result.model);
  if (!result.sat) result.model.resize(0);
  return result;
}

std::pair<SolveResult, SolveStats> Solve(const LinFormula& f) {
  LraSolver solver;
  SolveResult r = solver.Solve(f);
  return {std::move(r), solver.stats()};
}

namespace {

std::string Decimal(double v) {
  if (!std::isfinite(v)) {
    throw Error(ErrorCode::kInvalidProblem, "non-finite coefficient in formula");
  }
  char buf[512];
  const double mag = std::fabs(v);
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), mag,
                                 std::chars_format::fixed);
  std::string s(buf, end);
  if (s.find('.') == std::string::npos) s += ".0";
  return v < 0.0 ? "(- " + s + ")" : s;
}

void EmitSmt(const LinFormula& f, const std::string& prefix, std::ostream& os) {
  switch (f.kind) {
    case LinFormula::Kind::kAtom: {
      std::vector<std::string> terms;
      for (Eigen::Index i = 0; i < f.atom.c.size(); ++i) {
        if (f.atom.c[i] == 0.0) continue;
        terms.push_back("(* " + Decimal(f.atom.c[i]) + " " + prefix +
                        std::to_string(i) + ")");
      }
      os << "(<= ";
      if (terms.empty()) {
        os << "0.0";
      } else if (terms.size() == 1) {
        os << terms.front();
      } else {
        os << "(+";
        for (const auto& t : terms) os << " " << t;
        os << ")";
      }
      os << " " << Decimal(f.atom.rhs) << ")";
      break;
    }
    case LinFormula::Kind::kAnd:
    case LinFormula::Kind::kOr: {
      const bool is_and = f.kind == LinFormula::Kind::kAnd;
      if (f.children.empty()) {
        os << (is_and ? "true" : "false");
        break;
      }
      os << (is_and ? "(and" : "(or");
      for (const auto& c : f.children) {
        os << "\n  ";
        EmitSmt(c, prefix, os);
      }
      os << ")";
      break;
    }
  }
}

}  // namespace

std::string ToSmtLib(const LinFormula& f, const std::string& var_prefix) {
  std::ostringstream os;
  os << "(set-logic QF_LRA)\n";
  for (int i = 0; i < f.Dim(); ++i) {
    os << "(declare-const " << var_prefix << i << " Real)\n";
  }
  os << "(assert ";
  EmitSmt(f, var_prefix, os);
  os << ")\n(check-sat)\n(get-model)\n";
  return os.str();
}

}  // namespace aras
