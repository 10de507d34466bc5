#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "schemetree/executor.hpp"
#include "schemetree/scheme.hpp"
#include "schemetree/syntax.hpp"

namespace schemetree {

/// Register contents as terms over the inputs x_0..x_{n-1}. A register without an
/// explicit entry holds x_i for i < n and x_{n-1} otherwise.
class SymbolicState {
 public:
  explicit SymbolicState(unsigned arity) : arity_(arity) {}

  /// The starting state, with every listed register materialized.
  static SymbolicState initial(unsigned arity, const std::vector<VarIndex>& registers) {
    SymbolicState s(arity);
    for (VarIndex r : registers) s.slots_.insert_or_assign(r, s.term(r));
    return s;
  }

  unsigned arity() const noexcept { return arity_; }

  Term term(VarIndex i) const {
    if (auto it = slots_.find(i); it != slots_.end()) return it->second;
    return Term::var(i < arity_ ? i : arity_ - 1);
  }

  void set(VarIndex i, Term t) { slots_.insert_or_assign(i, std::move(t)); }

  const std::map<VarIndex, Term>& slots() const noexcept { return slots_; }

  /// Maps each given variable to its current term.
  Substitution substitution_for(const std::vector<VarIndex>& vars) const {
    Substitution sub;
    for (VarIndex v : vars) sub.emplace(v, term(v));
    return sub;
  }

  friend bool operator==(const SymbolicState& a, const SymbolicState& b) {
    return a.arity_ == b.arity_ && a.slots_ == b.slots_;
  }

 private:
  unsigned arity_;
  std::map<VarIndex, Term> slots_;
};

/// Advances the symbolic state across one node. Function nodes rewrite their target
/// slot and emit nothing; predicate nodes keep the state and emit the label with the
/// current terms substituted in, negated on the 0 edge.
inline std::pair<SymbolicState, std::optional<Formula>> symbolic_step(const SymbolicState& sym, const Node& node,
                                                                      EdgeLabel edge) {
  if (const auto* a = std::get_if<Assign>(&node.label)) {
    SymbolicState next = sym;
    next.set(a->target, substitute(a->term, sym.substitution_for(a->term.variables())));
    return {std::move(next), std::nullopt};
  }
  if (const auto* t = std::get_if<Test>(&node.label)) {
    if (edge == EdgeLabel::None) throw Error("predicate node " + node.id + " needs an edge label");
    Formula f = substitute(t->formula, sym.substitution_for(t->formula.free_vars()));
    if (edge == EdgeLabel::Zero) f = Formula::negation(std::move(f));
    return {sym, std::move(f)};
  }
  throw Error("symbolic_step: terminal node " + node.id + " has no successor");
}

/// One position of a path: which node, its label, and the edge taken.
struct PathStep {
  std::string node;
  NodeLabel label;
  EdgeLabel edge = EdgeLabel::None;
};

/// A complete path with its path condition. Finite paths end at a terminal and carry
/// its number; infinite ones are stored as steps[0..lasso_start) followed by
/// steps[lasso_start..] repeated forever.
struct PathRecord {
  std::vector<PathStep> steps;
  std::vector<Formula> pi;
  std::optional<Natural> terminal_value;
  std::optional<std::size_t> lasso_start;

  bool finite() const noexcept { return !lasso_start.has_value(); }
};

struct SymbolicReplay {
  std::vector<SymbolicState> states;  // state at each step, before the step's node acts
  std::vector<Formula> pi;
};

/// Threads symbolic_step along a trace. The terminal entry, if any, gets a state but
/// no step.
inline SymbolicReplay replay_symbolic(const Scheme& s, const std::vector<TraceStep>& trace) {
  SymbolicReplay r;
  SymbolicState sym = SymbolicState::initial(s.arity(), used_registers(s));
  for (const auto& st : trace) {
    r.states.push_back(sym);
    const Node& n = s.node(st.node);
    if (n.kind() == NodeKind::Terminal) break;
    auto [next, f] = symbolic_step(sym, n, st.edge);
    if (f) r.pi.push_back(std::move(*f));
    sym = std::move(next);
  }
  return r;
}

inline PathRecord make_path_record(const Scheme& s, const Outcome& outcome) {
  PathRecord p;
  std::vector<TraceStep> trace;
  if (const auto* o = std::get_if<Output>(&outcome)) {
    trace = o->trace;
    p.terminal_value = o->value;
  } else {
    const auto& d = std::get<Diverges>(outcome);
    trace = d.prefix;
    trace.insert(trace.end(), d.lasso.begin(), d.lasso.end());
    p.lasso_start = d.prefix.size();
  }
  for (const auto& st : trace) p.steps.push_back({s.node(st.node).id, s.node(st.node).label, st.edge});
  p.pi = replay_symbolic(s, trace).pi;
  return p;
}

/// The complete path of S satisfiable in U on `input`, with its path condition.
inline PathRecord path_of_run(const Scheme& s, const Structure& u, const Tuple& input) {
  return make_path_record(s, run(s, u, input));
}

// ---------------------------------------------------------------------------
// Path isomorphism

namespace detail {

struct StepSymbol {
  const NodeLabel* label;
  EdgeLabel edge;
  friend bool operator==(const StepSymbol& a, const StepSymbol& b) {
    return a.edge == b.edge && *a.label == *b.label;
  }
};

struct Lasso {
  std::vector<StepSymbol> prefix;
  std::vector<StepSymbol> cycle;
};

/// Canonical form of prefix·cycle^ω: primitive cycle, then the shortest prefix.
inline Lasso normalize(Lasso l) {
  const std::size_t k = l.cycle.size();
  for (std::size_t p = 1; p < k; ++p) {
    if (k % p) continue;
    bool periodic = true;
    for (std::size_t i = p; i < k && periodic; ++i) periodic = l.cycle[i] == l.cycle[i - p];
    if (periodic) {
      l.cycle.resize(p);
      break;
    }
  }
  while (!l.prefix.empty() && !l.cycle.empty() && l.prefix.back() == l.cycle.back()) {
    std::rotate(l.cycle.rbegin(), l.cycle.rbegin() + 1, l.cycle.rend());
    l.prefix.pop_back();
  }
  return l;
}

inline Lasso to_lasso(const PathRecord& p) {
  Lasso l;
  for (std::size_t i = 0; i < p.steps.size(); ++i) {
    StepSymbol sym{&p.steps[i].label, p.steps[i].edge};
    (i < *p.lasso_start ? l.prefix : l.cycle).push_back(sym);
  }
  return l;
}

}  // namespace detail

/// Same length and, position by position, the same node labels and edge labels.
/// Infinite paths are compared through their canonical lasso forms.
inline bool paths_isomorphic(const PathRecord& p, const PathRecord& q) {
  if (p.finite() != q.finite()) return false;
  if (p.finite()) {
    if (p.steps.size() != q.steps.size()) return false;
    for (std::size_t i = 0; i < p.steps.size(); ++i)
      if (p.steps[i].edge != q.steps[i].edge || !(p.steps[i].label == q.steps[i].label)) return false;
    return true;
  }
  auto a = detail::normalize(detail::to_lasso(p));
  auto b = detail::normalize(detail::to_lasso(q));
  return a.prefix == b.prefix && a.cycle == b.cycle;
}

/// Step of a (possibly infinite) path by position.
inline const PathStep* step_at(const PathRecord& p, std::size_t i) {
  if (i < p.steps.size()) return &p.steps[i];
  if (p.finite()) return nullptr;
  std::size_t start = *p.lasso_start;
  std::size_t period = p.steps.size() - start;
  return &p.steps[start + (i - start) % period];
}

/// First position at which the two paths differ (a missing step counts as a
/// difference), or nullopt when they are isomorphic. Works by direct position-wise
/// comparison over a horizon long enough for two eventually periodic words.
inline std::optional<std::size_t> first_mismatch(const PathRecord& p, const PathRecord& q) {
  std::size_t horizon = std::max(p.steps.size(), q.steps.size()) + 1;
  if (!p.finite() && !q.finite()) {
    std::size_t pp = p.steps.size() - *p.lasso_start, qp = q.steps.size() - *q.lasso_start;
    horizon = std::max(*p.lasso_start, *q.lasso_start) + pp * qp;
  }
  for (std::size_t i = 0; i < horizon; ++i) {
    const PathStep* a = step_at(p, i);
    const PathStep* b = step_at(q, i);
    if (!a || !b) return (a || b) ? std::optional<std::size_t>(i) : std::nullopt;
    if (a->edge != b->edge || !(a->label == b->label)) return i;
  }
  return std::nullopt;
}

inline std::string format_path_record(const PathRecord& p) {
  std::ostringstream out;
  for (std::size_t i = 0; i < p.steps.size(); ++i) {
    const auto& s = p.steps[i];
    if (p.lasso_start && i == *p.lasso_start) out << "  -- repeats from here --\n";
    out << "  " << i + 1 << ". " << s.node << " [" << to_string(s.label) << "]";
    if (s.edge != EdgeLabel::None) out << " edge " << to_string(s.edge);
    out << '\n';
  }
  out << "path condition:\n";
  for (std::size_t i = 0; i < p.pi.size(); ++i) out << "  " << i + 1 << ". " << to_string(p.pi[i]) << '\n';
  if (p.terminal_value)
    out << "terminal: " << *p.terminal_value << '\n';
  else
    out << "terminal: none (infinite path)\n";
  return out.str();
}

}  // namespace schemetree
