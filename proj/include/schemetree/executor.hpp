#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "schemetree/scheme.hpp"
#include "schemetree/structure.hpp"

namespace schemetree {

/// Current node plus register contents. Only registers in used_registers(S) are
/// assigned; the rest can never influence a run.
struct ExecState {
  std::size_t node = 0;
  Assignment registers;

  friend bool operator==(const ExecState&, const ExecState&) = default;
};

struct ExecStateHash {
  std::size_t operator()(const ExecState& s) const noexcept {
    std::size_t h = s.node;
    for (Element e : s.registers.values()) h = detail::hash_mix(h, e);
    return h;
  }
};

struct TraceStep {
  std::size_t node = 0;
  EdgeLabel edge = EdgeLabel::None;  // None for function nodes and the final terminal

  friend bool operator==(const TraceStep&, const TraceStep&) = default;
};

/// The run reached a terminal. The trace ends with that terminal (edge None).
struct Output {
  Natural value;
  std::vector<TraceStep> trace;
};

/// The run repeats a state: it walks `prefix` once, then `lasso` forever.
struct Diverges {
  std::vector<TraceStep> prefix;
  std::vector<TraceStep> lasso;
};

using Outcome = std::variant<Output, Diverges>;

inline ExecState initial_state(const Scheme& s, const Tuple& input) {
  if (input.size() != s.arity())
    throw Error("input has " + std::to_string(input.size()) + " elements, scheme arity is " +
                std::to_string(s.arity()));
  ExecState st;
  st.node = s.initial();
  for (VarIndex r : used_registers(s)) st.registers.bind(r, r < s.arity() ? input[r] : input.back());
  return st;
}

struct Transition {
  ExecState next;
  EdgeLabel edge = EdgeLabel::None;
};

/// One machine step: assignment, branch, or halt with the terminal's number.
inline std::variant<Transition, Natural> step(const Scheme& s, const Structure& u, const ExecState& st) {
  const Node& n = s.node(st.node);
  if (const auto* a = std::get_if<Assign>(&n.label)) {
    Transition t{st, EdgeLabel::None};
    t.next.registers.bind(a->target, eval_term(a->term, u, st.registers));
    t.next.node = n.next;
    return t;
  }
  if (const auto* test = std::get_if<Test>(&n.label)) {
    bool truth = eval_formula(test->formula, u, st.registers);
    return Transition{ExecState{truth ? n.on_true : n.on_false, st.registers},
                      truth ? EdgeLabel::One : EdgeLabel::Zero};
  }
  return std::get<Halt>(n.label).value;
}

/// |nodes| * |A|^r + 1 with r = |used registers|, saturating. No run takes more steps
/// than this before halting or revisiting a state.
inline std::uint64_t divergence_bound(const Scheme& s, const Structure& u) {
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t b = s.size();
  for (std::size_t i = 0; i < used_registers(s).size(); ++i) {
    if (b > kMax / u.size()) return kMax;
    b *= u.size();
  }
  return b == kMax ? b : b + 1;
}

/// Called with (step index, state) before each step, including the final terminal.
using StateObserver = std::function<void(std::size_t, const ExecState&)>;

/// Executes the program (S, U) on `input` until a terminal or a repeated state.
inline Outcome run(const Scheme& s, const Structure& u, const Tuple& input, const StateObserver& observe = {}) {
  ExecState st = initial_state(s, input);
  std::unordered_map<ExecState, std::size_t, ExecStateHash> seen;
  std::vector<TraceStep> trace;
  while (true) {
    if (auto it = seen.find(st); it != seen.end()) {
      Diverges d;
      d.prefix.assign(trace.begin(), trace.begin() + static_cast<std::ptrdiff_t>(it->second));
      d.lasso.assign(trace.begin() + static_cast<std::ptrdiff_t>(it->second), trace.end());
      return d;
    }
    if (observe) observe(trace.size(), st);
    auto r = step(s, u, st);
    if (auto* value = std::get_if<Natural>(&r)) {
      trace.push_back({st.node, EdgeLabel::None});
      return Output{*value, std::move(trace)};
    }
    seen.emplace(st, trace.size());
    auto& t = std::get<Transition>(r);
    trace.push_back({st.node, t.edge});
    st = std::move(t.next);
  }
}

// ---------------------------------------------------------------------------
// Totality

struct NotTotal {
  std::string structure;
  Tuple input;
  Diverges run;
};

/// Empty when total; otherwise the first diverging (structure, tuple) in enumeration order.
using TotalityVerdict = std::optional<NotTotal>;

inline TotalityVerdict check_totality(const Scheme& s, const Structure& u) {
  TotalityVerdict verdict;
  for_each_tuple(u.size(), s.arity(), [&](const Tuple& t) {
    auto out = run(s, u, t);
    if (auto* d = std::get_if<Diverges>(&out)) {
      verdict = NotTotal{u.name(), t, std::move(*d)};
      return false;
    }
    return true;
  });
  return verdict;
}

/// Structures checked in the given order.
inline TotalityVerdict check_totality_class(const Scheme& s, const std::vector<Structure>& k) {
  for (const auto& u : k)
    if (auto v = check_totality(s, u)) return v;
  return std::nullopt;
}

/// The graph of the partial function computed by (S, U): one row per input tuple,
/// in lexicographic order; nullopt marks undefined.
struct FunctionGraph {
  std::vector<std::pair<Tuple, std::optional<Natural>>> rows;

  friend bool operator==(const FunctionGraph&, const FunctionGraph&) = default;
};

inline FunctionGraph implemented_function(const Scheme& s, const Structure& u) {
  FunctionGraph g;
  for_each_tuple(u.size(), s.arity(), [&](const Tuple& t) {
    auto out = run(s, u, t);
    if (auto* o = std::get_if<Output>(&out))
      g.rows.emplace_back(t, o->value);
    else
      g.rows.emplace_back(t, std::nullopt);
    return true;
  });
  return g;
}

/// TSV: tuple<TAB>value, with ⊥ for undefined.
inline std::string function_table_tsv(const Structure& u, const FunctionGraph& g) {
  std::string out;
  for (const auto& [t, v] : g.rows) out += format_tuple(u, t) + '\t' + (v ? v->str() : std::string("⊥")) + '\n';
  return out;
}

inline std::string format_trace(const Scheme& s, const std::vector<TraceStep>& trace) {
  std::string out;
  for (const auto& st : trace) {
    if (!out.empty()) out += ' ';
    out += s.node(st.node).id;
    if (st.edge != EdgeLabel::None) out += std::string(":") + to_string(st.edge);
  }
  return out;
}

}  // namespace schemetree
