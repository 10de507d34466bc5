#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "schemetree/executor.hpp"
#include "schemetree/symbolic.hpp"

namespace schemetree {

struct Equivalent {};

struct NotEquivalent {
  std::string structure;
  Tuple input;
  std::size_t position = 0;  // first step at which the two satisfiable paths differ
  PathRecord first;
  PathRecord second;
};

struct ArityMismatch {
  unsigned first = 0;
  unsigned second = 0;
};

using EquivVerdict = std::variant<Equivalent, NotEquivalent, ArityMismatch>;

/// Strong equivalence relative to a finite class: equal arity and, for every structure
/// and input tuple, isomorphic satisfiable complete paths. Reports the first
/// counterexample in (structure order, lexicographic tuple order).
inline EquivVerdict strongly_equivalent(const Scheme& a, const Scheme& b, const std::vector<Structure>& k) {
  if (a.arity() != b.arity()) return ArityMismatch{a.arity(), b.arity()};
  for (const auto& u : k) {
    std::optional<NotEquivalent> found;
    for_each_tuple(u.size(), a.arity(), [&](const Tuple& t) {
      PathRecord p = path_of_run(a, u, t);
      PathRecord q = path_of_run(b, u, t);
      if (paths_isomorphic(p, q)) return true;
      auto pos = first_mismatch(p, q);
      found = NotEquivalent{u.name(), t, pos.value_or(0), std::move(p), std::move(q)};
      return false;
    });
    if (found) return std::move(*found);
  }
  return Equivalent{};
}

struct FunctionMismatch {
  std::string structure;
  Tuple input;
  std::optional<Natural> first;   // nullopt: undefined
  std::optional<Natural> second;
};

/// Output-only comparison of the implemented partial functions; nullopt when they agree
/// everywhere on the class, including where both are undefined.
inline std::optional<FunctionMismatch> same_function(const Scheme& a, const Scheme& b,
                                                     const std::vector<Structure>& k) {
  if (a.arity() != b.arity()) throw Error("same_function needs schemes of equal arity");
  for (const auto& u : k) {
    auto fa = implemented_function(a, u);
    auto fb = implemented_function(b, u);
    for (std::size_t i = 0; i < fa.rows.size(); ++i)
      if (fa.rows[i].second != fb.rows[i].second)
        return FunctionMismatch{u.name(), fa.rows[i].first, fa.rows[i].second, fb.rows[i].second};
  }
  return std::nullopt;
}

inline std::string format_verdict(const EquivVerdict& v, const std::vector<Structure>& k) {
  std::ostringstream out;
  if (std::holds_alternative<Equivalent>(v)) {
    out << "equivalent\n";
  } else if (const auto* m = std::get_if<ArityMismatch>(&v)) {
    out << "not equivalent: arity " << m->first << " vs " << m->second << '\n';
  } else {
    const auto& ne = std::get<NotEquivalent>(v);
    std::string tuple;
    for (const auto& u : k)
      if (u.name() == ne.structure) tuple = format_tuple(u, ne.input);
    out << "not equivalent\n";
    out << "structure: " << ne.structure << '\n';
    out << "input: " << tuple << '\n';
    out << "first mismatch at step: " << ne.position + 1 << '\n';
    out << "path A:\n" << format_path_record(ne.first);
    out << "path B:\n" << format_path_record(ne.second);
  }
  return out.str();
}

}  // namespace schemetree
