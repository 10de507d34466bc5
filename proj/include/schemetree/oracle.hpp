#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <string>
#include <unordered_set>
#include <utility>
#include <variant>
#include <vector>

#include "schemetree/structure.hpp"
#include "schemetree/syntax.hpp"
#include "schemetree/term.hpp"

namespace schemetree {

/// A finite set of formulas over x_0..x_{n-1}, asked for a common satisfying tuple.
class SatQuery {
 public:
  SatQuery(unsigned arity, const std::vector<Formula>& formulas) : arity_(arity) {
    std::unordered_set<Formula, FormulaHash> seen;
    for (const auto& f : formulas) {
      if (!f.free_vars().empty() && f.free_vars().back() >= arity)
        throw Error("formula " + to_string(f) + " has a free variable outside x0..x" + std::to_string(arity - 1));
      if (seen.insert(f).second) formulas_.push_back(f);
    }
  }

  unsigned arity() const noexcept { return arity_; }
  const std::vector<Formula>& formulas() const noexcept { return formulas_; }

 private:
  unsigned arity_;
  std::vector<Formula> formulas_;
};

struct Sat {
  std::string structure;
  Tuple witness;
};
struct Unsat {};
struct Unknown {
  std::string reason;
};

using SatVerdict = std::variant<Sat, Unsat, Unknown>;

inline bool is_sat(const SatVerdict& v) { return std::holds_alternative<Sat>(v); }
inline bool is_unsat(const SatVerdict& v) { return std::holds_alternative<Unsat>(v); }
inline bool is_unknown(const SatVerdict& v) { return std::holds_alternative<Unknown>(v); }

namespace detail {

inline void require_symbols(const SatQuery& q, const Structure& u) {
  for (const auto& f : q.formulas())
    if (auto err = check_symbols(f, u.signature())) throw Error("structure " + u.name() + ": " + *err);
}

}  // namespace detail

/// Scans universe^n in lexicographic order; Sat with the first witness, otherwise Unsat.
inline SatVerdict check_sat_structure(const SatQuery& q, const Structure& u) {
  detail::require_symbols(q, u);
  SatVerdict verdict = Unsat{};
  for_each_tuple(u.size(), q.arity(), [&](const Tuple& t) {
    Assignment v(t);
    for (const auto& f : q.formulas())
      if (!eval_formula(f, u, v)) return true;
    verdict = Sat{u.name(), t};
    return false;
  });
  return verdict;
}

/// First structure of `k` (in order) satisfying the query.
inline SatVerdict check_sat_class(const SatQuery& q, const std::vector<Structure>& k) {
  for (const auto& u : k)
    if (auto v = check_sat_structure(q, u); is_sat(v)) return v;
  return Unsat{};
}

using StructureGenerator = std::function<Structure(std::size_t)>;

/// Tries members 1..bound of an infinite family. Can confirm Sat but never refute:
/// exhausting the bound yields Unknown.
inline SatVerdict check_sat_family(const SatQuery& q, const StructureGenerator& generate, std::size_t bound) {
  for (std::size_t i = 1; i <= bound; ++i) {
    Structure u = [&] {
      try {
        return generate(i);
      } catch (const std::exception& e) {
        throw Error("family generator failed at member " + std::to_string(i) + ": " + e.what());
      }
    }();
    if (auto v = check_sat_structure(q, u); is_sat(v)) return v;
  }
  return Unknown{"no satisfying member among the first " + std::to_string(bound)};
}

/// Z_1, Z_2, ... over a ring-like signature (see modular_structure).
inline StructureGenerator cyclic_family(Signature signature) {
  return [sig = std::move(signature)](std::size_t m) {
    return modular_structure("Z" + std::to_string(m), static_cast<unsigned>(m), sig);
  };
}

/// Incremental satisfiability over a list of structures. A state records, per
/// structure, which input tuples still satisfy every formula seen so far; refining by
/// one more formula only re-checks those survivors.
class WitnessOracle {
 public:
  struct State {
    std::vector<std::vector<std::uint32_t>> survivors;  // indices into tuples_[structure]
  };

  /// Exact oracle for a finite class: an empty survivor set means Unsat.
  static WitnessOracle for_class(std::vector<Structure> k, unsigned arity) {
    return WitnessOracle(std::move(k), arity, true, {});
  }

  /// Members 1..bound of a family. Answers Sat or Unknown, never Unsat.
  static WitnessOracle for_family(const StructureGenerator& generate, std::size_t bound, unsigned arity,
                                  std::string family_name) {
    std::vector<Structure> k;
    for (std::size_t i = 1; i <= bound; ++i) k.push_back(generate(i));
    return WitnessOracle(std::move(k), arity, false, family_name + " members 1.." + std::to_string(bound));
  }

  bool exhaustive() const noexcept { return exhaustive_; }
  const std::vector<Structure>& structures() const noexcept { return structures_; }
  unsigned arity() const noexcept { return arity_; }

  State root() const {
    State s;
    for (const auto& tuples : tuples_) {
      std::vector<std::uint32_t> all(tuples.size());
      for (std::uint32_t i = 0; i < all.size(); ++i) all[i] = i;
      s.survivors.push_back(std::move(all));
    }
    return s;
  }

  State refine(const State& s, const Formula& f) const {
    State out;
    out.survivors.resize(structures_.size());
    for (std::size_t k = 0; k < structures_.size(); ++k) {
      if (s.survivors[k].empty()) continue;
      if (auto err = check_symbols(f, structures_[k].signature()))
        throw Error("structure " + structures_[k].name() + ": " + *err);
      for (std::uint32_t idx : s.survivors[k])
        if (eval_formula(f, structures_[k], tuples_[k][idx])) out.survivors[k].push_back(idx);
    }
    return out;
  }

  SatVerdict verdict(const State& s) const {
    for (std::size_t k = 0; k < structures_.size(); ++k)
      if (!s.survivors[k].empty()) return Sat{structures_[k].name(), tuples_[k][s.survivors[k].front()]};
    if (exhaustive_) return Unsat{};
    return Unknown{"no satisfying member among " + description_};
  }

 private:
  WitnessOracle(std::vector<Structure> k, unsigned arity, bool exhaustive, std::string description)
      : structures_(std::move(k)), arity_(arity), exhaustive_(exhaustive), description_(std::move(description)) {
    if (structures_.empty()) throw Error("a class of structures must be nonempty");
    for (const auto& u : structures_) tuples_.push_back(all_tuples(u.size(), arity_));
  }

  std::vector<Structure> structures_;
  std::vector<std::vector<Tuple>> tuples_;
  unsigned arity_;
  bool exhaustive_;
  std::string description_;
};

}  // namespace schemetree
