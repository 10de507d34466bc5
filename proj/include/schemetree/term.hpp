#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace schemetree {

using VarIndex = std::uint32_t;

namespace detail {

inline std::size_t hash_mix(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

inline std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) {
  return a > std::numeric_limits<std::uint64_t>::max() - b ? std::numeric_limits<std::uint64_t>::max()
                                                           : a + b;
}

/// Sorted, duplicate-free union.
inline std::vector<VarIndex> merge_sets(const std::vector<VarIndex>& a, const std::vector<VarIndex>& b) {
  std::vector<VarIndex> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

// Equality of shared DAGs is linear only if equal pairs are remembered.
constexpr std::uint64_t kMemoThreshold = 64;

struct PairHash {
  std::size_t operator()(const std::pair<const void*, const void*>& p) const noexcept {
    return hash_mix(std::hash<const void*>{}(p.first), std::hash<const void*>{}(p.second));
  }
};
using PairMemo = std::unordered_set<std::pair<const void*, const void*>, PairHash>;

}  // namespace detail

/// Immutable first-order term. Subterms are shared, so repeated substitution
/// builds a DAG whose unfolded size may be exponential in its node count.
class Term {
 public:
  enum class Kind : std::uint8_t { Variable, Constant, Apply };

  static Term var(VarIndex index) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Variable;
    n->index = index;
    n->vars = {index};
    n->max_index = index;
    n->hash = detail::hash_mix(1, index);
    return Term(std::move(n));
  }

  static Term constant(std::string symbol) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Constant;
    n->hash = detail::hash_mix(2, std::hash<std::string>{}(symbol));
    n->symbol = std::move(symbol);
    return Term(std::move(n));
  }

  static Term apply(std::string symbol, std::vector<Term> args) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Apply;
    std::size_t h = detail::hash_mix(3, std::hash<std::string>{}(symbol));
    for (const auto& a : args) {
      h = detail::hash_mix(h, a.hash());
      n->vars = detail::merge_sets(n->vars, a.node_->vars);
      n->size = detail::saturating_add(n->size, a.node_->size);
      n->max_index = std::max(n->max_index, a.node_->max_index);
    }
    n->hash = h;
    n->symbol = std::move(symbol);
    n->args = std::move(args);
    return Term(std::move(n));
  }

  Kind kind() const noexcept { return node_->kind; }
  bool is_variable() const noexcept { return kind() == Kind::Variable; }
  VarIndex index() const noexcept { return node_->index; }
  const std::string& symbol() const noexcept { return node_->symbol; }
  std::span<const Term> args() const noexcept { return node_->args; }

  /// Sorted indices of all variables occurring in the term.
  const std::vector<VarIndex>& variables() const noexcept { return node_->vars; }
  /// Largest variable index occurring, or -1 when none.
  std::int64_t max_index() const noexcept { return node_->max_index; }
  /// Size of the fully unfolded tree (saturating).
  std::uint64_t tree_size() const noexcept { return node_->size; }
  std::size_t hash() const noexcept { return node_->hash; }
  const void* identity() const noexcept { return node_.get(); }

  friend bool operator==(const Term& a, const Term& b) {
    if (a.node_ == b.node_) return true;
    if (a.hash() != b.hash()) return false;
    if (a.tree_size() <= detail::kMemoThreshold) return equal(a, b, nullptr);
    detail::PairMemo memo;
    return equal(a, b, &memo);
  }

 private:
  struct Node {
    Kind kind = Kind::Variable;
    VarIndex index = 0;
    std::string symbol;
    std::vector<Term> args;
    std::vector<VarIndex> vars;
    std::int64_t max_index = -1;
    std::uint64_t size = 1;
    std::size_t hash = 0;
  };

  explicit Term(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  static bool equal(const Term& a, const Term& b, detail::PairMemo* memo) {
    if (a.node_ == b.node_) return true;
    if (a.hash() != b.hash() || a.kind() != b.kind() || a.tree_size() != b.tree_size()) return false;
    switch (a.kind()) {
      case Kind::Variable:
        return a.index() == b.index();
      case Kind::Constant:
        return a.symbol() == b.symbol();
      case Kind::Apply:
        break;
    }
    if (a.symbol() != b.symbol() || a.args().size() != b.args().size()) return false;
    std::pair<const void*, const void*> key{a.identity(), b.identity()};
    if (memo && memo->count(key)) return true;
    for (std::size_t i = 0; i < a.args().size(); ++i)
      if (!equal(a.args()[i], b.args()[i], memo)) return false;
    if (memo) memo->insert(key);
    return true;
  }

  std::shared_ptr<const Node> node_;
};

/// Immutable first-order formula over the core connectives =, atoms, not, and, forall.
/// `or`, `implies` and `exists` are expressed through these at construction.
class Formula {
 public:
  enum class Kind : std::uint8_t { Equal, Atom, Not, And, ForAll };

  static Formula equal(Term lhs, Term rhs) {
    auto n = leaf(Kind::Equal, 11, "=", {std::move(lhs), std::move(rhs)});
    return Formula(std::move(n));
  }

  static Formula atom(std::string predicate, std::vector<Term> args) {
    auto n = leaf(Kind::Atom, 12, std::move(predicate), std::move(args));
    return Formula(std::move(n));
  }

  static Formula negation(Formula f) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Not;
    n->hash = detail::hash_mix(13, f.hash());
    n->free = f.node_->free;
    n->max_index = f.node_->max_index;
    n->subs = {std::move(f)};
    return Formula(std::move(n));
  }

  static Formula conjunction(Formula a, Formula b) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::And;
    n->hash = detail::hash_mix(detail::hash_mix(14, a.hash()), b.hash());
    n->free = detail::merge_sets(a.node_->free, b.node_->free);
    n->max_index = std::max(a.node_->max_index, b.node_->max_index);
    n->subs = {std::move(a), std::move(b)};
    return Formula(std::move(n));
  }

  static Formula forall(VarIndex bound, Formula body) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::ForAll;
    n->index = bound;
    n->hash = detail::hash_mix(detail::hash_mix(15, bound), body.hash());
    n->free = body.node_->free;
    n->free.erase(std::remove(n->free.begin(), n->free.end(), bound), n->free.end());
    n->max_index = std::max<std::int64_t>(body.node_->max_index, bound);
    n->subs = {std::move(body)};
    return Formula(std::move(n));
  }

  static Formula disjunction(Formula a, Formula b) {
    return negation(conjunction(negation(std::move(a)), negation(std::move(b))));
  }
  static Formula implication(Formula a, Formula b) {
    return negation(conjunction(std::move(a), negation(std::move(b))));
  }
  static Formula exists(VarIndex bound, Formula body) {
    return negation(forall(bound, negation(std::move(body))));
  }

  Kind kind() const noexcept { return node_->kind; }
  /// Predicate symbol of an atom ("=" for equalities).
  const std::string& symbol() const noexcept { return node_->symbol; }
  /// Argument terms of Equal / Atom.
  std::span<const Term> terms() const noexcept { return node_->terms; }
  /// Operand of Not / ForAll.
  const Formula& body() const noexcept { return node_->subs[0]; }
  const Formula& left() const noexcept { return node_->subs[0]; }
  const Formula& right() const noexcept { return node_->subs[1]; }
  VarIndex bound() const noexcept { return node_->index; }

  /// Sorted indices of the free variables.
  const std::vector<VarIndex>& free_vars() const noexcept { return node_->free; }
  /// Largest variable index occurring free or bound, or -1 when none.
  std::int64_t max_index() const noexcept { return node_->max_index; }
  std::size_t hash() const noexcept { return node_->hash; }

  friend bool operator==(const Formula& a, const Formula& b) {
    if (a.node_ == b.node_) return true;
    if (a.hash() != b.hash() || a.kind() != b.kind()) return false;
    switch (a.kind()) {
      case Kind::Equal:
      case Kind::Atom: {
        if (a.symbol() != b.symbol() || a.terms().size() != b.terms().size()) return false;
        for (std::size_t i = 0; i < a.terms().size(); ++i)
          if (!(a.terms()[i] == b.terms()[i])) return false;
        return true;
      }
      case Kind::Not:
        return a.body() == b.body();
      case Kind::And:
        return a.left() == b.left() && a.right() == b.right();
      case Kind::ForAll:
        return a.bound() == b.bound() && a.body() == b.body();
    }
    return false;
  }

 private:
  struct Node {
    Kind kind = Kind::Equal;
    VarIndex index = 0;
    std::string symbol;
    std::vector<Term> terms;
    std::vector<Formula> subs;
    std::vector<VarIndex> free;
    std::int64_t max_index = -1;
    std::size_t hash = 0;
  };

  explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  static std::shared_ptr<Node> leaf(Kind kind, std::size_t tag, std::string symbol, std::vector<Term> args) {
    auto n = std::make_shared<Node>();
    n->kind = kind;
    std::size_t h = detail::hash_mix(tag, std::hash<std::string>{}(symbol));
    for (const auto& t : args) {
      h = detail::hash_mix(h, t.hash());
      n->free = detail::merge_sets(n->free, t.variables());
      n->max_index = std::max(n->max_index, t.max_index());
    }
    n->hash = h;
    n->symbol = std::move(symbol);
    n->terms = std::move(args);
    return n;
  }

  std::shared_ptr<const Node> node_;
};

struct TermHash {
  std::size_t operator()(const Term& t) const noexcept { return t.hash(); }
};
struct FormulaHash {
  std::size_t operator()(const Formula& f) const noexcept { return f.hash(); }
};

// ---------------------------------------------------------------------------
// Primitive forms

/// Variable, constant, or a function symbol applied to variables only.
inline bool is_primitive_term(const Term& t) {
  if (t.kind() != Term::Kind::Apply) return true;
  return std::all_of(t.args().begin(), t.args().end(), [](const Term& a) { return a.is_variable(); });
}

/// `x_i = x_j` or a predicate symbol applied to variables only.
inline bool is_primitive_formula(const Formula& f) {
  if (f.kind() != Formula::Kind::Equal && f.kind() != Formula::Kind::Atom) return false;
  return std::all_of(f.terms().begin(), f.terms().end(), [](const Term& a) { return a.is_variable(); });
}

// ---------------------------------------------------------------------------
// Substitution

/// Simultaneous substitution: variable index -> replacement term.
using Substitution = std::map<VarIndex, Term>;

/// First index handed out when a bound variable has to be renamed.
inline constexpr VarIndex kFreshWatermark = 8192;

inline Term substitute(const Term& t, const Substitution& s) {
  switch (t.kind()) {
    case Term::Kind::Variable: {
      auto it = s.find(t.index());
      return it == s.end() ? t : it->second;
    }
    case Term::Kind::Constant:
      return t;
    case Term::Kind::Apply:
      break;
  }
  bool touched = std::any_of(t.variables().begin(), t.variables().end(),
                             [&](VarIndex v) { return s.count(v) != 0; });
  if (!touched) return t;
  std::vector<Term> args;
  args.reserve(t.args().size());
  for (const auto& a : t.args()) args.push_back(substitute(a, s));
  return Term::apply(t.symbol(), std::move(args));
}

namespace detail {

class FormulaSubstituter {
 public:
  explicit FormulaSubstituter(VarIndex first_fresh) : next_fresh_(first_fresh) {}

  Formula run(const Formula& f, const Substitution& s) {
    // Only entries for free variables of f can matter.
    Substitution relevant;
    for (VarIndex v : f.free_vars())
      if (auto it = s.find(v); it != s.end() && !(it->second.is_variable() && it->second.index() == v))
        relevant.emplace(v, it->second);
    if (relevant.empty()) return f;

    switch (f.kind()) {
      case Formula::Kind::Equal:
        return Formula::equal(substitute(f.terms()[0], relevant), substitute(f.terms()[1], relevant));
      case Formula::Kind::Atom: {
        std::vector<Term> args;
        for (const auto& t : f.terms()) args.push_back(substitute(t, relevant));
        return Formula::atom(f.symbol(), std::move(args));
      }
      case Formula::Kind::Not:
        return Formula::negation(run(f.body(), relevant));
      case Formula::Kind::And:
        return Formula::conjunction(run(f.left(), relevant), run(f.right(), relevant));
      case Formula::Kind::ForAll:
        break;
    }
    // `relevant` never mentions the bound variable: it is not free in f.
    VarIndex bound = f.bound();
    bool captures = std::any_of(relevant.begin(), relevant.end(), [&](const auto& kv) {
      const auto& vs = kv.second.variables();
      return std::binary_search(vs.begin(), vs.end(), bound);
    });
    if (!captures) return Formula::forall(bound, run(f.body(), relevant));
    VarIndex fresh = next_fresh_++;
    relevant.emplace(bound, Term::var(fresh));
    return Formula::forall(fresh, run(f.body(), relevant));
  }

 private:
  VarIndex next_fresh_;
};

}  // namespace detail

/// Capture-avoiding simultaneous substitution of terms for the free variables of `f`.
/// A bound variable that would capture a variable of an inserted term is renamed to a
/// fresh index at or above kFreshWatermark and above every index already in play, so
/// the result depends only on the inputs.
inline Formula substitute(const Formula& f, const Substitution& s) {
  std::int64_t top = f.max_index();
  for (const auto& [v, t] : s) top = std::max({top, static_cast<std::int64_t>(v), t.max_index()});
  auto first = static_cast<VarIndex>(std::max<std::int64_t>(kFreshWatermark, top + 1));
  return detail::FormulaSubstituter(first).run(f, s);
}

}  // namespace schemetree
