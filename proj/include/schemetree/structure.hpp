#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "schemetree/error.hpp"
#include "schemetree/signature.hpp"
#include "schemetree/term.hpp"

namespace schemetree {

/// Position of an element in its structure's universe (file order).
using Element = std::uint32_t;
using Tuple = std::vector<Element>;

inline constexpr Element kUnassigned = std::numeric_limits<Element>::max();

/// Partial map from variable indices to elements, stored densely.
class Assignment {
 public:
  Assignment() = default;

  /// x_i := tuple[i].
  explicit Assignment(const Tuple& tuple) : values_(tuple) {}

  void bind(VarIndex i, Element e) {
    if (i >= values_.size()) values_.resize(std::size_t{i} + 1, kUnassigned);
    values_[i] = e;
  }

  bool has(VarIndex i) const noexcept { return i < values_.size() && values_[i] != kUnassigned; }

  Element get(VarIndex i) const {
    if (!has(i)) throw EvalError("unassigned variable x" + std::to_string(i));
    return values_[i];
  }

  /// Value or kUnassigned.
  Element raw(VarIndex i) const noexcept { return i < values_.size() ? values_[i] : kUnassigned; }

  const std::vector<Element>& values() const noexcept { return values_; }

  friend bool operator==(const Assignment& a, const Assignment& b) {
    auto n = std::max(a.values_.size(), b.values_.size());
    for (std::size_t i = 0; i < n; ++i)
      if (a.raw(static_cast<VarIndex>(i)) != b.raw(static_cast<VarIndex>(i))) return false;
    return true;
  }

 private:
  std::vector<Element> values_;
};

/// A finite structure: nonempty universe plus total interpretation of a signature.
/// Built through StructureBuilder; immutable afterwards.
class Structure {
 public:
  const std::string& name() const noexcept { return name_; }
  const Signature& signature() const noexcept { return signature_; }
  std::size_t size() const noexcept { return universe_.size(); }
  const std::vector<std::string>& universe() const noexcept { return universe_; }
  const std::string& element_name(Element e) const { return universe_.at(e); }

  std::optional<Element> element(const std::string& name) const {
    auto it = element_index_.find(name);
    if (it == element_index_.end()) return std::nullopt;
    return it->second;
  }

  Element constant(const std::string& symbol) const {
    auto it = constants_.find(symbol);
    if (it == constants_.end()) throw EvalError("unknown constant '" + symbol + "'");
    return it->second;
  }

  Element apply(const std::string& symbol, std::span<const Element> args) const {
    auto it = functions_.find(symbol);
    if (it == functions_.end()) throw EvalError("unknown function '" + symbol + "'");
    if (args.size() != it->second.arity)
      throw EvalError("arity mismatch for '" + symbol + "': expected " + std::to_string(it->second.arity) +
                      ", got " + std::to_string(args.size()));
    return it->second.values[offset(args)];
  }

  bool holds(const std::string& symbol, std::span<const Element> args) const {
    auto it = predicates_.find(symbol);
    if (it == predicates_.end()) throw EvalError("unknown predicate '" + symbol + "'");
    if (args.size() != it->second.arity)
      throw EvalError("arity mismatch for '" + symbol + "': expected " + std::to_string(it->second.arity) +
                      ", got " + std::to_string(args.size()));
    return it->second.truth[offset(args)] != 0;
  }

  /// Row-major index of a tuple in universe^arity.
  std::size_t offset(std::span<const Element> args) const noexcept {
    std::size_t k = 0;
    for (Element a : args) k = k * universe_.size() + a;
    return k;
  }

 private:
  friend class StructureBuilder;

  struct FunctionTable {
    unsigned arity = 0;
    std::vector<Element> values;
  };
  struct PredicateTable {
    unsigned arity = 0;
    std::vector<char> truth;
  };

  std::string name_;
  Signature signature_;
  std::vector<std::string> universe_;
  std::unordered_map<std::string, Element> element_index_;
  std::unordered_map<std::string, Element> constants_;
  std::unordered_map<std::string, FunctionTable> functions_;
  std::unordered_map<std::string, PredicateTable> predicates_;
};

/// Collects interpretation entries and checks totality on build().
class StructureBuilder {
 public:
  StructureBuilder(std::string name, Signature signature, std::vector<std::string> universe) {
    if (universe.empty()) throw Error("structure '" + name + "': universe must be nonempty");
    s_.name_ = std::move(name);
    s_.signature_ = std::move(signature);
    s_.universe_ = std::move(universe);
    for (std::size_t i = 0; i < s_.universe_.size(); ++i)
      if (!s_.element_index_.emplace(s_.universe_[i], static_cast<Element>(i)).second)
        throw Error("structure '" + s_.name_ + "': duplicate element '" + s_.universe_[i] + "'");
    for (const auto& d : s_.signature_.symbols()) {
      std::size_t rows = power(s_.universe_.size(), d.arity);
      if (d.kind == SymbolKind::Function) {
        s_.functions_[d.name] = {d.arity, std::vector<Element>(rows, kUnassigned)};
      } else if (d.kind == SymbolKind::Predicate) {
        s_.predicates_[d.name] = {d.arity, std::vector<char>(rows, 0)};
      }
    }
  }

  const Structure& partial() const noexcept { return s_; }

  StructureBuilder& constant(const std::string& symbol, Element value) {
    require(symbol, SymbolKind::Constant, 0);
    check_element(value);
    if (!s_.constants_.emplace(symbol, value).second)
      throw Error("structure '" + s_.name_ + "': constant '" + symbol + "' interpreted twice");
    return *this;
  }

  StructureBuilder& function(const std::string& symbol, const Tuple& args, Element value) {
    const auto* d = require(symbol, SymbolKind::Function, static_cast<unsigned>(args.size()));
    for (Element a : args) check_element(a);
    check_element(value);
    auto& cell = s_.functions_[d->name].values[s_.offset(args)];
    if (cell != kUnassigned)
      throw Error("structure '" + s_.name_ + "': function '" + symbol + "' row given twice");
    cell = value;
    return *this;
  }

  StructureBuilder& relation(const std::string& symbol, const Tuple& args) {
    const auto* d = require(symbol, SymbolKind::Predicate, static_cast<unsigned>(args.size()));
    for (Element a : args) check_element(a);
    s_.predicates_[d->name].truth[s_.offset(args)] = 1;
    return *this;
  }

  Structure build() && {
    for (const auto& d : s_.signature_.symbols()) {
      if (d.kind == SymbolKind::Constant && !s_.constants_.count(d.name))
        throw Error("structure '" + s_.name_ + "': constant '" + d.name + "' has no interpretation");
      if (d.kind == SymbolKind::Function) {
        const auto& vals = s_.functions_[d.name].values;
        if (std::find(vals.begin(), vals.end(), kUnassigned) != vals.end())
          throw Error("structure '" + s_.name_ + "': function '" + d.name + "' is not total");
      }
    }
    return std::move(s_);
  }

 private:
  static std::size_t power(std::size_t base, unsigned exp) {
    std::size_t r = 1;
    for (unsigned i = 0; i < exp; ++i) r *= base;
    return r;
  }

  const SymbolDecl* require(const std::string& symbol, SymbolKind kind, unsigned arity) {
    const auto* d = s_.signature_.find(symbol);
    if (!d || d->kind != kind) throw Error("structure '" + s_.name_ + "': undeclared symbol '" + symbol + "'");
    if (d->arity != arity) throw Error("structure '" + s_.name_ + "': arity mismatch for '" + symbol + "'");
    return d;
  }

  void check_element(Element e) const {
    if (e >= s_.universe_.size()) throw Error("structure '" + s_.name_ + "': element out of range");
  }

  Structure s_;
};

// ---------------------------------------------------------------------------
// Evaluation

namespace detail {

inline Element eval_term_plain(const Term& t, const Structure& u, const Assignment& v) {
  switch (t.kind()) {
    case Term::Kind::Variable:
      return v.get(t.index());
    case Term::Kind::Constant:
      return u.constant(t.symbol());
    case Term::Kind::Apply:
      break;
  }
  Element buf[8];
  std::vector<Element> big;
  std::span<Element> args;
  if (t.args().size() <= 8) {
    args = std::span<Element>(buf, t.args().size());
  } else {
    big.resize(t.args().size());
    args = big;
  }
  for (std::size_t i = 0; i < t.args().size(); ++i) args[i] = eval_term_plain(t.args()[i], u, v);
  return u.apply(t.symbol(), args);
}

inline Element eval_term_memo(const Term& t, const Structure& u, const Assignment& v,
                              std::unordered_map<const void*, Element>& memo) {
  if (t.kind() != Term::Kind::Apply) return eval_term_plain(t, u, v);
  if (auto it = memo.find(t.identity()); it != memo.end()) return it->second;
  std::vector<Element> args;
  args.reserve(t.args().size());
  for (const auto& a : t.args()) args.push_back(eval_term_memo(a, u, v, memo));
  Element r = u.apply(t.symbol(), args);
  memo.emplace(t.identity(), r);
  return r;
}

}  // namespace detail

/// Value of `t` in `u` under `v`.
inline Element eval_term(const Term& t, const Structure& u, const Assignment& v) {
  if (t.tree_size() <= detail::kMemoThreshold) return detail::eval_term_plain(t, u, v);
  std::unordered_map<const void*, Element> memo;
  return detail::eval_term_memo(t, u, v, memo);
}

namespace detail {

inline bool eval_formula_in_place(const Formula& f, const Structure& u, Assignment& v) {
  switch (f.kind()) {
    case Formula::Kind::Equal:
      return eval_term(f.terms()[0], u, v) == eval_term(f.terms()[1], u, v);
    case Formula::Kind::Atom: {
      std::vector<Element> args;
      args.reserve(f.terms().size());
      for (const auto& t : f.terms()) args.push_back(eval_term(t, u, v));
      return u.holds(f.symbol(), args);
    }
    case Formula::Kind::Not:
      return !eval_formula_in_place(f.body(), u, v);
    case Formula::Kind::And:
      return eval_formula_in_place(f.left(), u, v) && eval_formula_in_place(f.right(), u, v);
    case Formula::Kind::ForAll:
      break;
  }
  const VarIndex x = f.bound();
  const Element saved = v.raw(x);
  bool result = true;
  for (Element e = 0; e < u.size() && result; ++e) {
    v.bind(x, e);
    result = eval_formula_in_place(f.body(), u, v);
  }
  v.bind(x, saved);
  return result;
}

}  // namespace detail

/// Truth of `f` in `u` under `v`; quantifiers range over the whole finite universe.
inline bool eval_formula(const Formula& f, const Structure& u, const Assignment& v) {
  for (VarIndex x : f.free_vars())
    if (!v.has(x)) throw EvalError("unassigned free variable x" + std::to_string(x));
  Assignment scratch = v;
  return detail::eval_formula_in_place(f, u, scratch);
}

/// Truth on an input tuple, x_i := tuple[i].
inline bool eval_formula(const Formula& f, const Structure& u, const Tuple& tuple) {
  return eval_formula(f, u, Assignment(tuple));
}

// ---------------------------------------------------------------------------
// Tuples

/// Calls `fn(tuple)` for every tuple of universe^n in lexicographic order (file order
/// of elements). Stops early when `fn` returns false. Returns whether it ran to the end.
template <class Fn>
bool for_each_tuple(std::size_t universe_size, std::size_t n, Fn&& fn) {
  Tuple t(n, 0);
  if (universe_size == 0) return true;
  while (true) {
    if (!fn(std::as_const(t))) return false;
    std::size_t i = n;
    while (i > 0) {
      --i;
      if (++t[i] < universe_size) break;
      t[i] = 0;
      if (i == 0) return true;
    }
    if (n == 0) return true;
  }
}

inline std::vector<Tuple> all_tuples(std::size_t universe_size, std::size_t n) {
  std::vector<Tuple> out;
  for_each_tuple(universe_size, n, [&](const Tuple& t) {
    out.push_back(t);
    return true;
  });
  return out;
}

inline std::string format_tuple(const Structure& u, const Tuple& t) {
  std::string out;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) out += ',';
    out += u.element_name(t[i]);
  }
  return out;
}

/// Parses comma-separated element names.
inline Tuple parse_tuple(const Structure& u, const std::string& text) {
  Tuple t;
  std::size_t start = 0;
  while (true) {
    auto comma = text.find(',', start);
    auto name = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    auto e = u.element(name);
    if (!e) throw Error("'" + name + "' is not an element of " + u.name());
    t.push_back(*e);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return t;
}

// ---------------------------------------------------------------------------
// Modular arithmetic structures

/// Z/mZ with elements named "0".."m-1". Interprets the symbols zero, one (constants),
/// add, mul (binary functions) and le (numeric order); any other symbol is an error.
/// For prime m this is the field GF(m).
inline Structure modular_structure(std::string name, unsigned modulus, const Signature& signature) {
  if (modulus == 0) throw Error("modulus must be positive");
  std::vector<std::string> universe;
  for (unsigned i = 0; i < modulus; ++i) universe.push_back(std::to_string(i));
  StructureBuilder b(name, signature, universe);
  for (const auto& d : signature.symbols()) {
    if (d.kind == SymbolKind::Constant && (d.name == "zero" || d.name == "one")) {
      b.constant(d.name, d.name == "zero" ? 0 : 1 % modulus);
    } else if (d.kind == SymbolKind::Function && d.arity == 2 && (d.name == "add" || d.name == "mul")) {
      for (Element x = 0; x < modulus; ++x)
        for (Element y = 0; y < modulus; ++y)
          b.function(d.name, {x, y}, d.name == "add" ? (x + y) % modulus : (x * y) % modulus);
    } else if (d.kind == SymbolKind::Predicate && d.arity == 2 && d.name == "le") {
      for (Element x = 0; x < modulus; ++x)
        for (Element y = x; y < modulus; ++y) b.relation("le", {x, y});
    } else {
      throw Error("modular structure cannot interpret symbol '" + d.name + "'");
    }
  }
  return std::move(b).build();
}

/// zero, one, add/2, mul/2, le/2.
inline Signature ring_signature() {
  return Signature("ring", {{"zero", SymbolKind::Constant, 0},
                            {"one", SymbolKind::Constant, 0},
                            {"add", SymbolKind::Function, 2},
                            {"mul", SymbolKind::Function, 2},
                            {"le", SymbolKind::Predicate, 2}});
}

}  // namespace schemetree
