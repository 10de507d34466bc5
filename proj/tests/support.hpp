#pragma once

// Fixtures, independent oracles and the scheme corpus shared by the unit and
// acceptance suites.

#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "schemetree/schemetree.hpp"

namespace schemetree::testing {

inline const Signature& ring() {
  static const Signature sig = ring_signature();
  return sig;
}

inline Structure gf(unsigned p) { return modular_structure("GF" + std::to_string(p), p, ring()); }
inline Structure zmod(unsigned m) { return modular_structure("Z" + std::to_string(m), m, ring()); }

inline std::vector<Structure> cyclic_class(std::size_t m) {
  std::vector<Structure> k;
  for (std::size_t i = 1; i <= m; ++i) k.push_back(zmod(static_cast<unsigned>(i)));
  return k;
}

// ---------------------------------------------------------------------------
// Hand-written schemes

inline Scheme terminal_only(long long arity = 1, Natural value = 0) {
  return SchemeBuilder("const", arity).terminal("t", value).initial("t").build(ring());
}

/// p: x0 = zero ? 1 : (x0 <= x0 + x1; goto p)
inline Scheme loop_scheme() {
  return SchemeBuilder("loop", 2)
      .predicate("p", "(= x0 zero)", "t", "f")
      .function("f", 0, "(add x0 x1)", "p")
      .terminal("t", 1)
      .initial("p")
      .build(ring());
}

/// The loop behind a test x1 = zero that exits with 0.
inline Scheme guarded_loop_scheme() {
  return SchemeBuilder("guarded", 2)
      .predicate("g", "(= x1 zero)", "t0", "p")
      .predicate("p", "(= x0 zero)", "t1", "f")
      .function("f", 0, "(add x0 x1)", "p")
      .terminal("t0", 0)
      .terminal("t1", 1)
      .initial("g")
      .build(ring());
}

/// p: (= x0 x0) with edge 1 back to itself.
inline Scheme self_loop_scheme() {
  return SchemeBuilder("selfloop", 1).predicate("p", "(= x0 x0)", "p", "t").terminal("t", 0).initial("p").build(ring());
}

inline Scheme contradiction_scheme() {
  return SchemeBuilder("contradiction", 1)
      .predicate("p", "(not (= x0 x0))", "a", "b")
      .terminal("a", 1)
      .terminal("b", 2)
      .initial("p")
      .build(ring());
}

// ---------------------------------------------------------------------------
// Structural comparison

inline bool same_scheme(const Scheme& a, const Scheme& b) {
  if (a.name() != b.name() || a.arity() != b.arity() || a.signature_ref() != b.signature_ref() ||
      a.size() != b.size() || a.initial() != b.initial())
    return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Node &x = a.node(i), &y = b.node(i);
    if (x.id != y.id || !(x.label == y.label) || x.next != y.next || x.on_true != y.on_true ||
        x.on_false != y.on_false)
      return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Lasso replay

/// Re-executes `d` with the single-step function: the prefix and the lasso must follow
/// the machine's own edges, and walking the lasso must return to the state it started
/// from.
inline bool lasso_replays(const Scheme& s, const Structure& u, const Tuple& input, const Diverges& d) {
  if (d.lasso.empty()) return false;
  ExecState st = initial_state(s, input);
  auto walk = [&](const std::vector<TraceStep>& steps) {
    for (const auto& expected : steps) {
      if (st.node != expected.node) return false;
      auto r = step(s, u, st);
      auto* t = std::get_if<Transition>(&r);
      if (!t || t->edge != expected.edge) return false;
      st = std::move(t->next);
    }
    return true;
  };
  if (!walk(d.prefix)) return false;
  ExecState start = st;
  return walk(d.lasso) && st == start;
}

// ---------------------------------------------------------------------------
// Brute-force path enumeration, independent of the interpreter and the treeifier.

struct EnumeratedPath {
  std::vector<TraceStep> steps;  // ends with the terminal (edge None) when complete
  std::vector<Formula> pi;
  bool complete = false;         // reached a terminal
};

/// All root paths of S up to `max_steps` steps, extended depth-first. Paths that reach
/// a terminal are complete; the others are cut at the bound. When `keep` is given, a
/// branch whose newest path-condition formula fails `keep` is dropped (every
/// extension of it inherits the failing formula).
inline std::vector<EnumeratedPath> enumerate_paths(const Scheme& s, std::size_t max_steps,
                                                   const std::function<bool(const Formula&)>& keep = {}) {
  std::vector<EnumeratedPath> out;
  struct Frame {
    std::size_t node;
    SymbolicState state;
    EnumeratedPath path;
  };
  std::vector<Frame> stack;
  stack.push_back({s.initial(), SymbolicState::initial(s.arity(), used_registers(s)), {}});
  while (!stack.empty()) {
    Frame f = std::move(stack.back());
    stack.pop_back();
    const Node& n = s.node(f.node);
    if (n.kind() == NodeKind::Terminal) {
      f.path.steps.push_back({f.node, EdgeLabel::None});
      f.path.complete = true;
      out.push_back(std::move(f.path));
      continue;
    }
    if (f.path.steps.size() >= max_steps) {
      out.push_back(std::move(f.path));
      continue;
    }
    std::vector<EdgeLabel> edges =
        n.kind() == NodeKind::Function ? std::vector<EdgeLabel>{EdgeLabel::None}
                                       : std::vector<EdgeLabel>{EdgeLabel::Zero, EdgeLabel::One};
    for (EdgeLabel e : edges) {
      auto [next, formula] = symbolic_step(f.state, n, e);
      Frame child{n.successor(e), std::move(next), f.path};
      child.path.steps.push_back({f.node, e});
      if (formula) {
        if (keep && !keep(*formula)) continue;
        child.path.pi.push_back(*formula);
      }
      stack.push_back(std::move(child));
    }
  }
  return out;
}

/// Leaf count of R(S, K) for an acyclic scheme computed straight from the definition:
/// keep the complete paths whose path condition is satisfiable in K, take the union of
/// their prefixes, and add one terminal for every predicate position used in only one
/// direction.
inline std::size_t brute_force_tree_leaves(const Scheme& s, const std::vector<Structure>& k) {
  auto paths = enumerate_paths(s, s.size() + 1);
  std::map<std::vector<std::size_t>, std::set<EdgeLabel>> directions;  // predicate position -> edges used
  std::size_t satisfiable = 0;
  for (const auto& p : paths) {
    if (!p.complete) throw Error("brute_force_tree_leaves needs an acyclic scheme");
    if (!is_sat(check_sat_class(SatQuery(s.arity(), p.pi), k))) continue;
    ++satisfiable;
    std::vector<std::size_t> prefix;
    for (const auto& st : p.steps) {
      if (st.edge != EdgeLabel::None) directions[prefix].insert(st.edge);
      prefix.push_back(st.node * 3 + static_cast<std::size_t>(st.edge));
    }
  }
  std::size_t completions = 0;
  for (const auto& [pos, used] : directions)
    if (used.size() == 1) ++completions;
  return satisfiable + completions;
}

// ---------------------------------------------------------------------------
// Seeded scheme corpus

struct CorpusEntry {
  Scheme scheme;
  std::string origin;  // "hand" or "generated"
};

class SchemeGenerator {
 public:
  explicit SchemeGenerator(std::uint32_t seed) : rng_(seed) {}

  Scheme generate(const std::string& name) {
    while (true) {
      auto s = attempt(name);
      if (s) return std::move(*s);
    }
  }

 private:
  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }

  Term var() { return Term::var(static_cast<VarIndex>(pick(0, 2))); }
  Term constant() { return Term::constant(chance(0.5) ? "zero" : "one"); }

  Term term(bool primitive, int depth = 0) {
    int k = pick(0, 3);
    if (k == 0) return var();
    if (k == 1) return constant();
    std::string f = chance(0.5) ? "add" : "mul";
    if (primitive) return Term::apply(f, {var(), var()});
    auto arg = [&] { return depth < 1 && chance(0.5) ? term(false, depth + 1) : (chance(0.7) ? var() : constant()); };
    return Term::apply(f, {arg(), arg()});
  }

  Formula formula(bool primitive, int depth = 0) {
    if (primitive) {
      return chance(0.6) ? Formula::equal(var(), var()) : Formula::atom("le", {var(), var()});
    }
    int k = pick(0, depth < 1 ? 5 : 1);
    switch (k) {
      case 0:
        return Formula::equal(term(false, 1), term(false, 1));
      case 1:
        return Formula::atom("le", {term(false, 1), term(false, 1)});
      case 2:
        return Formula::negation(formula(false, depth + 1));
      case 3:
        return Formula::conjunction(formula(false, depth + 1), formula(false, depth + 1));
      case 4:
        // Bound variable shared with a register name: exercises capture avoidance.
        return Formula::forall(1, formula(false, depth + 1));
      default:
        return Formula::exists(5, Formula::equal(Term::apply("add", {Term::var(5), var()}), var()));
    }
  }

  std::optional<Scheme> attempt(const std::string& name) {
    const long long arity = pick(1, 2);
    const int count = pick(2, 8);
    const bool acyclic = chance(0.5);
    const bool primitive = chance(0.5);
    static const char* kIds = "abcdefgh";
    auto id = [](int i) { return std::string(1, kIds[i]); };
    auto target = [&](int from) { return acyclic ? pick(from + 1, count - 1) : pick(0, count - 1); };

    SchemeBuilder b(name, arity);
    std::vector<int> kind(count);
    for (int i = 0; i < count; ++i) {
      kind[i] = i == count - 1 ? 2 : (chance(0.15) ? 2 : (chance(0.5) ? 0 : 1));
      if (kind[i] == 0) {
        b.function(id(i), static_cast<VarIndex>(pick(0, 2)), term(primitive), id(target(i)));
      } else if (kind[i] == 1) {
        b.predicate(id(i), formula(primitive), id(target(i)), id(target(i)));
      } else {
        b.terminal(id(i), static_cast<std::uint64_t>(pick(0, 3)));
      }
    }
    b.initial("a");
    // Drop unreachable nodes, then validate.
    SchemeDocument doc = b.document();
    std::set<std::string> reach{"a"};
    for (bool grew = true; grew;) {
      grew = false;
      for (const auto& e : doc.edges)
        if (reach.count(e.from) && reach.insert(e.to).second) grew = true;
    }
    std::erase_if(doc.nodes, [&](const NodeDecl& n) { return !reach.count(n.id); });
    std::erase_if(doc.edges, [&](const EdgeDecl& e) { return !reach.count(e.from); });
    try {
      return validate(doc, ring());
    } catch (const ValidationError&) {
      return std::nullopt;
    }
  }

  std::mt19937 rng_;
};

/// Hand-written schemes plus `generated` seeded random ones (arity 1-2, at most 8 nodes).
inline std::vector<CorpusEntry> corpus(std::size_t generated = 60, std::uint32_t seed = 20261016) {
  std::vector<CorpusEntry> c;
  auto hand = [&](Scheme s) { c.push_back({std::move(s), "hand"}); };
  hand(terminal_only(1));
  hand(terminal_only(2, 3));
  hand(loop_scheme());
  hand(guarded_loop_scheme());
  hand(self_loop_scheme());
  hand(contradiction_scheme());
  hand(SchemeBuilder("diamond", 1)
           .predicate("a", "(le x0 one)", "b", "c")
           .function("b", 0, "(add x0 one)", "d")
           .function("c", 0, "(mul x0 x0)", "d")
           .predicate("d", "(= x0 zero)", "t1", "t0")
           .terminal("t0", 0)
           .terminal("t1", 1)
           .initial("a")
           .build(ring()));
  hand(SchemeBuilder("square", 1)
           .function("a", 1, "(mul x0 x0)", "b")
           .predicate("b", "(forall x1 (le x1 x0))", "t1", "t0")
           .terminal("t0", 0)
           .terminal("t1", 1)
           .initial("a")
           .build(ring()));
  hand(SchemeBuilder("doubling", 1)
           .predicate("p", "(= x0 zero)", "t", "f")
           .function("f", 0, "(add x0 x0)", "q")
           .predicate("q", "(le x0 one)", "t", "p")
           .terminal("t", 2)
           .initial("p")
           .build(ring()));
  hand(SchemeBuilder("capture", 2)
           .function("a", 0, "(add x0 x1)", "b")
           .predicate("b", "(exists x1 (= (mul x1 x1) x0))", "t1", "t0")
           .terminal("t0", 0)
           .terminal("t1", 1)
           .initial("a")
           .build(ring()));
  hand(SchemeBuilder("counter", 1)
           .function("a", 2, "one", "p")
           .predicate("p", "(= x2 zero)", "t", "f")
           .function("f", 2, "(add x2 one)", "p")
           .terminal("t", 4)
           .initial("a")
           .build(ring()));
  hand(SchemeBuilder("swap", 2)
           .function("a", 2, "x0", "b")
           .function("b", 0, "x1", "c")
           .function("c", 1, "x2", "d")
           .predicate("d", "(le x0 x1)", "t1", "t0")
           .terminal("t0", 0)
           .terminal("t1", 1)
           .initial("a")
           .build(ring()));
  SchemeGenerator gen(seed);
  for (std::size_t i = 0; i < generated; ++i) c.push_back({gen.generate("gen" + std::to_string(i)), "generated"});
  return c;
}

inline std::vector<Structure> desk_structures() { return {gf(2), gf(3), zmod(4)}; }

}  // namespace schemetree::testing
