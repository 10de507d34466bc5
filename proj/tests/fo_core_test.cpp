#include <gtest/gtest.h>

#include <map>
#include <random>

#include "support.hpp"

using namespace schemetree;
using namespace schemetree::testing;

namespace {

// Plain modular arithmetic, no structure tables involved.
struct ArithOracle {
  unsigned m;

  unsigned term(const Term& t, const std::map<VarIndex, unsigned>& env) const {
    switch (t.kind()) {
      case Term::Kind::Variable:
        return env.at(t.index());
      case Term::Kind::Constant:
        return t.symbol() == "zero" ? 0 : 1 % m;
      case Term::Kind::Apply: {
        unsigned a = term(t.args()[0], env), b = term(t.args()[1], env);
        return t.symbol() == "add" ? (a + b) % m : (a * b) % m;
      }
    }
    return 0;
  }

  bool formula(const Formula& f, std::map<VarIndex, unsigned> env) const {
    switch (f.kind()) {
      case Formula::Kind::Equal:
        return term(f.terms()[0], env) == term(f.terms()[1], env);
      case Formula::Kind::Atom:
        return term(f.terms()[0], env) <= term(f.terms()[1], env);
      case Formula::Kind::Not:
        return !formula(f.body(), env);
      case Formula::Kind::And:
        return formula(f.left(), env) && formula(f.right(), env);
      case Formula::Kind::ForAll:
        for (unsigned e = 0; e < m; ++e) {
          env[f.bound()] = e;
          if (!formula(f.body(), env)) return false;
        }
        return true;
    }
    return false;
  }
};

class RandomSyntax {
 public:
  explicit RandomSyntax(std::uint32_t seed) : rng_(seed) {}

  Term term(int depth = 0) {
    int k = pick(0, depth >= 2 ? 1 : 3);
    if (k == 0) return Term::var(static_cast<VarIndex>(pick(0, 3)));
    if (k == 1) return Term::constant(pick(0, 1) ? "zero" : "one");
    return Term::apply(pick(0, 1) ? "add" : "mul", {term(depth + 1), term(depth + 1)});
  }

  Formula formula(int depth = 0) {
    int k = pick(0, depth >= 3 ? 1 : 6);
    switch (k) {
      case 0:
        return Formula::equal(term(1), term(1));
      case 1:
        return Formula::atom("le", {term(1), term(1)});
      case 2:
        return Formula::negation(formula(depth + 1));
      case 3:
        return Formula::conjunction(formula(depth + 1), formula(depth + 1));
      case 4:
        return Formula::disjunction(formula(depth + 1), formula(depth + 1));
      case 5:
        return Formula::exists(static_cast<VarIndex>(pick(0, 3)), formula(depth + 1));
      default:
        return Formula::forall(static_cast<VarIndex>(pick(0, 3)), formula(depth + 1));
    }
  }

  Substitution substitution() {
    Substitution s;
    for (VarIndex i = 0; i < 4; ++i)
      if (pick(0, 1)) s.emplace(i, term(1));
    return s;
  }

 private:
  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  std::mt19937 rng_;
};

Assignment assignment(std::initializer_list<Element> values) { return Assignment(Tuple(values)); }

void expect_core_only(const Formula& f) {
  switch (f.kind()) {
    case Formula::Kind::Equal:
    case Formula::Kind::Atom:
      return;
    case Formula::Kind::Not:
    case Formula::Kind::ForAll:
      expect_core_only(f.body());
      return;
    case Formula::Kind::And:
      expect_core_only(f.left());
      expect_core_only(f.right());
      return;
  }
  ADD_FAILURE() << "unexpected formula kind";
}

}  // namespace

TEST(EvalTerm, AdditionInGf3) {
  EXPECT_EQ(eval_term(parse_term("(add x0 x1)"), gf(3), assignment({1, 2})), 0u);
}

TEST(EvalTerm, VariableIsIdentity) {
  auto u = zmod(4);
  for (Element e = 0; e < 4; ++e) EXPECT_EQ(eval_term(Term::var(0), u, assignment({e})), e);
}

TEST(EvalTerm, NestedApplication) {
  EXPECT_EQ(eval_term(parse_term("(mul (add x0 x1) x0)"), gf(3), assignment({2, 2})), 2u);
}

TEST(EvalTerm, UnassignedVariableThrows) {
  EXPECT_THROW(eval_term(Term::var(3), gf(3), assignment({0})), EvalError);
}

TEST(EvalTerm, AgreesWithArithmeticOracle) {
  RandomSyntax gen(11);
  for (unsigned m : {2u, 3u, 4u}) {
    auto u = zmod(m);
    ArithOracle oracle{m};
    for (int i = 0; i < 200; ++i) {
      Term t = gen.term();
      for (const auto& tuple : all_tuples(m, 4)) {
        std::map<VarIndex, unsigned> env;
        for (VarIndex j = 0; j < 4; ++j) env[j] = tuple[j];
        ASSERT_EQ(eval_term(t, u, Assignment(tuple)), oracle.term(t, env)) << to_string(t);
      }
    }
  }
}

TEST(EvalFormula, EqualityIsReflexive) {
  auto f = parse_formula("(= x0 x0)");
  for (unsigned m : {1u, 2u, 3u, 4u}) {
    auto u = zmod(m);
    for (Element e = 0; e < m; ++e) EXPECT_TRUE(eval_formula(f, u, assignment({e})));
  }
}

TEST(EvalFormula, ZeroAnnihilates) {
  EXPECT_TRUE(eval_formula(parse_formula("(forall x1 (= (mul x0 x1) x0))"), gf(3), assignment({0})));
  EXPECT_FALSE(eval_formula(parse_formula("(forall x1 (= (mul x0 x1) x0))"), gf(3), assignment({1})));
}

TEST(EvalFormula, TwoIsNotASquareModThree) {
  auto f = parse_formula("(exists x1 (= (mul x1 x1) x0))");
  EXPECT_FALSE(eval_formula(f, gf(3), assignment({2})));
  EXPECT_TRUE(eval_formula(f, gf(3), assignment({1})));
  EXPECT_TRUE(eval_formula(f, gf(3), assignment({0})));
}

TEST(EvalFormula, QuantifierRestoresBinding) {
  // x1 is bound inside, but the outer conjunct must still see the caller's x1.
  auto f = parse_formula("(and (forall x1 (le zero x1)) (= x1 one))");
  EXPECT_TRUE(eval_formula(f, gf(3), assignment({0, 1})));
  EXPECT_FALSE(eval_formula(f, gf(3), assignment({0, 2})));
}

TEST(EvalFormula, AgreesWithArithmeticOracle) {
  RandomSyntax gen(12);
  for (unsigned m : {2u, 3u, 4u}) {
    auto u = zmod(m);
    ArithOracle oracle{m};
    for (int i = 0; i < 150; ++i) {
      Formula f = gen.formula();
      for (const auto& tuple : all_tuples(m, 4)) {
        std::map<VarIndex, unsigned> env;
        for (VarIndex j = 0; j < 4; ++j) env[j] = tuple[j];
        ASSERT_EQ(eval_formula(f, u, tuple), oracle.formula(f, env)) << to_string(f);
      }
    }
  }
}

TEST(Desugar, SugarFormsBecomeCoreConnectives) {
  auto a = parse_formula("(= x0 zero)");
  auto b = parse_formula("(le x0 x1)");
  EXPECT_EQ(parse_formula("(or (= x0 zero) (le x0 x1))"),
            Formula::negation(Formula::conjunction(Formula::negation(a), Formula::negation(b))));
  EXPECT_EQ(parse_formula("(implies (= x0 zero) (le x0 x1))"),
            Formula::negation(Formula::conjunction(a, Formula::negation(b))));
  EXPECT_EQ(parse_formula("(exists x1 (le x0 x1))"), Formula::negation(Formula::forall(1, Formula::negation(b))));
}

TEST(Desugar, RandomFormulasUseOnlyCoreKinds) {
  RandomSyntax gen(13);
  for (int i = 0; i < 300; ++i) expect_core_only(gen.formula());
}

TEST(Syntax, PrintParseRoundTrip) {
  RandomSyntax gen(14);
  for (int i = 0; i < 300; ++i) {
    Formula f = gen.formula();
    ASSERT_EQ(parse_formula(to_string(f)), f) << to_string(f);
  }
  EXPECT_EQ(to_string(parse_formula("(forall x1 (not (= (add x0 x1) x0)))")), "(forall x1 (not (= (add x0 x1) x0)))");
}

TEST(Syntax, NaryConnectivesFoldLeft) {
  EXPECT_EQ(parse_formula("(and (= x0 x0) (= x1 x1) (= x2 x2))"),
            parse_formula("(and (and (= x0 x0) (= x1 x1)) (= x2 x2))"));
}

TEST(Syntax, RejectsMalformedInput) {
  EXPECT_THROW(parse_formula("(= x0"), ParseError);
  EXPECT_THROW(parse_formula("(forall y (= x0 x0))"), ParseError);
  EXPECT_THROW(parse_formula("(not (= x0 x0) (= x1 x1))"), ParseError);
  EXPECT_THROW(parse_term("(add x0 x1) extra"), ParseError);
  EXPECT_THROW(parse_term("x01"), ParseError);
}

TEST(Syntax, SymbolCheckAgainstSignature) {
  EXPECT_FALSE(check_symbols(parse_formula("(le (add x0 one) zero)"), ring()));
  EXPECT_TRUE(check_symbols(parse_term("(sub x0 x1)"), ring()));
  EXPECT_TRUE(check_symbols(parse_term("(add x0)"), ring()));
  EXPECT_TRUE(check_symbols(parse_formula("(p x0)"), ring()));
  EXPECT_TRUE(check_symbols(parse_formula("(add x0 x0)"), ring()));
}

TEST(Substitute, DirectReplacement) {
  Substitution s{{0, parse_term("(add x0 x1)")}, {1, Term::var(1)}};
  EXPECT_EQ(substitute(parse_formula("(= x0 x1)"), s), parse_formula("(= (add x0 x1) x1)"));
}

TEST(Substitute, RenamesCapturedBoundVariable) {
  Formula f = parse_formula("(forall x1 (= x0 x1))");
  Formula g = substitute(f, {{0, Term::var(1)}});
  ASSERT_EQ(g.kind(), Formula::Kind::ForAll);
  EXPECT_NE(g.bound(), 1u);
  EXPECT_GE(g.bound(), kFreshWatermark);
  EXPECT_EQ(g.body(), Formula::equal(Term::var(1), Term::var(g.bound())));
  // x0 := x1, so the result says "every element equals x1": true only in the one-element structure.
  for (unsigned m : {1u, 2u, 3u})
    for (const auto& t : all_tuples(m, 2))
      EXPECT_EQ(eval_formula(g, zmod(m), t), m == 1) << m;
}

TEST(Substitute, ClosedFormulaUnchanged) {
  Formula f = parse_formula("(forall x0 (exists x1 (= (add x0 x1) zero)))");
  ASSERT_TRUE(f.free_vars().empty());
  EXPECT_EQ(substitute(f, {{0, Term::var(3)}, {1, parse_term("(mul x2 x2)")}}), f);
}

TEST(Substitute, IsDeterministic) {
  Formula f = parse_formula("(forall x1 (forall x2 (le (add x0 x1) x2)))");
  Substitution s{{0, parse_term("(add x1 x2)")}};
  EXPECT_EQ(to_string(substitute(f, s)), to_string(substitute(f, s)));
}

// eval(φ[s], v) == eval(φ, v') where v'(x) = eval(s(x), v) for x in dom(s), v(x) otherwise.
TEST(Substitute, SemanticLemmaExhaustiveOverGf3) {
  auto u = gf(3);
  RandomSyntax gen(15);
  for (int i = 0; i < 250; ++i) {
    Formula f = gen.formula();
    Substitution s = gen.substitution();
    Formula g = substitute(f, s);
    for (const auto& tuple : all_tuples(3, 4)) {
      Assignment v(tuple);
      Assignment shifted(tuple);
      for (const auto& [x, t] : s) shifted.bind(x, eval_term(t, u, v));
      ASSERT_EQ(eval_formula(g, u, v), eval_formula(f, u, shifted)) << to_string(f) << " -> " << to_string(g);
    }
  }
}

TEST(Substitute, FreeVariablesTransformConsistently) {
  RandomSyntax gen(16);
  for (int i = 0; i < 300; ++i) {
    Formula f = gen.formula();
    Substitution s = gen.substitution();
    std::set<VarIndex> expected;
    for (VarIndex x : f.free_vars()) {
      auto it = s.find(x);
      if (it == s.end()) {
        expected.insert(x);
      } else {
        for (VarIndex y : it->second.variables()) expected.insert(y);
      }
    }
    auto got = substitute(f, s).free_vars();
    ASSERT_EQ(std::set<VarIndex>(got.begin(), got.end()), expected) << to_string(f);
  }
}

TEST(FreeVars, BoundVariablesExcluded) {
  EXPECT_EQ(parse_formula("(forall x5 (le x2 x5))").free_vars(), (std::vector<VarIndex>{2}));
  EXPECT_EQ(parse_formula("(and (forall x1 (= x1 x1)) (= x1 x0))").free_vars(), (std::vector<VarIndex>{0, 1}));
  EXPECT_TRUE(parse_formula("(exists x0 (= x0 zero))").free_vars().empty());
}

TEST(Primitive, Terms) {
  EXPECT_TRUE(is_primitive_term(parse_term("(add x0 x2)")));
  EXPECT_TRUE(is_primitive_term(parse_term("x3")));
  EXPECT_TRUE(is_primitive_term(parse_term("zero")));
  EXPECT_FALSE(is_primitive_term(parse_term("(add (mul x0 x0) x1)")));
  EXPECT_FALSE(is_primitive_term(parse_term("(add x0 one)")));
}

TEST(Primitive, Formulas) {
  EXPECT_TRUE(is_primitive_formula(parse_formula("(= x0 x1)")));
  EXPECT_TRUE(is_primitive_formula(parse_formula("(le x1 x0)")));
  EXPECT_FALSE(is_primitive_formula(parse_formula("(forall x1 (le x1 x1))")));
  EXPECT_FALSE(is_primitive_formula(parse_formula("(not (= x0 x1))")));
  EXPECT_FALSE(is_primitive_formula(parse_formula("(= (add x0 x1) x1)")));
}

TEST(Structure, BuilderRequiresTotalTables) {
  StructureBuilder b("half", ring(), {"a", "b"});
  b.constant("zero", 0).constant("one", 1);
  b.function("add", {0, 0}, 0);
  EXPECT_THROW(std::move(b).build(), Error);
}

TEST(Structure, BuilderRejectsUndeclaredSymbols) {
  StructureBuilder b("bad", ring(), {"a"});
  EXPECT_THROW(b.constant("two", 0), Error);
  EXPECT_THROW(b.function("add", {0}, 0), Error);
}

TEST(Structure, ModularTablesMatchArithmetic) {
  auto u = zmod(4);
  for (Element x = 0; x < 4; ++x)
    for (Element y = 0; y < 4; ++y) {
      Element xy[] = {x, y};
      EXPECT_EQ(u.apply("add", xy), (x + y) % 4);
      EXPECT_EQ(u.apply("mul", xy), (x * y) % 4);
      EXPECT_EQ(u.holds("le", xy), x <= y);
    }
}

TEST(Tuples, LexicographicEnumeration) {
  EXPECT_EQ(all_tuples(2, 2), (std::vector<Tuple>{{0, 0}, {0, 1}, {1, 0}, {1, 1}}));
  EXPECT_EQ(all_tuples(3, 1).size(), 3u);
  EXPECT_EQ(format_tuple(gf(3), {1, 2}), "1,2");
  EXPECT_EQ(parse_tuple(gf(3), "2,0"), (Tuple{2, 0}));
  EXPECT_THROW(parse_tuple(gf(3), "3,0"), Error);
}
