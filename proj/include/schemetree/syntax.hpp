#pragma once

#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "schemetree/error.hpp"
#include "schemetree/signature.hpp"
#include "schemetree/term.hpp"

// Prefix notation for terms and formulas:
//
//   term    := x<k> | <constant> | (<function> term...)
//   formula := (= term term) | (<predicate> term...) | (not formula)
//            | (and formula formula...) | (or formula formula...)
//            | (implies formula formula) | (forall x<k> formula) | (exists x<k> formula)
//
// or/implies/exists are desugared while parsing, so printing always yields core syntax.

namespace schemetree {

namespace detail {

struct SExpr {
  std::string atom;  // empty for lists
  std::vector<SExpr> items;
  bool is_list() const noexcept { return atom.empty(); }
};

class SExprReader {
 public:
  explicit SExprReader(std::string_view text) : text_(text) {}

  SExpr read_all() {
    SExpr e = read();
    skip_space();
    if (pos_ != text_.size()) throw ParseError("unexpected trailing input '" + std::string(text_.substr(pos_)) + "'");
    return e;
  }

 private:
  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  SExpr read() {
    skip_space();
    if (pos_ == text_.size()) throw ParseError("unexpected end of expression");
    if (text_[pos_] == ')') throw ParseError("unbalanced ')'");
    if (text_[pos_] == '(') {
      ++pos_;
      SExpr list;
      while (true) {
        skip_space();
        if (pos_ == text_.size()) throw ParseError("missing ')'");
        if (text_[pos_] == ')') {
          ++pos_;
          break;
        }
        list.items.push_back(read());
      }
      if (list.items.empty()) throw ParseError("empty list '()'");
      return list;
    }
    std::size_t start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) && text_[pos_] != '(' &&
           text_[pos_] != ')')
      ++pos_;
    return SExpr{std::string(text_.substr(start, pos_ - start)), {}};
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

inline VarIndex parse_variable(const std::string& s) {
  if (!is_variable_name(s)) throw ParseError("expected a variable x<k>, got '" + s + "'");
  unsigned long v = std::stoul(s.substr(1));
  if (v > 0xffffffffUL - 1) throw ParseError("variable index too large: '" + s + "'");
  return static_cast<VarIndex>(v);
}

inline Term to_term(const SExpr& e) {
  if (!e.is_list()) {
    if (is_variable_name(e.atom)) return Term::var(parse_variable(e.atom));
    if (!is_symbol_name(e.atom)) throw ParseError("invalid constant symbol '" + e.atom + "'");
    return Term::constant(e.atom);
  }
  const SExpr& head = e.items.front();
  if (head.is_list() || !is_symbol_name(head.atom))
    throw ParseError("expected a function symbol at the head of a term");
  if (e.items.size() < 2) throw ParseError("function '" + head.atom + "' applied to no arguments");
  std::vector<Term> args;
  for (std::size_t i = 1; i < e.items.size(); ++i) args.push_back(to_term(e.items[i]));
  return Term::apply(head.atom, std::move(args));
}

inline Formula to_formula(const SExpr& e) {
  if (!e.is_list()) throw ParseError("expected a formula, got '" + e.atom + "'");
  const SExpr& head = e.items.front();
  if (head.is_list()) throw ParseError("formula head must be a symbol");
  const std::string& op = head.atom;
  const std::size_t argc = e.items.size() - 1;
  auto want = [&](std::size_t n) {
    if (argc != n) throw ParseError("'" + op + "' expects " + std::to_string(n) + " operands");
  };
  if (op == "=") {
    want(2);
    return Formula::equal(to_term(e.items[1]), to_term(e.items[2]));
  }
  if (op == "not") {
    want(1);
    return Formula::negation(to_formula(e.items[1]));
  }
  if (op == "and" || op == "or") {
    if (argc < 2) throw ParseError("'" + op + "' expects at least 2 operands");
    Formula acc = to_formula(e.items[1]);
    for (std::size_t i = 2; i < e.items.size(); ++i) {
      Formula next = to_formula(e.items[i]);
      acc = op == "and" ? Formula::conjunction(acc, next) : Formula::disjunction(acc, next);
    }
    return acc;
  }
  if (op == "implies") {
    want(2);
    return Formula::implication(to_formula(e.items[1]), to_formula(e.items[2]));
  }
  if (op == "forall" || op == "exists") {
    want(2);
    if (e.items[1].is_list()) throw ParseError("'" + op + "' expects a variable");
    VarIndex x = parse_variable(e.items[1].atom);
    Formula body = to_formula(e.items[2]);
    return op == "forall" ? Formula::forall(x, body) : Formula::exists(x, body);
  }
  if (!is_symbol_name(op)) throw ParseError("invalid predicate symbol '" + op + "'");
  if (argc == 0) throw ParseError("predicate '" + op + "' applied to no arguments");
  std::vector<Term> args;
  for (std::size_t i = 1; i < e.items.size(); ++i) args.push_back(to_term(e.items[i]));
  return Formula::atom(op, std::move(args));
}

inline void print(std::string& out, const Term& t) {
  switch (t.kind()) {
    case Term::Kind::Variable:
      out += 'x';
      out += std::to_string(t.index());
      return;
    case Term::Kind::Constant:
      out += t.symbol();
      return;
    case Term::Kind::Apply:
      out += '(';
      out += t.symbol();
      for (const auto& a : t.args()) {
        out += ' ';
        print(out, a);
      }
      out += ')';
      return;
  }
}

inline void print(std::string& out, const Formula& f) {
  switch (f.kind()) {
    case Formula::Kind::Equal:
    case Formula::Kind::Atom:
      out += '(';
      out += f.symbol();
      for (const auto& t : f.terms()) {
        out += ' ';
        print(out, t);
      }
      out += ')';
      return;
    case Formula::Kind::Not:
      out += "(not ";
      print(out, f.body());
      out += ')';
      return;
    case Formula::Kind::And:
      out += "(and ";
      print(out, f.left());
      out += ' ';
      print(out, f.right());
      out += ')';
      return;
    case Formula::Kind::ForAll:
      out += "(forall x" + std::to_string(f.bound()) + ' ';
      print(out, f.body());
      out += ')';
      return;
  }
}

}  // namespace detail

inline Term parse_term(std::string_view text) { return detail::to_term(detail::SExprReader(text).read_all()); }

inline Formula parse_formula(std::string_view text) {
  return detail::to_formula(detail::SExprReader(text).read_all());
}

inline std::string to_string(const Term& t) {
  std::string out;
  detail::print(out, t);
  return out;
}

inline std::string to_string(const Formula& f) {
  std::string out;
  detail::print(out, f);
  return out;
}

// ---------------------------------------------------------------------------
// Signature conformance

/// First problem found with the symbols of `t`, if any.
inline std::optional<std::string> check_symbols(const Term& t, const Signature& sig) {
  switch (t.kind()) {
    case Term::Kind::Variable:
      return std::nullopt;
    case Term::Kind::Constant:
      if (!sig.has(t.symbol(), SymbolKind::Constant, 0))
        return "symbol '" + t.symbol() + "' is not a constant of signature " + sig.name();
      return std::nullopt;
    case Term::Kind::Apply:
      break;
  }
  const auto* d = sig.find(t.symbol());
  if (!d || d->kind != SymbolKind::Function)
    return "symbol '" + t.symbol() + "' is not a function of signature " + sig.name();
  if (d->arity != t.args().size())
    return "function '" + t.symbol() + "' has arity " + std::to_string(d->arity) + ", applied to " +
           std::to_string(t.args().size());
  for (const auto& a : t.args())
    if (auto err = check_symbols(a, sig)) return err;
  return std::nullopt;
}

inline std::optional<std::string> check_symbols(const Formula& f, const Signature& sig) {
  switch (f.kind()) {
    case Formula::Kind::Equal:
      for (const auto& t : f.terms())
        if (auto err = check_symbols(t, sig)) return err;
      return std::nullopt;
    case Formula::Kind::Atom: {
      const auto* d = sig.find(f.symbol());
      if (!d || d->kind != SymbolKind::Predicate)
        return "symbol '" + f.symbol() + "' is not a predicate of signature " + sig.name();
      if (d->arity != f.terms().size())
        return "predicate '" + f.symbol() + "' has arity " + std::to_string(d->arity) + ", applied to " +
               std::to_string(f.terms().size());
      for (const auto& t : f.terms())
        if (auto err = check_symbols(t, sig)) return err;
      return std::nullopt;
    }
    case Formula::Kind::Not:
    case Formula::Kind::ForAll:
      return check_symbols(f.body(), sig);
    case Formula::Kind::And:
      if (auto err = check_symbols(f.left(), sig)) return err;
      return check_symbols(f.right(), sig);
  }
  return std::nullopt;
}

}  // namespace schemetree
