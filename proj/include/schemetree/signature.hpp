#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "schemetree/error.hpp"

namespace schemetree {

enum class SymbolKind : std::uint8_t { Constant, Function, Predicate };

struct SymbolDecl {
  std::string name;
  SymbolKind kind = SymbolKind::Constant;
  unsigned arity = 0;  // 0 for constants, >= 1 otherwise

  friend bool operator==(const SymbolDecl&, const SymbolDecl&) = default;
};

/// True for `x` followed by a canonical decimal index (x0, x17, not x01).
inline bool is_variable_name(std::string_view s) {
  if (s.size() < 2 || s[0] != 'x') return false;
  if (s.size() > 2 && s[1] == '0') return false;
  return std::all_of(s.begin() + 1, s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

/// Identifiers usable as symbols: no whitespace or parentheses, no reserved words,
/// never shaped like a variable.
inline bool is_symbol_name(std::string_view s) {
  static constexpr std::string_view kReserved[] = {"=",   "not",    "and",     "or",
                                                   "implies", "forall", "exists"};
  if (s.empty()) return false;
  if (s.size() >= 2 && s[0] == 'x' && std::all_of(s.begin() + 1, s.end(), [](char c) { return c >= '0' && c <= '9'; }))
    return false;
  if (std::find(std::begin(kReserved), std::end(kReserved), s) != std::end(kReserved)) return false;
  return std::none_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isspace(c) || c == '(' || c == ')' || c == ',' || c == '#';
  });
}

/// Finite vocabulary of constant, function and predicate symbols.
/// Equality is part of the formula language and is never declared here.
class Signature {
 public:
  Signature() = default;

  Signature(std::string name, std::vector<SymbolDecl> symbols) : name_(std::move(name)) {
    for (auto& s : symbols) add(std::move(s));
  }

  void add(SymbolDecl decl) {
    if (!is_symbol_name(decl.name)) throw Error("invalid symbol name '" + decl.name + "'");
    if (decl.kind == SymbolKind::Constant && decl.arity != 0)
      throw Error("constant '" + decl.name + "' must have arity 0");
    if (decl.kind != SymbolKind::Constant && decl.arity == 0)
      throw Error("symbol '" + decl.name + "' must have positive arity");
    if (index_.count(decl.name)) throw Error("duplicate symbol '" + decl.name + "'");
    index_.emplace(decl.name, symbols_.size());
    symbols_.push_back(std::move(decl));
  }

  const std::string& name() const noexcept { return name_; }
  const std::vector<SymbolDecl>& symbols() const noexcept { return symbols_; }

  const SymbolDecl* find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    return it == index_.end() ? nullptr : &symbols_[it->second];
  }

  bool has(std::string_view name, SymbolKind kind, unsigned arity) const {
    const auto* d = find(name);
    return d && d->kind == kind && d->arity == arity;
  }

  /// Same symbols with the same kinds and arities, ignoring declaration order and name.
  bool compatible(const Signature& other) const {
    if (symbols_.size() != other.symbols_.size()) return false;
    return std::all_of(symbols_.begin(), symbols_.end(), [&](const SymbolDecl& d) {
      return other.has(d.name, d.kind, d.arity);
    });
  }

 private:
  std::string name_;
  std::vector<SymbolDecl> symbols_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

}  // namespace schemetree
