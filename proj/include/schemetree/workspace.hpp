#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "schemetree/error.hpp"
#include "schemetree/scheme.hpp"
#include "schemetree/signature.hpp"
#include "schemetree/structure.hpp"

// Text formats besides schemes. All share: one directive per line, `#` comments.
//
// Signature:              Structure:                      Class manifest:
//   signature ring          structure GF3 signature ring.sig  class primes23
//   constant zero           universe 0 1 2                    structure gf2.structure
//   function add/2          constants                         structure gf3.structure
//   predicate le/2            zero = 0
//                           function add/2                  Family spec:
//                             (0,1) -> 1                      family cyclic max 8
//                           predicate le/2
//                             (0,1)

namespace schemetree {

namespace detail {

struct Line {
  int number;
  std::string text;  // comment stripped, trimmed
  std::vector<std::string> words;
};

inline std::vector<Line> content_lines(const std::string& text) {
  std::vector<Line> out;
  std::istringstream in(text);
  std::string raw;
  int n = 0;
  while (std::getline(in, raw)) {
    ++n;
    std::string t = strip_comment(raw);
    auto b = t.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    auto e = t.find_last_not_of(" \t\r");
    t = t.substr(b, e - b + 1);
    out.push_back({n, t, split_words(t)});
  }
  return out;
}

/// "add/2" -> ("add", 2)
inline std::pair<std::string, unsigned> parse_symbol_arity(const std::string& w, int line) {
  auto slash = w.rfind('/');
  if (slash == std::string::npos || slash == 0 || slash + 1 == w.size())
    throw ParseError("expected <symbol>/<arity>, got '" + w + "'", line);
  try {
    std::size_t used = 0;
    int arity = std::stoi(w.substr(slash + 1), &used);
    if (used != w.size() - slash - 1 || arity < 1) throw std::invalid_argument("arity");
    return {w.substr(0, slash), static_cast<unsigned>(arity)};
  } catch (const std::exception&) {
    throw ParseError("invalid arity in '" + w + "'", line);
  }
}

/// "(a, b)" -> {"a", "b"}
inline std::vector<std::string> parse_name_tuple(const std::string& text, int line) {
  std::string compact;
  for (char c : text)
    if (c != ' ' && c != '\t') compact += c;
  if (compact.size() < 3 || compact.front() != '(' || compact.back() != ')')
    throw ParseError("expected a tuple '(a,b,...)', got '" + text + "'", line);
  std::vector<std::string> out;
  std::string inner = compact.substr(1, compact.size() - 2);
  std::size_t start = 0;
  while (true) {
    auto comma = inner.find(',', start);
    std::string item = inner.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (item.empty()) throw ParseError("empty tuple component in '" + text + "'", line);
    out.push_back(item);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace detail

inline Signature parse_signature(const std::string& text) {
  auto lines = detail::content_lines(text);
  if (lines.empty() || lines[0].words.size() != 2 || lines[0].words[0] != "signature")
    throw ParseError("expected header 'signature <name>'", lines.empty() ? 0 : lines[0].number);
  Signature sig(lines[0].words[1], {});
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& l = lines[i];
    if (l.words.size() != 2) throw ParseError("expected '<kind> <symbol>'", l.number);
    try {
      if (l.words[0] == "constant") {
        sig.add({l.words[1], SymbolKind::Constant, 0});
      } else if (l.words[0] == "function" || l.words[0] == "predicate") {
        auto [name, arity] = detail::parse_symbol_arity(l.words[1], l.number);
        sig.add({name, l.words[0] == "function" ? SymbolKind::Function : SymbolKind::Predicate, arity});
      } else {
        throw ParseError("unknown declaration '" + l.words[0] + "'", l.number);
      }
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(e.what(), l.number);
    }
  }
  return sig;
}

inline std::string save_signature(const Signature& sig) {
  std::ostringstream out;
  out << "signature " << sig.name() << '\n';
  for (const auto& d : sig.symbols()) {
    switch (d.kind) {
      case SymbolKind::Constant:
        out << "constant " << d.name << '\n';
        break;
      case SymbolKind::Function:
        out << "function " << d.name << '/' << d.arity << '\n';
        break;
      case SymbolKind::Predicate:
        out << "predicate " << d.name << '/' << d.arity << '\n';
        break;
    }
  }
  return out.str();
}

struct StructureHeader {
  std::string name;
  std::string signature_ref;
};

inline StructureHeader parse_structure_header(const std::string& text) {
  auto lines = detail::content_lines(text);
  if (lines.empty() || lines[0].words.size() != 4 || lines[0].words[0] != "structure" ||
      lines[0].words[2] != "signature")
    throw ParseError("expected header 'structure <name> signature <file>'", lines.empty() ? 0 : lines[0].number);
  return {lines[0].words[1], lines[0].words[3]};
}

inline Structure parse_structure(const std::string& text, const Signature& signature) {
  auto lines = detail::content_lines(text);
  StructureHeader header = parse_structure_header(text);
  if (lines.size() < 2 || lines[1].words.empty() || lines[1].words[0] != "universe")
    throw ParseError("expected 'universe <elements...>' after the header", lines.size() > 1 ? lines[1].number : 0);
  std::vector<std::string> universe(lines[1].words.begin() + 1, lines[1].words.end());
  std::unique_ptr<StructureBuilder> b;
  try {
    b = std::make_unique<StructureBuilder>(header.name, signature, universe);
  } catch (const Error& e) {
    throw ParseError(e.what(), lines[1].number);
  }
  auto element = [&](const std::string& name, int line) {
    auto e = b->partial().element(name);
    if (!e) throw ParseError("'" + name + "' is not in the universe", line);
    return *e;
  };
  enum class Block { None, Constants, Function, Predicate } block = Block::None;
  std::string symbol;
  for (std::size_t i = 2; i < lines.size(); ++i) {
    const auto& l = lines[i];
    try {
      if (l.words[0] == "constants" && l.words.size() == 1) {
        block = Block::Constants;
      } else if ((l.words[0] == "function" || l.words[0] == "predicate") && l.words.size() == 2) {
        auto [name, arity] = detail::parse_symbol_arity(l.words[1], l.number);
        auto kind = l.words[0] == "function" ? SymbolKind::Function : SymbolKind::Predicate;
        if (!signature.has(name, kind, arity))
          throw ParseError(l.words[0] + " " + l.words[1] + " is not declared in signature " + signature.name(),
                           l.number);
        block = kind == SymbolKind::Function ? Block::Function : Block::Predicate;
        symbol = name;
      } else if (block == Block::Constants) {
        if (l.words.size() != 3 || l.words[1] != "=") throw ParseError("expected '<constant> = <element>'", l.number);
        b->constant(l.words[0], element(l.words[2], l.number));
      } else if (block == Block::Function) {
        auto arrow = l.text.find("->");
        if (arrow == std::string::npos) throw ParseError("expected '(a,...) -> b'", l.number);
        auto names = detail::parse_name_tuple(l.text.substr(0, arrow), l.number);
        auto value = detail::split_words(l.text.substr(arrow + 2));
        if (value.size() != 1) throw ParseError("expected a single result element", l.number);
        Tuple args;
        for (const auto& n : names) args.push_back(element(n, l.number));
        b->function(symbol, args, element(value[0], l.number));
      } else if (block == Block::Predicate) {
        Tuple args;
        for (const auto& n : detail::parse_name_tuple(l.text, l.number)) args.push_back(element(n, l.number));
        b->relation(symbol, args);
      } else {
        throw ParseError("unexpected line '" + l.text + "'", l.number);
      }
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(e.what(), l.number);
    }
  }
  try {
    return std::move(*b).build();
  } catch (const Error& e) {
    throw ParseError(e.what());
  }
}

inline std::string save_structure(const Structure& u, const std::string& signature_ref) {
  std::ostringstream out;
  out << "structure " << u.name() << " signature " << signature_ref << '\n';
  out << "universe";
  for (const auto& e : u.universe()) out << ' ' << e;
  out << '\n';
  bool any_constant = false;
  for (const auto& d : u.signature().symbols())
    if (d.kind == SymbolKind::Constant) {
      if (!any_constant) out << "constants\n";
      any_constant = true;
      out << "  " << d.name << " = " << u.element_name(u.constant(d.name)) << '\n';
    }
  for (const auto& d : u.signature().symbols()) {
    if (d.kind == SymbolKind::Constant) continue;
    out << (d.kind == SymbolKind::Function ? "function " : "predicate ") << d.name << '/' << d.arity << '\n';
    for_each_tuple(u.size(), d.arity, [&](const Tuple& t) {
      std::string tuple = "(" + format_tuple(u, t) + ")";
      if (d.kind == SymbolKind::Function)
        out << "  " << tuple << " -> " << u.element_name(u.apply(d.name, t)) << '\n';
      else if (u.holds(d.name, t))
        out << "  " << tuple << '\n';
      return true;
    });
  }
  return out.str();
}

struct ClassManifest {
  std::string name;
  std::vector<std::string> structure_refs;
};

inline ClassManifest parse_class_manifest(const std::string& text) {
  auto lines = detail::content_lines(text);
  if (lines.empty() || lines[0].words.size() != 2 || lines[0].words[0] != "class")
    throw ParseError("expected header 'class <name>'", lines.empty() ? 0 : lines[0].number);
  ClassManifest m{lines[0].words[1], {}};
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].words.size() != 2 || lines[i].words[0] != "structure")
      throw ParseError("expected 'structure <file>'", lines[i].number);
    m.structure_refs.push_back(lines[i].words[1]);
  }
  if (m.structure_refs.empty()) throw ParseError("a class must list at least one structure");
  return m;
}

struct FamilySpec {
  std::string kind;  // only "cyclic" is known
  std::size_t bound = 0;
};

inline FamilySpec parse_family_spec(const std::string& text) {
  auto lines = detail::content_lines(text);
  if (lines.size() != 1 || lines[0].words.size() != 4 || lines[0].words[0] != "family" ||
      lines[0].words[2] != "max")
    throw ParseError("expected 'family <kind> max <bound>'", lines.empty() ? 0 : lines[0].number);
  FamilySpec f{lines[0].words[1], 0};
  if (f.kind != "cyclic") throw ParseError("unknown family '" + f.kind + "'", lines[0].number);
  try {
    std::size_t used = 0;
    long long b = std::stoll(lines[0].words[3], &used);
    if (used != lines[0].words[3].size() || b < 1) throw std::invalid_argument("bound");
    f.bound = static_cast<std::size_t>(b);
  } catch (const std::exception&) {
    throw ParseError("family bound must be a positive integer", lines[0].number);
  }
  return f;
}

// ---------------------------------------------------------------------------
// Files

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error("cannot read " + p.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write " + p.string());
  out << content;
}

/// Resolves every file reference against one root directory and caches signatures.
class Workspace {
 public:
  explicit Workspace(std::filesystem::path root = ".") : root_(std::move(root)) {}

  const std::filesystem::path& root() const noexcept { return root_; }

  std::filesystem::path resolve(const std::string& ref) const {
    std::filesystem::path p(ref);
    return p.is_absolute() ? p : root_ / p;
  }

  const Signature& signature(const std::string& ref) {
    auto key = resolve(ref).lexically_normal().string();
    if (auto it = signatures_.find(key); it != signatures_.end()) return it->second;
    Signature sig = in_file(ref, [&](const std::string& text) { return parse_signature(text); });
    return signatures_.emplace(key, std::move(sig)).first->second;
  }

  Structure structure(const std::string& ref) {
    return in_file(ref, [&](const std::string& text) {
      auto header = parse_structure_header(text);
      const Signature& sig = signature(header.signature_ref);
      return parse_structure(text, sig);
    });
  }

  std::vector<Structure> structure_class(const std::string& ref) {
    auto manifest = in_file(ref, [](const std::string& text) { return parse_class_manifest(text); });
    std::vector<Structure> k;
    for (const auto& s : manifest.structure_refs) k.push_back(structure(s));
    for (const auto& u : k)
      if (!u.signature().compatible(k.front().signature()))
        throw Error(ref + ": structures " + k.front().name() + " and " + u.name() + " have different signatures");
    return k;
  }

  FamilySpec family(const std::string& ref) {
    return in_file(ref, [](const std::string& text) { return parse_family_spec(text); });
  }

  SchemeDocument scheme_document(const std::string& ref) {
    return in_file(ref, [](const std::string& text) { return parse_scheme_document(text); });
  }

  Scheme scheme(const std::string& ref) {
    SchemeDocument doc = scheme_document(ref);
    return validate(doc, signature(doc.signature_ref));
  }

 private:
  template <class Parse>
  auto in_file(const std::string& ref, Parse&& parse) -> decltype(parse(std::string())) {
    auto path = resolve(ref);
    std::string text = read_file(path);
    try {
      return parse(text);
    } catch (const ParseError& e) {
      throw ParseError(path.string() + ": " + e.what());
    }
  }

  std::filesystem::path root_;
  std::map<std::string, Signature> signatures_;
};

}  // namespace schemetree
