#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "schemetree/error.hpp"
#include "schemetree/natural.hpp"
#include "schemetree/signature.hpp"
#include "schemetree/syntax.hpp"
#include "schemetree/term.hpp"

namespace schemetree {

enum class NodeKind : std::uint8_t { Function, Predicate, Terminal };

enum class EdgeLabel : std::uint8_t { None, Zero, One };

inline const char* to_string(EdgeLabel l) {
  switch (l) {
    case EdgeLabel::None:
      return "-";
    case EdgeLabel::Zero:
      return "0";
    case EdgeLabel::One:
      return "1";
  }
  return "?";
}

/// `x_j <= t`
struct Assign {
  VarIndex target = 0;
  Term term = Term::var(0);
  friend bool operator==(const Assign&, const Assign&) = default;
};

struct Test {
  Formula formula = Formula::equal(Term::var(0), Term::var(0));
  friend bool operator==(const Test&, const Test&) = default;
};

struct Halt {
  Natural value;
  friend bool operator==(const Halt&, const Halt&) = default;
};

/// The expression a node is labeled with. Equality is structural.
using NodeLabel = std::variant<Assign, Test, Halt>;

inline NodeKind kind_of(const NodeLabel& l) { return static_cast<NodeKind>(l.index()); }

inline std::string to_string(const NodeLabel& l) {
  if (const auto* a = std::get_if<Assign>(&l)) return "x" + std::to_string(a->target) + " <= " + to_string(a->term);
  if (const auto* t = std::get_if<Test>(&l)) return to_string(t->formula);
  return std::get<Halt>(l).value.str();
}

inline constexpr std::size_t kNoNode = std::numeric_limits<std::size_t>::max();

struct Node {
  std::string id;
  NodeLabel label;
  std::size_t next = kNoNode;      // function nodes
  std::size_t on_true = kNoNode;   // predicate nodes, edge labeled 1
  std::size_t on_false = kNoNode;  // predicate nodes, edge labeled 0

  NodeKind kind() const noexcept { return kind_of(label); }
  std::size_t successor(EdgeLabel e) const noexcept {
    return e == EdgeLabel::None ? next : e == EdgeLabel::One ? on_true : on_false;
  }
};

// ---------------------------------------------------------------------------
// Raw document

struct NodeDecl {
  std::string id;
  NodeLabel label;
  int line = 0;
};

struct EdgeDecl {
  std::string from;
  std::string to;
  EdgeLabel label = EdgeLabel::None;
  int line = 0;
};

/// A scheme as written, before well-formedness checks.
struct SchemeDocument {
  std::string name;
  long long arity = 0;
  std::string signature_ref;
  std::vector<NodeDecl> nodes;
  std::vector<EdgeDecl> edges;
  std::vector<std::string> initial;  // one entry per `initial` line
};

namespace detail {

inline std::vector<std::string> split_words(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

/// Text after the first `count` whitespace-separated words.
inline std::string rest_after(const std::string& line, std::size_t count) {
  std::size_t pos = 0;
  for (std::size_t i = 0; i < count; ++i) {
    pos = line.find_first_not_of(" \t", pos);
    pos = line.find_first_of(" \t", pos);
    if (pos == std::string::npos) return {};
  }
  auto start = line.find_first_not_of(" \t", pos);
  if (start == std::string::npos) return {};
  auto end = line.find_last_not_of(" \t\r");
  return line.substr(start, end - start + 1);
}

inline std::string strip_comment(const std::string& line) {
  auto hash = line.find('#');
  return hash == std::string::npos ? line : line.substr(0, hash);
}

template <class Parse>
auto with_line(int line, Parse&& parse) -> decltype(parse()) {
  try {
    return parse();
  } catch (const ParseError& e) {
    if (e.line() > 0) throw;
    throw ParseError(e.what(), line);
  }
}

}  // namespace detail

/// Parses the line-oriented scheme format:
///
///   scheme <name> arity <n> signature <sigfile>
///   node <id> function x<j> <= <term>
///   node <id> predicate <formula>
///   node <id> terminal <k>
///   edge <from> -> <to> [label 1|0]
///   initial <id>
///
/// Blank lines and `#` comments are ignored.
inline SchemeDocument parse_scheme_document(const std::string& text) {
  SchemeDocument doc;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  bool have_header = false;
  while (std::getline(in, raw)) {
    ++line;
    std::string content = detail::strip_comment(raw);
    auto w = detail::split_words(content);
    if (w.empty()) continue;
    if (!have_header) {
      if (w.size() != 6 || w[0] != "scheme" || w[2] != "arity" || w[4] != "signature")
        throw ParseError("expected header 'scheme <name> arity <n> signature <file>'", line);
      doc.name = w[1];
      try {
        std::size_t used = 0;
        doc.arity = std::stoll(w[3], &used);
        if (used != w[3].size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw ParseError("arity must be an integer", line);
      }
      doc.signature_ref = w[5];
      have_header = true;
      continue;
    }
    if (w[0] == "node") {
      if (w.size() < 4) throw ParseError("incomplete node line", line);
      NodeDecl n{w[1], Halt{}, line};
      if (w[2] == "function") {
        if (w.size() < 6 || w[4] != "<=") throw ParseError("expected 'node <id> function x<j> <= <term>'", line);
        VarIndex j = detail::with_line(line, [&] { return detail::parse_variable(w[3]); });
        Term t = detail::with_line(line, [&] { return parse_term(detail::rest_after(content, 5)); });
        n.label = Assign{j, t};
      } else if (w[2] == "predicate") {
        n.label = Test{detail::with_line(line, [&] { return parse_formula(detail::rest_after(content, 3)); })};
      } else if (w[2] == "terminal") {
        if (w.size() != 4) throw ParseError("expected 'node <id> terminal <k>'", line);
        auto k = Natural::parse(w[3]);
        if (!k) throw ParseError("terminal label must be a natural number, got '" + w[3] + "'", line);
        n.label = Halt{*k};
      } else {
        throw ParseError("unknown node type '" + w[2] + "'", line);
      }
      doc.nodes.push_back(std::move(n));
    } else if (w[0] == "edge") {
      EdgeDecl e{};
      e.line = line;
      if (w.size() == 4 && w[2] == "->") {
        e = {w[1], w[3], EdgeLabel::None, line};
      } else if (w.size() == 6 && w[2] == "->" && w[4] == "label" && (w[5] == "0" || w[5] == "1")) {
        e = {w[1], w[3], w[5] == "1" ? EdgeLabel::One : EdgeLabel::Zero, line};
      } else {
        throw ParseError("expected 'edge <from> -> <to> [label 1|0]'", line);
      }
      doc.edges.push_back(std::move(e));
    } else if (w[0] == "initial") {
      if (w.size() != 2) throw ParseError("expected 'initial <id>'", line);
      doc.initial.push_back(w[1]);
    } else {
      throw ParseError("unknown directive '" + w[0] + "'", line);
    }
  }
  if (!have_header) throw ParseError("missing scheme header");
  return doc;
}

// ---------------------------------------------------------------------------
// Validated scheme

/// A well-formed program scheme: every node reachable from the initial node, out-degrees
/// and edge labels as required by node type, labels over the declared signature.
/// Nodes are kept sorted by id.
class Scheme {
 public:
  const std::string& name() const noexcept { return name_; }
  unsigned arity() const noexcept { return arity_; }
  const Signature& signature() const noexcept { return *signature_; }
  const std::string& signature_ref() const noexcept { return signature_ref_; }
  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  const Node& node(std::size_t i) const { return nodes_.at(i); }
  std::size_t initial() const noexcept { return initial_; }
  std::size_t size() const noexcept { return nodes_.size(); }

  std::optional<std::size_t> find(const std::string& id) const {
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), id,
                               [](const Node& n, const std::string& key) { return n.id < key; });
    if (it == nodes_.end() || it->id != id) return std::nullopt;
    return static_cast<std::size_t>(it - nodes_.begin());
  }

 private:
  friend Scheme validate(const SchemeDocument&, const Signature&);

  std::string name_;
  unsigned arity_ = 1;
  std::shared_ptr<const Signature> signature_;
  std::string signature_ref_;
  std::vector<Node> nodes_;
  std::size_t initial_ = 0;
};

/// Checks a parsed document against the well-formedness rules and the signature.
/// Throws ValidationError listing every violation found.
inline Scheme validate(const SchemeDocument& doc, const Signature& signature) {
  std::vector<Violation> errs;
  auto fail = [&](std::string node, std::string msg) { errs.push_back({std::move(node), std::move(msg)}); };

  if (doc.arity < 1) fail("", "arity must be at least 1");
  if (doc.arity > 1'000'000) fail("", "arity too large");

  std::map<std::string, const NodeDecl*> by_id;
  for (const auto& n : doc.nodes)
    if (!by_id.emplace(n.id, &n).second) fail(n.id, "duplicate node id");
  if (doc.nodes.empty()) fail("", "scheme has no nodes");

  for (const auto& [id, n] : by_id) {
    if (const auto* a = std::get_if<Assign>(&n->label)) {
      if (auto err = check_symbols(a->term, signature)) fail(id, *err);
    } else if (const auto* t = std::get_if<Test>(&n->label)) {
      if (auto err = check_symbols(t->formula, signature)) fail(id, *err);
    }
  }

  struct Out {
    std::vector<const EdgeDecl*> edges;
  };
  std::map<std::string, Out> out;
  for (const auto& e : doc.edges) {
    bool ok = true;
    if (!by_id.count(e.from)) {
      fail(e.from, "edge from undeclared node (line " + std::to_string(e.line) + ")");
      ok = false;
    }
    if (!by_id.count(e.to)) {
      fail(e.from, "edge to undeclared node '" + e.to + "' (line " + std::to_string(e.line) + ")");
      ok = false;
    }
    if (ok) out[e.from].edges.push_back(&e);
  }

  for (const auto& [id, n] : by_id) {
    const auto& edges = out[id].edges;
    switch (kind_of(n->label)) {
      case NodeKind::Function:
        if (edges.size() != 1) {
          fail(id, "out-degree: function node needs exactly one outgoing edge, has " + std::to_string(edges.size()));
        } else if (edges[0]->label != EdgeLabel::None) {
          fail(id, "function node edge must not be labeled");
        }
        break;
      case NodeKind::Predicate: {
        if (edges.size() != 2)
          fail(id, "out-degree: predicate node needs exactly two outgoing edges, has " + std::to_string(edges.size()));
        int ones = 0, zeros = 0, unlabeled = 0;
        for (const auto* e : edges) {
          ones += e->label == EdgeLabel::One;
          zeros += e->label == EdgeLabel::Zero;
          unlabeled += e->label == EdgeLabel::None;
        }
        if (unlabeled) fail(id, "predicate node edge without label");
        if (ones > 1 || zeros > 1) {
          fail(id, "duplicate edge label");
        } else {
          if (ones == 0) fail(id, "missing edge label 1");
          if (zeros == 0) fail(id, "missing edge label 0");
        }
        break;
      }
      case NodeKind::Terminal:
        if (!edges.empty()) fail(id, "terminal node has outgoing edges");
        break;
    }
  }

  std::string initial;
  if (doc.initial.empty()) {
    fail("", "no initial node");
  } else if (doc.initial.size() > 1) {
    fail("", "more than one initial node");
  } else if (!by_id.count(doc.initial.front())) {
    fail(doc.initial.front(), "initial node is not declared");
  } else {
    initial = doc.initial.front();
  }

  if (!errs.empty()) throw ValidationError(std::move(errs));

  Scheme s;
  s.name_ = doc.name;
  s.arity_ = static_cast<unsigned>(doc.arity);
  s.signature_ = std::make_shared<const Signature>(signature);
  s.signature_ref_ = doc.signature_ref;
  std::map<std::string, std::size_t> index;
  for (const auto& [id, n] : by_id) {
    index.emplace(id, s.nodes_.size());
    s.nodes_.push_back(Node{id, n->label});
  }
  for (auto& node : s.nodes_) {
    for (const auto* e : out[node.id].edges) {
      std::size_t to = index.at(e->to);
      if (e->label == EdgeLabel::None) node.next = to;
      if (e->label == EdgeLabel::One) node.on_true = to;
      if (e->label == EdgeLabel::Zero) node.on_false = to;
    }
  }
  s.initial_ = index.at(initial);

  std::vector<char> seen(s.nodes_.size(), 0);
  std::vector<std::size_t> stack{s.initial_};
  seen[s.initial_] = 1;
  while (!stack.empty()) {
    const Node& n = s.nodes_[stack.back()];
    stack.pop_back();
    for (std::size_t to : {n.next, n.on_true, n.on_false})
      if (to != kNoNode && !seen[to]) {
        seen[to] = 1;
        stack.push_back(to);
      }
  }
  for (std::size_t i = 0; i < seen.size(); ++i)
    if (!seen[i]) errs.push_back({s.nodes_[i].id, "unreachable from the initial node"});
  if (!errs.empty()) throw ValidationError(std::move(errs));
  return s;
}

inline Scheme parse_scheme(const std::string& text, const Signature& signature) {
  return validate(parse_scheme_document(text), signature);
}

/// Back to the raw document form (node ids sorted, predicate edges 1 then 0).
inline SchemeDocument to_document(const Scheme& s) {
  SchemeDocument doc;
  doc.name = s.name();
  doc.arity = s.arity();
  doc.signature_ref = s.signature_ref();
  for (const auto& n : s.nodes()) {
    doc.nodes.push_back({n.id, n.label, 0});
    switch (n.kind()) {
      case NodeKind::Function:
        doc.edges.push_back({n.id, s.node(n.next).id, EdgeLabel::None, 0});
        break;
      case NodeKind::Predicate:
        doc.edges.push_back({n.id, s.node(n.on_true).id, EdgeLabel::One, 0});
        doc.edges.push_back({n.id, s.node(n.on_false).id, EdgeLabel::Zero, 0});
        break;
      case NodeKind::Terminal:
        break;
    }
  }
  doc.initial.push_back(s.node(s.initial()).id);
  return doc;
}

inline std::string save_scheme(const SchemeDocument& doc) {
  std::ostringstream out;
  out << "scheme " << doc.name << " arity " << doc.arity << " signature " << doc.signature_ref << '\n';
  for (const auto& n : doc.nodes) {
    out << "node " << n.id << ' ';
    if (const auto* a = std::get_if<Assign>(&n.label))
      out << "function x" << a->target << " <= " << to_string(a->term);
    else if (const auto* t = std::get_if<Test>(&n.label))
      out << "predicate " << to_string(t->formula);
    else
      out << "terminal " << std::get<Halt>(n.label).value;
    out << '\n';
  }
  for (const auto& e : doc.edges) {
    out << "edge " << e.from << " -> " << e.to;
    if (e.label != EdgeLabel::None) out << " label " << to_string(e.label);
    out << '\n';
  }
  for (const auto& i : doc.initial) out << "initial " << i << '\n';
  return out.str();
}

inline std::string save_scheme(const Scheme& s) { return save_scheme(to_document(s)); }

// ---------------------------------------------------------------------------
// Programmatic construction

/// Convenience builder producing a SchemeDocument and validating it.
class SchemeBuilder {
 public:
  SchemeBuilder(std::string name, long long arity, std::string signature_ref = "ring.sig") {
    doc_.name = std::move(name);
    doc_.arity = arity;
    doc_.signature_ref = std::move(signature_ref);
  }

  SchemeBuilder& function(std::string id, VarIndex target, const Term& t, std::string next) {
    doc_.nodes.push_back({id, Assign{target, t}, 0});
    doc_.edges.push_back({std::move(id), std::move(next), EdgeLabel::None, 0});
    return *this;
  }
  SchemeBuilder& function(std::string id, VarIndex target, std::string_view term, std::string next) {
    return function(std::move(id), target, parse_term(term), std::move(next));
  }

  SchemeBuilder& predicate(std::string id, const Formula& f, std::string on_true, std::string on_false) {
    doc_.nodes.push_back({id, Test{f}, 0});
    doc_.edges.push_back({id, std::move(on_true), EdgeLabel::One, 0});
    doc_.edges.push_back({std::move(id), std::move(on_false), EdgeLabel::Zero, 0});
    return *this;
  }
  SchemeBuilder& predicate(std::string id, std::string_view formula, std::string on_true, std::string on_false) {
    return predicate(std::move(id), parse_formula(formula), std::move(on_true), std::move(on_false));
  }

  SchemeBuilder& terminal(std::string id, Natural value) {
    doc_.nodes.push_back({std::move(id), Halt{std::move(value)}, 0});
    return *this;
  }

  SchemeBuilder& initial(std::string id) {
    doc_.initial.push_back(std::move(id));
    return *this;
  }

  SchemeDocument& document() noexcept { return doc_; }

  Scheme build(const Signature& signature) const { return validate(doc_, signature); }

 private:
  SchemeDocument doc_;
};

// ---------------------------------------------------------------------------
// Queries

struct SchemeClass {
  bool is_computation = false;
  bool is_tree = false;
  bool is_finite_tree = false;  // stored graphs are finite, so this equals is_tree

  friend bool operator==(const SchemeClass&, const SchemeClass&) = default;
};

inline SchemeClass classify(const Scheme& s) {
  SchemeClass c;
  c.is_computation = std::all_of(s.nodes().begin(), s.nodes().end(), [](const Node& n) {
    if (const auto* a = std::get_if<Assign>(&n.label)) return is_primitive_term(a->term);
    if (const auto* t = std::get_if<Test>(&n.label)) return is_primitive_formula(t->formula);
    return true;
  });
  // Every node reachable (guaranteed by validation); a tree iff the root has no incoming
  // edge and every other node exactly one.
  std::vector<std::size_t> indegree(s.size(), 0);
  for (const auto& n : s.nodes())
    for (std::size_t to : {n.next, n.on_true, n.on_false})
      if (to != kNoNode) ++indegree[to];
  bool tree = indegree[s.initial()] == 0;
  for (std::size_t i = 0; i < s.size() && tree; ++i)
    if (i != s.initial() && indegree[i] != 1) tree = false;
  c.is_tree = tree;
  c.is_finite_tree = tree;
  return c;
}

/// Variable indices read or written by any node, plus the inputs 0..n-1.
/// Bound variables are excluded: they never live in a register.
inline std::vector<VarIndex> used_registers(const Scheme& s) {
  std::set<VarIndex> regs;
  for (VarIndex i = 0; i < s.arity(); ++i) regs.insert(i);
  for (const auto& n : s.nodes()) {
    if (const auto* a = std::get_if<Assign>(&n.label)) {
      regs.insert(a->target);
      regs.insert(a->term.variables().begin(), a->term.variables().end());
    } else if (const auto* t = std::get_if<Test>(&n.label)) {
      regs.insert(t->formula.free_vars().begin(), t->formula.free_vars().end());
    }
  }
  return {regs.begin(), regs.end()};
}

}  // namespace schemetree
