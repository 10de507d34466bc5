#pragma once

#include <sstream>
#include <string>

#include "schemetree/scheme.hpp"

namespace schemetree {

namespace detail {

inline std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + '"';
}

}  // namespace detail

/// Graphviz rendering. Nodes in id order: boxes for function nodes, diamonds for
/// predicates, double circles for terminals; the initial node's label ends in " *".
inline std::string export_dot(const Scheme& s) {
  std::ostringstream out;
  out << "digraph " << detail::dot_quote(s.name()) << " {\n";
  out << "  comment=" << detail::dot_quote(classify(s).is_computation ? "computation" : "general") << ";\n";
  out << "  node [fontname=\"monospace\"];\n";
  for (std::size_t i = 0; i < s.size(); ++i) {
    const Node& n = s.node(i);
    std::string label = to_string(n.label);
    if (i == s.initial()) label += " *";
    const char* shape = n.kind() == NodeKind::Function    ? "box"
                        : n.kind() == NodeKind::Predicate ? "diamond"
                                                          : "doublecircle";
    out << "  " << detail::dot_quote(n.id) << " [shape=" << shape << ", label=" << detail::dot_quote(label)
        << "];\n";
  }
  for (const auto& n : s.nodes()) {
    switch (n.kind()) {
      case NodeKind::Function:
        out << "  " << detail::dot_quote(n.id) << " -> " << detail::dot_quote(s.node(n.next).id) << ";\n";
        break;
      case NodeKind::Predicate:
        out << "  " << detail::dot_quote(n.id) << " -> " << detail::dot_quote(s.node(n.on_true).id)
            << " [label=\"1\"];\n";
        out << "  " << detail::dot_quote(n.id) << " -> " << detail::dot_quote(s.node(n.on_false).id)
            << " [label=\"0\"];\n";
        break;
      case NodeKind::Terminal:
        break;
    }
  }
  out << "}\n";
  return out.str();
}

}  // namespace schemetree
