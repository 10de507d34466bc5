#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "schemetree/oracle.hpp"
#include "schemetree/scheme.hpp"
#include "schemetree/symbolic.hpp"

namespace schemetree {

/// Persistent list of path-condition formulas; children share their parent's tail.
class PiList {
 public:
  PiList() = default;

  PiList push(Formula f) const {
    PiList out;
    out.head_ = std::make_shared<const Link>(Link{std::move(f), head_, size() + 1});
    return out;
  }

  std::size_t size() const noexcept { return head_ ? head_->length : 0; }

  /// Most recent formula; the list must be nonempty.
  const Formula& back() const { return head_->formula; }

  /// Formulas in path order.
  std::vector<Formula> to_vector() const {
    std::vector<Formula> out;
    out.reserve(size());
    for (const Link* l = head_.get(); l; l = l->parent.get()) out.push_back(l->formula);
    std::reverse(out.begin(), out.end());
    return out;
  }

 private:
  struct Link {
    Formula formula;
    std::shared_ptr<const Link> parent;
    std::size_t length;
  };
  std::shared_ptr<const Link> head_;
};

enum class UnrollStatus : std::uint8_t { Open, Expanded, Pruned, CompletedTerminal };

/// A node of the tree unrolling of a scheme.
struct UnrollNode {
  std::size_t scheme_node = 0;
  SymbolicState state{1};
  PiList pi_prefix;
  std::size_t depth = 0;
  std::size_t parent = kNoNode;  // position of the parent in the stream
  EdgeLabel edge = EdgeLabel::None;  // label of the edge from the parent
  UnrollStatus status = UnrollStatus::Open;
};

/// Children of an unroll node in edge order (1 before 0 for predicates).
inline std::vector<UnrollNode> unroll_children(const Scheme& s, const UnrollNode& n, std::size_t position) {
  const Node& node = s.node(n.scheme_node);
  std::vector<UnrollNode> out;
  auto child = [&](std::size_t target, EdgeLabel e) {
    auto [state, f] = symbolic_step(n.state, node, e);
    UnrollNode c;
    c.scheme_node = target;
    c.state = std::move(state);
    c.pi_prefix = f ? n.pi_prefix.push(std::move(*f)) : n.pi_prefix;
    c.depth = n.depth + 1;
    c.parent = position;
    c.edge = e;
    out.push_back(std::move(c));
  };
  switch (node.kind()) {
    case NodeKind::Function:
      child(node.next, EdgeLabel::None);
      break;
    case NodeKind::Predicate:
      child(node.on_true, EdgeLabel::One);
      child(node.on_false, EdgeLabel::Zero);
      break;
    case NodeKind::Terminal:
      break;
  }
  return out;
}

/// Breadth-first stream over R(S), the tree unrolling of S. Infinite for cyclic
/// schemes; the consumer decides when to stop.
class Unroller {
 public:
  explicit Unroller(const Scheme& s) : scheme_(&s) {
    UnrollNode root;
    root.scheme_node = s.initial();
    root.state = SymbolicState::initial(s.arity(), used_registers(s));
    queue_.push_back(std::move(root));
  }
  explicit Unroller(Scheme&&) = delete;  // keeps a pointer to the scheme

  std::optional<UnrollNode> next() {
    if (queue_.empty()) return std::nullopt;
    UnrollNode n = std::move(queue_.front());
    queue_.pop_front();
    for (auto& c : unroll_children(*scheme_, n, emitted_)) queue_.push_back(std::move(c));
    n.status = UnrollStatus::Expanded;
    ++emitted_;
    return n;
  }

 private:
  const Scheme* scheme_;
  std::deque<UnrollNode> queue_;
  std::size_t emitted_ = 0;
};

// ---------------------------------------------------------------------------
// R(S, K)

struct TreeifyLimits {
  std::size_t max_nodes = 100000;
  std::size_t max_depth = 10000;
};

struct TreeifyReport {
  std::optional<Scheme> result;
  std::string failure;  // empty on success
  std::size_t nodes_explored = 0;
  std::size_t leaves = 0;
  std::size_t max_depth = 0;
  std::size_t unresolved_branches = 0;
  std::vector<std::string> completion_nodes;  // ids of the added terminals labeled 0
  std::vector<Formula> diagnostic_pi;         // path condition of the deepest open branch on failure

  bool success() const noexcept { return result.has_value(); }
};

/// Builds R(S, K): the unrolling of S restricted to branches whose path condition the
/// oracle finds satisfiable, with each predicate that lost one branch given a new
/// terminal labeled 0 on the missing edge. Expansion is breadth-first. Branches the
/// oracle cannot decide are kept and counted as unresolved; any unresolved leaf makes
/// the run fail, as does exceeding `limits`.
inline TreeifyReport treeify(const Scheme& s, const WitnessOracle& oracle, const TreeifyLimits& limits = {}) {
  if (oracle.arity() != s.arity()) throw Error("oracle arity does not match scheme arity");

  struct TreeNode {
    NodeLabel label;
    std::size_t next = kNoNode, on_true = kNoNode, on_false = kNoNode;
    std::size_t depth = 0;
    bool completion = false;
  };
  struct Work {
    UnrollNode node;
    WitnessOracle::State state;
    bool unresolved = false;
    std::size_t tree_index = 0;
  };

  TreeifyReport report;
  std::vector<TreeNode> tree;
  std::deque<Work> queue;

  UnrollNode root;
  root.scheme_node = s.initial();
  root.state = SymbolicState::initial(s.arity(), used_registers(s));
  tree.push_back({s.node(s.initial()).label});
  queue.push_back({std::move(root), oracle.root(), false, 0});

  auto fail = [&](std::string why, const Work& deepest) {
    report.failure = std::move(why);
    report.diagnostic_pi = deepest.node.pi_prefix.to_vector();
    report.result.reset();
    return report;
  };

  std::size_t unresolved_leaves = 0;
  while (!queue.empty()) {
    Work w = std::move(queue.front());
    queue.pop_front();
    ++report.nodes_explored;
    report.max_depth = std::max(report.max_depth, w.node.depth);
    const Node& node = s.node(w.node.scheme_node);
    if (node.kind() == NodeKind::Terminal) {
      if (w.unresolved) ++unresolved_leaves;
      continue;
    }
    auto children = unroll_children(s, w.node, w.tree_index);
    if (w.node.depth + 1 > limits.max_depth) {
      report.unresolved_branches = unresolved_leaves;
      return fail("max_depth " + std::to_string(limits.max_depth) +
                      " exceeded: the scheme may not be total relative to the class, the class may not be "
                      "compact, or the limit is too small",
                  w);
    }
    const std::size_t parent = w.tree_index;
    for (auto& c : children) {
      WitnessOracle::State state = w.state;
      bool unresolved = w.unresolved;
      if (c.edge != EdgeLabel::None) {
        state = oracle.refine(w.state, c.pi_prefix.back());
        SatVerdict v = oracle.verdict(state);
        if (is_unsat(v)) {
          TreeNode done{Halt{Natural(0)}};
          done.depth = c.depth;
          done.completion = true;
          tree.push_back(std::move(done));
          (c.edge == EdgeLabel::One ? tree[parent].on_true : tree[parent].on_false) = tree.size() - 1;
          report.max_depth = std::max(report.max_depth, c.depth);
          continue;
        }
        if (is_unknown(v)) unresolved = true;
      }
      TreeNode t{s.node(c.scheme_node).label};
      t.depth = c.depth;
      tree.push_back(std::move(t));
      const std::size_t idx = tree.size() - 1;
      if (c.edge == EdgeLabel::None) tree[parent].next = idx;
      if (c.edge == EdgeLabel::One) tree[parent].on_true = idx;
      if (c.edge == EdgeLabel::Zero) tree[parent].on_false = idx;
      queue.push_back({std::move(c), std::move(state), unresolved, idx});
    }
    if (tree.size() > limits.max_nodes) {
      report.unresolved_branches = unresolved_leaves;
      return fail("max_nodes " + std::to_string(limits.max_nodes) +
                      " exceeded: the scheme may not be total relative to the class, the class may not be "
                      "compact, or the limit is too small",
                  queue.empty() ? w : queue.back());
    }
  }

  report.unresolved_branches = unresolved_leaves;
  if (unresolved_leaves > 0) {
    report.failure = std::to_string(unresolved_leaves) + " branch(es) could not be decided by the oracle";
    return report;
  }

  // Ids follow breadth-first order; zero padding keeps id order equal to it.
  const std::size_t width = std::to_string(tree.size() - 1).size();
  auto id_of = [&](std::size_t i) {
    std::string digits = std::to_string(i);
    return "n" + std::string(width - digits.size(), '0') + digits;
  };
  SchemeDocument doc;
  doc.name = s.name() + "_tree";
  doc.arity = s.arity();
  doc.signature_ref = s.signature_ref();
  for (std::size_t i = 0; i < tree.size(); ++i) {
    const TreeNode& t = tree[i];
    doc.nodes.push_back({id_of(i), t.label, 0});
    if (t.next != kNoNode) doc.edges.push_back({id_of(i), id_of(t.next), EdgeLabel::None, 0});
    if (t.on_true != kNoNode) doc.edges.push_back({id_of(i), id_of(t.on_true), EdgeLabel::One, 0});
    if (t.on_false != kNoNode) doc.edges.push_back({id_of(i), id_of(t.on_false), EdgeLabel::Zero, 0});
    if (kind_of(t.label) == NodeKind::Terminal) ++report.leaves;
    if (t.completion) report.completion_nodes.push_back(id_of(i));
  }
  doc.initial.push_back(id_of(0));
  report.result = validate(doc, s.signature());
  return report;
}

inline std::string format_report(const TreeifyReport& r) {
  std::ostringstream out;
  out << "status: " << (r.success() ? "success" : "failure") << '\n';
  out << "nodes_explored: " << r.nodes_explored << '\n';
  out << "leaves: " << r.leaves << '\n';
  out << "max_depth: " << r.max_depth << '\n';
  out << "unresolved: " << r.unresolved_branches << '\n';
  out << "completions: " << r.completion_nodes.size() << '\n';
  if (!r.success()) {
    out << "failure: " << r.failure << '\n';
    out << "deepest_open_pi_length: " << r.diagnostic_pi.size() << '\n';
    if (!r.diagnostic_pi.empty()) out << "deepest_open_pi_last: " << to_string(r.diagnostic_pi.back()) << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Non-compact classes

using FormulaFamily = std::function<Formula(std::size_t)>;

/// The first `prefix_len` links of a chain of tests phi_1, phi_2, ...: edge 1 of phi_i
/// leads to phi_{i+1}, edge 0 to a terminal labeled 0, and edge 1 of the last test to a
/// terminal labeled 0 closing the truncated chain.
inline Scheme counterexample_scheme(const FormulaFamily& formulas, std::size_t prefix_len, unsigned arity,
                                    const Signature& signature, std::string name = "chain",
                                    std::string signature_ref = "ring.sig") {
  if (prefix_len < 1) throw Error("prefix length must be at least 1");
  const std::size_t width = std::to_string(prefix_len).size();
  auto pad = [&](std::size_t i) {
    std::string d = std::to_string(i);
    return std::string(width - d.size(), '0') + d;
  };
  SchemeBuilder b(std::move(name), arity, std::move(signature_ref));
  for (std::size_t i = 1; i <= prefix_len; ++i) {
    Formula f = formulas(i);
    if (!f.free_vars().empty() && f.free_vars().back() >= arity)
      throw Error("formula " + std::to_string(i) + " has free variables outside x0..x" + std::to_string(arity - 1));
    b.predicate("p" + pad(i), f, i == prefix_len ? "end" : "p" + pad(i + 1), "z" + pad(i));
    b.terminal("z" + pad(i), 0);
  }
  b.terminal("end", 0);
  b.initial("p" + pad(1));
  return b.build(signature);
}

/// "There are at least k distinct elements", a sentence using bound variables
/// x_first..x_{first+k-1}. Each new witness is checked against the earlier ones as soon
/// as it is chosen, which keeps evaluation close to a k-permutation search.
inline Formula distinct_elements_formula(std::size_t k, VarIndex first = 1) {
  if (k < 1) throw Error("distinct_elements_formula needs k >= 1");
  auto var = [&](std::size_t j) { return Term::var(static_cast<VarIndex>(first + j - 1)); };
  auto fresh_constraint = [&](std::size_t j) {
    if (j == 1) return Formula::equal(var(1), var(1));
    Formula c = Formula::negation(Formula::equal(var(j), var(1)));
    for (std::size_t i = 2; i < j; ++i) c = Formula::conjunction(c, Formula::negation(Formula::equal(var(j), var(i))));
    return c;
  };
  Formula body = fresh_constraint(k);
  body = Formula::exists(static_cast<VarIndex>(first + k - 1), body);
  for (std::size_t j = k - 1; j >= 1; --j)
    body = Formula::exists(static_cast<VarIndex>(first + j - 1), Formula::conjunction(fresh_constraint(j), body));
  return body;
}

}  // namespace schemetree
