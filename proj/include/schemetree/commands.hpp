#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "schemetree/dot.hpp"
#include "schemetree/equivalence.hpp"
#include "schemetree/executor.hpp"
#include "schemetree/oracle.hpp"
#include "schemetree/symbolic.hpp"
#include "schemetree/treeifier.hpp"
#include "schemetree/workspace.hpp"

// Implementations of the command-line subcommands. Each returns the process exit code:
// 0 success, 1 negative verdict (not total, not equivalent, treeify failure),
// 2 input error.

namespace schemetree::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitNegative = 1;
inline constexpr int kExitInput = 2;

struct GlobalOptions {
  std::string root = ".";
  std::optional<unsigned> seed;  // reserved for randomized tooling; commands are deterministic
  std::size_t max_nodes = TreeifyLimits{}.max_nodes;
  std::size_t max_depth = TreeifyLimits{}.max_depth;
};

/// Either one structure file or a class manifest.
struct ClassSource {
  std::string class_ref;
  std::string structure_ref;
};

namespace detail {

inline std::vector<Structure> load_class(Workspace& ws, const ClassSource& src) {
  if (!src.class_ref.empty() && !src.structure_ref.empty())
    throw Error("give either --class or --structure, not both");
  if (!src.class_ref.empty()) return ws.structure_class(src.class_ref);
  if (!src.structure_ref.empty()) return {ws.structure(src.structure_ref)};
  throw Error("a class (--class) or a structure (--structure) is required");
}

inline void require_signature(const Scheme& s, const std::vector<Structure>& k) {
  for (const auto& u : k)
    if (!u.signature().compatible(s.signature()))
      throw Error("structure " + u.name() + " does not interpret the signature of scheme " + s.name());
}

inline void write_or_print(const std::string& path, const std::string& content, Workspace& ws) {
  if (!path.empty()) write_file(ws.resolve(path), content);
}

template <class Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const ValidationError& e) {
    err << "error: invalid scheme\n";
    for (const auto& v : e.violations())
      err << "  " << (v.node.empty() ? std::string() : "node " + v.node + ": ") << v.message << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------

inline int command_validate(const GlobalOptions& g, const std::vector<std::string>& paths, std::ostream& out,
                            std::ostream& err) {
  Workspace ws(g.root);
  int code = kExitOk;
  for (const auto& p : paths) {
    int rc = detail::guarded(err, [&] {
      std::string text = read_file(ws.resolve(p));
      auto lines = schemetree::detail::content_lines(text);
      std::string kind = lines.empty() ? "" : lines.front().words.front();
      if (kind == "scheme") {
        Scheme s = ws.scheme(p);
        SchemeClass c = classify(s);
        out << p << ": ok (scheme " << s.name() << ", " << s.size() << " nodes, arity " << s.arity()
            << (c.is_computation ? ", computation" : "") << (c.is_tree ? ", finite tree" : "") << ")\n";
      } else if (kind == "structure") {
        Structure u = ws.structure(p);
        out << p << ": ok (structure " << u.name() << ", " << u.size() << " elements)\n";
      } else if (kind == "signature") {
        const Signature& sig = ws.signature(p);
        out << p << ": ok (signature " << sig.name() << ", " << sig.symbols().size() << " symbols)\n";
      } else if (kind == "class") {
        auto k = ws.structure_class(p);
        out << p << ": ok (class of " << k.size() << " structures)\n";
      } else if (kind == "family") {
        auto f = ws.family(p);
        out << p << ": ok (family " << f.kind << " max " << f.bound << ")\n";
      } else {
        throw Error(p + ": unrecognized document type '" + kind + "'");
      }
      return kExitOk;
    });
    if (rc != kExitOk) {
      out << p << ": invalid\n";
      code = rc;
    }
  }
  return code;
}

struct RunOptions {
  std::string scheme;
  std::string structure;
  std::string input;
  bool explain = false;
};

inline int command_run(const GlobalOptions& g, const RunOptions& o, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    Workspace ws(g.root);
    Scheme s = ws.scheme(o.scheme);
    Structure u = ws.structure(o.structure);
    detail::require_signature(s, {u});
    Tuple input = parse_tuple(u, o.input);
    Outcome result = run(s, u, input);
    if (const auto* r = std::get_if<Output>(&result)) {
      out << "output " << r->value << '\n';
      out << "trace: " << format_trace(s, r->trace) << '\n';
    } else {
      const auto& d = std::get<Diverges>(result);
      out << "diverges\n";
      out << "prefix: " << format_trace(s, d.prefix) << '\n';
      out << "lasso: " << format_trace(s, d.lasso) << '\n';
    }
    if (o.explain) out << format_path_record(make_path_record(s, result));
    return kExitOk;
  });
}

struct TotalityOptions {
  std::string scheme;
  ClassSource source;
  bool table = false;
};

inline int command_totality(const GlobalOptions& g, const TotalityOptions& o, std::ostream& out,
                            std::ostream& err) {
  return detail::guarded(err, [&] {
    Workspace ws(g.root);
    Scheme s = ws.scheme(o.scheme);
    auto k = detail::load_class(ws, o.source);
    detail::require_signature(s, k);
    if (o.table)
      for (const auto& u : k) out << "# " << u.name() << '\n' << function_table_tsv(u, implemented_function(s, u));
    auto verdict = check_totality_class(s, k);
    if (!verdict) {
      out << "total\n";
      return kExitOk;
    }
    const Structure* u = nullptr;
    for (const auto& c : k)
      if (c.name() == verdict->structure) u = &c;
    out << "not total\n";
    out << "structure: " << verdict->structure << '\n';
    out << "input: " << format_tuple(*u, verdict->input) << '\n';
    out << "prefix: " << format_trace(s, verdict->run.prefix) << '\n';
    out << "lasso: " << format_trace(s, verdict->run.lasso) << '\n';
    return kExitNegative;
  });
}

struct TreeifyOptions {
  std::string scheme;
  ClassSource source;
  std::string family;  // "cyclic" or a family spec file
  std::size_t bound = 0;
  std::string out_scheme;
  std::string out_dot;
  std::string out_report;
};

inline WitnessOracle make_family_oracle(Workspace& ws, const std::string& family, std::size_t bound,
                                        const Signature& sig, unsigned arity) {
  FamilySpec spec{"cyclic", bound};
  if (family != "cyclic") {
    spec = ws.family(family);
    if (bound) spec.bound = bound;
  }
  if (spec.bound == 0) throw Error("a family needs a positive --bound");
  return WitnessOracle::for_family(cyclic_family(sig), spec.bound, arity, spec.kind);
}

inline int command_treeify(const GlobalOptions& g, const TreeifyOptions& o, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    Workspace ws(g.root);
    Scheme s = ws.scheme(o.scheme);
    std::optional<WitnessOracle> oracle;
    if (!o.family.empty()) {
      if (!o.source.class_ref.empty() || !o.source.structure_ref.empty())
        throw Error("give either a class or a family, not both");
      oracle = make_family_oracle(ws, o.family, o.bound, s.signature(), s.arity());
    } else {
      auto k = detail::load_class(ws, o.source);
      detail::require_signature(s, k);
      oracle = WitnessOracle::for_class(std::move(k), s.arity());
    }
    TreeifyReport r = treeify(s, *oracle, {g.max_nodes, g.max_depth});
    std::string report = format_report(r);
    out << report;
    detail::write_or_print(o.out_report, report, ws);
    if (!r.success()) return kExitNegative;
    detail::write_or_print(o.out_scheme, save_scheme(*r.result), ws);
    detail::write_or_print(o.out_dot, export_dot(*r.result), ws);
    return kExitOk;
  });
}

struct EquivOptions {
  std::string a;
  std::string b;
  ClassSource source;
};

inline int command_equiv(const GlobalOptions& g, const EquivOptions& o, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    Workspace ws(g.root);
    Scheme a = ws.scheme(o.a);
    Scheme b = ws.scheme(o.b);
    auto k = detail::load_class(ws, o.source);
    detail::require_signature(a, k);
    detail::require_signature(b, k);
    EquivVerdict v = strongly_equivalent(a, b, k);
    out << format_verdict(v, k);
    return std::holds_alternative<Equivalent>(v) ? kExitOk : kExitNegative;
  });
}

struct CounterexampleOptions {
  std::string family = "distinct";
  std::size_t prefix_len = 0;
  ClassSource source;
  std::size_t bound = 0;  // class Z_1..Z_bound when no class is given
  std::string signature = "ring.sig";
  std::string out_scheme;
  std::string out_tree;
  std::string out_dot;
  std::string out_report;
};

inline int command_counterexample(const GlobalOptions& g, const CounterexampleOptions& o, std::ostream& out,
                                  std::ostream& err) {
  return detail::guarded(err, [&] {
    Workspace ws(g.root);
    if (o.family != "distinct") throw Error("unknown formula family '" + o.family + "' (known: distinct)");
    std::vector<Structure> k;
    std::string sig_ref = o.signature;
    if (!o.source.class_ref.empty() || !o.source.structure_ref.empty()) {
      k = detail::load_class(ws, o.source);
    } else {
      if (o.bound == 0) throw Error("give a class (--class/--structure) or a cyclic bound (--bound)");
      auto gen = cyclic_family(ws.signature(sig_ref));
      for (std::size_t m = 1; m <= o.bound; ++m) k.push_back(gen(m));
    }
    Scheme chain = counterexample_scheme([](std::size_t i) { return distinct_elements_formula(i); }, o.prefix_len, 1,
                                         k.front().signature(), "chain" + std::to_string(o.prefix_len), sig_ref);
    detail::write_or_print(o.out_scheme, save_scheme(chain), ws);
    auto totality = check_totality_class(chain, k);
    out << "chain: " << o.prefix_len << " tests, " << chain.size() << " nodes\n";
    out << "class: " << k.size() << " structures\n";
    out << "totality: " << (totality ? "not total" : "total") << '\n';
    TreeifyReport r = treeify(chain, WitnessOracle::for_class(k, 1), {g.max_nodes, g.max_depth});
    std::string report = format_report(r);
    out << report;
    detail::write_or_print(o.out_report, report, ws);
    if (!r.success()) return kExitNegative;
    detail::write_or_print(o.out_tree, save_scheme(*r.result), ws);
    detail::write_or_print(o.out_dot, export_dot(*r.result), ws);
    return kExitOk;
  });
}

struct ExportDotOptions {
  std::string scheme;
  std::string out;
};

inline int command_export_dot(const GlobalOptions& g, const ExportDotOptions& o, std::ostream& out,
                              std::ostream& err) {
  return detail::guarded(err, [&] {
    Workspace ws(g.root);
    std::string dot = export_dot(ws.scheme(o.scheme));
    if (o.out.empty())
      out << dot;
    else
      write_file(ws.resolve(o.out), dot);
    return kExitOk;
  });
}

}  // namespace schemetree::cli
