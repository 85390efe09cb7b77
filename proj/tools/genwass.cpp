// genwass: command-line front end for the generalized Wasserstein toolkit.
//
// Exit status: 0 pass, 1 verification failure, 2 input error.

#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "genwass/duality.hpp"
#include "genwass/error.hpp"
#include "genwass/gh.hpp"
#include "genwass/io.hpp"
#include "genwass/measures.hpp"
#include "genwass/quotient_isometry.hpp"
#include "genwass/solver_w1.hpp"
#include "genwass/solver_wp.hpp"
#include "genwass/verification.hpp"

namespace {

using genwass::Error;
using genwass::ErrorCode;
using genwass::io::json;

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kInputError = 2;

struct Options {
  std::string command;
  std::string input;
  std::string format = "text";
  std::optional<std::string> mode;
  std::optional<std::string> tol;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> report;
  genwass::io::ParamOverrides overrides;
};

// JSON mode: the document goes to stdout and the human summary to stderr.
class Output {
 public:
  explicit Output(const Options& opts) : json_(opts.format == "json") {}

  void line(const std::string& text) { (json_ ? std::cerr : std::cout) << text << '\n'; }
  void emit(const json& doc) {
    if (json_) std::cout << doc.dump(2) << '\n';
  }

 private:
  bool json_;
};

template <class T>
std::string fmt(const T& x) {
  return genwass::format_scalar(x);
}

template <class T>
std::string fmt_vector(const std::vector<T>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + fmt(v[i]);
  return out + "]";
}

template <class T>
std::string fmt_matrix(const genwass::DenseMatrix<T>& m, const genwass::FiniteMetricSpace<T>& space) {
  std::ostringstream out;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    out << "  " << space.label(i) << ":";
    for (std::size_t j = 0; j < m.cols(); ++j) out << ' ' << fmt(m(i, j));
    if (i + 1 < m.rows()) out << '\n';
  }
  return out.str();
}

template <class T>
T tolerance_for(const Options& opts, const T& scale) {
  if (opts.tol) return genwass::parse_scalar<T>(*opts.tol);
  return genwass::tolerance<T>(1e-9) * (T(1) + genwass::abs_value<T>(scale));
}

std::string certificate_text(const genwass::OptimalityCertificate& cert) {
  static const char* names[4] = {"i", "ii", "iii", "iv"};
  std::string out;
  for (int k = 0; k < 4; ++k)
    out += std::string(k ? ", " : "") + "(" + names[k] + ") " + (cert.conditions[static_cast<std::size_t>(k)] ? "true" : "false");
  for (const auto& v : cert.violations) out += "\n  violation (" + std::string(names[v.condition - 1]) + "): " + v.detail;
  return out;
}

template <class T>
int cmd_solve(const Options& opts, const genwass::io::Problem<T>& prob, Output& out) {
  const bool with_plan = opts.command != "dist";
  const bool with_dual = opts.command == "dual";
  if (with_dual && prob.params.p != 1.0)
    throw Error(ErrorCode::InvalidParams, "InvalidParams: dual potentials exist only for p = 1");
  auto report = genwass::solve(prob.mu, prob.nu, prob.params);
  out.line("value: " + fmt(report.value));
  if (with_plan) {
    out.line("transported mass: " + fmt(report.transported_mass) + " (destroyed " + fmt(report.destroyed_mass) +
             ", created " + fmt(report.created_mass) + ")");
    out.line("plan:\n" + fmt_matrix(report.plan.gamma, prob.space));
  }
  if (with_dual) {
    out.line("phi1: " + fmt_vector(report.potentials->phi1));
    out.line("phi2: " + fmt_vector(report.potentials->phi2));
    out.line("gap: " + fmt(*report.duality_gap));
  }
  out.emit(genwass::io::report_to_json(report, with_plan, with_dual));
  return kPass;
}

template <class T>
int cmd_flat(const Options&, const genwass::io::Problem<T>& prob, Output& out) {
  auto flat = genwass::solve_flat(prob.mu, prob.nu, prob.params);
  out.line("flat value: " + fmt(flat.value));
  out.line("f: " + fmt_vector(flat.witness.f));
  out.emit({{"flat_value", genwass::io::scalar_to_json(flat.value)},
            {"f", genwass::io::vector_to_json(flat.witness.f)},
            {"pivots", flat.pivots}});
  return kPass;
}

// Plan and potentials come from --report, else from the problem file, else from
// the solver. A plan without potentials gets potentials recovered from it; that
// recovery fails exactly when the plan is not optimal.
template <class T>
int cmd_verify(const Options& opts, const json& doc, const genwass::io::Problem<T>& prob, Output& out) {
  if (prob.params.p != 1.0) throw Error(ErrorCode::InvalidParams, "InvalidParams: verify requires p = 1");
  const std::size_t n = prob.space.size();
  json source = doc;
  if (opts.report) source = genwass::io::read_json_file(*opts.report);

  std::optional<genwass::TransportPlan<T>> plan;
  std::optional<genwass::DualPotentials<T>> pots;
  if (source.contains("plan"))
    plan = genwass::TransportPlan<T>{prob.space, genwass::io::parse_matrix<T>(source["plan"], n, "plan")};
  if (source.contains("phi1") && !source["phi1"].is_null() && source.contains("phi2") && !source["phi2"].is_null())
    pots = genwass::DualPotentials<T>{genwass::io::parse_vector<T>(source["phi1"], n, "phi1"),
                                      genwass::io::parse_vector<T>(source["phi2"], n, "phi2"), prob.params};
  if (!plan) {
    auto report = genwass::solve_w1(prob.mu, prob.nu, prob.params);
    plan = report.plan;
    if (!pots) pots = *report.potentials;
  }
  const T scale = prob.mu.mass() + prob.nu.mass();
  const T tol = tolerance_for(opts, scale);
  if (!pots) {
    genwass::check_submarginal(*plan, prob.mu, prob.nu, tol);
    try {
      pots = genwass::detail::recover_potentials(prob.space, prob.mu, prob.nu, plan->gamma, prob.params);
    } catch (const Error& e) {
      out.line("verification failed: " + std::string(e.what()));
      out.emit({{"passed", false}, {"detail", e.what()}});
      return kFail;
    }
  }
  auto cert = genwass::verify_optimality(prob.mu, prob.nu, prob.params, *plan, *pots, tol);
  out.line("certificate: " + certificate_text(cert));
  out.line(cert.passed() ? "optimality verified" : "optimality NOT verified");
  out.emit(genwass::io::certificate_to_json(cert));
  return cert.passed() ? kPass : kFail;
}

template <class T>
int cmd_quotient(const Options&, const genwass::io::Problem<T>& prob, Output& out) {
  if (!prob.group) throw Error(ErrorCode::ParseError, "field 'group': the quotient command needs a group");
  const auto& action = *prob.group;
  const bool invariant = genwass::is_invariant(action, prob.mu) && genwass::is_invariant(action, prob.nu);
  const auto q = genwass::build_quotient(action);
  out.line("quotient: " + std::to_string(q.quotient.size()) + " points from " + std::to_string(prob.space.size()));
  json doc = {{"orbits", q.orbits}, {"invariant", invariant}};
  bool ok = true;
  auto contraction = genwass::check_quotient_contraction(action, prob.mu, prob.nu, prob.params);
  out.line("upstairs: " + fmt(contraction.upstairs) + ", downstairs: " + fmt(contraction.downstairs));
  out.line(std::string("contraction (downstairs <= upstairs): ") + (contraction.holds ? "holds" : "FAILS"));
  doc["upstairs"] = genwass::io::scalar_to_json(contraction.upstairs);
  doc["downstairs"] = genwass::io::scalar_to_json(contraction.downstairs);
  doc["contraction"] = contraction.holds;
  ok = ok && contraction.holds;
  if (invariant) {
    auto iso = genwass::check_quotient_isometry(action, prob.mu, prob.nu, prob.params);
    out.line(std::string("isometry (upstairs = downstairs): ") + (iso.holds ? "holds" : "FAILS"));
    doc["isometry"] = iso.holds;
    ok = ok && iso.holds;
    if (prob.params.p == 1.0) {
      auto lift = genwass::check_flat_lift(action, prob.mu, prob.nu, prob.params);
      out.line(std::string("lifted flat witness: ") + (lift.holds ? "holds" : "FAILS"));
      doc["flat_lift"] = lift.holds;
      ok = ok && lift.holds;
    }
  } else {
    out.line("isometry: not applicable (measures are not G-invariant)");
    doc["isometry"] = "not-applicable";
  }
  doc["passed"] = ok;
  out.emit(doc);
  return ok ? kPass : kFail;
}

// Extra keys: "target" (space), "map" (array or {"map": [...], "epsilon": e}),
// optional "target_group", "C".
template <class T>
int cmd_gh(const Options& opts, const json& doc, const genwass::io::Problem<T>& prob, Output& out) {
  using genwass::io::require;
  auto target = genwass::io::parse_space<T>(require(doc, "target", "<root>"), "target");
  const json* map_node = &require(doc, "map", "<root>");
  std::optional<T> declared;
  if (map_node->is_object()) {
    if (map_node->contains("epsilon")) declared = genwass::io::scalar_from_json<T>((*map_node)["epsilon"], "map.epsilon");
    map_node = &require(*map_node, "map", "map");
  }
  std::vector<std::size_t> table;
  if (!map_node->is_array()) throw Error(ErrorCode::ParseError, "field 'map': expected an index array");
  for (const auto& x : *map_node) {
    if (!x.is_number_unsigned()) throw Error(ErrorCode::ParseError, "field 'map': entries must be nonnegative integers");
    table.push_back(x.get<std::size_t>());
  }
  auto f = genwass::make_gh_map(prob.space, target, table);
  const T eps = declared ? *declared : f.epsilon;
  const T slack = tolerance_for(opts, eps);
  bool ok = true;
  json report = {{"gh_defect", genwass::io::scalar_to_json(f.epsilon)},
                 {"distortion", genwass::io::scalar_to_json(genwass::distortion(table, prob.space, target))},
                 {"covering", genwass::io::scalar_to_json(genwass::covering_defect(table, prob.space, target))}};
  out.line("gh defect: " + fmt(f.epsilon));
  if (declared && f.epsilon > *declared + slack) {
    out.line("declared epsilon " + fmt(*declared) + " is below the measured defect");
    ok = false;
  }

  auto inv = genwass::approximate_inverse(f);
  report["inverse"] = {{"map", inv.table}, {"defect", genwass::io::scalar_to_json(inv.epsilon)}};
  out.line("approximate inverse defect: " + fmt(inv.epsilon) + " (bound " + fmt(T(3) * f.epsilon) + ")");
  ok = ok && inv.epsilon <= T(3) * f.epsilon + slack;

  T C = prob.mu.mass() > prob.nu.mass() ? prob.mu.mass() : prob.nu.mass();
  if (doc.contains("C")) C = genwass::io::scalar_from_json<T>(doc["C"], "C");
  if (!(C > T(0))) C = T(1);
  const T bound = genwass::pushforward_bound(eps, prob.params, C, prob.space.diameter(), target.diameter());
  const T up = genwass::solve(prob.mu, prob.nu, prob.params).value;
  const T down = genwass::solve(genwass::pushforward(target, table, prob.mu), genwass::pushforward(target, table, prob.nu),
                                prob.params)
                     .value;
  const T change = genwass::abs_value<T>(down - up);
  const bool stable = change <= bound + slack;
  out.line("|W(f#mu, f#nu) - W(mu, nu)| = " + fmt(change) + " <= bound " + fmt(bound) + ": " + (stable ? "holds" : "FAILS"));
  report["bound"] = {{"lhs", genwass::io::scalar_to_json(change)},
                     {"rhs", genwass::io::scalar_to_json(bound)},
                     {"C", genwass::io::scalar_to_json(C)},
                     {"holds", stable}};
  ok = ok && stable;

  if (prob.group && doc.contains("target_group")) {
    auto beta = genwass::io::parse_group(target, doc["target_group"], "target_group");
    const T eq = genwass::equivariant_defect(table, *prob.group, beta);
    out.line("equivariant defect: " + fmt(eq));
    report["equivariant_defect"] = genwass::io::scalar_to_json(eq);
  }
  report["passed"] = ok;
  out.emit(report);
  return ok ? kPass : kFail;
}

template <class T>
int dispatch(const Options& opts, const json& doc) {
  auto prob = genwass::io::parse_problem<T>(doc, opts.overrides);
  Output out(opts);
  const auto& c = opts.command;
  if (c == "dist" || c == "plan" || c == "dual") return cmd_solve(opts, prob, out);
  if (c == "flat") return cmd_flat(opts, prob, out);
  if (c == "verify") return cmd_verify(opts, doc, prob, out);
  if (c == "quotient") return cmd_quotient(opts, prob, out);
  if (c == "gh") return cmd_gh(opts, doc, prob, out);
  throw Error(ErrorCode::ParseError, "unknown command " + c);
}

int selftest(const Options& opts, const std::optional<json>& doc) {
  std::uint64_t seed = 20240101;
  if (doc && doc->contains("seed")) seed = (*doc)["seed"].get<std::uint64_t>();
  if (opts.seed) seed = *opts.seed;
  Output out(opts);
  out.line("selftest seed " + std::to_string(seed));
  bool ok = true;
  json results = json::array();
  for (const auto& r : genwass::verification::run_all(seed)) {
    out.line(genwass::verification::format_result(r));
    results.push_back({{"criterion", r.id},
                       {"title", r.title},
                       {"passed", r.passed},
                       {"instances", r.instances},
                       {"seconds", r.seconds},
                       {"detail", r.detail}});
    ok = ok && r.passed;
  }
  out.emit({{"seed", seed}, {"results", results}, {"passed", ok}});
  return ok ? kPass : kFail;
}

int run(const Options& opts) {
  std::optional<json> doc;
  if (!opts.input.empty()) doc = genwass::io::read_json_file(opts.input);
  if (opts.command == "selftest") return selftest(opts, doc);
  if (!doc) throw Error(ErrorCode::ParseError, "--input is required for " + opts.command);
  auto mode = opts.mode ? genwass::io::parse_mode(*opts.mode) : genwass::io::detect_mode(*doc);
  return mode == genwass::io::Mode::Exact ? dispatch<genwass::Rational>(opts, *doc) : dispatch<double>(opts, *doc);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized Wasserstein distances on finite metric spaces"};
  app.require_subcommand(1);
  Options opts;

  struct Spec {
    const char* name;
    const char* help;
  };
  const Spec specs[] = {
      {"dist", "Print W_p^{a,b}(mu, nu)"},
      {"plan", "Value plus an optimal plan"},
      {"dual", "Value, plan, optimal potentials and duality gap (p = 1)"},
      {"flat", "Flat-metric value and witness from the independent LP"},
      {"verify", "Check the optimality conditions for a plan and potentials"},
      {"quotient", "Compare W on X and on X/G"},
      {"gh", "GH defects, approximate inverse and the pushforward bound"},
      {"selftest", "Run the seeded property suites"},
  };
  for (const auto& spec : specs) {
    auto* sub = app.add_subcommand(spec.name, spec.help);
    sub->add_option("--input", opts.input, "Problem JSON file");
    sub->add_option("--format", opts.format, "Output format")->check(CLI::IsMember({"json", "text"}));
    sub->add_option("--mode", opts.mode, "Arithmetic mode")->check(CLI::IsMember({"exact", "float"}));
    sub->add_option("--tol", opts.tol, "Verification tolerance");
    sub->add_option("--seed", opts.seed, "Seed for randomized suites");
    sub->add_option("--p", opts.overrides.p, "Order p >= 1");
    sub->add_option("--a", opts.overrides.a, "Creation/destruction price a > 0");
    sub->add_option("--b", opts.overrides.b, "Transport price b > 0");
    if (std::string(spec.name) == "verify")
      sub->add_option("--report", opts.report, "Report JSON holding plan and optionally phi1/phi2");
    sub->callback([&opts, name = std::string(spec.name)] { opts.command = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  try {
    return run(opts);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::SolverFailure ? kFail : kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  }
}
