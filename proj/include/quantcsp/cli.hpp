#pragma once

#include <algorithm>
#include <chrono>
#include <fstream>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "quantcsp/dimacs.hpp"
#include "quantcsp/io.hpp"

namespace quantcsp::cli {

using io::json;

namespace detail {

struct Globals {
  bool decimal = false;
  bool no_timing = false;
};

inline json value_json(const ExtReal &v, const Globals &g) {
  json j = io::to_json(v);
  if (g.decimal && v.is_finite())
    return json{{"exact", j}, {"decimal", v.value().convert_to<double>()}};
  return j;
}

inline json assignment_json(const FnArrow &s) {
  json j = json::object();
  for (std::size_t i = 0; i < s.dom().size(); ++i)
    j[s.dom().label(i)] = s.cod().label(s.table()[i]);
  return j;
}

inline std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

inline bool ends_with(const std::string &s, const std::string &suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

inline std::string sniff_format(const std::string &file, const std::string &text) {
  auto f = lower(file);
  if (ends_with(f, ".cnf") || ends_with(f, ".dimacs"))
    return "dimacs";
  if (ends_with(f, ".graph") || ends_with(f, ".col") || ends_with(f, ".gr"))
    return "graph";
  if (ends_with(f, ".json"))
    return "json";
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    auto s = line.find_first_not_of(" \t\r");
    if (s == std::string::npos || line[s] == 'c')
      continue;
    if (line[s] == '{')
      return "json";
    if (line.compare(s, 5, "p cnf") == 0)
      return "dimacs";
    if (line.compare(s, 6, "p edge") == 0 || line.compare(s, 5, "p col") == 0)
      return "graph";
    break;
  }
  throw InputError(file + ": cannot tell the input format; pass --format");
}

inline CspInstance load_csp(const std::string &file, std::string format, std::size_t colours) {
  std::string text = io::read_file(file);
  if (format == "auto")
    format = sniff_format(file, text);
  try {
    if (format == "dimacs")
      return from_dimacs_cnf(text);
    if (format == "graph") {
      if (colours == 0)
        throw InputError("graph input needs --colours k");
      Graph g = parse_dimacs_graph(text);
      return from_graph_colouring(g.vertices, g.edges, colours);
    }
    if (format == "json") {
      CspInstance inst = io::csp_from_json(io::parse_json(text, file));
      inst.validate();
      return inst;
    }
  } catch (const ParseError &e) {
    throw InputError(file + ": " + e.what());
  } catch (const InputError &e) {
    std::string msg = e.what();
    if (msg.rfind(file, 0) == 0)
      throw;
    throw InputError(file + ": " + msg);
  }
  throw InputError("unknown format '" + format + "'");
}

template <class T, class Fn>
T load_json_as(const std::string &file, Fn parse) {
  std::string text = io::read_file(file);
  try {
    return parse(io::parse_json(text, file));
  } catch (const InputError &e) {
    std::string msg = e.what();
    if (msg.rfind(file, 0) == 0)
      throw;
    throw InputError(file + ": " + msg);
  }
}

inline SiggersMode parse_mode(const std::string &m) {
  if (m == "exhaustive")
    return SiggersMode::Exhaustive;
  if (m == "indicator")
    return SiggersMode::Indicator;
  return SiggersMode::Auto;
}

/// "p" / "inp" against InP, "hard" / "np" / "npc" against the rest.
inline bool expectation_met(const std::string &expect, Verdict v) {
  auto e = lower(expect);
  bool want_p = e == "p" || e == "inp";
  return want_p == (v == Verdict::InP);
}

inline json classification_json(const Classification &c) {
  json j{{"verdict", verdict_name(c.verdict)}, {"mode", mode_name(c.search.mode_used)}};
  if (c.witness)
    j["witnessTable"] = io::to_json(*c.witness);
  else
    j["witnessTable"] = nullptr;
  if (c.search.mode_used == SiggersMode::Exhaustive)
    j["scanned"] = c.search.scanned;
  else
    j["indicator"] = json{{"variables", c.search.indicator_variables},
                          {"constraints", c.search.indicator_constraints}};
  return j;
}

inline json tvcsp_result_json(const TvcspResult &r, const Globals &g) {
  json j{{"value", value_json(r.value, g)}};
  j["minimiser"] = r.minimiser ? assignment_json(*r.minimiser) : json(nullptr);
  if (r.value.is_neg_inf())
    j["note"] = "value is -inf; the minimiser is the first witness found";
  else if (r.value.is_pos_inf())
    j["note"] = "every assignment has value inf";
  return j;
}

inline json counterexample_json(const std::optional<QuasiconvexityCounterexample> &c,
                                const Globals &g) {
  if (!c)
    return json{{"counterexample", nullptr},
                {"note", "no counterexample on the samples; this does not prove quasiconvexity"}};
  auto vec = [&](const std::vector<Rational> &v) {
    json a = json::array();
    for (const auto &x : v)
      a.push_back(value_json(ExtReal(x), g));
    return a;
  };
  return json{{"counterexample",
               json{{"x", vec(c->x)},
                    {"y", vec(c->y)},
                    {"lambda", value_json(ExtReal(c->lambda), g)},
                    {"max", value_json(c->lhs, g)},
                    {"combined", value_json(c->rhs, g)}}}};
}

} // namespace detail

/// Runs one command line (without the program name). Exit codes: 0 success,
/// 1 verdict differs from --expect, 2 input or usage error.
inline int dispatch(std::vector<std::string> args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Quantale-enriched CSP and tropical valued CSP toolkit", "quantcsp"};
  app.require_subcommand(1);
  detail::Globals g;
  app.add_flag("--decimal", g.decimal, "Add decimal renderings next to exact values");
  app.add_flag("--no-timing", g.no_timing, "Omit the timing field from reports");

  io::RunReport report;
  std::function<int()> action;
  std::string file, format = "auto", expect, mode = "auto", method, search = "binary", emit,
                    alpha_text;
  std::size_t colours = 0, arity = 1;
  std::uint64_t limit = default_enum_limit(), horizon = 0, enum_limit = 1000;
  unsigned jobs = 1;
  bool enumerate = false, solve_flag = false, horizon_given = false;

  auto add_jobs = [&](CLI::App *c) {
    c->add_option("--jobs", jobs, "Worker threads for deterministic parallel paths")
        ->check(CLI::Range(1u, 256u));
  };

  // csp
  auto *csp = app.add_subcommand("csp", "Crisp CSP instances");
  csp->require_subcommand(1);
  auto csp_common = [&](CLI::App *c) {
    c->add_option("file", file, "Instance (DIMACS CNF, DIMACS graph or JSON)")->required();
    c->add_option("--format", format, "Input format")
        ->check(CLI::IsMember({"auto", "dimacs", "graph", "json"}));
    c->add_option("--colours,--colors", colours, "Colours for graph input");
    c->add_option("--limit", enum_limit, "Maximum number of solutions to enumerate");
  };
  auto run_csp = [&](bool all) {
    CspInstance inst = detail::load_csp(file, format, colours);
    report.input_digest = io::digest(io::read_file(file));
    if (all) {
      SolverStats st;
      auto sols = solve_all(inst, enum_limit, &st);
      json list = json::array();
      for (const auto &s : sols)
        list.push_back(detail::assignment_json(s));
      report.result = json{{"count", sols.size()},
                           {"complete", sols.size() < enum_limit},
                           {"solutions", list}};
      report.stats = io::to_json(st);
      return 0;
    }
    SolveResult r = solve(inst);
    bool sat = r.solution.has_value();
    report.result = json{{"verdict", sat ? "sat" : "unsat"}};
    report.result["assignment"] = sat ? detail::assignment_json(*r.solution) : json(nullptr);
    report.stats = io::to_json(r.stats);
    if (!expect.empty()) {
      bool met = (detail::lower(expect) == "sat") == sat;
      report.result["expected"] = expect;
      return met ? 0 : 1;
    }
    return 0;
  };
  auto *csp_solve = csp->add_subcommand("solve", "Find one solution");
  csp_common(csp_solve);
  csp_solve->add_flag("--enumerate", enumerate, "List solutions instead");
  csp_solve->add_option("--expect", expect, "Exit 1 unless the verdict matches")
      ->check(CLI::IsMember({"sat", "unsat"}));
  csp_solve->callback([&] { action = [&] { return run_csp(enumerate); }; });
  auto *csp_enum = csp->add_subcommand("enumerate", "List solutions");
  csp_common(csp_enum);
  csp_enum->callback([&] { action = [&] { return run_csp(true); }; });

  // classify
  auto *cls = app.add_subcommand("classify", "Dichotomy classification of a crisp language");
  cls->add_option("file", file, "Language JSON")->required();
  cls->add_option("--mode", mode, "Siggers search")
      ->check(CLI::IsMember({"auto", "exhaustive", "indicator"}));
  cls->add_option("--limit", limit, "Enumeration guard for the exhaustive scan");
  cls->add_option("--expect", expect, "Exit 1 unless the verdict matches (p or hard)");
  add_jobs(cls);
  cls->callback([&] {
    action = [&] {
      auto lang = detail::load_json_as<ConstraintLanguage>(
          file, [](const json &j) { return io::language_from_json(j); });
      report.input_digest = io::digest(io::read_file(file));
      Classification c = classify(lang, detail::parse_mode(mode), limit, jobs);
      report.result = detail::classification_json(c);
      report.stats = io::to_json(c.search.solver);
      if (!expect.empty())
        return detail::expectation_met(expect, c.verdict) ? 0 : 1;
      return 0;
    };
  });

  // polymorphisms
  auto *pol = app.add_subcommand("polymorphisms", "List the n-ary polymorphisms of a language");
  pol->add_option("file", file, "Language JSON")->required();
  pol->add_option("--arity,-n", arity, "Arity n")->check(CLI::Range(0u, 8u));
  pol->add_option("--limit", limit, "Enumeration guard on Hom(A^n, A)");
  pol->callback([&] {
    action = [&] {
      auto lang = detail::load_json_as<ConstraintLanguage>(
          file, [](const json &j) { return io::language_from_json(j); });
      report.input_digest = io::digest(io::read_file(file));
      QMorphism p = pol_set(lang, arity, limit);
      json ops = json::array();
      for (const auto &f : p.arrows())
        ops.push_back(io::to_json(f));
      report.result = json{{"arity", arity}, {"count", ops.size()}, {"operations", ops}};
      return 0;
    };
  });

  // tvcsp
  auto *tv = app.add_subcommand("tvcsp", "Tropical valued CSP instances");
  tv->require_subcommand(1);
  auto load_tvcsp = [&] {
    return detail::load_json_as<TvcspInstance>(file, [](const json &j) {
      if (io::is_linear_instance(j))
        throw InputError("instances over D = R only support 'lp build'");
      TvcspInstance inst = io::tvcsp_from_json(j);
      inst.validate();
      return inst;
    });
  };
  auto solve_tvcsp = [&](const TvcspInstance &inst) {
    std::string m = method.empty() ? "reduction" : method;
    ReductionOptions opt{search == "linear" ? SearchMethod::Linear : SearchMethod::Binary, jobs};
    if (m == "brute") {
      TvcspResult r = solve_bruteforce(inst, limit);
      report.result = detail::tvcsp_result_json(r, g);
      report.result["method"] = "brute";
      return 0;
    }
    TvcspResult r = solve_by_reduction(inst, opt);
    report.stats = io::to_json(r.stats);
    report.stats["csp_calls"] = r.csp_calls;
    if (m == "reduction") {
      report.result = detail::tvcsp_result_json(r, g);
      report.result["method"] = "reduction";
      return 0;
    }
    TvcspResult b = solve_bruteforce(inst, limit);
    report.result = json{{"value", detail::value_json(r.value, g)},
                         {"agree", r.value == b.value},
                         {"brute", detail::tvcsp_result_json(b, g)},
                         {"reduction", detail::tvcsp_result_json(r, g)}};
    return r.value == b.value ? 0 : 1;
  };
  auto *tv_solve = tv->add_subcommand("solve", "Compute O(I) and a minimiser");
  tv_solve->add_option("file", file, "Instance JSON")->required();
  tv_solve->add_option("--method", method, "brute, reduction or both")
      ->check(CLI::IsMember({"brute", "reduction", "both"}));
  tv_solve->add_option("--search", search, "Candidate search for the reduction")
      ->check(CLI::IsMember({"binary", "linear"}));
  tv_solve->add_option("--limit", limit, "Enumeration guard for brute force");
  add_jobs(tv_solve);
  tv_solve->callback([&] {
    action = [&] {
      TvcspInstance inst = load_tvcsp();
      report.input_digest = io::digest(io::read_file(file));
      return solve_tvcsp(inst);
    };
  });
  bool reduce_cmd = false;
  auto *tv_reduce = tv->add_subcommand("reduce", "Emit the crisp instance I^alpha as CSP JSON");
  tv_reduce->add_option("file", file, "Instance JSON")->required();
  tv_reduce->add_option("--alpha", alpha_text, "Threshold (rational or -inf)")->required();
  tv_reduce->callback([&] {
    reduce_cmd = true;
    action = [&] {
      TvcspInstance inst = load_tvcsp();
      ExtReal a = io::ext_from_json(json(alpha_text), "--alpha");
      if (a.is_pos_inf())
        throw InputError("--alpha: must be below inf");
      out << io::to_json(reduce_to_csp(inst, a)).dump(2) << '\n';
      return 0;
    };
  });
  auto *tv_cls = tv->add_subcommand("classify", "Dichotomy classification of a valued language");
  tv_cls->add_option("file", file, "Valued language JSON")->required();
  tv_cls->add_option("--mode", mode, "Siggers search")
      ->check(CLI::IsMember({"auto", "exhaustive", "indicator"}));
  tv_cls->add_option("--limit", limit, "Enumeration guard for the exhaustive scan");
  tv_cls->add_option("--expect", expect, "Exit 1 unless the verdict matches (p or hard)");
  add_jobs(tv_cls);
  tv_cls->callback([&] {
    action = [&] {
      auto lang = detail::load_json_as<ValuedLanguage>(
          file, [](const json &j) { return io::valued_language_from_json(j); });
      report.input_digest = io::digest(io::read_file(file));
      Classification c = classify_tvcsp(lang, detail::parse_mode(mode), limit, jobs);
      report.result = detail::classification_json(c);
      report.result["sublevelRelations"] = language_sublevels(lang).relations.size();
      report.stats = io::to_json(c.search.solver);
      if (!expect.empty())
        return detail::expectation_met(expect, c.verdict) ? 0 : 1;
      return 0;
    };
  });

  // schedule
  auto *sch = app.add_subcommand("schedule", "Minimise the maximum deviation from due dates");
  sch->add_option("file", file, "Scheduling JSON")->required();
  sch->add_option("--horizon", horizon, "Latest start time N");
  sch->add_option("--method", method, "brute, reduction or both")
      ->check(CLI::IsMember({"brute", "reduction", "both"}));
  sch->add_option("--limit", limit, "Enumeration guard for brute force");
  add_jobs(sch);
  sch->callback([&] {
    horizon_given = sch->count("--horizon") > 0;
    action = [&] {
      std::uint64_t n = horizon;
      auto problem = detail::load_json_as<SchedulingProblem>(file, [&](const json &j) {
        if (!horizon_given) {
          if (!j.is_object() || !j.contains("horizon"))
            throw InputError("$: missing field 'horizon' (or pass --horizon)");
          n = io::detail::natural(j["horizon"], "$.horizon");
        }
        return io::scheduling_from_json(j);
      });
      report.input_digest = io::digest(io::read_file(file));
      TvcspInstance inst = from_scheduling(problem, n);
      int rc = solve_tvcsp(inst);
      report.result["horizon"] = n;
      return rc;
    };
  });

  // lp
  auto *lp = app.add_subcommand("lp", "Linear instances over D = R");
  lp->require_subcommand(1);
  auto *lp_build = lp->add_subcommand("build", "Build the linear program for O(I)");
  lp_build->add_option("file", file, "Linear instance JSON")->required();
  lp_build->add_option("--emit", emit, "Write the LP text to this file ('-' for stdout)");
  lp_build->add_flag("--solve", solve_flag, "Solve with the exact simplex");
  lp_build->callback([&] {
    action = [&] {
      auto inst = detail::load_json_as<LinearTvcsp>(
          file, [](const json &j) { return io::linear_from_json(j); });
      report.input_digest = io::digest(io::read_file(file));
      LinearProgram prog = build_lp(inst);
      report.result = json{{"rows", prog.rows.size()}, {"program", io::to_json(prog)}};
      if (!emit.empty()) {
        std::string text = emit_lp_file(prog);
        if (emit == "-") {
          out << text;
          return -1;
        }
        std::ofstream f(emit, std::ios::binary);
        if (!f)
          throw InputError(emit + ": cannot write file");
        f << text;
        report.result["emitted"] = emit;
      }
      if (solve_flag) {
        LpResult r = solve_lp(prog);
        json s{{"status", lp_status_name(r.status)}, {"value", detail::value_json(r.value, g)}};
        if (r.status == LpStatus::Optimal) {
          json pt = json::object();
          for (std::size_t i = 0; i < r.point.size(); ++i)
            pt[prog.variable_names[i]] = detail::value_json(ExtReal(r.point[i]), g);
          s["point"] = pt;
        }
        report.result["solution"] = s;
        report.stats = json{{"pivots", r.pivots}};
      }
      return 0;
    };
  });
  auto qconvex_action = [&] {
    action = [&] {
      auto spec = detail::load_json_as<io::QconvexSpec>(
          file, [](const json &j) { return io::qconvex_from_json(j); });
      report.input_digest = io::digest(io::read_file(file));
      auto c = quasiconvexity_falsify(spec.evaluate, spec.samples, spec.lambdas);
      report.result = detail::counterexample_json(c, g);
      report.result["kind"] = spec.kind;
      report.result["samples"] = spec.samples.size();
      report.result["lambdas"] = spec.lambdas.size();
      return 0;
    };
  };
  auto *lp_q = lp->add_subcommand("qconvex", "Search sample grids for a quasiconvexity violation");
  lp_q->add_option("file", file, "Function spec JSON")->required();
  lp_q->callback(qconvex_action);
  auto *q = app.add_subcommand("qconvex", "Search sample grids for a quasiconvexity violation");
  q->add_option("file", file, "Function spec JSON")->required();
  q->callback(qconvex_action);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp &e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp &e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError &e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  if (!action) {
    err << "error: no command\n";
    return 2;
  }
  std::string echo;
  for (const auto &a : args)
    echo += (echo.empty() ? "" : " ") + a;
  report.command = echo;
  int rc = 0;
  auto t0 = std::chrono::steady_clock::now();
  try {
    rc = action();
  } catch (const InputError &e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const Error &e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const ContractViolation &e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  if (rc < 0 || reduce_cmd)
    return 0;
  if (!g.no_timing)
    report.timing_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  out << io::to_json(report).dump(2) << '\n';
  return rc;
}

inline int dispatch(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dispatch(std::move(args), out, err);
}

} // namespace quantcsp::cli
