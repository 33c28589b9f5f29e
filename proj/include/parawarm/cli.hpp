// Copyright (c) the parawarm contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "parawarm/problem_io.hpp"
#include "parawarm/sweep.hpp"

namespace parawarm {

namespace cli_detail {

/// Shortest round-trip decimal representation, locale-independent.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open input file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_output(const std::string& text,
                         const std::string& output_path, std::ostream& out) {
  if (output_path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(output_path, std::ios::binary);
  if (!f) throw Error("cannot open output file: " + output_path);
  f << text;
}

/// Lambda flag syntax: a single value, a comma list, or from:to:count
/// (inclusive of both endpoints; count=1 means {from}).
inline LambdaSpec parse_lambda_flag(const std::string& s) {
  const auto colons = std::count(s.begin(), s.end(), ':');
  try {
    if (colons == 2) {
      const auto p1 = s.find(':'), p2 = s.find(':', p1 + 1);
      return LambdaSpec::range(std::stod(s.substr(0, p1)),
                               std::stod(s.substr(p1 + 1, p2 - p1 - 1)),
                               std::stol(s.substr(p2 + 1)));
    }
    LambdaSpec spec;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      size_t pos = 0;
      const double v = std::stod(tok, &pos);
      if (pos != tok.size()) throw ParseError("trailing characters");
      spec.values.push_back(v);
    }
    if (spec.values.empty()) throw ParseError("empty");
    return spec;
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception&) {
    throw ParseError("--lambda: expected VALUE, V1,V2,... or FROM:TO:COUNT, got \"" +
                     s + "\"");
  }
}

inline nlohmann::json basis_json(const Basis& b) {
  return nlohmann::json(std::vector<Index>(b.indices.begin(), b.indices.end()));
}

inline nlohmann::json finite_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

struct CommonArgs {
  std::string input;
  std::string output;
  std::string format;  // "", "csv", "json"
  std::string strategy = "auto";
  std::string fallback = "schur";
  std::uint64_t seed = 0;
  Tolerances tol;
};

inline void add_common(CLI::App* cmd, CommonArgs& args, bool with_strategy) {
  cmd->add_option("-i,--input", args.input, "problem file (JSON)")->required();
  cmd->add_option("-o,--output", args.output, "output file (default: stdout)");
  cmd->add_option("-f,--format", args.format, "output format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  if (with_strategy) {
    cmd->add_option("-s,--strategy", args.strategy,
                    "decomposition strategy: eigen, schur, tweaked, auto")
        ->check(CLI::IsMember({"eigen", "schur", "tweaked", "auto"}));
    cmd->add_option("--fallback", args.fallback,
                    "fallback when auto hits a defective matrix")
        ->check(CLI::IsMember({"schur", "tweaked"}));
    cmd->add_option("--seed", args.seed, "RNG seed for the tweaked strategy");
  }
  cmd->add_option("--tol-res", args.tol.res, "residual tolerance");
  cmd->add_option("--tol-feas", args.tol.feas, "feasibility tolerance");
  cmd->add_option("--tol-opt", args.tol.opt, "optimality tolerance");
}

}  // namespace cli_detail

/// Runs the command line. Exit codes: 0 success, 1 usage error, 2 numerical
/// failure, 3 infeasible or unbounded base problem. Diagnostics go to `err`;
/// data goes to the output file or `out`.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out,
                   std::ostream& err) {
  namespace cd = cli_detail;
  CLI::App app{"parawarm: parametric-LP warmstarting over A + lambda*D"};
  app.require_subcommand(1);

  cd::CommonArgs solve_args, sweep_args, bound_args, approx_args, bench_args;
  std::string solve_lambda = "0";
  std::string sweep_lambda, bench_lambda;
  bool sweep_upper_only = false;
  double bound_lambda = 0.0, bound_eps = 0.0;
  int bound_direction = 1;
  std::string approx_range;
  double approx_eps = 0.0;
  int approx_max_points = 10000;
  double approx_min_width = -1.0;
  std::string bench_strategies = "eigen,schur,tweaked";
  int bench_repeats = 3;

  auto* solve_cmd = app.add_subcommand("solve", "solve P(lambda0) with the simplex");
  cd::add_common(solve_cmd, solve_args, false);
  solve_cmd->add_option("-l,--lambda", solve_lambda, "lambda value (default 0)");

  auto* sweep_cmd =
      app.add_subcommand("sweep", "evaluate a precomputed basis over many lambdas");
  cd::add_common(sweep_cmd, sweep_args, true);
  sweep_cmd->add_option("-l,--lambda", sweep_lambda,
                        "lambda list or FROM:TO:COUNT (default: file's lambda key)");
  sweep_cmd->add_flag("--upper-bound-only", sweep_upper_only,
                      "skip the optimality check; report upper bounds");

  auto* bound_cmd =
      app.add_subcommand("bound", "delta certificate at a lambda anchor");
  cd::add_common(bound_cmd, bound_args, true);
  bound_cmd->add_option("-l,--lambda", bound_lambda, "anchor lambda (default 0)");
  bound_cmd->add_option("-e,--eps", bound_eps, "maximal objective error")->required();
  bound_cmd->add_option("-d,--direction", bound_direction, "step direction: 1 or -1")
      ->check(CLI::IsMember({1, -1}));

  auto* approx_cmd = app.add_subcommand(
      "approx", "certified piecewise-linear approximation of o*(lambda)");
  cd::add_common(approx_cmd, approx_args, true);
  approx_cmd->add_option("-r,--range", approx_range, "lambda range LO:HI")->required();
  approx_cmd->add_option("-e,--eps", approx_eps, "maximal objective error")->required();
  approx_cmd->add_option("--max-points", approx_max_points, "breakpoint budget");
  approx_cmd->add_option("--min-width", approx_min_width,
                         "smallest interval width refined");

  auto* bench_cmd =
      app.add_subcommand("bench", "time warmstart strategies against re-solving");
  cd::add_common(bench_cmd, bench_args, true);
  bench_cmd->add_option("-l,--lambda", bench_lambda,
                        "lambda list or FROM:TO:COUNT (default: file's lambda key)");
  bench_cmd->add_option("--strategies", bench_strategies,
                        "comma list of strategies to time");
  bench_cmd->add_option("--repeats", bench_repeats,
                        "repetitions per warmstart measurement (median reported)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;  // help exits 0, any usage error exits 1
  }

  try {
    auto load = [&](const cd::CommonArgs& a) {
      ParsedProblem doc = parse_document(cd::read_file(a.input));
      doc.lp = to_standard_form(doc.lp);
      return doc;
    };
    auto lambdas_for = [&](const cd::CommonArgs& a, const std::string& flag,
                           const ParsedProblem& doc) {
      if (!flag.empty()) return cd::parse_lambda_flag(flag).values;
      if (doc.lambda) return doc.lambda->values;
      throw ParseError("no lambda values given (use --lambda or the file's lambda key)");
    };

    if (*solve_cmd) {
      const auto doc = load(solve_args);
      const auto lam = cd::parse_lambda_flag(solve_lambda).values;
      if (lam.size() != 1) throw ParseError("solve expects a single --lambda value");
      const SolveResult res = solve_lp(doc.lp, lam[0], solve_args.tol);
      nlohmann::json j;
      j["lambda"] = lam[0];
      j["status"] = to_string(res.status);
      j["iterations"] = res.iterations;
      if (res.objective) j["objective"] = *res.objective;
      if (res.basis) j["basis"] = cd::basis_json(*res.basis);
      if (res.x)
        j["x"] = std::vector<double>(res.x->data(), res.x->data() + res.x->size());
      cd::write_output(j.dump(2) + "\n", solve_args.output, out);
      if (res.status != SolveStatus::Optimal) {
        err << "solve: problem is " << to_string(res.status) << "\n";
        return 3;
      }
      return 0;
    }

    if (*sweep_cmd) {
      const auto doc = load(sweep_args);
      const auto lambdas = lambdas_for(sweep_args, sweep_lambda, doc);
      const SolveResult base = solve_lp(doc.lp, 0.0, sweep_args.tol);
      if (base.status != SolveStatus::Optimal) {
        err << "sweep: P(0) is " << to_string(base.status) << "\n";
        return 3;
      }
      const auto t0 = std::chrono::steady_clock::now();
      const WarmstartCache cache = preprocess(
          doc.lp, *base.basis, *strategy_from_string(sweep_args.strategy),
          sweep_args.tol, sweep_args.seed,
          *strategy_from_string(sweep_args.fallback));
      const double pre_s =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
              .count();
      SweepReport report = sweep(cache, lambdas, {!sweep_upper_only});
      report.preprocess_seconds = pre_s;

      std::string text;
      if (sweep_args.format == "json") {
        nlohmann::json j;
        j["strategy"] = to_string(report.strategy);
        auto rows = nlohmann::json::array();
        for (const auto& r : report.results) {
          nlohmann::json row;
          row["lambda"] = r.lambda;
          row["status"] = to_string(r.status);
          row["objective"] =
              r.objective ? nlohmann::json(*r.objective) : nlohmann::json(nullptr);
          row["min_x"] = cd::finite_or_null(r.diagnostics.min_x_component);
          row["min_rc"] = cd::finite_or_null(r.diagnostics.min_reduced_cost);
          row["imag_resid"] = cd::finite_or_null(r.diagnostics.max_imag_residual);
          rows.push_back(std::move(row));
        }
        j["results"] = std::move(rows);
        text = j.dump(2) + "\n";
      } else {
        std::string csv = "lambda,status,objective,min_x,min_rc,imag_resid\n";
        for (const auto& r : report.results) {
          csv += cd::format_double(r.lambda) + "," + to_string(r.status) + "," +
                 cd::format_double(r.objective ? *r.objective
                                               : std::numeric_limits<double>::quiet_NaN()) +
                 "," + cd::format_double(r.diagnostics.min_x_component) + "," +
                 cd::format_double(r.diagnostics.min_reduced_cost) + "," +
                 cd::format_double(r.diagnostics.max_imag_residual) + "\n";
        }
        text = csv;
      }
      cd::write_output(text, sweep_args.output, out);
      err << "sweep: strategy=" << to_string(report.strategy)
          << " preprocess=" << pre_s << "s, " << lambdas.size()
          << " evaluations\n";
      return 0;
    }

    if (*bound_cmd) {
      const auto doc = load(bound_args);
      const SolveResult base = solve_lp(doc.lp, 0.0, bound_args.tol);
      if (base.status != SolveStatus::Optimal) {
        err << "bound: P(0) is " << to_string(base.status) << "\n";
        return 3;
      }
      const WarmstartCache cache = preprocess(
          doc.lp, *base.basis, *strategy_from_string(bound_args.strategy),
          bound_args.tol, bound_args.seed,
          *strategy_from_string(bound_args.fallback));
      const EvaluationResult at = evaluate(cache, bound_lambda);
      if (at.status != EvalStatus::Optimal) {
        err << "bound: basis is " << to_string(at.status) << " at lambda="
            << bound_lambda << "; the certificate requires optimality\n";
        return 2;
      }
      const DeltaCertificate cert =
          max_delta(cache, bound_inputs(cache, bound_lambda), bound_lambda,
                    bound_eps, bound_direction);
      nlohmann::json j;
      j["lambda"] = bound_lambda;
      j["epsilon"] = cert.epsilon;
      j["direction"] = cert.direction;
      j["delta_max"] = cd::finite_or_null(cert.delta_max);
      j["binding_term"] = to_string(cert.binding_term);
      j["excluded_delta"] = cert.excluded;
      j["objective"] = at.objective ? nlohmann::json(*at.objective)
                                    : nlohmann::json(nullptr);
      cd::write_output(j.dump(2) + "\n", bound_args.output, out);
      return 0;
    }

    if (*approx_cmd) {
      const auto doc = load(approx_args);
      const auto p = approx_range.find(':');
      if (p == std::string::npos)
        throw ParseError("--range: expected LO:HI, got \"" + approx_range + "\"");
      double lo = 0, hi = 0;
      try {
        lo = std::stod(approx_range.substr(0, p));
        hi = std::stod(approx_range.substr(p + 1));
      } catch (const std::exception&) {
        throw ParseError("--range: expected LO:HI, got \"" + approx_range + "\"");
      }
      if (!(approx_eps > 0)) throw ParseError("--eps must be > 0");
      const PiecewiseLinearApprox pla = adaptive_approx(
          doc.lp, lo, hi, approx_eps, {approx_max_points, approx_min_width},
          *strategy_from_string(approx_args.strategy),
          *strategy_from_string(approx_args.fallback), approx_args.tol,
          approx_args.seed);

      std::string text;
      if (approx_args.format == "json" || approx_args.format.empty()) {
        nlohmann::json j;
        j["epsilon"] = pla.epsilon;
        j["budget_exhausted"] = pla.budget_exhausted;
        auto bps = nlohmann::json::array();
        for (const auto& bp : pla.breakpoints) {
          nlohmann::json row;
          row["lambda"] = bp.lambda;
          row["objective"] = bp.objective ? nlohmann::json(*bp.objective)
                                          : nlohmann::json(nullptr);
          row["status"] = to_string(bp.status);
          bps.push_back(std::move(row));
        }
        j["breakpoints"] = std::move(bps);
        j["certified"] = pla.certified;
        auto exc = nlohmann::json::array();
        for (const auto& e : pla.excluded)
          exc.push_back({{"lo", e.lo}, {"hi", e.hi}, {"singular_lambda", e.singular_lambda}});
        j["excluded"] = std::move(exc);
        auto rea = nlohmann::json::array();
        for (const auto& e : pla.reanchor_events)
          rea.push_back({{"lambda", e.lambda},
                         {"old_basis", cd::basis_json(e.old_basis)},
                         {"new_basis", cd::basis_json(e.new_basis)}});
        j["reanchor_events"] = std::move(rea);
        text = j.dump(2) + "\n";
      } else {
        std::string csv = "lambda,objective,status,certified_next\n";
        for (size_t i = 0; i < pla.breakpoints.size(); ++i) {
          const auto& bp = pla.breakpoints[i];
          csv += cd::format_double(bp.lambda) + "," +
                 cd::format_double(bp.objective
                                       ? *bp.objective
                                       : std::numeric_limits<double>::quiet_NaN()) +
                 "," + to_string(bp.status) + ",";
          csv += i < pla.certified.size() ? (pla.certified[i] ? "1" : "0") : "";
          csv += "\n";
        }
        text = csv;
      }
      cd::write_output(text, approx_args.output, out);
      return 0;
    }

    if (*bench_cmd) {
      const auto doc = load(bench_args);
      const auto lambdas = lambdas_for(bench_args, bench_lambda, doc);
      std::vector<Strategy> strategies;
      std::stringstream ss(bench_strategies);
      std::string tok;
      while (std::getline(ss, tok, ',')) {
        const auto s = strategy_from_string(tok);
        if (!s || *s == Strategy::Auto)
          throw ParseError("--strategies: expected eigen, schur or tweaked, got \"" +
                           tok + "\"");
        strategies.push_back(*s);
      }
      const BenchReport report =
          benchmark(doc.lp, lambdas, strategies, bench_args.tol, bench_args.seed,
                    {bench_repeats, 1});

      std::string text;
      if (bench_args.format == "json") {
        nlohmann::json j;
        j["lambdas"] = report.lambdas;
        j["max_objective_disagreement"] =
            cd::finite_or_null(report.max_objective_disagreement);
        j["all_agree_1e6"] = report.all_agree_1e6;
        auto rows = nlohmann::json::array();
        for (const auto& r : report.rows) {
          nlohmann::json row;
          row["method"] = r.method;
          row["ok"] = r.ok;
          if (!r.ok) row["error"] = r.error;
          row["preprocess_seconds"] = r.preprocess_seconds;
          row["per_lambda_median_seconds"] = r.per_lambda_median_seconds;
          row["per_lambda_total_seconds"] = r.per_lambda_total_seconds;
          rows.push_back(std::move(row));
        }
        j["methods"] = std::move(rows);
        text = j.dump(2) + "\n";
      } else {
        std::string csv =
            "method,ok,preprocess_seconds,per_lambda_median_seconds,"
            "per_lambda_total_seconds,error\n";
        for (const auto& r : report.rows) {
          csv += r.method + "," + (r.ok ? "1" : "0") + "," +
                 cd::format_double(r.preprocess_seconds) + "," +
                 cd::format_double(r.per_lambda_median_seconds) + "," +
                 cd::format_double(r.per_lambda_total_seconds) + "," +
                 cd::csv_quote(r.error) + "\n";
        }
        text = csv;
      }
      cd::write_output(text, bench_args.output, out);
      err << "bench: max objective disagreement "
          << report.max_objective_disagreement << "\n";
      return 0;
    }
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const DefectiveError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace parawarm
