// Copyright (c) the parawarm contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <deque>
#include <map>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "parawarm/bounds.hpp"
#include "parawarm/simplex.hpp"
#include "parawarm/warmstart.hpp"

namespace parawarm {

/// Worker cap: PARAWARM_THREADS when set (>= 1), else hardware concurrency.
inline unsigned worker_count() {
  if (const char* env = std::getenv("PARAWARM_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

struct SweepReport {
  std::vector<EvaluationResult> results;  // one per lambda, order preserved
  double preprocess_seconds = 0.0;        // filled by the caller that preprocessed
  std::vector<double> per_lambda_seconds;
  Strategy strategy = Strategy::Schur;
  std::map<EvalStatus, int> counts;
};

/// Evaluates every lambda against a shared read-only cache, in parallel.
/// Results and diagnostics are independent of the worker schedule.
inline SweepReport sweep(const WarmstartCache& cache,
                         const std::vector<double>& lambdas,
                         const EvaluateOptions& opts = {}) {
  SweepReport report;
  report.strategy = cache.strategy;
  const size_t p = lambdas.size();
  report.results.resize(p);
  report.per_lambda_seconds.resize(p, 0.0);

  const unsigned workers =
      std::max<unsigned>(1, std::min<size_t>(worker_count(), p));
  auto body = [&](size_t lo, size_t hi) {
    for (size_t i = lo; i < hi; ++i) {
      const auto t0 = std::chrono::steady_clock::now();
      report.results[i] = evaluate(cache, lambdas[i], opts);
      report.per_lambda_seconds[i] =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
              .count();
    }
  };
  if (workers <= 1) {
    body(0, p);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      const size_t lo = p * w / workers, hi = p * (w + 1) / workers;
      pool.emplace_back(body, lo, hi);
    }
    for (auto& t : pool) t.join();
  }
  for (const auto& r : report.results) ++report.counts[r.status];
  return report;
}

enum class BreakpointStatus { Optimal, Singular, Infeasible, Unbounded };

inline std::string to_string(BreakpointStatus s) {
  switch (s) {
    case BreakpointStatus::Optimal: return "optimal";
    case BreakpointStatus::Singular: return "singular";
    case BreakpointStatus::Infeasible: return "infeasible";
    case BreakpointStatus::Unbounded: return "unbounded";
  }
  return "?";
}

struct Breakpoint {
  double lambda = 0.0;
  std::optional<double> objective;  // exact o_B of an optimal basis, when optimal
  BreakpointStatus status = BreakpointStatus::Optimal;
};

struct ExcludedInterval {
  double lo = 0.0, hi = 0.0;
  double singular_lambda = 0.0;  // point inside with check_existence false
};

struct ReanchorEvent {
  double lambda = 0.0;
  Basis old_basis, new_basis;
};

struct PiecewiseLinearApprox {
  std::vector<Breakpoint> breakpoints;  // strictly increasing lambda
  double epsilon = 0.0;
  std::vector<bool> certified;  // per interval [i, i+1]
  std::vector<ExcludedInterval> excluded;
  std::vector<ReanchorEvent> reanchor_events;
  bool budget_exhausted = false;
};

struct ApproxLimits {
  int max_points = 10000;
  double min_width = -1.0;  // <= 0: defaults to (hi - lo) * 2^-20
};

namespace detail {

struct ApproxState {
  const ParametricLP& lp;
  double epsilon;
  ApproxLimits limits;
  Strategy strategy;
  Strategy fallback;
  Tolerances tol;
  std::uint64_t seed;

  std::deque<WarmstartCache> anchors;
  struct Point {
    double lam;
    BreakpointStatus status;
    std::optional<double> objective;
    int anchor = -1;  // index into anchors when optimal
  };
  std::map<double, Point> points;
  std::vector<ReanchorEvent> reanchors;
  std::vector<ExcludedInterval> excluded;
  bool budget_exhausted = false;

  int make_anchor(double lam, const Basis& basis) {
    anchors.push_back(preprocess(lp, basis, strategy, tol, seed, fallback));
    (void)lam;
    return static_cast<int>(anchors.size()) - 1;
  }

  // Evaluates lam with the hint anchor; re-solves and re-anchors when the
  // hint basis is not optimal there. Returns the stored point.
  const Point& classify(double lam, int hint_anchor) {
    auto it = points.find(lam);
    if (it != points.end()) return it->second;

    Point pt;
    pt.lam = lam;
    bool resolve = true;
    if (hint_anchor >= 0) {
      const auto& cache = anchors[static_cast<size_t>(hint_anchor)];
      const EvaluationResult ev = evaluate(cache, lam);
      if (ev.status == EvalStatus::Optimal) {
        pt.status = BreakpointStatus::Optimal;
        pt.objective = ev.objective;
        pt.anchor = hint_anchor;
        resolve = false;
      } else if (ev.status == EvalStatus::Singular &&
                 !check_existence(cache, lam)) {
        // Genuine singularity of A_B + lambda D_B (not a tweaked-route
        // artifact): record and stop; an excluded interval will cover it.
        pt.status = BreakpointStatus::Singular;
        resolve = false;
      }
    }
    if (resolve) {
      const Basis* warm = hint_anchor >= 0
                              ? &anchors[static_cast<size_t>(hint_anchor)]
                                     .partition.basis
                              : nullptr;
      const SolveResult sr =
          solve_lp(lp, lam, tol, warm ? std::optional<Basis>(*warm) : std::nullopt);
      if (sr.status == SolveStatus::Optimal) {
        const int a = make_anchor(lam, *sr.basis);
        if (warm)
          reanchors.push_back({lam, *warm, *sr.basis});
        // Breakpoint value is o_B at the freshly anchored optimal basis.
        const EvaluationResult ev = evaluate(anchors[static_cast<size_t>(a)], lam);
        pt.status = BreakpointStatus::Optimal;
        pt.objective = ev.objective ? ev.objective : sr.objective;
        pt.anchor = a;
      } else {
        pt.status = sr.status == SolveStatus::Infeasible
                        ? BreakpointStatus::Infeasible
                        : BreakpointStatus::Unbounded;
      }
    }
    return points.emplace(lam, pt).first->second;
  }
};

}  // namespace detail

/// Adaptive piecewise-linear approximation of o*(lambda) over [lo, hi]:
/// anchors a warmstart cache at lo, certifies intervals whose endpoint
/// delta-certificates cover them, bisects the rest, and re-anchors through a
/// fresh (warm-started) simplex solve wherever the current basis stops being
/// optimal. Singular points are fenced off by excluded intervals of width
/// 2 * exclusion_radius.
inline PiecewiseLinearApprox adaptive_approx(
    const ParametricLP& lp, double lo, double hi, double epsilon,
    const ApproxLimits& limits = {}, Strategy strategy = Strategy::Auto,
    Strategy fallback = Strategy::Schur, const Tolerances& tol = {},
    std::uint64_t seed = 0) {
  if (!(epsilon > 0)) throw PreconditionError("adaptive_approx: epsilon must be > 0");
  if (lo > hi) throw PreconditionError("adaptive_approx: empty range");

  detail::ApproxState st{lp, epsilon, limits, strategy, fallback, tol, seed};
  if (st.limits.min_width <= 0) st.limits.min_width = (hi - lo) * 0x1p-20;

  const SolveResult base = solve_lp(lp, lo, tol);
  if (base.status != SolveStatus::Optimal)
    throw Error("adaptive_approx: P(lambda_lo) is " + to_string(base.status));
  const int anchor0 = st.make_anchor(lo, *base.basis);
  st.classify(lo, anchor0);

  PiecewiseLinearApprox out;
  out.epsilon = epsilon;

  struct Segment {
    double a, b;
    bool operator<(const Segment& o) const {
      const double wa = b - a, wb = o.b - o.a;
      if (wa != wb) return wa > wb;  // widest first
      if (a != o.a) return a < o.a;  // then lowest endpoint
      return b < o.b;
    }
  };
  std::set<Segment> work;
  std::map<std::pair<double, double>, bool> segment_certified;

  if (hi > lo) {
    st.classify(hi, anchor0);
    work.insert({lo, hi});
  }

  while (!work.empty()) {
    const Segment seg = *work.begin();
    work.erase(work.begin());
    const auto& pa = st.points.at(seg.a);
    const auto& pb = st.points.at(seg.b);
    const double width = seg.b - seg.a;

    bool cert = false;
    if (pa.status == BreakpointStatus::Optimal &&
        pb.status == BreakpointStatus::Optimal) {
      const auto& ca = st.anchors[static_cast<size_t>(pa.anchor)];
      const auto& cb = st.anchors[static_cast<size_t>(pb.anchor)];
      if (ca.partition.basis.same_columns(cb.partition.basis) &&
          std::abs(*pa.objective - *pb.objective) <= epsilon) {
        const DeltaCertificate da =
            max_delta(ca, bound_inputs(ca, seg.a), seg.a, epsilon, +1);
        const DeltaCertificate db =
            max_delta(cb, bound_inputs(cb, seg.b), seg.b, epsilon, -1);
        const bool punctured =
            std::any_of(da.excluded.begin(), da.excluded.end(),
                        [&](double d) { return d < width; }) ||
            std::any_of(db.excluded.begin(), db.excluded.end(),
                        [&](double d) { return -d < width; });
        if (!punctured && da.delta_max + db.delta_max >= width) {
          // Spot check: the shared basis must also be optimal mid-interval.
          const EvaluationResult mid = evaluate(ca, 0.5 * (seg.a + seg.b));
          cert = mid.status == EvalStatus::Optimal;
        }
      }
    }
    if (cert) {
      segment_certified[{seg.a, seg.b}] = true;
      continue;
    }
    if (width < st.limits.min_width) {
      segment_certified[{seg.a, seg.b}] = false;
      continue;
    }
    if (static_cast<int>(st.points.size()) >= st.limits.max_points) {
      st.budget_exhausted = true;
      segment_certified[{seg.a, seg.b}] = false;
      continue;
    }

    const double mid = 0.5 * (seg.a + seg.b);
    if (!(mid > seg.a && mid < seg.b)) {  // width at rounding resolution
      segment_certified[{seg.a, seg.b}] = false;
      continue;
    }
    const int hint = pa.status == BreakpointStatus::Optimal ? pa.anchor
                     : pb.status == BreakpointStatus::Optimal ? pb.anchor
                                                              : anchor0;
    const auto& pm = st.classify(mid, hint);
    if (pm.status == BreakpointStatus::Singular) {
      const double r = tol.exclusion_radius * (1.0 + std::abs(mid));
      const double elo = std::max(seg.a, mid - r), ehi = std::min(seg.b, mid + r);
      st.excluded.push_back({elo, ehi, mid});
      if (elo > seg.a && elo - seg.a > 0) {
        st.classify(elo, hint);
        work.insert({seg.a, elo});
      }
      if (seg.b > ehi && seg.b - ehi > 0) {
        st.classify(ehi, hint);
        work.insert({ehi, seg.b});
      }
      // The hole itself stays uncertified.
      if (elo > seg.a) segment_certified[{elo, mid}] = false;
      else segment_certified[{seg.a, mid}] = false;
      if (seg.b > ehi) segment_certified[{mid, ehi}] = false;
      else segment_certified[{mid, seg.b}] = false;
    } else {
      work.insert({seg.a, mid});
      work.insert({mid, seg.b});
    }
  }

  for (const auto& [lam, pt] : st.points)
    out.breakpoints.push_back({lam, pt.objective, pt.status});
  out.certified.assign(
      out.breakpoints.empty() ? 0 : out.breakpoints.size() - 1, false);
  for (size_t i = 0; i + 1 < out.breakpoints.size(); ++i) {
    const auto key = std::make_pair(out.breakpoints[i].lambda,
                                    out.breakpoints[i + 1].lambda);
    const auto it = segment_certified.find(key);
    out.certified[i] = it != segment_certified.end() && it->second;
  }
  out.excluded = st.excluded;
  out.reanchor_events = st.reanchors;
  out.budget_exhausted = st.budget_exhausted;
  return out;
}

struct BenchRow {
  std::string method;
  bool ok = true;
  std::string error;
  double preprocess_seconds = 0.0;
  double per_lambda_median_seconds = 0.0;
  double per_lambda_total_seconds = 0.0;
  std::vector<double> objectives;  // NaN where the method produced none
  std::vector<std::string> statuses;
};

struct BenchReport {
  std::vector<double> lambdas;
  std::vector<BenchRow> rows;
  /// Max pairwise objective gap over lambdas where every warmstart strategy
  /// reports optimal and both comparators produced a value.
  double max_objective_disagreement = 0.0;
  bool all_agree_1e6 = true;
};

struct BenchOptions {
  int repeats = 3;  // per-measurement repetitions; the median is reported
  int comparator_repeats = 1;  // naive / basis-LU passes (kept low: they dominate)
};

namespace detail {

inline double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

template <typename F>
double timed_median(int repeats, F&& f) {
  std::vector<double> times;
  for (int r = 0; r < std::max(1, repeats); ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    times.push_back(
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count());
  }
  return median_of(std::move(times));
}

}  // namespace detail

/// Times each warmstart strategy against the "naive" (full simplex per
/// lambda) and "basis_lu" (fresh dense factorization of A_B + lambda D_B per
/// lambda) comparators, methods run sequentially to avoid interference.
inline BenchReport benchmark(const ParametricLP& lp,
                             const std::vector<double>& lambdas,
                             const std::vector<Strategy>& strategies,
                             const Tolerances& tol = {}, std::uint64_t seed = 0,
                             const BenchOptions& opts = {}) {
  const SolveResult base = solve_lp(lp, 0.0, tol);
  if (base.status != SolveStatus::Optimal)
    throw Error("benchmark: P(0) is " + to_string(base.status));
  const Basis basis = *base.basis;
  const size_t p = lambdas.size();
  const double nan = std::numeric_limits<double>::quiet_NaN();

  BenchReport report;
  report.lambdas = lambdas;

  for (Strategy s : strategies) {
    BenchRow row;
    row.method = to_string(s);
    try {
      WarmstartCache cache;
      row.preprocess_seconds = detail::timed_median(opts.repeats, [&] {
        cache = preprocess(lp, basis, s, tol, seed);
      });
      std::vector<double> per(p, 0.0);
      row.objectives.assign(p, nan);
      row.statuses.assign(p, "");
      for (size_t i = 0; i < p; ++i) {
        EvaluationResult ev;
        per[i] = detail::timed_median(opts.repeats,
                                      [&] { ev = evaluate(cache, lambdas[i]); });
        row.per_lambda_total_seconds += per[i];
        row.statuses[i] = to_string(ev.status);
        if (ev.objective) row.objectives[i] = *ev.objective;
      }
      row.per_lambda_median_seconds = detail::median_of(per);
    } catch (const Error& e) {
      row.ok = false;
      row.error = e.what();
    }
    report.rows.push_back(std::move(row));
  }

  {
    BenchRow row;
    row.method = "naive";
    row.objectives.assign(p, nan);
    row.statuses.assign(p, "");
    std::vector<double> per(p, 0.0);
    for (size_t i = 0; i < p; ++i) {
      SolveResult sr;
      per[i] = detail::timed_median(opts.comparator_repeats,
                                    [&] { sr = solve_lp(lp, lambdas[i], tol); });
      row.per_lambda_total_seconds += per[i];
      row.statuses[i] = to_string(sr.status);
      if (sr.objective) row.objectives[i] = *sr.objective;
    }
    row.per_lambda_median_seconds = detail::median_of(per);
    report.rows.push_back(std::move(row));
  }

  {
    BenchRow row;
    row.method = "basis_lu";
    row.objectives.assign(p, nan);
    row.statuses.assign(p, "");
    const BasisPartition part = partition(lp, basis);
    std::vector<double> per(p, 0.0);
    for (size_t i = 0; i < p; ++i) {
      per[i] = detail::timed_median(opts.comparator_repeats, [&] {
        const Eigen::MatrixXd M = part.A_B + lambdas[i] * part.D_B;
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
        if (lu.rcond() > 1e-14) {
          const Eigen::VectorXd x = lu.solve(lp.b);
          row.objectives[i] = part.c_B.dot(x);
          row.statuses[i] = "solved";
        } else {
          row.objectives[i] = nan;
          row.statuses[i] = "singular";
        }
      });
      row.per_lambda_total_seconds += per[i];
    }
    row.per_lambda_median_seconds = detail::median_of(per);
    report.rows.push_back(std::move(row));
  }

  // Agreement over lambdas where all warmstart strategies are optimal and
  // the comparators produced values.
  for (size_t i = 0; i < p; ++i) {
    bool eligible = true;
    for (const auto& row : report.rows) {
      if (!row.ok) continue;
      const bool warm = row.method != "naive" && row.method != "basis_lu";
      if (warm && row.statuses[i] != "optimal") eligible = false;
      if (!warm && std::isnan(row.objectives[i])) eligible = false;
    }
    if (!eligible) continue;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& row : report.rows) {
      if (!row.ok || std::isnan(row.objectives[i])) continue;
      lo = std::min(lo, row.objectives[i]);
      hi = std::max(hi, row.objectives[i]);
    }
    if (hi > lo)
      report.max_objective_disagreement =
          std::max(report.max_objective_disagreement, hi - lo);
  }
  report.all_agree_1e6 = report.max_objective_disagreement <= 1e-6;
  return report;
}

}  // namespace parawarm
