#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "proxipair/core.hpp"
#include "proxipair/geometry.hpp"
#include "proxipair/mappings.hpp"

namespace proxipair {

/// Membership tolerance applied to every iterate the solvers produce.
inline constexpr double kIterateMembershipTol = 1e-9;

/// Outcome of the coupled iteration x_n = T(x_{n-1}, y_{n-1}), y_n = T(y_{n-1}, x_{n-1}).
struct SolveReport {
  std::vector<ProductPoint> iterates;  // z_0 .. z_N, alternating A x B / B x A
  std::vector<double> gaps;            // ||z_n - z_{n+1}||, one per iterate
  std::vector<double> residuals_x;     // ||x_n - T(x_n, y_n)||
  std::vector<double> residuals_y;     // ||y_n - T(y_n, x_n)||
  std::vector<double> cauchy_steps;    // ||z_n - z_{n-2}|| (NaN where undefined; z_0 looks ahead)
  ProductPoint solution;               // last even iterate, in A x B
  ProductPoint companion;              // (T(x,y), T(y,x)) at the solution, in B x A
  double d = 0.0;
  double lambda = 0.0;
  double tol = 0.0;
  double residual_x = 0.0;
  double residual_y = 0.0;
  double limit_identity_x = 0.0;  // ||T(T(x,y),T(y,x)) - x||
  double limit_identity_y = 0.0;  // ||T(T(y,x),T(x,y)) - y||
  bool converged = false;
  bool limit_verified = false;
  int iterations = 0;
  std::optional<int> predicted_iterations;
  std::string failure;  // empty unless the run failed

  double initial_step() const { return gaps.empty() ? 0.0 : gaps.front(); }
  bool within_prediction() const {
    return predicted_iterations && iterations <= *predicted_iterations + 2;
  }
  bool limit_identity_holds() const {
    return limit_identity_x <= 10.0 * tol && limit_identity_y <= 10.0 * tol;
  }
};

/// (T(x, y), T(y, x)) with the orientation flipped.
template <CyclicOperator Map>
ProductPoint iterate_once(const Map& t, const ProductPoint& p) {
  return ProductPoint(t.evaluate(p), t.evaluate(p.swapped()), flip(p.orientation));
}

/// Both residuals ||x - T(x,y)|| and ||y - T(y,x)|| within tol of d.
template <CyclicOperator Map>
bool verify_limit(const Map& t, const ProductPoint& candidate, double d, double tol) {
  const ProductPoint image = iterate_once(t, candidate);
  return std::abs(distance(candidate.first, image.first) - d) <= tol &&
         std::abs(distance(candidate.second, image.second) - d) <= tol;
}

/// ceil(log(tol / ||z_0 - z_1||) / log(lambda)), the step count after which the
/// a-priori bound lambda^n ||z_0 - z_1|| drops below tol.
inline int a_priori_iterations(double initial_step, double lambda, double tol) {
  if (initial_step <= tol) return 0;
  return static_cast<int>(std::ceil(std::log(tol / initial_step) / std::log(lambda)));
}

namespace detail {

template <CyclicOperator Map>
ProductPoint checked_step(const Map& t, const ProductPoint& z, const ConvexSet& a,
                          const ConvexSet& b, std::size_t index) {
  ProductPoint next = iterate_once(t, z);
  const ConvexSet& s1 = source_set(next.orientation, a, b);
  const ConvexSet& s2 = target_set(next.orientation, a, b);
  if (!contains(s1, next.first, kIterateMembershipTol) ||
      !contains(s2, next.second, kIterateMembershipTol))
    throw MembershipError("iterate " + std::to_string(index) + " left " +
                          (next.orientation == Orientation::AcrossB ? "A x B" : "B x A") +
                          ": the map violates T(A,B) in B / T(B,A) in A");
  return next;
}

}  // namespace detail

/// Coupled Picard iteration for a p-cyclic contraction with constant lambda.
/// Stops at the first even n with gap_n - d <= tol and ||z_n - z_{n-2}|| <= tol.
template <CyclicOperator Map>
SolveReport solve_contraction(const Map& t, const ConvexSet& a, const ConvexSet& b,
                              const ProductPoint& start, double d, double lambda, double tol,
                              int max_iter) {
  if (!(lambda > 0.0 && lambda < 1.0))
    throw InvalidArgument("solve_contraction: lambda must lie in (0,1), got " +
                          std::to_string(lambda));
  if (!(tol > 0.0)) throw InvalidArgument("solve_contraction: tol must be positive");
  if (!(d >= 0.0)) throw InvalidArgument("solve_contraction: d must be nonnegative");
  if (max_iter < 0) throw InvalidArgument("solve_contraction: max_iter must be >= 0");
  if (start.orientation != Orientation::AcrossB)
    throw InvalidArgument("solve_contraction: start must be oriented A x B");
  require_oriented(start, a, b, kIterateMembershipTol, "solve_contraction start");

  SolveReport r;
  r.d = d;
  r.lambda = lambda;
  r.tol = tol;
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();

  std::vector<ProductPoint> z{start};
  auto ensure = [&](std::size_t k) {
    while (z.size() <= k) z.push_back(detail::checked_step(t, z.back(), a, b, z.size()));
  };

  std::size_t n = 0;
  for (;; ++n) {
    ensure(n + 1);
    const double rx = distance(z[n].first, z[n + 1].first);
    const double ry = distance(z[n].second, z[n + 1].second);
    r.residuals_x.push_back(rx);
    r.residuals_y.push_back(ry);
    r.gaps.push_back(std::max(rx, ry));
    double cauchy = nan;
    if (n >= 2) {
      cauchy = product_distance(z[n], z[n - 2]);
    } else if (n == 0) {
      ensure(2);
      cauchy = product_distance(z[2], z[0]);
    }
    r.cauchy_steps.push_back(cauchy);
    if (n == 0) r.predicted_iterations = a_priori_iterations(r.gaps.front(), lambda, tol);

    if (n % 2 == 0 && r.gaps.back() - d <= tol && cauchy <= tol) {
      r.converged = true;
      break;
    }
    if (static_cast<int>(n) >= max_iter) break;
  }

  // Solution is the last even iterate at or before n.
  std::size_t sol = n % 2 == 0 ? n : n - 1;
  r.iterates.assign(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(n + 1));
  r.iterations = static_cast<int>(n);
  r.solution = z[sol];
  r.companion = z[sol + 1];
  r.residual_x = r.residuals_x[sol];
  r.residual_y = r.residuals_y[sol];
  if (!r.converged) {
    r.failure = "max_iter " + std::to_string(max_iter) + " exhausted";
    return r;
  }

  const ProductPoint back = iterate_once(t, r.companion);  // (T(Tx,Ty), T(Ty,Tx))
  r.limit_identity_x = distance(back.first, r.solution.first);
  r.limit_identity_y = distance(back.second, r.solution.second);
  r.limit_verified = verify_limit(t, r.solution, d, tol);
  if (!r.limit_verified) {
    r.converged = false;
    r.failure = "stopping rule met but residuals (" + std::to_string(r.residual_x) + ", " +
                std::to_string(r.residual_y) + ") are not within tol of d = " + std::to_string(d);
  }
  return r;
}

/// Largest excess of gap_n - d over lambda^n ||z_0 - z_1|| along a trace (<= 0 when the bound holds).
inline double a_priori_bound_excess(const SolveReport& r) {
  double worst = -std::numeric_limits<double>::infinity();
  double factor = 1.0;
  for (double g : r.gaps) {
    worst = std::max(worst, (g - r.d) - factor * r.initial_step());
    factor *= r.lambda;
  }
  return worst;
}

/// Count of index-matched iterate pairs from two runs that stay apart (>= 100 tol)
/// although both runs' gaps are already within tol of d. Reported, not enforced.
inline int limit_distance_diagnostic(const SolveReport& r1, const SolveReport& r2, double tol) {
  int warnings = 0;
  const std::size_t n = std::min(r1.iterates.size(), r2.iterates.size());
  for (std::size_t k = 0; k < n; ++k) {
    if (r1.gaps[k] - r1.d > tol || r2.gaps[k] - r2.d > tol) continue;
    if (product_distance(r1.iterates[k], r2.iterates[k]) >= 100.0 * tol) ++warnings;
  }
  return warnings;
}

/// Seeded random starts in A x B; every run and the largest pairwise solution distance.
struct MultiStartReport {
  std::vector<SolveReport> runs;
  double max_pairwise_distance = 0.0;
  int limit_distance_warnings = 0;
};

template <CyclicOperator Map>
MultiStartReport solve_multistart(const Map& t, const ConvexSet& a, const ConvexSet& b, double d,
                                  double lambda, double tol, int max_iter, int n_starts,
                                  std::uint64_t seed) {
  MultiStartReport out;
  Rng rng(derive_seed(seed, 5));
  for (int i = 0; i < n_starts; ++i) {
    Vector x = draw(a, rng);
    Vector y = draw(b, rng);
    out.runs.push_back(solve_contraction(t, a, b, ProductPoint(x, y), d, lambda, tol, max_iter));
  }
  for (std::size_t i = 0; i < out.runs.size(); ++i)
    for (std::size_t j = i + 1; j < out.runs.size(); ++j) {
      out.max_pairwise_distance =
          std::max(out.max_pairwise_distance,
                   product_distance(out.runs[i].solution, out.runs[j].solution));
      out.limit_distance_warnings += limit_distance_diagnostic(out.runs[i], out.runs[j], tol);
    }
  return out;
}

// ---------------------------------------------------------------------------
// Nonexpansive maps through the T_n scheme
// ---------------------------------------------------------------------------

/// T_n(p) = (1/n) S(anchor oriented like p) + (1 - 1/n) S(p): a p-cyclic
/// contraction with constant 1 - 1/n whenever S is p-cyclic nonexpansive.
template <CyclicOperator Map>
class RegularizedMap {
 public:
  RegularizedMap(const Map& s, const ProductPoint& anchor, long n)
      : s_(s), n_(n),
        anchor_ab_(s.evaluate(ProductPoint(anchor.first, anchor.second, Orientation::AcrossB))),
        anchor_ba_(s.evaluate(ProductPoint(anchor.second, anchor.first, Orientation::BacrossA))) {
    if (n < 2) throw InvalidArgument("RegularizedMap: n must be >= 2");
  }

  std::size_t dim() const { return s_.dim(); }
  double lambda() const { return 1.0 - 1.0 / static_cast<double>(n_); }

  Vector evaluate(const ProductPoint& p) const {
    const double w = 1.0 / static_cast<double>(n_);
    const Vector& fixed = p.orientation == Orientation::AcrossB ? anchor_ab_ : anchor_ba_;
    return w * fixed + (1.0 - w) * s_.evaluate(p);
  }

 private:
  const Map& s_;
  long n_;
  Vector anchor_ab_;
  Vector anchor_ba_;
};

struct SchedulePoint {
  long n = 0;
  double lambda = 0.0;
  ProductPoint solution;
  double residual_x = 0.0;      // w.r.t. S, not T_n
  double residual_y = 0.0;
  double anchor_distance = 0.0;  // ||(x_0,y_0) - (x_n,y_n)||
  double law_bound = 0.0;        // d + anchor_distance / n + inner_tol
  int inner_iterations = 0;
  bool inner_converged = false;

  bool law_holds(double d) const {
    return residual_x <= law_bound && residual_y <= law_bound && law_bound >= d;
  }
};

struct NonexpansiveReport {
  std::vector<long> schedule;
  std::vector<SolveReport> subproblem_reports;
  std::vector<ProductPoint> outer_iterates;
  std::vector<SchedulePoint> points;
  ProductPoint solution;
  double d = 0.0;
  double residual_x = 0.0;
  double residual_y = 0.0;
  bool converged = false;
  /// First schedule index from which all consecutive outer iterates agree within outer_tol.
  std::optional<std::size_t> converged_index;
  bool limit_verified = false;
  std::string failure;
};

/// Geometric schedule first, 2 first, 4 first, ... up to last inclusive.
inline std::vector<long> geometric_schedule(long first = 2, long last = 1024) {
  std::vector<long> out;
  for (long n = first; n <= last; n *= 2) out.push_back(n);
  return out;
}

/// Solves T_n for each n of the schedule (warm-started) and tracks the outer iterates.
template <CyclicOperator Map>
NonexpansiveReport solve_nonexpansive(const Map& s, const ConvexSet& a, const ConvexSet& b,
                                      const ProximalPair& anchor, const std::vector<long>& schedule,
                                      double inner_tol, double outer_tol, int max_inner,
                                      std::optional<ProductPoint> start = std::nullopt) {
  if (schedule.empty()) throw InvalidArgument("solve_nonexpansive: empty schedule");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (schedule[i] < 2) throw InvalidArgument("solve_nonexpansive: schedule entries must be >= 2");
    if (i > 0 && schedule[i] <= schedule[i - 1])
      throw InvalidArgument("solve_nonexpansive: schedule must be strictly increasing");
  }
  if (!(inner_tol > 0.0) || !(outer_tol > 0.0))
    throw InvalidArgument("solve_nonexpansive: tolerances must be positive");
  const double d = anchor.dist;
  if (!contains(a, anchor.a0, kIterateMembershipTol) || !contains(b, anchor.b0, kIterateMembershipTol))
    throw InvalidArgument("solve_nonexpansive: anchor must lie in A x B");
  if (std::abs(distance(anchor.a0, anchor.b0) - d) > 1e-8 + inner_tol)
    throw InvalidArgument("solve_nonexpansive: anchor is not a proximal pair (||x0 - y0|| = " +
                          std::to_string(distance(anchor.a0, anchor.b0)) + ", d = " +
                          std::to_string(d) + ")");

  const ProductPoint anchor_pt(anchor.a0, anchor.b0, Orientation::AcrossB);
  NonexpansiveReport out;
  out.schedule = schedule;
  out.d = d;
  ProductPoint warm = start.value_or(anchor_pt);

  for (long n : schedule) {
    RegularizedMap<Map> tn(s, anchor_pt, n);
    SolveReport sub = solve_contraction(tn, a, b, warm, d, tn.lambda(), inner_tol, max_inner);
    SchedulePoint pt;
    pt.n = n;
    pt.lambda = tn.lambda();
    pt.solution = sub.solution;
    const ProductPoint img = iterate_once(s, sub.solution);
    pt.residual_x = distance(sub.solution.first, img.first);
    pt.residual_y = distance(sub.solution.second, img.second);
    pt.anchor_distance = product_distance(anchor_pt, sub.solution);
    pt.law_bound = d + pt.anchor_distance / static_cast<double>(n) + inner_tol;
    pt.inner_iterations = sub.iterations;
    pt.inner_converged = sub.converged;
    warm = sub.solution;
    out.outer_iterates.push_back(sub.solution);
    out.points.push_back(std::move(pt));
    out.subproblem_reports.push_back(std::move(sub));
  }

  const auto& last = out.points.back();
  out.solution = last.solution;
  out.residual_x = last.residual_x;
  out.residual_y = last.residual_y;
  const auto& iters = out.outer_iterates;
  std::size_t stable_from = iters.size() - 1;
  while (stable_from > 0 && product_distance(iters[stable_from], iters[stable_from - 1]) <= outer_tol)
    --stable_from;
  if (iters.size() >= 2 && stable_from < iters.size() - 1) out.converged_index = stable_from;
  out.converged = out.converged_index.has_value() &&
                  std::all_of(out.points.begin(), out.points.end(),
                              [](const SchedulePoint& p) { return p.inner_converged; });
  if (!out.converged) {
    out.failure = "schedule exhausted without outer convergence";
    return out;
  }
  out.limit_verified = verify_limit(s, out.solution, d, last.law_bound - d);
  return out;
}

}  // namespace proxipair
