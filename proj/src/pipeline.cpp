#include "proxipair/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "proxipair/oracle.hpp"
#include "proxipair/solver.hpp"
#include "proxipair/stability.hpp"

namespace proxipair {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::optional<Stage> parse_stage(std::string_view name) {
  if (name == "run") return Stage::Run;
  if (name == "gap") return Stage::Gap;
  if (name == "solve") return Stage::Solve;
  if (name == "stability") return Stage::Stability;
  if (name == "oracle") return Stage::Oracle;
  return std::nullopt;
}

const char* to_string(Stage s) noexcept {
  switch (s) {
    case Stage::Run: return "run";
    case Stage::Gap: return "gap";
    case Stage::Solve: return "solve";
    case Stage::Stability: return "stability";
    case Stage::Oracle: return "oracle";
  }
  return "?";
}

bool PipelineResult::passed() const {
  for (const auto& c : checks)
    if (c.gating && !c.passed) return false;
  return true;
}

std::string csv_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

fs::path resolve_output_dir(const ProblemConfig& cfg, const fs::path& config_path,
                            const std::optional<fs::path>& override_dir) {
  if (override_dir) return *override_dir;
  const char* root = std::getenv(kOutputRootEnv);
  const fs::path base = root && *root ? fs::path(root) : fs::path();
  if (cfg.output_dir) {
    const fs::path p(*cfg.output_dir);
    return p.is_absolute() || base.empty() ? p : base / p;
  }
  return (base.empty() ? fs::path("proxipair-out") : base) / config_path.stem();
}

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string vec(const Vector& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.dim(); ++i) s += (i ? ", " : "") + num(v[i]);
  return s + ")";
}

std::string pair(const ProductPoint& p) { return "(" + vec(p.first) + ", " + vec(p.second) + ")"; }

json to_json(const Vector& v) {
  json a = json::array();
  for (std::size_t i = 0; i < v.dim(); ++i) a.push_back(v[i]);
  return a;
}

json to_json(const ProductPoint& p) {
  return json{{"first", to_json(p.first)}, {"second", to_json(p.second)},
              {"orientation", to_string(p.orientation)}};
}

json to_json(const ConditionReport& r) {
  json j{{"checked_pairs", r.checked_pairs}, {"violations", r.violations},
         {"worst_margin", r.worst_margin}};
  if (r.inferred_lambda) j["inferred_lambda"] = *r.inferred_lambda;
  return j;
}

const char* kContractionGroup = "contraction";
const char* kNonexpansiveGroup = "nonexpansive";
const char* kStrictConvexGroup = "strict convex";

class Runner {
 public:
  Runner(const ProblemConfig& cfg, Stage stage, const PipelineOptions& opt, std::ostream& out)
      : cfg_(cfg), stage_(stage), opt_(opt), out_(out) {}

  PipelineResult run() {
    res_.output_dir = opt_.output_dir;
    summary_["config"] = cfg_.source;
    summary_["stage"] = to_string(stage_);
    summary_["seed"] = cfg_.seed;
    summary_["dimension"] = cfg_.dimension;
    summary_["map"] = {{"family", cfg_.map.name()},
                       {"class", cfg_.map.is_contraction() ? "contraction" : "nonexpansive"}};
    if (auto l = cfg_.map.declared_lambda()) summary_["map"]["lambda"] = *l;

    run_gap();
    const bool want_solve = stage_ != Stage::Gap;
    const bool want_verify = stage_ == Stage::Run || stage_ == Stage::Solve || stage_ == Stage::Stability;
    const bool want_oracle = (stage_ == Stage::Run || stage_ == Stage::Oracle);
    if (stage_ == Stage::Oracle && !cfg_.oracle)
      throw InvalidArgument("the config has no [oracle] section; add one to run the oracle stage");
    if (stage_ == Stage::Stability && !cfg_.stability)
      throw InvalidArgument("the config has no [stability] section; add one to run the stability stage");
    if (gap_ok_) {
      if (want_verify) verify_map();
      if (want_solve) solve();
      if (want_oracle && cfg_.oracle && solved_) run_oracle();
      if ((stage_ == Stage::Run || stage_ == Stage::Stability) && cfg_.stability && solved_)
        run_stability();
    }
    finish();
    return res_;
  }

 private:
  void add(const char* group, const char* role, std::string name, bool ok, std::string detail,
           bool gating = true) {
    res_.checks.push_back({group, role, std::move(name), ok, std::move(detail), gating});
  }

  void say(const std::string& line) {
    if (!opt_.quiet) out_ << line << '\n';
  }

  const char* solve_group() const { return cfg_.map.is_contraction() ? kContractionGroup : kNonexpansiveGroup; }

  // -- gap ----------------------------------------------------------------

  void run_gap() {
    const ProximalPair gp = gap(cfg_.set_a, cfg_.set_b, cfg_.solver.gap_tol);
    d_ = gp.dist;
    pair_ = gp;
    gap_ok_ = gp.converged;
    add("gap", "conclusion", "alternating projections converged", gp.converged,
        std::to_string(gp.iterations) + " iterations");
    summary_["gap"] = {{"dist", gp.dist}, {"a0", to_json(gp.a0)}, {"b0", to_json(gp.b0)},
                       {"iterations", gp.iterations}, {"converged", gp.converged}};
    report_ << "[gap]\n"
            << "dist(A,B) = " << num(gp.dist) << "\n"
            << "proximal pair: a0 = " << vec(gp.a0) << ", b0 = " << vec(gp.b0) << "\n\n";
    say("dist=" + num(gp.dist));
    say("proximal pair: a0=" + vec(gp.a0) + " b0=" + vec(gp.b0));
  }

  // -- map verification -------------------------------------------------------

  void verify_map() {
    const auto& m = cfg_.map;
    const int n = cfg_.check_samples;
    const ConditionReport cyc = check_cyclic(m, cfg_.set_a, cfg_.set_b, n, derive_seed(cfg_.seed, 20));
    const char* group = solve_group();
    add(group, "hypothesis", "T(A,B) in B and T(B,A) in A", cyc.violations == 0,
        std::to_string(cyc.violations) + " of " + std::to_string(cyc.checked_pairs) +
            " sampled images outside the target set");
    json j{{"cyclic", to_json(cyc)}};
    if (auto lam = m.declared_lambda()) {
      const auto est = estimate_lambda(m, cfg_.set_a, cfg_.set_b, d_, n, derive_seed(cfg_.seed, 21));
      const auto chk = check_contraction(m, cfg_.set_a, cfg_.set_b, d_, *lam, n, derive_seed(cfg_.seed, 24));
      const double same = est.same_orientation.inferred_lambda.value_or(0.0);
      const double cross = est.cross_orientation.inferred_lambda.value_or(0.0);
      add(group, "hypothesis", "contraction inequality, same-orientation pairs",
          same <= *lam + 1e-9 && chk.same_orientation.violations == 0,
          std::to_string(chk.same_orientation.violations) + " violations in " +
              std::to_string(chk.same_orientation.checked_pairs) + " pairs, inferred lambda " +
              num(same) + " vs declared " + num(*lam));
      add(group, "hypothesis", "contraction inequality, cross-orientation pairs",
          cross <= *lam + 1e-9 && chk.cross_orientation.violations == 0,
          std::to_string(chk.cross_orientation.violations) + " violations in " +
              std::to_string(chk.cross_orientation.checked_pairs) + " pairs, inferred lambda " +
              num(cross) + " vs declared " + num(*lam) + " (informational)",
          false);
      j["lambda_same_orientation"] = to_json(est.same_orientation);
      j["lambda_cross_orientation"] = to_json(est.cross_orientation);
      j["contraction_same_orientation"] = to_json(chk.same_orientation);
      j["contraction_cross_orientation"] = to_json(chk.cross_orientation);
    } else {
      const auto ne = check_nonexpansive(m, cfg_.set_a, cfg_.set_b, n, derive_seed(cfg_.seed, 22));
      add(group, "hypothesis", "nonexpansive inequality, same-orientation pairs",
          ne.same_orientation.violations == 0,
          std::to_string(ne.same_orientation.violations) + " violations in " +
              std::to_string(ne.same_orientation.checked_pairs) + " pairs");
      add(group, "hypothesis", "nonexpansive inequality, cross-orientation pairs",
          ne.cross_orientation.violations == 0,
          std::to_string(ne.cross_orientation.violations) + " violations in " +
              std::to_string(ne.cross_orientation.checked_pairs) + " pairs (informational)",
          false);
      j["nonexpansive_same_orientation"] = to_json(ne.same_orientation);
      j["nonexpansive_cross_orientation"] = to_json(ne.cross_orientation);
    }
    summary_["map"]["verification"] = j;
  }

  // -- solve --------------------------------------------------------------

  ProductPoint default_start() const {
    auto [alo, ahi] = cfg_.set_a.bounding_box();
    auto [blo, bhi] = cfg_.set_b.bounding_box();
    return ProductPoint(project(cfg_.set_a, 0.5 * (alo + ahi)), project(cfg_.set_b, 0.5 * (blo + bhi)));
  }

  void solve() {
    try {
      if (cfg_.map.is_contraction())
        solve_contraction_map();
      else
        solve_nonexpansive_map();
    } catch (const MembershipError& e) {
      add(solve_group(), "hypothesis", "iterates stay in A x B / B x A", false, e.what());
    }
  }

  void solve_contraction_map() {
    const auto& sv = cfg_.solver;
    const double lambda = *cfg_.map.declared_lambda();
    const ProductPoint start = sv.start.value_or(default_start());
    const SolveReport r =
        solve_contraction(cfg_.map, cfg_.set_a, cfg_.set_b, start, d_, lambda, sv.tol, sv.max_iter);
    write_trace(r, 0, true);
    const double excess = a_priori_bound_excess(r);
    add(kContractionGroup, "conclusion", "iteration converged", r.converged,
        std::to_string(r.iterations) + " iterations" + (r.failure.empty() ? "" : "; " + r.failure));
    add(kContractionGroup, "conclusion", "coupled best proximity point (both residuals = d)", r.limit_verified,
        "residuals " + num(r.residual_x) + ", " + num(r.residual_y) + " vs d = " + num(d_));
    add(kContractionGroup, "conclusion", "limit identities within 10 tol", r.limit_identity_holds(),
        num(r.limit_identity_x) + ", " + num(r.limit_identity_y));
    add(kContractionGroup, "conclusion", "gap_n - d <= lambda^n ||z_0 - z_1||", excess <= 1e-9,
        "worst excess " + num(excess));
    add(kContractionGroup, "conclusion", "iterations within a-priori prediction + 2", r.within_prediction(),
        std::to_string(r.iterations) + " vs predicted " +
            (r.predicted_iterations ? std::to_string(*r.predicted_iterations) : std::string("n/a")));
    const MultiStartReport ms = solve_multistart(cfg_.map, cfg_.set_a, cfg_.set_b, d_, lambda, sv.tol,
                                                 sv.max_iter, sv.n_starts, derive_seed(cfg_.seed, 23));
    const double uniq_tol = std::max(1e-6, 100.0 * sv.tol);
    bool all_conv = std::all_of(ms.runs.begin(), ms.runs.end(), [](const SolveReport& x) { return x.converged; });
    const double spread = std::max(ms.max_pairwise_distance,
                                   [&] {
                                     double w = 0.0;
                                     for (const auto& x : ms.runs) w = std::max(w, product_distance(x.solution, r.solution));
                                     return w;
                                   }());
    add(kContractionGroup, "conclusion", "uniqueness across random starts", all_conv && spread <= uniq_tol,
        std::to_string(ms.runs.size()) + " starts, max pairwise distance " + num(spread));
    int warn = ms.limit_distance_warnings;
    for (const auto& x : ms.runs) warn += limit_distance_diagnostic(r, x, sv.tol);
    if (warn > 0)
      res_.warnings.push_back("iterates of different starts stay apart after their gaps settle (" +
                              std::to_string(warn) + " index pairs)");

    solution_ = r.solution;
    solved_ = r.converged;
    summary_["solve"] = {{"start", to_json(start)},
                         {"solution", to_json(r.solution)},
                         {"companion", to_json(r.companion)},
                         {"iterations", r.iterations},
                         {"predicted_iterations", r.predicted_iterations ? json(*r.predicted_iterations) : json()},
                         {"residual_x", r.residual_x},
                         {"residual_y", r.residual_y},
                         {"limit_identity_x", r.limit_identity_x},
                         {"limit_identity_y", r.limit_identity_y},
                         {"a_priori_excess", excess},
                         {"converged", r.converged},
                         {"limit_verified", r.limit_verified},
                         {"multistart_max_distance", spread}};
    report_solution(r.solution, r.residual_x, r.residual_y);
  }

  void solve_nonexpansive_map() {
    const auto& sv = cfg_.solver;
    const ProximalPair anchor = sv.anchor.value_or(pair_);
    if (sv.anchor && std::abs(anchor.dist - d_) > 1e-8)
      add(kNonexpansiveGroup, "hypothesis", "anchor is a proximal pair", false,
          "||x0 - y0|| = " + num(anchor.dist) + " but dist(A,B) = " + num(d_));
    ProximalPair a = anchor;
    a.dist = d_;
    const NonexpansiveReport r = solve_nonexpansive(cfg_.map, cfg_.set_a, cfg_.set_b, a, sv.schedule,
                                                    sv.tol, sv.outer_tol, sv.max_inner, sv.start);
    long offset = 0;
    for (const auto& sub : r.subproblem_reports) {
      write_trace(sub, offset, offset == 0);
      offset += static_cast<long>(sub.residuals_x.size());
    }
    write_schedule(r);
    bool inner_ok = true, law_ok = true;
    for (const auto& p : r.points) {
      inner_ok = inner_ok && p.inner_converged;
      law_ok = law_ok && p.law_holds(d_);
    }
    add(kNonexpansiveGroup, "conclusion", "every T_n subproblem converged", inner_ok,
        std::to_string(r.points.size()) + " schedule points");
    add(kNonexpansiveGroup, "conclusion", "residual - d <= ||anchor - z_n|| / n + tol along the schedule", law_ok, "");
    add(kNonexpansiveGroup, "conclusion", "outer iterates converged", r.converged,
        r.converged_index ? "stable from n = " + std::to_string(r.schedule[*r.converged_index]) : r.failure);
    add(kNonexpansiveGroup, "conclusion", "coupled best proximity point (both residuals = d)", r.limit_verified,
        "residuals " + num(r.residual_x) + ", " + num(r.residual_y) + " vs d = " + num(d_));
    solution_ = r.solution;
    solved_ = r.converged;
    json sched = json::array();
    for (const auto& p : r.points)
      sched.push_back({{"n", p.n}, {"residual_x", p.residual_x}, {"residual_y", p.residual_y},
                       {"law_bound", p.law_bound}, {"inner_iterations", p.inner_iterations}});
    summary_["solve"] = {{"anchor", {{"a0", to_json(a.a0)}, {"b0", to_json(a.b0)}}},
                         {"solution", to_json(r.solution)},
                         {"residual_x", r.residual_x},
                         {"residual_y", r.residual_y},
                         {"converged", r.converged},
                         {"converged_n", r.converged_index ? json(r.schedule[*r.converged_index]) : json()},
                         {"limit_verified", r.limit_verified},
                         {"schedule", sched}};
    report_solution(r.solution, r.residual_x, r.residual_y);
  }

  void report_solution(const ProductPoint& s, double rx, double ry) {
    say("solution=" + pair(s));
    say("residuals=" + num(rx) + ", " + num(ry));
    sol_lines_ << "solution: " << pair(s) << "\n"
               << "residuals: " << num(rx) << ", " << num(ry) << "\n";
  }

  void write_trace(const SolveReport& r, long offset, bool header) {
    if (header) trace_ << "iter,orientation,gap,gap_minus_d,cauchy_step,residual_x,residual_y\n";
    const std::size_t n = std::min({r.iterates.size(), r.gaps.size(), r.residuals_x.size(),
                                    r.residuals_y.size(), r.cauchy_steps.size()});
    for (std::size_t k = 0; k < n; ++k)
      trace_ << offset + static_cast<long>(k) << ',' << to_string(r.iterates[k].orientation) << ','
             << csv_number(r.gaps[k]) << ',' << csv_number(r.gaps[k] - r.d) << ','
             << csv_number(r.cauchy_steps[k]) << ',' << csv_number(r.residuals_x[k]) << ','
             << csv_number(r.residuals_y[k]) << '\n';
    has_trace_ = true;
  }

  void write_schedule(const NonexpansiveReport& r) {
    schedule_ << "n,lambda,inner_iterations,inner_converged,residual_x,residual_y,anchor_distance,law_bound,law_holds\n";
    for (const auto& p : r.points)
      schedule_ << p.n << ',' << csv_number(p.lambda) << ',' << p.inner_iterations << ','
                << (p.inner_converged ? 1 : 0) << ',' << csv_number(p.residual_x) << ','
                << csv_number(p.residual_y) << ',' << csv_number(p.anchor_distance) << ','
                << csv_number(p.law_bound) << ',' << (p.law_holds(r.d) ? 1 : 0) << '\n';
    has_schedule_ = true;
  }

  // -- stability ----------------------------------------------------------

  StabilityBound make_bound(BoundKind k, double eps) const {
    switch (k) {
      case BoundKind::Contraction: return bound_contraction(eps, *cfg_.map.declared_lambda(), d_);
      case BoundKind::Nonexpansive:
        return bound_nonexpansive(eps, d_, sup_norm_bound(cfg_.set_a), sup_norm_bound(cfg_.set_b));
      case BoundKind::StrictConvex: return bound_strict_convex(eps, d_);
    }
    throw InvalidArgument("unknown bound kind");
  }

  void run_stability() {
    const auto& st = *cfg_.stability;
    stability_ << "kind,epsilon,bound,n_samples,kept,violations,max_ratio\n";
    json rows = json::array();
    std::uint64_t k = 0;
    for (BoundKind kind : st.kinds) {
      for (double eps : st.epsilons) {
        const StabilityBound b = make_bound(kind, eps);
        const StabilityReport r = verify_stability(cfg_.map, cfg_.set_a, cfg_.set_b, solution_, b,
                                                   st.n_samples, derive_seed(cfg_.seed, 30 + k++),
                                                   oracle_candidates_);
        stability_ << to_string(kind) << ',' << csv_number(eps) << ',' << csv_number(r.bound) << ','
                   << r.n_samples << ',' << r.kept << ',' << r.violations << ','
                   << csv_number(r.max_ratio) << '\n';
        const char* group = kind == BoundKind::Contraction    ? kContractionGroup
                            : kind == BoundKind::Nonexpansive ? kNonexpansiveGroup
                                                                  : kStrictConvexGroup;
        const bool ok = r.violations == 0 && r.max_ratio <= 1.0 + 1e-9 && r.kept == r.n_samples;
        std::string detail = "eps " + num(eps) + ": bound " + num(r.bound) + ", kept " +
                             std::to_string(r.kept) + "/" + std::to_string(r.n_samples) +
                             ", violations " + std::to_string(r.violations) + ", max ratio " +
                             num(r.max_ratio);
        if (r.hypothesis_checked)
          detail += ", " + std::to_string(r.hypothesis_rejections) + " samples failed the hypothesis";
        if (r.hypothesis_checked)
          add(group, "hypothesis", "per-sample hypothesis ||x* - T(u,v)|| <= ||u - T(u,v)|| (and for y*)",
              r.kept == r.n_samples,
              "eps " + num(eps) + ": " + std::to_string(r.kept) + " samples passed, " +
                  std::to_string(r.hypothesis_rejections) + " rejected; the Euclidean norm is strictly convex");
        add(group, "conclusion", std::string("Ulam-Hyers bound (") + to_string(kind) + ")", ok, detail);
        json row{{"kind", to_string(kind)}, {"epsilon", eps},        {"bound", r.bound},
                 {"n_samples", r.n_samples}, {"kept", r.kept},       {"attempts", r.attempts},
                 {"violations", r.violations}, {"max_ratio", r.max_ratio}};
        if (r.hypothesis_checked) row["hypothesis_rejections"] = r.hypothesis_rejections;
        if (r.max_ratio_nearest) row["max_ratio_nearest"] = *r.max_ratio_nearest;
        rows.push_back(row);
        say(std::string("stability ") + to_string(kind) + " eps=" + num(eps) + ": violations=" +
            std::to_string(r.violations) + " max_ratio=" + num(r.max_ratio));
      }
    }
    summary_["stability"] = rows;
    has_stability_ = true;
  }

  // -- oracle -------------------------------------------------------------

  void run_oracle() {
    const auto& os = *cfg_.oracle;
    const OracleResult o = grid_search(cfg_.map, cfg_.set_a, cfg_.set_b, d_, os.resolution, os.threshold);
    double agree = product_distance(o.best, solution_);
    for (const auto& c : o.candidates_below_threshold) agree = std::min(agree, product_distance(c, solution_));
    const double allowed = os.resolution * std::sqrt(static_cast<double>(cfg_.dimension)) + cfg_.solver.tol;
    add("oracle", "conclusion", "grid minimum objective <= threshold", o.best_objective <= os.threshold,
        "objective " + num(o.best_objective) + " at " + pair(o.best));
    add("oracle", "conclusion", "solver solution agrees with the grid minimizer", agree <= allowed,
        "distance " + num(agree) + " (allowed " + num(allowed) + ")");
    oracle_candidates_ = o.candidates_below_threshold;
    summary_["oracle"] = {{"resolution", os.resolution},
                          {"threshold", os.threshold},
                          {"best", to_json(o.best)},
                          {"best_objective", o.best_objective},
                          {"candidate_count", o.candidate_count},
                          {"pairs_evaluated", o.pairs_evaluated},
                          {"distance_to_solution", agree}};
    say("oracle best=" + pair(o.best) + " objective=" + num(o.best_objective));
  }

  // -- output -------------------------------------------------------------

  void bound_section(std::ostream& os, const char* group, const char* title, bool applicable,
                       const std::string& why_not) {
    os << "[" << group << "] " << title << "\n";
    if (!applicable) {
      os << "  not applicable: " << why_not << "\n\n";
      return;
    }
    auto status = [&](const char* role) {
      int n = 0, bad = 0;
      for (const auto& c : res_.checks)
        if (c.group == group && c.role == role && c.gating) {
          ++n;
          bad += c.passed ? 0 : 1;
        }
      if (n == 0) return std::string("not checked in this stage");
      return bad == 0 ? std::string(std::strcmp(role, "hypothesis") == 0 ? "verified" : "held")
                      : std::string("FAILED (") + std::to_string(bad) + " of " + std::to_string(n) + ")";
    };
    os << "  hypotheses: " << status("hypothesis") << "\n";
    os << "  conclusion: " << status("conclusion") << "\n";
    for (const auto& c : res_.checks)
      if (c.group == group)
        os << "  " << (c.passed ? "PASS" : (c.gating ? "FAIL" : "note")) << "  " << c.name
           << (c.detail.empty() ? "" : ": " + c.detail) << "\n";
    os << "\n";
  }

  void finish() {
    fs::create_directories(opt_.output_dir);
    auto write = [&](const char* name, const std::string& body) {
      std::ofstream f(opt_.output_dir / name, std::ios::binary);
      f << body;
      if (!f) throw Error(std::string("cannot write ") + (opt_.output_dir / name).string());
      res_.files.push_back(name);
    };
    if (has_trace_) write("trace.csv", trace_.str());
    if (has_schedule_) write("schedule.csv", schedule_.str());
    if (has_stability_) write("stability.csv", stability_.str());

    std::ostringstream rep;
    rep << "proxipair report\n"
        << "config: " << cfg_.source << "\n"
        << "stage: " << to_string(stage_) << "\n"
        << "seed: " << cfg_.seed << "\n"
        << "map: " << cfg_.map.name() << " ("
        << (cfg_.map.is_contraction() ? "contraction, lambda " + num(*cfg_.map.declared_lambda())
                                      : std::string("nonexpansive"))
        << ")\n\n"
        << report_.str();
    if (!sol_lines_.str().empty()) rep << "[solve]\n" << sol_lines_.str() << "\n";
    const bool contraction = cfg_.map.is_contraction();
    bound_section(rep, kContractionGroup, "p-cyclic contraction: existence, uniqueness, stability", contraction,
                    "the map is declared nonexpansive");
    bound_section(rep, kNonexpansiveGroup, "p-cyclic nonexpansive: T_n scheme and stability", !contraction,
                    "the map is declared a contraction (see [contraction])");
    bool strict = cfg_.stability && std::find(cfg_.stability->kinds.begin(), cfg_.stability->kinds.end(),
                                              BoundKind::StrictConvex) != cfg_.stability->kinds.end();
    bound_section(rep, kStrictConvexGroup, "strictly convex setting: stability bound 2 eps + 2 d", strict,
                    "no strict_convex bound requested");
    bool oracle_ran = false;
    for (const auto& c : res_.checks) oracle_ran = oracle_ran || c.group == "oracle";
    if (oracle_ran) {
      rep << "[oracle]\n";
      for (const auto& c : res_.checks)
        if (c.group == "oracle")
          rep << "  " << (c.passed ? "PASS" : "FAIL") << "  " << c.name << ": " << c.detail << "\n";
      rep << "\n";
    }
    if (!gap_ok_) rep << "gap computation did not converge; later stages skipped\n\n";
    for (const auto& w : res_.warnings) rep << "warning: " << w << "\n";
    rep << "overall: " << (res_.passed() ? "PASS" : "FAIL") << "\n";
    write("report.txt", rep.str());

    json checks = json::array();
    for (const auto& c : res_.checks)
      checks.push_back({{"group", c.group}, {"role", c.role}, {"name", c.name}, {"passed", c.passed},
                        {"gating", c.gating}, {"detail", c.detail}});
    summary_["checks"] = checks;
    summary_["warnings"] = res_.warnings;
    summary_["passed"] = res_.passed();
    write("result.json", summary_.dump(2) + "\n");
  }

  const ProblemConfig& cfg_;
  Stage stage_;
  const PipelineOptions& opt_;
  std::ostream& out_;
  PipelineResult res_;
  json summary_;
  std::ostringstream report_, sol_lines_, trace_, schedule_, stability_;
  bool has_trace_ = false, has_schedule_ = false, has_stability_ = false;
  double d_ = 0.0;
  ProximalPair pair_;
  bool gap_ok_ = false;
  bool solved_ = false;
  ProductPoint solution_;
  std::vector<ProductPoint> oracle_candidates_;
};

}  // namespace

PipelineResult run_pipeline(const ProblemConfig& cfg, Stage stage, const PipelineOptions& options,
                            std::ostream& out) {
  return Runner(cfg, stage, options, out).run();
}

}  // namespace proxipair
