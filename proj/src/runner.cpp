#include "finlab/runner.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "finlab/rng.hpp"
#include "finlab/sampling.hpp"

namespace finlab {

using ordered_json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

ordered_json to_json(const Vec& v) {
  ordered_json j = ordered_json::array();
  for (int i = 0; i < v.size(); ++i) j.push_back(v[i]);
  return j;
}

ordered_json to_json(const Mat& m) {
  ordered_json j = ordered_json::array();
  for (int i = 0; i < m.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (int k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    j.push_back(row);
  }
  return j;
}

ordered_json to_json(const Ten3& t) {
  ordered_json j = ordered_json::array();
  for (int i = 0; i < t.dim(); ++i) {
    ordered_json plane = ordered_json::array();
    for (int a = 0; a < t.dim(); ++a) {
      ordered_json row = ordered_json::array();
      for (int b = 0; b < t.dim(); ++b) row.push_back(t(i, a, b));
      plane.push_back(row);
    }
    j.push_back(plane);
  }
  return j;
}

ordered_json verdict_json(const SolitonVerdict& v) {
  ordered_json j;
  j["classification"] = to_string(v.classification);
  j["lambda"] = v.lambda;
  j["equality"] = v.equality;
  j["inequality"] = v.inequality;
  j["max_abs_residual"] = v.max_abs_residual;
  j["max_deficit"] = v.max_deficit;
  j["tolerance"] = v.tolerance;
  j["sample_count"] = v.sample_count;
  if (v.witness_point.size() > 0) {
    j["witness_point"] = to_json(v.witness_point);
    j["witness_direction"] = to_json(v.witness_dir);
  }
  return j;
}

ordered_json bound_report_json(const BoundReport& r) {
  ordered_json j;
  j["p"] = to_json(r.p);
  j["q"] = to_json(r.q);
  j["H_p"] = r.h_p;
  j["H_q"] = r.h_q;
  j["V_norm_p"] = r.v_norm_p;
  j["V_norm_q"] = r.v_norm_q;
  j["lambda"] = r.lambda;
  j["n"] = r.n;
  j["bound"] = r.bound;
  j["measured_distance"] = r.measured_distance;
  j["distance_converged"] = r.distance_converged;
  j["holds"] = r.holds;
  j["sampling"] = {{"fan_directions", r.fan_directions},
                   {"radial_samples", r.radial_samples},
                   {"indicatrix_dirs", r.indicatrix_dirs}};
  j["note"] = r.note;
  return j;
}

struct TaskContext {
  const Scenario& sc;
  fs::path out_dir;
  Rng* rng;
  unsigned threads;
  int index;
  int* verifications;
  int* passed;
};

std::vector<std::pair<Vec, Vec>> make_random_pairs(const Scenario& sc, Rng& rng) {
  std::vector<std::pair<Vec, Vec>> pairs;
  const RandomPairsSpec& spec = sc.random_pairs;
  int guard = 0;
  while (static_cast<int>(pairs.size()) < spec.count && guard < spec.count * 200) {
    ++guard;
    Vec p = spec.center + rng.ball_point(sc.metric.dim(), spec.radius);
    Vec q = spec.center + rng.ball_point(sc.metric.dim(), spec.radius);
    if (!sc.metric.domain.contains(p) || !sc.metric.domain.contains(q)) continue;
    double dist = (p - q).norm();
    if (dist < spec.min_distance) continue;
    if (spec.max_distance > 0.0 && dist > spec.max_distance) continue;
    pairs.emplace_back(std::move(p), std::move(q));
  }
  if (static_cast<int>(pairs.size()) < spec.count)
    throw FinslerError("random pair sampling could not fill the requested count");
  return pairs;
}

void write_residual_csv(const fs::path& file, const SolitonProblem& problem,
                        const SolitonSamplePlan& plan, const CurvatureOptions& copts) {
  std::ofstream out(file);
  out.precision(17);
  const int n = problem.metric.dim();
  for (int i = 1; i <= n; ++i) out << "x_" << i << ",";
  for (int i = 1; i <= n; ++i) out << "y_" << i << ",";
  out << "residual\n";
  std::vector<Vec> dirs = direction_grid(n, plan.directions);
  for (const Vec& x : plan.points) {
    for (const Vec& u : dirs) {
      Vec y = normalize_direction(problem.metric, x, u);
      double res = soliton_residual(problem, {x, y}, copts);
      for (int i = 0; i < n; ++i) out << x[i] << ",";
      for (int i = 0; i < n; ++i) out << y[i] << ",";
      out << res << "\n";
    }
  }
}

void write_sweep_csv(const fs::path& file, const SweepSummary& summary, int n) {
  std::ofstream out(file);
  out.precision(17);
  for (int i = 1; i <= n; ++i) out << "p_" << i << ",";
  for (int i = 1; i <= n; ++i) out << "q_" << i << ",";
  out << "H_p,H_q,V_norm_p,V_norm_q,bound,distance,slack,holds,error\n";
  for (const SweepEntry& e : summary.entries) {
    if (!e.ok) {
      for (int i = 0; i < 2 * n + 9; ++i) out << ",";
      out << "\"" << e.error << "\"\n";
      continue;
    }
    const BoundReport& r = e.report;
    for (int i = 0; i < n; ++i) out << r.p[i] << ",";
    for (int i = 0; i < n; ++i) out << r.q[i] << ",";
    out << r.h_p << "," << r.h_q << "," << r.v_norm_p << "," << r.v_norm_q << ","
        << r.bound << "," << r.measured_distance << "," << (r.bound - r.measured_distance)
        << "," << (r.holds ? 1 : 0) << ",\n";
  }
}

SolitonProblem require_problem(const Scenario& sc, const std::string& task) {
  if (!sc.field.has_value() || !sc.lambda.has_value())
    throw ScenarioParseError("task '" + task + "' needs both a field and lambda");
  return {sc.metric, *sc.field, *sc.lambda};
}

PointDirection task_point_direction(const Scenario& sc, const TaskSpec& t) {
  if (t.point.empty())
    throw ScenarioParseError("task '" + t.task + "' needs a named point");
  Vec x = sc.resolve_point(t.point);
  Vec y = t.direction;
  if (y.size() == 0) {
    y = Vec::Zero(sc.metric.dim());
    y[0] = 1.0;
  }
  return {std::move(x), std::move(y)};
}

ordered_json run_task(const TaskSpec& t, TaskContext& ctx) {
  const Scenario& sc = ctx.sc;
  ordered_json out;
  out["task"] = t.task;

  if (t.task == "tensors") {
    PointDirection pd = task_point_direction(sc, t);
    out["point"] = to_json(pd.x);
    out["direction"] = to_json(pd.y);
    out["F"] = eval_F(sc.metric, pd);
    FundamentalTensor g = fundamental_tensor(sc.metric, pd);
    out["g"] = to_json(g.g);
    out["g_inverse"] = to_json(inverse_fundamental(sc.metric, pd));
    out["cartan"] = to_json(cartan_tensor(sc.metric, pd).c);
  } else if (t.task == "curvature") {
    PointDirection pd = task_point_direction(sc, t);
    out["point"] = to_json(pd.x);
    out["direction"] = to_json(pd.y);
    CurvatureOptions copts = sc.fan.curvature;
    out["christoffel"] = to_json(christoffel(sc.metric, pd, copts));
    SprayData spray = spray_coefficients(sc.metric, pd, copts);
    out["G"] = to_json(spray.G);
    out["N"] = to_json(spray.N);
    CurvatureData curv = reduced_curvature(sc.metric, pd, copts);
    out["R"] = to_json(curv.R);
    out["ric"] = curv.ric;
  } else if (t.task == "geodesic") {
    PointDirection pd = task_point_direction(sc, t);
    GeodesicPath path = integrate_geodesic(sc.metric, pd.x, pd.y, t.length, sc.solver.step);
    std::string csv = "geodesic_" + std::to_string(ctx.index) + ".csv";
    path.write_csv((ctx.out_dir / csv).string());
    out["length_requested"] = t.length;
    out["length"] = path.total_length;
    out["truncated"] = path.truncated;
    out["endpoint"] = to_json(path.x.back());
    out["csv"] = csv;
  } else if (t.task == "distance") {
    auto [p, q] = sc.resolve_pair(t.pair);
    DistanceResult d = distance(sc.metric, p, q, sc.solver);
    std::string csv = "distance_" + std::to_string(ctx.index) + "_path.csv";
    if (!d.path.empty()) d.path.write_csv((ctx.out_dir / csv).string());
    out["pair"] = t.pair;
    out["distance"] = d.distance;
    out["converged"] = d.converged;
    out["endpoint_miss"] = d.endpoint_miss;
    out["csv"] = csv;
    ++*ctx.verifications;
    if (d.converged) ++*ctx.passed;
    out["holds"] = d.converged;
  } else if (t.task == "soliton-check") {
    SolitonProblem problem = require_problem(sc, t.task);
    SolitonVerdict verdict = classify(problem, sc.soliton_plan, sc.fan.curvature, ctx.threads);
    out["verdict"] = verdict_json(verdict);
    std::string csv = "residuals_" + std::to_string(ctx.index) + ".csv";
    write_residual_csv(ctx.out_dir / csv, problem, sc.soliton_plan, sc.fan.curvature);
    out["csv"] = csv;
    ++*ctx.verifications;
    bool ok = verdict.classification != SolitonClass::NotSatisfied;
    if (ok) ++*ctx.passed;
    out["holds"] = ok;
  } else if (t.task == "lemma-check") {
    auto [p, q] = sc.resolve_pair(t.pair);
    FanOptions fan = sc.fan;
    fan.threads = ctx.threads;
    LemmaReport rep = lemma_check(sc.metric, p, q, fan, sc.solver);
    out["pair"] = t.pair;
    out["r"] = rep.r;
    out["applicable"] = rep.applicable;
    if (rep.applicable) {
      out["integral"] = rep.integral;
      out["integral_error"] = rep.integral_error;
      out["H_p_raw"] = rep.h_p;
      out["H_q_raw"] = rep.h_q;
      out["rhs"] = rep.rhs;
      out["holds"] = rep.holds;
      ++*ctx.verifications;
      if (rep.holds) ++*ctx.passed;
    }
    out["note"] = rep.note;
  } else if (t.task == "bound-verify") {
    SolitonProblem problem = require_problem(sc, t.task);
    auto [p, q] = sc.resolve_pair(t.pair);
    FanOptions fan = sc.fan;
    fan.threads = ctx.threads;
    BoundReport rep = diameter_bound(problem, p, q, fan, sc.solver, &sc.soliton_plan);
    out["pair"] = t.pair;
    out["report"] = bound_report_json(rep);
    ++*ctx.verifications;
    if (rep.holds) ++*ctx.passed;
    out["holds"] = rep.holds;
  } else if (t.task == "sweep") {
    SolitonProblem problem = require_problem(sc, t.task);
    std::vector<std::pair<Vec, Vec>> pairs;
    if (t.pairs_mode == "random") {
      pairs = make_random_pairs(sc, *ctx.rng);
    } else {
      for (const std::string& name : t.pair_list) pairs.push_back(sc.resolve_pair(name));
    }
    FanOptions fan = sc.fan;
    fan.threads = 1;  // pairs parallelize; keep inner loops serial
    SweepSummary summary = bound_sweep(problem, pairs, fan, sc.solver, ctx.threads);
    std::string csv = "sweep_" + std::to_string(ctx.index) + ".csv";
    write_sweep_csv(ctx.out_dir / csv, summary, sc.metric.dim());
    out["pairs"] = static_cast<int>(pairs.size());
    out["violations"] = summary.violations;
    out["errors"] = summary.errors;
    out["min_slack"] = pairs.empty() ? 0.0 : summary.min_slack;
    out["csv"] = csv;
    ++*ctx.verifications;
    bool ok = summary.violations == 0 && summary.errors == 0;
    if (ok) ++*ctx.passed;
    out["holds"] = ok;
  } else {
    throw ScenarioParseError("unknown task '" + t.task + "'");
  }
  return out;
}

}  // namespace

std::string tasks_help_text() {
  std::string text = "available tasks:\n";
  const std::vector<std::pair<std::string, std::string>> desc = {
      {"tensors", "F, fundamental tensor, inverse, Cartan tensor at a point-direction"},
      {"curvature", "formal Christoffel, spray, reduced curvature, Ricci scalar"},
      {"geodesic", "integrate a unit-speed geodesic and export it as CSV"},
      {"distance", "asymmetric distance between a named pair (multi-start shooting)"},
      {"soliton-check", "classify the (metric, field, lambda) soliton residual on a grid"},
      {"lemma-check", "Ricci-integral estimate along a minimal geodesic (needs r > 1)"},
      {"bound-verify", "diameter bound for one pair, with the hypothesis gate"},
      {"sweep", "bound verification over a pair list or seeded random pairs"},
  };
  for (const auto& [name, what] : desc) text += "  " + name + std::string(16 - name.size(), ' ') + what + "\n";
  return text;
}

RunOutcome run_scenario(const Scenario& sc, const std::string& out_dir,
                        const RunOverrides& overrides) {
  fs::create_directories(out_dir);
  uint64_t seed = overrides.seed.value_or(sc.seed);
  unsigned threads = overrides.threads.value_or(sc.threads);
  Rng rng(seed);

  ordered_json report;
  report["tool"] = {{"name", "finlab"}, {"version", kVersion}};
  report["settings"] = {{"seed", seed},
                        {"solver_step", sc.solver.step.step},
                        {"solver_endpoint_tol", sc.solver.endpoint_tol},
                        {"soliton_tol_factor", sc.soliton_plan.tol_factor},
                        {"fan_safety_factor", sc.fan.safety_factor}};

  auto t_start = std::chrono::steady_clock::now();
  ordered_json timings = ordered_json::array();

  int verifications = 0, passed = 0, hypothesis_violations = 0;
  bool structure_ok = true;

  // Declared family parameters must pass the structure check before any task.
  StructureReport structure = verify_structure(sc.metric, sc.structure_plan);
  structure_ok = structure.pass();
  report["structure_check"] = {
      {"pass", structure.pass()},
      {"max_homogeneity_violation", structure.max_homogeneity_violation},
      {"min_hessian_eigenvalue", structure.min_hessian_eigenvalue},
      {"max_energy_mismatch", structure.max_energy_mismatch},
      {"samples", structure.samples}};

  ordered_json tasks = ordered_json::array();
  if (structure_ok) {
    TaskContext ctx{sc, fs::path(out_dir), &rng, threads, 0, &verifications, &passed};
    for (size_t i = 0; i < sc.tasks.size(); ++i) {
      ctx.index = static_cast<int>(i);
      auto t0 = std::chrono::steady_clock::now();
      ordered_json entry;
      try {
        entry = run_task(sc.tasks[i], ctx);
      } catch (const HypothesisViolatedError& e) {
        entry["task"] = sc.tasks[i].task;
        entry["status"] = "hypothesis-violated";
        entry["error"] = e.what();
        ++hypothesis_violations;
      } catch (const ScenarioParseError&) {
        throw;
      } catch (const std::exception& e) {
        entry["task"] = sc.tasks[i].task;
        entry["status"] = "error";
        entry["error"] = e.what();
        ++verifications;  // a task that died cannot have verified anything
      }
      if (!entry.contains("status")) entry["status"] = "ok";
      auto t1 = std::chrono::steady_clock::now();
      timings.push_back(
          {{"task", sc.tasks[i].task},
           {"seconds", std::chrono::duration<double>(t1 - t0).count()}});
      std::cout << "[" << (i + 1) << "/" << sc.tasks.size() << "] " << sc.tasks[i].task << ": "
                << entry["status"].get<std::string>();
      if (entry.contains("holds")) std::cout << (entry["holds"].get<bool>() ? " (holds)" : " (FAILED)");
      std::cout << "\n";
      tasks.push_back(std::move(entry));
    }
  }
  report["tasks"] = std::move(tasks);

  bool all_hold = structure_ok && passed == verifications;
  report["summary"] = {{"structure_ok", structure_ok},
                       {"verifications", verifications},
                       {"passed", passed},
                       {"hypothesis_violations", hypothesis_violations},
                       {"all_hold", all_hold}};

  RunOutcome outcome;
  fs::path report_path = fs::path(out_dir) / "report.json";
  {
    std::ofstream out(report_path);
    out << report.dump(2) << "\n";
  }
  outcome.report_path = report_path.string();

  // timings and timestamps live in a sidecar so the canonical report stays
  // byte-identical across runs
  {
    auto now = std::chrono::system_clock::now();
    ordered_json meta;
    meta["threads"] = threads;
    meta["wall_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    meta["unix_time"] =
        std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count();
    meta["task_timings"] = std::move(timings);
    std::ofstream out(fs::path(out_dir) / "run_meta.json");
    out << meta.dump(2) << "\n";
  }

  if (hypothesis_violations > 0)
    outcome.exit_code = kRunHypothesisViolated;
  else if (!all_hold)
    outcome.exit_code = kRunVerificationFailed;
  else
    outcome.exit_code = kRunOk;
  return outcome;
}

int run_scenario_file(const std::string& scenario_path, const std::string& out_dir,
                      const RunOverrides& overrides) {
  Scenario sc;
  try {
    sc = parse_scenario_file(scenario_path);
  } catch (const ScenarioParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kRunParseError;
  }
  try {
    RunOutcome outcome = run_scenario(sc, out_dir, overrides);
    std::cout << "report: " << outcome.report_path << "\n";
    return outcome.exit_code;
  } catch (const ScenarioParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kRunParseError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRunVerificationFailed;
  }
}

}  // namespace finlab
