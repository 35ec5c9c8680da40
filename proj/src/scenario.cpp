#include "finlab/scenario.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace finlab {

using nlohmann::json;

const std::vector<std::string>& task_names() {
  static const std::vector<std::string> names = {
      "tensors",      "curvature",   "geodesic", "distance",
      "soliton-check", "lemma-check", "bound-verify", "sweep"};
  return names;
}

namespace {

[[noreturn]] void fail(const std::string& key, const std::string& what) {
  throw ScenarioParseError("scenario key '" + key + "': " + what);
}

Vec parse_vec(const json& j, const std::string& key) {
  if (!j.is_array()) fail(key, "expected an array of numbers");
  Vec v(j.size());
  for (size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) fail(key, "expected an array of numbers");
    v[static_cast<int>(i)] = j[i].get<double>();
  }
  return v;
}

Mat parse_mat(const json& j, const std::string& key) {
  if (!j.is_array() || j.empty()) fail(key, "expected an array of rows");
  Mat m(j.size(), j[0].size());
  for (size_t i = 0; i < j.size(); ++i) {
    Vec row = parse_vec(j[i], key);
    if (row.size() != m.cols()) fail(key, "ragged matrix");
    m.row(static_cast<int>(i)) = row;
  }
  return m;
}

ChartDomain parse_domain(const json& j, int n, const std::string& key) {
  double margin = j.value("margin", 1e-9);
  std::string shape = j.value("shape", "all-space");
  ChartDomain d;
  if (shape == "all-space") {
    d = ChartDomain::all_space(n, margin);
  } else if (shape == "ball") {
    if (!j.contains("radius")) fail(key + ".radius", "ball domain needs a radius");
    d = ChartDomain::open_ball(n, j["radius"].get<double>(), margin);
  } else if (shape == "box") {
    if (!j.contains("lo") || !j.contains("hi")) fail(key, "box domain needs lo and hi");
    d = ChartDomain::open_box(parse_vec(j["lo"], key + ".lo"), parse_vec(j["hi"], key + ".hi"), margin);
  } else {
    fail(key + ".shape", "unknown shape '" + shape + "' (all-space, ball, box)");
  }
  if (j.contains("covers_manifold")) d.covers_manifold = j["covers_manifold"].get<bool>();
  return d;
}

AMatrixModel parse_a_model(const json& j, int n, const std::string& key) {
  std::string type = j.value("type", "identity");
  if (type == "identity") return ConstantMatrix{Mat::Identity(n, n)};
  if (type == "constant") {
    if (!j.contains("matrix")) fail(key + ".matrix", "constant a needs a matrix");
    return ConstantMatrix{parse_mat(j["matrix"], key + ".matrix")};
  }
  if (type == "diagonal") {
    if (!j.contains("values")) fail(key + ".values", "diagonal a needs values");
    Vec d = parse_vec(j["values"], key + ".values");
    return ConstantMatrix{Mat(d.asDiagonal())};
  }
  if (type == "sphere") return SphereStereographic{};
  fail(key + ".type", "unknown a-matrix type '" + type + "'");
}

MetricModel parse_metric(const json& j) {
  if (!j.contains("family")) fail("metric.family", "required");
  std::string family = j["family"].get<std::string>();
  int n = j.value("dimension", 2);
  if (n < 2) fail("metric.dimension", "n >= 2 required");

  if (family == "euclidean") {
    MetricModel m = MetricModel::euclidean(n);
    if (j.contains("domain")) m.domain = parse_domain(j["domain"], n, "metric.domain");
    return m;
  }
  if (family == "sphere") {
    return MetricModel::sphere(n, j.value("r_max", 20.0));
  }
  if (family == "riemannian") {
    if (!j.contains("a")) fail("metric.a", "riemannian requires an a-matrix model");
    AMatrixModel a = parse_a_model(j["a"], n, "metric.a");
    ChartDomain d = j.contains("domain") ? parse_domain(j["domain"], n, "metric.domain")
                                         : ChartDomain::all_space(n);
    if (std::holds_alternative<SphereStereographic>(a) && !j.contains("domain")) {
      d = ChartDomain::open_ball(n, 20.0);
      d.covers_manifold = false;
    }
    return MetricModel::riemannian(std::move(d), std::move(a));
  }
  if (family == "randers") {
    if (!j.contains("b")) fail("metric.b", "randers requires the one-form b");
    AMatrixModel a = j.contains("a") ? parse_a_model(j["a"], n, "metric.a")
                                     : AMatrixModel(ConstantMatrix{Mat::Identity(n, n)});
    Vec b0 = parse_vec(j["b"], "metric.b");
    Mat blin;
    if (j.contains("b_linear")) blin = parse_mat(j["b_linear"], "metric.b_linear");
    ChartDomain d = j.contains("domain") ? parse_domain(j["domain"], n, "metric.domain")
                                         : ChartDomain::all_space(n);
    return MetricModel::randers(std::move(d), std::move(a), std::move(b0), std::move(blin));
  }
  if (family == "funk") {
    return MetricModel::funk(n);
  }
  fail("metric.family", "unknown family '" + family +
                            "' (euclidean, riemannian, sphere, randers, funk)");
}

VectorFieldModel parse_field(const json& j, int n) {
  if (!j.contains("family")) fail("field.family", "required");
  std::string family = j["family"].get<std::string>();
  if (family == "zero") return VectorFieldModel::zero(n);
  if (family == "radial") {
    if (!j.contains("kappa")) fail("field.kappa", "radial field needs kappa");
    return VectorFieldModel::radial(n, j["kappa"].get<double>());
  }
  if (family == "linear") {
    Mat A = j.contains("A") ? parse_mat(j["A"], "field.A") : Mat::Zero(n, n);
    Vec c = j.contains("c") ? parse_vec(j["c"], "field.c") : Vec(Vec::Zero(n));
    return VectorFieldModel::linear(std::move(A), std::move(c));
  }
  if (family == "rotation") {
    if (n == 2) {
      if (!j.contains("rate")) fail("field.rate", "rotation (n=2) needs a rate");
      Vec r(1);
      r[0] = j["rate"].get<double>();
      return VectorFieldModel::rotation(r, 2);
    }
    if (!j.contains("axis")) fail("field.axis", "rotation (n=3) needs an axis");
    return VectorFieldModel::rotation(parse_vec(j["axis"], "field.axis"), n);
  }
  if (family == "grad-quadratic") {
    if (!j.contains("Q")) fail("field.Q", "grad-quadratic needs Q");
    return VectorFieldModel::grad_quadratic(parse_mat(j["Q"], "field.Q"));
  }
  fail("field.family", "unknown family '" + family +
                           "' (zero, linear, radial, rotation, grad-quadratic)");
}

TaskSpec parse_task(const json& j, size_t idx) {
  std::string key = "tasks[" + std::to_string(idx) + "]";
  if (!j.contains("task")) fail(key + ".task", "required");
  TaskSpec t;
  t.task = j["task"].get<std::string>();
  bool known = false;
  for (const std::string& name : task_names()) known = known || name == t.task;
  if (!known) {
    std::string valid;
    for (const std::string& name : task_names()) valid += (valid.empty() ? "" : ", ") + name;
    fail(key + ".task", "unknown task '" + t.task + "'; valid tasks: " + valid);
  }
  t.point = j.value("point", "");
  t.pair = j.value("pair", "");
  if (j.contains("direction")) t.direction = parse_vec(j["direction"], key + ".direction");
  t.length = j.value("length", 1.0);
  if (j.contains("pairs")) {
    if (j["pairs"].is_string()) {
      t.pairs_mode = j["pairs"].get<std::string>();
      if (t.pairs_mode != "random")
        fail(key + ".pairs", "expected \"random\" or a list of pair names");
    } else if (j["pairs"].is_array()) {
      for (const auto& item : j["pairs"]) t.pair_list.push_back(item.get<std::string>());
    } else {
      fail(key + ".pairs", "expected \"random\" or a list of pair names");
    }
  }
  return t;
}

}  // namespace

const Vec& Scenario::resolve_point(const std::string& name) const {
  auto it = points.find(name);
  if (it == points.end())
    throw ScenarioParseError("scenario references unknown point '" + name + "'");
  return it->second;
}

std::pair<Vec, Vec> Scenario::resolve_pair(const std::string& name) const {
  auto it = pairs.find(name);
  if (it == pairs.end())
    throw ScenarioParseError("scenario references unknown pair '" + name + "'");
  return {resolve_point(it->second.first), resolve_point(it->second.second)};
}

namespace {

Scenario parse_scenario_json(const json& j);

}  // namespace

Scenario parse_scenario_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ScenarioParseError(std::string("scenario is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ScenarioParseError("scenario root must be an object");
  try {
    return parse_scenario_json(j);
  } catch (const ScenarioParseError&) {
    throw;
  } catch (const json::exception& e) {
    throw ScenarioParseError(std::string("scenario structure: ") + e.what());
  }
}

namespace {

Scenario parse_scenario_json(const json& j) {
  Scenario sc;
  sc.seed = j.value("seed", 0ull);
  sc.threads = j.value("threads", 1u);

  if (!j.contains("metric")) fail("metric", "required");
  try {
    sc.metric = parse_metric(j["metric"]);
  } catch (const ScenarioParseError&) {
    throw;
  } catch (const std::exception& e) {
    fail("metric", e.what());
  }
  const int n = sc.metric.dim();

  if (j.contains("field")) sc.field = parse_field(j["field"], n);
  if (j.contains("lambda")) sc.lambda = j["lambda"].get<double>();

  if (j.contains("points")) {
    for (auto it = j["points"].begin(); it != j["points"].end(); ++it) {
      Vec p = parse_vec(it.value(), "points." + it.key());
      if (p.size() != n) fail("points." + it.key(), "dimension mismatch");
      sc.points[it.key()] = std::move(p);
    }
  }
  if (j.contains("pairs")) {
    for (auto it = j["pairs"].begin(); it != j["pairs"].end(); ++it) {
      const json& pr = it.value();
      if (!pr.is_array() || pr.size() != 2)
        fail("pairs." + it.key(), "expected [point, point]");
      sc.pairs[it.key()] = {pr[0].get<std::string>(), pr[1].get<std::string>()};
    }
  }

  const json sampling = j.value("sampling", json::object());
  int structure_dirs = 32;
  if (sampling.contains("structure")) {
    const json& s = sampling["structure"];
    sc.structure_per_axis = s.value("per_axis", 4);
    structure_dirs = s.value("directions", 32);
  }
  sc.structure_plan = SamplePlan::grid(sc.metric, sc.structure_per_axis, structure_dirs);

  sc.soliton_per_axis = 5;
  int soliton_dirs = 16;
  double tol_factor = 1e-5;
  if (sampling.contains("soliton")) {
    const json& s = sampling["soliton"];
    sc.soliton_per_axis = s.value("per_axis", 5);
    soliton_dirs = s.value("directions", 16);
    tol_factor = s.value("tol_factor", 1e-5);
  }
  sc.soliton_plan = SolitonSamplePlan::grid(sc.metric, sc.soliton_per_axis, soliton_dirs);
  sc.soliton_plan.tol_factor = tol_factor;

  if (sampling.contains("fan")) {
    const json& s = sampling["fan"];
    sc.fan.fan_directions = s.value("directions", 0);
    sc.fan.radial_samples = s.value("radial", 6);
    sc.fan.indicatrix_dirs = s.value("indicatrix", 16);
    sc.fan.safety_factor = s.value("safety", 1.05);
  }
  if (sampling.contains("solver")) {
    const json& s = sampling["solver"];
    sc.solver.fan_size = s.value("fan_size", 0);
    sc.solver.endpoint_tol = s.value("endpoint_tol", 1e-6);
    sc.solver.step.step = s.value("step", 1e-3);
    sc.solver.coarse_factor = s.value("coarse_factor", 8.0);
    sc.solver.refine_top = s.value("refine_top", 4);
  }
  if (sampling.contains("random_pairs")) {
    const json& s = sampling["random_pairs"];
    sc.random_pairs.count = s.value("count", 50);
    sc.random_pairs.radius = s.value("radius", 5.0);
    if (s.contains("center")) sc.random_pairs.center = parse_vec(s["center"], "sampling.random_pairs.center");
    sc.random_pairs.min_distance = s.value("min_distance", 0.0);
    sc.random_pairs.max_distance = s.value("max_distance", 0.0);
  }
  if (sc.random_pairs.center.size() == 0) sc.random_pairs.center = Vec::Zero(n);

  if (!j.contains("tasks") || !j["tasks"].is_array() || j["tasks"].empty())
    fail("tasks", "at least one task is required");
  for (size_t i = 0; i < j["tasks"].size(); ++i) sc.tasks.push_back(parse_task(j["tasks"][i], i));

  // references must resolve before anything runs
  for (const TaskSpec& t : sc.tasks) {
    if (!t.point.empty()) sc.resolve_point(t.point);
    if (!t.pair.empty()) sc.resolve_pair(t.pair);
    for (const std::string& pr : t.pair_list) sc.resolve_pair(pr);
  }
  return sc;
}

}  // namespace

Scenario parse_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioParseError("cannot open scenario file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario_text(ss.str());
}

}  // namespace finlab
