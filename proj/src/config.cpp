#include "config.hpp"

#include <cmath>

#include "errors.hpp"
#include "presets.hpp"

namespace gdlab {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& why) {
  throw ConfigError("config: " + field + ": " + why);
}

const json& member(const json& j, const std::string& path, const std::string& key) {
  if (!j.contains(key)) fail(path.empty() ? key : path + "." + key, "missing required field");
  return j.at(key);
}

double get_number(const json& j, const std::string& field) {
  if (!j.is_number()) fail(field, "expected a number");
  return j.get<double>();
}

double get_positive(const json& j, const std::string& field) {
  const double v = get_number(j, field);
  if (!(v > 0.0) || !std::isfinite(v)) fail(field, "must be positive and finite");
  return v;
}

double get_nonnegative(const json& j, const std::string& field) {
  const double v = get_number(j, field);
  if (!(v >= 0.0) || !std::isfinite(v)) fail(field, "must be nonnegative and finite");
  return v;
}

std::size_t get_count(const json& j, const std::string& field, std::size_t min_value) {
  if (!j.is_number_integer() || j.get<long long>() < 0) fail(field, "expected a nonnegative integer");
  const std::size_t v = j.get<std::size_t>();
  if (v < min_value) fail(field, "must be >= " + std::to_string(min_value));
  return v;
}

std::string get_string(const json& j, const std::string& field) {
  if (!j.is_string()) fail(field, "expected a string");
  return j.get<std::string>();
}

ScheduleConfig parse_schedule(const json& j) {
  ScheduleConfig s;
  const std::string proc = get_string(member(j, "schedule", "process"), "schedule.process");
  if (proc == "vp")
    s.process = Process::VP;
  else if (proc == "ve")
    s.process = Process::VE;
  else
    fail("schedule.process", "must be 'vp' or 've'");
  if (j.contains("steps")) s.steps = get_count(j.at("steps"), "schedule.steps", 2);
  if (s.process == Process::VP) {
    if (j.contains("beta_min")) s.beta_min = get_positive(j.at("beta_min"), "schedule.beta_min");
    if (j.contains("beta_max")) s.beta_max = get_positive(j.at("beta_max"), "schedule.beta_max");
    if (!(s.beta_min < s.beta_max && s.beta_max < 1.0))
      fail("schedule.beta_min", "need 0 < beta_min < beta_max < 1");
  } else {
    if (j.contains("sigma_min")) s.sigma_min = get_positive(j.at("sigma_min"), "schedule.sigma_min");
    if (j.contains("sigma_max")) s.sigma_max = get_positive(j.at("sigma_max"), "schedule.sigma_max");
    if (!(s.sigma_min < s.sigma_max)) fail("schedule.sigma_min", "need sigma_min < sigma_max");
  }
  return s;
}

GuidanceSpec parse_guidance(const json& j) {
  GuidanceSpec g;
  const std::string method = get_string(member(j, "guidance", "method"), "guidance.method");
  if (method == "none")
    g.method = GuidanceMethod::Unconditional;
  else if (method == "exact")
    g.method = GuidanceMethod::ExactPosterior;
  else if (method == "dps")
    g.method = GuidanceMethod::Dps;
  else if (method == "dpsw")
    g.method = GuidanceMethod::DpsW;
  else
    fail("guidance.method", "must be one of none|exact|dps|dpsw");
  if (j.contains("zeta_prime")) {
    g.zeta_prime = get_number(j.at("zeta_prime"), "guidance.zeta_prime");
    if (!(g.zeta_prime > 0.0) && g.method == GuidanceMethod::Dps)
      fail("guidance.zeta_prime", "must be positive");
  }
  if (j.contains("residual_scaled")) {
    if (!j.at("residual_scaled").is_boolean()) fail("guidance.residual_scaled", "expected a boolean");
    g.residual_scaled = j.at("residual_scaled").get<bool>();
  }
  if (j.contains("enhanced")) {
    if (!j.at("enhanced").is_boolean()) fail("guidance.enhanced", "expected a boolean");
    g.enhanced = j.at("enhanced").get<bool>();
  }
  return g;
}

LinearOperator parse_operator(const json& j) {
  const std::string kind = get_string(member(j, "measurement.operator", "kind"),
                                      "measurement.operator.kind");
  if (kind == "identity") return LinearOperator::identity();
  if (kind == "mask") {
    const json& vals = member(j, "measurement.operator", "values");
    if (!vals.is_array() || vals.empty()) fail("measurement.operator.values", "expected a nonempty array");
    std::vector<int> m;
    for (const auto& v : vals) {
      if (!v.is_number_integer()) fail("measurement.operator.values", "mask entries must be integers");
      const int e = v.get<int>();
      if (e != 0 && e != 1) fail("measurement.operator.values", "mask entries must be 0 or 1");
      m.push_back(e);
    }
    return LinearOperator::mask(std::move(m));
  }
  if (kind == "diagonal") {
    const json& vals = member(j, "measurement.operator", "values");
    if (!vals.is_array() || vals.empty()) fail("measurement.operator.values", "expected a nonempty array");
    std::vector<double> d;
    for (const auto& v : vals) {
      const double e = get_number(v, "measurement.operator.values");
      if (e == 0.0) fail("measurement.operator.values", "diagonal entries must be nonzero");
      d.push_back(e);
    }
    return LinearOperator::diagonal(std::move(d));
  }
  fail("measurement.operator.kind", "must be one of identity|mask|diagonal");
}

MeasurementConfig parse_measurement(const json& j) {
  MeasurementConfig m;
  if (j.contains("operator")) m.op = parse_operator(j.at("operator"));
  if (j.contains("sigma_y")) m.sigma_y = get_nonnegative(j.at("sigma_y"), "measurement.sigma_y");
  if (j.contains("y")) {
    const json& y = j.at("y");
    if (!y.is_array() || y.empty()) fail("measurement.y", "expected a nonempty array");
    std::vector<double> vec;
    for (const auto& v : y) vec.push_back(get_number(v, "measurement.y"));
    m.y = std::move(vec);
  }
  if (j.contains("synthesize_seed"))
    m.synthesize_seed = get_count(j.at("synthesize_seed"), "measurement.synthesize_seed", 0);
  return m;
}

UmbrellaConfig parse_umbrella(const json& j) {
  UmbrellaConfig u;
  if (j.contains("center_min")) u.center_min = get_number(j.at("center_min"), "umbrella.center_min");
  if (j.contains("center_max")) u.center_max = get_number(j.at("center_max"), "umbrella.center_max");
  if (!(u.center_min < u.center_max)) fail("umbrella.center_min", "need center_min < center_max");
  if (j.contains("windows")) u.windows = get_count(j.at("windows"), "umbrella.windows", 1);
  if (j.contains("sigma_y")) u.sigma_y = get_positive(j.at("sigma_y"), "umbrella.sigma_y");
  if (j.contains("samples_per_window"))
    u.samples_per_window = get_count(j.at("samples_per_window"), "umbrella.samples_per_window", 1);
  if (j.contains("bin_min")) u.bin_min = get_number(j.at("bin_min"), "umbrella.bin_min");
  if (j.contains("bin_max")) u.bin_max = get_number(j.at("bin_max"), "umbrella.bin_max");
  if (!(u.bin_min < u.bin_max)) fail("umbrella.bin_min", "need bin_min < bin_max");
  if (j.contains("bins")) u.bins = get_count(j.at("bins"), "umbrella.bins", 2);
  if (j.contains("wham_tol")) u.wham_tol = get_positive(j.at("wham_tol"), "umbrella.wham_tol");
  if (j.contains("wham_max_iter"))
    u.wham_max_iter = get_count(j.at("wham_max_iter"), "umbrella.wham_max_iter", 1);
  return u;
}

}  // namespace

NoiseSchedule ScheduleConfig::build() const {
  return process == Process::VP ? make_vp_linear(steps, beta_min, beta_max)
                                : make_ve_geometric(steps, sigma_min, sigma_max);
}

Measurement MeasurementConfig::build(const GaussianMixture& gmm) const {
  const std::size_t opd = op.dim_or_zero();
  if (opd != 0 && opd != gmm.dim())
    throw ConfigError("config: measurement.operator.values: length must equal prior dim");
  if (y.has_value()) {
    if (y->size() != gmm.dim())
      throw ConfigError("config: measurement.y: length must equal prior dim");
    Measurement m;
    m.op = op;
    m.sigma_y = sigma_y;
    m.y = *y;
    if (m.op.kind() == OperatorKind::Mask) {
      const auto& mk = m.op.mask_values();
      for (std::size_t i = 0; i < m.y.size(); ++i)
        if (mk[i] == 0 && m.y[i] != 0.0)
          throw ConfigError("config: measurement.y: masked coordinates must be 0");
    }
    return m;
  }
  const auto x0 = sample_prior(gmm, synthesize_seed, 1)[0];
  return forward_model(x0, op, sigma_y, synthesize_seed + 1);
}

WindowSet UmbrellaConfig::window_set() const {
  WindowSet w;
  w.sigma_y = sigma_y;
  w.samples_per_window = samples_per_window;
  w.centers.resize(windows);
  if (windows == 1) {
    w.centers[0] = 0.5 * (center_min + center_max);
  } else {
    for (std::size_t k = 0; k < windows; ++k)
      w.centers[k] = center_min + (center_max - center_min) * static_cast<double>(k) /
                                      static_cast<double>(windows - 1);
  }
  return w;
}

std::vector<double> UmbrellaConfig::bin_edges() const {
  std::vector<double> edges(bins + 1);
  for (std::size_t b = 0; b <= bins; ++b)
    edges[b] = bin_min + (bin_max - bin_min) * static_cast<double>(b) / static_cast<double>(bins);
  return edges;
}

GaussianMixture ExperimentConfig::build_prior() const {
  if (prior_inline.has_value()) return *prior_inline;
  return preset_gmm(prior_preset);
}

ExperimentConfig parse_config(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  ExperimentConfig c;

  const std::string task = get_string(member(j, "", "task"), "task");
  if (task == "sample")
    c.task = Task::Sample;
  else if (task == "umbrella")
    c.task = Task::Umbrella;
  else if (task == "diagnose")
    c.task = Task::Diagnose;
  else if (task == "curves")
    c.task = Task::Curves;
  else
    fail("task", "must be one of sample|umbrella|diagnose|curves");

  const json& prior = member(j, "", "prior");
  if (prior.is_string()) {
    c.prior_preset = prior.get<std::string>();
    preset_gmm(c.prior_preset);  // validates the name
  } else if (prior.is_object()) {
    try {
      c.prior_inline = GaussianMixture::from_json(prior.dump());
    } catch (const std::exception& e) {
      fail("prior", e.what());
    }
  } else {
    fail("prior", "expected a preset name or a gmm object");
  }

  if (j.contains("schedule")) c.schedule = parse_schedule(j.at("schedule"));
  if (j.contains("guidance")) c.guidance = parse_guidance(j.at("guidance"));
  if (j.contains("measurement")) c.measurement = parse_measurement(j.at("measurement"));
  if (j.contains("umbrella")) c.umbrella = parse_umbrella(j.at("umbrella"));
  if (j.contains("diagnose")) {
    const json& dj = j.at("diagnose");
    if (dj.contains("conditions"))
      c.diagnose.conditions = get_count(dj.at("conditions"), "diagnose.conditions", 2);
    if (dj.contains("samples_per_condition"))
      c.diagnose.samples_per_condition =
          get_count(dj.at("samples_per_condition"), "diagnose.samples_per_condition", 2);
  }
  if (j.contains("curves")) {
    const json& cj = j.at("curves");
    if (cj.contains("sigma_y_list")) {
      const json& lst = cj.at("sigma_y_list");
      if (!lst.is_array() || lst.empty()) fail("curves.sigma_y_list", "expected a nonempty array");
      c.curves.sigma_y_list.clear();
      for (const auto& v : lst)
        c.curves.sigma_y_list.push_back(get_positive(v, "curves.sigma_y_list"));
    }
  }
  if (j.contains("output_dir")) c.output_dir = get_string(j.at("output_dir"), "output_dir");
  if (j.contains("master_seed")) c.master_seed = get_count(j.at("master_seed"), "master_seed", 0);
  if (j.contains("trajectories")) c.trajectories = get_count(j.at("trajectories"), "trajectories", 1);
  if (j.contains("record_trajectories")) {
    if (!j.at("record_trajectories").is_boolean()) fail("record_trajectories", "expected a boolean");
    c.record_trajectories = j.at("record_trajectories").get<bool>();
  }
  if (j.contains("jobs")) c.jobs = static_cast<unsigned>(get_count(j.at("jobs"), "jobs", 1));

  // Cross-field checks that do not need the prior dimension.
  if (c.guidance.enhanced && c.measurement.op.kind() != OperatorKind::Mask &&
      c.task == Task::Sample)
    fail("guidance.enhanced", "requires a mask operator");
  return c;
}

ExperimentConfig parse_config_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  return parse_config(j);
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  switch (c.task) {
    case Task::Sample: j["task"] = "sample"; break;
    case Task::Umbrella: j["task"] = "umbrella"; break;
    case Task::Diagnose: j["task"] = "diagnose"; break;
    case Task::Curves: j["task"] = "curves"; break;
  }
  if (c.prior_inline.has_value())
    j["prior"] = nlohmann::json::parse(c.prior_inline->to_json());
  else
    j["prior"] = c.prior_preset;

  nlohmann::json sj;
  sj["process"] = c.schedule.process == Process::VP ? "vp" : "ve";
  sj["steps"] = c.schedule.steps;
  if (c.schedule.process == Process::VP) {
    sj["beta_min"] = c.schedule.beta_min;
    sj["beta_max"] = c.schedule.beta_max;
  } else {
    sj["sigma_min"] = c.schedule.sigma_min;
    sj["sigma_max"] = c.schedule.sigma_max;
  }
  j["schedule"] = sj;

  nlohmann::json gj;
  switch (c.guidance.method) {
    case GuidanceMethod::Unconditional: gj["method"] = "none"; break;
    case GuidanceMethod::ExactPosterior: gj["method"] = "exact"; break;
    case GuidanceMethod::Dps: gj["method"] = "dps"; break;
    case GuidanceMethod::DpsW: gj["method"] = "dpsw"; break;
  }
  gj["zeta_prime"] = c.guidance.zeta_prime;
  gj["residual_scaled"] = c.guidance.residual_scaled;
  gj["enhanced"] = c.guidance.enhanced;
  j["guidance"] = gj;

  nlohmann::json mj;
  switch (c.measurement.op.kind()) {
    case OperatorKind::Identity: mj["operator"] = {{"kind", "identity"}}; break;
    case OperatorKind::Mask:
      mj["operator"] = {{"kind", "mask"}, {"values", c.measurement.op.mask_values()}};
      break;
    case OperatorKind::Diagonal:
      mj["operator"] = {{"kind", "diagonal"}, {"values", c.measurement.op.diagonal_values()}};
      break;
  }
  mj["sigma_y"] = c.measurement.sigma_y;
  if (c.measurement.y.has_value()) mj["y"] = *c.measurement.y;
  mj["synthesize_seed"] = c.measurement.synthesize_seed;
  j["measurement"] = mj;

  j["umbrella"] = {{"center_min", c.umbrella.center_min},
                   {"center_max", c.umbrella.center_max},
                   {"windows", c.umbrella.windows},
                   {"sigma_y", c.umbrella.sigma_y},
                   {"samples_per_window", c.umbrella.samples_per_window},
                   {"bin_min", c.umbrella.bin_min},
                   {"bin_max", c.umbrella.bin_max},
                   {"bins", c.umbrella.bins},
                   {"wham_tol", c.umbrella.wham_tol},
                   {"wham_max_iter", c.umbrella.wham_max_iter}};
  j["diagnose"] = {{"conditions", c.diagnose.conditions},
                   {"samples_per_condition", c.diagnose.samples_per_condition}};
  j["curves"] = {{"sigma_y_list", c.curves.sigma_y_list}};
  j["output_dir"] = c.output_dir;
  j["master_seed"] = c.master_seed;
  j["trajectories"] = c.trajectories;
  j["record_trajectories"] = c.record_trajectories;
  j["jobs"] = c.jobs;
  return j;
}

}  // namespace gdlab
