#include "slipflow/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "slipflow/forces.hpp"
#include "slipflow/io.hpp"

namespace slipflow {

ParseError::ParseError(int line, const std::string& message)
    : ConfigError("line " + std::to_string(line) + ": " + message), line_(line) {}

UnknownKey::UnknownKey(const std::string& key, int line)
    : ConfigError("line " + std::to_string(line) + ": unknown key '" + key + "'"), key_(key), line_(line) {}

InvalidValue::InvalidValue(const std::string& key, const std::string& message)
    : ConfigError("invalid value for '" + key + "': " + message), key_(key) {}

namespace {

constexpr std::pair<Task, std::string_view> kTasks[] = {
    {Task::SolveP, "solve_p"},         {Task::SolveM, "solve_m"},     {Task::FixedPointP, "fixed_point_p"},
    {Task::FixedPointM, "fixed_point_m"}, {Task::Optimize, "optimize"}, {Task::Stability, "stability"},
    {Task::ConvergenceStudy, "convergence_study"},
};

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& key, std::string_view text) {
  text = trim(text);
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc() || ptr != end)
    throw InvalidValue(key, "'" + std::string(text) + "' is not a valid number");
  if constexpr (std::is_floating_point_v<T>)
    if (!std::isfinite(value)) throw InvalidValue(key, "value must be finite");
  return value;
}

template <class T>
std::vector<T> parse_list(const std::string& key, std::string_view text) {
  std::vector<T> out;
  text = trim(text);
  if (text.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    out.push_back(parse_number<T>(key, text.substr(start, comma == std::string_view::npos ? text.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string format(double v) { return format_double(v); }
std::string format(int v) { return std::to_string(v); }
std::string format(std::uint64_t v) { return std::to_string(v); }
std::string format(const std::string& v) { return v; }
template <class T>
std::string format(const std::vector<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + format(v[i]);
  return out;
}

struct Field {
  std::function<void(RunConfig&, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <class T>
Field member(const char* key, T RunConfig::*m) {
  const std::string k = key;
  Field f;
  f.get = [m](const RunConfig& c) { return format(c.*m); };
  f.set = [k, m](RunConfig& c, std::string_view v) {
    if constexpr (std::is_same_v<T, std::string>) {
      if (trim(v).empty()) throw InvalidValue(k, "empty value");
      c.*m = std::string(trim(v));
    } else if constexpr (std::is_same_v<T, std::vector<double>>) {
      c.*m = parse_list<double>(k, v);
    } else if constexpr (std::is_same_v<T, std::vector<int>>) {
      c.*m = parse_list<int>(k, v);
    } else {
      c.*m = parse_number<T>(k, v);
    }
  };
  return f;
}

const std::vector<std::pair<std::string, Field>>& fields() {
  static const std::vector<std::pair<std::string, Field>> table = [] {
    std::vector<std::pair<std::string, Field>> t;
    Field task;
    task.get = [](const RunConfig& c) { return std::string(to_string(c.task)); };
    task.set = [](RunConfig& c, std::string_view v) {
      v = trim(v);
      for (const auto& [value, name] : kTasks)
        if (name == v) {
          c.task = value;
          return;
        }
      throw InvalidValue("task", "unknown task '" + std::string(v) + "'");
    };
    t.emplace_back("task", task);
#define SLIPFLOW_FIELD(name) t.emplace_back(#name, member(#name, &RunConfig::name))
    SLIPFLOW_FIELD(shape);
    SLIPFLOW_FIELD(alpha);
    SLIPFLOW_FIELD(sine_mean);
    SLIPFLOW_FIELD(sine_amplitude);
    SLIPFLOW_FIELD(sine_frequency);
    SLIPFLOW_FIELD(controls);
    t.emplace_back("shape_file", Field{[](RunConfig& c, std::string_view v) { c.shape_file = std::string(trim(v)); },
                                       [](const RunConfig& c) { return c.shape_file; }});
    SLIPFLOW_FIELD(omega);
    SLIPFLOW_FIELD(alpha_min);
    SLIPFLOW_FIELD(alpha_max);
    SLIPFLOW_FIELD(c1);
    SLIPFLOW_FIELD(c2);
    SLIPFLOW_FIELD(n_x);
    SLIPFLOW_FIELD(n_y);
    // `force = fx, fy` is shorthand for a constant force.
    Field force = member("force", &RunConfig::force);
    force.set = [inner = force.set](RunConfig& c, std::string_view v) {
      if (v.find(',') != std::string_view::npos) {
        c.force = "constant";
        c.force_vector = parse_list<double>("force", v);
      } else {
        inner(c, v);
      }
    };
    t.emplace_back("force", force);
    SLIPFLOW_FIELD(force_vector);
    SLIPFLOW_FIELD(force_amplitude);
    SLIPFLOW_FIELD(slip_bound);
    SLIPFLOW_FIELD(g0);
    SLIPFLOW_FIELD(lipschitz);
    SLIPFLOW_FIELD(t_max);
    SLIPFLOW_FIELD(phi0);
    SLIPFLOW_FIELD(aux_method);
    SLIPFLOW_FIELD(tol_uz);
    SLIPFLOW_FIELD(max_uzawa);
    SLIPFLOW_FIELD(tol_fp);
    SLIPFLOW_FIELD(max_fp);
    SLIPFLOW_FIELD(damping);
    SLIPFLOW_FIELD(formulation);
    SLIPFLOW_FIELD(cost);
    SLIPFLOW_FIELD(cost_weight);
    SLIPFLOW_FIELD(target_x);
    SLIPFLOW_FIELD(target_y);
    SLIPFLOW_FIELD(step0);
    SLIPFLOW_FIELD(shrink);
    SLIPFLOW_FIELD(budget);
    SLIPFLOW_FIELD(min_step);
    SLIPFLOW_FIELD(direction);
    SLIPFLOW_FIELD(direction_amplitude);
    SLIPFLOW_FIELD(direction_frequency);
    SLIPFLOW_FIELD(direction_controls);
    SLIPFLOW_FIELD(deltas);
    SLIPFLOW_FIELD(levels);
    SLIPFLOW_FIELD(output_dir);
    SLIPFLOW_FIELD(seed);
#undef SLIPFLOW_FIELD
    return t;
  }();
  return table;
}

void require_one_of(const std::string& key, const std::string& value, std::initializer_list<std::string_view> allowed) {
  if (std::find(allowed.begin(), allowed.end(), value) != allowed.end()) return;
  std::string list;
  for (auto a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
  throw InvalidValue(key, "'" + value + "' is not one of " + list);
}

void require(bool ok, const std::string& key, const std::string& message) {
  if (!ok) throw InvalidValue(key, message);
}

}  // namespace

std::string_view to_string(Task task) {
  for (const auto& [value, name] : kTasks)
    if (value == task) return name;
  return "?";
}

void RunConfig::validate() const {
  require_one_of("shape", shape, {"constant", "sine", "spline", "file"});
  require(shape != "spline" || controls.size() >= 4, "controls", "a spline shape needs at least 4 controls");
  require(shape != "file" || !shape_file.empty(), "shape_file", "shape = file needs a shape_file");
  require(alpha_min > 0.0, "alpha_min", "must be > 0");
  require(alpha_max > alpha_min, "alpha_max", "must exceed alpha_min");
  require(omega > alpha_max, "omega", "must exceed alpha_max");
  require(c1 > 0.0, "c1", "must be > 0");
  require(c2 > 0.0, "c2", "must be > 0");
  require(n_x >= 2, "n_x", "mesh counts must be >= 2");
  require(n_y >= 2, "n_y", "mesh counts must be >= 2");

  require_one_of("force", force, {"constant", "shear", "vortex"});
  require(force_vector.size() == 2, "force_vector", "needs exactly two components");

  require_one_of("slip_bound", slip_bound, {"constant", "linear_saturating", "weakening"});
  require(g0 > 0.0, "g0", "must be > 0");
  require(lipschitz >= 0.0, "lipschitz", "must be >= 0");
  require(t_max > 0.0, "t_max", "must be > 0");
  require(phi0 >= 0.0, "phi0", "must be >= 0");

  require_one_of("aux_method", aux_method, {"uzawa", "smoothed_newton"});
  require(tol_uz > 0.0, "tol_uz", "tolerances must be > 0");
  require(tol_fp > 0.0, "tol_fp", "tolerances must be > 0");
  require(max_uzawa >= 1, "max_uzawa", "must be >= 1");
  require(max_fp >= 1, "max_fp", "must be >= 1");
  require(damping > 0.0 && damping <= 1.0, "damping", "must lie in (0, 1]");

  require_one_of("formulation", formulation, {"p", "m"});
  require_one_of("cost", cost, {"dissipation", "stress_tracking", "trace_tracking"});
  require(cost_weight >= 0.0, "cost_weight", "must be >= 0");
  require(target_x.size() == target_y.size(), "target_y", "target_x and target_y differ in length");
  require(std::is_sorted(target_x.begin(), target_x.end()) &&
              std::adjacent_find(target_x.begin(), target_x.end()) == target_x.end(),
          "target_x", "abscissae must increase");
  if (task == Task::Optimize) {
    require(cost == "dissipation" || !target_x.empty(), "target_x", "tracking costs need a target profile");
    require(cost != "stress_tracking" || formulation == "m", "formulation", "stress tracking needs formulation m");
    require(controls.empty() || controls.size() >= 4, "controls", "the optimizer needs at least 4 controls");
  }
  require(step0 > 0.0, "step0", "must be > 0");
  require(shrink > 0.0 && shrink < 1.0, "shrink", "must lie in (0, 1)");
  require(budget >= 0, "budget", "must be >= 0");
  require(min_step > 0.0, "min_step", "tolerances must be > 0");

  require_one_of("direction", direction, {"sine", "spline"});
  require(direction != "spline" || direction_controls.size() >= 4, "direction_controls",
          "a spline direction needs at least 4 controls");
  require(task != Task::Stability || !deltas.empty(), "deltas", "the stability task needs at least one delta");
  require(!levels.empty(), "levels", "needs at least one mesh level");
  for (int n : levels) require(n >= 2, "levels", "mesh counts must be >= 2");
  require(!output_dir.empty(), "output_dir", "empty value");
}

RunConfig parse_config(std::string_view text) {
  std::map<std::string, Field> lookup;
  for (const auto& [key, field] : fields()) lookup.emplace(key, field);

  RunConfig config;
  std::map<std::string, int> seen;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, "expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    if (key.empty()) throw ParseError(line_no, "missing key before '='");
    const auto it = lookup.find(key);
    if (it == lookup.end()) throw UnknownKey(key, line_no);
    if (const auto [prev, inserted] = seen.emplace(key, line_no); !inserted)
      throw ParseError(line_no, "key '" + key + "' already set on line " + std::to_string(prev->second));
    it->second.set(config, line.substr(eq + 1));
  }
  if (!seen.count("task")) throw InvalidValue("task", "missing required key");
  config.validate();
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string to_text(const RunConfig& config) {
  std::string out;
  for (const auto& [key, field] : fields()) out += key + " = " + field.get(config) + "\n";
  return out;
}

AdmissibleSetParams admissible_params(const RunConfig& c) {
  AdmissibleSetParams p;
  p.alpha_min = c.alpha_min;
  p.alpha_max = c.alpha_max;
  p.c1 = c.c1;
  p.c2 = c.c2;
  p.omega = c.omega;
  return p;
}

ShapeCandidate shape_candidate(const RunConfig& c) {
  if (c.shape == "sine") return ShapeCandidate::sine(c.sine_mean, c.sine_amplitude, c.sine_frequency);
  if (c.shape == "spline") return ShapeCandidate::spline(c.controls);
  if (c.shape == "file") {
    const auto file = read_shape_file(c.shape_file);
    if (file.omega != c.omega)
      throw InvalidValue("shape_file", "file omega " + format_double(file.omega) + " differs from omega");
    return candidate_from_file(file);
  }
  return ShapeCandidate::constant(c.alpha);
}

BodyForce body_force(const RunConfig& c) {
  if (c.force == "shear") return shear_force(c.force_amplitude);
  if (c.force == "vortex") return vortex_force(c.force_amplitude);
  return constant_force(Vec2(c.force_vector[0], c.force_vector[1]));
}

SlipBound slip_bound(const RunConfig& c) {
  if (c.slip_bound == "linear_saturating") return SlipBound::linear_saturating(c.g0, c.lipschitz, c.t_max);
  if (c.slip_bound == "weakening") return SlipBound::weakening(c.g0, c.lipschitz, c.t_max);
  return SlipBound::constant(c.g0);
}

FixedPointOptions fixed_point_options(const RunConfig& c) {
  FixedPointOptions o;
  o.tol = c.tol_fp;
  o.max_it = c.max_fp;
  o.damping = c.damping;
  o.inner.tol = c.tol_uz;
  o.inner.max_iterations = c.max_uzawa;
  o.inner.method = c.aux_method == "smoothed_newton" ? AuxMethod::SmoothedNewton : AuxMethod::Uzawa;
  return o;
}

SolverConfig solver_config(const RunConfig& c) {
  SolverConfig s;
  s.formulation = c.formulation == "m" ? Formulation::M : Formulation::P;
  s.nx = c.n_x;
  s.ny = c.n_y;
  s.force = body_force(c);
  s.bound = slip_bound(c);
  s.fixed_point = fixed_point_options(c);
  s.phi0 = c.phi0;
  return s;
}

CostSpec cost_spec(const RunConfig& c) {
  CostSpec s;
  s.kind = c.cost == "stress_tracking"  ? CostSpec::Kind::StressTracking
           : c.cost == "trace_tracking" ? CostSpec::Kind::TraceTracking
                                        : CostSpec::Kind::Dissipation;
  s.target = {c.target_x, c.target_y};
  s.weight = c.cost_weight;
  return s;
}

}  // namespace slipflow
