#include "chainscape/system.hpp"

#include <cmath>
#include <json.hpp>

#include "chainscape/error.hpp"

namespace chainscape {

using nlohmann::json;

void ImagePolicy::validate() const {
  if (samples_per_axis < 2) throw InputError("samples_per_axis must be at least 2");
  if (bloat && !(*bloat >= 0.0)) throw InputError("bloat must be nonnegative");
  if (bloat_cells && !(*bloat_cells >= 0.0)) throw InputError("bloat_cells must be nonnegative");
  if (!(nudge > 0.0 && nudge < 0.5)) throw InputError("nudge must lie in (0, 0.5)");
}

void SystemSpec::validate() const {
  if (dimension == 0) throw InputError("dimension must be at least 1");
  domain.validate();
  if (domain.dimension() != dimension) throw InputError("domain dimension does not match system");
  metric.validate_for(domain);
  if (!native) {
    if (expressions.size() != dimension) {
      throw InputError("expected " + std::to_string(dimension) + " expressions, got " +
                       std::to_string(expressions.size()));
    }
    for (const auto& e : expressions) {
      if (e.max_variable() >= static_cast<int>(dimension)) {
        throw InputError("expression '" + e.source() + "' references a variable beyond x" +
                         std::to_string(dimension - 1));
      }
    }
  }
  if (kind == SystemKind::ode) {
    if (!(time_step > 0.0) || !std::isfinite(time_step)) throw InputError("time_step must be positive");
    if (integrator_substeps < 1) throw InputError("integrator_substeps must be positive");
  }
  if (image_policy) image_policy->validate();
}

void SystemSpec::evaluate(std::span<const double> x, std::span<double> out) const {
  if (native) {
    native(x, out);
    return;
  }
  for (std::size_t i = 0; i < dimension; ++i) out[i] = expressions[i].eval(x);
}

CellSet SystemSpec::support_cells(const Grid& grid) const {
  if (support) return support(grid);
  return grid.full_set();
}

namespace {

std::vector<double> number_array(const json& j, const char* what) {
  if (!j.is_array()) throw InputError(std::string(what) + " must be an array of numbers");
  std::vector<double> v;
  for (const auto& e : j) {
    if (!e.is_number()) throw InputError(std::string(what) + " must be an array of numbers");
    v.push_back(e.get<double>());
  }
  return v;
}

}  // namespace

SystemSpec spec_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw InputError(std::string("malformed JSON: ") + e.what(), e.byte);
  }
  if (!j.is_object()) throw InputError("system spec must be a JSON object");
  static const char* known[] = {"name",        "kind",   "dimension", "expressions",
                                "time_step",   "integrator_substeps", "domain", "metric"};
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw InputError("unknown key '" + key + "' in system spec");
  }
  SystemSpec spec;
  try {
    spec.name = j.value("name", std::string("unnamed"));
    const std::string kind = j.value("kind", std::string("map"));
    if (kind == "map") spec.kind = SystemKind::map;
    else if (kind == "ode") spec.kind = SystemKind::ode;
    else throw InputError("kind must be \"map\" or \"ode\"");
    if (!j.contains("dimension") || !j["dimension"].is_number_integer() || j["dimension"].get<long>() < 1) {
      throw InputError("dimension must be a positive integer");
    }
    spec.dimension = j["dimension"].get<std::size_t>();
    if (!j.contains("expressions") || !j["expressions"].is_array()) {
      throw InputError("expressions must be an array of strings");
    }
    for (const auto& e : j["expressions"]) {
      if (!e.is_string()) throw InputError("expressions must be an array of strings");
      try {
        spec.expressions.push_back(parse_expr(e.get<std::string>(), static_cast<int>(spec.dimension)));
      } catch (const ParseError& pe) {
        throw InputError("expression '" + e.get<std::string>() + "': " + pe.what(), pe.offset());
      }
    }
    if (j.contains("time_step")) {
      if (!j["time_step"].is_number()) throw InputError("time_step must be a number");
      spec.time_step = j["time_step"].get<double>();
    }
    if (j.contains("integrator_substeps")) {
      if (!j["integrator_substeps"].is_number_integer()) throw InputError("integrator_substeps must be an integer");
      spec.integrator_substeps = j["integrator_substeps"].get<int>();
    }
    if (!j.contains("domain") || !j["domain"].is_object()) throw InputError("domain {lo, hi} is required");
    for (const auto& [key, _] : j["domain"].items()) {
      if (key != "lo" && key != "hi") throw InputError("unknown key '" + key + "' in domain");
    }
    spec.domain.lo = number_array(j["domain"].value("lo", json()), "domain.lo");
    spec.domain.hi = number_array(j["domain"].value("hi", json()), "domain.hi");
    if (j.contains("metric")) {
      const json& m = j["metric"];
      if (!m.is_object()) throw InputError("metric must be an object");
      for (const auto& [key, _] : m.items()) {
        if (key != "kind" && key != "weights") throw InputError("unknown key '" + key + "' in metric");
      }
      const std::string mk = m.value("kind", std::string("euclidean"));
      if (mk == "weighted") {
        spec.metric = Metric::weighted(number_array(m.value("weights", json()), "metric.weights"));
      } else {
        if (m.contains("weights")) throw InputError("weights only apply to the weighted metric");
        spec.metric = Metric::parse(mk);
      }
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("bad system spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

std::string spec_to_json(const SystemSpec& spec) {
  json j;
  j["name"] = spec.name;
  j["kind"] = spec.kind == SystemKind::ode ? "ode" : "map";
  j["dimension"] = spec.dimension;
  json ex = json::array();
  for (const auto& e : spec.expressions) ex.push_back(e.source());
  j["expressions"] = ex;
  j["time_step"] = spec.time_step;
  j["integrator_substeps"] = spec.integrator_substeps;
  j["domain"] = {{"lo", spec.domain.lo}, {"hi", spec.domain.hi}};
  json m = {{"kind", spec.metric.kind() == MetricKind::weighted ? std::string("weighted") : spec.metric.name()}};
  if (spec.metric.kind() == MetricKind::weighted) m["weights"] = spec.metric.weights();
  j["metric"] = m;
  return j.dump(2);
}

namespace {

void require_finite(std::span<const double> x, int step) {
  for (double v : x) {
    if (!std::isfinite(v)) throw EvalError("non-finite state at step " + std::to_string(step));
  }
}

}  // namespace

void time_t_map(const SystemSpec& spec, int k, std::span<const double> p, std::span<double> out) {
  if (k < 0) throw InputError("time_t_map needs k >= 0");
  const std::size_t n = spec.dimension;
  if (p.size() != n || out.size() != n) throw InputError("point dimension does not match system");
  std::vector<double> x(p.begin(), p.end());
  if (spec.kind == SystemKind::map) {
    std::vector<double> y(n);
    for (int step = 1; step <= k; ++step) {
      try {
        spec.evaluate(x, y);
      } catch (const EvalError& e) {
        throw EvalError(std::string(e.what()) + " at step " + std::to_string(step));
      }
      require_finite(y, step);
      x.swap(y);
    }
  } else {
    const int m = spec.integrator_substeps;
    const double dt = spec.time_step / m;
    std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
    for (int step = 1; step <= k; ++step) {
      try {
        for (int s = 0; s < m; ++s) {
          spec.evaluate(x, k1);
          for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * dt * k1[i];
          spec.evaluate(tmp, k2);
          for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * dt * k2[i];
          spec.evaluate(tmp, k3);
          for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + dt * k3[i];
          spec.evaluate(tmp, k4);
          for (std::size_t i = 0; i < n; ++i) {
            x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
          }
        }
      } catch (const EvalError& e) {
        throw EvalError(std::string(e.what()) + " at step " + std::to_string(step));
      }
      require_finite(x, step);
    }
  }
  std::copy(x.begin(), x.end(), out.begin());
}

Point time_t_map(const SystemSpec& spec, int k, std::span<const double> p) {
  Point out(spec.dimension);
  time_t_map(spec, k, p, out);
  return out;
}

}  // namespace chainscape
