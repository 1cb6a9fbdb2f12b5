#include "hadinv/report_io.hpp"

namespace hadinv {

namespace {

using nlohmann::json;

json vec_to_json(const VecX& v) {
  json arr = json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

json trace_to_json(const GeodesicTrace& trace) {
  json t = json::array(), pos = json::array(), vel = json::array();
  for (std::size_t k = 0; k < trace.size(); ++k) {
    t.push_back(trace.t[k]);
    pos.push_back(vec_to_json(trace.states[k].position));
    vel.push_back(vec_to_json(trace.states[k].velocity));
  }
  return json{{"t", std::move(t)}, {"position", std::move(pos)}, {"velocity", std::move(vel)}};
}

}  // namespace

json to_json(const InversionReport& report) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["solution"] = vec_to_json(report.solution);
  j["residual"] = report.residual;
  j["method_used"] = report.method_used;
  j["ode_steps"] = report.ode_steps;
  j["polish_iters"] = report.polish_iters;
  j["trace"] = trace_to_json(report.trace);
  j["straightness_deviation"] = report.straightness_deviation;
  if (report.failure) {
    j["failure"] = json{{"kind", failure_kind_name(report.failure->kind)},
                        {"t", report.failure->t},
                        {"position", vec_to_json(report.failure->position)},
                        {"detail", report.failure->detail}};
  } else {
    j["failure"] = nullptr;
  }
  return j;
}

json to_json(const HadamardEstimate& estimate) {
  json box = json::array();
  for (const Interval& iv : estimate.box) box.push_back(json::array({iv.lo, iv.hi}));
  json j;
  j["schema_version"] = kSchemaVersion;
  j["c_hat"] = estimate.c_hat;
  j["argmin"] = vec_to_json(estimate.argmin);
  j["box"] = std::move(box);
  j["samples"] = estimate.samples;
  j["refined"] = estimate.refined;
  return j;
}

json to_json(const LipschitzProbeReport& report) {
  json violations = json::array();
  for (const LipschitzViolation& v : report.violations)
    violations.push_back(json{{"x", vec_to_json(v.x)},
                              {"y", vec_to_json(v.y)},
                              {"image_distance", v.image_distance},
                              {"bound", v.bound}});
  json j;
  j["schema_version"] = kSchemaVersion;
  j["pairs_checked"] = report.pairs_checked;
  j["violations"] = std::move(violations);
  return j;
}

}  // namespace hadinv
