#include "zkeval/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "zkeval/circuit.hpp"
#include "zkeval/errors.hpp"
#include "zkeval/quantized.hpp"

namespace zkeval {

using nlohmann::json;

const char* mode_name(CalibrationMode m) { return m == CalibrationMode::kAccuracy ? "accuracy" : "resources"; }

CalibrationMode mode_from_name(const std::string& s) {
  if (s == "accuracy") return CalibrationMode::kAccuracy;
  if (s == "resources") return CalibrationMode::kResources;
  throw InvalidArgument("unknown calibration mode '" + s + "' (expected accuracy or resources)");
}

json CalibrationReport::to_json() const {
  json j;
  j["mode"] = mode_name(mode);
  j["scale"] = scale;
  j["error_bound"] = error_bound;
  j["max_rel_error"] = max_rel_error;
  j["mean_rel_error"] = mean_rel_error;
  j["sample_count"] = sample_count;
  j["node_scales"] = node_scales;
  j["weight_scales"] = weight_scales;
  j["ranges"] = ranges;
  json sw = json::array();
  for (const auto& p : sweep)
    sw.push_back({{"scale", p.scale}, {"max_rel_error", p.overflow ? json(nullptr) : json(p.max_rel_error)},
                  {"mean_rel_error", p.overflow ? json(nullptr) : json(p.mean_rel_error)}, {"overflow", p.overflow}});
  j["sweep"] = sw;
  json tb = json::array();
  for (const auto& t : tables)
    tb.push_back({{"fn", t.fn}, {"param", t.param}, {"lo", t.lo}, {"hi", t.hi}, {"size", t.size}});
  j["tables"] = tb;
  j["n_con"] = n_con;
  j["padded_rows"] = padded_rows;
  return j;
}

CalibrationReport CalibrationReport::from_json(const json& j) {
  try {
    CalibrationReport r;
    r.mode = mode_from_name(j.at("mode").get<std::string>());
    r.scale = j.at("scale").get<int>();
    r.error_bound = j.at("error_bound").get<double>();
    r.max_rel_error = j.at("max_rel_error").get<double>();
    r.mean_rel_error = j.value("mean_rel_error", 0.0);
    r.sample_count = j.value("sample_count", size_t{0});
    r.node_scales = j.at("node_scales").get<std::map<std::string, int>>();
    r.weight_scales = j.at("weight_scales").get<std::map<std::string, int>>();
    r.ranges = j.at("ranges").get<std::map<std::string, double>>();
    for (const auto& p : j.value("sweep", json::array())) {
      ScalePoint sp;
      sp.scale = p.at("scale").get<int>();
      sp.overflow = p.value("overflow", false);
      if (!sp.overflow) {
        sp.max_rel_error = p.at("max_rel_error").get<double>();
        sp.mean_rel_error = p.at("mean_rel_error").get<double>();
      }
      r.sweep.push_back(sp);
    }
    for (const auto& t : j.value("tables", json::array()))
      r.tables.push_back({t.at("fn").get<std::string>(), t.at("param").get<int>(), t.at("lo").get<int64_t>(),
                          t.at("hi").get<int64_t>(), t.at("size").get<uint64_t>()});
    r.n_con = j.value("n_con", uint64_t{0});
    r.padded_rows = j.value("padded_rows", uint64_t{0});
    if (r.scale < 0 || r.scale > 30) throw SchemaError("settings scale out of range");
    return r;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed settings document: ") + e.what());
  }
}

int64_t CalibrationReport::raw_bound(const std::string& ref, int at_scale) const {
  auto it = ranges.find(ref);
  if (it == ranges.end()) throw SchemaError("settings carry no range for '" + ref + "'");
  long double v = std::ceil(std::ldexp(static_cast<long double>(it->second), at_scale)) + 1.0L;
  if (v >= static_cast<long double>(Fe::kHalfRange) / 4) throw OverflowError("range of '" + ref + "' exceeds field headroom");
  return static_cast<int64_t>(v);
}

namespace {

struct FloatRun {
  std::vector<std::vector<double>> outputs;  // per sample, concatenated circuit outputs
  std::map<std::string, double> ranges;
};

FloatRun run_float(const Graph& lowered, const std::vector<Sample>& samples, double headroom) {
  FloatRun fr;
  for (const auto& s : samples) {
    auto vals = infer_float_all(lowered, s);
    for (const auto& in : lowered.inputs) {
      double& r = fr.ranges[in.name];
      for (double v : vals.at(in.name).data) r = std::max(r, std::fabs(v));
    }
    for (const auto& n : lowered.nodes) {
      double& r = fr.ranges[n.id];
      for (double v : vals.at(n.id).data) {
        if (!std::isfinite(v)) throw CalibrationFailure("non-finite value at '" + n.id + "' during calibration");
        r = std::max(r, std::fabs(v));
      }
    }
    std::vector<double> out;
    for (const auto& o : lowered.outputs) {
      const auto& t = vals.at(circuit_output_ref(lowered, o));
      out.insert(out.end(), t.data.begin(), t.data.end());
    }
    fr.outputs.push_back(std::move(out));
  }
  for (auto& [ref, r] : fr.ranges) r *= headroom;
  return fr;
}

ScalePoint evaluate_scale(const Graph& lowered, const std::vector<Sample>& samples, const FloatRun& fr, int s) {
  ScalePoint p;
  p.scale = s;
  try {
    QuantPlan plan = plan_quantization(lowered, s);
    double total = 0.0;
    for (size_t i = 0; i < samples.size(); ++i) {
      auto vals = run_reference_quantized(lowered, plan, samples[i]);
      std::vector<double> q;
      for (const auto& o : lowered.outputs)
        for (int64_t raw : vals.at(circuit_output_ref(lowered, o))) q.push_back(decode_raw(raw, s));
      double e = relative_error(q, fr.outputs[i]);
      p.max_rel_error = std::max(p.max_rel_error, e);
      total += e;
    }
    p.mean_rel_error = total / static_cast<double>(samples.size());
  } catch (const OverflowError&) {
    p.overflow = true;
    p.max_rel_error = p.mean_rel_error = std::numeric_limits<double>::infinity();
  }
  return p;
}

void check_samples(const Graph& g, const std::vector<Sample>& samples) {
  if (samples.empty()) throw CalibrationFailure("calibration needs at least one sample");
  for (const auto& s : samples) {
    if (s.size() != g.inputs.size()) throw ShapeError("calibration sample has the wrong number of inputs");
    for (size_t i = 0; i < s.size(); ++i)
      if (s[i].shape != g.inputs[i].shape && static_cast<int64_t>(s[i].data.size()) != shape_size(g.inputs[i].shape))
        throw ShapeError("calibration sample for '" + g.inputs[i].name + "' expects shape " +
                         shape_str(g.inputs[i].shape));
  }
}

CalibrationReport finish_report(const Graph& g, const Graph& lowered, const FloatRun& fr, size_t n_samples,
                                std::vector<ScalePoint> sweep, const ScalePoint& chosen, CalibrationMode mode,
                                double bound) {
  CalibrationReport rep;
  rep.mode = mode;
  rep.scale = chosen.scale;
  rep.error_bound = bound;
  rep.max_rel_error = chosen.max_rel_error;
  rep.mean_rel_error = chosen.mean_rel_error;
  rep.sample_count = n_samples;
  rep.sweep = std::move(sweep);
  rep.ranges = fr.ranges;
  QuantPlan plan = plan_quantization(lowered, chosen.scale);
  rep.weight_scales = plan.weight_scales;
  for (const auto& n : g.nodes) rep.node_scales[n.id] = chosen.scale;
  for (const auto& n : lowered.nodes) rep.node_scales[n.id] = chosen.scale;

  ConstraintSystem cs = lower_graph(g, rep);
  rep.n_con = cs.n_con();
  rep.padded_rows = cs.padded_rows();
  for (const auto& t : cs.tables) rep.tables.push_back({lookup_fn_name(t.fn), t.param, t.lo, t.hi, t.size()});
  return rep;
}

}  // namespace

CalibrationReport calibrate(const Graph& g, const std::vector<Sample>& samples, CalibrationMode mode,
                            const CalibrationOptions& opts) {
  check_samples(g, samples);
  if (opts.min_scale < 0 || opts.max_scale < opts.min_scale) throw InvalidArgument("invalid scale search range");
  const double bound = mode == CalibrationMode::kAccuracy ? opts.accuracy_bound : opts.resources_bound;
  Graph lowered = lower_to_einsum(g);
  FloatRun fr = run_float(lowered, samples, opts.headroom);

  std::vector<ScalePoint> sweep;
  for (int s = opts.min_scale; s <= opts.max_scale; ++s) sweep.push_back(evaluate_scale(lowered, samples, fr, s));
  // The smallest accurate scale whose lookup tables also fit under the cap.
  std::string table_note;
  for (const auto& p : sweep) {
    if (p.overflow || p.max_rel_error > bound) continue;
    try {
      return finish_report(g, lowered, fr, samples.size(), sweep, p, mode, bound);
    } catch (const DomainError& e) {
      if (table_note.empty()) table_note = "; scale " + std::to_string(p.scale) + " meets it but " + e.what();
    }
  }
  bool all_overflow = std::all_of(sweep.begin(), sweep.end(), [](const ScalePoint& p) { return p.overflow; });
  if (all_overflow) throw OverflowError("every candidate scale overflows the field");
  throw CalibrationFailure("no scale in [" + std::to_string(opts.min_scale) + ", " + std::to_string(opts.max_scale) +
                           "] keeps the relative error within " + std::to_string(bound) + table_note);
}

CalibrationReport calibrate_at(const Graph& g, const std::vector<Sample>& samples, int scale,
                               const CalibrationOptions& opts) {
  check_samples(g, samples);
  Graph lowered = lower_to_einsum(g);
  FloatRun fr = run_float(lowered, samples, opts.headroom);
  ScalePoint p = evaluate_scale(lowered, samples, fr, scale);
  if (p.overflow) throw OverflowError("scale " + std::to_string(scale) + " overflows the field");
  return finish_report(g, lowered, fr, samples.size(), {p}, p, CalibrationMode::kResources, opts.resources_bound);
}

}  // namespace zkeval
