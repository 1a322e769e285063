#include "zkeval/costmodel.hpp"

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "zkeval/errors.hpp"
#include "zkeval/pipeline.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace zkeval {

using nlohmann::json;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string human_bytes(double b) {
  const char* units[] = {"B", "KiB", "MiB", "GiB"};
  int u = 0;
  while (b >= 1024.0 && u < 3) {
    b /= 1024.0;
    ++u;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, u == 0 ? "%.0f %s" : "%.1f %s", b, units[u]);
  return buf;
}

}  // namespace

json Measurement::to_json() const {
  return {{"label", label},
          {"params", params},
          {"macs", macs},
          {"n_con", n_con},
          {"padded_rows", padded_rows},
          {"setup_seconds", setup_seconds},
          {"witness_seconds", witness_seconds},
          {"prove_seconds", prove_seconds},
          {"verify_seconds", verify_seconds},
          {"proof_bytes", proof_bytes},
          {"pk_bytes", pk_bytes},
          {"vk_bytes", vk_bytes},
          {"peak_mem_bytes", peak_mem_bytes}};
}

Measurement Measurement::from_json(const json& j) {
  try {
    Measurement m;
    m.label = j.value("label", "");
    m.params = j.value("params", int64_t{0});
    m.macs = j.value("macs", int64_t{0});
    m.n_con = j.at("n_con").get<uint64_t>();
    m.padded_rows = j.value("padded_rows", padded_rows_for(m.n_con));
    m.setup_seconds = j.value("setup_seconds", 0.0);
    m.witness_seconds = j.value("witness_seconds", 0.0);
    m.prove_seconds = j.at("prove_seconds").get<double>();
    m.verify_seconds = j.value("verify_seconds", 0.0);
    m.proof_bytes = j.value("proof_bytes", uint64_t{0});
    m.pk_bytes = j.at("pk_bytes").get<uint64_t>();
    m.vk_bytes = j.value("vk_bytes", uint64_t{0});
    m.peak_mem_bytes = j.at("peak_mem_bytes").get<uint64_t>();
    return m;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("bad measurement: ") + e.what());
  }
}

json LinearFit::to_json() const { return {{"slope", slope}, {"intercept", intercept}, {"r2", r2}}; }

LinearFit LinearFit::from_json(const json& j) {
  return {j.at("slope").get<double>(), j.at("intercept").get<double>(), j.at("r2").get<double>()};
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw LengthMismatch("fit needs paired samples");
  if (x.size() < 2) throw InsufficientData("fit needs at least two points");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0) throw InsufficientData("fit needs distinct x values");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss_res = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    double r = y[i] - f.predict(x[i]);
    ss_res += r * r;
  }
  f.r2 = syy == 0 ? (ss_res == 0 ? 1.0 : 0.0) : 1.0 - ss_res / syy;
  return f;
}

MachineDescriptor MachineDescriptor::current() {
  MachineDescriptor m;
  char host[256] = {};
  if (gethostname(host, sizeof host - 1) == 0) m.hostname = host;
  std::ifstream cpuinfo("/proc/cpuinfo");
  for (std::string line; std::getline(cpuinfo, line);) {
    if (line.rfind("model name", 0) == 0) {
      auto pos = line.find(':');
      if (pos != std::string::npos) m.cpu = line.substr(pos + 2);
      break;
    }
  }
#if defined(__clang__)
  m.compiler = "clang " __clang_version__;
#elif defined(__GNUC__)
  m.compiler = "gcc " __VERSION__;
#endif
#ifdef _OPENMP
  m.threads = omp_get_max_threads();
#else
  m.threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
#endif
  std::time_t now = std::time(nullptr);
  char ts[32];
  std::strftime(ts, sizeof ts, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  m.timestamp = ts;
  return m;
}

json MachineDescriptor::to_json() const {
  return {{"hostname", hostname}, {"cpu", cpu}, {"compiler", compiler}, {"threads", threads}, {"timestamp", timestamp}};
}

MachineDescriptor MachineDescriptor::from_json(const json& j) {
  MachineDescriptor m;
  m.hostname = j.value("hostname", "");
  m.cpu = j.value("cpu", "");
  m.compiler = j.value("compiler", "");
  m.threads = j.value("threads", 1);
  m.timestamp = j.value("timestamp", "");
  return m;
}

json CostCoefficients::to_json() const {
  return {{"basis", "padded_rows"},
          {"prove_time", prove_time.to_json()},
          {"pk_bytes", pk_bytes.to_json()},
          {"peak_mem", peak_mem.to_json()},
          {"prove_time_vs_n_con", prove_time_ncon.to_json()},
          {"points", points},
          {"machine", machine.to_json()}};
}

CostCoefficients CostCoefficients::from_json(const json& j) {
  try {
    CostCoefficients c;
    c.prove_time = LinearFit::from_json(j.at("prove_time"));
    c.pk_bytes = LinearFit::from_json(j.at("pk_bytes"));
    c.peak_mem = LinearFit::from_json(j.at("peak_mem"));
    c.prove_time_ncon = LinearFit::from_json(j.at("prove_time_vs_n_con"));
    c.points = j.at("points").get<uint64_t>();
    c.machine = MachineDescriptor::from_json(j.at("machine"));
    return c;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("bad cost coefficients: ") + e.what());
  }
}

CostCoefficients fit(std::span<const Measurement> ms) {
  std::set<uint64_t> distinct;
  for (const auto& m : ms) distinct.insert(m.padded_rows);
  if (distinct.size() < 3)
    throw InsufficientData("cost fit needs at least 3 distinct padded row counts, got " +
                           std::to_string(distinct.size()));
  std::vector<double> rows, ncon, t, pk, mem;
  for (const auto& m : ms) {
    rows.push_back(static_cast<double>(m.padded_rows));
    ncon.push_back(static_cast<double>(m.n_con));
    t.push_back(m.prove_seconds);
    pk.push_back(static_cast<double>(m.pk_bytes));
    mem.push_back(static_cast<double>(m.peak_mem_bytes));
  }
  CostCoefficients c;
  c.prove_time = fit_line(rows, t);
  c.pk_bytes = fit_line(rows, pk);
  c.peak_mem = fit_line(rows, mem);
  c.prove_time_ncon = fit_line(ncon, t);
  c.points = ms.size();
  c.machine = MachineDescriptor::current();
  return c;
}

json CostEstimate::to_json() const {
  return {{"n_con", n_con},
          {"padded_rows", padded_rows},
          {"srs_rows", padded_rows},
          {"prove_seconds", prove_seconds},
          {"pk_bytes", pk_bytes},
          {"peak_mem_bytes", peak_mem_bytes},
          {"dataset_size", dataset_size},
          {"dataset_seconds", dataset_seconds}};
}

CostEstimate estimate(const CostCoefficients& c, uint64_t n_con, uint64_t dataset_size) {
  auto at = [](const LinearFit& f, double x) { return std::max(0.0, f.intercept + std::max(0.0, f.slope) * x); };
  CostEstimate e;
  e.n_con = n_con;
  e.padded_rows = padded_rows_for(n_con);
  const double x = static_cast<double>(e.padded_rows);
  e.prove_seconds = at(c.prove_time, x);
  e.pk_bytes = at(c.pk_bytes, x);
  e.peak_mem_bytes = at(c.peak_mem, x);
  e.dataset_size = dataset_size;
  e.dataset_seconds = e.prove_seconds * static_cast<double>(dataset_size);
  return e;
}

Measurement measure_model(const std::string& label, const Graph& g, const MeasureOptions& opts) {
  Measurement m;
  m.label = label;
  m.params = g.param_count();
  m.macs = count_macs(g);
  auto samples = random_samples(g, std::max<size_t>(1, opts.calibration_samples), opts.seed);
  CalibrationReport cal =
      opts.scale ? calibrate_at(g, samples, *opts.scale) : calibrate(g, samples, CalibrationMode::kResources);
  CompiledModel model = compile_model(g, cal);
  m.n_con = model.cs.n_con();
  m.padded_rows = model.cs.padded_rows();

  auto t0 = std::chrono::steady_clock::now();
  auto [pk, vk] = setup(model.cs, model.weights);
  m.setup_seconds = seconds_since(t0);
  m.pk_bytes = pk.serialize().size();
  m.vk_bytes = vk.serialize().size();

  t0 = std::chrono::steady_clock::now();
  Witness w = model.witness(samples[0]);
  m.witness_seconds = seconds_since(t0);

  std::vector<double> prove_t, verify_t;
  for (int r = 0; r < std::max(1, opts.repeats); ++r) {
    ProveOptions po;
    po.mode = opts.mode;
    ProveStats stats;
    Proof p = prove(pk, w, po, &stats);
    prove_t.push_back(stats.seconds);
    m.peak_mem_bytes = std::max(m.peak_mem_bytes, stats.working_set_bytes);
    Bytes bytes = p.serialize();
    m.proof_bytes = bytes.size();
    t0 = std::chrono::steady_clock::now();
    auto ok = verify(vk, bytes, w.x_tilde(model.cs), w.y_tilde(model.cs));
    verify_t.push_back(seconds_since(t0));
    if (!ok) throw InvalidProof("honest proof for " + label + " failed: " + ok.reason);
  }
  m.prove_seconds = median(prove_t);
  m.verify_seconds = median(verify_t);
  return m;
}

std::vector<Measurement> report_table(const std::vector<std::pair<std::string, Graph>>& models,
                                      const MeasureOptions& opts) {
  std::vector<Measurement> rows;
  for (const auto& [name, g] : models) rows.push_back(measure_model(name, g, opts));
  return rows;
}

std::string format_table(std::span<const Measurement> rows) {
  std::ostringstream os;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-14s %10s %10s %10s %10s %11s %11s %11s %11s %10s\n", "model", "params", "MACs",
                "n_con", "srs rows", "prove (s)", "verify (s)", "proof", "pk", "vk");
  os << buf;
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%-14s %10lld %10lld %10llu %10llu %11.4f %11.4f %11s %11s %10s\n",
                  r.label.c_str(), static_cast<long long>(r.params), static_cast<long long>(r.macs),
                  static_cast<unsigned long long>(r.n_con), static_cast<unsigned long long>(r.padded_rows),
                  r.prove_seconds, r.verify_seconds, human_bytes(static_cast<double>(r.proof_bytes)).c_str(),
                  human_bytes(static_cast<double>(r.pk_bytes)).c_str(),
                  human_bytes(static_cast<double>(r.vk_bytes)).c_str());
    os << buf;
  }
  return os.str();
}

std::string to_csv(std::span<const Measurement> rows) {
  std::ostringstream os;
  os << "label,params,macs,n_con,padded_rows,setup_seconds,witness_seconds,prove_seconds,verify_seconds,"
        "proof_bytes,pk_bytes,vk_bytes,peak_mem_bytes\n";
  os.precision(9);
  for (const auto& r : rows)
    os << r.label << ',' << r.params << ',' << r.macs << ',' << r.n_con << ',' << r.padded_rows << ','
       << r.setup_seconds << ',' << r.witness_seconds << ',' << r.prove_seconds << ',' << r.verify_seconds << ','
       << r.proof_bytes << ',' << r.pk_bytes << ',' << r.vk_bytes << ',' << r.peak_mem_bytes << '\n';
  return os.str();
}

}  // namespace zkeval
