#include "zkeval/cli.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "zkeval/attestation.hpp"
#include "zkeval/calibrate.hpp"
#include "zkeval/challenge.hpp"
#include "zkeval/costmodel.hpp"
#include "zkeval/errors.hpp"
#include "zkeval/fixtures.hpp"
#include "zkeval/pipeline.hpp"
#include "zkeval/prover.hpp"
#include "zkeval/witness.hpp"

namespace zkeval::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Verification-style failures that map to exit status 1.
class Rejected : public Error {
 public:
  Rejected(std::string code, const std::string& message, json payload = json::object())
      : Error(std::move(code), message), payload_(std::move(payload)) {}
  const json& payload() const { return payload_; }

 private:
  json payload_;
};

struct Context {
  std::ostream& out;
  std::ostream& err;
  bool json_mode = false;
  fs::path workdir;

  fs::path path(const std::string& p) const {
    fs::path q(p);
    return q.is_absolute() ? q : workdir / q;
  }
  void note(const std::string& msg) const {
    if (!json_mode) out << msg << '\n';
  }
};

Bytes read_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw IoError("cannot read " + p.string());
  return Bytes(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
}

std::string read_text(const fs::path& p) {
  Bytes b = read_file(p);
  return std::string(b.begin(), b.end());
}

json read_json(const fs::path& p) {
  try {
    return json::parse(read_text(p));
  } catch (const json::parse_error& e) {
    throw SchemaError(p.string() + ": " + e.what());
  }
}

// Write to a temporary then rename, so an interrupted stage never leaves a
// half-written artifact behind.
void write_file(const fs::path& p, std::span<const uint8_t> data) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  fs::path tmp = p;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot write " + p.string());
    f.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
    if (!f) throw IoError("short write to " + p.string());
  }
  fs::rename(tmp, p);
}

void write_text(const fs::path& p, const std::string& s) {
  write_file(p, std::span<const uint8_t>(reinterpret_cast<const uint8_t*>(s.data()), s.size()));
}

std::string file_digest(const fs::path& p) { return to_hex(sha256(read_file(p))); }

// Content-addressed stage stamps: a stage is up to date when its stamp
// records the same input digests and every output still hashes the same.
struct Stamp {
  fs::path file;
  json inputs;

  bool current(const std::vector<fs::path>& outputs) const {
    if (!fs::exists(file)) return false;
    json s;
    try {
      s = json::parse(read_text(file));
    } catch (...) {
      return false;
    }
    if (s.value("inputs", json()) != inputs) return false;
    const json& outs = s.value("outputs", json::object());
    if (outs.size() != outputs.size()) return false;
    for (const auto& o : outputs) {
      if (!fs::exists(o) || !outs.contains(o.filename().string())) return false;
      if (outs.at(o.filename().string()) != file_digest(o)) return false;
    }
    return true;
  }
  void save(const std::vector<fs::path>& outputs) const {
    json outs = json::object();
    for (const auto& o : outputs) outs[o.filename().string()] = file_digest(o);
    write_text(file, json{{"inputs", inputs}, {"outputs", outs}}.dump(2));
  }
};

std::string entry_file(size_t i, const char* ext) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04zu.%s", i, ext);
  return buf;
}

// Files in `dir` with extension `ext`, sorted by name.
std::vector<fs::path> list_dir(const fs::path& dir, const std::string& ext) {
  if (!fs::is_directory(dir)) throw IoError(dir.string() + " is not a directory");
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ext) out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

size_t index_of(const fs::path& p) {
  try {
    return static_cast<size_t>(std::stoull(p.stem().string()));
  } catch (...) {
    throw SchemaError("artifact name " + p.filename().string() + " does not carry a sample index");
  }
}

ProvingKey load_pk(const fs::path& p) { return ProvingKey::deserialize(read_file(p)); }
VerificationKey load_vk(const fs::path& p) { return VerificationKey::deserialize(read_file(p)); }

void check_circuit_file(const Context& ctx, const std::string& circuit, const Digest& expected) {
  if (circuit.empty()) return;
  Digest d = ConstraintSystem::deserialize(read_file(ctx.path(circuit))).digest();
  if (d != expected) throw WitnessMismatch("stale key: " + circuit + " does not match the key's circuit digest");
}

std::vector<Fe> instance_for_inputs(const VerificationKey& vk, const Sample& inputs) {
  std::vector<Fe> x;
  for (const auto& t : inputs)
    for (double v : t.data) x.push_back(Fe::from_signed(encode_raw(v, vk.scale)));
  return x;
}

json digest_list(std::span<const Digest> ds) {
  json a = json::array();
  for (const auto& d : ds) a.push_back(to_hex(d));
  return a;
}

// ---- subcommands ----

struct CalibrateArgs {
  std::string graph, data, out = "settings.json", mode = "resources";
  size_t random = 0;
  uint64_t seed = 1;
  int min_scale = 4, max_scale = 16;
};

json cmd_calibrate(const Context& ctx, const CalibrateArgs& a) {
  fs::path graph = ctx.path(a.graph), out = ctx.path(a.out);
  Stamp stamp{out.string() + ".stamp",
              {{"graph", file_digest(graph)},
               {"data", a.data.empty() ? "" : file_digest(ctx.path(a.data))},
               {"random", a.random},
               {"seed", a.seed},
               {"mode", a.mode},
               {"scales", {a.min_scale, a.max_scale}}}};
  if (stamp.current({out})) {
    ctx.note("calibrate: up to date");
    json r = read_json(out);
    return {{"up_to_date", true}, {"scale", r.at("scale")}, {"settings", out.string()}};
  }
  Graph g = load_graph_file(graph.string());
  std::vector<Sample> samples;
  if (!a.data.empty()) samples = fixtures::Dataset::load(ctx.path(a.data).string()).inputs;
  if (a.random > 0) {
    auto extra = random_samples(g, a.random, a.seed);
    samples.insert(samples.end(), extra.begin(), extra.end());
  }
  if (samples.empty()) throw InvalidArgument("calibrate needs --data or --random samples");
  CalibrationOptions opts;
  opts.min_scale = a.min_scale;
  opts.max_scale = a.max_scale;
  CalibrationReport rep = calibrate(g, samples, mode_from_name(a.mode), opts);
  write_text(out, rep.to_json().dump(2));
  stamp.save({out});
  ctx.note("calibrate: scale " + std::to_string(rep.scale) + ", max relative error " +
           std::to_string(rep.max_rel_error) + ", n_con " + std::to_string(rep.n_con) + " -> " + out.string());
  return {{"up_to_date", false},
          {"scale", rep.scale},
          {"max_rel_error", rep.max_rel_error},
          {"error_bound", rep.error_bound},
          {"n_con", rep.n_con},
          {"padded_rows", rep.padded_rows},
          {"settings", out.string()}};
}

struct CompileArgs {
  std::string graph, settings, out_dir = ".";
  uint32_t lambda = 128;
  double spot_fraction = 0.02;
};

json cmd_compile(const Context& ctx, const CompileArgs& a) {
  fs::path graph = ctx.path(a.graph), settings = ctx.path(a.settings), dir = ctx.path(a.out_dir);
  fs::path circuit = dir / "circuit.bin", pk_path = dir / "pk.bin", vk_path = dir / "vk.bin";
  Stamp stamp{dir / "compile.stamp",
              {{"graph", file_digest(graph)},
               {"settings", file_digest(settings)},
               {"lambda", a.lambda},
               {"spot_fraction", a.spot_fraction}}};
  auto summary = [&](const VerificationKey& vk, bool up) {
    return json{{"up_to_date", up},
                {"n_con", vk.n_con},
                {"padded_rows", vk.padded_rows},
                {"circuit_digest", to_hex(vk.circuit_digest)},
                {"weight_hash", to_hex(vk.weight_hash)},
                {"vk_digest", to_hex(vk.digest())},
                {"pk_bytes", fs::file_size(pk_path)},
                {"vk_bytes", fs::file_size(vk_path)},
                {"circuit", circuit.string()},
                {"pk", pk_path.string()},
                {"vk", vk_path.string()}};
  };
  if (stamp.current({circuit, pk_path, vk_path})) {
    ctx.note("compile: up to date");
    return summary(load_vk(vk_path), true);
  }
  Graph g = load_graph_file(graph.string());
  CalibrationReport cal = CalibrationReport::from_json(read_json(settings));
  CompiledModel m = compile_model(g, cal);
  auto [pk, vk] = setup(m.cs, m.weights, SetupOptions{a.lambda, a.spot_fraction});
  write_file(circuit, m.cs.serialize());
  write_file(pk_path, pk.serialize());
  write_file(vk_path, vk.serialize());
  stamp.save({circuit, pk_path, vk_path});
  ctx.note("compile: n_con " + std::to_string(vk.n_con) + ", padded rows " + std::to_string(vk.padded_rows) +
           ", H(W) " + to_hex(vk.weight_hash).substr(0, 16) + "...");
  return summary(vk, false);
}

struct WitnessArgs {
  std::string pk, data, out = "witnesses", circuit;
  size_t limit = 0;
};

json cmd_witness(const Context& ctx, const WitnessArgs& a) {
  fs::path pk_path = ctx.path(a.pk), data = ctx.path(a.data), dir = ctx.path(a.out);
  Stamp stamp{dir / "witness.stamp", {{"pk", file_digest(pk_path)}, {"data", file_digest(data)}, {"limit", a.limit}}};
  auto ds = fixtures::Dataset::load(data.string());
  const size_t n = a.limit ? std::min(a.limit, ds.size()) : ds.size();
  std::vector<fs::path> outs;
  for (size_t i = 0; i < n; ++i) {
    outs.push_back(dir / entry_file(i, "wit"));
    outs.push_back(dir / entry_file(i, "json"));
  }
  if (stamp.current(outs)) {
    ctx.note("witness: up to date");
    return {{"up_to_date", true}, {"count", n}, {"dir", dir.string()}};
  }
  ProvingKey pk = load_pk(pk_path);
  check_circuit_file(ctx, a.circuit, pk.vk.circuit_digest);
  const ConstraintSystem& cs = pk.cs;
  auto t0 = std::chrono::steady_clock::now();
  for (size_t i = 0; i < n; ++i) {
    Witness w = make_witness(cs, pk.vk.circuit_digest, pk.weights, pk.vk.weight_hash,
                             instance_for(cs, ds.inputs[i], pk.vk.weight_hash));
    write_file(dir / entry_file(i, "wit"), w.serialize());
    // The served prediction, available before any proof exists.
    json pred = {{"index", i}, {"witness_digest", to_hex(w.digest())}};
    auto outputs = decode_outputs(cs, w.y_tilde(cs));
    json vals = json::array();
    for (const auto& t : outputs) vals.push_back(t.data);
    pred["outputs"] = vals;
    if (!cs.output_argmax.empty() && cs.output_argmax[0]) pred["class"] = argmax_class(w.y_tilde(cs));
    write_text(dir / entry_file(i, "json"), pred.dump());
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  stamp.save(outs);
  ctx.note("witness: " + std::to_string(n) + " witnesses in " + std::to_string(secs) + " s -> " + dir.string());
  return {{"up_to_date", false}, {"count", n}, {"seconds", secs}, {"dir", dir.string()}};
}

struct ProveArgs {
  std::string pk, witnesses = "witnesses", out = "proofs", mode = "spot_check", circuit;
  int jobs = 1;
};

json cmd_prove(const Context& ctx, const ProveArgs& a) {
  fs::path pk_path = ctx.path(a.pk), wdir = ctx.path(a.witnesses), dir = ctx.path(a.out);
  const ProofMode mode = proof_mode_from_name(a.mode);
  auto wits = list_dir(wdir, ".wit");
  if (wits.empty()) throw InvalidArgument("no witnesses in " + wdir.string());
  json in = {{"pk", file_digest(pk_path)}, {"mode", proof_mode_name(mode)}};
  json wd = json::object();
  for (const auto& w : wits) wd[w.filename().string()] = file_digest(w);
  in["witnesses"] = wd;
  Stamp stamp{dir / "prove.stamp", in};
  std::vector<fs::path> outs;
  for (const auto& w : wits) outs.push_back(dir / entry_file(index_of(w), "proof"));
  if (stamp.current(outs)) {
    ctx.note("prove: up to date");
    return {{"up_to_date", true}, {"count", outs.size()}, {"dir", dir.string()}};
  }
  ProvingKey pk = load_pk(pk_path);
  check_circuit_file(ctx, a.circuit, pk.vk.circuit_digest);
  fs::create_directories(dir);

  const int jobs = std::max(1, a.jobs);
  std::atomic<size_t> next{0};
  std::mutex mu;
  std::string first_error;
  std::vector<double> times(wits.size());
  auto worker = [&] {
    for (size_t i; (i = next.fetch_add(1)) < wits.size();) {
      try {
        Witness w = Witness::deserialize(read_file(wits[i]));
        ProveOptions po;
        po.mode = mode;
        ProveStats st;
        Proof p = prove(pk, w, po, &st);
        write_file(outs[i], p.serialize());
        times[i] = st.seconds;
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(mu);
        if (first_error.empty()) first_error = wits[i].filename().string() + ": " + e.what();
      }
    }
  };
  auto t0 = std::chrono::steady_clock::now();
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (!first_error.empty()) throw WitnessMismatch(first_error);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  stamp.save(outs);
  ctx.note("prove: " + std::to_string(outs.size()) + " proofs (" + proof_mode_name(mode) + ") in " +
           std::to_string(secs) + " s -> " + dir.string());
  json pt = json::array();
  for (double t : times) pt.push_back(t);
  return {{"up_to_date", false}, {"count", outs.size()}, {"seconds", secs}, {"prove_seconds", pt},
          {"dir", dir.string()}};
}

struct VerifyArgs {
  std::string vk, data;
  std::vector<std::string> proofs;
};

json cmd_verify(const Context& ctx, const VerifyArgs& a) {
  VerificationKey vk = load_vk(ctx.path(a.vk));
  std::vector<fs::path> files;
  for (const auto& p : a.proofs) {
    fs::path q = ctx.path(p);
    if (fs::is_directory(q)) {
      auto l = list_dir(q, ".proof");
      files.insert(files.end(), l.begin(), l.end());
    } else {
      files.push_back(q);
    }
  }
  if (files.empty()) throw InvalidArgument("no proofs given");
  std::optional<fixtures::Dataset> ds;
  if (!a.data.empty()) ds = fixtures::Dataset::load(ctx.path(a.data).string());

  json results = json::array();
  bool all = true;
  for (const auto& f : files) {
    Bytes bytes = read_file(f);
    VerifyResult r;
    if (ds) {
      // Check against the dataset's own inputs, not the proof's copy.
      size_t i = index_of(f);
      if (i >= ds->size()) throw InvalidArgument(f.string() + " has no matching dataset sample");
      std::vector<Fe> x = instance_for_inputs(vk, ds->inputs[i]);
      Proof p;
      try {
        p = Proof::deserialize(bytes);
      } catch (const Error& e) {
        r = {false, "malformed_proof", e.what()};
      }
      if (r.reason.empty()) {
        auto inst = std::span<const Fe>(p.instance);
        auto y = inst.size() >= vk.n_public_inputs + vk.outputs.size()
                     ? inst.subspan(vk.n_public_inputs, vk.outputs.size())
                     : std::span<const Fe>();
        r = verify(vk, p, x, y);
      }
    } else {
      Proof p;
      try {
        p = Proof::deserialize(bytes);
        r = verify(vk, p);
      } catch (const Error& e) {
        r = {false, "malformed_proof", e.what()};
      }
    }
    all = all && r.ok;
    results.push_back({{"proof", f.filename().string()}, {"ok", r.ok}, {"reason", r.reason}, {"detail", r.detail}});
    ctx.note(f.filename().string() + ": " + (r.ok ? std::string("ok") : r.reason + " (" + r.detail + ")"));
  }
  json res = {{"ok", all}, {"results", results}};
  if (!all) {
    std::string reason;
    for (const auto& r : results)
      if (!r.at("ok").get<bool>()) {
        reason = r.at("reason").get<std::string>();
        break;
      }
    throw Rejected(reason, "verification failed: " + reason, res);
  }
  return res;
}

struct AttestArgs {
  std::string vk, proofs = "proofs", data, out, kind = "bundle", metric = "accuracy", dataset_id = "dataset",
                  settings;
  double tolerance = -1.0;
  uint32_t lambda = 128;
};

json cmd_attest(const Context& ctx, const AttestArgs& a) {
  fs::path vk_path = ctx.path(a.vk), pdir = ctx.path(a.proofs), data = ctx.path(a.data);
  VerificationKey vk = load_vk(vk_path);
  auto ds = fixtures::Dataset::load(data.string());
  auto files = list_dir(pdir, ".proof");
  if (files.empty()) throw InvalidArgument("no proofs in " + pdir.string());
  std::vector<Proof> proofs;
  std::vector<std::vector<double>> truths;
  std::vector<Sample> inputs;
  for (const auto& f : files) {
    size_t i = index_of(f);
    if (i >= ds.size()) throw InvalidArgument(f.string() + " has no matching dataset sample");
    proofs.push_back(Proof::deserialize(read_file(f)));
    truths.push_back(ds.labels[i]);
    inputs.push_back(ds.inputs[i]);
  }
  double tol = a.tolerance;
  if (tol < 0) tol = a.settings.empty() ? 0.0 : CalibrationReport::from_json(read_json(ctx.path(a.settings))).error_bound;
  const Digest dsd = dataset_digest(inputs, truths);
  const TaskKind task = task_from_name(ds.task);

  if (a.kind == "bundle") {
    fs::path out = ctx.path(a.out.empty() ? "bundle.zip" : a.out);
    std::vector<BundleEntry> entries;
    for (size_t i = 0; i < proofs.size(); ++i) entries.push_back(BundleEntry::from_proof(vk, proofs[i], truths[i]));
    BundleManifest m;
    m.dataset_id = a.dataset_id;
    m.dataset_digest = dsd;
    m.task = task;
    m.tolerance = tol;
    NaiveBundle b = build_bundle(vk, std::move(entries), m);
    Bytes bytes = b.serialize();
    write_file(out, bytes);
    auto rep = verify_bundle(b);
    ctx.note("attest: bundle of " + std::to_string(b.entries.size()) + " proofs, accuracy " +
             std::to_string(rep.metrics.accuracy) + " -> " + out.string());
    return {{"kind", "bundle"}, {"count", b.entries.size()}, {"bytes", bytes.size()},
            {"accuracy", rep.metrics.accuracy}, {"dataset_digest", to_hex(dsd)}, {"out", out.string()}};
  }
  if (a.kind != "metric") throw InvalidArgument("--kind must be bundle or metric");
  fs::path out = ctx.path(a.out.empty() ? "metric.att" : a.out);
  MetricOptions mo;
  mo.task = task;
  mo.tolerance = tol;
  mo.dataset_digest = dsd;
  mo.lambda = a.lambda;
  MetricAttestation att = build_metric_attestation(vk, {}, proofs, truths, metric_from_name(a.metric), mo);
  Bytes bytes = att.serialize();
  write_file(out, bytes);
  fs::path side = out;
  side += ".json";
  write_text(side, att.sidecar().dump(2));
  ctx.note("attest: " + std::string(metric_name(att.spec.kind)) + " = " + std::to_string(att.value) + " over " +
           std::to_string(att.spec.n) + " samples -> " + out.string());
  return {{"kind", "metric"},
          {"metric", metric_name(att.spec.kind)},
          {"value", att.value},
          {"count", att.spec.n},
          {"bytes", bytes.size()},
          {"dataset_digest", to_hex(dsd)},
          {"inner_proof_digests", digest_list(att.inner_digests)},
          {"out", out.string()},
          {"sidecar", side.string()}};
}

struct VerifyAttestationArgs {
  std::string in, digests;
};

json cmd_verify_attestation(const Context& ctx, const VerifyAttestationArgs& a) {
  Bytes bytes = read_file(ctx.path(a.in));
  if (bytes.size() >= 4 && bytes[0] == 'P' && bytes[1] == 'K') {
    NaiveBundle b = NaiveBundle::deserialize(bytes);
    auto rep = verify_bundle(b);
    json j = rep.to_json();
    j["kind"] = "bundle";
    ctx.note(std::string(rep.ok() ? "bundle verifies" : "bundle INVALID") + ": " + std::to_string(rep.n_valid) + "/" +
             std::to_string(rep.entries.size()) + " proofs valid, accuracy " + std::to_string(rep.metrics.accuracy));
    if (!rep.ok()) throw Rejected("bundle_invalid", "bundle INVALID", j);
    return j;
  }
  MetricAttestation att = MetricAttestation::deserialize(bytes);
  std::vector<Digest> expected;
  if (!a.digests.empty()) {
    json d = read_json(ctx.path(a.digests));
    const json& list = d.is_array() ? d : d.at("inner_proof_digests");
    for (const auto& h : list) expected.push_back(digest_from_hex(h.get<std::string>()));
  }
  auto r = verify_metric_attestation(att, expected);
  json j = {{"kind", "metric"},
            {"ok", r.ok},
            {"reason", r.reason},
            {"detail", r.detail},
            {"metric", metric_name(att.spec.kind)},
            {"value", att.value},
            {"count", att.spec.n},
            {"weight_hash", to_hex(att.inner_vk.weight_hash)}};
  if (!r) throw Rejected(r.reason, "metric attestation rejected: " + r.reason + " (" + r.detail + ")", j);
  ctx.note("metric attestation verifies: " + std::string(metric_name(att.spec.kind)) + " = " +
           std::to_string(att.value));
  return j;
}

struct ChallengeArgs {
  std::string vk, data, graph, settings, out = "challenge.json", nonce;
  size_t index = 0;
  std::vector<double> y_star;
  double tolerance = -1.0;
};

json cmd_challenge(const Context& ctx, const ChallengeArgs& a) {
  VerificationKey vk = load_vk(ctx.path(a.vk));
  auto ds = fixtures::Dataset::load(ctx.path(a.data).string());
  if (a.index >= ds.size()) throw InvalidArgument("--index is past the end of the dataset");
  std::vector<double> y = a.y_star;
  if (y.empty()) {
    if (a.graph.empty()) throw InvalidArgument("challenge needs --y-star or --graph to observe y*");
    Graph g = load_graph_file(ctx.path(a.graph).string());
    auto vals = infer_float_all(g, ds.inputs[a.index]);
    for (const auto& o : g.outputs) {
      const Tensor& t = vals.at(circuit_output_ref(g, o));
      y.insert(y.end(), t.data.begin(), t.data.end());
    }
  }
  double tol = a.tolerance;
  if (tol < 0)
    tol = a.settings.empty() ? 0.05 : CalibrationReport::from_json(read_json(ctx.path(a.settings))).max_rel_error;
  ChallengeRequest req = make_challenge(vk, ds.inputs[a.index], y, tol, a.nonce);
  fs::path out = ctx.path(a.out);
  write_text(out, req.to_json().dump(2));
  ctx.note("challenge: nonce " + req.nonce + ", tolerance " + std::to_string(tol) + " -> " + out.string());
  return {{"nonce", req.nonce}, {"tolerance", tol}, {"out", out.string()}};
}

struct RespondArgs {
  std::string pk, request, out = "response.bin", mode = "spot_check";
};

json cmd_respond(const Context& ctx, const RespondArgs& a) {
  ProvingKey pk = load_pk(ctx.path(a.pk));
  ChallengeRequest req = ChallengeRequest::from_json(read_json(ctx.path(a.request)));
  ProveOptions po;
  po.mode = proof_mode_from_name(a.mode);
  ChallengeResponse resp;
  try {
    resp = respond(pk, req, po);
  } catch (const ChallengeFailure& e) {
    throw Rejected("challenge_failure", e.what(), {{"ok", false}, {"reason", "challenge_failure"}});
  }
  fs::path out = ctx.path(a.out);
  write_file(out, resp.serialize());
  ctx.note("respond: proof for nonce " + resp.nonce + " -> " + out.string());
  return {{"nonce", resp.nonce}, {"weight_hash", to_hex(resp.weight_hash)}, {"out", out.string()}};
}

struct AdjudicateArgs {
  std::string vk, request, response;
};

json cmd_adjudicate(const Context& ctx, const AdjudicateArgs& a) {
  VerificationKey vk = load_vk(ctx.path(a.vk));
  ChallengeRequest req = ChallengeRequest::from_json(read_json(ctx.path(a.request)));
  ChallengeResponse resp;
  Verdict v;
  try {
    resp = ChallengeResponse::deserialize(read_file(ctx.path(a.response)));
    v = adjudicate(vk, req, resp);
  } catch (const FormatError& e) {
    v = {false, "invalid_proof", e.what(), 0.0};
  }
  ctx.note(v.pass ? "adjudicate: pass" : "adjudicate: fail (" + v.reason + ": " + v.detail + ")");
  if (!v.pass) throw Rejected(v.reason, "challenge failed: " + v.reason, v.to_json());
  return v.to_json();
}

struct EstimateArgs {
  std::string coeffs, circuit;
  uint64_t n_con = 0, dataset_size = 1;
};

json cmd_estimate(const Context& ctx, const EstimateArgs& a) {
  CostCoefficients c = CostCoefficients::from_json(read_json(ctx.path(a.coeffs)));
  uint64_t n = a.n_con;
  if (!a.circuit.empty()) n = ConstraintSystem::deserialize(read_file(ctx.path(a.circuit))).n_con();
  if (n == 0) throw InvalidArgument("estimate needs --n-con or --circuit");
  CostEstimate e = estimate(c, n, a.dataset_size);
  ctx.note("estimate: n_con " + std::to_string(e.n_con) + " -> " + std::to_string(e.padded_rows) +
           " srs rows; prove " + std::to_string(e.prove_seconds) + " s, pk " +
           std::to_string(static_cast<uint64_t>(e.pk_bytes)) + " B; dataset of " + std::to_string(e.dataset_size) +
           ": " + std::to_string(e.dataset_seconds) + " s");
  return e.to_json();
}

struct BenchArgs {
  std::vector<int64_t> widths{16, 32, 64, 128, 256};
  int64_t d_in = 8;
  int repeats = 3;
  int scale = 7;  // sweep only
  std::string out = "bench", mode = "spot_check";
  bool table = false;
};

json cmd_bench(const Context& ctx, const BenchArgs& a) {
  MeasureOptions mo;
  mo.repeats = a.repeats;
  mo.mode = proof_mode_from_name(a.mode);
  std::vector<Measurement> rows;
  json j;
  if (a.table) {
    std::vector<std::pair<std::string, Graph>> models = {{"regression", fixtures::regression()},
                                                         {"svm", fixtures::svm()},
                                                         {"mlp", fixtures::mlp()},
                                                         {"cnn", fixtures::cnn()}};
    rows = report_table(models, mo);
  } else {
    mo.scale = a.scale;
    for (int64_t w : a.widths)
      rows.push_back(measure_model("mlp-w" + std::to_string(w), fixtures::mlp(a.d_in, w, 2, 7, false), mo));
  }
  json rj = json::array();
  for (const auto& r : rows) rj.push_back(r.to_json());
  j["rows"] = rj;
  j["machine"] = MachineDescriptor::current().to_json();
  fs::path base = ctx.path(a.out);
  fs::path csv = base, js = base;
  csv += ".csv";
  js += ".json";
  write_text(csv, to_csv(rows));
  try {
    CostCoefficients c = fit(rows);
    j["coefficients"] = c.to_json();
    fs::path cf = base;
    cf += ".coeffs.json";
    write_text(cf, c.to_json().dump(2));
    j["coefficients_file"] = cf.string();
  } catch (const InsufficientData& e) {
    j["coefficients"] = nullptr;
  }
  write_text(js, j.dump(2));
  if (!ctx.json_mode) ctx.out << format_table(rows);
  j["csv"] = csv.string();
  j["json"] = js.string();
  return j;
}

void emit_error(Context& ctx, const std::string& code, const std::string& message, const json& payload = {}) {
  if (ctx.json_mode) {
    json e = {{"ok", false}, {"error", code}, {"message", message}};
    if (payload.is_object())
      for (auto& [k, v] : payload.items())
        if (!e.contains(k)) e[k] = v;
    ctx.err << e.dump() << '\n';
  } else {
    ctx.err << "error: " << message << '\n';
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Compile, prove and attest quantized model inference", "zkeval"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read option defaults from a TOML/INI file");
  bool json_mode = false;
  std::string workdir;
  app.add_flag("--json", json_mode, "Machine-readable output on stdout, diagnostics as JSON on stderr");
  app.add_option("--workdir", workdir, std::string("Base directory for relative paths (default $") + kWorkdirEnv + ")");

  CalibrateArgs cal;
  auto* c_cal = app.add_subcommand("calibrate", "Choose the fixed-point scale for a graph");
  c_cal->add_option("--graph", cal.graph, "Graph IR file")->required();
  c_cal->add_option("--data", cal.data, "Dataset file with calibration inputs");
  c_cal->add_option("--random", cal.random, "Add N uniform random inputs in [-1, 1)");
  c_cal->add_option("--seed", cal.seed, "Seed for --random");
  c_cal->add_option("--mode", cal.mode, "accuracy (1%) or resources (5%)")->check(CLI::IsMember({"accuracy", "resources"}));
  c_cal->add_option("--min-scale", cal.min_scale);
  c_cal->add_option("--max-scale", cal.max_scale);
  c_cal->add_option("-o,--out", cal.out, "Settings file to write");

  CompileArgs comp;
  auto* c_comp = app.add_subcommand("compile", "Lower a graph to a circuit and run setup (pk, vk)");
  c_comp->add_option("--graph", comp.graph, "Graph IR file")->required();
  c_comp->add_option("--settings", comp.settings, "Calibration settings")->required();
  c_comp->add_option("--out-dir", comp.out_dir, "Directory for circuit.bin, pk.bin, vk.bin");
  c_comp->add_option("--lambda", comp.lambda, "Minimum spot-check draws");
  c_comp->add_option("--spot-fraction", comp.spot_fraction, "Spot-check draws as a fraction of rows");

  WitnessArgs wit;
  auto* c_wit = app.add_subcommand("witness", "Run quantized inference and save witnesses");
  c_wit->add_option("--pk", wit.pk, "Proving key")->required();
  c_wit->add_option("--data", wit.data, "Dataset file")->required();
  c_wit->add_option("-o,--out", wit.out, "Witness directory");
  c_wit->add_option("--limit", wit.limit, "Only the first N samples");
  c_wit->add_option("--circuit", wit.circuit, "Refuse to run if this circuit does not match the key");

  ProveArgs pr;
  auto* c_pr = app.add_subcommand("prove", "Prove saved witnesses");
  c_pr->add_option("--pk", pr.pk, "Proving key")->required();
  c_pr->add_option("--witnesses", pr.witnesses, "Witness directory");
  c_pr->add_option("-o,--out", pr.out, "Proof directory");
  c_pr->add_option("--mode", pr.mode, "spot_check or audit")->check(CLI::IsMember({"spot_check", "spot-check", "audit"}));
  c_pr->add_option("--jobs", pr.jobs, "Witnesses proven concurrently");
  c_pr->add_option("--circuit", pr.circuit, "Refuse to run if this circuit does not match the key");

  VerifyArgs ver;
  auto* c_ver = app.add_subcommand("verify", "Verify proofs");
  c_ver->add_option("--vk", ver.vk, "Verification key")->required();
  c_ver->add_option("--data", ver.data, "Check public inputs against this dataset (by sample index)");
  c_ver->add_option("proofs", ver.proofs, "Proof files or directories")->required();

  AttestArgs att;
  auto* c_att = app.add_subcommand("attest", "Build an evaluation attestation from proofs");
  c_att->add_option("--vk", att.vk, "Verification key")->required();
  c_att->add_option("--proofs", att.proofs, "Proof directory");
  c_att->add_option("--data", att.data, "Dataset with ground truths")->required();
  c_att->add_option("--kind", att.kind, "bundle or metric")->check(CLI::IsMember({"bundle", "metric"}));
  c_att->add_option("--metric", att.metric, "accuracy, mean_abs_error or confusion_matrix");
  c_att->add_option("--tolerance", att.tolerance, "Regression match tolerance (default: settings error bound)");
  c_att->add_option("--settings", att.settings, "Calibration settings for the default tolerance");
  c_att->add_option("--dataset-id", att.dataset_id, "Name recorded in the bundle manifest");
  c_att->add_option("--lambda", att.lambda, "Spot-check draws for the metric proof");
  c_att->add_option("-o,--out", att.out, "Output file");

  VerifyAttestationArgs va;
  auto* c_va = app.add_subcommand("verify-attestation", "Verify a bundle or metric attestation");
  c_va->add_option("attestation", va.in, "Bundle (.zip) or metric attestation")->required();
  c_va->add_option("--digests", va.digests, "Expected inner proof digests (JSON list or sidecar)");

  ChallengeArgs ch;
  auto* c_ch = app.add_subcommand("challenge", "Issue a challenge for an observed inference");
  c_ch->add_option("--vk", ch.vk, "Reference verification key")->required();
  c_ch->add_option("--data", ch.data, "Dataset holding x*")->required();
  c_ch->add_option("--index", ch.index, "Sample index of x*");
  c_ch->add_option("--y-star", ch.y_star, "Observed output values");
  c_ch->add_option("--graph", ch.graph, "Observe y* by float inference of this graph");
  c_ch->add_option("--tolerance", ch.tolerance, "Relative tolerance (default: max relative error in the settings, else 0.05)");
  c_ch->add_option("--settings", ch.settings, "Calibration settings for the default tolerance");
  c_ch->add_option("--nonce", ch.nonce, "Fixed nonce (random by default)");
  c_ch->add_option("-o,--out", ch.out, "Request file");

  RespondArgs rs;
  auto* c_rs = app.add_subcommand("respond", "Answer a challenge with a proof");
  c_rs->add_option("--pk", rs.pk, "Proving key")->required();
  c_rs->add_option("--request", rs.request, "Challenge request")->required();
  c_rs->add_option("--mode", rs.mode, "spot_check or audit")->check(CLI::IsMember({"spot_check", "spot-check", "audit"}));
  c_rs->add_option("-o,--out", rs.out, "Response file");

  AdjudicateArgs ad;
  auto* c_ad = app.add_subcommand("adjudicate", "Decide a challenge");
  c_ad->add_option("--vk", ad.vk, "Reference verification key")->required();
  c_ad->add_option("--request", ad.request, "Challenge request")->required();
  c_ad->add_option("--response", ad.response, "Challenge response")->required();

  EstimateArgs es;
  auto* c_es = app.add_subcommand("estimate", "Predict proving cost from fitted coefficients");
  c_es->add_option("--coeffs", es.coeffs, "Coefficients from `bench`")->required();
  c_es->add_option("--n-con", es.n_con, "Constraint count");
  c_es->add_option("--circuit", es.circuit, "Take the constraint count from a circuit file");
  c_es->add_option("--dataset-size", es.dataset_size, "Number of proofs");

  BenchArgs be;
  auto* c_be = app.add_subcommand("bench", "Measure proving cost (MLP width sweep or fixture table)");
  c_be->add_option("--widths", be.widths, "Hidden widths")->delimiter(',');
  c_be->add_option("--d-in", be.d_in, "Input width of the sweep MLP");
  c_be->add_option("--scale", be.scale, "Fixed scale for the width sweep");
  c_be->add_option("--repeats", be.repeats, "Prove/verify repeats per point");
  c_be->add_option("--mode", be.mode, "spot_check or audit");
  c_be->add_flag("--table", be.table, "Measure the fixture models instead of the sweep");
  c_be->add_option("-o,--out", be.out, "Output prefix for .csv/.json");

  std::vector<std::string> rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  Context ctx{out, err, false, {}};
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    ctx.json_mode = json_mode;
    std::string msg = e.what();
    // Name the offending word when it is not a subcommand at all.
    for (size_t i = 1; i < args.size(); ++i) {
      if (args[i].empty() || args[i][0] == '-') continue;
      if (!app.get_subcommand_no_throw(args[i])) msg = "unknown subcommand '" + args[i] + "'";
      break;
    }
    emit_error(ctx, "usage", msg);
    if (!json_mode) err << app.help();
    return kUsage;
  }
  ctx.json_mode = json_mode;
  if (workdir.empty())
    if (const char* env = std::getenv(kWorkdirEnv)) workdir = env;
  ctx.workdir = workdir.empty() ? fs::current_path() : fs::path(workdir);

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    json result;
    if (name == "calibrate") result = cmd_calibrate(ctx, cal);
    else if (name == "compile") result = cmd_compile(ctx, comp);
    else if (name == "witness") result = cmd_witness(ctx, wit);
    else if (name == "prove") result = cmd_prove(ctx, pr);
    else if (name == "verify") result = cmd_verify(ctx, ver);
    else if (name == "attest") result = cmd_attest(ctx, att);
    else if (name == "verify-attestation") result = cmd_verify_attestation(ctx, va);
    else if (name == "challenge") result = cmd_challenge(ctx, ch);
    else if (name == "respond") result = cmd_respond(ctx, rs);
    else if (name == "adjudicate") result = cmd_adjudicate(ctx, ad);
    else if (name == "estimate") result = cmd_estimate(ctx, es);
    else if (name == "bench") result = cmd_bench(ctx, be);
    if (json_mode) {
      json j = {{"command", name}, {"ok", true}, {"result", result}};
      out << j.dump() << '\n';
    }
    return kOk;
  } catch (const Rejected& e) {
    if (json_mode) out << json{{"command", name}, {"ok", false}, {"result", e.payload()}}.dump() << '\n';
    emit_error(ctx, e.code(), e.what(), e.payload());
    return kRejected;
  } catch (const Error& e) {
    emit_error(ctx, e.code(), e.what());
    return kUsage;
  } catch (const fs::filesystem_error& e) {
    emit_error(ctx, "io", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    emit_error(ctx, "internal", e.what());
    return kUsage;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace zkeval::cli
