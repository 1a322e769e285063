#include "zkeval/attestation.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>

#include "zkeval/errors.hpp"
#include "zkeval/kernels.hpp"
#include "zkeval/zip.hpp"

namespace zkeval {

using nlohmann::json;

namespace {

constexpr uint32_t kAttestationMagic = 0x414d4b5a;  // "ZKMA"
constexpr uint32_t kAttestationVersion = 1;

const Fe kOne(1);
const Fe kMinusOne = Fe(0) - Fe(1);

std::string entry_name(const char* dir, size_t i, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s/%04zu.%s", dir, i, ext);
  return buf;
}

json raw_array(std::span<const Fe> v) {
  json a = json::array();
  for (auto x : v) a.push_back(x.to_signed());
  return a;
}

std::vector<Fe> fe_array(const json& a) {
  if (!a.is_array()) throw SchemaError("expected an array of integers");
  std::vector<Fe> out;
  for (const auto& x : a) {
    if (!x.is_number_integer()) throw SchemaError("expected an integer");
    out.push_back(Fe::from_signed(x.get<int64_t>()));
  }
  return out;
}

int64_t label_class(const std::vector<double>& gt) {
  if (gt.size() != 1 || gt[0] != std::floor(gt[0]) || gt[0] < 0)
    throw ShapeError("classification ground truth must be one non-negative class index");
  return static_cast<int64_t>(gt[0]);
}

double mae_of(uint64_t sum_raw, int scale, uint64_t n) {
  return n == 0 ? 0.0 : static_cast<double>(sum_raw) / std::ldexp(1.0, scale) / static_cast<double>(n);
}

// e = [x == k] for x, k in [0, K): d = x - k, e = relu(1 - d^2), e boolean.
Operand equals_const(CircuitBuilder& b, Operand x, int64_t k, uint32_t relu) {
  Operand d = b.affine(x, kOne, Operand{}, Fe(0), Fe::from_signed(-k));
  Operand dd[] = {d};
  Operand sq = b.elementwise(dd, dd, CircuitBuilder::ElementwiseOp::kMul)[0];
  Operand t = b.affine(sq, kMinusOne, Operand{}, Fe(0), kOne);
  Operand e = b.lookup_one(t, relu);
  Operand ee[] = {e};
  b.booleanity(ee);
  return e;
}

}  // namespace

const char* task_name(TaskKind t) { return t == TaskKind::kClassification ? "classification" : "regression"; }

TaskKind task_from_name(const std::string& s) {
  if (s == "classification") return TaskKind::kClassification;
  if (s == "regression") return TaskKind::kRegression;
  throw InvalidArgument("unknown task '" + s + "' (expected classification or regression)");
}

const char* metric_name(MetricKind m) {
  switch (m) {
    case MetricKind::kAccuracy: return "accuracy";
    case MetricKind::kMeanAbsError: return "mean_abs_error";
    case MetricKind::kConfusionMatrix: return "confusion_matrix";
  }
  return "?";
}

MetricKind metric_from_name(const std::string& s) {
  if (s == "accuracy") return MetricKind::kAccuracy;
  if (s == "mean_abs_error" || s == "mae") return MetricKind::kMeanAbsError;
  if (s == "confusion_matrix") return MetricKind::kConfusionMatrix;
  throw MetricUnsupported("unsupported metric '" + s + "'");
}

int64_t tolerance_raw(double tau, int scale) {
  if (!(tau >= 0.0)) throw InvalidArgument("tolerance must be non-negative");
  return static_cast<int64_t>(std::floor(tau * std::ldexp(1.0, scale)));
}

// ---- bundle ----

BundleEntry BundleEntry::from_proof(const VerificationKey& vk, const Proof& p, std::vector<double> ground_truth) {
  BundleEntry e;
  e.proof = p.serialize();
  std::span<const Fe> inst(p.instance);
  if (inst.size() < vk.n_public_inputs + vk.outputs.size()) throw ShapeError("proof instance is too short");
  auto x = inst.subspan(0, vk.n_public_inputs);
  auto y = inst.subspan(vk.n_public_inputs, vk.outputs.size());
  e.x_tilde.assign(x.begin(), x.end());
  e.y_tilde.assign(y.begin(), y.end());
  e.ground_truth = std::move(ground_truth);
  return e;
}

json BundleManifest::to_json() const {
  return {{"format", "zkeval-bundle/1"},
          {"dataset_id", dataset_id},
          {"dataset_digest", to_hex(dataset_digest)},
          {"weight_hash", to_hex(weight_hash)},
          {"task", task_name(task)},
          {"scale", scale},
          {"tolerance", tolerance},
          {"created_unix", created_unix},
          {"count", count}};
}

BundleManifest BundleManifest::from_json(const json& j) {
  try {
    if (j.at("format") != "zkeval-bundle/1") throw SchemaError("unsupported bundle format");
    BundleManifest m;
    m.dataset_id = j.at("dataset_id").get<std::string>();
    m.dataset_digest = digest_from_hex(j.at("dataset_digest").get<std::string>());
    m.weight_hash = digest_from_hex(j.at("weight_hash").get<std::string>());
    m.task = task_from_name(j.at("task").get<std::string>());
    m.scale = j.at("scale").get<int>();
    m.tolerance = j.at("tolerance").get<double>();
    m.created_unix = j.at("created_unix").get<int64_t>();
    m.count = j.at("count").get<uint64_t>();
    return m;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("bad bundle manifest: ") + e.what());
  }
}

Bytes NaiveBundle::serialize() const {
  zip::Entries files;
  std::string m = manifest.to_json().dump(2);
  files.emplace_back("manifest.json", Bytes(m.begin(), m.end()));
  files.emplace_back("vk.bin", vk.serialize());
  for (size_t i = 0; i < entries.size(); ++i) {
    files.emplace_back(entry_name("proofs", i, "bin"), entries[i].proof);
    json pub = {{"x", raw_array(entries[i].x_tilde)},
                {"y_tilde", raw_array(entries[i].y_tilde)},
                {"ground_truth", entries[i].ground_truth}};
    std::string s = pub.dump();
    files.emplace_back(entry_name("publics", i, "json"), Bytes(s.begin(), s.end()));
  }
  return zip::write(files);
}

NaiveBundle NaiveBundle::deserialize(std::span<const uint8_t> archive) {
  auto files = zip::read(archive);
  auto get = [&](const std::string& name) -> const Bytes& {
    auto it = files.find(name);
    if (it == files.end()) throw FormatError("bundle is missing " + name);
    return it->second;
  };
  NaiveBundle b;
  const Bytes& m = get("manifest.json");
  try {
    b.manifest = BundleManifest::from_json(json::parse(m.begin(), m.end()));
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("bundle manifest is not JSON: ") + e.what());
  }
  b.vk = VerificationKey::deserialize(get("vk.bin"));
  if (files.size() != 2 + 2 * b.manifest.count) throw FormatError("bundle entry count differs from the manifest");
  for (size_t i = 0; i < b.manifest.count; ++i) {
    BundleEntry e;
    e.proof = get(entry_name("proofs", i, "bin"));
    const Bytes& p = get(entry_name("publics", i, "json"));
    try {
      json pub = json::parse(p.begin(), p.end());
      e.x_tilde = fe_array(pub.at("x"));
      e.y_tilde = fe_array(pub.at("y_tilde"));
      e.ground_truth = pub.at("ground_truth").get<std::vector<double>>();
    } catch (const json::exception& ex) {
      throw FormatError("bad public values for entry " + std::to_string(i) + ": " + ex.what());
    }
    b.entries.push_back(std::move(e));
  }
  return b;
}

NaiveBundle build_bundle(const VerificationKey& vk, std::vector<BundleEntry> entries, BundleManifest manifest) {
  if (entries.empty()) throw InvalidArgument("a bundle needs at least one entry");
  for (size_t i = 0; i < entries.size(); ++i) {
    Proof p = Proof::deserialize(entries[i].proof);
    if (p.weight_hash != vk.weight_hash)
      throw HashMismatch("entry " + std::to_string(i) + " was proven under a different H(W)");
    auto r = verify(vk, p, entries[i].x_tilde, entries[i].y_tilde);
    if (!r) throw InvalidProof("entry " + std::to_string(i) + ": " + r.reason + " (" + r.detail + ")");
  }
  manifest.weight_hash = vk.weight_hash;
  manifest.scale = vk.scale;
  manifest.count = entries.size();
  if (manifest.created_unix == 0)
    manifest.created_unix =
        std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch()).count();
  return {std::move(manifest), vk, std::move(entries)};
}

AggregateMetrics aggregate(TaskKind task, int scale, double tolerance, std::span<const std::vector<Fe>> y_tilde,
                           std::span<const std::vector<double>> ground_truth) {
  if (y_tilde.size() != ground_truth.size()) throw LengthMismatch("outputs and ground truths differ in count");
  AggregateMetrics m;
  m.n = y_tilde.size();
  if (task == TaskKind::kClassification) {
    const size_t k = y_tilde.empty() ? 0 : y_tilde[0].size();
    m.confusion.assign(k, std::vector<uint64_t>(k, 0));
    for (size_t i = 0; i < y_tilde.size(); ++i) {
      if (y_tilde[i].size() != k) throw ShapeError("outputs differ in width");
      int64_t label = label_class(ground_truth[i]);
      if (label >= static_cast<int64_t>(k)) throw ShapeError("label outside the output classes");
      int64_t pred = argmax_class(y_tilde[i]);
      m.confusion[label][pred]++;
      if (pred == label) m.correct++;
    }
  } else {
    const int64_t tol = tolerance_raw(tolerance, scale);
    uint64_t sum = 0, elems = 0;
    for (size_t i = 0; i < y_tilde.size(); ++i) {
      if (y_tilde[i].size() != ground_truth[i].size()) throw ShapeError("output and target widths differ");
      bool within = true;
      for (size_t k = 0; k < y_tilde[i].size(); ++k) {
        int64_t d = y_tilde[i][k].to_signed() - encode_raw(ground_truth[i][k], scale);
        uint64_t ad = static_cast<uint64_t>(d < 0 ? -d : d);
        sum += ad;
        elems++;
        within = within && static_cast<int64_t>(ad) <= tol;
      }
      if (within) m.correct++;
    }
    m.mean_abs_error = mae_of(sum, scale, elems);
  }
  m.accuracy = m.n == 0 ? 0.0 : static_cast<double>(m.correct) / static_cast<double>(m.n);
  return m;
}

json BundleReport::to_json() const {
  json e = json::array();
  for (const auto& s : entries)
    e.push_back({{"index", s.index}, {"ok", s.ok}, {"reason", s.reason}, {"detail", s.detail}});
  json j = {{"ok", ok()},
            {"invalid", invalid},
            {"hash_constant", hash_constant},
            {"n_total", entries.size()},
            {"n_valid", n_valid},
            {"accuracy", metrics.accuracy},
            {"correct", metrics.correct},
            {"entries", e}};
  if (!metrics.confusion.empty()) j["confusion_matrix"] = metrics.confusion;
  else j["mean_abs_error"] = metrics.mean_abs_error;
  return j;
}

BundleReport verify_bundle(const NaiveBundle& b) {
  BundleReport rep;
  const size_t n = b.entries.size();
  rep.entries.resize(n);
  std::vector<uint8_t> same_hash(n, 1);
  kernels::for_each_index(static_cast<int64_t>(n), [&](int64_t i) {
    const auto& e = b.entries[i];
    auto& st = rep.entries[i];
    st.index = static_cast<uint64_t>(i);
    Proof p;
    try {
      p = Proof::deserialize(e.proof);
    } catch (const Error& ex) {
      st.reason = "malformed_proof";
      st.detail = ex.what();
      return;
    }
    same_hash[i] = p.weight_hash == b.manifest.weight_hash;
    auto r = verify(b.vk, p, e.x_tilde, e.y_tilde);
    st.ok = r.ok;
    st.reason = r.reason;
    st.detail = r.detail;
  });
  rep.hash_constant = b.manifest.weight_hash == b.vk.weight_hash;
  for (size_t i = 0; i < n; ++i) rep.hash_constant = rep.hash_constant && same_hash[i];
  if (b.manifest.count != n) rep.invalid = true;

  std::vector<std::vector<Fe>> ys;
  std::vector<std::vector<double>> gts;
  for (size_t i = 0; i < n; ++i) {
    if (!rep.entries[i].ok) {
      rep.invalid = true;
      continue;
    }
    ys.push_back(b.entries[i].y_tilde);
    gts.push_back(b.entries[i].ground_truth);
  }
  rep.n_valid = ys.size();
  try {
    rep.metrics = aggregate(b.manifest.task, b.manifest.scale, b.manifest.tolerance, ys, gts);
  } catch (const Error&) {
    rep.invalid = true;
  }
  return rep;
}

// ---- metric circuit ----

json MetricSpec::to_json() const {
  return {{"kind", metric_name(kind)}, {"task", task_name(task)}, {"n", n},
          {"classes", classes},         {"scale", scale},          {"tolerance_raw", tolerance},
          {"bound_raw", bound}, {"lambda", lambda}};
}

MetricSpec MetricSpec::from_json(const json& j) {
  try {
    MetricSpec s;
    s.kind = metric_from_name(j.at("kind").get<std::string>());
    s.task = task_from_name(j.at("task").get<std::string>());
    s.n = j.at("n").get<uint64_t>();
    s.classes = j.at("classes").get<uint64_t>();
    s.scale = j.at("scale").get<int>();
    s.tolerance = j.at("tolerance_raw").get<int64_t>();
    s.bound = j.at("bound_raw").get<int64_t>();
    s.lambda = j.at("lambda").get<uint32_t>();
    s.validate();
    return s;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("bad metric spec: ") + e.what());
  }
}

void MetricSpec::validate() const {
  if (n == 0) throw InvalidArgument("metric over zero samples");
  if (lambda == 0) throw InvalidArgument("lambda must be positive");
  if (task == TaskKind::kClassification) {
    if (kind == MetricKind::kMeanAbsError) throw MetricUnsupported("mean_abs_error needs a regression task");
    if (classes < 2 || classes > 4096) throw InvalidArgument("classification needs between 2 and 4096 classes");
  } else {
    if (kind == MetricKind::kConfusionMatrix) throw MetricUnsupported("confusion_matrix needs a classification task");
    if (tolerance < 0 || bound < 1 || tolerance > bound) throw InvalidArgument("regression bounds out of order");
    if (static_cast<uint64_t>(2 * bound + 1) > kMaxTableSize)
      throw DomainError("regression error range is too wide for a lookup table");
  }
}

ConstraintSystem metric_circuit(const MetricSpec& spec) {
  spec.validate();
  CircuitBuilder b;
  std::vector<Operand> labels;
  for (uint64_t i = 0; i < spec.n; ++i) labels.push_back(b.new_instance());
  const uint64_t digest_slots = ConstraintSystem::kDigestLimbs * (spec.n + 2);
  for (uint64_t i = 0; i < digest_slots; ++i) b.new_instance();
  b.cs().n_public_inputs = spec.n + digest_slots;
  b.cs().scale = spec.scale;

  std::vector<Operand> outputs;
  if (spec.task == TaskKind::kClassification) {
    const int64_t k = static_cast<int64_t>(spec.classes);
    const uint32_t relu = b.table(LookupFn::kReLU, 0, 1 - (k - 1) * (k - 1), 1);
    if (spec.kind == MetricKind::kAccuracy) {
      std::vector<Operand> hits;
      for (uint64_t i = 0; i < spec.n; ++i) {
        b.set_label("sample " + std::to_string(i));
        Operand p = b.external_input();
        Operand pp[] = {p}, yy[] = {labels[i]};
        Operand d = b.elementwise(pp, yy, CircuitBuilder::ElementwiseOp::kSub)[0];
        Operand dd[] = {d};
        Operand sq = b.elementwise(dd, dd, CircuitBuilder::ElementwiseOp::kMul)[0];
        Operand t = b.affine(sq, kMinusOne, Operand{}, Fe(0), kOne);
        Operand e = b.lookup_one(t, relu);
        Operand ee[] = {e};
        b.booleanity(ee);
        hits.push_back(e);
      }
      b.set_label("count");
      outputs.push_back(b.cumulative_sum(hits).back());
    } else {
      std::vector<std::vector<Operand>> cells(static_cast<size_t>(k * k));
      for (uint64_t i = 0; i < spec.n; ++i) {
        b.set_label("sample " + std::to_string(i));
        Operand p = b.external_input();
        std::vector<Operand> is_true, is_pred;
        for (int64_t c = 0; c < k; ++c) {
          is_true.push_back(equals_const(b, labels[i], c, relu));
          is_pred.push_back(equals_const(b, p, c, relu));
        }
        for (int64_t t = 0; t < k; ++t) {
          std::vector<Operand> lhs(static_cast<size_t>(k), is_true[t]);
          auto prods = b.elementwise(lhs, is_pred, CircuitBuilder::ElementwiseOp::kMul);
          for (int64_t c = 0; c < k; ++c) cells[t * k + c].push_back(prods[c]);
        }
      }
      b.set_label("count");
      for (auto& col : cells) outputs.push_back(b.cumulative_sum(col).back());
    }
  } else {
    const int64_t bound = spec.bound, tol = spec.tolerance;
    const uint32_t relu = b.table(LookupFn::kReLU, 0, -bound, bound);
    const int shift = static_cast<int>(ceil_log2(static_cast<uint64_t>(std::max(tol, bound - tol)) + 1));
    // floor(z / 2^shift) is 0 for z in [0, 2^shift) and -1 below zero.
    const uint32_t step = b.table(LookupFn::kRescale, shift, tol - bound, tol);
    std::vector<Operand> abs_err, hits;
    for (uint64_t i = 0; i < spec.n; ++i) {
      b.set_label("sample " + std::to_string(i));
      Operand y = b.external_input();
      Operand yy[] = {y}, gt[] = {labels[i]};
      Operand d = b.elementwise(yy, gt, CircuitBuilder::ElementwiseOp::kSub)[0];
      Operand pos = b.lookup_one(d, relu);
      Operand neg = b.lookup_one(b.affine(d, kMinusOne, Operand{}, Fe(0), Fe(0)), relu);
      Operand pp[] = {pos}, nn[] = {neg};
      Operand ad = b.elementwise(pp, nn, CircuitBuilder::ElementwiseOp::kAdd)[0];
      Operand z = b.affine(ad, kMinusOne, Operand{}, Fe(0), Fe::from_signed(tol));
      Operand s = b.lookup_one(z, step);
      Operand hit = b.affine(s, kOne, Operand{}, Fe(0), kOne);
      Operand hh[] = {hit};
      b.booleanity(hh);
      abs_err.push_back(ad);
      hits.push_back(hit);
    }
    b.set_label("count");
    outputs.push_back(b.cumulative_sum(hits).back());
    outputs.push_back(b.cumulative_sum(abs_err).back());
  }
  b.expose_outputs(outputs, false);
  return b.finish();
}

double metric_value(const MetricSpec& spec, std::span<const uint64_t> counts) {
  if (spec.task == TaskKind::kClassification) {
    if (spec.kind == MetricKind::kAccuracy) {
      if (counts.size() != 1) throw ShapeError("accuracy expects one count");
      return static_cast<double>(counts[0]) / static_cast<double>(spec.n);
    }
    if (counts.size() != spec.classes * spec.classes) throw ShapeError("confusion matrix has the wrong size");
    uint64_t diag = 0;
    for (uint64_t c = 0; c < spec.classes; ++c) diag += counts[c * spec.classes + c];
    return static_cast<double>(diag) / static_cast<double>(spec.n);
  }
  if (counts.size() != 2) throw ShapeError("regression metrics expect two counts");
  if (spec.kind == MetricKind::kAccuracy) return static_cast<double>(counts[0]) / static_cast<double>(spec.n);
  return mae_of(counts[1], spec.scale, spec.n);
}

// ---- metric attestation ----

namespace {

std::vector<Fe> metric_public_inputs(const MetricSpec& spec, std::span<const double> labels,
                                     std::span<const Digest> inner, const Digest& weight_hash,
                                     const Digest& dataset) {
  std::vector<Fe> inst;
  for (double l : labels)
    inst.push_back(spec.task == TaskKind::kClassification ? Fe::from_signed(static_cast<int64_t>(l))
                                                          : Fe::from_signed(encode_raw(l, spec.scale)));
  auto put = [&](const Digest& d) {
    auto limbs = digest_limbs(d);
    inst.insert(inst.end(), limbs.begin(), limbs.end());
  };
  for (const auto& d : inner) put(d);
  put(weight_hash);
  put(dataset);
  return inst;
}

std::vector<std::vector<uint64_t>> confusion_of(const MetricSpec& spec, std::span<const uint64_t> counts) {
  std::vector<std::vector<uint64_t>> m;
  if (spec.kind != MetricKind::kConfusionMatrix) return m;
  for (uint64_t t = 0; t < spec.classes; ++t)
    m.emplace_back(counts.begin() + t * spec.classes, counts.begin() + (t + 1) * spec.classes);
  return m;
}

}  // namespace

MetricAttestation build_metric_attestation(const VerificationKey& vk, std::span<const Witness> witnesses,
                                           std::span<const Proof> proofs,
                                           std::span<const std::vector<double>> ground_truths, MetricKind metric,
                                           const MetricOptions& opts) {
  if (proofs.empty()) throw InvalidArgument("metric attestation over zero proofs");
  if (proofs.size() != ground_truths.size()) throw LengthMismatch("proofs and ground truths differ in count");
  if (!witnesses.empty() && witnesses.size() != proofs.size())
    throw LengthMismatch("witnesses and proofs differ in count");

  MetricSpec spec;
  spec.kind = metric;
  spec.task = opts.task.value_or(vk.outputs.size() > 1 ? TaskKind::kClassification : TaskKind::kRegression);
  spec.n = proofs.size();
  spec.scale = vk.scale;
  spec.lambda = opts.lambda;

  std::vector<Digest> digests;
  std::vector<Fe> private_values;
  std::vector<double> labels;
  for (size_t i = 0; i < proofs.size(); ++i) {
    const Proof& p = proofs[i];
    auto r = verify(vk, p);
    if (!r) throw InvalidProof("inner proof " + std::to_string(i) + ": " + r.reason + " (" + r.detail + ")");
    auto y = std::span<const Fe>(p.instance).subspan(vk.n_public_inputs, vk.outputs.size());
    if (!witnesses.empty()) {
      const auto& w = witnesses[i];
      if (w.instance.size() != p.instance.size() || !std::equal(y.begin(), y.end(), w.instance.begin() + vk.n_public_inputs))
        throw WitnessMismatch("witness " + std::to_string(i) + " does not match its proof");
    }
    digests.push_back(p.digest());
    if (spec.task == TaskKind::kClassification) {
      spec.classes = vk.outputs.size();
      int64_t label = label_class(ground_truths[i]);
      if (label >= static_cast<int64_t>(spec.classes)) throw ShapeError("label outside the output classes");
      labels.push_back(static_cast<double>(label));
      private_values.push_back(Fe(static_cast<uint64_t>(argmax_class(y))));
    } else {
      if (vk.outputs.size() != 1 || ground_truths[i].size() != 1)
        throw MetricUnsupported("regression metric attestations need a single-valued output");
      labels.push_back(ground_truths[i][0]);
      private_values.push_back(y[0]);
      int64_t d = y[0].to_signed() - encode_raw(ground_truths[i][0], vk.scale);
      spec.bound = std::max(spec.bound, d < 0 ? -d : d);
    }
  }
  if (spec.task == TaskKind::kRegression) {
    spec.tolerance = tolerance_raw(opts.tolerance, vk.scale);
    // Rounded up to a power of two so the published bound says little about the data.
    spec.bound = int64_t{1} << ceil_log2(static_cast<uint64_t>(std::max(spec.bound, spec.tolerance)) + 1);
  }
  spec.validate();

  ConstraintSystem cs = metric_circuit(spec);
  auto [pk, mvk] = setup(cs, {}, SetupOptions{spec.lambda});
  std::vector<Fe> inst = metric_public_inputs(spec, labels, digests, vk.weight_hash, opts.dataset_digest);
  inst.resize(cs.n_instance);
  Witness w = make_witness(cs, mvk.circuit_digest, {}, mvk.weight_hash, std::move(inst), private_values);
  ProveOptions po;
  po.mode = ProofMode::kSpotCheck;
  po.seed = opts.seed;
  Proof proof = prove(pk, w, po);

  MetricAttestation a;
  a.spec = spec;
  a.inner_vk = vk;
  a.inner_digests = std::move(digests);
  a.dataset_digest = opts.dataset_digest;
  a.labels = std::move(labels);
  for (auto v : w.y_tilde(cs)) a.counts.push_back(static_cast<uint64_t>(v.to_signed()));
  a.value = metric_value(spec, a.counts);
  a.confusion = confusion_of(spec, a.counts);
  a.proof = proof.serialize();
  return a;
}

Bytes MetricAttestation::serialize() const {
  ByteWriter w;
  w.u32(kAttestationMagic);
  w.u32(kAttestationVersion);
  w.str(spec.to_json().dump());
  w.blob(inner_vk.serialize());
  w.u64(inner_digests.size());
  for (const auto& d : inner_digests) w.raw(d);
  w.raw(dataset_digest);
  w.u64(labels.size());
  for (double l : labels) w.f64(l);
  w.u64(counts.size());
  for (auto c : counts) w.u64(c);
  w.f64(value);
  w.blob(proof);
  return w.take();
}

MetricAttestation MetricAttestation::deserialize(std::span<const uint8_t> bytes) {
  ByteReader r(bytes);
  if (r.u32() != kAttestationMagic) throw FormatError("not a metric attestation");
  if (r.u32() != kAttestationVersion) throw FormatError("unsupported metric attestation version");
  MetricAttestation a;
  try {
    a.spec = MetricSpec::from_json(json::parse(r.str()));
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("bad metric spec: ") + e.what());
  }
  a.inner_vk = VerificationKey::deserialize(r.blob());
  a.inner_digests.resize(r.count(32));
  for (auto& d : a.inner_digests) {
    auto s = r.raw(32);
    std::copy(s.begin(), s.end(), d.begin());
  }
  auto s = r.raw(32);
  std::copy(s.begin(), s.end(), a.dataset_digest.begin());
  a.labels.resize(r.count(8));
  for (auto& l : a.labels) l = r.f64();
  a.counts.resize(r.count(8));
  for (auto& c : a.counts) c = r.u64();
  a.value = r.f64();
  auto p = r.blob();
  a.proof.assign(p.begin(), p.end());
  r.expect_end();
  a.confusion = confusion_of(a.spec, a.counts);
  return a;
}

json MetricAttestation::sidecar() const {
  json d = json::array();
  for (const auto& x : inner_digests) d.push_back(to_hex(x));
  json j = {{"format", "zkeval-metric-attestation/1"},
            {"metric", metric_name(spec.kind)},
            {"task", task_name(spec.task)},
            {"value", value},
            {"n", spec.n},
            {"weight_hash", to_hex(inner_vk.weight_hash)},
            {"inner_vk_digest", to_hex(inner_vk.digest())},
            {"dataset_digest", to_hex(dataset_digest)},
            {"spec", spec.to_json()},
            {"inner_proof_digests", d}};
  if (!confusion.empty()) j["confusion_matrix"] = confusion;
  return j;
}

VerifyResult verify_metric_attestation(const MetricAttestation& a, std::span<const Digest> expected) {
  auto fail = [](std::string reason, std::string detail) { return VerifyResult{false, std::move(reason), std::move(detail)}; };
  try {
    a.spec.validate();
  } catch (const Error& e) {
    return fail("malformed_attestation", e.what());
  }
  if (a.inner_digests.size() != a.spec.n || a.labels.size() != a.spec.n)
    return fail("malformed_attestation", "sample count differs from the metric spec");
  if (!expected.empty() &&
      (expected.size() != a.inner_digests.size() || !std::equal(expected.begin(), expected.end(), a.inner_digests.begin())))
    return fail("digest_mismatch", "inner proof digests differ from the expected set");
  if (a.spec.scale != a.inner_vk.scale) return fail("malformed_attestation", "metric scale differs from the model");

  ConstraintSystem cs;
  try {
    cs = metric_circuit(a.spec);
  } catch (const Error& e) {
    return fail("malformed_attestation", e.what());
  }
  auto [pk, mvk] = setup(cs, {}, SetupOptions{a.spec.lambda});
  Proof p;
  try {
    p = Proof::deserialize(a.proof);
  } catch (const Error& e) {
    return fail("malformed_proof", e.what());
  }
  std::vector<Fe> x = metric_public_inputs(a.spec, a.labels, a.inner_digests, a.inner_vk.weight_hash, a.dataset_digest);
  if (a.counts.size() != cs.outputs.size()) return fail("metric_mismatch", "wrong number of metric counts");
  std::vector<Fe> y;
  for (auto c : a.counts) y.push_back(Fe(c));
  auto r = verify(mvk, p, x, y);
  if (!r) return r;
  double v;
  try {
    v = metric_value(a.spec, a.counts);
  } catch (const Error& e) {
    return fail("metric_mismatch", e.what());
  }
  if (v != a.value) return fail("metric_mismatch", "stated metric value differs from the proven counts");
  return {true, "", ""};
}

}  // namespace zkeval
