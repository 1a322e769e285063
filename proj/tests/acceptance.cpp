// Acceptance run: one PASS/FAIL line per criterion. Expected values come from
// small oracles written here, not from the library under test.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "zkeval/attestation.hpp"
#include "zkeval/calibrate.hpp"
#include "zkeval/challenge.hpp"
#include "zkeval/circuit.hpp"
#include "zkeval/cli.hpp"
#include "zkeval/costmodel.hpp"
#include "zkeval/errors.hpp"
#include "zkeval/fixtures.hpp"
#include "zkeval/pipeline.hpp"
#include "zkeval/prover.hpp"
#include "zkeval/witness.hpp"

namespace fs = std::filesystem;
using namespace zkeval;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fixture(const std::string& name) { return std::string(ZKEVAL_FIXTURE_DIR) + "/" + name; }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

// ---- shared fixture state ----

struct Prepared {
  Graph g;
  fixtures::Dataset ds;
  CompiledModel m;
  ProvingKey pk;
  VerificationKey vk;
};

std::map<std::string, std::unique_ptr<Prepared>>& cache() {
  static std::map<std::string, std::unique_ptr<Prepared>> c;
  return c;
}

Prepared& prepared(const std::string& name) {
  auto& c = cache();
  auto it = c.find(name);
  if (it != c.end()) return *it->second;
  auto p = std::make_unique<Prepared>();
  p->g = load_graph_file(fixture(name + ".json"));
  p->ds = fixtures::Dataset::load(fixture(name + "_data.json"));
  auto cal = calibrate(p->g, p->ds.inputs, CalibrationMode::kResources);
  p->m = compile_model(p->g, cal);
  auto [pk, vk] = setup(p->m.cs, p->m.weights);
  p->pk = std::move(pk);
  p->vk = std::move(vk);
  return *c.emplace(name, std::move(p)).first->second;
}

Digest seed_digest(uint64_t i) {
  Bytes b(8);
  for (int k = 0; k < 8; ++k) b[k] = static_cast<uint8_t>(i >> (8 * k));
  return sha256(b);
}

// Independent float reference for the circuit outputs (logits for ArgMax heads).
std::vector<double> float_outputs(const Graph& g, const Sample& s) {
  auto vals = infer_float_all(g, s);
  std::vector<double> out;
  for (const auto& o : g.outputs) {
    const auto& t = vals.at(circuit_output_ref(g, o));
    out.insert(out.end(), t.data.begin(), t.data.end());
  }
  return out;
}

std::vector<double> decoded(const ConstraintSystem& cs, std::span<const Fe> y) {
  std::vector<double> out;
  for (const auto& t : decode_outputs(cs, y)) out.insert(out.end(), t.data.begin(), t.data.end());
  return out;
}

double inf_rel_error(const std::vector<double>& q, const std::vector<double>& f) {
  double num = 0, den = 0;
  for (size_t i = 0; i < q.size(); ++i) {
    num = std::max(num, std::abs(q[i] - f[i]));
    den = std::max(den, std::abs(f[i]));
  }
  return den == 0 ? num : num / den;
}

// Plain OLS R^2, kept apart from the library's fit_line.
double r_squared(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (size_t i = 0; i < x.size(); ++i) mx += x[i] / n, my += y[i] / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (syy == 0) return 1.0;
  return sxy * sxy / (sxx * syy);
}

// ---- 1 ----

Outcome extremum_oracle() {
  auto t0 = Clock::now();
  uint64_t checked = 0, counterexamples = 0;
  std::string first;
  for (bool is_max : {true, false}) {
    for (int len = 1; len <= 4; ++len) {
      CircuitBuilder b;
      std::vector<Operand> x;
      for (int i = 0; i < len; ++i) x.push_back(b.new_instance());
      Operand m = b.new_instance();
      if (is_max)
        b.max_argument(x, m, 3);
      else
        b.min_argument(x, m, 3);
      b.expose_outputs({}, false);
      ConstraintSystem cs = b.finish();

      std::vector<int64_t> v(len, -3);
      while (true) {
        int64_t truth = is_max ? *std::max_element(v.begin(), v.end()) : *std::min_element(v.begin(), v.end());
        for (int64_t claim = -8; claim <= 8; ++claim) {
          std::vector<Fe> inst;
          for (int64_t e : v) inst.push_back(Fe::from_signed(e));
          inst.push_back(Fe::from_signed(claim));
          bool sat = false;
          try {
            sat = check_satisfied(cs, execute(cs, inst, {})).ok;
          } catch (const DomainError&) {
            sat = false;  // no table row can hold the lookup input
          }
          ++checked;
          if (sat != (claim == truth)) {
            if (counterexamples++ == 0) first = std::string(is_max ? "max" : "min") + " claim " + std::to_string(claim);
          }
        }
        int k = 0;
        while (k < len && v[k] == 3) v[k++] = -3;
        if (k == len) break;
        ++v[k];
      }
    }
  }
  double secs = since(t0);
  return {counterexamples == 0 && secs < 60.0,
          std::to_string(checked) + " (vector, claim) pairs, " + std::to_string(counterexamples) +
              " counterexamples" + (first.empty() ? "" : " (first: " + first + ")") + ", " + fmt("%.1f s", secs)};
}


// ---- 2 ----

// Every advice cell of a small lowered model, mutated one at a time.
Outcome mutation_audit(uint64_t* circuits_out, uint64_t* mutations_out) {
  std::mt19937_64 rng(2024);
  uint64_t mutations = 0, rejected = 0, circuits = 0;
  std::string first_miss;
  for (int c = 0; c < 100; ++c) {
    std::uniform_int_distribution<int> dim(2, 5);
    Graph g;
    switch (c % 3) {
      case 0: g = fixtures::mlp(dim(rng), dim(rng), 2 + c % 2, 100 + c, c % 2 == 0); break;
      case 1: g = fixtures::svm(dim(rng), 2 + c % 3, 200 + c); break;
      default: g = fixtures::regression(dim(rng), 300 + c); break;
    }
    auto samples = random_samples(g, 4, 400 + c);
    auto cal = calibrate_at(g, samples, 5 + c % 3);
    auto model = compile_model(g, cal);
    auto [pk, vk] = setup(model.cs, model.weights);
    Witness honest = model.witness(samples[0]);
    ++circuits;
    std::uniform_int_distribution<int64_t> delta(1, 1000);
    for (size_t i = 0; i < honest.advice.size(); ++i) {
      Witness w = honest;
      int64_t d = delta(rng);
      w.advice[i] = w.advice[i] + Fe::from_signed(rng() % 2 ? d : -d);
      ProveOptions po;
      po.mode = ProofMode::kAudit;
      po.check_witness = false;
      po.seed = seed_digest(mutations);
      Proof p = prove(pk, w, po);
      ++mutations;
      if (!verify(vk, p).ok)
        ++rejected;
      else if (first_miss.empty())
        first_miss = "circuit " + std::to_string(c) + " cell " + std::to_string(i);
    }
  }
  *circuits_out = circuits;
  *mutations_out = mutations;
  return {rejected == mutations && circuits >= 100,
          "audit: " + std::to_string(rejected) + "/" + std::to_string(mutations) + " mutations rejected over " +
              std::to_string(circuits) + " circuits" + (first_miss.empty() ? "" : " (missed " + first_miss + ")")};
}

// Rows c_i = 2 x_i + 1, only c_0 exposed: a mutated c_j (j > 0) breaks row j alone.
Outcome mutation_spot(uint64_t rows, double* rate_out, double* expect_out) {
  CircuitBuilder b;
  std::vector<Operand> x, c;
  for (uint64_t i = 0; i < rows; ++i) x.push_back(b.new_instance());
  for (uint64_t i = 0; i < rows; ++i) c.push_back(b.affine(x[i], Fe(2), Operand{}, Fe(), Fe(1)));
  b.expose_outputs({c[0]}, false);
  ConstraintSystem cs = b.finish();
  auto [pk, vk] = setup(cs, {});
  std::vector<Fe> inst;
  for (uint64_t i = 0; i < rows; ++i) inst.push_back(Fe::from_signed(static_cast<int64_t>(i % 17) - 8));
  inst.push_back(Fe());
  Witness honest = make_witness(cs, cs.digest(), {}, hash_weight_column({}), inst);

  std::mt19937_64 rng(rows);
  std::uniform_int_distribution<uint64_t> pick(1, rows - 1);
  const int seeds = 1000;
  int rejected = 0;
  for (int s = 0; s < seeds; ++s) {
    Witness w = honest;
    const uint64_t cell = c[pick(rng)].index;
    w.advice[cell] = w.advice[cell] + Fe(1 + rng() % 999);
    ProveOptions po;
    po.mode = ProofMode::kSpotCheck;
    po.check_witness = false;
    po.seed = seed_digest(1000000 + s);
    if (!verify(vk, prove(pk, w, po)).ok) ++rejected;
  }
  const double n = static_cast<double>(padded_rows_for(rows));
  const double q = std::max<double>(vk.lambda, std::ceil(n * vk.spot_ppm / 1e6));
  *expect_out = 1.0 - std::pow(1.0 - 1.0 / n, q);
  *rate_out = static_cast<double>(rejected) / seeds;
  return {std::abs(*rate_out - *expect_out) <= 0.05, ""};
}

Outcome mutation_suite() {
  uint64_t circuits = 0, mutations = 0;
  Outcome audit = mutation_audit(&circuits, &mutations);
  bool ok = audit.pass;
  std::string detail = audit.detail + "; spot-check";
  for (uint64_t rows : {256, 512, 1024}) {
    double rate = 0, expect = 0;
    Outcome o = mutation_spot(rows, &rate, &expect);
    ok = ok && o.pass;
    detail += " n=" + std::to_string(rows) + ": " + fmt("%.3f", rate) + " vs " + fmt("%.3f", expect);
  }
  return {ok, detail};
}

// ---- 3 ----

Outcome completeness() {
  uint64_t total = 0, good = 0;
  std::string first_bad;
  for (const char* name : {"regression", "svm", "mlp", "cnn"}) {
    Prepared& p = prepared(name);
    for (size_t i = 0; i < p.ds.size(); ++i) {
      Witness w = p.m.witness(p.ds.inputs[i]);
      std::vector<ProofMode> modes{ProofMode::kSpotCheck};
      if (i < 2) modes.push_back(ProofMode::kAudit);
      for (ProofMode mode : modes) {
        ProveOptions po;
        po.mode = mode;
        po.seed = seed_digest(i);
        Proof proof = prove(p.pk, w, po);
        Bytes bytes = proof.serialize();
        auto x = instance_for(p.m.cs, p.ds.inputs[i], p.m.weight_hash);
        x.resize(p.m.cs.n_public_inputs);
        auto r = verify(p.vk, bytes, x, w.y_tilde(p.m.cs));
        ++total;
        if (r.ok)
          ++good;
        else if (first_bad.empty())
          first_bad = std::string(name) + "#" + std::to_string(i) + " " + r.reason;
      }
    }
  }
  return {good == total && total > 0, std::to_string(good) + "/" + std::to_string(total) +
                                          " honest proofs verify (4 fixtures, spot-check and audit)" +
                                          (first_bad.empty() ? "" : "; first failure " + first_bad)};
}

// ---- 4 ----

Outcome quantization_bound() {
  Prepared& p = prepared("mlp");
  auto cal = p.m.cal;
  auto inputs = random_samples(p.g, 100, 4242, 0.0, 1.0);
  double worst = 0.0;
  for (const auto& s : inputs) {
    auto q = decoded(p.m.cs, p.m.witness(s).y_tilde(p.m.cs));
    worst = std::max(worst, inf_rel_error(q, float_outputs(p.g, s)));
  }
  return {worst <= cal.error_bound && worst <= 0.05,
          "scale " + std::to_string(cal.scale) + ", max relative error " + fmt("%.4f", worst) +
              " over 100 fresh inputs; report bound " + fmt("%.3f", cal.error_bound) + " (calibration max " +
              fmt("%.4f", cal.max_rel_error) + ")"};
}

// ---- 5 ----

Outcome aggregation_agreement() {
  Prepared& p = prepared("mlp");
  const size_t n = std::min<size_t>(50, p.ds.size());
  std::vector<Witness> wits;
  std::vector<Proof> proofs;
  std::vector<BundleEntry> entries;
  std::vector<std::vector<double>> truths;
  uint64_t oracle_correct = 0;
  for (size_t i = 0; i < n; ++i) {
    wits.push_back(p.m.witness(p.ds.inputs[i]));
    ProveOptions po;
    po.seed = seed_digest(50 + i);
    proofs.push_back(prove(p.pk, wits.back(), po));
    truths.push_back(p.ds.labels[i]);
    entries.push_back(BundleEntry::from_proof(p.vk, proofs.back(), p.ds.labels[i]));
    // first maximum wins
    auto y = wits.back().y_tilde(p.m.cs);
    size_t best = 0;
    for (size_t k = 1; k < y.size(); ++k)
      if (y[k].to_signed() > y[best].to_signed()) best = k;
    if (static_cast<double>(best) == p.ds.labels[i][0]) ++oracle_correct;
  }
  const double oracle = static_cast<double>(oracle_correct) / static_cast<double>(n);

  BundleManifest man;
  man.dataset_id = "mlp_data";
  man.scale = p.m.cs.scale;
  NaiveBundle bundle = build_bundle(p.vk, entries, man);
  auto rep = verify_bundle(NaiveBundle::deserialize(bundle.serialize()));

  MetricOptions mo;
  mo.dataset_digest = dataset_digest(std::vector<Sample>(p.ds.inputs.begin(), p.ds.inputs.begin() + n),
                                     std::vector<std::vector<double>>(truths.begin(), truths.end()));
  mo.seed = seed_digest(7);
  auto att = build_metric_attestation(p.vk, wits, proofs, truths, MetricKind::kAccuracy, mo);
  Bytes att_bytes = att.serialize();
  auto att2 = MetricAttestation::deserialize(att_bytes);
  std::vector<Digest> digests;
  for (const auto& pr : proofs) digests.push_back(pr.digest());
  auto vr = verify_metric_attestation(att2, digests);

  // Structural scan: no public or opened field of the metric proof carries a
  // per-sample output vector, and the private inputs are one class per sample.
  Proof mp = Proof::deserialize(att2.proof);
  std::vector<std::vector<Fe>> pools{mp.instance};
  std::vector<Fe> opened;
  for (const auto& c : mp.cells) opened.push_back(c.value);
  pools.push_back(opened);
  uint64_t hits = 0;
  const size_t width = p.m.cs.outputs.size();
  for (const auto& w : wits) {
    auto y = w.y_tilde(p.m.cs);
    for (const auto& pool : pools)
      for (size_t off = 0; off + width <= pool.size(); ++off)
        if (std::equal(y.begin(), y.end(), pool.begin() + static_cast<std::ptrdiff_t>(off))) ++hits;
  }
  ConstraintSystem mcs = metric_circuit(att2.spec);
  const bool private_ok = mcs.n_external == n;
  const bool sidecar_ok = att2.sidecar().dump().find("y_tilde") == std::string::npos;
  const bool fields_ok = att2.counts.size() == 1 && att2.labels.size() == n;

  bool ok = vr.ok && rep.ok() && att2.value == rep.metrics.accuracy && rep.metrics.accuracy == oracle && hits == 0 &&
            private_ok && sidecar_ok && fields_ok;
  return {ok, "bundle " + fmt("%.4f", rep.metrics.accuracy) + ", metric " + fmt("%.4f", att2.value) + ", oracle " +
                  fmt("%.4f", oracle) + " on " + std::to_string(n) + " samples; metric verify " +
                  (vr.ok ? "ok" : vr.reason) + "; output vectors found in attestation: " + std::to_string(hits) +
                  "; private inputs " + std::to_string(mcs.n_external)};
}

// ---- 6 ----

Outcome volkswagen() {
  Prepared& a = prepared("mlp");
  Graph gb = fixtures::mlp(784, 32, 10, 5);
  auto cal_b = calibrate(gb, a.ds.inputs, CalibrationMode::kResources);
  auto mb = compile_model(gb, cal_b);
  auto [pk_b, vk_b] = setup(mb.cs, mb.weights);

  auto xs = random_samples(a.g, 100, 777, 0.0, 1.0);
  int a_pass = 0, b_fail = 0, b_refused = 0;
  std::map<std::string, int> b_reasons;
  for (size_t i = 0; i < xs.size(); ++i) {
    auto req = make_challenge(a.vk, xs[i], float_outputs(a.g, xs[i]), 0.05);
    ProveOptions po;
    po.seed = seed_digest(9000 + i);
    try {
      if (adjudicate(a.vk, req, respond(a.pk, req, po)).pass) ++a_pass;
    } catch (const ChallengeFailure&) {
    }
    // B answers with its own proof whether or not its output is close.
    ChallengeResponse rb;
    try {
      rb = respond(pk_b, req, po);
    } catch (const ChallengeFailure&) {
      ++b_refused;
      Witness w = mb.witness(xs[i]);
      rb.nonce = req.nonce;
      rb.weight_hash = w.weight_hash;
      auto y = w.y_tilde(mb.cs);
      rb.y_tilde.assign(y.begin(), y.end());
      rb.proof = prove(pk_b, w, po).serialize();
    }
    Verdict v = adjudicate(a.vk, req, rb);
    if (!v.pass) ++b_fail;
    ++b_reasons[v.reason];
  }
  std::string reasons;
  for (const auto& [r, k] : b_reasons) reasons += (reasons.empty() ? "" : ", ") + r + " " + std::to_string(k);
  return {a_pass == 100 && b_fail == 100, "model A passes " + std::to_string(a_pass) + "/100, model B fails " +
                                              std::to_string(b_fail) + "/100 (" + reasons + ")"};
}

// ---- 7 ----

Outcome scaling_sweep() {
  auto t0 = Clock::now();
  MeasureOptions mo;
  mo.repeats = 25;
  mo.scale = 7;
  std::vector<double> macs, ncon, rows, prove_s, verify_s;
  std::string table;
  for (int64_t w : {16, 32, 64, 128, 256}) {
    auto m = measure_model("w" + std::to_string(w), fixtures::mlp(8, w, 2, 7, false), mo);
    macs.push_back(static_cast<double>(m.macs));
    ncon.push_back(static_cast<double>(m.n_con));
    rows.push_back(static_cast<double>(m.padded_rows));
    prove_s.push_back(m.prove_seconds);
    verify_s.push_back(m.verify_seconds);
    table += " w" + std::to_string(w) + "(" + std::to_string(m.n_con) + "/" + std::to_string(m.padded_rows) + " " +
             fmt("%.2fms", m.prove_seconds * 1e3) + " " + fmt("%.2fms", m.verify_seconds * 1e3) + ")";
  }
  const double r2_con = r_squared(macs, ncon), r2_time = r_squared(rows, prove_s);
  const double vspread = *std::max_element(verify_s.begin(), verify_s.end()) /
                         *std::min_element(verify_s.begin(), verify_s.end());
  const double growth = prove_s.back() / prove_s.front();
  const double secs = since(t0);
  return {r2_con >= 0.99 && r2_time >= 0.99 && vspread < 2.0 && growth > 10.0 && secs < 1800,
          "R2 n_con~MACs " + fmt("%.5f", r2_con) + ", R2 prove~rows " + fmt("%.4f", r2_time) + ", verify spread " +
              fmt("%.2fx", vspread) + ", prove growth " + fmt("%.1fx", growth) + ", " + fmt("%.1f s;", secs) + table};
}

// ---- 8 ----

Outcome rounding_law() {
  uint64_t bad = 0, first = 0;
  uint64_t pow2 = 1;
  for (uint64_t n = 1; n <= (uint64_t{1} << 24); ++n) {
    if (n > pow2) pow2 <<= 1;
    if (padded_rows_for(n) != pow2) {
      if (bad++ == 0) first = n;
    }
  }
  return {bad == 0, "2^24 values checked, " + std::to_string(bad) + " mismatches" +
                        (bad ? " (first n=" + std::to_string(first) + ")" : "")};
}

// ---- 9 ----

Outcome size_asymmetry() {
  bool ok = true;
  std::string detail;
  for (const char* name : {"regression", "svm", "mlp", "cnn"}) {
    Prepared& p = prepared(name);
    ProveOptions po;
    po.seed = seed_digest(1);
    const double proof = static_cast<double>(prove(p.pk, p.m.witness(p.ds.inputs[0]), po).serialize().size());
    const double pk = static_cast<double>(p.pk.serialize().size());
    const size_t vk = p.vk.serialize().size();
    ok = ok && proof < 0.01 * pk && vk <= 16 * 1024;
    detail += std::string(detail.empty() ? "" : "; ") + name + " proof/pk " + fmt("%.4f%%", 100.0 * proof / pk) +
              " vk " + std::to_string(vk) + " B";
  }
  MeasureOptions mo;
  mo.repeats = 1;
  auto rows = report_table({{"regression", prepared("regression").g}, {"mlp", prepared("mlp").g},
                            {"cnn", prepared("cnn").g}},
                           mo);
  const bool ordered = rows[0].n_con < rows[1].n_con && rows[1].n_con < rows[2].n_con;
  detail += "; report_table n_con " + std::to_string(rows[0].n_con) + " < " + std::to_string(rows[1].n_con) + " < " +
            std::to_string(rows[2].n_con);
  return {ok && ordered, detail};
}

// ---- 10 ----

Outcome audit_economics() {
  const uint64_t trials = 20000;
  double worst = 0.0;
  int points = 0;
  uint64_t seed = 1;
  for (double p : {0.01, 0.1, 0.5})
    for (double f : {0.05, 0.5})
      for (uint64_t n : {10, 100}) {
        // Cheating draws are made here; audit draws come from the scheduler.
        std::mt19937_64 rng(seed * 7919);
        std::bernoulli_distribution cheat(f);
        uint64_t caught = 0;
        AuditPolicy pol{p, 1.0};
        for (uint64_t t = 0; t < trials; ++t) {
          auto audits = schedule_audits(n, pol, seed++);
          bool hit = false;
          for (uint64_t k = 0; k < n; ++k) hit = (cheat(rng) && audits[k]) || hit;
          caught += hit;
        }
        const double mc = static_cast<double>(caught) / trials;
        const double closed = 1.0 - std::pow(1.0 - p * f, static_cast<double>(n));
        worst = std::max(worst, std::abs(mc - closed));
        ++points;
      }
  bool identity = true;
  for (double p : {0.01, 0.1, 0.5, 0.05, 0.2, 0.25, 1.0})
    for (double c : {1.0, 2.5, 10.0}) {
      AuditPolicy pol{p, c};
      identity = identity && pol.reward() * p == c && expected_cost_balance(pol, 100).reward * p == c;
    }
  return {worst <= 0.02 && points == 12 && identity,
          std::to_string(points) + " grid points, worst |MC - closed form| " + fmt("%.4f", worst) +
              ", r*p == c " + (identity ? "exact" : "NOT exact")};
}

// ---- 11 ----

Outcome cli_pipeline() {
  fs::path dir = fs::temp_directory_path() / ("zkeval_accept_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string graph = fixture("mlp.json"), data = fixture("mlp_data.json");
  std::vector<std::vector<std::string>> steps = {
      {"calibrate", "--graph", graph, "--data", data, "-o", "settings.json"},
      {"compile", "--graph", graph, "--settings", "settings.json", "--out-dir", "keys"},
      {"witness", "--pk", "keys/pk.bin", "--data", data, "--limit", "10"},
      {"prove", "--pk", "keys/pk.bin", "--jobs", "2"},
      {"verify", "--vk", "keys/vk.bin", "--data", data, "proofs"},
      {"attest", "--vk", "keys/vk.bin", "--data", data, "--kind", "metric", "-o", "accuracy.zkma"},
      {"verify-attestation", "accuracy.zkma"},
      {"attest", "--vk", "keys/vk.bin", "--data", data, "--kind", "bundle", "-o", "bundle.zip"},
      {"verify-attestation", "bundle.zip"},
      {"challenge", "--vk", "keys/vk.bin", "--data", data, "--index", "3", "--graph", graph, "--settings",
       "settings.json"},
      {"respond", "--pk", "keys/pk.bin", "--request", "challenge.json"},
      {"adjudicate", "--vk", "keys/vk.bin", "--request", "challenge.json", "--response", "response.bin"},
  };
  auto t0 = Clock::now();
  std::string failed;
  for (const auto& s : steps) {
    std::vector<std::string> args{"zkeval", "--workdir", dir.string()};
    args.insert(args.end(), s.begin(), s.end());
    std::ostringstream out, err;
    int rc = cli::run(args, out, err);
    if (rc != cli::kOk) {
      failed = s[0] + " exited " + std::to_string(rc) + ": " + err.str().substr(0, 200);
      break;
    }
  }
  const double secs = since(t0);
  fs::remove_all(dir);
  return {failed.empty() && secs < 300,
          failed.empty() ? std::to_string(steps.size()) + " commands exit 0 in " + fmt("%.1f s", secs) : failed};
}

}  // namespace

int main(int argc, char** argv) {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  std::vector<Criterion> all = {
      {1, "max/min argument oracle", extremum_oracle},
      {2, "soundness mutation suite", mutation_suite},
      {3, "completeness", completeness},
      {4, "quantization bound", quantization_bound},
      {5, "bundle and metric attestation agree", aggregation_agreement},
      {6, "hash binding (two-model challenge)", volkswagen},
      {7, "scaling sweep", scaling_sweep},
      {8, "padded row rounding", rounding_law},
      {9, "proof and key sizes", size_asymmetry},
      {10, "audit economics", audit_economics},
      {11, "CLI pipeline", cli_pipeline},
  };
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::stoi(argv[i]));
  int failures = 0;
  for (const auto& c : all) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.name << "): " << o.detail
              << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
