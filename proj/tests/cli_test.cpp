#include <doctest.h>

#include <filesystem>
#include <random>
#include <sstream>

#include <json.hpp>

#include "support.hpp"
#include "zkeval/cli.hpp"
#include "zkeval/prover.hpp"

namespace fs = std::filesystem;
using zkeval::testing::fixture;

namespace {

struct Result {
  int rc;
  std::string out, err;
};

struct Workspace {
  fs::path dir;
  Workspace() {
    std::random_device rd;
    dir = fs::temp_directory_path() / ("zkeval_cli_" + std::to_string(rd()));
    fs::create_directories(dir);
  }
  ~Workspace() { fs::remove_all(dir); }

  Result run(std::vector<std::string> args, bool json = false) const {
    std::vector<std::string> full{"zkeval", "--workdir", dir.string()};
    if (json) full.push_back("--json");
    full.insert(full.end(), args.begin(), args.end());
    std::ostringstream out, err;
    int rc = zkeval::cli::run(full, out, err);
    return {rc, out.str(), err.str()};
  }
};

// calibrate, compile, witness and prove the first few svm samples
void pipeline(const Workspace& ws) {
  const std::string graph = fixture("svm.json"), data = fixture("svm_data.json");
  REQUIRE(ws.run({"calibrate", "--graph", graph, "--data", data}).rc == 0);
  REQUIRE(ws.run({"compile", "--graph", graph, "--settings", "settings.json", "--out-dir", "keys"}).rc == 0);
  REQUIRE(ws.run({"witness", "--pk", "keys/pk.bin", "--data", data, "--limit", "3"}).rc == 0);
  REQUIRE(ws.run({"prove", "--pk", "keys/pk.bin"}).rc == 0);
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("usage errors exit 2") {
    Workspace ws;
    CHECK(ws.run({"frobnicate"}).rc == zkeval::cli::kUsage);
    CHECK(ws.run({}).rc == zkeval::cli::kUsage);
    CHECK(ws.run({"verify", "--vk", "missing.bin", "nothing"}).rc == zkeval::cli::kUsage);
  }

  TEST_CASE("pipeline, rerun and tamper") {
    Workspace ws;
    pipeline(ws);
    auto again = ws.run({"calibrate", "--graph", fixture("svm.json"), "--data", fixture("svm_data.json")});
    CHECK(again.rc == 0);
    CHECK((again.out + again.err).find("up to date") != std::string::npos);

    auto ok = ws.run({"verify", "--vk", "keys/vk.bin", "--data", fixture("svm_data.json"), "proofs"}, true);
    REQUIRE(ok.rc == 0);
    auto j = nlohmann::json::parse(ok.out);
    CHECK(j.at("command") == "verify");
    CHECK(j.at("ok") == true);
    auto& results = j.at("result").at("results");
    CHECK(results.size() == 3);
    std::set<std::string> keys;
    for (auto it = results[0].begin(); it != results[0].end(); ++it) keys.insert(it.key());
    CHECK(keys == std::set<std::string>{"detail", "ok", "proof", "reason"});

    // Corrupt one sibling on the cell authentication path.
    fs::path p = ws.dir / "proofs" / "0000.proof";
    auto proof = zkeval::Proof::deserialize(zkeval::read_file(p.string()));
    REQUIRE(!proof.cell_siblings.empty());
    proof.cell_siblings[0][0] ^= 1;
    zkeval::write_file(p.string(), proof.serialize());
    auto bad = ws.run({"verify", "--vk", "keys/vk.bin", "proofs/0000.proof"});
    CHECK(bad.rc == zkeval::cli::kRejected);
    CHECK((bad.out + bad.err).find("opening_authentication_failed") != std::string::npos);
  }
}
