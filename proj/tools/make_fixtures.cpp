// Regenerates the checked-in fixture models and datasets under fixtures/.
#include <filesystem>
#include <fstream>
#include <iostream>

#include "zkeval/fixtures.hpp"

namespace fs = std::filesystem;
using namespace zkeval;

namespace {

void save(const fs::path& p, const nlohmann::json& j) {
  std::ofstream f(p);
  f << j.dump() << '\n';
  std::cout << "wrote " << p.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  fs::path dir = argc > 1 ? fs::path(argv[1]) : fs::path(ZKEVAL_FIXTURE_DIR);
  fs::create_directories(dir);

  Graph reg = fixtures::regression();
  Graph svm = fixtures::svm();
  Graph mlp = fixtures::mlp();
  Graph cnn = fixtures::cnn();
  save(dir / "regression.json", graph_to_json(reg));
  save(dir / "svm.json", graph_to_json(svm));
  save(dir / "mlp.json", graph_to_json(mlp));
  save(dir / "cnn.json", graph_to_json(cnn));

  save(dir / "regression_data.json", fixtures::make_dataset(reg, "regression", 20, 11, -1.0, 1.0).to_json());
  save(dir / "svm_data.json", fixtures::make_dataset(svm, "classification", 20, 12, -1.0, 1.0, 6).to_json());
  // MNIST-like inputs in [0, 1); every 6th label disagrees with the model.
  save(dir / "mlp_data.json", fixtures::make_dataset(mlp, "classification", 50, 13, 0.0, 1.0, 6).to_json());
  save(dir / "cnn_data.json", fixtures::make_dataset(cnn, "classification", 10, 14, 0.0, 1.0, 5).to_json());
  return 0;
}
