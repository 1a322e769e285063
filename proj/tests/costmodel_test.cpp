#include <doctest.h>

#include "zkeval/costmodel.hpp"
#include "zkeval/errors.hpp"

using namespace zkeval;

namespace {

Measurement point(uint64_t n_con, double secs) {
  Measurement m;
  m.label = "m" + std::to_string(n_con);
  m.n_con = n_con;
  m.padded_rows = padded_rows_for(n_con);
  m.prove_seconds = secs;
  m.pk_bytes = 100 * m.padded_rows;
  m.peak_mem_bytes = 10 * m.padded_rows;
  return m;
}

}  // namespace

TEST_SUITE("costmodel") {
  TEST_CASE("exact line") {
    std::vector<double> x{1, 2, 3, 4}, y{5, 8, 11, 14};
    auto f = fit_line(x, y);
    CHECK(f.slope == doctest::Approx(3.0));
    CHECK(f.intercept == doctest::Approx(2.0));
    CHECK(f.r2 == doctest::Approx(1.0));
  }

  TEST_CASE("fewer than three distinct row counts") {
    std::vector<Measurement> ms{point(100, 1.0), point(120, 1.1), point(300, 2.0)};  // 128, 128, 512
    CHECK_THROWS_AS(fit(ms), InsufficientData);
  }

  TEST_CASE("estimates follow padded rows") {
    std::vector<Measurement> ms{point(200, 0.256), point(500, 0.512), point(1000, 1.024), point(2000, 2.048)};
    auto c = fit(ms);
    CHECK(c.prove_time.slope == doctest::Approx(0.001));
    auto a = estimate(c, 1024, 10), b = estimate(c, 1025, 10);
    CHECK(a.padded_rows == 1024);
    CHECK(b.padded_rows == 2048);
    CHECK(b.prove_seconds - a.prove_seconds == doctest::Approx(1.024));
    CHECK(a.dataset_seconds == doctest::Approx(10 * a.prove_seconds));
    CHECK(estimate(c, 1024, 0).dataset_seconds == 0.0);
    auto back = CostCoefficients::from_json(c.to_json());
    CHECK(back.prove_time.slope == c.prove_time.slope);
  }

  TEST_CASE("measurement json round trip and csv") {
    auto m = point(77, 0.5);
    CHECK(Measurement::from_json(m.to_json()).to_json() == m.to_json());
    std::vector<Measurement> rows{m};
    auto csv = to_csv(rows);
    CHECK(csv.find("m77") != std::string::npos);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
  }
}
