#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "pada/bundle.hpp"
#include "pada/csv.hpp"
#include "pada/pipeline.hpp"
#include "pada/rng.hpp"
#include "pada/run_config.hpp"
#include "pada/simulate.hpp"

using namespace pada;
namespace fs = std::filesystem;

namespace {

// unique scratch directory per test run, removed on destruction
struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("pada_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

FtsDataset random_dataset(int J, uint64_t seed) {
  RngStream rng(seed, 0);
  FtsDataset data;
  data.curves.resize(size_t(J));
  for (int j = 0; j < J; ++j) {
    int n = 2 + int(rng.next_below(4));
    SampledCurve& c = data.curves[size_t(j)];
    for (int z = 0; z < n; ++z) {
      c.times.push_back(double(z) / double(n) + 0.01 * rng.next_double());
      c.values.push_back(rng.next_normal());
    }
  }
  return data;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  REQUIRE(f.good());
  return std::string((std::istreambuf_iterator<char>(f)),
                     std::istreambuf_iterator<char>());
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  f << text;
}

FitModel small_fit(uint64_t seed) {
  SimSpec spec;
  spec.scase = SimCase::case1;
  spec.curve_count = 30;
  spec.n_min = 4;
  spec.n_max = 6;
  spec.seed = seed;
  SimTruth truth = generate(spec);
  ModelConfig cfg;
  cfg.seed = seed;
  cfg.bandwidth_mu = 0.1;
  cfg.bandwidth_f = 0.15;
  cfg.components = 1;
  return fit_pada(truth.data, cfg);
}

}  // namespace

TEST_CASE("curve csv round-trips bit-exactly") {
  TempDir tmp;
  FtsDataset data = random_dataset(7, 42);
  std::string path = tmp.file("curves.csv");
  write_curve_csv(path, data);
  CurveCsv back = read_curve_csv(path);
  REQUIRE(back.data.curve_count() == 7);
  CHECK(back.gap_ids.empty());
  for (int j = 0; j < 7; ++j) {
    CHECK(back.curve_ids[size_t(j)] == j + 1);
    REQUIRE(back.data.curves[size_t(j)].size() ==
            data.curves[size_t(j)].size());
    for (int z = 0; z < data.curves[size_t(j)].size(); ++z) {
      CHECK(back.data.curves[size_t(j)].times[size_t(z)] ==
            data.curves[size_t(j)].times[size_t(z)]);
      CHECK(back.data.curves[size_t(j)].values[size_t(z)] ==
            data.curves[size_t(j)].values[size_t(z)]);
    }
  }
  // writing what was read reproduces the file byte for byte
  std::string again = tmp.file("curves2.csv");
  write_curve_csv(again, back.data, back.curve_ids);
  CHECK(slurp(path) == slurp(again));
}

TEST_CASE("curve csv accepts unsorted rows and id gaps") {
  TempDir tmp;
  std::string path = tmp.file("curves.csv");
  spit(path,
       "curve_id,time,value\n"
       "5,0.9,3.0\n"
       "1,0.5,1.5\n"
       "5,0.1,2.0\n"
       "2,0.3,-1.0\n"
       "1,0.2,1.0\n");
  CurveCsv got = read_curve_csv(path);
  REQUIRE(got.curve_ids == std::vector<long>{1, 2, 5});
  CHECK(got.gap_ids == std::vector<long>{3, 4});
  CHECK(got.data.curves[0].times == std::vector<double>{0.2, 0.5});
  CHECK(got.data.curves[0].values == std::vector<double>{1.0, 1.5});
  CHECK(got.data.curves[2].times == std::vector<double>{0.1, 0.9});
  CHECK(got.data.curves[2].values == std::vector<double>{2.0, 3.0});
}

TEST_CASE("curve csv reports malformed rows with line numbers") {
  TempDir tmp;
  std::string path = tmp.file("bad.csv");

  spit(path, "time,value\n1,0.5,1.0\n");
  CHECK_THROWS_WITH_AS(read_curve_csv(path),
                       doctest::Contains("header"), Error);

  spit(path, "curve_id,time,value\n1,0.5,1.0\n2,0.7\n");
  CHECK_THROWS_WITH_AS(read_curve_csv(path), doctest::Contains(":3:"), Error);

  spit(path, "curve_id,time,value\n1,0.5,abc\n");
  CHECK_THROWS_WITH_AS(read_curve_csv(path),
                       doctest::Contains("cannot parse value"), Error);

  spit(path, "curve_id,time,value\n1,1.5,2.0\n");
  CHECK_THROWS_WITH_AS(read_curve_csv(path),
                       doctest::Contains("time outside [0,1]"), Error);

  spit(path, "curve_id,time,value\n0,0.5,2.0\n");
  CHECK_THROWS_WITH_AS(read_curve_csv(path),
                       doctest::Contains("curve_id must be >= 1"), Error);
}

TEST_CASE("model bundle round-trips every field and every byte") {
  TempDir tmp;
  FitModel fit = small_fit(5);
  ModelBundle bundle{fit, {}};
  std::string dir_a = tmp.file("a");
  write_model_bundle(dir_a, bundle);

  ModelBundle back = read_model_bundle(dir_a);
  const FitModel& m = back.model;
  CHECK(m.grid.size() == fit.grid.size());
  CHECK(m.freqs.half_size() == fit.freqs.half_size());
  CHECK(m.sigma2 == fit.sigma2);
  CHECK(m.mean == fit.mean);
  REQUIRE(m.bank.component_count() == fit.bank.component_count());
  for (int k = 0; k < fit.bank.component_count(); ++k) {
    const FilterComponent& want = fit.bank.comps[size_t(k)];
    const FilterComponent& got = m.bank.comps[size_t(k)];
    CHECK(got.lag_min == want.lag_min);
    CHECK(got.sup_norm == want.sup_norm);
    CHECK(got.filters == want.filters);
    CHECK(got.phase == want.phase);
    CHECK(got.spectrum == want.spectrum);
    CHECK(m.wspec.eta[size_t(k)] == fit.wspec.eta[size_t(k)]);
    CHECK(m.scores.xi[size_t(k)] == fit.scores.xi[size_t(k)]);
  }
  REQUIRE(m.scores.joint_cov.has_value() == fit.scores.joint_cov.has_value());
  if (fit.scores.joint_cov) CHECK(*m.scores.joint_cov == *fit.scores.joint_cov);
  CHECK(m.cfg.seed == fit.cfg.seed);
  CHECK(*m.cfg.bandwidth_mu == *fit.cfg.bandwidth_mu);
  CHECK(*m.cfg.components == *fit.cfg.components);
  CHECK(m.diag.fve_achieved == fit.diag.fve_achieved);
  CHECK(m.diag.phase_objectives == fit.diag.phase_objectives);
  CHECK(m.diag.lag_spans == fit.diag.lag_spans);
  CHECK(m.diag.exact_scores == fit.diag.exact_scores);

  // a read model writes back byte-identical files
  std::string dir_b = tmp.file("b");
  write_model_bundle(dir_b, back);
  for (const auto& entry : fs::directory_iterator(dir_a)) {
    std::string name = entry.path().filename().string();
    CHECK(slurp(dir_a + "/" + name) == slurp(dir_b + "/" + name));
  }
  CHECK(fs::exists(dir_b + "/manifest.json"));
}

TEST_CASE("model bundle detects corruption") {
  TempDir tmp;
  FitModel fit = small_fit(6);
  std::string dir = tmp.file("m");
  write_model_bundle(dir, ModelBundle{fit, {}});
  std::string victim = dir + "/comp0_filters.f64";
  std::string bytes = slurp(victim);
  bytes[bytes.size() / 2] = char(bytes[bytes.size() / 2] ^ 0x40);
  spit(victim, bytes);
  try {
    read_model_bundle(dir);
    FAIL("corrupt bundle was accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::checksum);
  }
}

TEST_CASE("fnv1a64 matches the reference vectors") {
  auto hex = [](const std::string& s) {
    return fnv1a64_hex(reinterpret_cast<const unsigned char*>(s.data()),
                       s.size());
  };
  CHECK(hex("") == "cbf29ce484222325");
  CHECK(hex("a") == "af63dc4c8601ec8c");
  CHECK(hex("foobar") == "85944171f73967e8");
}

TEST_CASE("run config parses every key and rejects unknown ones") {
  RunConfig rc;
  apply_run_config_text(rc, R"({
    "grid_size": 41, "freq_half": 32, "seed": 9,
    "bandwidth_mu": 0.08, "bandwidth_f": 0.12, "lag_window": 5,
    "components": 2, "fve": 0.9, "max_components": 6, "epsilon_l": 0.1,
    "optimize_phase": false, "phase_restarts": 2,
    "case": 2, "curve_count": 120, "future_count": 4,
    "n_min": 6, "n_max": 9, "rho": 0.3,
    "input": "in.csv", "bundle": "model", "out": "results",
    "horizon": 7, "level": 0.9, "reps": 5,
    "methods": ["pada", "zero"]
  })",
                        "test");
  CHECK(rc.model.grid_size == 41);
  CHECK(rc.sim.grid_size == 41);
  CHECK(rc.model.freq_half == 32);
  CHECK(rc.model.seed == 9);
  CHECK(rc.sim.seed == 9);
  CHECK(*rc.model.bandwidth_mu == 0.08);
  CHECK(*rc.model.lag_window == 5);
  CHECK(*rc.model.components == 2);
  CHECK(rc.model.fve == 0.9);
  CHECK(rc.model.optimize_phase == false);
  CHECK(rc.sim.scase == SimCase::case2);
  CHECK(rc.sim.curve_count == 120);
  CHECK(rc.sim.rho == 0.3);
  CHECK(rc.input == "in.csv");
  CHECK(rc.bundle == "model");
  CHECK(rc.out == "results");
  CHECK(rc.horizon == 7);
  CHECK(rc.level == 0.9);
  CHECK(rc.reps == 5);
  CHECK(rc.methods == std::vector<std::string>{"pada", "zero"});

  RunConfig rc2;
  try {
    apply_run_config_text(rc2, R"({"grid_sise": 41})", "test");
    FAIL("unknown key was accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::unknown_key);
    CHECK(std::string(e.what()).find("grid_sise") != std::string::npos);
  }
  CHECK_THROWS_AS(apply_run_config_text(rc2, R"({"case": 3})", "test"),
                  Error);
  CHECK_THROWS_AS(apply_run_config_text(rc2, R"({"fve": "high"})", "test"),
                  Error);
  CHECK_THROWS_AS(apply_run_config_text(rc2, "not json", "test"), Error);
}

TEST_CASE("run config loads from a file") {
  TempDir tmp;
  std::string path = tmp.file("run.json");
  spit(path, R"({"curve_count": 77, "seed": 3})");
  RunConfig rc = load_run_config(path);
  CHECK(rc.sim.curve_count == 77);
  CHECK(rc.model.seed == 3);
  CHECK_THROWS_AS(load_run_config(tmp.file("missing.json")), Error);
}
