#include "pls/experiment.hpp"

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "pls/grid.hpp"

using namespace pls;

namespace {

std::filesystem::path tmp_dir() {
  static std::atomic<int> counter{0};
  const auto dir = std::filesystem::temp_directory_path() /
                   ("pls_experiment_" + std::to_string(::getpid()) + "_" +
                    std::to_string(counter++));
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

ExperimentConfig parse_text(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

// Small deterministic base configuration for sweep tests.
ExperimentConfig small_config(const std::filesystem::path& dir) {
  ExperimentConfig cfg = parse_text(
      "sides = 4, 4\n"
      "gamma = 125\n"
      "k = 4, 8\n"
      "trials = 3\n"
      "sigma = 40\n"
      "methods = threshold, risk_threshold\n"
      "mean_subtraction = both\n"
      "timing = off\n"
      "seed = 9\n");
  cfg.rows_out = (dir / "rows.csv").string();
  cfg.summary_out = (dir / "summary.csv").string();
  return cfg;
}

}  // namespace

TEST_CASE("method names round trip") {
  for (const MethodKind m :
       {MethodKind::kThreshold, MethodKind::kRiskThreshold,
        MethodKind::kProjective, MethodKind::kHaar, MethodKind::kTsvd,
        MethodKind::kTikhonov})
    CHECK(parse_method(method_name(m)) == m);
  CHECK(method_name(MethodKind::kProjective) == "projective");
  CHECK(method_name(MethodKind::kRiskThreshold) == "risk_threshold");
  CHECK_THROWS_AS(parse_method("unknown"), Error);
}

TEST_CASE("config parsing covers every key") {
  const ExperimentConfig cfg = parse_text(
      "# comment line\n"
      "sides = 8, 16   # trailing comment\n"
      "gamma = 3.5\n"
      "phantom = steps\n"
      "phantom_seed = 7\n"
      "phantom_features = 3\n"
      "phantom_lo = -1\n"
      "phantom_hi = 9\n"
      "operator = identity\n"
      "k = 16, 32, 128\n"
      "trials = 4\n"
      "noise = uniform\n"
      "sigma = 0.25\n"
      "methods = projective, haar, tsvd, tikhonov\n"
      "mean_subtraction = both\n"
      "tau_grid = 0.5, 1, 2\n"
      "delta = 0.01\n"
      "c = 1\n"
      "tree = square\n"
      "max_level = 2, 1\n"
      "haar_spins = 16\n"
      "haar_thr_grid = 0, 1.5\n"
      "tsvd_rank_grid = 1, 8\n"
      "tikhonov_alpha_grid = 0.001, 10\n"
      "seed = 77\n"
      "workers = 3\n"
      "timing = off\n"
      "rows_out = a.csv\n"
      "summary_out = b.csv\n");
  CHECK(cfg.shape == GridShape::plane(8, 16));
  CHECK(cfg.gamma == 3.5);
  CHECK(cfg.phantom.kind == PhantomKind::kSteps);
  CHECK(cfg.phantom.seed == 7);
  CHECK(cfg.phantom.features == 3);
  CHECK(cfg.phantom.lo == -1.0);
  CHECK(cfg.phantom.hi == 9.0);
  CHECK(cfg.op_kind == OperatorKind::kIdentity);
  CHECK(cfg.k_list == std::vector<std::uint32_t>{16, 32, 128});
  CHECK(cfg.trials == 4);
  CHECK(cfg.noise.kind == NoiseKind::kUniformBounded);
  CHECK(cfg.noise.scale == 0.25);
  CHECK(cfg.methods ==
        std::vector<MethodKind>{MethodKind::kProjective, MethodKind::kHaar,
                                MethodKind::kTsvd, MethodKind::kTikhonov});
  CHECK(cfg.mean_sub == MeanSubSetting::kBoth);
  CHECK(cfg.tau_grid == std::vector<double>{0.5, 1.0, 2.0});
  CHECK(cfg.delta == 0.01);
  CHECK(cfg.c == 1.0);
  CHECK(cfg.family == TreeFamily::kSquareOnly);
  CHECK(cfg.max_level == std::array<int, 2>{2, 1});
  CHECK(cfg.haar_spins == 16);
  CHECK(cfg.haar_thr_grid == std::vector<double>{0.0, 1.5});
  CHECK(cfg.tsvd_rank_grid == std::vector<int>{1, 8});
  CHECK(cfg.tikhonov_alpha_grid == std::vector<double>{0.001, 10.0});
  CHECK(cfg.seed == 77);
  CHECK(cfg.workers == 3);
  CHECK_FALSE(cfg.timing);
  CHECK(cfg.rows_out == "a.csv");
  CHECK(cfg.summary_out == "b.csv");
}

TEST_CASE("config defaults survive a template round trip") {
  const ExperimentConfig parsed = parse_text(config_template());
  const ExperimentConfig defaults;
  CHECK(parsed.shape == defaults.shape);
  CHECK(parsed.gamma == defaults.gamma);
  CHECK(parsed.phantom.kind == defaults.phantom.kind);
  CHECK(parsed.phantom.seed == defaults.phantom.seed);
  CHECK(parsed.phantom.lo == defaults.phantom.lo);
  CHECK(parsed.phantom.hi == defaults.phantom.hi);
  CHECK(parsed.op_kind == defaults.op_kind);
  CHECK(parsed.k_list ==
        std::vector<std::uint32_t>{static_cast<std::uint32_t>(
            defaults.shape.size() / 2)});
  CHECK(parsed.trials == defaults.trials);
  CHECK(parsed.noise.kind == defaults.noise.kind);
  CHECK(parsed.noise.scale == defaults.noise.scale);
  CHECK(parsed.methods == defaults.methods);
  CHECK(parsed.mean_sub == defaults.mean_sub);
  CHECK(parsed.tau_grid == defaults.tau_grid);
  CHECK(parsed.delta == defaults.delta);
  CHECK(parsed.c == defaults.c);
  CHECK(parsed.family == defaults.family);
  CHECK(parsed.max_level == defaults.max_level);
  CHECK(parsed.haar_spins == defaults.haar_spins);
  CHECK(parsed.seed == defaults.seed);
  CHECK(parsed.workers == defaults.workers);
  CHECK(parsed.timing == defaults.timing);
}

TEST_CASE("config errors are specific") {
  CHECK_THROWS_AS(parse_text("nonsense\nmethods = threshold\n"), Error);
  CHECK_THROWS_AS(parse_text("bogus_key = 3\n"), Error);
  CHECK_THROWS_AS(parse_text("gamma = twelve\n"), Error);
  CHECK_THROWS_AS(parse_text("trials = 0\n"), Error);
  CHECK_THROWS_AS(parse_text("workers = 0\n"), Error);
  CHECK_THROWS_AS(parse_text("sides = 4\nk = 5\n"), Error);  // K > N
  CHECK_THROWS_AS(parse_text("methods =\n"), Error);
  CHECK_THROWS_AS(parse_text("phantom = cubes\n"), Error);
  CHECK_THROWS_AS(parse_text("operator = fourier\n"), Error);
  CHECK_THROWS_AS(parse_text("noise = cauchy\n"), Error);
  CHECK_THROWS_AS(parse_text("tree = oct\n"), Error);
  CHECK_THROWS_AS(parse_text("mean_subtraction = maybe\n"), Error);
  CHECK_THROWS_AS(parse_text("timing = sometimes\n"), Error);
  CHECK_THROWS_AS(parse_text("sides = 4, 4, 4\n"), Error);
}

TEST_CASE("noiseless identity trials are error free") {
  ExperimentConfig cfg = parse_text(
      "sides = 8, 8\n"
      "gamma = 125\n"
      "operator = identity\n"
      "sigma = 0\n"
      "methods = threshold, risk_threshold, projective\n"
      "trials = 1\n"
      "timing = off\n");
  const std::vector<MethodRow> rows = run_trial(cfg, 0);
  REQUIRE(rows.size() == 3);
  for (const MethodRow& row : rows) {
    CHECK_FALSE(row.failed);
    CHECK(row.epsilon == 0.0);
    CHECK(row.k == 64);  // identity forces K = N
    CHECK(row.n == 64);
    CHECK_FALSE(row.mean_subtracted);
    CHECK(row.wall_s == 0.0);
  }
}

TEST_CASE("trials are deterministic functions of the config") {
  ExperimentConfig cfg = parse_text(
      "sides = 4, 4\n"
      "gamma = 125\n"
      "k = 8\n"
      "sigma = 30\n"
      "methods = threshold, projective, haar\n"
      "mean_subtraction = both\n"
      "timing = off\n"
      "seed = 5\n");
  const std::vector<MethodRow> a = run_trial(cfg, 2);
  const std::vector<MethodRow> b = run_trial(cfg, 2);
  REQUIRE(a.size() == 6);  // 3 methods x both subtraction modes
  REQUIRE(b.size() == 6);
  for (std::size_t i = 0; i < a.size(); ++i)
    CHECK(format_row(a[i]) == format_row(b[i]));
  // Pass order: all plain rows first, then the mean-subtracted ones.
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK_FALSE(a[i].mean_subtracted);
    CHECK(a[i + 3].mean_subtracted);
    CHECK(a[i].method == a[i + 3].method);
  }
  // A different trial index reseeds the noise and operator.
  const std::vector<MethodRow> c = run_trial(cfg, 3);
  CHECK(c[0].seed != a[0].seed);
}

TEST_CASE("mean subtraction settings select the passes") {
  ExperimentConfig cfg = parse_text(
      "sides = 4, 4\n"
      "k = 8\n"
      "sigma = 10\n"
      "methods = threshold\n"
      "timing = off\n");
  cfg.mean_sub = MeanSubSetting::kOff;
  const auto off = run_trial(cfg, 0);
  REQUIRE(off.size() == 1);
  CHECK_FALSE(off[0].mean_subtracted);
  cfg.mean_sub = MeanSubSetting::kOn;
  const auto on = run_trial(cfg, 0);
  REQUIRE(on.size() == 1);
  CHECK(on[0].mean_subtracted);
  // The core observation is shared between modes: same seed, same K.
  CHECK(on[0].seed == off[0].seed);
  CHECK(on[0].k == off[0].k);
}

TEST_CASE("method failures become NaN rows without aborting the trial") {
  ExperimentConfig cfg = parse_text(
      "sides = 4, 4\n"
      "k = 4\n"
      "sigma = 10\n"
      "methods = tsvd, threshold\n"
      "tsvd_rank_grid = 64\n"  // beyond min(K, N): the method must fail
      "timing = off\n");
  const std::vector<MethodRow> rows = run_trial(cfg, 0);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].method == "tsvd");
  CHECK(rows[0].failed);
  CHECK(std::isnan(rows[0].epsilon));
  CHECK(std::isnan(rows[0].tuning));
  CHECK(format_row(rows[0]).find("nan") != std::string::npos);
  CHECK_FALSE(rows[1].failed);
  CHECK(rows[1].method == "threshold");
}

TEST_CASE("csv rows have a fixed format") {
  CHECK(rows_csv_header() ==
        "method,tuning,epsilon_N,wall_time_s,seed,K,N,mean_subtraction");
  CHECK(summary_csv_header() ==
        "method,K,mean_epsilon_N,std_epsilon_N,trials,N,mean_subtraction");
  MethodRow row;
  row.method = "threshold";
  row.tuning = 0.5;
  row.epsilon = 0.125;
  row.wall_s = 1.25;
  row.seed = 42;
  row.k = 8;
  row.n = 16;
  row.mean_subtracted = true;
  CHECK(format_row(row) == "threshold,0.5,0.125,1.250000,42,8,16,1");
  SummaryRow s;
  s.method = "projective";
  s.k = 32;
  s.mean_epsilon = 2.5;
  s.std_epsilon = 0.25;
  s.trials = 25;
  s.n = 4096;
  s.mean_subtracted = false;
  CHECK(format_summary_row(s) == "projective,32,2.5,0.25,25,4096,0");
}

TEST_CASE("sweeps write identical files for any worker count") {
  const auto dir1 = tmp_dir();
  ExperimentConfig cfg1 = small_config(dir1);
  cfg1.workers = 1;
  const SweepResult r1 = sweep(cfg1);

  const auto dir4 = tmp_dir();
  ExperimentConfig cfg4 = small_config(dir4);
  cfg4.workers = 4;
  const SweepResult r4 = sweep(cfg4);

  CHECK(slurp(dir1 / "rows.csv") == slurp(dir4 / "rows.csv"));
  CHECK(slurp(dir1 / "summary.csv") == slurp(dir4 / "summary.csv"));
  REQUIRE(r1.rows.size() == r4.rows.size());
  for (std::size_t i = 0; i < r1.rows.size(); ++i)
    CHECK(format_row(r1.rows[i]) == format_row(r4.rows[i]));

  std::filesystem::remove_all(dir1);
  std::filesystem::remove_all(dir4);
}

TEST_CASE("sweep results aggregate by method, subtraction, and K") {
  const auto dir = tmp_dir();
  const ExperimentConfig cfg = small_config(dir);
  const SweepResult r = sweep(cfg);

  // 2 K values x 3 trials x 2 methods x 2 subtraction modes.
  REQUIRE(r.rows.size() == 24);
  // 2 methods x 2 modes x 2 K values.
  REQUIRE(r.summary.size() == 8);
  for (const SummaryRow& s : r.summary) {
    CHECK(s.trials == 3);
    CHECK(s.n == 16);
    long double mean = 0.0L, var = 0.0L;
    std::size_t count = 0;
    for (const MethodRow& row : r.rows)
      if (row.method == s.method && row.mean_subtracted == s.mean_subtracted &&
          row.k == s.k) {
        mean += row.epsilon;
        ++count;
      }
    REQUIRE(count == 3);
    mean /= 3.0L;
    for (const MethodRow& row : r.rows)
      if (row.method == s.method && row.mean_subtracted == s.mean_subtracted &&
          row.k == s.k)
        var += (row.epsilon - mean) * (row.epsilon - mean);
    CHECK(s.mean_epsilon ==
          doctest::Approx(static_cast<double>(mean)).epsilon(1e-15));
    CHECK(s.std_epsilon ==
          doctest::Approx(std::sqrt(static_cast<double>(var) / 2.0))
              .epsilon(1e-12));
  }

  // The rows file carries the header plus one line per row, in task order.
  const std::string rows_text = slurp(dir / "rows.csv");
  std::istringstream lines(rows_text);
  std::string line;
  std::getline(lines, line);
  CHECK(line == rows_csv_header());
  std::size_t i = 0;
  while (std::getline(lines, line)) {
    REQUIRE(i < r.rows.size());
    CHECK(line == format_row(r.rows[i]));
    ++i;
  }
  CHECK(i == r.rows.size());

  std::filesystem::remove_all(dir);
}

TEST_CASE("sweep rows interleave K values in task order") {
  const auto dir = tmp_dir();
  ExperimentConfig cfg = small_config(dir);
  cfg.mean_sub = MeanSubSetting::kOff;
  const SweepResult r = sweep(cfg);
  REQUIRE(r.rows.size() == 12);  // 2 K x 3 trials x 2 methods
  // Tasks enumerate K in config order with trials nested inside.
  for (std::size_t i = 0; i < 6; ++i) CHECK(r.rows[i].k == 4);
  for (std::size_t i = 6; i < 12; ++i) CHECK(r.rows[i].k == 8);
  std::filesystem::remove_all(dir);
}
