#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "pls/estimator.hpp"
#include "pls/operators.hpp"
#include "pls/phantom.hpp"

namespace pls {

enum class MethodKind {
  kThreshold,
  kRiskThreshold,
  kProjective,
  kHaar,
  kTsvd,
  kTikhonov,
};

std::string method_name(MethodKind m);
MethodKind parse_method(const std::string& name);

enum class OperatorKind { kGaussian, kIdentity };
enum class MeanSubSetting { kOff, kOn, kBoth };

struct ExperimentConfig {
  GridShape shape = GridShape::plane(64, 64);
  double gamma = 125.0;
  PhantomSpec phantom;
  OperatorKind op_kind = OperatorKind::kGaussian;
  std::vector<std::uint32_t> k_list;  // empty: defaults to N/2
  std::uint32_t trials = 25;
  NoiseModel noise{NoiseKind::kGaussian, 1.0};
  std::vector<MethodKind> methods{MethodKind::kThreshold,
                                  MethodKind::kRiskThreshold,
                                  MethodKind::kProjective};
  MeanSubSetting mean_sub = MeanSubSetting::kOff;
  std::vector<double> tau_grid{0.0625, 0.125, 0.25, 0.5, 1,   2,   4,  8,
                               16,     32,    64,   128, 256, 512, 1024};
  double delta = 0.0;  // 0: default 1/N
  double c = 0.5;
  TreeFamily family = TreeFamily::kFreeOrientation;
  std::array<int, 2> max_level{-1, -1};
  int haar_spins = 8;
  std::vector<double> haar_thr_grid;       // empty: scaled off the data
  std::vector<int> tsvd_rank_grid;         // empty: powers of two up to rank
  std::vector<double> tikhonov_alpha_grid; // empty: geometric 1e-4..1e4
  std::uint64_t seed = 1;
  int workers = 1;
  bool timing = true;  // off: wall_time_s column written as 0 (reproducible)
  std::string rows_out = "rows.csv";
  std::string summary_out = "summary.csv";
};

// Plain text config: 'key = value' lines, '#' comments, comma-separated
// lists. Unknown keys are errors.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_file(const std::string& path);
// The documented template with every key at its default.
std::string config_template();

struct MethodRow {
  std::string method;
  double tuning = 0.0;
  double epsilon = 0.0;
  double wall_s = 0.0;
  std::uint64_t seed = 0;  // per-trial derived substream seed
  std::uint32_t k = 0;
  std::uint64_t n = 0;
  bool mean_subtracted = false;
  bool failed = false;
};

// One trial: fresh operator and noise from the trial's substreams, every
// configured method in both requested subtraction modes. A method failure is
// recorded as a NaN row and the trial continues.
std::vector<MethodRow> run_trial(const ExperimentConfig& cfg,
                                 const GridSignal& f, std::uint32_t K,
                                 std::uint32_t trial_index);

// Convenience overload: builds the phantom and uses the first K.
std::vector<MethodRow> run_trial(const ExperimentConfig& cfg,
                                 std::uint32_t trial_index);

struct SummaryRow {
  std::string method;
  bool mean_subtracted = false;
  std::uint32_t k = 0;
  std::uint64_t n = 0;
  std::uint32_t trials = 0;
  double mean_epsilon = 0.0;
  double std_epsilon = 0.0;
};

struct SweepResult {
  std::vector<MethodRow> rows;
  std::vector<SummaryRow> summary;
};

std::string rows_csv_header();
std::string summary_csv_header();
std::string format_row(const MethodRow& row);
std::string format_summary_row(const SummaryRow& row);

// Runs all (K, trial) tasks on cfg.workers threads; rows are committed to
// rows_out in task order as soon as the completed prefix allows, so output
// is identical for any worker count and a partial file survives interrupts.
SweepResult sweep(const ExperimentConfig& cfg);

}  // namespace pls
