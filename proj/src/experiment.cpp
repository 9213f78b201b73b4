#include "pls/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "pls/baselines.hpp"
#include "pls/io.hpp"
#include "pls/proxy.hpp"

namespace pls {

std::string method_name(MethodKind m) {
  switch (m) {
    case MethodKind::kThreshold: return "threshold";
    case MethodKind::kRiskThreshold: return "risk_threshold";
    case MethodKind::kProjective: return "projective";
    case MethodKind::kHaar: return "haar";
    case MethodKind::kTsvd: return "tsvd";
    case MethodKind::kTikhonov: return "tikhonov";
  }
  return "unknown";
}

MethodKind parse_method(const std::string& name) {
  if (name == "threshold") return MethodKind::kThreshold;
  if (name == "risk_threshold") return MethodKind::kRiskThreshold;
  if (name == "projective") return MethodKind::kProjective;
  if (name == "haar") return MethodKind::kHaar;
  if (name == "tsvd") return MethodKind::kTsvd;
  if (name == "tikhonov") return MethodKind::kTikhonov;
  throw Error("unknown method: " + name);
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& v, const std::string& key) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw Error("");
    return x;
  } catch (...) {
    throw Error("config key '" + key + "' expects a number, got '" + v + "'");
  }
}

std::uint64_t parse_u64(const std::string& v, const std::string& key) {
  try {
    std::size_t pos = 0;
    const unsigned long long x = std::stoull(v, &pos);
    if (pos != v.size()) throw Error("");
    return x;
  } catch (...) {
    throw Error("config key '" + key + "' expects an integer, got '" + v +
                "'");
  }
}

bool parse_on_off(const std::string& v, const std::string& key) {
  if (v == "on" || v == "true" || v == "1") return true;
  if (v == "off" || v == "false" || v == "0") return false;
  throw Error("config key '" + key + "' expects on/off, got '" + v + "'");
}

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error("config line " + std::to_string(lineno) +
                  " is not 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "sides") {
      const auto parts = split_list(value);
      if (parts.size() == 1) {
        cfg.shape = GridShape::line(
            static_cast<std::uint32_t>(parse_u64(parts[0], key)));
      } else if (parts.size() == 2) {
        cfg.shape = GridShape::plane(
            static_cast<std::uint32_t>(parse_u64(parts[0], key)),
            static_cast<std::uint32_t>(parse_u64(parts[1], key)));
      } else {
        throw Error("config key 'sides' expects 1 or 2 entries");
      }
    } else if (key == "gamma") {
      cfg.gamma = parse_double(value, key);
    } else if (key == "phantom") {
      if (value == "blobs") cfg.phantom.kind = PhantomKind::kBlobs;
      else if (value == "steps") cfg.phantom.kind = PhantomKind::kSteps;
      else if (value == "ramp") cfg.phantom.kind = PhantomKind::kRamp;
      else throw Error("unknown phantom kind: " + value);
    } else if (key == "phantom_seed") {
      cfg.phantom.seed = parse_u64(value, key);
    } else if (key == "phantom_features") {
      cfg.phantom.features = static_cast<int>(parse_u64(value, key));
    } else if (key == "phantom_lo") {
      cfg.phantom.lo = parse_double(value, key);
    } else if (key == "phantom_hi") {
      cfg.phantom.hi = parse_double(value, key);
    } else if (key == "operator") {
      if (value == "gaussian") cfg.op_kind = OperatorKind::kGaussian;
      else if (value == "identity") cfg.op_kind = OperatorKind::kIdentity;
      else throw Error("unknown operator kind: " + value);
    } else if (key == "k") {
      cfg.k_list.clear();
      for (const auto& p : split_list(value))
        cfg.k_list.push_back(static_cast<std::uint32_t>(parse_u64(p, key)));
    } else if (key == "trials") {
      cfg.trials = static_cast<std::uint32_t>(parse_u64(value, key));
    } else if (key == "noise") {
      if (value == "gaussian") cfg.noise.kind = NoiseKind::kGaussian;
      else if (value == "uniform") cfg.noise.kind = NoiseKind::kUniformBounded;
      else throw Error("unknown noise kind: " + value);
    } else if (key == "sigma") {
      cfg.noise.scale = parse_double(value, key);
    } else if (key == "methods") {
      cfg.methods.clear();
      for (const auto& p : split_list(value))
        cfg.methods.push_back(parse_method(p));
    } else if (key == "mean_subtraction") {
      if (value == "both") cfg.mean_sub = MeanSubSetting::kBoth;
      else cfg.mean_sub = parse_on_off(value, key) ? MeanSubSetting::kOn
                                                   : MeanSubSetting::kOff;
    } else if (key == "tau_grid") {
      cfg.tau_grid.clear();
      for (const auto& p : split_list(value))
        cfg.tau_grid.push_back(parse_double(p, key));
    } else if (key == "delta") {
      cfg.delta = parse_double(value, key);
    } else if (key == "c") {
      cfg.c = parse_double(value, key);
    } else if (key == "tree") {
      if (value == "free") cfg.family = TreeFamily::kFreeOrientation;
      else if (value == "square") cfg.family = TreeFamily::kSquareOnly;
      else throw Error("unknown tree family: " + value);
    } else if (key == "max_level") {
      const auto parts = split_list(value);
      if (parts.size() == 1) {
        const int m = static_cast<int>(parse_double(parts[0], key));
        cfg.max_level = {m, m};
      } else if (parts.size() == 2) {
        cfg.max_level = {static_cast<int>(parse_double(parts[0], key)),
                         static_cast<int>(parse_double(parts[1], key))};
      } else {
        throw Error("config key 'max_level' expects 1 or 2 entries");
      }
    } else if (key == "haar_spins") {
      cfg.haar_spins = static_cast<int>(parse_u64(value, key));
    } else if (key == "haar_thr_grid") {
      cfg.haar_thr_grid.clear();
      for (const auto& p : split_list(value))
        cfg.haar_thr_grid.push_back(parse_double(p, key));
    } else if (key == "tsvd_rank_grid") {
      cfg.tsvd_rank_grid.clear();
      for (const auto& p : split_list(value))
        cfg.tsvd_rank_grid.push_back(static_cast<int>(parse_u64(p, key)));
    } else if (key == "tikhonov_alpha_grid") {
      cfg.tikhonov_alpha_grid.clear();
      for (const auto& p : split_list(value))
        cfg.tikhonov_alpha_grid.push_back(parse_double(p, key));
    } else if (key == "seed") {
      cfg.seed = parse_u64(value, key);
    } else if (key == "workers") {
      cfg.workers = static_cast<int>(parse_u64(value, key));
    } else if (key == "timing") {
      cfg.timing = parse_on_off(value, key);
    } else if (key == "rows_out") {
      cfg.rows_out = value;
    } else if (key == "summary_out") {
      cfg.summary_out = value;
    } else {
      throw Error("unknown config key: " + key);
    }
  }
  if (cfg.k_list.empty())
    cfg.k_list.push_back(
        static_cast<std::uint32_t>(std::max<std::uint64_t>(1, cfg.shape.size() / 2)));
  if (cfg.trials < 1) throw Error("trials must be at least 1");
  if (cfg.workers < 1) throw Error("workers must be at least 1");
  for (const std::uint32_t k : cfg.k_list)
    if (k < 1 || k > cfg.shape.size())
      throw Error("each K must lie in [1, N]");
  if (cfg.methods.empty()) throw Error("methods list is empty");
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config: " + path);
  return parse_config(in);
}

std::string config_template() {
  return
      "# experiment configuration (key = value; '#' starts a comment)\n"
      "sides = 64,64              # grid sides, 1 or 2 dyadic values\n"
      "gamma = 125                # level-set threshold\n"
      "phantom = blobs            # blobs | steps | ramp\n"
      "phantom_seed = 42\n"
      "phantom_features = 6\n"
      "phantom_lo = 44\n"
      "phantom_hi = 239\n"
      "operator = gaussian        # gaussian | identity\n"
      "k = 2048                   # comma list sweeps K\n"
      "trials = 25\n"
      "noise = gaussian           # gaussian | uniform\n"
      "sigma = 1.0                # std dev (gaussian) or half-width (uniform)\n"
      "methods = threshold,risk_threshold,projective\n"
      "mean_subtraction = off     # off | on | both\n"
      "tau_grid = 0.0625,0.125,0.25,0.5,1,2,4,8,16,32,64,128,256,512,1024\n"
      "delta = 0                  # 0 uses the default 1/N\n"
      "c = 0.5\n"
      "tree = free                # free | square\n"
      "max_level = -1             # -1 is full depth\n"
      "haar_spins = 8\n"
      "# haar_thr_grid =          # default: scaled off the data\n"
      "# tsvd_rank_grid =         # default: powers of two\n"
      "# tikhonov_alpha_grid =    # default: 1e-4..1e4 geometric\n"
      "seed = 1\n"
      "workers = 1\n"
      "timing = on                # off zeroes wall_time_s for byte-stable CSVs\n"
      "rows_out = rows.csv\n"
      "summary_out = summary.csv\n";
}

namespace {

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  }
};

std::vector<double> auto_haar_grid(const GridSignal& z) {
  std::vector<double> coeffs = haar_analysis(z);
  double peak = 0.0;
  for (double v : coeffs) peak = std::max(peak, std::abs(v));
  std::vector<double> grid{0.0};
  for (int j = 7; j >= 0; --j) grid.push_back(peak / static_cast<double>(1 << j));
  return grid;
}

std::vector<int> auto_rank_grid(Eigen::Index k, Eigen::Index n) {
  const int top = static_cast<int>(std::min(k, n));
  std::vector<int> grid;
  for (int r = 1; r < top; r *= 2) grid.push_back(r);
  grid.push_back(top);
  return grid;
}

std::vector<double> auto_alpha_grid() {
  std::vector<double> grid;
  for (int e = -4; e <= 4; ++e) grid.push_back(std::pow(10.0, e));
  return grid;
}

struct TrialData {
  MeasurementOperator A;
  Eigen::VectorXd y_core;
  double y_mean_slot = 0.0;  // observation of the all-ones row
};

TrialData simulate_trial(const ExperimentConfig& cfg, const GridSignal& f,
                         std::uint32_t K, std::uint64_t trial_seed) {
  TrialData t;
  if (cfg.op_kind == OperatorKind::kIdentity) {
    t.A = identity_operator(static_cast<std::uint32_t>(f.shape.size()));
  } else {
    t.A = gen_gaussian_operator(K, static_cast<std::uint32_t>(f.shape.size()),
                                trial_seed);
  }
  // K+1 noise draws per trial, slot 0 reserved for the mean row, so both
  // subtraction modes see identical core noise.
  const Eigen::VectorXd noise =
      noise_vector(cfg.noise, t.A.rows() + 1, trial_seed);
  t.y_core = forward(t.A, f) + noise.tail(t.A.rows());
  double fsum = 0.0;
  for (double v : f.values) fsum += v;
  t.y_mean_slot = fsum + noise[0];
  return t;
}

MethodRow run_method(const ExperimentConfig& cfg, const GridSignal& f,
                     MethodKind method, bool mean_sub, const TrialData& t,
                     const RowSats& sats, const ProxyResult& proxy,
                     const Eigen::VectorXd& y_for_recon) {
  MethodRow row;
  row.method = method_name(method);
  row.mean_subtracted = mean_sub;
  const Timer timer;
  switch (method) {
    case MethodKind::kThreshold: {
      const LevelSetMask mask =
          threshold_estimate(proxy.z, proxy.gamma_effective);
      row.tuning = proxy.gamma_effective;
      row.epsilon = excess_risk(mask, f, cfg.gamma);
      break;
    }
    case MethodKind::kRiskThreshold: {
      const TunedEstimate best = risk_optimal_threshold(proxy.z, f, cfg.gamma);
      row.tuning = best.tuning;
      row.epsilon = best.epsilon;
      break;
    }
    case MethodKind::kProjective: {
      FitConfig fit_cfg;
      fit_cfg.gamma = proxy.gamma_effective;
      fit_cfg.family = cfg.family;
      fit_cfg.max_level = cfg.max_level;
      fit_cfg.penalty = default_penalty_params(f.shape.size(), cfg.noise);
      if (cfg.delta > 0.0) fit_cfg.penalty.delta = cfg.delta;
      fit_cfg.penalty.c = cfg.c;
      const TauSearchResult best = oracle_tau_search(
          proxy.z, fit_cfg, sats, f, cfg.gamma, cfg.tau_grid);
      row.tuning = best.tau_star;
      row.epsilon = best.epsilon;
      break;
    }
    case MethodKind::kHaar: {
      const std::vector<double> grid = cfg.haar_thr_grid.empty()
                                           ? auto_haar_grid(proxy.z)
                                           : cfg.haar_thr_grid;
      const TunedEstimate best =
          haar_oracle_search(proxy.z, proxy.gamma_effective, f, cfg.gamma,
                             grid, cfg.haar_spins);
      row.tuning = best.tuning;
      row.epsilon = best.epsilon;
      break;
    }
    case MethodKind::kTsvd: {
      const std::vector<int> grid =
          cfg.tsvd_rank_grid.empty()
              ? auto_rank_grid(t.A.core_rows(), t.A.signal_length())
              : cfg.tsvd_rank_grid;
      const TunedEstimate best = tsvd_oracle_search(
          t.A, y_for_recon, proxy.gamma_effective, f, cfg.gamma, grid);
      row.tuning = best.tuning;
      row.epsilon = best.epsilon;
      break;
    }
    case MethodKind::kTikhonov: {
      const std::vector<double> grid = cfg.tikhonov_alpha_grid.empty()
                                           ? auto_alpha_grid()
                                           : cfg.tikhonov_alpha_grid;
      const TunedEstimate best = tikhonov_oracle_search(
          t.A, y_for_recon, proxy.gamma_effective, f, cfg.gamma, grid);
      row.tuning = best.tuning;
      row.epsilon = best.epsilon;
      break;
    }
  }
  row.wall_s = cfg.timing ? timer.seconds() : 0.0;
  return row;
}

}  // namespace

std::vector<MethodRow> run_trial(const ExperimentConfig& cfg,
                                 const GridSignal& f, std::uint32_t K,
                                 std::uint32_t trial_index) {
  const std::uint64_t trial_seed = derive_seed(cfg.seed, K, trial_index);
  const TrialData t = simulate_trial(cfg, f, K, trial_seed);
  const RowSats sats = build_row_sats(t.A, f.shape);

  std::vector<MethodRow> rows;
  const bool run_off = cfg.mean_sub != MeanSubSetting::kOn;
  const bool run_on = cfg.mean_sub != MeanSubSetting::kOff;
  for (int pass = 0; pass < 2; ++pass) {
    const bool mean_sub = pass == 1;
    if ((mean_sub && !run_on) || (!mean_sub && !run_off)) continue;
    ProxyResult proxy;
    Eigen::VectorXd y_for_recon;
    if (mean_sub) {
      const MeasurementOperator aug = augment_mean_row(t.A);
      Eigen::VectorXd y_aug(t.y_core.size() + 1);
      y_aug[0] = t.y_mean_slot;
      y_aug.tail(t.y_core.size()) = t.y_core;
      proxy = projected_mean_subtract(aug, y_aug, f.shape, cfg.gamma);
      // Reconstruction baselines see the debiased core observation.
      y_for_recon =
          t.y_core - proxy.lambda_hat *
                         (t.A.entries * Eigen::VectorXd::Ones(
                                            t.A.signal_length()));
    } else {
      proxy = plain_proxy(t.A, t.y_core, f.shape, cfg.gamma);
      y_for_recon = t.y_core;
    }
    for (const MethodKind method : cfg.methods) {
      MethodRow row;
      try {
        row = run_method(cfg, f, method, mean_sub, t, sats, proxy,
                         y_for_recon);
      } catch (const std::exception&) {
        row.method = method_name(method);
        row.mean_subtracted = mean_sub;
        row.tuning = std::numeric_limits<double>::quiet_NaN();
        row.epsilon = std::numeric_limits<double>::quiet_NaN();
        row.wall_s = 0.0;
        row.failed = true;
      }
      row.seed = trial_seed;
      row.k = static_cast<std::uint32_t>(t.A.core_rows());
      row.n = f.shape.size();
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::vector<MethodRow> run_trial(const ExperimentConfig& cfg,
                                 std::uint32_t trial_index) {
  const GridSignal f = make_phantom(cfg.phantom, cfg.shape);
  return run_trial(cfg, f, cfg.k_list.front(), trial_index);
}

std::string rows_csv_header() {
  return "method,tuning,epsilon_N,wall_time_s,seed,K,N,mean_subtraction";
}

std::string summary_csv_header() {
  return "method,K,mean_epsilon_N,std_epsilon_N,trials,N,mean_subtraction";
}

std::string format_row(const MethodRow& row) {
  std::ostringstream out;
  char wall[32];
  std::snprintf(wall, sizeof wall, "%.6f", row.wall_s);
  out << row.method << ',' << format_double(row.tuning) << ','
      << format_double(row.epsilon) << ',' << wall << ',' << row.seed << ','
      << row.k << ',' << row.n << ',' << (row.mean_subtracted ? 1 : 0);
  return out.str();
}

std::string format_summary_row(const SummaryRow& row) {
  std::ostringstream out;
  out << row.method << ',' << row.k << ',' << format_double(row.mean_epsilon)
      << ',' << format_double(row.std_epsilon) << ',' << row.trials << ','
      << row.n << ',' << (row.mean_subtracted ? 1 : 0);
  return out.str();
}

SweepResult sweep(const ExperimentConfig& cfg) {
  const GridSignal f = make_phantom(cfg.phantom, cfg.shape);

  struct Task {
    std::uint32_t k = 0;
    std::uint32_t trial = 0;
  };
  std::vector<Task> tasks;
  for (const std::uint32_t k : cfg.k_list)
    for (std::uint32_t t = 0; t < cfg.trials; ++t) tasks.push_back({k, t});

  std::ofstream rows_file(cfg.rows_out);
  if (!rows_file) throw Error("cannot open for writing: " + cfg.rows_out);
  rows_file << rows_csv_header() << '\n' << std::flush;

  std::vector<std::vector<MethodRow>> results(tasks.size());
  std::vector<std::uint8_t> done(tasks.size(), 0);
  std::mutex mu;
  std::size_t next_task = 0;
  std::size_t next_commit = 0;
  std::exception_ptr failure;

  const auto worker = [&]() {
    for (;;) {
      std::size_t idx;
      {
        const std::lock_guard<std::mutex> lock(mu);
        if (failure || next_task >= tasks.size()) return;
        idx = next_task++;
      }
      try {
        std::vector<MethodRow> rows =
            run_trial(cfg, f, tasks[idx].k, tasks[idx].trial);
        const std::lock_guard<std::mutex> lock(mu);
        results[idx] = std::move(rows);
        done[idx] = 1;
        // Commit the completed prefix so an interrupted sweep leaves a
        // well-formed partial file.
        while (next_commit < tasks.size() && done[next_commit]) {
          for (const MethodRow& row : results[next_commit])
            rows_file << format_row(row) << '\n';
          rows_file << std::flush;
          ++next_commit;
        }
      } catch (...) {
        const std::lock_guard<std::mutex> lock(mu);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };

  const int nworkers =
      std::max(1, std::min<int>(cfg.workers, static_cast<int>(tasks.size())));
  if (nworkers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nworkers));
    for (int i = 0; i < nworkers; ++i) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  SweepResult out;
  for (const auto& rows : results)
    out.rows.insert(out.rows.end(), rows.begin(), rows.end());

  // Summaries grouped by (method, mean_subtraction, K), in first-seen order.
  struct Key {
    std::string method;
    bool ms;
    std::uint32_t k;
    bool operator==(const Key&) const = default;
  };
  std::vector<Key> keys;
  std::vector<std::vector<double>> eps;
  for (const MethodRow& row : out.rows) {
    const Key key{row.method, row.mean_subtracted, row.k};
    std::size_t pos = keys.size();
    for (std::size_t i = 0; i < keys.size(); ++i)
      if (keys[i] == key) {
        pos = i;
        break;
      }
    if (pos == keys.size()) {
      keys.push_back(key);
      eps.emplace_back();
    }
    eps[pos].push_back(row.epsilon);
  }
  for (std::size_t i = 0; i < keys.size(); ++i) {
    SummaryRow s;
    s.method = keys[i].method;
    s.mean_subtracted = keys[i].ms;
    s.k = keys[i].k;
    s.n = cfg.shape.size();
    s.trials = static_cast<std::uint32_t>(eps[i].size());
    long double mean = 0.0L;
    for (const double e : eps[i]) mean += e;
    mean /= static_cast<long double>(eps[i].size());
    long double var = 0.0L;
    for (const double e : eps[i]) {
      const long double d = e - mean;
      var += d * d;
    }
    s.mean_epsilon = static_cast<double>(mean);
    s.std_epsilon =
        eps[i].size() > 1
            ? static_cast<double>(
                  std::sqrt(var / static_cast<long double>(eps[i].size() - 1)))
            : 0.0;
    out.summary.push_back(std::move(s));
  }

  std::ofstream summary_file(cfg.summary_out);
  if (!summary_file)
    throw Error("cannot open for writing: " + cfg.summary_out);
  summary_file << summary_csv_header() << '\n';
  for (const SummaryRow& s : out.summary)
    summary_file << format_summary_row(s) << '\n';

  return out;
}

}  // namespace pls
