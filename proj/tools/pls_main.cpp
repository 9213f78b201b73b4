// Command-line front end: phantom generation, measurement simulation, level
// set estimation, baselines, evaluation, operator diagnostics, and sweeps.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pls/baselines.hpp"
#include "pls/estimator.hpp"
#include "pls/experiment.hpp"
#include "pls/io.hpp"
#include "pls/operators.hpp"
#include "pls/penalty.hpp"
#include "pls/phantom.hpp"
#include "pls/proxy.hpp"

namespace {

using namespace pls;

GridShape parse_sides(const std::vector<std::uint32_t>& sides) {
  if (sides.size() == 1) return GridShape::line(sides[0]);
  if (sides.size() == 2) return GridShape::plane(sides[0], sides[1]);
  throw Error("--sides expects 1 or 2 values");
}

// Everything needed to rebuild the measurement setup of a `measure` run.
struct MeasureRecord {
  std::string op_kind = "gaussian";
  std::uint32_t k = 0;
  GridShape shape;
  std::uint64_t seed = 0;
  bool mean_row = false;
  std::string noise_kind = "gaussian";
  double sigma = 0.0;
};

std::string format_record(const MeasureRecord& r) {
  std::ostringstream out;
  out << "operator = " << r.op_kind << '\n';
  out << "k = " << r.k << '\n';
  out << "sides = " << r.shape.sides[0];
  if (r.shape.d == 2) out << ',' << r.shape.sides[1];
  out << '\n';
  out << "seed = " << r.seed << '\n';
  out << "mean_row = " << (r.mean_row ? 1 : 0) << '\n';
  out << "noise = " << r.noise_kind << '\n';
  out << "sigma = " << format_double(r.sigma) << '\n';
  return out.str();
}

MeasureRecord parse_record(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open record: " + path);
  MeasureRecord r;
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "operator") r.op_kind = value;
    else if (key == "k") r.k = static_cast<std::uint32_t>(std::stoul(value));
    else if (key == "sides") {
      std::vector<std::uint32_t> sides;
      std::stringstream ss(value);
      std::string part;
      while (std::getline(ss, part, ','))
        sides.push_back(static_cast<std::uint32_t>(std::stoul(part)));
      r.shape = parse_sides(sides);
    } else if (key == "seed") r.seed = std::stoull(value);
    else if (key == "mean_row") r.mean_row = value == "1";
    else if (key == "noise") r.noise_kind = value;
    else if (key == "sigma") r.sigma = std::stod(value);
    else throw Error("unknown record key: " + key);
  }
  if (r.k == 0) throw Error("record is missing k");
  if (r.shape.size() == 0) throw Error("record is missing sides");
  return r;
}

MeasurementOperator rebuild_operator(const MeasureRecord& r) {
  MeasurementOperator A;
  if (r.op_kind == "gaussian") {
    A = gen_gaussian_operator(r.k, static_cast<std::uint32_t>(r.shape.size()),
                              r.seed);
  } else if (r.op_kind == "identity") {
    A = identity_operator(static_cast<std::uint32_t>(r.shape.size()));
  } else {
    throw Error("unknown operator kind in record: " + r.op_kind);
  }
  if (r.mean_row) A = augment_mean_row(A);
  return A;
}

NoiseModel record_noise(const MeasureRecord& r) {
  NoiseModel m;
  if (r.noise_kind == "gaussian") m.kind = NoiseKind::kGaussian;
  else if (r.noise_kind == "uniform") m.kind = NoiseKind::kUniformBounded;
  else throw Error("unknown noise kind in record: " + r.noise_kind);
  m.scale = r.sigma;
  return m;
}

// Shared input block for subcommands that consume a measurement: the
// observation vector plus either a record (regenerates the operator) or an
// explicit operator file with --sides for the grid geometry.
struct MeasuredInput {
  std::string y_path;
  std::string record_path;
  std::string operator_path;
  std::vector<std::uint32_t> sides;

  MeasurementOperator A;
  Eigen::VectorXd y;
  GridShape shape;
  NoiseModel noise{NoiseKind::kGaussian, 1.0};

  void add_options(CLI::App* cmd) {
    cmd->add_option("--y", y_path, "observation vector (PLSV)")->required();
    cmd->add_option("--record", record_path,
                    "measurement record from `measure`");
    cmd->add_option("--operator", operator_path, "operator file (PLSA)");
    cmd->add_option("--sides", sides,
                    "grid sides (with --operator)")->delimiter(',');
  }

  void load() {
    y = read_vector(y_path);
    if (!record_path.empty()) {
      const MeasureRecord r = parse_record(record_path);
      A = rebuild_operator(r);
      shape = r.shape;
      noise = record_noise(r);
    } else if (!operator_path.empty()) {
      if (sides.empty())
        throw Error("--operator requires --sides for the grid geometry");
      A = read_operator(operator_path);
      shape = parse_sides(sides);
      if (A.signal_length() != static_cast<Eigen::Index>(shape.size()))
        throw Error("operator column count does not match --sides");
    } else {
      throw Error("provide --record or --operator");
    }
    if (y.size() != A.rows() && y.size() != A.core_rows())
      throw Error("observation length matches neither the operator rows nor "
                  "its core rows");
  }
};

// Proxy with the subtraction mode resolved: "auto" subtracts exactly when the
// operator carries a mean row.
ProxyResult resolve_proxy(const MeasuredInput& in, const std::string& mean_sub,
                          double gamma, const std::string& truth_path) {
  if (mean_sub == "on" || (mean_sub == "auto" && in.A.has_mean_row)) {
    if (!in.A.has_mean_row)
      throw Error("mean subtraction needs a measurement of the all-ones row; "
                  "re-run `measure` with --mean-sub on");
    if (in.y.size() != in.A.rows())
      throw Error("mean subtraction needs the full observation vector "
                  "including the mean-row slot");
    return projected_mean_subtract(in.A, in.y, in.shape, gamma);
  }
  if (mean_sub == "median") {
    if (truth_path.empty())
      throw Error("--mean-sub median needs --truth (it is an oracle mode)");
    return oracle_median_subtract(in.A, in.y, read_signal(truth_path), gamma);
  }
  if (mean_sub == "off" || mean_sub == "auto")
    return plain_proxy(in.A, in.y, in.shape, gamma);
  throw Error("--mean-sub expects auto, on, off, or median");
}

// Core observation debiased consistently with the proxy, for the
// reconstruction baselines.
Eigen::VectorXd debiased_core(const MeasuredInput& in,
                              const ProxyResult& proxy) {
  Eigen::VectorXd y_core = in.y.size() == in.A.rows() && in.A.has_mean_row
                               ? in.y.tail(in.A.core_rows()).eval()
                               : in.y;
  if (proxy.lambda_hat != 0.0)
    y_core -= proxy.lambda_hat *
              (in.A.core() * Eigen::VectorXd::Ones(in.A.signal_length()));
  return y_core;
}

int run_phantom(const std::vector<std::uint32_t>& sides, PhantomSpec spec,
                const std::string& kind, const std::string& out,
                const std::string& preview) {
  if (kind == "blobs") spec.kind = PhantomKind::kBlobs;
  else if (kind == "steps") spec.kind = PhantomKind::kSteps;
  else if (kind == "ramp") spec.kind = PhantomKind::kRamp;
  else throw Error("unknown phantom kind: " + kind);
  const GridShape shape = parse_sides(sides);
  const GridSignal f = make_phantom(spec, shape);
  write_signal(out, f);
  if (!preview.empty()) write_pgm_preview(preview, f);
  std::cout << "wrote " << out << " (" << shape.sides[0];
  if (shape.d == 2) std::cout << "x" << shape.sides[1];
  std::cout << ", values in [" << format_double(spec.lo) << ", "
            << format_double(spec.hi) << "])\n";
  return 0;
}

int run_measure(const std::string& signal_path, std::uint32_t k,
                const std::string& op_kind, const std::string& noise_kind,
                double sigma, std::uint64_t seed, bool mean_sub,
                const std::string& out, const std::string& record_out,
                const std::string& operator_out) {
  const GridSignal f = read_signal(signal_path);
  MeasureRecord r;
  r.op_kind = op_kind;
  r.k = op_kind == "identity" ? static_cast<std::uint32_t>(f.shape.size()) : k;
  if (r.k == 0) throw Error("measure needs --k (rows of the operator)");
  r.shape = f.shape;
  r.seed = seed;
  r.mean_row = mean_sub;
  r.noise_kind = noise_kind;
  r.sigma = sigma;

  const MeasurementOperator A = rebuild_operator(r);
  const Eigen::VectorXd y = forward_noisy(A, f, record_noise(r), seed);
  write_vector(out, y);
  write_text(record_out, format_record(r));
  if (!operator_out.empty()) write_operator(operator_out, A);
  std::cout << "wrote " << out << " (" << y.size() << " observations) and "
            << record_out << "\n";
  return 0;
}

int run_estimate(MeasuredInput& in, double gamma, double tau,
                 const std::string& mean_sub, const std::string& truth_path,
                 const std::string& tree_kind, int max_level, double delta,
                 double c, const std::string& out, const std::string& tree_out,
                 const std::string& proxy_out, const std::string& cells_out,
                 const std::string& preview) {
  in.load();
  const ProxyResult proxy = resolve_proxy(in, mean_sub, gamma, truth_path);

  FitConfig cfg;
  cfg.gamma = proxy.gamma_effective;
  cfg.family = tree_kind == "square" ? TreeFamily::kSquareOnly
                                     : TreeFamily::kFreeOrientation;
  cfg.max_level = {max_level, max_level};
  cfg.penalty = default_penalty_params(in.shape.size(), in.noise, tau);
  if (delta > 0.0) cfg.penalty.delta = delta;
  cfg.penalty.c = c;

  const RowSats sats = build_row_sats(in.A, in.shape);
  FitStats stats;
  const PartitionEstimate est = fit(proxy.z, cfg, sats, &stats);
  const LevelSetMask mask = partition_to_mask(est);

  write_mask(out, mask);
  if (!tree_out.empty()) write_tree_dump(tree_out, est);
  if (!proxy_out.empty()) {
    write_signal(proxy_out, proxy.z);
    write_proxy_sidecar(proxy_out + ".txt", proxy);
  }
  if (!cells_out.empty()) {
    std::ostringstream csv;
    csv << "l0,i0,l1,i1,depth,sum_gap,gram,phi,leaf_cost,best_cost,"
           "best_action\n";
    for (const CellScore& s : cell_scores(proxy.z, cfg, sats)) {
      csv << s.cell.level[0] << ',' << s.cell.index[0] << ','
          << s.cell.level[1] << ',' << s.cell.index[1] << ','
          << s.cell.depth() << ',' << format_double(s.sum_gap) << ','
          << format_double(s.gram) << ',' << format_double(s.phi) << ','
          << format_double(s.leaf_cost) << ',' << format_double(s.best_cost)
          << ',' << s.best_action << '\n';
    }
    write_text(cells_out, csv.str());
  }
  if (!preview.empty()) {
    GridSignal vis = make_signal(in.shape);
    for (std::size_t i = 0; i < vis.values.size(); ++i)
      vis.values[i] = mask.inside[i] ? 1.0 : 0.0;
    write_pgm_preview(preview, vis);
  }

  std::uint64_t inside = 0;
  for (const std::uint8_t b : mask.inside) inside += b;
  std::cout << "mode = " << to_string(proxy.mode) << '\n'
            << "lambda_hat = " << format_double(proxy.lambda_hat) << '\n'
            << "gamma_effective = " << format_double(proxy.gamma_effective)
            << '\n'
            << "leaves = " << est.leaf_count() << '\n'
            << "objective = " << format_double(est.objective) << '\n'
            << "inside_fraction = "
            << format_double(static_cast<double>(inside) /
                             static_cast<double>(mask.inside.size()))
            << '\n'
            << "wrote " << out << '\n';
  return 0;
}

int run_baseline(MeasuredInput& in, const std::string& method, double gamma,
                 const std::string& mean_sub, const std::string& truth_path,
                 double thr, int spins, int rank, double alpha,
                 const std::string& out) {
  in.load();
  const ProxyResult proxy = resolve_proxy(in, mean_sub, gamma, truth_path);
  LevelSetMask mask;
  double tuning = 0.0;
  if (method == "threshold") {
    mask = threshold_estimate(proxy.z, proxy.gamma_effective);
    tuning = proxy.gamma_effective;
  } else if (method == "risk_threshold") {
    if (truth_path.empty())
      throw Error("risk_threshold is an oracle baseline; it needs --truth");
    const TunedEstimate best =
        risk_optimal_threshold(proxy.z, read_signal(truth_path), gamma);
    mask = best.mask;
    tuning = best.tuning;
  } else if (method == "haar") {
    mask = haar_plugin(proxy.z, proxy.gamma_effective, thr, spins);
    tuning = thr;
  } else if (method == "tsvd") {
    mask = tsvd_plugin(in.A, debiased_core(in, proxy), rank, in.shape,
                       proxy.gamma_effective);
    tuning = rank;
  } else if (method == "tikhonov") {
    mask = tikhonov_plugin(in.A, debiased_core(in, proxy), alpha, in.shape,
                           proxy.gamma_effective);
    tuning = alpha;
  } else {
    throw Error("unknown baseline: " + method);
  }
  write_mask(out, mask);
  std::uint64_t inside = 0;
  for (const std::uint8_t b : mask.inside) inside += b;
  std::cout << "method = " << method << '\n'
            << "tuning = " << format_double(tuning) << '\n'
            << "inside_fraction = "
            << format_double(static_cast<double>(inside) /
                             static_cast<double>(mask.inside.size()))
            << '\n'
            << "wrote " << out << '\n';
  return 0;
}

int run_evaluate(const std::string& mask_path, const std::string& truth_path,
                 double gamma, const std::string& out) {
  const LevelSetMask mask = read_mask(mask_path);
  const GridSignal f = read_signal(truth_path);
  if (!(mask.shape == f.shape))
    throw Error("mask and truth shapes do not match");
  const LevelSetMask truth = truth_mask(f, gamma);
  const double eps = excess_risk(mask, f, gamma);
  std::uint64_t inside = 0, inside_true = 0, sym_diff = 0;
  for (std::size_t i = 0; i < mask.inside.size(); ++i) {
    inside += mask.inside[i];
    inside_true += truth.inside[i];
    sym_diff += mask.inside[i] != truth.inside[i];
  }
  std::ostringstream report;
  report << "epsilon_N = " << format_double(eps) << '\n'
         << "risk = " << format_double(risk(mask, f, gamma)) << '\n'
         << "risk_truth = " << format_double(risk(truth, f, gamma)) << '\n'
         << "sym_diff_pixels = " << sym_diff << '\n'
         << "inside_fraction = "
         << format_double(static_cast<double>(inside) /
                          static_cast<double>(mask.inside.size()))
         << '\n'
         << "inside_fraction_truth = "
         << format_double(static_cast<double>(inside_true) /
                          static_cast<double>(mask.inside.size()))
         << '\n';
  std::cout << report.str();
  if (!out.empty()) write_text(out, report.str());
  return 0;
}

int run_diagnose(MeasuredInput& in, const std::string& signal_path,
                 double kappa, const std::string& out) {
  // Diagnostics need only the operator; --y is not part of this subcommand,
  // so load the pieces directly.
  if (!in.record_path.empty()) {
    const MeasureRecord r = parse_record(in.record_path);
    in.A = rebuild_operator(r);
    in.shape = r.shape;
  } else if (!in.operator_path.empty()) {
    if (in.sides.empty())
      throw Error("--operator requires --sides for the grid geometry");
    in.A = read_operator(in.operator_path);
    in.shape = parse_sides(in.sides);
  } else {
    throw Error("provide --record or --operator");
  }
  GridSignal f = read_signal(signal_path);
  if (!(f.shape == in.shape))
    throw Error("signal shape does not match the operator record");
  const OperatorDiagnostics d = theory_bounds(in.A, f, kappa);
  std::ostringstream report;
  report << "coherence = " << format_double(d.coherence) << '\n'
         << "spectral_norm = " << format_double(d.spectral_norm) << '\n'
         << "coherence_bound = " << format_double(d.coherence_bound) << '\n'
         << "coherence_bound_applicable = "
         << (d.coherence_bound_applicable ? 1 : 0) << '\n'
         << "bound_term_approx = " << format_double(d.bound_term_approx)
         << '\n'
         << "bound_term_interference = "
         << format_double(d.bound_term_interference) << '\n';
  std::cout << report.str();
  if (!out.empty()) write_text(out, report.str());
  return 0;
}

int run_sweep(const std::string& config_path, bool print_template,
              int workers_override, const std::string& rows_out,
              const std::string& summary_out) {
  if (print_template) {
    std::cout << config_template();
    return 0;
  }
  if (config_path.empty()) throw Error("sweep needs --config (or --template)");
  ExperimentConfig cfg = parse_config_file(config_path);
  if (workers_override > 0) cfg.workers = workers_override;
  if (!rows_out.empty()) cfg.rows_out = rows_out;
  if (!summary_out.empty()) cfg.summary_out = summary_out;
  const SweepResult result = sweep(cfg);
  std::cout << summary_csv_header() << '\n';
  for (const SummaryRow& s : result.summary)
    std::cout << format_summary_row(s) << '\n';
  std::cout << "wrote " << cfg.rows_out << " (" << result.rows.size()
            << " rows) and " << cfg.summary_out << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Level set estimation from noisy linear projections: proxy "
      "observations, penalized tree fits, baselines, and experiments."};
  app.require_subcommand(1);

  // phantom
  auto* phantom = app.add_subcommand("phantom", "generate a test signal");
  std::vector<std::uint32_t> ph_sides{64, 64};
  std::string ph_kind = "blobs";
  PhantomSpec ph_spec;
  std::string ph_out = "phantom.pls1";
  std::string ph_preview;
  phantom->add_option("--sides", ph_sides, "grid sides (1 or 2 dyadic values)")
      ->delimiter(',');
  phantom->add_option("--kind", ph_kind, "blobs | steps | ramp");
  phantom->add_option("--lo", ph_spec.lo, "minimum value");
  phantom->add_option("--hi", ph_spec.hi, "maximum value");
  phantom->add_option("--features", ph_spec.features, "feature count");
  phantom->add_option("--seed", ph_spec.seed, "phantom seed");
  phantom->add_option("--out", ph_out, "output signal (PLS1)");
  phantom->add_option("--preview", ph_preview, "optional PGM preview");

  // measure
  auto* measure = app.add_subcommand("measure", "simulate noisy projections");
  std::string me_signal;
  std::uint32_t me_k = 0;
  std::string me_op = "gaussian";
  std::string me_noise = "gaussian";
  double me_sigma = 1.0;
  std::uint64_t me_seed = 1;
  bool me_mean_sub = false;
  std::string me_out = "y.plsv";
  std::string me_record = "measure.txt";
  std::string me_operator_out;
  measure->add_option("--signal", me_signal, "input signal (PLS1)")
      ->required();
  measure->add_option("--k", me_k, "number of projection rows");
  measure->add_option("--operator", me_op, "gaussian | identity");
  measure->add_option("--noise", me_noise, "gaussian | uniform");
  measure->add_option("--sigma", me_sigma,
                      "noise std dev (gaussian) or half-width (uniform)");
  measure->add_option("--seed", me_seed, "operator + noise seed");
  measure->add_flag("--mean-sub", me_mean_sub,
                    "also measure the all-ones row (enables mean "
                    "subtraction downstream)");
  measure->add_option("--out", me_out, "observation vector (PLSV)");
  measure->add_option("--record", me_record, "measurement record (text)");
  measure->add_option("--operator-out", me_operator_out,
                      "optionally dump the operator (PLSA)");

  // estimate
  auto* estimate =
      app.add_subcommand("estimate", "fit the penalized partition estimate");
  MeasuredInput es_in;
  double es_gamma = 0.0;
  double es_tau = 1.0;
  std::string es_mean_sub = "auto";
  std::string es_truth;
  std::string es_tree = "free";
  int es_max_level = -1;
  double es_delta = 0.0;
  double es_c = 0.5;
  std::string es_out = "mask.pbm";
  std::string es_tree_out;
  std::string es_proxy_out;
  std::string es_cells_out;
  std::string es_preview;
  es_in.add_options(estimate);
  estimate->add_option("--gamma", es_gamma, "level-set threshold")->required();
  estimate->add_option("--tau", es_tau, "penalty scale");
  estimate->add_option("--mean-sub", es_mean_sub,
                       "auto | on | off | median (median needs --truth)");
  estimate->add_option("--truth", es_truth,
                       "ground-truth signal (median mode)");
  estimate->add_option("--tree", es_tree, "free | square");
  estimate->add_option("--max-level", es_max_level,
                       "per-dimension split cap, -1 = full depth");
  estimate->add_option("--delta", es_delta, "penalty delta, 0 = 1/N");
  estimate->add_option("--c", es_c, "penalty concentration constant");
  estimate->add_option("--out", es_out, "output mask (PBM for 2-D)");
  estimate->add_option("--tree-out", es_tree_out, "partition dump (text)");
  estimate->add_option("--proxy-out", es_proxy_out,
                       "proxy signal (PLS1 + .txt sidecar)");
  estimate->add_option("--cells-out", es_cells_out,
                       "per-cell diagnostics CSV");
  estimate->add_option("--preview", es_preview, "mask preview (PGM)");

  // baseline
  auto* baseline = app.add_subcommand("baseline", "run a comparison method");
  MeasuredInput ba_in;
  std::string ba_method;
  double ba_gamma = 0.0;
  std::string ba_mean_sub = "auto";
  std::string ba_truth;
  double ba_thr = 0.0;
  int ba_spins = 8;
  int ba_rank = 1;
  double ba_alpha = 1.0;
  std::string ba_out = "baseline.pbm";
  ba_in.add_options(baseline);
  baseline
      ->add_option("--method", ba_method,
                   "threshold | risk_threshold | haar | tsvd | tikhonov")
      ->required();
  baseline->add_option("--gamma", ba_gamma, "level-set threshold")->required();
  baseline->add_option("--mean-sub", ba_mean_sub,
                       "auto | on | off | median (median needs --truth)");
  baseline->add_option("--truth", ba_truth,
                       "ground truth (risk_threshold, median mode)");
  baseline->add_option("--thr", ba_thr, "haar soft-threshold");
  baseline->add_option("--spins", ba_spins, "haar cycle spins");
  baseline->add_option("--rank", ba_rank, "tsvd rank");
  baseline->add_option("--alpha", ba_alpha, "tikhonov regularization");
  baseline->add_option("--out", ba_out, "output mask");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "score a mask vs the truth");
  std::string ev_mask, ev_truth, ev_out;
  double ev_gamma = 0.0;
  evaluate->add_option("--mask", ev_mask, "estimate mask")->required();
  evaluate->add_option("--truth", ev_truth, "ground-truth signal (PLS1)")
      ->required();
  evaluate->add_option("--gamma", ev_gamma, "level-set threshold")->required();
  evaluate->add_option("--out", ev_out, "optional report file");

  // diagnose
  auto* diagnose =
      app.add_subcommand("diagnose", "operator coherence and bound terms");
  MeasuredInput di_in;
  std::string di_signal;
  double di_kappa = 2.0;
  std::string di_out;
  diagnose->add_option("--record", di_in.record_path,
                       "measurement record from `measure`");
  diagnose->add_option("--operator", di_in.operator_path,
                       "operator file (PLSA)");
  diagnose->add_option("--sides", di_in.sides, "grid sides (with --operator)")
      ->delimiter(',');
  diagnose->add_option("--signal", di_signal, "signal (PLS1) for bound terms")
      ->required();
  diagnose->add_option("--kappa", di_kappa,
                       "assumed boundary regularity exponent");
  diagnose->add_option("--out", di_out, "optional report file");

  // sweep
  auto* sweep_cmd =
      app.add_subcommand("sweep", "run the experiment protocol from a config");
  std::string sw_config;
  bool sw_template = false;
  int sw_workers = 0;
  std::string sw_rows_out, sw_summary_out;
  sweep_cmd->add_option("--config", sw_config, "config file (key = value)");
  sweep_cmd->add_flag("--template", sw_template,
                      "print a documented config template and exit");
  sweep_cmd->add_option("--workers", sw_workers, "override worker count");
  sweep_cmd->add_option("--rows-out", sw_rows_out, "override per-row CSV path");
  sweep_cmd->add_option("--summary-out", sw_summary_out,
                        "override summary CSV path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*phantom)
      return run_phantom(ph_sides, ph_spec, ph_kind, ph_out, ph_preview);
    if (*measure)
      return run_measure(me_signal, me_k, me_op, me_noise, me_sigma, me_seed,
                         me_mean_sub, me_out, me_record, me_operator_out);
    if (*estimate)
      return run_estimate(es_in, es_gamma, es_tau, es_mean_sub, es_truth,
                          es_tree, es_max_level, es_delta, es_c, es_out,
                          es_tree_out, es_proxy_out, es_cells_out, es_preview);
    if (*baseline)
      return run_baseline(ba_in, ba_method, ba_gamma, ba_mean_sub, ba_truth,
                          ba_thr, ba_spins, ba_rank, ba_alpha, ba_out);
    if (*evaluate) return run_evaluate(ev_mask, ev_truth, ev_gamma, ev_out);
    if (*diagnose) return run_diagnose(di_in, di_signal, di_kappa, di_out);
    if (*sweep_cmd)
      return run_sweep(sw_config, sw_template, sw_workers, sw_rows_out,
                       sw_summary_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
