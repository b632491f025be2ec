#include "acmca/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>
#include <tuple>

#include "acmca/solvers.hpp"

namespace acmca {

const char* mode_label(Mode mode) {
  switch (mode) {
    case Mode::UniformStatic: return "uniform";
    case Mode::NonUniformStatic: return "nonuniform";
    case Mode::Adaptive: return "adaptive";
  }
  return "?";
}

const char* tier_label(UpdateTier tier) {
  switch (tier) {
    case UpdateTier::EveryIteration: return "every";
    case UpdateTier::ReducedU1: return "reduced_u1";
    case UpdateTier::ReducedU2: return "reduced_u2";
  }
  return "?";
}

const char* metric_label(Metric metric) {
  switch (metric) {
    case Metric::TnmseOverall: return "tnmse_overall";
    case Metric::TnmseRoi: return "tnmse_roi";
  }
  return "?";
}

namespace {

std::string fmt(const char* spec, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

struct TrialOutput {
  std::vector<TrialRow> rows;
  std::vector<TraceRow> trace;
  std::vector<std::pair<std::string, std::string>> dumps;
};

Eigen::VectorXd initial_weights(Mode mode, const RoiProfile& roi, double boost) {
  if (mode == Mode::UniformStatic) return Eigen::VectorXd::Ones(roi.n);
  Eigen::VectorXd mask_activity(roi.n);
  for (int i = 0; i < roi.n; ++i) {
    mask_activity[i] = roi.mask[static_cast<std::size_t>(i)] ? 1.0 : 0.0;
  }
  return weights_from_activity(mask_activity, boost);
}

TrialOutput run_one_trial(const ExperimentConfig& cfg, int trial) {
  const int n = cfg.n;
  const int k = cfg.sparsity_k();
  const int T = cfg.frames;
  RoiProfile roi = RoiProfile::contiguous(n, cfg.roi_fraction, 0, cfg.roi_in_fraction,
                                          cfg.persistence);

  RngStream signal_stream = make_stream({cfg.master_seed, static_cast<std::uint64_t>(trial),
                                         stream_tag::kSignal});
  std::vector<SparseFrame> frames;
  frames.reserve(static_cast<std::size_t>(T));
  for (int t = 0; t < T; ++t) {
    frames.push_back(generate_frame(t > 0 ? &frames.back() : nullptr, roi, k, signal_stream));
  }

  std::vector<Mode> modes = {Mode::UniformStatic, Mode::NonUniformStatic};
  if (cfg.adaptive) modes.push_back(Mode::Adaptive);

  EnergyBudget budget{cfg.e_budget_pJ, cfg.e_critical_pJ, cfg.total_budget_pJ};
  BpOptions bp_options{cfg.bp_tol, cfg.bp_max_iter, cfg.bp_rho, true};

  TrialOutput out;
  for (int m : cfg.m_list) {
    RngStream target_stream = make_stream({cfg.master_seed, static_cast<std::uint64_t>(trial),
                                           stream_tag::kTargets, static_cast<std::uint64_t>(m)});
    Eigen::MatrixXd base_uniforms = draw_base_uniforms(m, n, target_stream);

    for (Mode mode : modes) {
      EnergyLedger ledger(cfg.energy);
      CrossbarArray array(m, n, ledger, cfg.master_seed, static_cast<std::uint64_t>(trial));
      MatrixSpec spec{cfg.matrix_kind, m, n, initial_weights(mode, roi, cfg.roi_weight_boost)};
      LevelGrid targets = target_levels_from(base_uniforms, spec);
      MeasurementMatrix phi = program_matrix(array, targets, cfg.programming);

      if (cfg.dump_debug_grids && trial == 0) {
        std::ostringstream grid, levels, values;
        array.dump_conductances_csv(grid);
        phi.export_levels_csv(levels);
        phi.export_values_csv(values);
        std::string tag = "M" + std::to_string(m) + "_" + mode_label(mode);
        out.dumps.emplace_back("grid_conductances_" + tag + ".csv", grid.str());
        out.dumps.emplace_back("phi_levels_" + tag + ".csv", levels.str());
        out.dumps.emplace_back("phi_values_" + tag + ".csv", values.str());
      }

      BpSolver solver(phi.values(), bp_options);
      RngStream noise_stream = make_stream({cfg.master_seed, static_cast<std::uint64_t>(trial),
                                            stream_tag::kNoise, static_cast<std::uint64_t>(m)});

      RoiEstimate est = make_roi_estimate(n, cfg.ema_alpha, &roi.mask);
      GammaState gamma{2.0 * cfg.e_budget_pJ, UpdateTier::EveryIteration, cfg.u1, cfg.u2};

      TnmseAccumulator acc_overall;
      TnmseAccumulator acc_roi(&roi.mask);
      TrialRow row;
      row.m = m;
      row.mode = mode;
      row.trial = trial;
      double prev_iteration_pJ = 0.0;

      for (int t = 0; t < T; ++t) {
        double iter_start_pJ = ledger.total_pJ();
        Measurements meas = sample(phi, frames[static_cast<std::size_t>(t)], cfg.noise_sigma,
                                   &noise_stream, SamplePath::Crossbar, &array);
        Reconstruction rec = solver.solve_warm(meas.y);
        if (!rec.converged) ++row.bp_nonconverged;
        acc_overall.add(frames[static_cast<std::size_t>(t)], rec.x_hat);
        acc_roi.add(frames[static_cast<std::size_t>(t)], rec.x_hat);

        int touched = 0;
        if (mode == Mode::Adaptive && t + 1 < T) {
          double max_abs = rec.x_hat.cwiseAbs().maxCoeff();
          est = update_roi(est, rec.x_hat,
                           cfg.support_threshold_rel * std::max(max_abs, 1e-300));
          gamma = update_gamma(gamma, budget, ledger.total_pJ(), prev_iteration_pJ, T - 1 - t);
          if (should_update(gamma, t) && gamma.gamma_pJ > 0.0) {
            AdaptResult adapted = adapt_matrix(array, est, cfg.matrix_kind, base_uniforms,
                                               targets, cfg.programming, cfg.roi_weight_boost);
            touched = adapted.cells_touched;
            targets = std::move(adapted.targets);
            phi = std::move(adapted.phi);
            if (touched > 0) solver.update_matrix(phi.values());
            row.cells_touched += touched;
            ++row.adapt_count;
          }
        }
        double iteration_pJ = ledger.total_pJ() - iter_start_pJ;
        prev_iteration_pJ = iteration_pJ;
        if (mode == Mode::Adaptive) {
          TraceRow tr;
          tr.m = m;
          tr.trial = trial;
          tr.iteration = t;
          tr.gamma_pJ = gamma.gamma_pJ;
          tr.tier = gamma.tier;
          tr.cells_touched = touched;
          tr.iteration_energy_pJ = iteration_pJ;
          tr.tnmse_so_far_dB = acc_overall.frames_used() > 0 ? acc_overall.dB() : 0.0;
          out.trace.push_back(tr);
        }
      }

      row.tnmse_overall_dB = acc_overall.dB();
      row.tnmse_roi_dB = acc_roi.dB();
      row.roi_frames_skipped = acc_roi.frames_skipped();
      row.vmm_pJ = ledger.vmm_pJ();
      row.write_pJ = ledger.write_pJ();
      row.read_pJ = ledger.read_pJ();
      row.reset_pJ = ledger.reset_pJ();
      out.rows.push_back(row);
    }
  }
  return out;
}

}  // namespace

std::vector<StatRow> compute_stats(const std::vector<TrialRow>& rows) {
  // rows are grouped by (m, mode); trials vary fastest.
  std::vector<StatRow> stats;
  std::size_t i = 0;
  while (i < rows.size()) {
    std::size_t j = i;
    while (j < rows.size() && rows[j].m == rows[i].m && rows[j].mode == rows[i].mode) ++j;
    for (Metric metric : {Metric::TnmseOverall, Metric::TnmseRoi}) {
      StatRow s;
      s.m = rows[i].m;
      s.mode = rows[i].mode;
      s.metric = metric;
      s.trials = static_cast<int>(j - i);
      double sum = 0.0;
      for (std::size_t r = i; r < j; ++r) {
        sum += metric == Metric::TnmseOverall ? rows[r].tnmse_overall_dB : rows[r].tnmse_roi_dB;
      }
      s.mean_dB = sum / s.trials;
      double ss = 0.0;
      for (std::size_t r = i; r < j; ++r) {
        double v = metric == Metric::TnmseOverall ? rows[r].tnmse_overall_dB : rows[r].tnmse_roi_dB;
        ss += (v - s.mean_dB) * (v - s.mean_dB);
      }
      s.std_dB = s.trials > 1 ? std::sqrt(ss / (s.trials - 1)) : 0.0;
      stats.push_back(s);
    }
    i = j;
  }
  return stats;
}

RunReport run_experiment(const ExperimentConfig& config_in) {
  ExperimentConfig config = config_in;
  config.validate();

  const int trials = config.trials;
  std::vector<TrialOutput> outputs(static_cast<std::size_t>(trials));
  int workers = config.workers > 0 ? config.workers
                                   : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, trials);

  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker_body = [&]() {
    for (;;) {
      int t = next.fetch_add(1);
      if (t >= trials) return;
      try {
        outputs[static_cast<std::size_t>(t)] = run_one_trial(config, t);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  if (workers == 1) {
    worker_body();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker_body);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  RunReport report;
  report.config = config;
  for (auto& out : outputs) {
    report.rows.insert(report.rows.end(), out.rows.begin(), out.rows.end());
    report.trace.insert(report.trace.end(), out.trace.begin(), out.trace.end());
    for (auto& dump : out.dumps) report.debug_dumps.push_back(std::move(dump));
  }
  std::sort(report.rows.begin(), report.rows.end(), [](const TrialRow& a, const TrialRow& b) {
    return std::tuple(a.m, static_cast<int>(a.mode), a.trial) <
           std::tuple(b.m, static_cast<int>(b.mode), b.trial);
  });
  std::sort(report.trace.begin(), report.trace.end(), [](const TraceRow& a, const TraceRow& b) {
    return std::tuple(a.m, a.trial, a.iteration) < std::tuple(b.m, b.trial, b.iteration);
  });
  report.stats = compute_stats(report.rows);
  return report;
}

std::string sweep_csv_from_rows(const std::vector<TrialRow>& rows) {
  std::string csv = "M,mode,metric,mean_dB,std_dB,trials\n";
  for (const StatRow& s : compute_stats(rows)) {
    csv += std::to_string(s.m);
    csv += ',';
    csv += mode_label(s.mode);
    csv += ',';
    csv += metric_label(s.metric);
    csv += ',';
    csv += fmt("%.6g", s.mean_dB);
    csv += ',';
    csv += fmt("%.6g", s.std_dB);
    csv += ',';
    csv += std::to_string(s.trials);
    csv += '\n';
  }
  return csv;
}

std::string render_sweep_csv(const RunReport& report) { return sweep_csv_from_rows(report.rows); }

std::string render_trials_csv(const RunReport& report) {
  std::string csv =
      "M,mode,trial,tnmse_overall_dB,tnmse_roi_dB,roi_frames_skipped,vmm_pJ,write_pJ,read_pJ,"
      "reset_pJ,cells_touched,adapt_count,bp_nonconverged\n";
  for (const TrialRow& r : report.rows) {
    csv += std::to_string(r.m);
    csv += ',';
    csv += mode_label(r.mode);
    csv += ',';
    csv += std::to_string(r.trial);
    csv += ',';
    csv += fmt("%.17g", r.tnmse_overall_dB);
    csv += ',';
    csv += fmt("%.17g", r.tnmse_roi_dB);
    csv += ',';
    csv += std::to_string(r.roi_frames_skipped);
    csv += ',';
    csv += fmt("%.17g", r.vmm_pJ);
    csv += ',';
    csv += fmt("%.17g", r.write_pJ);
    csv += ',';
    csv += fmt("%.17g", r.read_pJ);
    csv += ',';
    csv += fmt("%.17g", r.reset_pJ);
    csv += ',';
    csv += std::to_string(r.cells_touched);
    csv += ',';
    csv += std::to_string(r.adapt_count);
    csv += ',';
    csv += std::to_string(r.bp_nonconverged);
    csv += '\n';
  }
  return csv;
}

std::string render_trace_csv(const RunReport& report) {
  std::string csv = "M,trial,iteration,gamma_pJ,tier,cells_touched,iteration_energy_pJ,"
                    "tnmse_so_far_dB\n";
  for (const TraceRow& r : report.trace) {
    csv += std::to_string(r.m);
    csv += ',';
    csv += std::to_string(r.trial);
    csv += ',';
    csv += std::to_string(r.iteration);
    csv += ',';
    csv += fmt("%.17g", r.gamma_pJ);
    csv += ',';
    csv += tier_label(r.tier);
    csv += ',';
    csv += std::to_string(r.cells_touched);
    csv += ',';
    csv += fmt("%.17g", r.iteration_energy_pJ);
    csv += ',';
    csv += fmt("%.17g", r.tnmse_so_far_dB);
    csv += '\n';
  }
  return csv;
}

std::string render_report_text(const RunReport& report) {
  const ExperimentConfig& cfg = report.config;
  std::ostringstream os;
  os << "ACMCA run report\n";
  os << "seed " << cfg.master_seed << ", " << cfg.trials << " trials, " << cfg.frames
     << " frames, N = " << cfg.n << ", k = " << cfg.sparsity_k() << "\n\n";

  os << "TNMSE [dB] (mean over trials, std in parentheses)\n";
  os << "   M        mode           overall              RoI\n";
  std::size_t i = 0;
  while (i + 1 < report.stats.size()) {
    const StatRow& ov = report.stats[i];
    const StatRow& roi = report.stats[i + 1];
    char line[160];
    std::snprintf(line, sizeof(line), "%4d  %-12s %9.3f (%6.3f) %9.3f (%6.3f)\n", ov.m,
                  mode_label(ov.mode), ov.mean_dB, ov.std_dB, roi.mean_dB, roi.std_dB);
    os << line;
    i += 2;
  }

  // Energy and area summary as a flat key-value block.
  double vmm = 0, write = 0, read = 0, reset = 0;
  long touched = 0;
  for (const TrialRow& r : report.rows) {
    vmm += r.vmm_pJ;
    write += r.write_pJ;
    read += r.read_pJ;
    reset += r.reset_pJ;
    touched += r.cells_touched;
  }
  os << "\n{\n";
  os << "  \"energy.vmm_pJ\": " << fmt("%.17g", vmm) << ",\n";
  os << "  \"energy.write_pJ\": " << fmt("%.17g", write) << ",\n";
  os << "  \"energy.read_pJ\": " << fmt("%.17g", read) << ",\n";
  os << "  \"energy.reset_pJ\": " << fmt("%.17g", reset) << ",\n";
  os << "  \"energy.total_pJ\": " << fmt("%.17g", vmm + write + read + reset) << ",\n";
  os << "  \"adapt.cells_touched\": " << touched << ",\n";
  for (int m : cfg.m_list) {
    double acmca_area = area_estimate_um2(cfg.n, m, cfg.area, ArrayDesign::Acmca);
    double baseline_area = area_estimate_um2(cfg.n, m, cfg.area, ArrayDesign::Baseline);
    os << "  \"area.M" << m << ".acmca_um2\": " << fmt("%.17g", acmca_area) << ",\n";
    os << "  \"area.M" << m << ".baseline_um2\": " << fmt("%.17g", baseline_area) << ",\n";
  }
  os << "  \"seed\": " << cfg.master_seed << "\n";
  os << "}\n";

  os << "\n# config echo\n" << render_config(cfg);
  return os.str();
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << content;
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace

void write_run_outputs(const RunReport& report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory: " + dir.string());
  write_file(dir / "sweep.csv", render_sweep_csv(report));
  write_file(dir / "trials.csv", render_trials_csv(report));
  write_file(dir / "trace.csv", render_trace_csv(report));
  write_file(dir / "report.txt", render_report_text(report));
  for (const auto& [name, content] : report.debug_dumps) write_file(dir / name, content);
}

std::vector<TrialRow> parse_trials_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("trials.csv: missing header");
  std::vector<TrialRow> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 13) {
      throw IoError("trials.csv line " + std::to_string(lineno) + ": expected 13 fields");
    }
    TrialRow r;
    r.m = std::stoi(fields[0]);
    if (fields[1] == "uniform") r.mode = Mode::UniformStatic;
    else if (fields[1] == "nonuniform") r.mode = Mode::NonUniformStatic;
    else if (fields[1] == "adaptive") r.mode = Mode::Adaptive;
    else throw IoError("trials.csv line " + std::to_string(lineno) + ": unknown mode");
    r.trial = std::stoi(fields[2]);
    r.tnmse_overall_dB = std::stod(fields[3]);
    r.tnmse_roi_dB = std::stod(fields[4]);
    r.roi_frames_skipped = std::stoi(fields[5]);
    r.vmm_pJ = std::stod(fields[6]);
    r.write_pJ = std::stod(fields[7]);
    r.read_pJ = std::stod(fields[8]);
    r.reset_pJ = std::stod(fields[9]);
    r.cells_touched = std::stol(fields[10]);
    r.adapt_count = std::stoi(fields[11]);
    r.bp_nonconverged = std::stoi(fields[12]);
    rows.push_back(r);
  }
  return rows;
}

std::vector<TrialRow> load_trials_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path.string());
  return parse_trials_csv(in);
}

}  // namespace acmca
