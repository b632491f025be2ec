#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "acmca/adaptive.hpp"
#include "acmca/config.hpp"
#include "acmca/metrics.hpp"

namespace acmca {

/// Comparison modes reported side by side: a uniform static matrix, a
/// non-uniform static matrix weighted by the known RoI block, and the
/// closed-loop adaptive matrix.
enum class Mode { UniformStatic = 0, NonUniformStatic = 1, Adaptive = 2 };

const char* mode_label(Mode mode);
const char* tier_label(UpdateTier tier);

/// One (M, mode, trial) outcome; sufficient to recompute every reported
/// statistic.
struct TrialRow {
  int m = 0;
  Mode mode = Mode::UniformStatic;
  int trial = 0;
  double tnmse_overall_dB = 0.0;
  double tnmse_roi_dB = 0.0;
  int roi_frames_skipped = 0;
  double vmm_pJ = 0.0;
  double write_pJ = 0.0;
  double read_pJ = 0.0;
  double reset_pJ = 0.0;
  long cells_touched = 0;
  int adapt_count = 0;
  int bp_nonconverged = 0;
};

/// One adaptive-loop iteration record.
struct TraceRow {
  int m = 0;
  int trial = 0;
  int iteration = 0;
  double gamma_pJ = 0.0;
  UpdateTier tier = UpdateTier::EveryIteration;
  int cells_touched = 0;
  double iteration_energy_pJ = 0.0;
  double tnmse_so_far_dB = 0.0;
};

enum class Metric { TnmseOverall = 0, TnmseRoi = 1 };
const char* metric_label(Metric metric);

struct StatRow {
  int m = 0;
  Mode mode = Mode::UniformStatic;
  Metric metric = Metric::TnmseOverall;
  double mean_dB = 0.0;
  double std_dB = 0.0;  // sample standard deviation over trials (0 for a single trial)
  int trials = 0;
};

struct RunReport {
  ExperimentConfig config;
  std::vector<TrialRow> rows;    // sorted by (m, mode, trial)
  std::vector<TraceRow> trace;   // sorted by (m, trial, iteration)
  std::vector<StatRow> stats;    // derived from rows
  std::vector<std::pair<std::string, std::string>> debug_dumps;  // name -> CSV content
};

std::vector<StatRow> compute_stats(const std::vector<TrialRow>& rows);

/// Runs the full grid (every M, every mode, every trial). Trials are the unit
/// of parallelism; outputs are bit-identical for any worker count because all
/// randomness is keyed by (master_seed, trial, purpose, coordinates).
RunReport run_experiment(const ExperimentConfig& config);

/// CSV renderings. sweep: one row per (M, mode, metric) with 6-significant-
/// digit numbers; trials and trace: full-precision per-row dumps.
std::string render_sweep_csv(const RunReport& report);
std::string render_trials_csv(const RunReport& report);
std::string render_trace_csv(const RunReport& report);

/// Human-readable run summary including the energy/area key-value section and
/// the config echo.
std::string render_report_text(const RunReport& report);

/// Writes sweep.csv, trials.csv, trace.csv and report.txt under dir.
/// Throws IoError on failure.
void write_run_outputs(const RunReport& report, const std::filesystem::path& dir);

/// Reads back a trials.csv produced by write_run_outputs.
std::vector<TrialRow> parse_trials_csv(std::istream& in);
std::vector<TrialRow> load_trials_csv(const std::filesystem::path& path);

/// Re-renders sweep.csv from persisted per-trial rows.
std::string sweep_csv_from_rows(const std::vector<TrialRow>& rows);

}  // namespace acmca
