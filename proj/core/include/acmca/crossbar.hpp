#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "acmca/device.hpp"
#include "acmca/energy.hpp"
#include "acmca/rng.hpp"

namespace acmca {

/// Writing through a power-gated row or column.
struct GatedLineError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Analog VMM output: one current per row. Disabled rows report 0 and carry
/// their enable state so WTA can exclude them.
struct VmmResult {
  Eigen::VectorXd currents_A;
  std::vector<bool> row_enabled;
};

/// M x N array of SMCs with write/read/reset paths, row/column power gating
/// and an attached energy ledger. Each cell owns a reproducible pulse stream
/// seeded from (master_seed, trial, row, col); an array is owned by exactly
/// one trial.
class CrossbarArray {
 public:
  CrossbarArray(int rows, int cols, EnergyLedger& ledger, std::uint64_t master_seed = 0,
                std::uint64_t trial = 0, SwitchingModel model = {},
                std::uint64_t stream_tag = stream_tag::kCell);

  CrossbarArray(const CrossbarArray&) = delete;
  CrossbarArray& operator=(const CrossbarArray&) = delete;
  CrossbarArray(CrossbarArray&&) = default;
  CrossbarArray& operator=(CrossbarArray&&) = default;

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  void set_enable(const std::vector<bool>& row_mask, const std::vector<bool>& col_mask);
  void enable_all();
  bool row_enabled(int row) const { return row_enabled_[check_row(row)]; }
  bool col_enabled(int col) const { return col_enabled_[check_col(col)]; }
  int enabled_row_count() const;
  int enabled_col_count() const;

  /// Applies a pulse train to one cell. Set trains switch stochastically via
  /// the cell's stream; Reset is deterministic. Charges count x per-pulse
  /// energy. Throws std::out_of_range for bad indices and GatedLineError when
  /// the row or column is powered off.
  void write_cell(int row, int col, const PulseSpec& pulse);

  /// Read-back of one cell's conductance (verify path); charges one cell read.
  double read_cell(int row, int col);

  /// Conductance grid; disabled rows/columns report 0. Charges one read per
  /// enabled cell.
  Eigen::MatrixXd read_conductances();

  /// currents[m] = sum over enabled n of G[m][n] * v[n], exact real
  /// arithmetic with left-to-right accumulation. Charges
  /// enabled_rows x enabled_cols cell-ops of SMC VMM energy.
  VmmResult vmm(const Eigen::VectorXd& input_voltages);

  const SmcCell& cell(int row, int col) const { return cells_[index(row, col)]; }
  int cell_level(int row, int col) const { return cell(row, col).level(); }
  const SwitchingModel& switching_model() const { return model_; }
  EnergyLedger& ledger() { return *ledger_; }

  /// State copy with rows and columns swapped; used for transposed reads on
  /// the reconstruction side. Cell states are copied, not re-programmed.
  CrossbarArray transposed_copy(EnergyLedger& ledger) const;

  /// Debug dump of the conductance grid: row-major CSV, scientific notation,
  /// 9 significant digits. Does not charge the ledger.
  void dump_conductances_csv(std::ostream& os) const;

 private:
  int index(int row, int col) const { return check_row(row) * cols_ + check_col(col); }
  int check_row(int row) const {
    if (row < 0 || row >= rows_) throw std::out_of_range("crossbar: row index out of range");
    return row;
  }
  int check_col(int col) const {
    if (col < 0 || col >= cols_) throw std::out_of_range("crossbar: col index out of range");
    return col;
  }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<SmcCell> cells_;
  std::vector<RngStream> cell_streams_;
  std::vector<bool> row_enabled_;
  std::vector<bool> col_enabled_;
  EnergyLedger* ledger_ = nullptr;
  SwitchingModel model_{};
  std::uint64_t master_seed_ = 0;
  std::uint64_t trial_ = 0;
};

/// Winner-takes-all over the row currents: index of the maximum among enabled
/// rows, ties broken by lowest index. Throws std::domain_error when every row
/// is disabled.
int wta(const VmmResult& result);

}  // namespace acmca
