#include "acmca/crossbar.hpp"

#include <cstdio>
#include <ostream>

namespace acmca {

CrossbarArray::CrossbarArray(int rows, int cols, EnergyLedger& ledger, std::uint64_t master_seed,
                             std::uint64_t trial, SwitchingModel model, std::uint64_t tag)
    : rows_(rows),
      cols_(cols),
      row_enabled_(static_cast<std::size_t>(rows), true),
      col_enabled_(static_cast<std::size_t>(cols), true),
      ledger_(&ledger),
      model_(model),
      master_seed_(master_seed),
      trial_(trial) {
  if (rows < 1 || cols < 1) {
    throw std::invalid_argument("crossbar: dimensions must be >= 1");
  }
  cells_.resize(static_cast<std::size_t>(rows) * cols);
  cell_streams_.reserve(cells_.size());
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      cell_streams_.emplace_back(stream_seed({master_seed, trial, tag,
                                              static_cast<std::uint64_t>(r),
                                              static_cast<std::uint64_t>(c)}));
    }
  }
}

void CrossbarArray::set_enable(const std::vector<bool>& row_mask,
                               const std::vector<bool>& col_mask) {
  if (static_cast<int>(row_mask.size()) != rows_ || static_cast<int>(col_mask.size()) != cols_) {
    throw std::invalid_argument("set_enable: mask length does not match array dimensions");
  }
  row_enabled_ = row_mask;
  col_enabled_ = col_mask;
}

void CrossbarArray::enable_all() {
  row_enabled_.assign(static_cast<std::size_t>(rows_), true);
  col_enabled_.assign(static_cast<std::size_t>(cols_), true);
}

int CrossbarArray::enabled_row_count() const {
  int n = 0;
  for (bool b : row_enabled_) n += b ? 1 : 0;
  return n;
}

int CrossbarArray::enabled_col_count() const {
  int n = 0;
  for (bool b : col_enabled_) n += b ? 1 : 0;
  return n;
}

void CrossbarArray::write_cell(int row, int col, const PulseSpec& pulse) {
  int idx = index(row, col);
  if (!row_enabled_[row] || !col_enabled_[col]) {
    throw GatedLineError("write_cell: row or column is powered off");
  }
  if (pulse.count < 0) throw std::invalid_argument("write_cell: negative pulse count");
  if (pulse.mode == PulseMode::Reset) {
    reset(cells_[idx]);
    ledger_->charge_reset_pulses(static_cast<std::uint64_t>(pulse.count));
  } else {
    apply_set_pulses(cells_[idx], pulse, model_, cell_streams_[idx]);
    ledger_->charge_write_pulses(static_cast<std::uint64_t>(pulse.count));
  }
}

double CrossbarArray::read_cell(int row, int col) {
  int idx = index(row, col);
  if (!row_enabled_[row] || !col_enabled_[col]) {
    throw GatedLineError("read_cell: row or column is powered off");
  }
  ledger_->charge_reads(1);
  return cell_conductance(cells_[idx]);
}

Eigen::MatrixXd CrossbarArray::read_conductances() {
  Eigen::MatrixXd grid = Eigen::MatrixXd::Zero(rows_, cols_);
  std::uint64_t read_cells = 0;
  for (int r = 0; r < rows_; ++r) {
    if (!row_enabled_[r]) continue;
    for (int c = 0; c < cols_; ++c) {
      if (!col_enabled_[c]) continue;
      grid(r, c) = cell_conductance(cells_[static_cast<std::size_t>(r) * cols_ + c]);
      ++read_cells;
    }
  }
  ledger_->charge_reads(read_cells);
  return grid;
}

VmmResult CrossbarArray::vmm(const Eigen::VectorXd& input_voltages) {
  if (input_voltages.size() != cols_) {
    throw std::invalid_argument("vmm: input length does not match column count");
  }
  VmmResult result;
  result.currents_A = Eigen::VectorXd::Zero(rows_);
  result.row_enabled = row_enabled_;
  for (int r = 0; r < rows_; ++r) {
    if (!row_enabled_[r]) continue;
    double acc = 0.0;
    const SmcCell* row_cells = &cells_[static_cast<std::size_t>(r) * cols_];
    for (int c = 0; c < cols_; ++c) {
      if (!col_enabled_[c]) continue;
      acc += cell_conductance(row_cells[c]) * input_voltages[c];
    }
    result.currents_A[r] = acc;
  }
  ledger_->charge_vmm(static_cast<std::uint64_t>(enabled_row_count()) *
                          static_cast<std::uint64_t>(enabled_col_count()),
                      VmmTech::Smc);
  return result;
}

CrossbarArray CrossbarArray::transposed_copy(EnergyLedger& ledger) const {
  CrossbarArray t(cols_, rows_, ledger, master_seed_, trial_, model_, stream_tag::kTranspose);
  for (int r = 0; r < rows_; ++r) {
    for (int c = 0; c < cols_; ++c) {
      t.cells_[static_cast<std::size_t>(c) * rows_ + r] =
          cells_[static_cast<std::size_t>(r) * cols_ + c];
    }
  }
  for (int r = 0; r < rows_; ++r) t.col_enabled_[r] = row_enabled_[r];
  for (int c = 0; c < cols_; ++c) t.row_enabled_[c] = col_enabled_[c];
  return t;
}

void CrossbarArray::dump_conductances_csv(std::ostream& os) const {
  char buf[32];
  for (int r = 0; r < rows_; ++r) {
    for (int c = 0; c < cols_; ++c) {
      double g = (row_enabled_[r] && col_enabled_[c])
                     ? cell_conductance(cells_[static_cast<std::size_t>(r) * cols_ + c])
                     : 0.0;
      std::snprintf(buf, sizeof(buf), "%.8e", g);
      os << buf;
      if (c + 1 < cols_) os << ',';
    }
    os << '\n';
  }
}

int wta(const VmmResult& result) {
  int best = -1;
  for (int r = 0; r < result.currents_A.size(); ++r) {
    if (!result.row_enabled.empty() && !result.row_enabled[static_cast<std::size_t>(r)]) continue;
    if (best < 0 || result.currents_A[r] > result.currents_A[best]) best = r;
  }
  if (best < 0) throw std::domain_error("wta: every row is disabled");
  return best;
}

}  // namespace acmca
