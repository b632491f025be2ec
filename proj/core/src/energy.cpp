#include "acmca/energy.hpp"

#include <cstdio>
#include <stdexcept>

namespace acmca {

double programming_energy_pJ(std::uint64_t write_pulses, std::uint64_t resets,
                             const EnergyParams& params) {
  return static_cast<double>(write_pulses) * params.e_write_pulse_pJ +
         static_cast<double>(resets) * params.e_reset_pulse_pJ;
}

const std::array<VmmReferenceRow, 3>& vmm_reference_table() {
  static const std::array<VmmReferenceRow, 3> table = {{
      {100, 25, 1177.0, 240.0},
      {200, 50, 4708.0, 968.0},
      {400, 100, 18832.0, 3840.0},
  }};
  return table;
}

double improvement_ratio(int n, int m, const EnergyParams& params) {
  if (n < 1 || m < 1) throw std::invalid_argument("improvement_ratio: dimensions must be >= 1");
  for (const auto& row : vmm_reference_table()) {
    if (row.n == n && row.m == m) return row.cmos_pJ / row.smc_pJ;
  }
  return params.e_cell_vmm_cmos_pJ / params.e_cell_vmm_smc_pJ;
}

double area_estimate_um2(int n, int m, const AreaModel& model, ArrayDesign which) {
  if (n < 0 || m < 0) throw std::invalid_argument("area_estimate_um2: dimensions must be >= 0");
  double per_cell = which == ArrayDesign::Acmca ? model.transistors_per_cell_acmca
                                                : model.transistors_per_cell_baseline;
  return static_cast<double>(n) * static_cast<double>(m) * per_cell *
         model.area_per_transistor_um2;
}

std::string calibration_report(const EnergyParams& params, const AreaModel& area) {
  char buf[256];
  std::string out;
  out += "VMM energy, CMOS crossbar vs SMC crossbar\n";
  out += "size (NxM)    cells     CMOS [pJ]     SMC [pJ]   improvement\n";
  for (const auto& row : vmm_reference_table()) {
    std::snprintf(buf, sizeof(buf), "%4dx%-6d %7d  %12.1f %12.1f        %.2fx\n", row.n, row.m,
                  row.n * row.m, row.cmos_pJ, row.smc_pJ, improvement_ratio(row.n, row.m, params));
    out += buf;
  }
  std::snprintf(buf, sizeof(buf),
                "per-cell VMM energy: SMC %.4g pJ, CMOS %.4g pJ (linear-model ratio %.3gx)\n",
                params.e_cell_vmm_smc_pJ, params.e_cell_vmm_cmos_pJ,
                params.e_cell_vmm_cmos_pJ / params.e_cell_vmm_smc_pJ);
  out += buf;
  std::snprintf(buf, sizeof(buf),
                "programming constants: write pulse %.4g pJ, reset %.4g pJ, read %.4g pJ/cell\n",
                params.e_write_pulse_pJ, params.e_reset_pulse_pJ, params.e_read_cell_pJ);
  out += buf;
  double acmca_area = area_estimate_um2(400, 100, area, ArrayDesign::Acmca);
  double baseline_area = area_estimate_um2(400, 100, area, ArrayDesign::Baseline);
  std::snprintf(buf, sizeof(buf),
                "area at 400x100: crossbar %.6g um^2, baseline %.6g um^2, reduction %.4g um^2\n",
                acmca_area, baseline_area, baseline_area - acmca_area);
  out += buf;
  return out;
}

}  // namespace acmca
