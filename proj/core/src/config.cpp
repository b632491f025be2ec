#include "acmca/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace acmca {

int ExperimentConfig::sparsity_k() const {
  return static_cast<int>(std::lround(sparsity_rate * n));
}

namespace {

[[noreturn]] void bad_field(const std::string& field, const std::string& why) {
  throw ConfigError("config error: " + field + " " + why);
}

void require(bool ok, const std::string& field, const std::string& why) {
  if (!ok) bad_field(field, why);
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  if (value == "inf") return std::numeric_limits<double>::infinity();
  std::size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(value, &pos);
  } catch (const std::exception&) {
    bad_field(key, "is not a number: '" + value + "'");
  }
  if (pos != value.size()) bad_field(key, "has trailing characters: '" + value + "'");
  return v;
}

long long parse_int(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(value, &pos);
  } catch (const std::exception&) {
    bad_field(key, "is not an integer: '" + value + "'");
  }
  if (pos != value.size()) bad_field(key, "has trailing characters: '" + value + "'");
  return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  bad_field(key, "must be true or false: '" + value + "'");
}

std::vector<int> parse_int_list(const std::string& key, const std::string& value) {
  std::vector<int> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(static_cast<int>(parse_int(key, item)));
  }
  if (out.empty()) bad_field(key, "must list at least one integer");
  return out;
}

}  // namespace

void ExperimentConfig::validate() {
  require(n >= 1, "n", "must be >= 1");
  require(!m_list.empty(), "m_list", "must be nonempty");
  std::sort(m_list.begin(), m_list.end());
  m_list.erase(std::unique(m_list.begin(), m_list.end()), m_list.end());
  for (int m : m_list) {
    require(m >= 1, "m_list", "entries must be >= 1");
    require(m <= n, "m_list", "entries must be <= n");
  }
  require(trials >= 1, "trials", "must be >= 1");
  require(frames >= 1, "frames", "must be >= 1");
  require(sparsity_rate > 0.0 && sparsity_rate <= 1.0, "sparsity_rate", "must be in (0, 1]");
  require(sparsity_k() >= 1, "sparsity_rate", "rounds to k = 0 nonzeros");
  require(roi_fraction >= 0.0 && roi_fraction <= 1.0, "roi_fraction", "must be in [0, 1]");
  require(roi_in_fraction >= 0.0 && roi_in_fraction <= 1.0, "roi_in_fraction",
          "must be in [0, 1]");
  require(persistence >= 0.0 && persistence <= 1.0, "persistence", "must be in [0, 1]");
  require(noise_sigma >= 0.0, "noise_sigma", "must be >= 0");
  require(roi_weight_boost >= 0.0, "roi_weight_boost", "must be >= 0");
  require(e_critical_pJ > 0.0, "e_critical_pJ", "must be > 0");
  require(e_critical_pJ < e_budget_pJ, "e_critical_pJ", "must be < e_budget_pJ");
  if (total_budget_pJ) require(*total_budget_pJ >= 0.0, "total_budget_pJ", "must be >= 0");
  require(u1 >= 1, "u1", "must be >= 1");
  require(u2 >= u1, "u2", "must be >= u1");
  require(ema_alpha > 0.0 && ema_alpha <= 1.0, "ema_alpha", "must be in (0, 1]");
  require(support_threshold_rel > 0.0, "support_threshold_rel", "must be > 0");
  require(bp_tol > 0.0, "bp_tol", "must be > 0");
  require(bp_max_iter >= 1, "bp_max_iter", "must be >= 1");
  require(bp_rho > 0.0, "bp_rho", "must be > 0");
  require(programming.per_pulse_probability > 0.0 && programming.per_pulse_probability < 1.0,
          "per_pulse_probability", "must be in (0, 1)");
  require(programming.max_pulses >= 1, "max_pulses", "must be >= 1");
  require(programming.pulses_per_batch >= 1, "pulses_per_batch", "must be >= 1");
  require(workers >= 0, "workers", "must be >= 0");
  require(energy.e_cell_vmm_smc_pJ > 0 && energy.e_cell_vmm_cmos_pJ > 0 &&
              energy.e_write_pulse_pJ > 0 && energy.e_reset_pulse_pJ > 0 &&
              energy.e_read_cell_pJ > 0,
          "energy constants", "must be > 0");
  require(energy.e_cell_vmm_smc_pJ < energy.e_cell_vmm_cmos_pJ, "e_cell_vmm_smc_pJ",
          "must be < e_cell_vmm_cmos_pJ");
  require(area.transistors_per_cell_acmca > 0 && area.area_per_transistor_um2 > 0,
          "area model", "must be > 0");
}

ExperimentConfig parse_config(std::istream& in, std::string_view source_name) {
  ExperimentConfig cfg;
  std::string line;
  int lineno = 0;
  std::map<std::string, bool> seen;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError(std::string(source_name) + ":" + std::to_string(lineno) +
                          ": malformed section header");
      }
      continue;  // sections are organizational only
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(std::string(source_name) + ":" + std::to_string(lineno) +
                        ": expected 'key = value'");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError(std::string(source_name) + ":" + std::to_string(lineno) +
                        ": empty key or value");
    }
    if (seen[key]) bad_field(key, "appears more than once");
    seen[key] = true;

    if (key == "n") cfg.n = static_cast<int>(parse_int(key, value));
    else if (key == "m_list") cfg.m_list = parse_int_list(key, value);
    else if (key == "trials") cfg.trials = static_cast<int>(parse_int(key, value));
    else if (key == "frames") cfg.frames = static_cast<int>(parse_int(key, value));
    else if (key == "matrix") {
      if (value == "bernoulli") cfg.matrix_kind = MatrixKind::Bernoulli;
      else if (value == "gaussian") cfg.matrix_kind = MatrixKind::Gaussian;
      else bad_field(key, "must be 'bernoulli' or 'gaussian'");
    } else if (key == "adaptive") cfg.adaptive = parse_bool(key, value);
    else if (key == "master_seed") cfg.master_seed = static_cast<std::uint64_t>(parse_int(key, value));
    else if (key == "output_dir") cfg.output_dir = value;
    else if (key == "workers") cfg.workers = static_cast<int>(parse_int(key, value));
    else if (key == "dump_debug_grids") cfg.dump_debug_grids = parse_bool(key, value);
    else if (key == "sparsity_rate") cfg.sparsity_rate = parse_double(key, value);
    else if (key == "roi_fraction") cfg.roi_fraction = parse_double(key, value);
    else if (key == "roi_in_fraction") cfg.roi_in_fraction = parse_double(key, value);
    else if (key == "persistence") cfg.persistence = parse_double(key, value);
    else if (key == "noise_sigma") cfg.noise_sigma = parse_double(key, value);
    else if (key == "roi_weight_boost") cfg.roi_weight_boost = parse_double(key, value);
    else if (key == "e_budget_pJ") cfg.e_budget_pJ = parse_double(key, value);
    else if (key == "e_critical_pJ") cfg.e_critical_pJ = parse_double(key, value);
    else if (key == "total_budget_pJ") {
      if (value == "none") cfg.total_budget_pJ.reset();
      else cfg.total_budget_pJ = parse_double(key, value);
    } else if (key == "u1") cfg.u1 = static_cast<int>(parse_int(key, value));
    else if (key == "u2") cfg.u2 = static_cast<int>(parse_int(key, value));
    else if (key == "ema_alpha") cfg.ema_alpha = parse_double(key, value);
    else if (key == "support_threshold_rel") cfg.support_threshold_rel = parse_double(key, value);
    else if (key == "bp_tol") cfg.bp_tol = parse_double(key, value);
    else if (key == "bp_max_iter") cfg.bp_max_iter = static_cast<int>(parse_int(key, value));
    else if (key == "bp_rho") cfg.bp_rho = parse_double(key, value);
    else if (key == "per_pulse_probability") cfg.programming.per_pulse_probability = parse_double(key, value);
    else if (key == "max_pulses") cfg.programming.max_pulses = static_cast<int>(parse_int(key, value));
    else if (key == "pulses_per_batch") cfg.programming.pulses_per_batch = static_cast<int>(parse_int(key, value));
    else if (key == "program_verify") cfg.programming.verify = parse_bool(key, value);
    else if (key == "e_cell_vmm_smc_pJ") cfg.energy.e_cell_vmm_smc_pJ = parse_double(key, value);
    else if (key == "e_cell_vmm_cmos_pJ") cfg.energy.e_cell_vmm_cmos_pJ = parse_double(key, value);
    else if (key == "e_write_pulse_pJ") cfg.energy.e_write_pulse_pJ = parse_double(key, value);
    else if (key == "e_reset_pulse_pJ") cfg.energy.e_reset_pulse_pJ = parse_double(key, value);
    else if (key == "e_read_cell_pJ") cfg.energy.e_read_cell_pJ = parse_double(key, value);
    else if (key == "area_transistors_per_cell") cfg.area.transistors_per_cell_acmca = parse_double(key, value);
    else if (key == "area_baseline_transistors_per_cell") cfg.area.transistors_per_cell_baseline = parse_double(key, value);
    else if (key == "area_per_transistor_um2") cfg.area.area_per_transistor_um2 = parse_double(key, value);
    else bad_field(key, "is not a recognized configuration key");
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path.string());
  return parse_config(in, path.string());
}

std::string render_config(const ExperimentConfig& c) {
  std::ostringstream os;
  os.precision(17);
  os << "[experiment]\n";
  os << "n = " << c.n << "\n";
  os << "m_list = ";
  for (std::size_t i = 0; i < c.m_list.size(); ++i) os << (i ? "," : "") << c.m_list[i];
  os << "\n";
  os << "trials = " << c.trials << "\n";
  os << "frames = " << c.frames << "\n";
  os << "matrix = " << (c.matrix_kind == MatrixKind::Bernoulli ? "bernoulli" : "gaussian") << "\n";
  os << "adaptive = " << (c.adaptive ? "true" : "false") << "\n";
  os << "master_seed = " << c.master_seed << "\n";
  os << "output_dir = " << c.output_dir << "\n";
  os << "workers = " << c.workers << "\n";
  os << "dump_debug_grids = " << (c.dump_debug_grids ? "true" : "false") << "\n";
  os << "\n[signal]\n";
  os << "sparsity_rate = " << c.sparsity_rate << "\n";
  os << "roi_fraction = " << c.roi_fraction << "\n";
  os << "roi_in_fraction = " << c.roi_in_fraction << "\n";
  os << "persistence = " << c.persistence << "\n";
  os << "noise_sigma = " << c.noise_sigma << "\n";
  os << "roi_weight_boost = " << c.roi_weight_boost << "\n";
  os << "\n[budget]\n";
  os << "e_budget_pJ = " << c.e_budget_pJ << "\n";
  os << "e_critical_pJ = " << c.e_critical_pJ << "\n";
  os << "total_budget_pJ = ";
  if (c.total_budget_pJ) os << *c.total_budget_pJ;
  else os << "none";
  os << "\n";
  os << "u1 = " << c.u1 << "\n";
  os << "u2 = " << c.u2 << "\n";
  os << "ema_alpha = " << c.ema_alpha << "\n";
  os << "support_threshold_rel = " << c.support_threshold_rel << "\n";
  os << "\n[solver]\n";
  os << "bp_tol = " << c.bp_tol << "\n";
  os << "bp_max_iter = " << c.bp_max_iter << "\n";
  os << "bp_rho = " << c.bp_rho << "\n";
  os << "\n[programming]\n";
  os << "per_pulse_probability = " << c.programming.per_pulse_probability << "\n";
  os << "max_pulses = " << c.programming.max_pulses << "\n";
  os << "pulses_per_batch = " << c.programming.pulses_per_batch << "\n";
  os << "program_verify = " << (c.programming.verify ? "true" : "false") << "\n";
  os << "\n[energy]\n";
  os << "e_cell_vmm_smc_pJ = " << c.energy.e_cell_vmm_smc_pJ << "\n";
  os << "e_cell_vmm_cmos_pJ = " << c.energy.e_cell_vmm_cmos_pJ << "\n";
  os << "e_write_pulse_pJ = " << c.energy.e_write_pulse_pJ << "\n";
  os << "e_reset_pulse_pJ = " << c.energy.e_reset_pulse_pJ << "\n";
  os << "e_read_cell_pJ = " << c.energy.e_read_cell_pJ << "\n";
  os << "\n[area]\n";
  os << "area_transistors_per_cell = " << c.area.transistors_per_cell_acmca << "\n";
  os << "area_baseline_transistors_per_cell = " << c.area.transistors_per_cell_baseline << "\n";
  os << "area_per_transistor_um2 = " << c.area.area_per_transistor_um2 << "\n";
  return os.str();
}

}  // namespace acmca
