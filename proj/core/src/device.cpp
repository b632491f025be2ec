#include "acmca/device.hpp"

#include <cmath>
#include <stdexcept>

namespace acmca {

namespace {
double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }
}  // namespace

double SwitchingModel::amplitude_for(double probability, double width_us) const {
  if (probability <= 0.0 || probability >= 1.0) {
    throw std::invalid_argument("amplitude_for: probability must be in (0, 1)");
  }
  double logit = std::log(probability / (1.0 - probability));
  return (i50_mA + logit / slope) * width_ref_us / width_us;
}

double switching_probability(const PulseSpec& pulse, const SwitchingModel& model) {
  if (pulse.mode != PulseMode::Set) {
    throw std::invalid_argument("switching_probability: pulse mode must be Set");
  }
  if (pulse.amplitude_mA < 0.0) {
    throw std::invalid_argument("switching_probability: negative pulse amplitude");
  }
  if (pulse.width_us <= 0.0) {
    throw std::invalid_argument("switching_probability: pulse width must be positive");
  }
  double effective = pulse.amplitude_mA * (pulse.width_us / model.width_ref_us);
  return logistic(model.slope * (effective - model.i50_mA));
}

void apply_set_pulses(SmcCell& cell, const PulseSpec& pulse, const SwitchingModel& model,
                      RngStream& rng) {
  double p = switching_probability(pulse, model);
  for (int k = 0; k < pulse.count; ++k) {
    for (int i = 0; i < kMagnetsPerCell; ++i) {
      if (cell.magnet(i) < 0 && rng.uniform01() < p) cell.flip_up(i);
    }
  }
}

void reset(SmcCell& cell) { cell.clear_all(); }

double conductance_for_level(int level) {
  return kConductanceMinS +
         static_cast<double>(level) * (kConductanceMaxS - kConductanceMinS) / kMagnetsPerCell;
}

double cell_conductance(const SmcCell& cell) { return conductance_for_level(cell.level()); }

int nearest_level(double conductance_S) {
  double step = (kConductanceMaxS - kConductanceMinS) / kMagnetsPerCell;
  int level = static_cast<int>(std::lround((conductance_S - kConductanceMinS) / step));
  if (level < 0) level = 0;
  if (level > kMaxLevel) level = kMaxLevel;
  return level;
}

}  // namespace acmca
