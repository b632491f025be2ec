#pragma once

#include <cstdint>

#include "acmca/rng.hpp"

namespace acmca {

// 4-bit SOT-MRAM multibit cell (SMC): 2^4 nanomagnets share one spin Hall
// channel. A set pulse switches each still-down magnet up with a probability
// set by the pulse amplitude/width; a reset pulse deterministically drives
// all magnets down.
inline constexpr int kMagnetsPerCell = 16;
inline constexpr int kMaxLevel = kMagnetsPerCell;  // raw levels 0..16
inline constexpr int kMaxTargetLevel = 15;         // programming alphabet 0..15

// Cell resistance spans 1-5 kOhm; conductance is linear in level.
inline constexpr double kConductanceMinS = 2.0e-4;  // level 0  (5 kOhm)
inline constexpr double kConductanceMaxS = 1.0e-3;  // level 16 (1 kOhm)

inline constexpr double kResetWidthUs = 50.0;
inline constexpr double kResetAmplitudeMa = 13.94;  // deep in the deterministic regime

enum class PulseMode { Set, Reset };

/// A constant-amplitude programming pulse train. Trains of differing
/// amplitudes compose by applying several specs in sequence.
struct PulseSpec {
  double amplitude_mA = 0.0;
  double width_us = 20.0;
  int count = 0;
  PulseMode mode = PulseMode::Set;

  static PulseSpec set_train(double amplitude_mA, int count, double width_us = 20.0) {
    return {amplitude_mA, width_us, count, PulseMode::Set};
  }
  static PulseSpec reset_pulse(int count = 1) {
    return {kResetAmplitudeMa, kResetWidthUs, count, PulseMode::Reset};
  }
};

/// Logistic switching model for the set operation, centered on the
/// characterized 6.97 mA / 20 us operating point (p = 0.5 there).
struct SwitchingModel {
  double i50_mA = 6.97;
  double slope = 2.0;
  double width_ref_us = 20.0;

  /// Inverse of switching_probability in the amplitude argument.
  double amplitude_for(double probability, double width_us = 20.0) const;
};

class SmcCell {
 public:
  /// Number of +1 magnets, 0..16.
  int level() const { return __builtin_popcount(magnets_); }

  /// Polarity of magnet i as -1 or +1.
  int magnet(int i) const { return (magnets_ >> i) & 1u ? +1 : -1; }

  void flip_up(int i) { magnets_ |= (1u << i); }
  void clear_all() { magnets_ = 0; }

  bool operator==(const SmcCell&) const = default;

 private:
  std::uint16_t magnets_ = 0;  // bit set => polarity +1
};

/// Per-pulse probability that a still-down magnet switches up.
/// Monotone nondecreasing in amplitude and width. Throws std::invalid_argument
/// for negative amplitude, nonpositive width, or a non-Set pulse.
double switching_probability(const PulseSpec& pulse, const SwitchingModel& model);

/// Applies pulse.count set pulses. Each pulse flips every still-down magnet
/// independently with the model probability; up magnets are absorbing, so the
/// level never decreases.
void apply_set_pulses(SmcCell& cell, const PulseSpec& pulse, const SwitchingModel& model,
                      RngStream& rng);

/// Deterministic reset: all magnets to -1, level 0. Consumes no randomness.
void reset(SmcCell& cell);

double conductance_for_level(int level);
double cell_conductance(const SmcCell& cell);

/// Nearest level for a read-back conductance (exact inverse on the 17-level grid).
int nearest_level(double conductance_S);

}  // namespace acmca
