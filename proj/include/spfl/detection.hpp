#pragma once

#include <spfl/pairstate.hpp>
#include <spfl/spectral.hpp>

#include <array>
#include <cstdint>
#include <vector>

namespace spfl {

// Gated Geiger-mode single-photon detector. Filter transmission is folded
// into efficiency; dark_prob is per gate; a click blinds the detector for
// ceil(dead_time * gate_rate) subsequent gates.
struct DetectorSpec {
  double efficiency = 0.10;
  double dark_prob = 0.0;
  double gate_width_ns = 2.5;
  double dead_time_us = 10.0;

  std::uint64_t dead_gates(double gate_rate_hz) const;
  void validate() const;
};

// Pair source. mu is the mean pair number per gated pulse at power_ref_mw;
// the effective mean scales quadratically with pump power (two pump photons
// per pair).
struct SourceSpec {
  double mu = 0.01;
  double pump_power_mw = 0.23;
  double power_ref_mw = 0.23;
  double gate_rate_hz = 3.1e6;
  int rep_divisor = 8;  // gates run at 1/rep_divisor of the pump repetition

  double effective_mu() const;
  void validate() const;
};

// Detector indices. SPD1 sees the idler band in port a, SPD2 the signal band
// in port a, SPD3 whatever reaches port b.
inline constexpr int kSpd1 = 0;
inline constexpr int kSpd2 = 1;
inline constexpr int kSpd3 = 2;

enum class DetectorPair { spd1_spd2 = 0, spd1_spd3 = 1, spd2_spd3 = 2 };

struct CountRecord {
  std::uint64_t gates = 0;
  double gate_rate_hz = 0.0;
  double mu_eff = 0.0;
  bool multi_pair_warning = false;  // mu_eff > 0.5: pair statistics suspect
  std::array<std::uint64_t, 3> singles{};              // per SPD
  std::array<std::uint64_t, 3> coinc_same_pulse{};     // per DetectorPair
  std::array<std::uint64_t, 3> coinc_adjacent_pulse{};

  CountRecord& merge(const CountRecord& other);
};

struct TrueCoincidence {
  double rate_cps = 0.0;
  double error_cps = 0.0;
};

struct PowerPoint {
  double power_mw = 0.0;
  TrueCoincidence same;  // SPD1-SPD2
  TrueCoincidence diff;  // SPD2-SPD3
};

// Deterministic seed derivation (splitmix64 chain). `stream` separates
// independent uses (0 = gate batches, 1 = power points, 2 = sweep points).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream,
                          std::uint64_t index);

// Gates per independent simulation batch. simulate_counts partitions n_gates
// into batches of this size; batch i runs on derive_seed(seed, 0, i). Dead
// time and adjacent-gate pairing are tracked within a batch only and batches
// start live, an approximation of order dead_gates/kBatchGates.
inline constexpr std::uint64_t kBatchGates = 65536;

// One batch with an already-derived seed; the partition unit of
// simulate_counts. Merging batch records in any grouping reproduces the
// full-run record exactly.
CountRecord simulate_counts_batch(const SourceSpec& source,
                                  const std::array<DetectorSpec, 3>& detectors,
                                  const RoutingProbabilities& routing,
                                  std::uint64_t n_gates,
                                  std::uint64_t batch_seed);

// Full counting experiment over n_gates gates. Bit-identical results for
// identical inputs and seed.
CountRecord simulate_counts(const SourceSpec& source,
                            const std::array<DetectorSpec, 3>& detectors,
                            const RoutingProbabilities& routing,
                            std::uint64_t n_gates, std::uint64_t seed);

// C_T = (same-pulse - adjacent-pulse) * gate_rate / gates, with the counting
// error sqrt(same + adjacent) scaled the same way. A negative rate is
// legitimate statistical output.
TrueCoincidence true_coincidence(const CountRecord& record, DetectorPair pair);

// Repeats the experiment per pump power with quadratic mu scaling.
std::vector<PowerPoint> power_sweep(const SourceSpec& source,
                                    const std::array<DetectorSpec, 3>& detectors,
                                    const RoutingProbabilities& routing,
                                    const std::vector<double>& powers_mw,
                                    std::uint64_t n_gates, std::uint64_t seed);

// Full detuning sweep: per grid point computes the routing from the fringe
// phase (bandwidth-averaged by default), simulates, and deduces C_T for the
// SPD1-SPD2 (same-port witness) and SPD2-SPD3 (split-port witness) pairs.
// Grid points must lie in (0, lambda_p0/2).
SweepCurve sweep_experiment(const SpectralConfig& spectral,
                            const SourceSpec& source,
                            const std::array<DetectorSpec, 3>& detectors,
                            const std::vector<double>& delta_lambda_grid_nm,
                            std::uint64_t n_gates, std::uint64_t seed,
                            bool bandwidth_averaged = true);

}  // namespace spfl
