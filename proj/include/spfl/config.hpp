#pragma once

#include <spfl/detection.hpp>
#include <spfl/dispersion.hpp>
#include <spfl/spectral.hpp>

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>

namespace spfl {

// Whole-run configuration, loaded from a sectioned key = value text file.
// Keys carry their units (smf1_length_m, beta2_ps2_per_m, ...) because unit
// mistakes are the dominant failure mode in this kind of model. Unknown keys
// are rejected by name; loading validates every child invariant.
struct RunConfig {
  LoopConfig loop;
  SpectralConfig spectral;
  SourceSpec source;
  std::array<DetectorSpec, 3> detectors{};

  std::uint64_t seed = 1;
  std::uint64_t n_gates = 1000000;
  double grid_start_nm = 4.0;
  double grid_stop_nm = 20.0;
  double grid_step_nm = 0.2;
  bool bandwidth_averaged = true;

  void validate() const;

  static RunConfig parse(std::istream& in, const std::string& name);
  static RunConfig load(const std::string& path);
  void save(std::ostream& out) const;
  void save(const std::string& path) const;
};

// Inclusive sampling of [start, stop] in steps of step, with rounding
// tolerance at the end point. Empty when the range is malformed.
std::vector<double> make_grid(double start, double stop, double step);

}  // namespace spfl
