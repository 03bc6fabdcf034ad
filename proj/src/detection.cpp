#include <spfl/detection.hpp>

#include <spfl/errors.hpp>

#include <cmath>
#include <random>
#include <stdexcept>

namespace spfl {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Samplers built on the fully specified mt19937_64 engine so records are
// bit-identical across standard library implementations.
struct GateRng {
  explicit GateRng(std::uint64_t seed) : eng(seed) {}

  double uniform() { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  // Inversion by sequential search; exact for the small means used here.
  int poisson(double mu) {
    if (mu <= 0.0) return 0;
    double p = std::exp(-mu);
    double cum = p;
    const double u = uniform();
    int k = 0;
    while (u > cum && k < 4096) {
      ++k;
      p *= mu / k;
      cum += p;
    }
    return k;
  }

  std::mt19937_64 eng;
};

void check_routing(const RoutingProbabilities& routing) {
  if (!(routing.p_same >= 0.0) || !(routing.p_diff >= 0.0) ||
      std::abs(routing.p_same + routing.p_diff - 1.0) > 1e-9)
    throw std::invalid_argument(
        "routing probabilities must be nonnegative and sum to 1");
}

}  // namespace

std::uint64_t DetectorSpec::dead_gates(double gate_rate_hz) const {
  const double gates = dead_time_us * 1e-6 * gate_rate_hz;
  // round-off guard: 10 us at 3.1 MHz must give exactly 31 gates
  return static_cast<std::uint64_t>(std::ceil(gates - 1e-9));
}

void DetectorSpec::validate() const {
  if (!(efficiency >= 0.0) || !(efficiency <= 1.0))
    throw std::invalid_argument("detector efficiency must be in [0, 1]");
  if (!(dark_prob >= 0.0) || !(dark_prob <= 1.0))
    throw std::invalid_argument("dark probability must be in [0, 1]");
  if (!(gate_width_ns > 0.0))
    throw std::invalid_argument("gate width must be > 0");
  if (!(dead_time_us >= 0.0))
    throw std::invalid_argument("dead time must be >= 0");
}

double SourceSpec::effective_mu() const {
  const double ratio = pump_power_mw / power_ref_mw;
  return mu * ratio * ratio;
}

void SourceSpec::validate() const {
  if (!(mu >= 0.0)) throw std::invalid_argument("mu must be >= 0");
  if (!(pump_power_mw > 0.0) || !(power_ref_mw > 0.0))
    throw std::invalid_argument("pump powers must be > 0");
  if (!(gate_rate_hz > 0.0))
    throw std::invalid_argument("gate rate must be > 0");
  if (rep_divisor < 1)
    throw std::invalid_argument("rep_divisor must be >= 1");
}

CountRecord& CountRecord::merge(const CountRecord& other) {
  gates += other.gates;
  if (gate_rate_hz == 0.0) gate_rate_hz = other.gate_rate_hz;
  if (mu_eff == 0.0) mu_eff = other.mu_eff;
  multi_pair_warning = multi_pair_warning || other.multi_pair_warning;
  for (int i = 0; i < 3; ++i) {
    singles[i] += other.singles[i];
    coinc_same_pulse[i] += other.coinc_same_pulse[i];
    coinc_adjacent_pulse[i] += other.coinc_adjacent_pulse[i];
  }
  return *this;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream,
                          std::uint64_t index) {
  return splitmix64(splitmix64(seed + 0xD1B54A32D192ED03ull * stream) + index);
}

CountRecord simulate_counts_batch(const SourceSpec& source,
                                  const std::array<DetectorSpec, 3>& detectors,
                                  const RoutingProbabilities& routing,
                                  std::uint64_t n_gates,
                                  std::uint64_t batch_seed) {
  source.validate();
  for (const DetectorSpec& d : detectors) d.validate();
  check_routing(routing);
  if (n_gates == 0)
    throw std::invalid_argument("simulate_counts: n_gates must be > 0");

  const double mu_eff = source.effective_mu();
  const double eff[3] = {detectors[0].efficiency, detectors[1].efficiency,
                         detectors[2].efficiency};
  const double dark[3] = {detectors[0].dark_prob, detectors[1].dark_prob,
                          detectors[2].dark_prob};
  std::uint64_t dead_gates[3];
  for (int d = 0; d < 3; ++d)
    dead_gates[d] = detectors[d].dead_gates(source.gate_rate_hz);

  CountRecord rec;
  rec.gates = n_gates;
  rec.gate_rate_hz = source.gate_rate_hz;
  rec.mu_eff = mu_eff;
  rec.multi_pair_warning = mu_eff > 0.5;

  GateRng rng(batch_seed);
  std::uint64_t dead_remaining[3] = {0, 0, 0};
  bool prev_click[3] = {false, false, false};
  // coincidence pair -> detector indices
  constexpr int pair_a[3] = {kSpd1, kSpd1, kSpd2};
  constexpr int pair_b[3] = {kSpd2, kSpd3, kSpd3};

  for (std::uint64_t g = 0; g < n_gates; ++g) {
    // All randomness is drawn whether or not a detector is dead, so the
    // click pattern before dead-time masking is a function of the seed only.
    const int pairs = rng.poisson(mu_eff);
    bool photon[3] = {false, false, false};
    for (int k = 0; k < pairs; ++k) {
      const bool same_port = rng.bernoulli(routing.p_same);
      const bool first_outcome = rng.bernoulli(0.5);
      if (same_port) {
        if (first_outcome) {  // both photons in port a
          if (rng.bernoulli(eff[kSpd1])) photon[kSpd1] = true;  // idler
          if (rng.bernoulli(eff[kSpd2])) photon[kSpd2] = true;  // signal
        } else {  // both in port b; one Geiger detector sees both
          if (rng.bernoulli(eff[kSpd3])) photon[kSpd3] = true;
          if (rng.bernoulli(eff[kSpd3])) photon[kSpd3] = true;
        }
      } else {
        if (first_outcome) {  // signal in a, idler in b
          if (rng.bernoulli(eff[kSpd2])) photon[kSpd2] = true;
          if (rng.bernoulli(eff[kSpd3])) photon[kSpd3] = true;
        } else {  // idler in a, signal in b
          if (rng.bernoulli(eff[kSpd1])) photon[kSpd1] = true;
          if (rng.bernoulli(eff[kSpd3])) photon[kSpd3] = true;
        }
      }
    }
    bool click[3];
    for (int d = 0; d < 3; ++d) {
      const bool dark_hit = rng.bernoulli(dark[d]);
      click[d] = dead_remaining[d] == 0 && (photon[d] || dark_hit);
    }
    for (int d = 0; d < 3; ++d)
      if (click[d]) ++rec.singles[d];
    for (int p = 0; p < 3; ++p) {
      if (click[pair_a[p]] && click[pair_b[p]]) ++rec.coinc_same_pulse[p];
      if (prev_click[pair_a[p]] && click[pair_b[p]])
        ++rec.coinc_adjacent_pulse[p];
    }
    for (int d = 0; d < 3; ++d) {
      if (click[d])
        dead_remaining[d] = dead_gates[d];
      else if (dead_remaining[d] > 0)
        --dead_remaining[d];
      prev_click[d] = click[d];
    }
  }
  return rec;
}

CountRecord simulate_counts(const SourceSpec& source,
                            const std::array<DetectorSpec, 3>& detectors,
                            const RoutingProbabilities& routing,
                            std::uint64_t n_gates, std::uint64_t seed) {
  if (n_gates == 0)
    throw std::invalid_argument("simulate_counts: n_gates must be > 0");
  CountRecord total;
  std::uint64_t done = 0;
  std::uint64_t batch_index = 0;
  while (done < n_gates) {
    const std::uint64_t batch = std::min(kBatchGates, n_gates - done);
    total.merge(simulate_counts_batch(source, detectors, routing, batch,
                                      derive_seed(seed, 0, batch_index)));
    done += batch;
    ++batch_index;
  }
  return total;
}

TrueCoincidence true_coincidence(const CountRecord& record,
                                 DetectorPair pair) {
  if (record.gates == 0)
    throw std::invalid_argument("true_coincidence: empty record");
  const int p = static_cast<int>(pair);
  const double scale = record.gate_rate_hz / static_cast<double>(record.gates);
  const double same = static_cast<double>(record.coinc_same_pulse[p]);
  const double adjacent = static_cast<double>(record.coinc_adjacent_pulse[p]);
  return {(same - adjacent) * scale, std::sqrt(same + adjacent) * scale};
}

std::vector<PowerPoint> power_sweep(const SourceSpec& source,
                                    const std::array<DetectorSpec, 3>& detectors,
                                    const RoutingProbabilities& routing,
                                    const std::vector<double>& powers_mw,
                                    std::uint64_t n_gates, std::uint64_t seed) {
  for (std::size_t i = 0; i < powers_mw.size(); ++i) {
    if (!(powers_mw[i] > 0.0))
      throw std::invalid_argument("pump powers must be > 0");
    if (i > 0 && powers_mw[i] < powers_mw[i - 1])
      throw std::invalid_argument("pump powers must be sorted ascending");
  }
  std::vector<PowerPoint> result;
  result.reserve(powers_mw.size());
  for (std::size_t i = 0; i < powers_mw.size(); ++i) {
    SourceSpec at_power = source;
    at_power.pump_power_mw = powers_mw[i];
    const CountRecord rec = simulate_counts(at_power, detectors, routing,
                                            n_gates, derive_seed(seed, 1, i));
    PowerPoint point;
    point.power_mw = powers_mw[i];
    point.same = true_coincidence(rec, DetectorPair::spd1_spd2);
    point.diff = true_coincidence(rec, DetectorPair::spd2_spd3);
    result.push_back(point);
  }
  return result;
}

SweepCurve sweep_experiment(const SpectralConfig& spectral,
                            const SourceSpec& source,
                            const std::array<DetectorSpec, 3>& detectors,
                            const std::vector<double>& delta_lambda_grid_nm,
                            std::uint64_t n_gates, std::uint64_t seed,
                            bool bandwidth_averaged) {
  if (delta_lambda_grid_nm.empty())
    throw std::invalid_argument("sweep grid must not be empty");
  if (n_gates == 0)
    throw std::invalid_argument("sweep_experiment: n_gates must be > 0");
  for (double dl : delta_lambda_grid_nm)
    if (!(dl > 0.0) || !(dl < 0.5 * spectral.lambda_p0_nm))
      throw std::invalid_argument(
          "sweep grid must lie inside (0, lambda_p0 / 2)");

  SweepCurve curve;
  curve.has_singles = true;
  curve.points.reserve(delta_lambda_grid_nm.size());
  for (std::size_t i = 0; i < delta_lambda_grid_nm.size(); ++i) {
    const double dl = delta_lambda_grid_nm[i];
    const double cos_phase =
        bandwidth_averaged ? averaged_cos_phase(spectral, dl)
                           : std::cos(fringe_argument(spectral, dl));
    const RoutingProbabilities routing{0.5 * (1.0 + cos_phase),
                                       0.5 * (1.0 - cos_phase)};
    const CountRecord rec = simulate_counts(source, detectors, routing,
                                            n_gates, derive_seed(seed, 2, i));
    const double rate_scale =
        rec.gate_rate_hz / static_cast<double>(rec.gates);
    const TrueCoincidence same = true_coincidence(rec, DetectorPair::spd1_spd2);
    const TrueCoincidence diff = true_coincidence(rec, DetectorPair::spd2_spd3);
    SweepPoint point;
    point.delta_lambda_nm = dl;
    point.ct_same = same.rate_cps;
    point.err_same = same.error_cps;
    point.ct_diff = diff.rate_cps;
    point.err_diff = diff.error_cps;
    point.rs_spd1 = static_cast<double>(rec.singles[kSpd1]) * rate_scale;
    point.rs_spd2 = static_cast<double>(rec.singles[kSpd2]) * rate_scale;
    point.rs_spd3 = static_cast<double>(rec.singles[kSpd3]) * rate_scale;
    curve.points.push_back(point);
  }
  return curve;
}

}  // namespace spfl
