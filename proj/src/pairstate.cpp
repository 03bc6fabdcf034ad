#include <spfl/pairstate.hpp>

#include <spfl/errors.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace spfl {

double TwoPhotonState::norm_sq() const {
  return amp_same_a * amp_same_a + amp_same_b * amp_same_b +
         amp_split_sa_ib * amp_split_sa_ib + amp_split_ia_sb * amp_split_ia_sb;
}

void TwoPhotonState::validate(double tol) const {
  if (std::abs(norm_sq() - 1.0) > tol)
    throw InvalidState("two-photon state is not normalized");
}

TwoPhotonState output_state(double phi) {
  if (!std::isfinite(phi))
    throw std::invalid_argument("output_state: phi must be finite");
  const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
  const double c = std::cos(phi / 2.0) * inv_sqrt2;
  const double s = std::sin(phi / 2.0) * inv_sqrt2;
  return {c, c, s, s, phi};
}

double total_phase(const LoopConfig& loop, double phi_d) {
  if (!std::isfinite(phi_d))
    throw std::invalid_argument("total_phase: phi_d must be finite");
  loop.validate();
  if (loop.hr_condition()) return phi_d;
  return loop.phi_p1_rad + loop.phi_p2_rad + phi_d;
}

RoutingProbabilities routing_probabilities(const TwoPhotonState& state) {
  state.validate();
  const double p_same =
      state.amp_same_a * state.amp_same_a + state.amp_same_b * state.amp_same_b;
  const double p_diff = state.amp_split_sa_ib * state.amp_split_sa_ib +
                        state.amp_split_ia_sb * state.amp_split_ia_sb;
  return {p_same, p_diff};
}

SinglesMarginals single_counts_marginal(const TwoPhotonState& state) {
  state.validate();
  const double same_a = state.amp_same_a * state.amp_same_a;
  const double same_b = state.amp_same_b * state.amp_same_b;
  const double split_sa = state.amp_split_sa_ib * state.amp_split_sa_ib;
  const double split_ia = state.amp_split_ia_sb * state.amp_split_ia_sb;
  return {
      same_a + split_sa,  // signal in a: both-in-a or signal-a/idler-b
      same_b + split_ia,  // signal in b
      same_a + split_ia,  // idler in a
      same_b + split_sa,  // idler in b
  };
}

double switching_detuning(double beta2_ps2_per_m, double l1_m, double l2_m,
                          int n, RoutingTarget target) {
  if (!std::isfinite(beta2_ps2_per_m) || !std::isfinite(l1_m) ||
      !std::isfinite(l2_m))
    throw std::invalid_argument("switching_detuning: inputs must be finite");
  if (n < 0) throw std::invalid_argument("switching_detuning: n must be >= 0");
  const double denom = beta2_ps2_per_m * (l2_m - l1_m);
  if (denom == 0.0)
    throw NoSwitchingPossible(
        "switching requires beta2 != 0 and L1 != L2; phi_d is identically "
        "zero otherwise");
  const double target_phase = (target == RoutingTarget::different_port)
                                  ? (2.0 * n + 1.0) * std::numbers::pi
                                  : 2.0 * (n + 1.0) * std::numbers::pi;
  return std::sqrt(target_phase / std::abs(denom));
}

}  // namespace spfl
