#pragma once

#include <spfl/dispersion.hpp>

namespace spfl {

// Real amplitudes of the four routing outcomes of a signal/idler pair over
// the two output ports a and b. Global phases are unobservable in coincidence
// rates, so real amplitudes suffice.
struct TwoPhotonState {
  double amp_same_a = 0.0;      // |w_s, w_i> both in port a
  double amp_same_b = 0.0;      // both in port b
  double amp_split_sa_ib = 0.0; // signal in a, idler in b
  double amp_split_ia_sb = 0.0; // idler in a, signal in b
  double phi = 0.0;             // phase that generated the state (diagnostic)

  double norm_sq() const;
  // Throws InvalidState when |norm_sq - 1| exceeds tol.
  void validate(double tol = 1e-9) const;
};

struct RoutingProbabilities {
  double p_same = 0.0;  // both photons exit one port
  double p_diff = 0.0;  // photons exit different ports
};

// Exit probabilities of the individual photons; all four are 1/2 for every
// phase, which is what makes the routing invisible in singles rates.
struct SinglesMarginals {
  double signal_a = 0.0;
  double signal_b = 0.0;
  double idler_a = 0.0;
  double idler_b = 0.0;
};

enum class RoutingTarget { same_port, different_port };

// cos(phi/2)|psi_1> + sin(phi/2)|psi_2> with
// |psi_1> = (|ss,ii>_a + |ss,ii>_b)/sqrt(2), |psi_2> the split superposition.
TwoPhotonState output_state(double phi);

// phi = phi_p1 + phi_p2 + phi_d; equals phi_d when the loop is at the
// high-reflector point.
double total_phase(const LoopConfig& loop, double phi_d);

// p_same = (1 + cos phi)/2, p_diff = (1 - cos phi)/2.
RoutingProbabilities routing_probabilities(const TwoPhotonState& state);

SinglesMarginals single_counts_marginal(const TwoPhotonState& state);

// Detuning that routes pairs to the requested outcome:
// |phi_d| = (2n+1)pi for different ports, 2(n+1)pi for the same port (the
// even target starts at 2pi because dOmega = 0 carries no pair to route).
// Throws NoSwitchingPossible when beta2*(L2-L1) = 0.
double switching_detuning(double beta2_ps2_per_m, double l1_m, double l2_m,
                          int n, RoutingTarget target);

}  // namespace spfl
