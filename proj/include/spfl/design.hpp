#pragma once

#include <spfl/pairstate.hpp>
#include <spfl/spectral.hpp>

#include <vector>

namespace spfl {

// |L2 - L1| realizing the routing target at the given detuning:
// |dL| = target_phase / (|beta2| * dOmega^2). Both signs of dL solve the
// problem (the observables are even in phi_d); the magnitude is returned.
// Throws NoSwitchingPossible when beta2 = 0.
double solve_length_difference(double beta2_ps2_per_m, double delta_lambda_nm,
                               double lambda_p0_nm, int n,
                               RoutingTarget target);

struct SwitchingRow {
  int n = 0;
  double phi_diff_rad = 0.0;       // (2n+1) pi
  double phi_same_rad = 0.0;       // 2(n+1) pi
  double delta_lambda_diff_nm = 0.0;
  double delta_lambda_same_nm = 0.0;
  bool diff_reachable = false;     // root lies inside (0, lambda_p0/2)
  bool same_reachable = false;
};

struct SwitchingTable {
  std::vector<SwitchingRow> rows;  // ordered by n; unreachable rows kept
};

// Tabulates the switching detunings for n = 0..n_max, refining the
// closed-form seed of each target phase with the exact fringe-argument root.
SwitchingTable switching_table(double beta2_ps2_per_m, double l1_m,
                               double l2_m, double lambda_p0_nm, int n_max);

struct SensitivityResult {
  double contrast_minus = 0.0;    // at nominal - delta
  double contrast_nominal = 0.0;
  double contrast_plus = 0.0;     // at nominal + delta
};

// Bandwidth-averaged contrast at nominal and nominal +- delta; quantifies
// how a detuning error degrades the routing contrast.
SensitivityResult detuning_sensitivity(const SpectralConfig& config,
                                       double delta_lambda_nominal_nm,
                                       double delta_nm, int order = 16);

}  // namespace spfl
