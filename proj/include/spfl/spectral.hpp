#pragma once

#include <spfl/errors.hpp>

#include <limits>
#include <stdexcept>
#include <vector>

namespace spfl {

enum class FilterShape { rectangular, gaussian };

struct FilterSpec {
  double center_nm = 0.0;
  double fwhm_nm = 0.0;
  FilterShape shape = FilterShape::rectangular;

  void validate() const;  // center > 0, fwhm > 0
};

// Wavelength-domain description of the source and detection chain.
// alpha = beta2 * (L2 - L1) is the single dispersion parameter of the fringe;
// xi_same / xi_diff are the fringe amplitudes (counts/s) of the two
// measurement configurations.
struct SpectralConfig {
  double lambda_p0_nm = 1547.5;
  FilterSpec pump_filter;    // F1
  FilterSpec signal_filter;  // F2, signal band
  FilterSpec idler_filter;   // F3
  double alpha_ps2 = 0.0435;
  double xi_same_cps = 29.5;
  double xi_diff_cps = 32.3;

  void validate() const;
};

enum class Branch { same, diff };

struct SweepPoint {
  double delta_lambda_nm = 0.0;
  double ct_same = 0.0;  // counts/s, same-port witness
  double ct_diff = 0.0;  // counts/s, split-port witness
  double err_same = 0.0;
  double err_diff = 0.0;
  // Singles rates, present only for simulated sweeps.
  double rs_spd1 = std::numeric_limits<double>::quiet_NaN();
  double rs_spd2 = std::numeric_limits<double>::quiet_NaN();
  double rs_spd3 = std::numeric_limits<double>::quiet_NaN();
};

struct SweepCurve {
  std::vector<SweepPoint> points;
  bool has_singles = false;
};

// The fringe phase -4 pi^2 alpha dl^2 c^2 / (li0 * lp0)^2 with
// li0 = lp0 - dl. Signed; its magnitude is strictly increasing in dl.
double fringe_argument(const SpectralConfig& config, double delta_lambda_nm);

// Monochromatic-center fringe xi * (1 +- cos(argument)).
double fringe_model(const SpectralConfig& config, double delta_lambda_nm,
                    Branch branch);

// Detuning at which |fringe_argument| = target_phase, found by Brent search
// on [bracket_lo, bracket_hi]. Result satisfies
// ||argument| - target| < 1e-10 rad. Throws RootNotBracketed otherwise.
double fringe_argument_root(const SpectralConfig& config, double target_phase,
                            double bracket_lo_nm, double bracket_hi_nm);

// <cos phi_d> averaged over the spectral acceptance at detuning dl.
//
// Model: the pair's effective detuning is dl' = dl + x_p - x_i where x_p is
// the pump-center offset (weight = pump filter transmission squared, two pump
// photons) and x_i the idler offset (idler filter weight); the signal filter
// enters as a weight at the signal wavelength implied by energy conservation.
// Filter centers follow the detuning, as with tunable filters in a sweep;
// only widths and shapes are read from the config. Integration is uniform in
// wavelength, Gauss-Legendre of the given order per panel with rectangular
// passbands split exactly at the acceptance kinks, so doubling the order is
// a pure convergence check.
double averaged_cos_phase(const SpectralConfig& config, double delta_lambda_nm,
                          int order = 16);

// xi * (1 +- <cos phi_d>); reduces to fringe_model as all FWHM -> 0.
double bandwidth_averaged_fringe(const SpectralConfig& config,
                                 double delta_lambda_nm, Branch branch,
                                 int order = 16);

// max(C_same, C_diff) / min(C_same, C_diff) at one detuning. With
// averaged = false the minimum can be exactly zero at a fringe null; the
// documented sentinel +infinity is returned there.
double contrast_ratio(const SpectralConfig& config, double delta_lambda_nm,
                      bool averaged, int order = 16);

struct FitParams {
  double xi_same = 0.0;
  double xi_diff = 0.0;
  double alpha_ps2 = 0.0;
};

struct FitResult {
  FitParams params;
  double residual_sum_sq = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Degenerate input: fewer than 4 points, no spread in detuning, or a
// singular normal matrix.
struct FitDegenerate : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Iteration limit hit; carries the best parameters found so far.
struct FitNotConverged : std::runtime_error {
  FitNotConverged(const std::string& what, FitResult best_so_far)
      : std::runtime_error(what), best(best_so_far) {}
  FitResult best;
};

// Joint damped least squares of both branches over (xi_same, xi_diff, alpha)
// with a shared alpha. cos is even in alpha, so the sign is unidentifiable;
// the magnitude is reported. Converges when the relative parameter step
// drops below step_tol.
FitResult fit_fringe(const SweepCurve& data, const FitParams& initial,
                     double lambda_p0_nm, int max_iter = 200,
                     double step_tol = 1e-10);

}  // namespace spfl
