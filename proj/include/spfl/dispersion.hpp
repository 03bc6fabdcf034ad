#pragma once

namespace spfl {

// Unit system used throughout: angular frequency in rad/ps, fiber length in m,
// beta_n in ps^n/m, wavelengths in nm. With c in nm/ps these combine without
// further conversion factors and phases come out in radians.
inline constexpr double kSpeedOfLight = 299792.458;  // nm/ps

// One fiber segment, described by a truncated Taylor expansion of the
// propagation constant around a reference wavelength.
struct FiberSpec {
  double length_m = 0.0;
  double lambda_ref_nm = 1550.0;
  double beta1_ps_per_m = 0.0;   // group delay
  double beta2_ps2_per_m = 0.0;  // group-velocity dispersion
  double beta3_ps3_per_m = 0.0;

  double omega_ref() const;  // rad/ps at lambda_ref
  void validate() const;     // length >= 0, lambda_ref > 0, finite betas
};

// Angular frequencies (rad/ps) of the two pump photons and the signal/idler
// pair of one scattering event. Energy conservation
// omega_p1 + omega_p2 = omega_s + omega_i is an invariant.
struct FrequencyQuad {
  double omega_p1 = 0.0;
  double omega_p2 = 0.0;
  double omega_s = 0.0;
  double omega_i = 0.0;

  // One pulsed pump: omega_s,i = omega_p +- delta_omega.
  static FrequencyQuad single_pump(double omega_p, double delta_omega);
  // Degenerate pair from two pumps: omega_p1,p2 = omega_si -+ delta_omega.
  static FrequencyQuad degenerate_pair(double omega_si, double delta_omega);

  void validate(double rel_tol = 1e-12) const;
};

// The loop: pair-generating fiber plus the two dispersive segments and the
// pump phases set by the polarization controller. The output-state model
// assumes a 50/50 coupler; coupler_ratio must be exactly 0.5.
struct LoopConfig {
  FiberSpec nlf;   // pair-generating fiber; carries no dispersive phase in v1
  FiberSpec smf1;
  FiberSpec smf2;
  double coupler_ratio = 0.5;
  double phi_p1_rad = 0.0;
  double phi_p2_rad = 0.0;

  // True iff phi_p1 + phi_p2 = 0 mod 2pi, i.e. the loop reflects the pump.
  bool hr_condition(double tol = 1e-9) const;
  void validate() const;
};

double omega_from_wavelength(double lambda_nm);
double wavelength_from_omega(double omega_rad_per_ps);

// k(omega) - k0 in rad/m: beta1*dw + beta2/2*dw^2 + beta3/6*dw^3 with
// dw = omega - omega_ref. The constant k0 is dropped; it cancels identically
// in every phase combination used here.
double wavevector(const FiberSpec& fiber, double omega_rad_per_ps);

// k_p1 + k_p2 - k_s - k_i in one fiber, rad/m. The beta1 contribution
// vanishes exactly by energy conservation.
double phase_mismatch(const FiberSpec& fiber, const FrequencyQuad& freqs);

// Dispersion-induced phase difference between the counter-propagating
// pair-generation paths: mismatch(smf2)*L2 - mismatch(smf1)*L1, rad.
double phi_d_exact(const FiberSpec& smf1, const FiberSpec& smf2,
                   const FrequencyQuad& freqs);

// Equal-dispersion small model: -dOmega^2 * beta2 * (L1 - L2). Opposite in
// overall sign to phi_d_exact for identical fibers; every observable uses
// phi_d inside an even function, so both conventions predict the same counts.
// Both are kept deliberately.
double phi_d_approx(double beta2_ps2_per_m, double l1_m, double l2_m,
                    double delta_omega_rad_per_ps);

// Detuning conversion with the idler on the short-wavelength side:
// dOmega = 2 pi c dl / (lp0 * (lp0 - dl)). Inverse is exact.
double detuning_to_omega(double delta_lambda_nm, double lambda_p0_nm);
double omega_to_detuning(double delta_omega_rad_per_ps, double lambda_p0_nm);

// Classical pump power reflected by the loop, cos^2(phi/2) in [0, 1];
// 1 means high reflector, 0 high transmitter.
double pump_reflectivity(double phi_p_rad);

}  // namespace spfl
