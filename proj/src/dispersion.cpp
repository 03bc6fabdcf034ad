#include <spfl/dispersion.hpp>

#include <spfl/errors.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace spfl {

namespace {

void require_finite(double value, const char* what) {
  if (!std::isfinite(value))
    throw std::invalid_argument(std::string(what) + " must be finite");
}

}  // namespace

double FiberSpec::omega_ref() const {
  return omega_from_wavelength(lambda_ref_nm);
}

void FiberSpec::validate() const {
  require_finite(length_m, "fiber length");
  require_finite(lambda_ref_nm, "lambda_ref");
  require_finite(beta1_ps_per_m, "beta1");
  require_finite(beta2_ps2_per_m, "beta2");
  require_finite(beta3_ps3_per_m, "beta3");
  if (length_m < 0.0) throw std::invalid_argument("fiber length must be >= 0");
  if (lambda_ref_nm <= 0.0)
    throw std::invalid_argument("lambda_ref must be > 0");
}

FrequencyQuad FrequencyQuad::single_pump(double omega_p, double delta_omega) {
  return {omega_p, omega_p, omega_p + delta_omega, omega_p - delta_omega};
}

FrequencyQuad FrequencyQuad::degenerate_pair(double omega_si,
                                             double delta_omega) {
  return {omega_si - delta_omega, omega_si + delta_omega, omega_si, omega_si};
}

void FrequencyQuad::validate(double rel_tol) const {
  require_finite(omega_p1, "omega_p1");
  require_finite(omega_p2, "omega_p2");
  require_finite(omega_s, "omega_s");
  require_finite(omega_i, "omega_i");
  const double pump_sum = omega_p1 + omega_p2;
  const double pair_sum = omega_s + omega_i;
  const double scale = std::max(std::abs(pump_sum), std::abs(pair_sum));
  if (std::abs(pump_sum - pair_sum) > rel_tol * std::max(scale, 1.0))
    throw std::invalid_argument(
        "frequency quad violates energy conservation: omega_p1 + omega_p2 != "
        "omega_s + omega_i");
}

bool LoopConfig::hr_condition(double tol) const {
  const double sum = phi_p1_rad + phi_p2_rad;
  const double wrapped = std::remainder(sum, 2.0 * std::numbers::pi);
  return std::abs(wrapped) <= tol;
}

void LoopConfig::validate() const {
  nlf.validate();
  smf1.validate();
  smf2.validate();
  require_finite(phi_p1_rad, "phi_p1");
  require_finite(phi_p2_rad, "phi_p2");
  if (coupler_ratio != 0.5)
    throw std::invalid_argument(
        "coupler_ratio must be exactly 0.5; the output-state model assumes a "
        "50/50 coupler");
}

double omega_from_wavelength(double lambda_nm) {
  if (!(lambda_nm > 0.0) || !std::isfinite(lambda_nm))
    throw std::invalid_argument("wavelength must be positive and finite");
  return 2.0 * std::numbers::pi * kSpeedOfLight / lambda_nm;
}

double wavelength_from_omega(double omega_rad_per_ps) {
  if (!(omega_rad_per_ps > 0.0) || !std::isfinite(omega_rad_per_ps))
    throw std::invalid_argument("omega must be positive and finite");
  return 2.0 * std::numbers::pi * kSpeedOfLight / omega_rad_per_ps;
}

double wavevector(const FiberSpec& fiber, double omega_rad_per_ps) {
  fiber.validate();
  if (!std::isfinite(omega_rad_per_ps) || omega_rad_per_ps <= 0.0)
    throw std::invalid_argument("wavevector: omega must be positive and finite");
  const double dw = omega_rad_per_ps - fiber.omega_ref();
  return dw * (fiber.beta1_ps_per_m +
               dw * (fiber.beta2_ps2_per_m / 2.0 +
                     dw * fiber.beta3_ps3_per_m / 6.0));
}

double phase_mismatch(const FiberSpec& fiber, const FrequencyQuad& freqs) {
  freqs.validate();
  return wavevector(fiber, freqs.omega_p1) + wavevector(fiber, freqs.omega_p2) -
         wavevector(fiber, freqs.omega_s) - wavevector(fiber, freqs.omega_i);
}

double phi_d_exact(const FiberSpec& smf1, const FiberSpec& smf2,
                   const FrequencyQuad& freqs) {
  return phase_mismatch(smf2, freqs) * smf2.length_m -
         phase_mismatch(smf1, freqs) * smf1.length_m;
}

double phi_d_approx(double beta2_ps2_per_m, double l1_m, double l2_m,
                    double delta_omega_rad_per_ps) {
  require_finite(beta2_ps2_per_m, "beta2");
  require_finite(l1_m, "L1");
  require_finite(l2_m, "L2");
  require_finite(delta_omega_rad_per_ps, "delta_omega");
  return -delta_omega_rad_per_ps * delta_omega_rad_per_ps * beta2_ps2_per_m *
         (l1_m - l2_m);
}

double detuning_to_omega(double delta_lambda_nm, double lambda_p0_nm) {
  require_finite(delta_lambda_nm, "delta_lambda");
  if (!(lambda_p0_nm > 0.0) || !std::isfinite(lambda_p0_nm))
    throw std::invalid_argument("lambda_p0 must be positive and finite");
  if (delta_lambda_nm < 0.0 || delta_lambda_nm >= lambda_p0_nm)
    throw std::invalid_argument(
        "detuning must satisfy 0 <= delta_lambda < lambda_p0");
  const double lambda_i0 = lambda_p0_nm - delta_lambda_nm;
  return 2.0 * std::numbers::pi * kSpeedOfLight * delta_lambda_nm /
         (lambda_p0_nm * lambda_i0);
}

double omega_to_detuning(double delta_omega_rad_per_ps, double lambda_p0_nm) {
  require_finite(delta_omega_rad_per_ps, "delta_omega");
  if (!(lambda_p0_nm > 0.0) || !std::isfinite(lambda_p0_nm))
    throw std::invalid_argument("lambda_p0 must be positive and finite");
  if (delta_omega_rad_per_ps < 0.0)
    throw std::invalid_argument("delta_omega must be >= 0");
  return delta_omega_rad_per_ps * lambda_p0_nm * lambda_p0_nm /
         (2.0 * std::numbers::pi * kSpeedOfLight +
          delta_omega_rad_per_ps * lambda_p0_nm);
}

double pump_reflectivity(double phi_p_rad) {
  require_finite(phi_p_rad, "phi_p");
  const double c = std::cos(phi_p_rad / 2.0);
  return c * c;
}

}  // namespace spfl
