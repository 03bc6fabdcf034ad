#include <spfl/design.hpp>

#include <spfl/dispersion.hpp>
#include <spfl/errors.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace spfl {

namespace {

double target_phase(int n, RoutingTarget target) {
  return target == RoutingTarget::different_port
             ? (2.0 * n + 1.0) * std::numbers::pi
             : 2.0 * (n + 1.0) * std::numbers::pi;
}

}  // namespace

double solve_length_difference(double beta2_ps2_per_m, double delta_lambda_nm,
                               double lambda_p0_nm, int n,
                               RoutingTarget target) {
  if (!std::isfinite(beta2_ps2_per_m))
    throw std::invalid_argument("beta2 must be finite");
  if (beta2_ps2_per_m == 0.0)
    throw NoSwitchingPossible("beta2 = 0 admits no length-difference solution");
  if (n < 0) throw std::invalid_argument("n must be >= 0");
  if (!(delta_lambda_nm > 0.0))
    throw std::invalid_argument("detuning must be > 0");
  const double delta_omega = detuning_to_omega(delta_lambda_nm, lambda_p0_nm);
  return target_phase(n, target) /
         (std::abs(beta2_ps2_per_m) * delta_omega * delta_omega);
}

SwitchingTable switching_table(double beta2_ps2_per_m, double l1_m,
                               double l2_m, double lambda_p0_nm, int n_max) {
  if (n_max < 0) throw std::invalid_argument("n_max must be >= 0");
  const double alpha = beta2_ps2_per_m * (l2_m - l1_m);
  if (alpha == 0.0)
    throw NoSwitchingPossible(
        "beta2 * (L2 - L1) = 0: no finite switching detuning exists");

  SpectralConfig fringe;
  fringe.lambda_p0_nm = lambda_p0_nm;
  fringe.alpha_ps2 = alpha;

  const double nan = std::numeric_limits<double>::quiet_NaN();
  auto solve = [&](double phase, double& out_dl, bool& reachable) {
    // The closed-form seed already carries the exact lambda_i0 dependence;
    // the bracketed search both validates and polishes it.
    const double seed_omega = std::sqrt(phase / std::abs(alpha));
    const double seed = omega_to_detuning(seed_omega, lambda_p0_nm);
    if (!(seed > 0.0) || seed >= 0.5 * lambda_p0_nm) {
      out_dl = nan;
      reachable = false;
      return;
    }
    const double lo = 0.9 * seed;
    const double hi = std::min(1.1 * seed, 0.49999 * lambda_p0_nm);
    out_dl = fringe_argument_root(fringe, phase, lo, hi);
    reachable = true;
  };

  SwitchingTable table;
  table.rows.reserve(n_max + 1);
  for (int n = 0; n <= n_max; ++n) {
    SwitchingRow row;
    row.n = n;
    row.phi_diff_rad = target_phase(n, RoutingTarget::different_port);
    row.phi_same_rad = target_phase(n, RoutingTarget::same_port);
    solve(row.phi_diff_rad, row.delta_lambda_diff_nm, row.diff_reachable);
    solve(row.phi_same_rad, row.delta_lambda_same_nm, row.same_reachable);
    table.rows.push_back(row);
  }
  return table;
}

SensitivityResult detuning_sensitivity(const SpectralConfig& config,
                                       double delta_lambda_nominal_nm,
                                       double delta_nm, int order) {
  if (!(delta_nm >= 0.0))
    throw std::invalid_argument("sensitivity offset must be >= 0");
  SensitivityResult result;
  result.contrast_minus =
      contrast_ratio(config, delta_lambda_nominal_nm - delta_nm, true, order);
  result.contrast_nominal =
      contrast_ratio(config, delta_lambda_nominal_nm, true, order);
  result.contrast_plus =
      contrast_ratio(config, delta_lambda_nominal_nm + delta_nm, true, order);
  return result;
}

}  // namespace spfl
