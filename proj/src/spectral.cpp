#include <spfl/spectral.hpp>

#include <spfl/dispersion.hpp>
#include <spfl/errors.hpp>
#include <spfl/numeric.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace spfl {

namespace {

constexpr double kFwhmToSigma = 0.4246609001440095;  // 1 / (2 sqrt(2 ln 2))
constexpr double kGaussianSpan = 4.0;                // integrate to +-4 sigma
constexpr int kGaussianPanels = 6;

double raw_argument(double alpha_ps2, double lambda_p0_nm,
                    double delta_lambda_nm) {
  const double li0 = lambda_p0_nm - delta_lambda_nm;
  const double pi2 = std::numbers::pi * std::numbers::pi;
  const double cc = kSpeedOfLight * kSpeedOfLight;
  return -4.0 * pi2 * alpha_ps2 * delta_lambda_nm * delta_lambda_nm * cc /
         (li0 * li0 * lambda_p0_nm * lambda_p0_nm);
}

void check_detuning(const SpectralConfig& config, double delta_lambda_nm) {
  if (!std::isfinite(config.alpha_ps2))
    throw std::invalid_argument("alpha must be finite");
  if (!(config.lambda_p0_nm > 0.0))
    throw std::invalid_argument("lambda_p0 must be > 0");
  if (!std::isfinite(delta_lambda_nm) || delta_lambda_nm <= 0.0 ||
      delta_lambda_nm >= config.lambda_p0_nm)
    throw std::invalid_argument(
        "detuning must satisfy 0 < delta_lambda < lambda_p0");
}

struct Panel {
  double lo = 0.0;
  double hi = 0.0;
};

// Integration panels for one filter dimension, as offsets from the filter
// center. Rectangular filters integrate over the passband; gaussian ones
// over +-4 sigma in fixed sub-panels so that a fixed-order rule per panel
// resolves the weight.
std::vector<Panel> filter_panels(const FilterSpec& filter, bool pump_squared) {
  if (filter.shape == FilterShape::rectangular) {
    const double h = 0.5 * filter.fwhm_nm;
    return {{-h, h}};
  }
  double sigma = filter.fwhm_nm * kFwhmToSigma;
  if (pump_squared) sigma /= std::numbers::sqrt2;
  const double span = kGaussianSpan * sigma;
  std::vector<Panel> panels(kGaussianPanels);
  for (int i = 0; i < kGaussianPanels; ++i) {
    panels[i].lo = -span + 2.0 * span * i / kGaussianPanels;
    panels[i].hi = -span + 2.0 * span * (i + 1) / kGaussianPanels;
  }
  return panels;
}

double filter_weight(const FilterSpec& filter, bool pump_squared, double x) {
  if (filter.shape == FilterShape::rectangular)
    return std::abs(x) <= 0.5 * filter.fwhm_nm ? 1.0 : 0.0;
  const double sigma = filter.fwhm_nm * kFwhmToSigma;
  const double e = x * x / (2.0 * sigma * sigma);
  return pump_squared ? std::exp(-2.0 * e) : std::exp(-e);
}

}  // namespace

void FilterSpec::validate() const {
  if (!std::isfinite(center_nm) || center_nm <= 0.0)
    throw std::invalid_argument("filter center must be > 0");
  if (!std::isfinite(fwhm_nm) || fwhm_nm <= 0.0)
    throw std::invalid_argument("filter fwhm must be > 0");
}

void SpectralConfig::validate() const {
  if (!std::isfinite(lambda_p0_nm) || lambda_p0_nm <= 0.0)
    throw std::invalid_argument("lambda_p0 must be > 0");
  pump_filter.validate();
  signal_filter.validate();
  idler_filter.validate();
  if (!std::isfinite(alpha_ps2))
    throw std::invalid_argument("alpha must be finite");
  if (!(xi_same_cps >= 0.0) || !(xi_diff_cps >= 0.0))
    throw std::invalid_argument("xi amplitudes must be >= 0");
}

double fringe_argument(const SpectralConfig& config, double delta_lambda_nm) {
  check_detuning(config, delta_lambda_nm);
  return raw_argument(config.alpha_ps2, config.lambda_p0_nm, delta_lambda_nm);
}

double fringe_model(const SpectralConfig& config, double delta_lambda_nm,
                    Branch branch) {
  const double arg = fringe_argument(config, delta_lambda_nm);
  const double xi =
      branch == Branch::same ? config.xi_same_cps : config.xi_diff_cps;
  const double sign = branch == Branch::same ? 1.0 : -1.0;
  return xi * (1.0 + sign * std::cos(arg));
}

double fringe_argument_root(const SpectralConfig& config, double target_phase,
                            double bracket_lo_nm, double bracket_hi_nm) {
  if (!std::isfinite(target_phase) || target_phase < 0.0)
    throw std::invalid_argument("target phase must be >= 0");
  if (!(bracket_lo_nm < bracket_hi_nm))
    throw std::invalid_argument("empty root bracket");
  auto g = [&](double dl) {
    return std::abs(fringe_argument(config, dl)) - target_phase;
  };
  const double root = brent_root(g, bracket_lo_nm, bracket_hi_nm, 1e-13);
  if (std::abs(g(root)) >= 1e-10)
    throw RootNotBracketed("root refinement failed to reach 1e-10 rad");
  return root;
}

double averaged_cos_phase(const SpectralConfig& config, double delta_lambda_nm,
                          int order) {
  config.validate();
  check_detuning(config, delta_lambda_nm);
  if (order < 2)
    throw ConfigError("quadrature order must be >= 2");

  const double lp0 = config.lambda_p0_nm;
  const double li0 = lp0 - delta_lambda_nm;
  // Energy-matched signal center: omega_s0 = 2 omega_p0 - omega_i0.
  const double omega_s0 =
      2.0 * omega_from_wavelength(lp0) - omega_from_wavelength(li0);
  const double ls0 = wavelength_from_omega(omega_s0);

  const bool signal_rect =
      config.signal_filter.shape == FilterShape::rectangular;
  // Signal passband in angular frequency (used to clip the idler interval).
  const double hs = 0.5 * config.signal_filter.fwhm_nm;
  const double ws_lo = signal_rect ? omega_from_wavelength(ls0 + hs) : 0.0;
  const double ws_hi = signal_rect ? omega_from_wavelength(ls0 - hs) : 0.0;

  // Pump panels in absolute wavelength.
  std::vector<Panel> pump_panels;
  for (const Panel& p : filter_panels(config.pump_filter, true))
    pump_panels.push_back({lp0 + p.lo, lp0 + p.hi});

  // Pump wavelengths at which the signal-clipped idler interval crosses an
  // idler panel edge. Panels are split there so every panel sees a smooth
  // integrand and doubling the order only probes convergence.
  if (signal_rect) {
    std::vector<double> idler_edges;
    for (const Panel& p : filter_panels(config.idler_filter, false)) {
      idler_edges.push_back(li0 + p.lo);
      idler_edges.push_back(li0 + p.hi);
    }
    std::vector<double> cuts;
    for (double wsx : {ws_lo, ws_hi})
      for (double lix : idler_edges)
        cuts.push_back(wavelength_from_omega(
            0.5 * (omega_from_wavelength(lix) + wsx)));
    std::sort(cuts.begin(), cuts.end());
    std::vector<Panel> split;
    for (const Panel& panel : pump_panels) {
      double lo = panel.lo;
      for (double c : cuts)
        if (c > lo && c < panel.hi) {
          split.push_back({lo, c});
          lo = c;
        }
      split.push_back({lo, panel.hi});
    }
    pump_panels = std::move(split);
  }

  const GaussLegendreRule rule = gauss_legendre(order);
  const std::vector<Panel> idler_base = filter_panels(config.idler_filter, false);

  double num = 0.0;
  double den = 0.0;
  for (const Panel& pp : pump_panels) {
    const double pmid = 0.5 * (pp.lo + pp.hi);
    const double phalf = 0.5 * (pp.hi - pp.lo);
    if (phalf <= 0.0) continue;
    for (int ip = 0; ip < order; ++ip) {
      const double lambda_p = pmid + phalf * rule.nodes[ip];
      const double wp = phalf * rule.weights[ip] *
                        filter_weight(config.pump_filter, true, lambda_p - lp0);
      const double omega_p = omega_from_wavelength(lambda_p);

      // Idler interval implied by the signal passband at this pump offset.
      double impl_lo = -std::numeric_limits<double>::infinity();
      double impl_hi = std::numeric_limits<double>::infinity();
      if (signal_rect) {
        impl_lo = wavelength_from_omega(2.0 * omega_p - ws_lo);
        impl_hi = wavelength_from_omega(2.0 * omega_p - ws_hi);
        if (impl_lo > impl_hi) std::swap(impl_lo, impl_hi);
      }

      for (const Panel& ib : idler_base) {
        const double lo = std::max(li0 + ib.lo, impl_lo);
        const double hi = std::min(li0 + ib.hi, impl_hi);
        if (hi <= lo) continue;
        const double imid = 0.5 * (lo + hi);
        const double ihalf = 0.5 * (hi - lo);
        for (int ii = 0; ii < order; ++ii) {
          const double lambda_i = imid + ihalf * rule.nodes[ii];
          double w = wp * ihalf * rule.weights[ii] *
                     filter_weight(config.idler_filter, false, lambda_i - li0);
          if (!signal_rect) {
            const double omega_s = 2.0 * omega_p - omega_from_wavelength(lambda_i);
            if (omega_s <= 0.0) continue;
            w *= filter_weight(config.signal_filter, false,
                               wavelength_from_omega(omega_s) - ls0);
          }
          const double dl_eff = lambda_p - lambda_i;
          num += w * std::cos(raw_argument(config.alpha_ps2, lp0, dl_eff));
          den += w;
        }
      }
    }
  }
  if (!(den > 0.0))
    throw std::invalid_argument(
        "filters have no joint spectral acceptance at this detuning");
  return num / den;
}

double bandwidth_averaged_fringe(const SpectralConfig& config,
                                 double delta_lambda_nm, Branch branch,
                                 int order) {
  const double avg = averaged_cos_phase(config, delta_lambda_nm, order);
  const double xi =
      branch == Branch::same ? config.xi_same_cps : config.xi_diff_cps;
  const double sign = branch == Branch::same ? 1.0 : -1.0;
  return xi * (1.0 + sign * avg);
}

double contrast_ratio(const SpectralConfig& config, double delta_lambda_nm,
                      bool averaged, int order) {
  double c_same, c_diff;
  if (averaged) {
    const double avg = averaged_cos_phase(config, delta_lambda_nm, order);
    c_same = config.xi_same_cps * (1.0 + avg);
    c_diff = config.xi_diff_cps * (1.0 - avg);
  } else {
    c_same = fringe_model(config, delta_lambda_nm, Branch::same);
    c_diff = fringe_model(config, delta_lambda_nm, Branch::diff);
  }
  const double mx = std::max(c_same, c_diff);
  const double mn = std::min(c_same, c_diff);
  if (mn <= 0.0) return std::numeric_limits<double>::infinity();
  return mx / mn;
}

namespace {

struct NormalSystem {
  std::array<std::array<double, 3>, 3> jtj{};
  std::array<double, 3> jtr{};
  double ssr = 0.0;
};

// Residuals r = model - data over both branches; the fringe argument is
// linear in alpha, arg = A(dl) * alpha.
NormalSystem build_system(const SweepCurve& data, const FitParams& p,
                          double lambda_p0_nm) {
  NormalSystem sys;
  for (const SweepPoint& pt : data.points) {
    const double a_factor =
        raw_argument(1.0, lambda_p0_nm, pt.delta_lambda_nm);
    const double arg = a_factor * p.alpha_ps2;
    const double c = std::cos(arg);
    const double s = std::sin(arg);

    const double r_same = p.xi_same * (1.0 + c) - pt.ct_same;
    const double j_same[3] = {1.0 + c, 0.0, -p.xi_same * s * a_factor};
    const double r_diff = p.xi_diff * (1.0 - c) - pt.ct_diff;
    const double j_diff[3] = {0.0, 1.0 - c, p.xi_diff * s * a_factor};

    sys.ssr += r_same * r_same + r_diff * r_diff;
    for (int i = 0; i < 3; ++i) {
      sys.jtr[i] += j_same[i] * r_same + j_diff[i] * r_diff;
      for (int j = 0; j < 3; ++j)
        sys.jtj[i][j] += j_same[i] * j_same[j] + j_diff[i] * j_diff[j];
    }
  }
  return sys;
}

double residual_sum(const SweepCurve& data, const FitParams& p,
                    double lambda_p0_nm) {
  double ssr = 0.0;
  for (const SweepPoint& pt : data.points) {
    const double arg =
        raw_argument(1.0, lambda_p0_nm, pt.delta_lambda_nm) * p.alpha_ps2;
    const double c = std::cos(arg);
    const double rs = p.xi_same * (1.0 + c) - pt.ct_same;
    const double rd = p.xi_diff * (1.0 - c) - pt.ct_diff;
    ssr += rs * rs + rd * rd;
  }
  return ssr;
}

// 3x3 solve with partial pivoting; throws FitDegenerate on a singular matrix.
std::array<double, 3> solve3(std::array<std::array<double, 3>, 3> m,
                             std::array<double, 3> b) {
  for (int col = 0; col < 3; ++col) {
    int pivot = col;
    for (int row = col + 1; row < 3; ++row)
      if (std::abs(m[row][col]) > std::abs(m[pivot][col])) pivot = row;
    if (std::abs(m[pivot][col]) < 1e-300)
      throw FitDegenerate("singular normal matrix: data does not constrain "
                          "all fit parameters");
    std::swap(m[col], m[pivot]);
    std::swap(b[col], b[pivot]);
    for (int row = col + 1; row < 3; ++row) {
      const double f = m[row][col] / m[col][col];
      for (int k = col; k < 3; ++k) m[row][k] -= f * m[col][k];
      b[row] -= f * b[col];
    }
  }
  std::array<double, 3> x{};
  for (int row = 2; row >= 0; --row) {
    double acc = b[row];
    for (int k = row + 1; k < 3; ++k) acc -= m[row][k] * x[k];
    x[row] = acc / m[row][row];
  }
  return x;
}

}  // namespace

FitResult fit_fringe(const SweepCurve& data, const FitParams& initial,
                     double lambda_p0_nm, int max_iter, double step_tol) {
  if (!(lambda_p0_nm > 0.0))
    throw std::invalid_argument("lambda_p0 must be > 0");
  if (initial.alpha_ps2 == 0.0)
    throw std::invalid_argument("initial alpha must be nonzero");
  if (data.points.size() < 4)
    throw FitDegenerate("at least 4 data points are required");
  double dl_min = data.points.front().delta_lambda_nm;
  double dl_max = dl_min;
  for (const SweepPoint& pt : data.points) {
    if (!(pt.delta_lambda_nm > 0.0) || pt.delta_lambda_nm >= lambda_p0_nm)
      throw std::invalid_argument("data detuning outside (0, lambda_p0)");
    dl_min = std::min(dl_min, pt.delta_lambda_nm);
    dl_max = std::max(dl_max, pt.delta_lambda_nm);
  }
  if (dl_max - dl_min <= 0.0)
    throw FitDegenerate("all data points share one detuning");

  FitParams p = initial;
  double ssr = residual_sum(data, p, lambda_p0_nm);
  double lambda = 1e-3;
  int iterations = 0;
  bool converged = false;

  while (iterations < max_iter && !converged) {
    ++iterations;
    NormalSystem sys = build_system(data, p, lambda_p0_nm);
    bool accepted = false;
    for (int attempt = 0; attempt < 60; ++attempt) {
      auto damped = sys.jtj;
      for (int i = 0; i < 3; ++i)
        damped[i][i] += lambda * std::max(sys.jtj[i][i], 1e-30);
      const std::array<double, 3> step =
          solve3(damped, {-sys.jtr[0], -sys.jtr[1], -sys.jtr[2]});
      const FitParams trial{p.xi_same + step[0], p.xi_diff + step[1],
                            p.alpha_ps2 + step[2]};
      const double trial_ssr = residual_sum(data, trial, lambda_p0_nm);
      double rel_step = 0.0;
      const double cur[3] = {p.xi_same, p.xi_diff, p.alpha_ps2};
      for (int i = 0; i < 3; ++i)
        rel_step = std::max(rel_step,
                            std::abs(step[i]) / (std::abs(cur[i]) + 1e-300));
      if (trial_ssr <= ssr) {
        p = trial;
        ssr = trial_ssr;
        lambda = std::max(lambda * 0.3, 1e-14);
        if (rel_step < step_tol) converged = true;
        accepted = true;
        break;
      }
      if (rel_step < step_tol) {
        // The damped step is already negligible; no better point exists.
        converged = true;
        accepted = true;
        break;
      }
      lambda *= 4.0;
    }
    if (!accepted) {
      converged = true;  // damping saturated without any acceptable step
    }
  }

  FitResult result;
  result.params = p;
  result.params.alpha_ps2 = std::abs(p.alpha_ps2);  // cos is even in alpha
  result.residual_sum_sq = ssr;
  result.iterations = iterations;
  result.converged = converged;
  if (!converged)
    throw FitNotConverged("fit did not converge within the iteration limit",
                          result);
  return result;
}

}  // namespace spfl
