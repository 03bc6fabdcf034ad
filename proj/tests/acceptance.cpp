// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Uses the reference configuration shipped in configs/.

#include <spfl/commands.hpp>
#include <spfl/config.hpp>
#include <spfl/csv.hpp>
#include <spfl/design.hpp>
#include <spfl/detection.hpp>
#include <spfl/dispersion.hpp>
#include <spfl/pairstate.hpp>
#include <spfl/spectral.hpp>

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace spfl;

namespace {

struct Criterion {
  bool pass = false;
  std::string detail;
};

double now_seconds() {
  using clock = std::chrono::steady_clock;
  static const clock::time_point start = clock::now();
  return std::chrono::duration<double>(clock::now() - start).count();
}

std::string fmt(double value, int precision = 4) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", precision, value);
  return buf;
}

// ---------------------------------------------------------------------------
// criterion 1: fringe roots at pi and 2pi vs the measured switching points
Criterion criterion_roots(const RunConfig& config) {
  const double t0 = now_seconds();
  const SpectralConfig& c = config.spectral;
  const double root_pi = fringe_argument_root(c, std::numbers::pi, 5.0, 14.0);
  const double root_2pi =
      fringe_argument_root(c, 2.0 * std::numbers::pi, 12.0, 20.0);
  const double elapsed = now_seconds() - t0;

  const double dev_pi = std::abs(10.75 - root_pi) / root_pi;
  const double dev_2pi = std::abs(15.2 - root_2pi) / root_2pi;
  Criterion r;
  r.pass = std::abs(root_pi - 10.73) <= 0.05 &&
           std::abs(root_2pi - 15.13) <= 0.05 && dev_pi < 0.005 &&
           dev_2pi < 0.005 && elapsed < 1.0;
  r.detail = "root(pi)=" + fmt(root_pi, 6) + " nm, root(2pi)=" +
             fmt(root_2pi, 6) + " nm; reference 10.75/15.2 nm deviate " +
             fmt(100.0 * dev_pi, 2) + "%/" + fmt(100.0 * dev_2pi, 2) + "%; " +
             fmt(elapsed, 2) + " s";
  return r;
}

// ---------------------------------------------------------------------------
// criterion 2: beta2 from alpha/(L2-L1) is a plausible G.652 value and the
// exact Taylor phase reaches pi at the criterion-1 detuning
Criterion criterion_beta2(const RunConfig& config) {
  const double l1 = config.loop.smf1.length_m;
  const double l2 = config.loop.smf2.length_m;
  const double beta2 = config.spectral.alpha_ps2 / (l2 - l1);
  const double root_pi =
      fringe_argument_root(config.spectral, std::numbers::pi, 5.0, 14.0);

  FiberSpec smf1 = config.loop.smf1;
  FiberSpec smf2 = config.loop.smf2;
  smf1.beta2_ps2_per_m = smf2.beta2_ps2_per_m = beta2;
  const double omega_p = omega_from_wavelength(config.spectral.lambda_p0_nm);
  const double delta_omega =
      detuning_to_omega(root_pi, config.spectral.lambda_p0_nm);
  const FrequencyQuad quad = FrequencyQuad::single_pump(omega_p, delta_omega);
  const double phi = std::abs(phi_d_exact(smf1, smf2, quad));
  const double phase_dev = std::abs(phi - std::numbers::pi) / std::numbers::pi;

  Criterion r;
  r.pass = beta2 >= -0.023 && beta2 <= -0.019 && phase_dev < 0.01;
  r.detail = "beta2=" + fmt(beta2, 6) +
             " ps^2/m (G.652 window -0.023..-0.019), |phi_d|/pi=" +
             fmt(phi / std::numbers::pi, 8) + " at " + fmt(root_pi, 6) + " nm";
  return r;
}

// ---------------------------------------------------------------------------
// criterion 3: fit recovery, noiseless through the CLI path and with
// Poisson noise over 100 realizations
Criterion criterion_fit(const RunConfig& config) {
  const double t0 = now_seconds();
  const SpectralConfig& c = config.spectral;

  SweepCurve noiseless;
  for (double dl = 4.0; dl <= 20.0 + 1e-9; dl += 0.5) {
    SweepPoint p;
    p.delta_lambda_nm = dl;
    p.ct_same = fringe_model(c, dl, Branch::same);
    p.ct_diff = fringe_model(c, dl, Branch::diff);
    noiseless.points.push_back(p);
  }
  const fs::path dir = fs::temp_directory_path() / "spfl_acceptance_fit";
  fs::create_directories(dir);
  const fs::path csv = dir / "noiseless.csv";
  const fs::path report = dir / "report.json";
  write_sweep_csv(csv.string(), noiseless);

  FitOptions options;
  options.data_path = csv.string();
  options.init = FitParams{29.5 * 1.2, 32.3 * 0.8, 0.0435 * 1.2};
  options.report_path = report.string();
  options.lambda_p0_nm = c.lambda_p0_nm;
  const int exit_code = cmd_fit(options);

  double worst_noiseless = 1.0;
  bool noiseless_ok = false;
  if (exit_code == 0) {
    std::ifstream in(report);
    const nlohmann::json j = nlohmann::json::parse(in);
    const double e1 = std::abs(j["xi_same_cps"].get<double>() - 29.5) / 29.5;
    const double e2 = std::abs(j["xi_diff_cps"].get<double>() - 32.3) / 32.3;
    const double e3 = std::abs(j["alpha_ps2"].get<double>() - 0.0435) / 0.0435;
    worst_noiseless = std::max({e1, e2, e3});
    noiseless_ok = worst_noiseless < 1e-6;
  }
  fs::remove_all(dir);

  // Poisson noise at the measured count scale, 60 s per point
  const double integration_s = 60.0;
  std::mt19937_64 rng(20240001);
  double worst_alpha = 0.0;
  for (int realization = 0; realization < 100; ++realization) {
    SweepCurve data;
    for (double dl = 4.0; dl <= 20.0 + 1e-9; dl += 0.5) {
      SweepPoint p;
      p.delta_lambda_nm = dl;
      std::poisson_distribution<long> same(
          fringe_model(c, dl, Branch::same) * integration_s);
      std::poisson_distribution<long> diff(
          fringe_model(c, dl, Branch::diff) * integration_s);
      p.ct_same = static_cast<double>(same(rng)) / integration_s;
      p.ct_diff = static_cast<double>(diff(rng)) / integration_s;
      data.points.push_back(p);
    }
    const FitResult fit = fit_fringe(data, {25.0, 36.0, 0.05}, c.lambda_p0_nm);
    worst_alpha =
        std::max(worst_alpha, std::abs(fit.params.alpha_ps2 - 0.0435) / 0.0435);
  }
  const double elapsed = now_seconds() - t0;

  Criterion r;
  r.pass = noiseless_ok && worst_alpha < 0.02 && elapsed < 30.0;
  r.detail = "noiseless max rel err " + fmt(worst_noiseless, 3) +
             ", worst alpha err over 100 noisy fits " +
             fmt(100.0 * worst_alpha, 3) + "%; " + fmt(elapsed, 2) + " s";
  return r;
}

// ---------------------------------------------------------------------------
// criterion 4: bandwidth-averaged contrast at the two operating points
Criterion criterion_contrast(const RunConfig& config) {
  const SpectralConfig& c = config.spectral;
  const double at_1075 = contrast_ratio(c, 10.75, true);
  const double at_152 = contrast_ratio(c, 15.2, true);
  Criterion r;
  r.pass = at_1075 >= 100.0 && at_152 < at_1075;
  r.detail = "diff:same at 10.75 nm = " + fmt(at_1075, 5) +
             ":1 (>= 100 required); same:diff at 15.2 nm = " + fmt(at_152, 5) +
             ":1, smaller as observed. Known gap: the 20:1 reference at "
             "15.2 nm is far below this model's prediction; the residual "
             "imperfections are outside the model.";
  return r;
}

// ---------------------------------------------------------------------------
// criterion 5: counting experiment converges to the analytic fringe
Criterion criterion_montecarlo(const RunConfig& config) {
  const double t0 = now_seconds();
  const SpectralConfig& c = config.spectral;
  const double root_pi = fringe_argument_root(c, std::numbers::pi, 5.0, 14.0);
  const double root_2pi =
      fringe_argument_root(c, 2.0 * std::numbers::pi, 12.0, 20.0);
  const std::vector<double> grid{6.0, root_pi, 13.0, root_2pi, 17.0};

  SourceSpec source = config.source;
  source.mu = 0.01;
  std::array<DetectorSpec, 3> detectors{};
  for (DetectorSpec& d : detectors) {
    d.efficiency = 1.0;
    d.dark_prob = 0.0;
    d.dead_time_us = 0.0;
  }
  const std::uint64_t n_gates = 10000000;
  const SweepCurve curve =
      sweep_experiment(c, source, detectors, grid, n_gates, 271828, false);

  // analytic shape: xi_mc(1 -+ cos), xi_mc = mu R / 4 per branch
  const double xi_mc = source.effective_mu() * source.gate_rate_hz / 4.0;
  const double peak = 2.0 * xi_mc;
  const double dev_diff =
      std::abs(curve.points[1].ct_diff - peak) / peak;  // diff max at root_pi
  const double dev_same =
      std::abs(curve.points[3].ct_same - peak) / peak;  // same max at root_2pi
  const double elapsed = now_seconds() - t0;

  Criterion r;
  r.pass = dev_diff < 0.02 && dev_same < 0.02 && elapsed <= 60.0;
  r.detail = "favored-branch deviation from xi(1 -+ cos): " +
             fmt(100.0 * dev_diff, 3) + "% at the pi point, " +
             fmt(100.0 * dev_same, 3) + "% at the 2pi point (1e7 gates each); " +
             fmt(elapsed, 2) + " s";
  return r;
}

// ---------------------------------------------------------------------------
// criterion 6: quadratic power law and power-independent contrast
Criterion criterion_power(const RunConfig& config) {
  const double t0 = now_seconds();
  const SpectralConfig& c = config.spectral;
  const double root_pi = fringe_argument_root(c, std::numbers::pi, 5.0, 14.0);
  const double cos_phase = averaged_cos_phase(c, root_pi);
  const RoutingProbabilities routing{0.5 * (1.0 + cos_phase),
                                     0.5 * (1.0 - cos_phase)};

  SourceSpec source = config.source;
  source.mu = 0.0055;  // keeps mu_eff <= 0.05 across the 10x range
  source.power_ref_mw = 0.23;
  std::array<DetectorSpec, 3> detectors{};
  for (DetectorSpec& d : detectors) {
    d.efficiency = 1.0;
    d.dark_prob = 0.0;
    d.dead_time_us = 0.0;
  }
  std::vector<double> powers;
  for (double ratio : {0.3, 0.45, 0.67, 1.0, 1.5, 2.2, 3.0})
    powers.push_back(ratio * 0.23);
  const std::uint64_t n_gates = 10000000;
  const std::vector<PowerPoint> points =
      power_sweep(source, detectors, routing, powers, n_gates, 31415);

  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const PowerPoint& p : points) {
    const double x = std::log(p.power_mw);
    const double y = std::log(p.diff.rate_cps);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(points.size());
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);

  // Contrast constancy is tested on the suppressed fraction
  // C_same / C_diff (the reciprocal contrast), whose counting error stays
  // finite when the suppressed branch nears zero. The 3-sigma intervals of
  // all powers must share a common point.
  double lo = -1e300, hi = 1e300;
  for (const PowerPoint& p : points) {
    const double fraction = p.same.rate_cps / p.diff.rate_cps;
    const double sigma =
        std::hypot(p.same.error_cps / p.diff.rate_cps,
                   fraction * p.diff.error_cps / p.diff.rate_cps);
    lo = std::max(lo, fraction - 3.0 * sigma);
    hi = std::min(hi, fraction + 3.0 * sigma);
  }
  const bool contrast_constant = lo <= hi;
  const double elapsed = now_seconds() - t0;

  Criterion r;
  r.pass = std::abs(slope - 2.0) <= 0.05 && contrast_constant;
  r.detail = "log-log slope " + fmt(slope, 5) + " (2.00 +- 0.05), contrast " +
             std::string(contrast_constant ? "constant" : "NOT constant") +
             " within 3 sigma over 10x power; " + fmt(elapsed, 2) + " s";
  return r;
}

// ---------------------------------------------------------------------------
// criterion 7: property suite with no reference numbers
Criterion criterion_properties(const RunConfig& config) {
  bool ok = true;
  std::string failure;

  // state normalization, flat marginals, probability sum over a phi grid
  for (int i = 0; i < 1000 && ok; ++i) {
    const double phi = -8.0 + 16.0 * i / 999.0;
    const TwoPhotonState state = output_state(phi);
    const SinglesMarginals m = single_counts_marginal(state);
    const RoutingProbabilities p = routing_probabilities(state);
    if (std::abs(state.norm_sq() - 1.0) > 1e-12 ||
        std::abs(m.signal_a - 0.5) > 1e-12 ||
        std::abs(m.signal_b - 0.5) > 1e-12 ||
        std::abs(m.idler_a - 0.5) > 1e-12 ||
        std::abs(m.idler_b - 0.5) > 1e-12 ||
        std::abs(p.p_same + p.p_diff - 1.0) > 1e-12) {
      ok = false;
      failure = "state algebra at phi=" + fmt(phi, 6);
    }
  }

  // exact vs approximate dispersion phase magnitude
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> beta2(-0.05, -0.005);
  std::uniform_real_distribution<double> length(0.2, 6.0);
  std::uniform_real_distribution<double> detuning(0.1, 15.0);
  for (int trial = 0; trial < 200 && ok; ++trial) {
    const double b2 = beta2(rng);
    const double l1 = length(rng), l2 = length(rng), d = detuning(rng);
    FiberSpec f1, f2;
    f1.length_m = l1;
    f2.length_m = l2;
    f1.lambda_ref_nm = f2.lambda_ref_nm = 1547.5;
    f1.beta2_ps2_per_m = f2.beta2_ps2_per_m = b2;
    const FrequencyQuad quad =
        FrequencyQuad::single_pump(omega_from_wavelength(1547.5), d);
    if (std::abs(std::abs(phi_d_exact(f1, f2, quad)) -
                 std::abs(phi_d_approx(b2, l1, l2, d))) > 1e-12) {
      ok = false;
      failure = "phi_d magnitude mismatch";
    }
  }

  // accidental subtraction: zero mean over 30 seeds for independent streams
  if (ok) {
    SourceSpec src = config.source;
    src.mu = 0.0;
    std::array<DetectorSpec, 3> det{};
    det[0].dark_prob = 0.010;
    det[1].dark_prob = 0.020;
    det[2].dark_prob = 0.015;
    std::vector<double> rates(30);
    for (int s = 0; s < 30; ++s) {
      const CountRecord rec =
          simulate_counts(src, det, {0.5, 0.5}, 100000, 7000 + s);
      rates[s] = true_coincidence(rec, DetectorPair::spd1_spd2).rate_cps;
    }
    const double mean =
        std::accumulate(rates.begin(), rates.end(), 0.0) / rates.size();
    double var = 0.0;
    for (double x : rates) var += (x - mean) * (x - mean);
    const double stderr_mean =
        std::sqrt(var / (rates.size() - 1) / rates.size());
    if (std::abs(mean) >= 3.0 * stderr_mean) {
      ok = false;
      failure = "accidental subtraction mean " + fmt(mean, 4) + " cps vs 3se " +
                fmt(3.0 * stderr_mean, 4);
    }
  }

  // bit-exact determinism
  if (ok) {
    SourceSpec src = config.source;
    const auto& det = config.detectors;
    const CountRecord a = simulate_counts(src, det, {0.3, 0.7}, 150000, 123);
    const CountRecord b = simulate_counts(src, det, {0.3, 0.7}, 150000, 123);
    if (a.singles != b.singles || a.coinc_same_pulse != b.coinc_same_pulse ||
        a.coinc_adjacent_pulse != b.coinc_adjacent_pulse) {
      ok = false;
      failure = "determinism";
    }
  }

  Criterion r;
  r.pass = ok;
  r.detail = ok ? "normalization, flat marginals, probability sums, phase "
                  "magnitudes, accidental zero-mean, bit-exact determinism"
                : failure;
  return r;
}

}  // namespace

int main() {
  const RunConfig config = RunConfig::load(SPFL_FIXTURE_CONFIG);

  struct Entry {
    const char* name;
    std::function<Criterion(const RunConfig&)> run;
  };
  const std::vector<Entry> entries{
      {"criterion-1 fringe roots", criterion_roots},
      {"criterion-2 beta2 consistency", criterion_beta2},
      {"criterion-3 fit recovery", criterion_fit},
      {"criterion-4 routing contrast", criterion_contrast},
      {"criterion-5 monte carlo vs analytic", criterion_montecarlo},
      {"criterion-6 power law", criterion_power},
      {"criterion-7 property suite", criterion_properties},
  };

  int failures = 0;
  for (const Entry& entry : entries) {
    Criterion result;
    try {
      result = entry.run(config);
    } catch (const std::exception& e) {
      result.pass = false;
      result.detail = std::string("exception: ") + e.what();
    }
    std::printf("%s %s: %s\n", result.pass ? "PASS" : "FAIL", entry.name,
                result.detail.c_str());
    std::fflush(stdout);
    if (!result.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
