#include <spfl/commands.hpp>

#include <spfl/config.hpp>
#include <spfl/csv.hpp>
#include <spfl/design.hpp>
#include <spfl/detection.hpp>
#include <spfl/errors.hpp>

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>

namespace spfl {

namespace {

int run_guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIoFailure;
  } catch (const FitDegenerate& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumericalFailure;
  } catch (const FitNotConverged& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumericalFailure;
  } catch (const RootNotBracketed& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumericalFailure;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalidInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumericalFailure;
  }
}

double parse_number(std::string_view text, const std::string& what) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end)
    throw std::invalid_argument("bad " + what + " '" + std::string(text) + "'");
  return value;
}

std::vector<double> parse_grid_spec(const std::string& spec) {
  const std::size_t c1 = spec.find(':');
  const std::size_t c2 = spec.find(':', c1 == std::string::npos ? 0 : c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos)
    throw std::invalid_argument("grid must be start:stop:step, got '" + spec +
                                "'");
  const double start = parse_number(spec.substr(0, c1), "grid start");
  const double stop = parse_number(spec.substr(c1 + 1, c2 - c1 - 1), "grid stop");
  const double step = parse_number(spec.substr(c2 + 1), "grid step");
  return make_grid(start, stop, step);
}

std::vector<double> sweep_grid(const RunConfig& config,
                               const SweepOptions& options) {
  const std::vector<double> grid =
      options.grid ? parse_grid_spec(*options.grid)
                   : make_grid(config.grid_start_nm, config.grid_stop_nm,
                               config.grid_step_nm);
  if (grid.empty()) throw std::invalid_argument("empty sweep grid");
  for (double dl : grid)
    if (!(dl > 0.0) || !(dl < 0.5 * config.spectral.lambda_p0_nm))
      throw std::invalid_argument(
          "grid detunings must lie inside (0, lambda_p0 / 2)");
  return grid;
}

// Default operating point for power sweeps: the first different-port
// switching detuning |phi_d| = pi.
double default_power_detuning(const SpectralConfig& spectral) {
  const double seed_omega =
      std::sqrt(std::numbers::pi / std::abs(spectral.alpha_ps2));
  const double seed = omega_to_detuning(seed_omega, spectral.lambda_p0_nm);
  return fringe_argument_root(spectral, std::numbers::pi, 0.9 * seed,
                              1.1 * seed);
}

FitParams default_fit_init(const SweepCurve& data) {
  double max_same = 0.0, max_diff = 0.0;
  for (const SweepPoint& p : data.points) {
    max_same = std::max(max_same, p.ct_same);
    max_diff = std::max(max_diff, p.ct_diff);
  }
  // Half the branch maximum approximates xi; alpha starts at a generic
  // G.652-loop scale and is refined by the fit.
  return {0.5 * max_same, 0.5 * max_diff, 0.04};
}

}  // namespace

int cmd_sweep(const SweepOptions& options) {
  return run_guarded([&]() {
    RunConfig config = RunConfig::load(options.config_path);
    const std::vector<double> grid = sweep_grid(config, options);
    const std::uint64_t seed = options.seed.value_or(config.seed);
    const std::uint64_t n_gates = options.n_gates.value_or(config.n_gates);

    SweepCurve curve;
    if (options.monte_carlo) {
      curve = sweep_experiment(config.spectral, config.source,
                               config.detectors, grid, n_gates, seed,
                               config.bandwidth_averaged);
      SourceSpec source = config.source;
      if (source.effective_mu() > 0.5)
        std::cerr << "warning: mu_eff = " << format_double(source.effective_mu())
                  << " > 0.5; multi-pair statistics are outside the model's "
                     "comfort zone\n";
    } else {
      curve.has_singles = false;
      curve.points.reserve(grid.size());
      for (double dl : grid) {
        SweepPoint point;
        point.delta_lambda_nm = dl;
        point.ct_same =
            bandwidth_averaged_fringe(config.spectral, dl, Branch::same);
        point.ct_diff =
            bandwidth_averaged_fringe(config.spectral, dl, Branch::diff);
        curve.points.push_back(point);
      }
    }
    write_sweep_csv(options.out_path, curve);
    std::cout << "wrote " << options.out_path << " (" << curve.points.size()
              << " points, " << (options.monte_carlo ? "monte-carlo" : "analytic")
              << ")\n";
    return kExitOk;
  });
}

int cmd_fit(const FitOptions& options) {
  return run_guarded([&]() {
    const SweepCurve data = read_sweep_csv(options.data_path);
    const FitParams init = options.init.value_or(default_fit_init(data));
    const FitResult fit =
        fit_fringe(data, init, options.lambda_p0_nm);

    std::cout << "xi_same_cps = " << format_double(fit.params.xi_same) << '\n'
              << "xi_diff_cps = " << format_double(fit.params.xi_diff) << '\n'
              << "alpha_ps2 = " << format_double(fit.params.alpha_ps2) << '\n'
              << "residual_sum_sq = " << format_double(fit.residual_sum_sq)
              << '\n'
              << "iterations = " << fit.iterations << '\n';

    nlohmann::json report{
        {"xi_same_cps", fit.params.xi_same},
        {"xi_diff_cps", fit.params.xi_diff},
        {"alpha_ps2", fit.params.alpha_ps2},
        {"residual_sum_sq", fit.residual_sum_sq},
        {"iterations", fit.iterations},
        {"converged", fit.converged},
        {"n_points", data.points.size()},
        {"lambda_p0_nm", options.lambda_p0_nm},
    };
    std::ofstream out(options.report_path);
    if (!out)
      throw IoError("cannot open '" + options.report_path + "' for writing");
    out << report.dump(2) << '\n';
    out.flush();
    if (!out) throw IoError("write to '" + options.report_path + "' failed");
    return kExitOk;
  });
}

int cmd_design(const DesignOptions& options) {
  return run_guarded([&]() {
    if (options.n_max < 0)
      throw std::invalid_argument("n-max must be >= 0");
    RunConfig config = RunConfig::load(options.config_path);
    const SwitchingTable table = switching_table(
        config.loop.smf1.beta2_ps2_per_m, config.loop.smf1.length_m,
        config.loop.smf2.length_m, config.spectral.lambda_p0_nm,
        options.n_max);
    write_switching_csv(options.out_path, table);
    std::cout << "wrote " << options.out_path << " (" << table.rows.size()
              << " rows)\n";
    return kExitOk;
  });
}

int cmd_power(const PowerOptions& options) {
  return run_guarded([&]() {
    RunConfig config = RunConfig::load(options.config_path);
    const std::uint64_t seed = options.seed.value_or(config.seed);
    const std::uint64_t n_gates = options.n_gates.value_or(config.n_gates);
    std::vector<PowerPoint> points;
    if (!options.powers_mw.empty()) {
      const double detuning = options.delta_lambda_nm.value_or(
          default_power_detuning(config.spectral));
      const double cos_phase =
          config.bandwidth_averaged
              ? averaged_cos_phase(config.spectral, detuning)
              : std::cos(fringe_argument(config.spectral, detuning));
      const RoutingProbabilities routing{0.5 * (1.0 + cos_phase),
                                         0.5 * (1.0 - cos_phase)};
      points = power_sweep(config.source, config.detectors, routing,
                           options.powers_mw, n_gates, seed);
    }
    write_power_csv(options.out_path, points);
    std::cout << "wrote " << options.out_path << " (" << points.size()
              << " points)\n";
    return kExitOk;
  });
}

}  // namespace spfl
