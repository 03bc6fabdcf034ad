#include <spfl/commands.hpp>
#include <spfl/spectral.hpp>

#include <CLI11.hpp>

#include <charconv>
#include <iostream>
#include <string>
#include <vector>

namespace {

std::vector<double> parse_csv_doubles(const std::string& text) {
  std::vector<double> values;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string field =
        text.substr(start, comma == std::string::npos ? std::string::npos
                                                      : comma - start);
    double value = 0.0;
    auto [ptr, ec] =
        std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size())
      throw CLI::ValidationError("bad number '" + field + "'");
    values.push_back(value);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return values;
}

spfl::FitParams parse_init(const std::string& text) {
  const std::vector<double> v = parse_csv_doubles(text);
  if (v.size() != 3)
    throw CLI::ValidationError("--init expects xi_same,xi_diff,alpha");
  return {v[0], v[1], v[2]};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "spfl: dispersion-managed Sagnac-loop photon-pair router toolkit"};
  app.require_subcommand(1);

  spfl::SweepOptions sweep;
  bool analytic_flag = false;
  CLI::App* sweep_cmd = app.add_subcommand(
      "sweep", "detuning sweep of the true-coincidence fringe (CSV)");
  sweep_cmd->add_option("--config", sweep.config_path, "run configuration file")
      ->required();
  sweep_cmd->add_option("--out", sweep.out_path, "output CSV path")->required();
  CLI::Option* opt_analytic = sweep_cmd->add_flag(
      "--analytic", analytic_flag, "bandwidth-averaged model (default)");
  sweep_cmd->add_flag("--montecarlo", sweep.monte_carlo,
                      "gated counting experiment")
      ->excludes(opt_analytic);
  std::string grid_spec;
  CLI::Option* opt_grid = sweep_cmd->add_option(
      "--grid", grid_spec, "detuning grid start:stop:step in nm");
  std::uint64_t seed_value = 0, gates_value = 0;
  CLI::Option* opt_seed =
      sweep_cmd->add_option("--seed", seed_value, "override run.seed");
  CLI::Option* opt_gates =
      sweep_cmd->add_option("--gates", gates_value, "override run.n_gates");

  spfl::FitOptions fit;
  std::string init_spec;
  CLI::App* fit_cmd =
      app.add_subcommand("fit", "least-squares fit of a sweep CSV");
  fit_cmd->add_option("--data", fit.data_path, "sweep CSV to fit")->required();
  CLI::Option* opt_init = fit_cmd->add_option(
      "--init", init_spec, "initial xi_same,xi_diff,alpha");
  fit_cmd->add_option("--report", fit.report_path,
                      "JSON report path (default fit_report.json)");
  fit_cmd->add_option("--lambda-p0", fit.lambda_p0_nm,
                      "pump center wavelength in nm");

  spfl::DesignOptions design;
  CLI::App* design_cmd = app.add_subcommand(
      "design", "switching-detuning table for n = 0..n-max (CSV)");
  design_cmd->add_option("--config", design.config_path, "run configuration file")
      ->required();
  design_cmd->add_option("--out", design.out_path, "output CSV path")
      ->required();
  design_cmd->add_option("--n-max", design.n_max, "highest fringe order");

  spfl::PowerOptions power;
  std::string powers_spec;
  double power_detuning = 0.0;
  CLI::App* power_cmd = app.add_subcommand(
      "power", "pump-power scan of the true coincidences (CSV)");
  power_cmd->add_option("--config", power.config_path, "run configuration file")
      ->required();
  power_cmd->add_option("--out", power.out_path, "output CSV path")->required();
  power_cmd->add_option("--powers", powers_spec,
                        "comma-separated pump powers in mW")
      ->required();
  CLI::Option* opt_detuning = power_cmd->add_option(
      "--detuning", power_detuning,
      "operating detuning in nm (default: the |phi_d| = pi point)");
  CLI::Option* opt_pseed =
      power_cmd->add_option("--seed", seed_value, "override run.seed");
  CLI::Option* opt_pgates =
      power_cmd->add_option("--gates", gates_value, "override run.n_gates");

  try {
    app.parse(argc, argv);

    if (sweep_cmd->parsed()) {
      if (*opt_grid) sweep.grid = grid_spec;
      if (*opt_seed) sweep.seed = seed_value;
      if (*opt_gates) sweep.n_gates = gates_value;
      return spfl::cmd_sweep(sweep);
    }
    if (fit_cmd->parsed()) {
      if (*opt_init) fit.init = parse_init(init_spec);
      return spfl::cmd_fit(fit);
    }
    if (design_cmd->parsed()) return spfl::cmd_design(design);
    if (power_cmd->parsed()) {
      power.powers_mw = parse_csv_doubles(powers_spec);
      if (*opt_detuning) power.delta_lambda_nm = power_detuning;
      if (*opt_pseed) power.seed = seed_value;
      if (*opt_pgates) power.n_gates = gates_value;
      return spfl::cmd_power(power);
    }
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? spfl::kExitOk : spfl::kExitInvalidInput;
  }
  return spfl::kExitInvalidInput;
}
