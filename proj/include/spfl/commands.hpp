#pragma once

#include <spfl/spectral.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace spfl {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalidInput = 1;
inline constexpr int kExitIoFailure = 2;
inline constexpr int kExitNumericalFailure = 3;

struct SweepOptions {
  std::string config_path;
  std::string out_path;
  bool monte_carlo = false;                // default: analytic model
  std::optional<std::string> grid;         // "start:stop:step" in nm
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> n_gates;
};

struct FitOptions {
  std::string data_path;
  std::optional<FitParams> init;           // defaults derived from the data
  std::string report_path = "fit_report.json";
  double lambda_p0_nm = 1547.5;
};

struct DesignOptions {
  std::string config_path;
  std::string out_path;
  int n_max = 2;
};

struct PowerOptions {
  std::string config_path;
  std::string out_path;
  std::vector<double> powers_mw;
  std::optional<double> delta_lambda_nm;   // default: the (2n+1)pi point, n=0
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> n_gates;
};

int cmd_sweep(const SweepOptions& options);
int cmd_fit(const FitOptions& options);
int cmd_design(const DesignOptions& options);
int cmd_power(const PowerOptions& options);

}  // namespace spfl
