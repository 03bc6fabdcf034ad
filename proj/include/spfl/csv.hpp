#pragma once

#include <spfl/design.hpp>
#include <spfl/detection.hpp>
#include <spfl/spectral.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace spfl {

// All CSV output uses '.' as decimal separator regardless of locale and
// shortest round-trip formatting, so reruns are byte-identical.
std::string format_double(double value);

// Header: delta_lambda_nm,ct_same,ct_diff,err_same,err_diff
// plus rs_spd1,rs_spd2,rs_spd3 when the curve carries singles.
void write_sweep_csv(std::ostream& out, const SweepCurve& curve);
void write_sweep_csv(const std::string& path, const SweepCurve& curve);

// Accepts both header variants; throws CsvParseError with the offending
// 1-based line number on malformed input, IoError when the file is missing.
SweepCurve read_sweep_csv(std::istream& in, const std::string& name);
SweepCurve read_sweep_csv(const std::string& path);

// Header: n,delta_lambda_diff_nm,delta_lambda_same_nm. Unreachable entries
// are written as nan rather than dropped.
void write_switching_csv(std::ostream& out, const SwitchingTable& table);
void write_switching_csv(const std::string& path, const SwitchingTable& table);

// Header: power_mw,ct_same,ct_diff,err_same,err_diff
void write_power_csv(std::ostream& out, const std::vector<PowerPoint>& points);
void write_power_csv(const std::string& path,
                     const std::vector<PowerPoint>& points);

}  // namespace spfl
