#include <spfl/csv.hpp>

#include <spfl/errors.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string_view>

namespace spfl {

namespace {

constexpr std::string_view kSweepHeader =
    "delta_lambda_nm,ct_same,ct_diff,err_same,err_diff";
constexpr std::string_view kSweepHeaderSingles =
    "delta_lambda_nm,ct_same,ct_diff,err_same,err_diff,rs_spd1,rs_spd2,rs_spd3";

double parse_field(std::string_view field, std::size_t line_number) {
  if (field == "nan") return std::numeric_limits<double>::quiet_NaN();
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end)
    throw CsvParseError(line_number,
                        "bad numeric field '" + std::string(field) + "'");
  return value;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

void finish_write(std::ostream& out, const std::string& path) {
  out.flush();
  if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  char buf[40];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

void write_sweep_csv(std::ostream& out, const SweepCurve& curve) {
  out << (curve.has_singles ? kSweepHeaderSingles : kSweepHeader) << '\n';
  for (const SweepPoint& p : curve.points) {
    out << format_double(p.delta_lambda_nm) << ',' << format_double(p.ct_same)
        << ',' << format_double(p.ct_diff) << ',' << format_double(p.err_same)
        << ',' << format_double(p.err_diff);
    if (curve.has_singles)
      out << ',' << format_double(p.rs_spd1) << ',' << format_double(p.rs_spd2)
          << ',' << format_double(p.rs_spd3);
    out << '\n';
  }
}

void write_sweep_csv(const std::string& path, const SweepCurve& curve) {
  std::ofstream out = open_for_write(path);
  write_sweep_csv(out, curve);
  finish_write(out, path);
}

SweepCurve read_sweep_csv(std::istream& in, const std::string& name) {
  std::string line;
  if (!std::getline(in, line))
    throw CsvParseError(1, "empty file '" + name + "'");
  const std::string_view header = strip_cr(line);
  bool has_singles = false;
  if (header == kSweepHeaderSingles)
    has_singles = true;
  else if (header != kSweepHeader)
    throw CsvParseError(1, "unrecognized header '" + std::string(header) + "'");

  SweepCurve curve;
  curve.has_singles = has_singles;
  std::size_t line_number = 1;
  const std::size_t expected = has_singles ? 8 : 5;
  while (std::getline(in, line)) {
    ++line_number;
    const std::string_view row = strip_cr(line);
    if (row.empty()) continue;
    const std::vector<std::string_view> fields = split_fields(row);
    if (fields.size() != expected)
      throw CsvParseError(line_number,
                          "expected " + std::to_string(expected) +
                              " fields, got " + std::to_string(fields.size()));
    SweepPoint p;
    p.delta_lambda_nm = parse_field(fields[0], line_number);
    p.ct_same = parse_field(fields[1], line_number);
    p.ct_diff = parse_field(fields[2], line_number);
    p.err_same = parse_field(fields[3], line_number);
    p.err_diff = parse_field(fields[4], line_number);
    if (has_singles) {
      p.rs_spd1 = parse_field(fields[5], line_number);
      p.rs_spd2 = parse_field(fields[6], line_number);
      p.rs_spd3 = parse_field(fields[7], line_number);
    }
    if (!curve.points.empty() &&
        !(p.delta_lambda_nm > curve.points.back().delta_lambda_nm))
      throw CsvParseError(line_number,
                          "detuning must be strictly increasing");
    curve.points.push_back(p);
  }
  return curve;
}

SweepCurve read_sweep_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return read_sweep_csv(in, path);
}

void write_switching_csv(std::ostream& out, const SwitchingTable& table) {
  out << "n,delta_lambda_diff_nm,delta_lambda_same_nm\n";
  for (const SwitchingRow& row : table.rows) {
    out << row.n << ',' << format_double(row.delta_lambda_diff_nm) << ','
        << format_double(row.delta_lambda_same_nm) << '\n';
  }
}

void write_switching_csv(const std::string& path, const SwitchingTable& table) {
  std::ofstream out = open_for_write(path);
  write_switching_csv(out, table);
  finish_write(out, path);
}

void write_power_csv(std::ostream& out, const std::vector<PowerPoint>& points) {
  out << "power_mw,ct_same,ct_diff,err_same,err_diff\n";
  for (const PowerPoint& p : points) {
    out << format_double(p.power_mw) << ',' << format_double(p.same.rate_cps)
        << ',' << format_double(p.diff.rate_cps) << ','
        << format_double(p.same.error_cps) << ','
        << format_double(p.diff.error_cps) << '\n';
  }
}

void write_power_csv(const std::string& path,
                     const std::vector<PowerPoint>& points) {
  std::ofstream out = open_for_write(path);
  write_power_csv(out, points);
  finish_write(out, path);
}

}  // namespace spfl
