#include <spfl/config.hpp>

#include <spfl/csv.hpp>
#include <spfl/errors.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string_view>

namespace spfl {

namespace {

struct RawEntry {
  std::string value;
  std::size_t line = 0;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
    s.remove_prefix(1);
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::map<std::string, RawEntry> read_entries(std::istream& in,
                                             const std::string& name) {
  std::map<std::string, RawEntry> entries;
  std::string section;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    std::string_view view = line;
    const std::size_t hash = view.find('#');
    if (hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    if (view.front() == '[') {
      if (view.back() != ']')
        throw ConfigError(name + ":" + std::to_string(line_number) +
                          ": malformed section header");
      section = std::string(trim(view.substr(1, view.size() - 2)));
      continue;
    }
    const std::size_t eq = view.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(name + ":" + std::to_string(line_number) +
                        ": expected key = value");
    const std::string key =
        section + "." + std::string(trim(view.substr(0, eq)));
    if (entries.count(key))
      throw ConfigError(name + ":" + std::to_string(line_number) +
                        ": duplicate key '" + key + "'");
    entries[key] = {std::string(trim(view.substr(eq + 1))), line_number};
  }
  return entries;
}

class Reader {
 public:
  Reader(std::map<std::string, RawEntry> entries, std::string name)
      : entries_(std::move(entries)), name_(std::move(name)) {}

  void get(const std::string& key, double& out) {
    take(key, [&](const RawEntry& e) { out = parse_double(e, key); });
  }
  void get(const std::string& key, std::uint64_t& out) {
    take(key, [&](const RawEntry& e) {
      out = parse_integral<std::uint64_t>(e, key);
    });
  }
  void get(const std::string& key, int& out) {
    take(key, [&](const RawEntry& e) { out = parse_integral<int>(e, key); });
  }
  void get(const std::string& key, bool& out) {
    take(key, [&](const RawEntry& e) {
      if (e.value == "true")
        out = true;
      else if (e.value == "false")
        out = false;
      else
        fail(e, key, "expected true or false");
    });
  }
  void get(const std::string& key, FilterShape& out) {
    take(key, [&](const RawEntry& e) {
      if (e.value == "rectangular")
        out = FilterShape::rectangular;
      else if (e.value == "gaussian")
        out = FilterShape::gaussian;
      else
        fail(e, key, "expected rectangular or gaussian");
    });
  }

  void finish() const {
    if (entries_.empty()) return;
    const auto& [key, entry] = *entries_.begin();
    throw ConfigError(name_ + ":" + std::to_string(entry.line) +
                      ": unknown key '" + key + "'");
  }

 private:
  template <typename F>
  void take(const std::string& key, F&& parse) {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return;  // keep the struct default
    parse(it->second);
    entries_.erase(it);
  }

  [[noreturn]] void fail(const RawEntry& e, const std::string& key,
                         const std::string& what) const {
    throw ConfigError(name_ + ":" + std::to_string(e.line) + ": key '" + key +
                      "': " + what);
  }

  double parse_double(const RawEntry& e, const std::string& key) const {
    double value = 0.0;
    const char* begin = e.value.data();
    const char* end = begin + e.value.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end) fail(e, key, "bad numeric value");
    return value;
  }

  template <typename T>
  T parse_integral(const RawEntry& e, const std::string& key) const {
    T value{};
    const char* begin = e.value.data();
    const char* end = begin + e.value.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end) fail(e, key, "bad integer value");
    return value;
  }

  std::map<std::string, RawEntry> entries_;
  std::string name_;
};

void read_fiber(Reader& reader, const std::string& prefix, FiberSpec& fiber) {
  reader.get(prefix + "_length_m", fiber.length_m);
  reader.get(prefix + "_lambda_ref_nm", fiber.lambda_ref_nm);
  reader.get(prefix + "_beta1_ps_per_m", fiber.beta1_ps_per_m);
  reader.get(prefix + "_beta2_ps2_per_m", fiber.beta2_ps2_per_m);
  reader.get(prefix + "_beta3_ps3_per_m", fiber.beta3_ps3_per_m);
}

void read_filter(Reader& reader, const std::string& prefix,
                 FilterSpec& filter) {
  reader.get(prefix + "_center_nm", filter.center_nm);
  reader.get(prefix + "_fwhm_nm", filter.fwhm_nm);
  reader.get(prefix + "_shape", filter.shape);
}

void read_detector(Reader& reader, const std::string& section,
                   DetectorSpec& det) {
  reader.get(section + ".efficiency", det.efficiency);
  reader.get(section + ".dark_prob_per_gate", det.dark_prob);
  reader.get(section + ".gate_width_ns", det.gate_width_ns);
  reader.get(section + ".dead_time_us", det.dead_time_us);
}

void write_fiber(std::ostream& out, const std::string& prefix,
                 const FiberSpec& fiber) {
  out << prefix << "_length_m = " << format_double(fiber.length_m) << '\n'
      << prefix << "_lambda_ref_nm = " << format_double(fiber.lambda_ref_nm)
      << '\n'
      << prefix << "_beta1_ps_per_m = " << format_double(fiber.beta1_ps_per_m)
      << '\n'
      << prefix
      << "_beta2_ps2_per_m = " << format_double(fiber.beta2_ps2_per_m) << '\n'
      << prefix
      << "_beta3_ps3_per_m = " << format_double(fiber.beta3_ps3_per_m) << '\n';
}

const char* shape_name(FilterShape shape) {
  return shape == FilterShape::rectangular ? "rectangular" : "gaussian";
}

void write_filter(std::ostream& out, const std::string& prefix,
                  const FilterSpec& filter) {
  out << prefix << "_center_nm = " << format_double(filter.center_nm) << '\n'
      << prefix << "_fwhm_nm = " << format_double(filter.fwhm_nm) << '\n'
      << prefix << "_shape = " << shape_name(filter.shape) << '\n';
}

void write_detector(std::ostream& out, const std::string& section,
                    const DetectorSpec& det) {
  out << '[' << section << "]\n"
      << "efficiency = " << format_double(det.efficiency) << '\n'
      << "dark_prob_per_gate = " << format_double(det.dark_prob) << '\n'
      << "gate_width_ns = " << format_double(det.gate_width_ns) << '\n'
      << "dead_time_us = " << format_double(det.dead_time_us) << "\n\n";
}

}  // namespace

void RunConfig::validate() const {
  loop.validate();
  spectral.validate();
  source.validate();
  for (const DetectorSpec& det : detectors) det.validate();
  if (!(grid_step_nm > 0.0))
    throw ConfigError("grid_step_nm must be > 0");
  if (!(grid_start_nm > 0.0) || !(grid_stop_nm >= grid_start_nm))
    throw ConfigError("grid range must satisfy 0 < start <= stop");
}

RunConfig RunConfig::parse(std::istream& in, const std::string& name) {
  Reader reader(read_entries(in, name), name);
  RunConfig config;

  read_fiber(reader, "loop.nlf", config.loop.nlf);
  read_fiber(reader, "loop.smf1", config.loop.smf1);
  read_fiber(reader, "loop.smf2", config.loop.smf2);
  reader.get("loop.coupler_ratio", config.loop.coupler_ratio);
  reader.get("loop.phi_p1_rad", config.loop.phi_p1_rad);
  reader.get("loop.phi_p2_rad", config.loop.phi_p2_rad);

  reader.get("spectral.lambda_p0_nm", config.spectral.lambda_p0_nm);
  read_filter(reader, "spectral.pump_filter", config.spectral.pump_filter);
  read_filter(reader, "spectral.signal_filter", config.spectral.signal_filter);
  read_filter(reader, "spectral.idler_filter", config.spectral.idler_filter);
  reader.get("spectral.alpha_ps2", config.spectral.alpha_ps2);
  reader.get("spectral.xi_same_cps", config.spectral.xi_same_cps);
  reader.get("spectral.xi_diff_cps", config.spectral.xi_diff_cps);

  reader.get("source.mu_pairs_per_gate", config.source.mu);
  reader.get("source.pump_power_mw", config.source.pump_power_mw);
  reader.get("source.power_ref_mw", config.source.power_ref_mw);
  reader.get("source.gate_rate_hz", config.source.gate_rate_hz);
  reader.get("source.rep_divisor", config.source.rep_divisor);

  read_detector(reader, "spd1", config.detectors[0]);
  read_detector(reader, "spd2", config.detectors[1]);
  read_detector(reader, "spd3", config.detectors[2]);

  reader.get("run.seed", config.seed);
  reader.get("run.n_gates", config.n_gates);
  reader.get("run.grid_start_nm", config.grid_start_nm);
  reader.get("run.grid_stop_nm", config.grid_stop_nm);
  reader.get("run.grid_step_nm", config.grid_step_nm);
  reader.get("run.bandwidth_averaged", config.bandwidth_averaged);

  reader.finish();
  try {
    config.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(name + ": " + e.what());
  }
  return config;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  return parse(in, path);
}

void RunConfig::save(std::ostream& out) const {
  out << "[loop]\n";
  write_fiber(out, "nlf", loop.nlf);
  write_fiber(out, "smf1", loop.smf1);
  write_fiber(out, "smf2", loop.smf2);
  out << "coupler_ratio = " << format_double(loop.coupler_ratio) << '\n'
      << "phi_p1_rad = " << format_double(loop.phi_p1_rad) << '\n'
      << "phi_p2_rad = " << format_double(loop.phi_p2_rad) << "\n\n";

  out << "[spectral]\n"
      << "lambda_p0_nm = " << format_double(spectral.lambda_p0_nm) << '\n';
  write_filter(out, "pump_filter", spectral.pump_filter);
  write_filter(out, "signal_filter", spectral.signal_filter);
  write_filter(out, "idler_filter", spectral.idler_filter);
  out << "alpha_ps2 = " << format_double(spectral.alpha_ps2) << '\n'
      << "xi_same_cps = " << format_double(spectral.xi_same_cps) << '\n'
      << "xi_diff_cps = " << format_double(spectral.xi_diff_cps) << "\n\n";

  out << "[source]\n"
      << "mu_pairs_per_gate = " << format_double(source.mu) << '\n'
      << "pump_power_mw = " << format_double(source.pump_power_mw) << '\n'
      << "power_ref_mw = " << format_double(source.power_ref_mw) << '\n'
      << "gate_rate_hz = " << format_double(source.gate_rate_hz) << '\n'
      << "rep_divisor = " << source.rep_divisor << "\n\n";

  write_detector(out, "spd1", detectors[0]);
  write_detector(out, "spd2", detectors[1]);
  write_detector(out, "spd3", detectors[2]);

  out << "[run]\n"
      << "seed = " << seed << '\n'
      << "n_gates = " << n_gates << '\n'
      << "grid_start_nm = " << format_double(grid_start_nm) << '\n'
      << "grid_stop_nm = " << format_double(grid_stop_nm) << '\n'
      << "grid_step_nm = " << format_double(grid_step_nm) << '\n'
      << "bandwidth_averaged = " << (bandwidth_averaged ? "true" : "false")
      << '\n';
}

void RunConfig::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  save(out);
  out.flush();
  if (!out) throw IoError("write to '" + path + "' failed");
}

std::vector<double> make_grid(double start, double stop, double step) {
  std::vector<double> grid;
  if (!(step > 0.0) || !(stop >= start) || !std::isfinite(start) ||
      !std::isfinite(stop))
    return grid;
  const double end_tol = stop + step * 1e-9;
  for (std::size_t i = 0;; ++i) {
    const double value = start + static_cast<double>(i) * step;
    if (value > end_tol) break;
    grid.push_back(value);
  }
  return grid;
}

}  // namespace spfl
