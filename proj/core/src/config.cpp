#include "vt25d/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>

#include "vt25d/analysis.hpp"
#include "vt25d/error.hpp"

namespace vt25 {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size()) {
    throw ValidationError("config key '" + key + "': expected a number, got '" + v + "'");
  }
  return out;
}

template <typename Int>
Int to_int(const std::string& key, const std::string& v) {
  Int out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size()) {
    throw ValidationError("config key '" + key + "': expected an integer, got '" + v + "'");
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "on" || v == "true" || v == "1" || v == "yes") return true;
  if (v == "off" || v == "false" || v == "0" || v == "no") return false;
  throw ValidationError("config key '" + key + "': expected on/off, got '" + v + "'");
}

std::optional<double> to_auto(const std::string& key, const std::string& v) {
  if (v == "auto") return std::nullopt;
  return to_double(key, v);
}

std::string fmt(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;
using Getter = std::function<std::string(const RunConfig&)>;
struct Field {
  const char* key;
  Setter set;
  Getter get;
};

#define VT25_DOUBLE(name, member)                                                          \
  Field {                                                                                  \
    name, [](RunConfig& c, const std::string& k, const std::string& v) {                   \
      c.member = to_double(k, v);                                                          \
    },                                                                                     \
        [](const RunConfig& c) { return fmt(c.member); }                                   \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> f = {
      {"area_function",
       [](RunConfig& c, const std::string&, const std::string& v) { c.area_function = v; },
       [](const RunConfig& c) { return c.area_function.string(); }},
      VT25_DOUBLE("ds", ds),
      {"nx", [](RunConfig& c, const std::string& k, const std::string& v) { c.nx = to_int<int>(k, v); },
       [](const RunConfig& c) { return std::to_string(c.nx); }},
      {"ny", [](RunConfig& c, const std::string& k, const std::string& v) { c.ny = to_int<int>(k, v); },
       [](const RunConfig& c) { return std::to_string(c.ny); }},
      {"dt", [](RunConfig& c, const std::string& k, const std::string& v) { c.dt = to_auto(k, v); },
       [](const RunConfig& c) { return c.dt ? fmt(*c.dt) : std::string("auto"); }},
      VT25_DOUBLE("duration", duration),
      VT25_DOUBLE("c", c),
      VT25_DOUBLE("rho", rho),
      VT25_DOUBLE("mu", mu),
      VT25_DOUBLE("mic_offset", mic_offset),
      {"pulse_length",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.pulse.length = to_int<std::int64_t>(k, v);
       },
       [](const RunConfig& c) { return std::to_string(c.pulse.length); }},
      VT25_DOUBLE("pulse_low_cut", pulse.low_cut),
      VT25_DOUBLE("pulse_high_cut", pulse.high_cut),
      VT25_DOUBLE("pulse_amplitude", pulse.amplitude),
      {"wall_form",
       [](RunConfig& c, const std::string&, const std::string& v) { c.wall_form = parse_wall_form(v); },
       [](const RunConfig& c) { return to_string(c.wall_form); }},
      {"scaling",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.scaling = to_bool(k, v); },
       [](const RunConfig& c) { return std::string(c.scaling ? "on" : "off"); }},
      {"workers",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.workers = to_int<int>(k, v); },
       [](const RunConfig& c) { return std::to_string(c.workers); }},
      {"output_dir",
       [](RunConfig& c, const std::string&, const std::string& v) { c.output_dir = v; },
       [](const RunConfig& c) { return c.output_dir.string(); }},
      {"min_depth",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.min_depth = to_auto(k, v); },
       [](const RunConfig& c) { return c.min_depth ? fmt(*c.min_depth) : std::string("auto"); }},
      VT25_DOUBLE("open_space_depth", open_space_depth),
      {"diagnostics_interval",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.diagnostics_interval = to_int<std::int64_t>(k, v);
       },
       [](const RunConfig& c) { return std::to_string(c.diagnostics_interval); }},
      {"fft_size",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.fft_size = to_int<std::size_t>(k, v);
       },
       [](const RunConfig& c) { return std::to_string(c.fft_size); }},
      {"deconvolve",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.deconvolve = to_bool(k, v); },
       [](const RunConfig& c) { return std::string(c.deconvolve ? "on" : "off"); }},
      {"formant_count",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.formant_count = to_int<std::size_t>(k, v);
       },
       [](const RunConfig& c) { return std::to_string(c.formant_count); }},
      VT25_DOUBLE("f_min", f_min),
      VT25_DOUBLE("f_max", f_max),
      VT25_DOUBLE("oracle_segment", oracle_segment),
      VT25_DOUBLE("wav_rate", wav_rate),
  };
  return f;
}

#undef VT25_DOUBLE

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
  for (const auto& f : fields()) {
    if (key == f.key) {
      f.set(*this, key, value);
      return;
    }
  }
  throw ValidationError("unknown config key '" + key + "'");
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& f : fields()) keys.emplace_back(f.key);
  return keys;
}

void RunConfig::validate() const {
  auto positive = [](double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(std::string(what) + " must be > 0");
  };
  positive(ds, "ds");
  grid().validate();
  if (dt) positive(*dt, "dt");
  positive(duration, "duration");
  constants().validate();
  positive(mic_offset, "mic_offset");
  if (mic_offset < ds) throw ValidationError("mic_offset must be at least one cell (ds)");
  if (pulse.length < 1) throw ValidationError("pulse_length must be >= 1");
  if (!(pulse.low_cut >= 0.0 && pulse.low_cut < pulse.high_cut)) {
    throw ValidationError("pulse band must satisfy 0 <= low_cut < high_cut");
  }
  if (workers < 1) throw ValidationError("workers must be >= 1");
  if (min_depth) positive(*min_depth, "min_depth");
  positive(open_space_depth, "open_space_depth");
  if (diagnostics_interval < 1) throw ValidationError("diagnostics_interval must be >= 1");
  if (!is_power_of_two(fft_size)) throw ValidationError("fft_size must be a power of two");
  if (formant_count < 1) throw ValidationError("formant_count must be >= 1");
  if (!(f_min >= 0.0 && f_min < f_max)) throw ValidationError("need 0 <= f_min < f_max");
  positive(oracle_segment, "oracle_segment");
  positive(wav_rate, "wav_rate");
}

RunConfig parse_config(std::istream& in) {
  RunConfig config;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected 'key = value'", line_no);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      config.set(key, value);
    } catch (const ParseError&) {
      throw;
    } catch (const ValidationError& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path.string());
  RunConfig config = parse_config(in);
  const auto base = path.parent_path();
  if (!config.area_function.empty() && config.area_function.is_relative()) {
    config.area_function = base / config.area_function;
  }
  return config;
}

void save_config(std::ostream& out, const RunConfig& config) {
  out << "# vt25d run configuration\n";
  for (const auto& f : fields()) out << f.key << " = " << f.get(config) << '\n';
}

}  // namespace vt25
