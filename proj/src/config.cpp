#include <poldoa/config.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace poldoa {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size() || !std::isfinite(d)) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw Error("config: " + key + " expects a number, got '" + v + "'");
  }
}

long long to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long i = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return i;
  } catch (const std::exception&) {
    throw Error("config: " + key + " expects an integer, got '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw Error("config: " + key + " expects true/false, got '" + v + "'");
}

SensorKind parse_sensor(const std::string& s) {
  if (s == "tripole") return SensorKind::Tripole;
  if (s == "crossed-dipole" || s == "crossed_dipole") return SensorKind::CrossedDipole;
  throw Error("unknown sensor kind '" + s + "' (expected tripole or crossed-dipole)");
}

std::string layout_string(const ArrayGeometry& g) {
  if (const auto* l = std::get_if<LinearLayout>(&g.layout()))
    return "linear:" + std::to_string(l->elements);
  const auto& p = std::get<PlanarLayout>(g.layout());
  return "planar:" + std::to_string(p.rows) + "x" + std::to_string(p.cols);
}

}  // namespace

ArrayGeometry parse_geometry(const std::string& sensor, const std::string& layout, double spacing) {
  const SensorKind kind = parse_sensor(sensor);
  const auto colon = layout.find(':');
  if (colon == std::string::npos)
    throw Error("layout '" + layout + "' must be linear:N or planar:RxC");
  const std::string shape = layout.substr(0, colon), dims = layout.substr(colon + 1);
  if (shape == "linear")
    return ArrayGeometry::linear(kind, static_cast<int>(to_int("layout", dims)), spacing);
  if (shape == "planar") {
    const auto x = dims.find('x');
    if (x == std::string::npos) throw Error("planar layout '" + layout + "' must be planar:RxC");
    return ArrayGeometry::planar(kind, static_cast<int>(to_int("layout", dims.substr(0, x))),
                                 static_cast<int>(to_int("layout", dims.substr(x + 1))), spacing);
  }
  throw Error("layout '" + layout + "' must be linear:N or planar:RxC");
}

std::vector<SourceParams> parse_sources(const std::string& text) {
  std::vector<SourceParams> out;
  if (trim(text).empty()) return out;
  for (const auto& tuple : split(text, ';')) {
    if (tuple.empty()) continue;
    const auto parts = split(tuple, ',');
    if (parts.size() != 4)
      throw Error("source '" + tuple + "' must hold four angles theta,phi,gamma,eta (degrees)");
    const auto s = SourceParams::from_degrees(to_double("sources", parts[0]), to_double("sources", parts[1]),
                                              to_double("sources", parts[2]), to_double("sources", parts[3]));
    s.validate();
    out.push_back(s);
  }
  return out;
}

std::vector<double> ExperimentConfig::snr_points() const {
  std::vector<double> out;
  if (snr_step_db <= 0.0) return {snr_start_db};
  const int n = static_cast<int>(std::floor((snr_stop_db - snr_start_db) / snr_step_db + 1e-9));
  for (int i = 0; i <= n; ++i) out.push_back(snr_start_db + i * snr_step_db);
  return out;
}

int ExperimentConfig::num_signals() const {
  return signals ? *signals : static_cast<int>(sources.size());
}

void ExperimentConfig::validate() const {
  if (trials < 1) throw Error("config: trials must be >= 1");
  if (snapshots < 1) throw Error("config: snapshots must be >= 1");
  if (snr_step_db < 0.0) throw Error("config: snr_step must be >= 0");
  if (snr_stop_db < snr_start_db) throw Error("config: the SNR sweep is empty (snr_stop < snr_start)");
  if (!(grid.doa_step_deg > 0.0) || !(grid.pol_step_deg > 0.0))
    throw Error("config: grid steps must be positive");
  if (grid.refine_factor < 2) throw Error("config: refine_factor must be >= 2");
  if (methods.empty()) throw Error("config: at least one method is required");
  if (signals && *signals < 1) throw Error("config: signals must be >= 1");
  for (const auto& s : sources) s.validate();
}

void apply_config_key(ExperimentConfig& c, const std::string& key, const std::string& value) {
  auto geometry_key = [&](ArrayGeometry& g, const std::string& which) {
    std::string sensor = to_string(g.sensor_kind()), layout = layout_string(g);
    double spacing = g.spacing();
    if (which == "sensor") sensor = value;
    else if (which == "layout") layout = value;
    else spacing = to_double(key, value);
    g = parse_geometry(sensor, layout, spacing);
  };
  if (key == "geometry") geometry_key(c.geometry, "sensor");
  else if (key == "layout") geometry_key(c.geometry, "layout");
  else if (key == "spacing") geometry_key(c.geometry, "spacing");
  else if (key == "compare_geometry") geometry_key(c.compare_geometry, "sensor");
  else if (key == "compare_layout") geometry_key(c.compare_geometry, "layout");
  else if (key == "compare_spacing") geometry_key(c.compare_geometry, "spacing");
  else if (key == "sources") c.sources = parse_sources(value);
  else if (key == "signals") c.signals = static_cast<int>(to_int(key, value));
  else if (key == "snr_start") c.snr_start_db = to_double(key, value);
  else if (key == "snr_stop") c.snr_stop_db = to_double(key, value);
  else if (key == "snr_step") c.snr_step_db = to_double(key, value);
  else if (key == "noise_free") c.noise_free = to_bool(key, value);
  else if (key == "snapshots") c.snapshots = static_cast<int>(to_int(key, value));
  else if (key == "trials") c.trials = static_cast<int>(to_int(key, value));
  else if (key == "grid_step_doa") c.grid.doa_step_deg = to_double(key, value);
  else if (key == "grid_step_pol") c.grid.pol_step_deg = to_double(key, value);
  else if (key == "refine") c.grid.refine = to_bool(key, value);
  else if (key == "refine_factor") c.grid.refine_factor = static_cast<int>(to_int(key, value));
  else if (key == "min_separation") c.grid.min_separation_deg = to_double(key, value);
  else if (key == "window_4d") {
    if (value == "none") c.grid.window_4d_deg.reset();
    else c.grid.window_4d_deg = to_double(key, value);
  } else if (key == "threads") c.grid.threads = static_cast<unsigned>(to_int(key, value));
  else if (key == "seed") c.seed = static_cast<std::uint64_t>(to_int(key, value));
  else if (key == "method") {
    c.methods.clear();
    for (const auto& m : split(value, ','))
      if (!m.empty()) c.methods.push_back(method_from_string(m));
  } else if (key == "output") c.output = value;
  else throw Error("config: unknown key '" + key + "'");
}

ExperimentConfig parse_config(std::istream& in, ExperimentConfig base) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error("config line " + std::to_string(lineno) + ": expected key = value");
    try {
      apply_config_key(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const Error& e) {
      throw Error("config line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return base;
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file '" + path + "'");
  return parse_config(in, std::move(base));
}

std::vector<SourceParams> default_two_sources() {
  return {SourceParams::from_degrees(10, 20, 15, 30), SourceParams::from_degrees(60, 70, 60, 80)};
}

SourceParams default_spectrum_source() { return SourceParams::from_degrees(30, 80, 20, 50); }

}  // namespace poldoa
