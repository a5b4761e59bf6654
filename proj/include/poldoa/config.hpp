#pragma once

#include <poldoa/array_model.hpp>
#include <poldoa/subspace_music.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace poldoa {

/// Experiment settings. Angles in radians inside SourceParams, everything
/// else in the units of the key names (dB, degrees).
struct ExperimentConfig {
  ArrayGeometry geometry = ArrayGeometry::linear(SensorKind::Tripole, 4, 0.5);
  /// Second geometry for compare-geometry.
  ArrayGeometry compare_geometry = ArrayGeometry::planar(SensorKind::CrossedDipole, 2, 3, 0.5);
  std::vector<SourceParams> sources;
  /// Number of signals assumed by the estimator; defaults to sources.size().
  std::optional<int> signals;
  double snr_start_db = 0.0;
  double snr_stop_db = 30.0;
  double snr_step_db = 5.0;
  bool noise_free = false;
  int snapshots = 1000;
  int trials = 50;
  GridConfig grid;
  std::uint64_t seed = 1;
  std::vector<Method> methods{Method::Reduced2DDet};
  std::string output;

  std::vector<double> snr_points() const;
  int num_signals() const;
  void validate() const;
};

/// Parses "tripole" / "crossed-dipole" with a layout "linear:N" or "planar:RxC".
ArrayGeometry parse_geometry(const std::string& sensor, const std::string& layout, double spacing);

/// "θ,φ,γ,η; θ,φ,γ,η; ..." in degrees.
std::vector<SourceParams> parse_sources(const std::string& text);

/// Flat "key = value" lines; '#' starts a comment. Unknown keys are errors.
ExperimentConfig parse_config(std::istream& in, ExperimentConfig base = {});
ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {});

/// Applies a single key, as in a config file line.
void apply_config_key(ExperimentConfig& config, const std::string& key, const std::string& value);

/// The two-source scenario used throughout the benchmarks.
std::vector<SourceParams> default_two_sources();
/// The single source of the spectrum-export scenario.
SourceParams default_spectrum_source();

}  // namespace poldoa
