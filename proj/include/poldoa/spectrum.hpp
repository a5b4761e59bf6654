#pragma once

#include <poldoa/types.hpp>

#include <cstddef>
#include <string>
#include <vector>

namespace poldoa {

/// One sampled parameter axis, in degrees. Periodic axes wrap around for
/// neighbourhood purposes (azimuth and phase difference over a full circle).
struct Axis {
  std::string name;
  double start = 0.0;
  double step = 1.0;
  int count = 1;
  bool periodic = false;

  /// start, start+step, ..., up to and including stop (within 1e-9 of a step).
  static Axis closed(std::string name, double start, double stop, double step);
  /// A full 360-degree circle starting at start; 360/step must be an integer.
  static Axis full_circle(std::string name, double start, double step);

  double value(int i) const { return start + step * i; }
  double stop() const { return value(count - 1); }
};

inline constexpr double kDefaultCap = 1e12;

/// Values of a 1/x spectrum over a rectangular grid. `cost` holds the
/// denominator x at each node (row-major, last axis fastest); the reported
/// value is 1/x clipped to `cap`. Peak logic ranks nodes by cost, so the
/// ordering is the pre-clip one.
struct SpectrumGrid {
  std::vector<Axis> axes;
  std::vector<double> cost;
  double cap = kDefaultCap;

  std::size_t size() const { return cost.size(); }
  double value(std::size_t flat) const;
  std::vector<double> values() const;

  std::vector<int> unravel(std::size_t flat) const;
  std::size_t ravel(const std::vector<int>& index) const;
  std::vector<double> coordinates(std::size_t flat) const;

  static std::size_t cell_count(const std::vector<Axis>& axes);
};

struct Peak {
  std::size_t flat_index = 0;
  std::vector<int> index;
  std::vector<double> coordinates;  // degrees
  double cost = 0.0;
  double value = 0.0;
};

/// Every local maximum (as defined for find_peaks), strongest first.
std::vector<Peak> local_maxima(const SpectrumGrid& spectrum);

/// The M strongest local maxima. A node is a local maximum when no
/// neighbour (3^d - 1 neighbourhood, wrapping on periodic axes) has a
/// strictly higher pre-clip value, and no equal-valued neighbour has a
/// smaller flat index. Ties in ranking go to the smaller flat index.
/// Throws Error listing what was found when fewer than M maxima exist.
std::vector<Peak> find_peaks(const SpectrumGrid& spectrum, int count);

/// Node with the highest pre-clip value, ties to the smaller flat index.
Peak global_peak(const SpectrumGrid& spectrum);

}  // namespace poldoa
