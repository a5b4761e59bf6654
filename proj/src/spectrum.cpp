#include <poldoa/spectrum.hpp>

#include <algorithm>
#include <cstdio>
#include <limits>

namespace poldoa {

namespace {

double rank_key(double c) { return std::isnan(c) ? std::numeric_limits<double>::infinity() : c; }

// True when node a ranks strictly ahead of node b.
bool ahead(double cost_a, std::size_t a, double cost_b, std::size_t b) {
  const double ka = rank_key(cost_a), kb = rank_key(cost_b);
  if (ka != kb) return ka < kb;
  return a < b;
}

Peak make_peak(const SpectrumGrid& s, std::size_t flat) {
  return {flat, s.unravel(flat), s.coordinates(flat), s.cost[flat], s.value(flat)};
}

}  // namespace

Axis Axis::closed(std::string name, double start, double stop, double step) {
  if (!(step > 0.0)) throw Error("axis step must be positive: " + name);
  if (stop < start) throw Error("axis stop precedes start: " + name);
  const int count = static_cast<int>(std::floor((stop - start) / step + 1e-9)) + 1;
  return {std::move(name), start, step, count, false};
}

Axis Axis::full_circle(std::string name, double start, double step) {
  if (!(step > 0.0)) throw Error("axis step must be positive: " + name);
  const double n = 360.0 / step;
  const int count = static_cast<int>(std::lround(n));
  if (std::abs(n - count) > 1e-9) throw Error("360 must be a multiple of the step: " + name);
  return {std::move(name), start, step, count, true};
}

double SpectrumGrid::value(std::size_t flat) const {
  const double c = cost[flat];
  if (!(c > 0.0)) return std::isnan(c) ? 0.0 : cap;
  return std::min(1.0 / c, cap);
}

std::vector<double> SpectrumGrid::values() const {
  std::vector<double> out(cost.size());
  for (std::size_t i = 0; i < cost.size(); ++i) out[i] = value(i);
  return out;
}

std::size_t SpectrumGrid::cell_count(const std::vector<Axis>& axes) {
  std::size_t n = 1;
  for (const auto& a : axes) n *= static_cast<std::size_t>(a.count);
  return n;
}

std::vector<int> SpectrumGrid::unravel(std::size_t flat) const {
  std::vector<int> idx(axes.size());
  for (std::size_t d = axes.size(); d-- > 0;) {
    idx[d] = static_cast<int>(flat % axes[d].count);
    flat /= axes[d].count;
  }
  return idx;
}

std::size_t SpectrumGrid::ravel(const std::vector<int>& index) const {
  std::size_t flat = 0;
  for (std::size_t d = 0; d < axes.size(); ++d) flat = flat * axes[d].count + index[d];
  return flat;
}

std::vector<double> SpectrumGrid::coordinates(std::size_t flat) const {
  const auto idx = unravel(flat);
  std::vector<double> out(axes.size());
  for (std::size_t d = 0; d < axes.size(); ++d) out[d] = axes[d].value(idx[d]);
  return out;
}

namespace {

std::vector<std::size_t> maxima_indices(const SpectrumGrid& s) {
  if (s.size() != SpectrumGrid::cell_count(s.axes)) throw Error("spectrum size does not match axes");
  const std::size_t dims = s.axes.size();

  // All offsets in {-1,0,1}^d except the origin.
  std::vector<std::vector<int>> offsets;
  std::size_t total = 1;
  for (std::size_t d = 0; d < dims; ++d) total *= 3;
  for (std::size_t k = 0; k < total; ++k) {
    std::vector<int> off(dims);
    std::size_t r = k;
    bool zero = true;
    for (std::size_t d = 0; d < dims; ++d) {
      off[d] = static_cast<int>(r % 3) - 1;
      r /= 3;
      zero = zero && off[d] == 0;
    }
    if (!zero) offsets.push_back(std::move(off));
  }

  std::vector<std::size_t> maxima;
  std::vector<int> nb(dims);
  for (std::size_t flat = 0; flat < s.size(); ++flat) {
    const auto idx = s.unravel(flat);
    bool is_max = true;
    for (const auto& off : offsets) {
      bool valid = true;
      for (std::size_t d = 0; d < dims && valid; ++d) {
        int j = idx[d] + off[d];
        const int n = s.axes[d].count;
        if (j < 0 || j >= n) {
          if (s.axes[d].periodic) j = (j + n) % n;
          else valid = false;
        }
        nb[d] = j;
      }
      if (!valid) continue;
      const std::size_t other = s.ravel(nb);
      if (other == flat) continue;
      if (ahead(s.cost[other], other, s.cost[flat], flat)) {
        is_max = false;
        break;
      }
    }
    if (is_max) maxima.push_back(flat);
  }

  std::sort(maxima.begin(), maxima.end(), [&](std::size_t a, std::size_t b) {
    return ahead(s.cost[a], a, s.cost[b], b);
  });
  return maxima;
}

}  // namespace

std::vector<Peak> local_maxima(const SpectrumGrid& s) {
  std::vector<Peak> out;
  for (std::size_t m : maxima_indices(s)) out.push_back(make_peak(s, m));
  return out;
}

std::vector<Peak> find_peaks(const SpectrumGrid& s, int count) {
  if (count < 0) throw Error("peak count must be non-negative");
  const auto maxima = maxima_indices(s);
  if (maxima.size() < static_cast<std::size_t>(count)) {
    std::string msg = "requested " + std::to_string(count) + " peaks but found " +
                      std::to_string(maxima.size()) + " local maxima";
    for (std::size_t m : maxima) {
      msg += " [";
      const auto c = s.coordinates(m);
      for (std::size_t d = 0; d < c.size(); ++d) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%s%.6g", d ? ", " : "", c[d]);
        msg += buf;
      }
      msg += "]";
    }
    throw Error(msg);
  }
  std::vector<Peak> out;
  for (int i = 0; i < count; ++i) out.push_back(make_peak(s, maxima[i]));
  return out;
}

Peak global_peak(const SpectrumGrid& s) {
  if (s.size() == 0) throw Error("empty spectrum");
  std::size_t best = 0;
  for (std::size_t i = 1; i < s.size(); ++i)
    if (ahead(s.cost[i], i, s.cost[best], best)) best = i;
  return make_peak(s, best);
}

}  // namespace poldoa
