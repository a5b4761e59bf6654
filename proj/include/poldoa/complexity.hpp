#pragma once

#include <cstdint>

namespace poldoa {

/// Complex multiplication counts of the three spectral searches for N
/// sensors, M sources and L grid points per angle axis.
struct ComplexityCounts {
  std::uint64_t music_4d = 0;
  std::uint64_t reduced_det = 0;
  std::uint64_t reduced_mineig = 0;
};

/// Exact integer evaluation. Requires N >= 1, 1 <= M < 3N, L >= 2; throws
/// on domain violations or 64-bit overflow.
ComplexityCounts complexity_report(std::int64_t N, std::int64_t M, std::int64_t L);

}  // namespace poldoa
