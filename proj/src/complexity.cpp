#include <poldoa/complexity.hpp>
#include <poldoa/types.hpp>

#include <string>

namespace poldoa {

namespace {

std::uint64_t mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r = 0;
  if (__builtin_mul_overflow(a, b, &r)) throw Error("complexity count overflows 64 bits");
  return r;
}

std::uint64_t add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r = 0;
  if (__builtin_add_overflow(a, b, &r)) throw Error("complexity count overflows 64 bits");
  return r;
}

}  // namespace

ComplexityCounts complexity_report(std::int64_t N, std::int64_t M, std::int64_t L) {
  if (N < 1) throw Error("complexity: N must be >= 1, got " + std::to_string(N));
  if (M < 1 || M >= 3 * N)
    throw Error("complexity: M must satisfy 1 <= M < 3N, got M=" + std::to_string(M) +
                " with N=" + std::to_string(N));
  if (L < 2) throw Error("complexity: L must be >= 2, got " + std::to_string(L));

  const auto n = static_cast<std::uint64_t>(N), m = static_cast<std::uint64_t>(M),
             l = static_cast<std::uint64_t>(L);
  const std::uint64_t noise_dim = 3 * n - m;
  const std::uint64_t l2 = mul(l, l);
  const std::uint64_t per_cell = mul(6 * n + 4, noise_dim);

  ComplexityCounts c;
  c.music_4d = mul(mul(l2, l2), mul(3 * n + 1, noise_dim));
  c.reduced_det = add(mul(l2, add(per_cell, 10)), per_cell);
  c.reduced_mineig = add(mul(l2, add(per_cell, 14)), per_cell);
  return c;
}

}  // namespace poldoa
