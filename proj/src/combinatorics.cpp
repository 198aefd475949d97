#include "backflow/error.hpp"
#include "backflow/numerics.hpp"

#include <limits>
#include <string>

namespace backflow::numerics {

namespace {
__extension__ typedef unsigned __int128 Wide;
}  // namespace

std::uint64_t double_factorial(int k) {
  if (k < 0) throw Error(ErrorCode::OutOfRange, "double_factorial needs k >= 0");
  std::uint64_t out = 1;
  for (std::uint64_t f = 2 * static_cast<std::uint64_t>(k) - 1; k > 0 && f > 1; f -= 2) {
    if (__builtin_mul_overflow(out, f, &out)) {
      throw Error(ErrorCode::Overflow, "(2k-1)!! exceeds 64 bits for k = " + std::to_string(k));
    }
  }
  return out;
}

std::uint64_t binomial(int n, int j) {
  if (n < 0 || j < 0 || j > n) {
    throw Error(ErrorCode::OutOfRange,
                "binomial(" + std::to_string(n) + ", " + std::to_string(j) + ") needs 0 <= j <= n");
  }
  if (j > n - j) j = n - j;
  // After step i the running value is C(n - j + i, i), always an integer.
  Wide c = 1;
  for (int i = 1; i <= j; ++i) {
    c = c * static_cast<unsigned>(n - j + i) / static_cast<unsigned>(i);
    if (c > std::numeric_limits<std::uint64_t>::max()) {
      throw Error(ErrorCode::Overflow,
                  "binomial(" + std::to_string(n) + ", " + std::to_string(j) + ") exceeds 64 bits");
    }
  }
  return static_cast<std::uint64_t>(c);
}

}  // namespace backflow::numerics
