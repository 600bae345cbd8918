#pragma once

// Stern-Brocot levels by mediant insertion, and the sum-level sets read off them.

#include <cstdint>
#include <vector>

#include "farey/numeric_core.hpp"

namespace farey {

inline constexpr int kDefaultMaxSternBrocotLevel = 26;
// F(level + 2) must fit 32 bits.
inline constexpr int kAbsoluteMaxSternBrocotLevel = 44;

struct SternBrocotFraction {
  std::uint32_t num;
  std::uint32_t den;

  ExactRational exact() const { return ExactRational(num, den); }
  friend bool operator==(const SternBrocotFraction&, const SternBrocotFraction&) = default;
};

/// The 2^n + 1 fractions of level n, increasing from 0/1 to 1/1, stored densely.
/// Numerators and denominators at level n are bounded by F(n+2).
struct SternBrocotLevel {
  int n = 0;
  std::vector<SternBrocotFraction> fractions;
};

inline SternBrocotLevel sb_generate(int n, int max_level = kDefaultMaxSternBrocotLevel) {
  if (n < 0) throw DomainError("sb_generate: negative level");
  if (n > max_level || n > kAbsoluteMaxSternBrocotLevel) {
    throw CapacityExceeded("sb_generate: level " + std::to_string(n) + " exceeds max level " +
                           std::to_string(std::min(max_level, kAbsoluteMaxSternBrocotLevel)) +
                           "; use the streaming preimage engine for larger n");
  }
  SternBrocotLevel level{n, {}};
  auto& f = level.fractions;
  f.resize((std::size_t{1} << n) + 1);
  f[0] = {0, 1};
  f[1] = {1, 1};
  std::size_t count = 2;
  // Expand in place from the back: entry i moves to 2i, mediants fill 2i+1.
  for (int k = 0; k < n; ++k) {
    for (std::size_t i = count - 1; i-- > 0;) {
      const auto a = f[i], b = f[i + 1];
      f[2 * i + 2] = b;
      f[2 * i + 1] = {a.num + b.num, a.den + b.den};
      f[2 * i] = a;
    }
    count = 2 * count - 1;
  }
  return level;
}

namespace detail {

// Visits the closed intervals whose union is C_n, as index pairs into level n
// (zero-based: [4k-3, 4k-1] for k = 1..2^{n-2}).
template <class Visit>
void for_each_sb_sumlevel_interval(const SternBrocotLevel& level, Visit&& visit) {
  const auto& f = level.fractions;
  if (level.n == 1) {
    visit(f[1], f[2]);
    return;
  }
  const std::size_t count = std::size_t{1} << (level.n - 2);
  for (std::size_t k = 1; k <= count; ++k) visit(f[4 * k - 3], f[4 * k - 1]);
}

}  // namespace detail

/// C_1 = [1/2, 1]; for n >= 2 the 2^{n-2} intervals [s_{n,4k-2}/t_{n,4k-2}, s_{n,4k}/t_{n,4k}].
inline IntervalSet sumlevel_intervals_sb(int n, int max_level = kDefaultMaxSternBrocotLevel) {
  if (n < 1) throw DomainError("sumlevel_intervals_sb: n must be >= 1");
  const SternBrocotLevel level = sb_generate(n, max_level);
  std::vector<RationalInterval> raw;
  raw.reserve(n == 1 ? 1 : std::size_t{1} << (n - 2));
  detail::for_each_sb_sumlevel_interval(level, [&](SternBrocotFraction a, SternBrocotFraction b) {
    raw.emplace_back(a.exact(), b.exact());
  });
  return set_normalize(std::move(raw));
}

/// lambda(C_n) from the Stern-Brocot endpoints without materializing rationals.
inline ExactRational sumlevel_measure_sb(int n, int max_level = kDefaultMaxSternBrocotLevel) {
  if (n < 1) throw DomainError("sumlevel_measure_sb: n must be >= 1");
  const SternBrocotLevel level = sb_generate(n, max_level);
  RationalSum sum(fibonacci(n + 2));
  detail::for_each_sb_sumlevel_interval(level, [&](SternBrocotFraction a, SternBrocotFraction b) {
    sum.add_term(static_cast<__int128>(b.num), b.den);
    sum.add_term(-static_cast<__int128>(a.num), a.den);
  });
  return sum.total();
}

}  // namespace farey
