#pragma once

// The Farey map F, its two inverse branches, the Gauss map, continued-fraction
// words and the sum-level membership test.

#include <cstdint>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "farey/numeric_core.hpp"

namespace farey {

inline const ExactRational& one_half() {
  static const ExactRational h(1, 2);
  return h;
}

/// F(x) = x/(1-x) on [0, 1/2], (1-x)/x on (1/2, 1]. The point 1/2 takes the left piece.
inline ExactRational farey_forward(const ExactRational& x) {
  if (x.sign() < 0 || x > ExactRational(1)) throw DomainError("farey_forward: " + x.str() + " outside [0,1]");
  const ExactRational one(1);
  if (x <= one_half()) return x / (one - x);
  return (one - x) / x;
}

/// Inverse branch selector: left is x/(1+x) onto [0,1/2], right is 1/(1+x) onto [1/2,1].
enum class Branch { left, right };

inline ExactRational inverse_branch(Branch b, const ExactRational& x) {
  const ExactRational one(1);
  return b == Branch::left ? x / (one + x) : one / (one + x);
}

/// (psi_left(I), psi_right(I)); their union is F^{-1}(I). psi_right reverses
/// orientation, so its image is [1/(1+hi), 1/(1+lo)].
inline std::pair<RationalInterval, RationalInterval> inverse_branch_images(const RationalInterval& I) {
  return {RationalInterval(inverse_branch(Branch::left, I.lo()), inverse_branch(Branch::left, I.hi())),
          RationalInterval(inverse_branch(Branch::right, I.hi()), inverse_branch(Branch::right, I.lo()))};
}

/// Fractional part of 1/x. G(0) = 0 by convention.
inline ExactRational gauss_forward(const ExactRational& x) {
  if (x.sign() < 0 || x > ExactRational(1)) throw DomainError("gauss_forward: " + x.str() + " outside [0,1]");
  if (x.is_zero()) return ExactRational(0);
  mpz_class r;
  mpz_tdiv_r(r.get_mpz_t(), x.den().get_mpz_t(), x.num().get_mpz_t());
  return ExactRational(r, x.num());
}

// ---------------------------------------------------------------------------

/// Finite continued-fraction word [a_1, ..., a_k], value 1/(a_1 + 1/(a_2 + ...)).
class CFWord {
 public:
  CFWord() = default;
  explicit CFWord(std::vector<std::uint64_t> digits) : digits_(std::move(digits)) {
    for (auto d : digits_) {
      if (d == 0) throw DomainError("continued-fraction digits must be >= 1");
    }
  }
  CFWord(std::initializer_list<std::uint64_t> digits) : CFWord(std::vector<std::uint64_t>(digits)) {}

  const std::vector<std::uint64_t>& digits() const noexcept { return digits_; }
  std::size_t size() const noexcept { return digits_.size(); }
  bool empty() const noexcept { return digits_.empty(); }

  /// The other representation of the same rational: (..., a_k) <-> (..., a_k - 1, 1).
  /// [1] has no second form; an empty word is returned for it.
  CFWord alternate() const {
    if (digits_.empty()) return {};
    std::vector<std::uint64_t> d = digits_;
    if (d.back() >= 2) {
      d.back() -= 1;
      d.push_back(1);
      return CFWord(std::move(d));
    }
    if (d.size() == 1) return {};
    d.pop_back();
    d.back() += 1;
    return CFWord(std::move(d));
  }

  /// "[a1,a2,...]"
  std::string str() const {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < digits_.size(); ++i) os << (i ? "," : "") << digits_[i];
    os << ']';
    return os.str();
  }

  friend bool operator==(const CFWord&, const CFWord&) = default;

 private:
  std::vector<std::uint64_t> digits_;
};

/// Euclidean expansion; the last digit is >= 2 except for x = 1 -> [1].
inline CFWord cf_encode(const ExactRational& x) {
  if (x.sign() <= 0 || x > ExactRational(1)) throw DomainError("cf_encode: " + x.str() + " outside (0,1]");
  std::vector<std::uint64_t> digits;
  mpz_class p = x.num(), q = x.den();
  while (p != 0) {
    mpz_class a, r;
    mpz_fdiv_qr(a.get_mpz_t(), r.get_mpz_t(), q.get_mpz_t(), p.get_mpz_t());
    if (!a.fits_ulong_p()) throw DomainError("cf_encode: digit exceeds 64 bits");
    digits.push_back(a.get_ui());
    q = p;
    p = r;
  }
  return CFWord(std::move(digits));
}

inline ExactRational cf_decode(const CFWord& w) {
  if (w.empty()) throw DomainError("cf_decode: empty word");
  // Backward evaluation: v = 1/(a_k), then v = 1/(a_j + v).
  mpz_class p = 0, q = 1;
  for (auto it = w.digits().rbegin(); it != w.digits().rend(); ++it) {
    mpz_class np = q;
    mpz_class nq = mpz_class(static_cast<unsigned long>(*it)) * q + p;
    p = np;
    q = nq;
  }
  return ExactRational(p, q);
}

/// Action of F on words: decrement a_1 if a_1 >= 2, otherwise drop it.
inline CFWord farey_cf_step(const CFWord& w) {
  if (w.empty()) throw DomainError("farey_cf_step: empty word");
  std::vector<std::uint64_t> d = w.digits();
  if (d.front() >= 2) {
    d.front() -= 1;
  } else {
    if (d.size() == 1) throw TerminalPoint("farey_cf_step: [1] maps to 0, which has no CF word");
    d.erase(d.begin());
  }
  return CFWord(std::move(d));
}

/// x in C_n iff a partial digit sum of either CF representation of x equals n.
inline bool sum_level_membership(const ExactRational& x, std::uint64_t n) {
  const CFWord w = cf_encode(x);
  auto hits = [n](const CFWord& word) {
    std::uint64_t s = 0;
    for (auto a : word.digits()) {
      s += a;
      if (s == n) return true;
      if (s > n) return false;
    }
    return false;
  };
  return hits(w) || hits(w.alternate());
}

/// Dynamical form of the same test: F^{n-1}(x) in [1/2, 1].
inline bool sum_level_membership_dynamical(ExactRational x, std::uint64_t n) {
  for (std::uint64_t i = 1; i < n; ++i) {
    if (x.is_zero()) return false;
    x = farey_forward(x);
  }
  return x >= one_half();
}

inline constexpr std::uint64_t kDefaultReturnCap = 1'000'000;

/// First n >= 1 with F^n(x) in [1/N, 1], by exact iteration. The orbit of a
/// rational ends at the fixed point 0, after which no return is possible.
inline std::uint64_t return_time(const ExactRational& x, std::uint64_t N, std::uint64_t cap = kDefaultReturnCap) {
  if (N < 2) throw DomainError("return_time: N must be >= 2");
  const ExactRational lower(std::uint64_t{1}, N);
  if (x < lower || x > ExactRational(1)) {
    throw DomainError("return_time: " + x.str() + " not in [1/" + std::to_string(N) + ", 1]");
  }
  ExactRational y = x;
  for (std::uint64_t n = 1; n <= cap; ++n) {
    y = farey_forward(y);
    if (y >= lower) return n;
    if (y.is_zero()) break;
  }
  throw NoReturnWithinCap("return_time: orbit of " + x.str() + " does not return to [1/" + std::to_string(N) +
                          ", 1] within " + std::to_string(cap) + " steps");
}

}  // namespace farey
