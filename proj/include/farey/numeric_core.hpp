#pragma once

// Exact rationals, closed rational subintervals of [0,1] and their canonical
// unions. Everything downstream that needs exact geometry goes through here.

#include <gmpxx.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <compare>
#include <concepts>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <type_traits>
#include <unordered_map>
#include <utility>
#include <vector>

#include "farey/errors.hpp"

namespace farey {

/// Normalized arbitrary-precision fraction: gcd(|num|, den) = 1, den >= 1.
class ExactRational {
 public:
  ExactRational() = default;

  template <std::integral Int>
  ExactRational(Int n) : value_(word(n)) {}  // NOLINT(google-explicit-constructor)

  template <std::integral Int>
  ExactRational(Int num, Int den) : ExactRational(word(num), word(den)) {}

  ExactRational(const mpz_class& num, const mpz_class& den) {
    if (den == 0) throw DivisionByZero("rational with zero denominator");
    value_ = mpq_class(num, den);
    value_.canonicalize();
  }

  explicit ExactRational(mpq_class q) : value_(std::move(q)) {
    if (value_.get_den() == 0) throw DivisionByZero("rational with zero denominator");
    value_.canonicalize();
  }

  /// Accepts "p/q" or "p" with optional sign on p.
  static ExactRational parse(std::string_view text) {
    auto trim = [](std::string_view s) {
      while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
      while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
      return s;
    };
    text = trim(text);
    auto is_int = [](std::string_view s) {
      if (!s.empty() && (s.front() == '-' || s.front() == '+')) s.remove_prefix(1);
      return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
    };
    auto to_mpz = [](std::string_view s) {
      if (!s.empty() && s.front() == '+') s.remove_prefix(1);
      return mpz_class(std::string(s), 10);
    };
    const auto slash = text.find('/');
    if (slash == std::string_view::npos) {
      if (!is_int(text)) throw DomainError("not a rational: '" + std::string(text) + "'");
      return ExactRational(to_mpz(text), mpz_class(1));
    }
    const auto num = trim(text.substr(0, slash));
    const auto den = trim(text.substr(slash + 1));
    if (!is_int(num) || !is_int(den)) throw DomainError("not a rational: '" + std::string(text) + "'");
    return ExactRational(to_mpz(num), to_mpz(den));
  }

  const mpq_class& get() const noexcept { return value_; }
  const mpz_class& num() const noexcept { return value_.get_num(); }
  const mpz_class& den() const noexcept { return value_.get_den(); }

  int sign() const noexcept { return sgn(value_); }
  bool is_zero() const noexcept { return sign() == 0; }

  /// Always "p/q", also for integers ("1/1").
  std::string str() const { return num().get_str() + "/" + den().get_str(); }

  double to_double() const { return value_.get_d(); }

  friend ExactRational operator+(const ExactRational& a, const ExactRational& b) { return ExactRational(mpq_class(a.value_ + b.value_)); }
  friend ExactRational operator-(const ExactRational& a, const ExactRational& b) { return ExactRational(mpq_class(a.value_ - b.value_)); }
  friend ExactRational operator*(const ExactRational& a, const ExactRational& b) { return ExactRational(mpq_class(a.value_ * b.value_)); }
  friend ExactRational operator/(const ExactRational& a, const ExactRational& b) {
    if (b.is_zero()) throw DivisionByZero("division by zero rational");
    return ExactRational(mpq_class(a.value_ / b.value_));
  }
  ExactRational operator-() const { return ExactRational(mpq_class(-value_)); }

  ExactRational& operator+=(const ExactRational& b) { value_ += b.value_; return *this; }
  ExactRational& operator-=(const ExactRational& b) { value_ -= b.value_; return *this; }
  ExactRational& operator*=(const ExactRational& b) { value_ *= b.value_; return *this; }
  ExactRational& operator/=(const ExactRational& b) { return *this = *this / b; }

  friend bool operator==(const ExactRational& a, const ExactRational& b) { return cmp(a.value_, b.value_) == 0; }
  friend std::strong_ordering operator<=>(const ExactRational& a, const ExactRational& b) {
    const int c = cmp(a.value_, b.value_);
    return c < 0 ? std::strong_ordering::less : c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal;
  }

 private:
  template <std::integral Int>
  static mpz_class word(Int v) {
    if constexpr (std::is_signed_v<Int>) {
      return mpz_class(static_cast<long>(v));
    } else {
      return mpz_class(static_cast<unsigned long>(v));
    }
  }

  mpq_class value_{0};
};

inline std::ostream& operator<<(std::ostream& os, const ExactRational& q) { return os << q.str(); }

// ---------------------------------------------------------------------------
// Conversions to floating types.

/// Converts with a 64-bit significand (x87 long double on x86-64); error below 2 ulp.
inline long double to_long_double(const mpz_class& z) {
  const int s = sgn(z);
  if (s == 0) return 0.0L;
  const mpz_class a = abs(z);
  const std::size_t bits = mpz_sizeinbase(a.get_mpz_t(), 2);
  const std::size_t shift = bits > 64 ? bits - 64 : 0;
  const mpz_class top = a >> static_cast<mp_bitcnt_t>(shift);
  const long double r = std::ldexp(static_cast<long double>(mpz_get_ui(top.get_mpz_t())), static_cast<int>(shift));
  return s < 0 ? -r : r;
}

inline long double to_long_double(const ExactRational& q) {
  if (q.is_zero()) return 0.0L;
  const auto nb = static_cast<long>(mpz_sizeinbase(q.num().get_mpz_t(), 2));
  const auto db = static_cast<long>(mpz_sizeinbase(q.den().get_mpz_t(), 2));
  const long k = std::max<long>(0, 68 + db - nb);
  mpz_class scaled = q.num();
  mpz_mul_2exp(scaled.get_mpz_t(), scaled.get_mpz_t(), static_cast<mp_bitcnt_t>(k));
  mpz_class quot;
  mpz_tdiv_q(quot.get_mpz_t(), scaled.get_mpz_t(), q.den().get_mpz_t());
  return std::ldexp(to_long_double(quot), static_cast<int>(-k));
}

/// Generic conversion. Types other than the builtin floats must be constructible
/// from a decimal integer string (boost::multiprecision backends are).
template <class Real>
Real to_real(const ExactRational& q) {
  if constexpr (std::is_same_v<Real, double>) {
    return q.to_double();
  } else if constexpr (std::is_same_v<Real, long double>) {
    return to_long_double(q);
  } else if constexpr (std::is_same_v<Real, float>) {
    return static_cast<float>(q.to_double());
  } else {
    return Real(q.num().get_str()) / Real(q.den().get_str());
  }
}

/// Default high-precision real: 64 significand bits.
using HighPrecision = long double;

// ---------------------------------------------------------------------------
// Exact summation.

/// Exact accumulator for many fractions with machine-word denominators.
///
/// Terms are bucketed by denominator with 128-bit numerator sums; the final
/// total is a balanced pairwise sum of the buckets in increasing denominator
/// order. Merging accumulators is associative and the result does not depend
/// on insertion order, which is what the parallel preimage reduction relies on.
/// Terms whose parts do not fit 64 bits go straight into an mpq.
class RationalSum {
 public:
  RationalSum() = default;

  /// Denominators up to `dense_limit` use a flat array instead of the hash map.
  explicit RationalSum(std::uint64_t dense_limit) : dense_(dense_limit + 1, 0) {}

  void add_term(__int128 num, std::uint64_t den) {
    if (den == 0) throw DivisionByZero("zero denominator in sum");
    if (den < dense_.size()) {
      dense_[den] += num;
    } else {
      sparse_[den] += num;
    }
  }

  void add(const ExactRational& q) {
    if (q.is_zero()) return;
    if (q.den().fits_ulong_p() && q.num().fits_slong_p()) {
      add_term(static_cast<__int128>(q.num().get_si()), q.den().get_ui());
    } else {
      big_ += q.get();
    }
  }

  void merge(const RationalSum& other) {
    if (dense_.size() < other.dense_.size()) dense_.resize(other.dense_.size(), 0);
    for (std::size_t d = 0; d < other.dense_.size(); ++d) dense_[d] += other.dense_[d];
    for (const auto& [d, n] : other.sparse_) add_term(n, d);
    big_ += other.big_;
  }

  ExactRational total() const {
    std::vector<std::pair<__int128, std::uint64_t>> terms;
    for (std::size_t d = 1; d < dense_.size(); ++d) {
      if (dense_[d] != 0) terms.emplace_back(dense_[d], d);
    }
    for (const auto& [d, n] : sparse_) {
      if (n != 0) terms.emplace_back(n, d);
    }
    std::sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) { return a.second < b.second; });
    mpq_class sum = big_;
    if (!terms.empty()) sum += tree_sum(terms, 0, terms.size());
    return ExactRational(sum);
  }

  static mpz_class to_mpz(__int128 v) {
    const bool neg = v < 0;
    const unsigned __int128 u = neg ? -static_cast<unsigned __int128>(v) : static_cast<unsigned __int128>(v);
    mpz_class r(static_cast<unsigned long>(u >> 64));
    r <<= 64;
    r += static_cast<unsigned long>(static_cast<std::uint64_t>(u));
    return neg ? mpz_class(-r) : r;
  }

 private:
  static mpq_class tree_sum(const std::vector<std::pair<__int128, std::uint64_t>>& t, std::size_t lo, std::size_t hi) {
    if (hi - lo == 1) {
      mpq_class q(to_mpz(t[lo].first), mpz_class(static_cast<unsigned long>(t[lo].second)));
      q.canonicalize();
      return q;
    }
    const std::size_t mid = lo + (hi - lo) / 2;
    return tree_sum(t, lo, mid) + tree_sum(t, mid, hi);
  }

  std::vector<__int128> dense_;
  std::unordered_map<std::uint64_t, __int128> sparse_;
  mpq_class big_{0};
};

// ---------------------------------------------------------------------------
// Intervals.

/// Closed interval [lo, hi] with 0 <= lo <= hi <= 1.
class RationalInterval {
 public:
  RationalInterval(ExactRational lo, ExactRational hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
    if (lo_.sign() < 0 || hi_ > ExactRational(1) || hi_ < lo_) {
      throw DomainError("invalid interval [" + lo_.str() + ", " + hi_.str() + "]");
    }
  }

  static RationalInterval parse(std::string_view lo, std::string_view hi) {
    return {ExactRational::parse(lo), ExactRational::parse(hi)};
  }

  const ExactRational& lo() const noexcept { return lo_; }
  const ExactRational& hi() const noexcept { return hi_; }
  bool degenerate() const { return lo_ == hi_; }

  friend bool operator==(const RationalInterval&, const RationalInterval&) = default;

 private:
  ExactRational lo_;
  ExactRational hi_;
};

inline ExactRational interval_lambda(const RationalInterval& I) { return I.hi() - I.lo(); }

/// mu-length log(hi/lo), evaluated as log1p((hi - lo)/lo) so short intervals keep full
/// relative precision. Degenerate intervals have measure 0 (including [0,0]).
template <class Real = HighPrecision>
Real interval_mu(const RationalInterval& I) {
  using std::log1p;
  if (I.degenerate()) return Real(0);
  if (I.lo().is_zero()) throw InfiniteMeasure("mu([0, " + I.hi().str() + "]) is infinite");
  return log1p(to_real<Real>((I.hi() - I.lo()) / I.lo()));
}

/// Canonical finite union of closed intervals: sorted, pairwise disjoint, with
/// touching intervals merged. Two sets are equal iff they are the same point set.
class IntervalSet {
 public:
  IntervalSet() = default;

  const std::vector<RationalInterval>& intervals() const noexcept { return intervals_; }
  std::size_t size() const noexcept { return intervals_.size(); }
  bool empty() const noexcept { return intervals_.empty(); }
  auto begin() const { return intervals_.begin(); }
  auto end() const { return intervals_.end(); }

  ExactRational total_lambda() const {
    RationalSum sum;
    for (const auto& I : intervals_) {
      sum.add(I.hi());
      sum.add(-I.lo());
    }
    return sum.total();
  }

  template <class Real = HighPrecision>
  Real total_mu() const {
    Real s(0);
    for (const auto& I : intervals_) s += interval_mu<Real>(I);
    return s;
  }

  friend bool operator==(const IntervalSet&, const IntervalSet&) = default;

 private:
  friend IntervalSet set_normalize(std::vector<RationalInterval> raw);
  std::vector<RationalInterval> intervals_;
};

/// Sorts by lower endpoint and merges overlapping or touching intervals.
inline IntervalSet set_normalize(std::vector<RationalInterval> raw) {
  std::sort(raw.begin(), raw.end(), [](const RationalInterval& a, const RationalInterval& b) {
    const auto c = a.lo() <=> b.lo();
    if (c != 0) return c < 0;
    return a.hi() < b.hi();
  });
  IntervalSet out;
  for (auto& I : raw) {
    if (!out.intervals_.empty() && I.lo() <= out.intervals_.back().hi()) {
      if (I.hi() > out.intervals_.back().hi()) {
        out.intervals_.back() = RationalInterval(out.intervals_.back().lo(), I.hi());
      }
    } else {
      out.intervals_.push_back(std::move(I));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Machine-word fractions, used on the hot enumeration paths.

/// p/q with 64-bit unsigned parts; converts to ExactRational on demand.
struct WordFraction {
  std::uint64_t num = 0;
  std::uint64_t den = 1;

  ExactRational exact() const {
    return ExactRational(mpz_class(static_cast<unsigned long>(num)), mpz_class(static_cast<unsigned long>(den)));
  }
  friend bool operator==(const WordFraction&, const WordFraction&) = default;
};

/// Fibonacci numbers with F(1) = F(2) = 1; saturates at UINT64_MAX.
inline std::uint64_t fibonacci(int k) {
  std::uint64_t a = 0, b = 1;
  for (int i = 0; i < k; ++i) {
    const std::uint64_t next = a > UINT64_MAX - b ? UINT64_MAX : a + b;
    a = b;
    b = next;
  }
  return a;
}

}  // namespace farey
