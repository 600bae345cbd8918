#pragma once

// Enumeration of F^{-n}[alpha, beta] over the depth-n tree of inverse-branch
// words, with exact or float64 measure accumulation.
//
// Every leaf is the image of the base under a composition of the Moebius maps
// x/(1+x) and 1/(1+x). On numerator/denominator pairs these act as
// (p, q) -> (p, p+q) and (p, q) -> (q, p+q), both with determinant -1 or 1, so
// endpoints stay in lowest terms and hi.num*lo.den - lo.num*hi.den is the same
// constant K for every leaf. Leaf denominators are bounded by q_max * F(n+2).

#include <boost/math/quadrature/gauss.hpp>

#include <array>
#include <atomic>
#include <cfloat>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <thread>
#include <variant>
#include <vector>

#include "farey/farey_dynamics.hpp"
#include "farey/numeric_core.hpp"

namespace farey {

enum class ArithmeticMode { exact, float64, automatic };
enum class EmitMode { measure, set };

inline constexpr int kDefaultExactDepthLimit = 24;
inline constexpr int kDefaultMaxSetDepth = 22;
inline constexpr int kDefaultPrefixDepth = 8;
inline constexpr int kMaxPreimageDepth = 62;

struct PreimageQuery {
  RationalInterval base{ExactRational(1, 2), ExactRational(1)};
  int depth = 0;
  ArithmeticMode mode = ArithmeticMode::automatic;
  EmitMode emit = EmitMode::measure;
};

struct EngineOptions {
  unsigned threads = 1;
  /// Work is split into 2^prefix_depth subtrees; results never depend on it.
  int prefix_depth = kDefaultPrefixDepth;
  int max_set_depth = kDefaultMaxSetDepth;
  /// automatic mode runs exact up to this depth and float64 beyond.
  int exact_depth_limit = kDefaultExactDepthLimit;
};

struct MeasureReport {
  int depth = 0;
  ArithmeticMode mode = ArithmeticMode::exact;
  std::optional<ExactRational> lambda_exact;
  double lambda = 0.0;
  /// Absent when the base touches 0.
  std::optional<long double> mu;
  /// 2^depth leaves, counted before merging.
  std::uint64_t interval_count = 0;
  /// A-posteriori bound on |lambda - true value|; zero in exact mode.
  double lambda_error_bound = 0.0;
};

namespace detail {

template <class Int>
struct Endpoints {
  Int lo_num, lo_den, hi_num, hi_den;
};

template <class Int>
Endpoints<Int> apply_branch(const Endpoints<Int>& e, Branch b) {
  if (b == Branch::left) return {e.lo_num, e.lo_num + e.lo_den, e.hi_num, e.hi_num + e.hi_den};
  return {e.hi_den, e.hi_num + e.hi_den, e.lo_den, e.lo_num + e.lo_den};
}

/// Node reached from `root` by the `length` branch choices encoded in the bits
/// of `word`, most significant first (0 = left).
template <class Int>
Endpoints<Int> descend(Endpoints<Int> node, std::uint64_t word, int length) {
  for (int j = length - 1; j >= 0; --j) node = apply_branch(node, ((word >> j) & 1U) ? Branch::right : Branch::left);
  return node;
}

/// Depth-first traversal with an explicit O(depth) stack. Each internal node's
/// value is left + right, so float accumulation is pairwise and its rounding
/// pattern is fixed by the tree alone.
template <class Int, class Acc, class Leaf>
Acc traverse(const Endpoints<Int>& root, int depth, Leaf&& leaf) {
  struct Frame {
    Endpoints<Int> node;
    int next;
    Acc acc;
  };
  std::vector<Frame> frames(static_cast<std::size_t>(depth) + 1);
  frames[0] = Frame{root, 0, Acc{}};
  int level = 0;
  while (true) {
    Frame& f = frames[static_cast<std::size_t>(level)];
    Acc done;
    if (level == depth) {
      done = leaf(f.node);
    } else if (f.next < 2) {
      const Branch b = f.next == 0 ? Branch::left : Branch::right;
      ++f.next;
      frames[static_cast<std::size_t>(level) + 1] = Frame{apply_branch(f.node, b), 0, Acc{}};
      ++level;
      continue;
    } else {
      done = f.acc;
    }
    if (level == 0) return done;
    --level;
    if (frames[static_cast<std::size_t>(level)].next == 1) {
      frames[static_cast<std::size_t>(level)].acc = done;
    } else {
      frames[static_cast<std::size_t>(level)].acc += done;
    }
  }
}

/// Pairwise reduction in index order; matches the combination order of traverse().
template <class Acc>
Acc reduce_pairwise(const std::vector<Acc>& v, std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) return v[lo];
  const std::size_t mid = lo + (hi - lo) / 2;
  Acc a = reduce_pairwise(v, lo, mid);
  a += reduce_pairwise(v, mid, hi);
  return a;
}

struct FloatAcc {
  double lambda = 0.0;
  long double mu = 0.0L;
  FloatAcc& operator+=(const FloatAcc& o) {
    lambda += o.lambda;
    mu += o.mu;
    return *this;
  }
};

struct MuAcc {
  long double mu = 0.0L;
  MuAcc& operator+=(const MuAcc& o) {
    mu += o.mu;
    return *this;
  }
};

/// Runs `task(prefix_index)` for every index, on `threads` workers.
template <class Task>
void run_prefixes(std::size_t count, unsigned threads, Task&& task) {
  threads = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(count)));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) task(i, 0U);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) task(i, t);
    });
  }
  for (auto& th : pool) th.join();
}

inline bool fits_u64(const mpz_class& z) { return z.fits_ulong_p(); }

/// Largest leaf denominator bound q_max * F(depth + 2), or nullopt above 2^62.
inline std::optional<std::uint64_t> word_bound(const RationalInterval& base, int depth) {
  if (!fits_u64(base.lo().den()) || !fits_u64(base.hi().den())) return std::nullopt;
  const mpz_class qmax = base.lo().den() > base.hi().den() ? base.lo().den() : base.hi().den();
  const std::uint64_t fib = fibonacci(depth + 2);
  if (fib == UINT64_MAX) return std::nullopt;
  const mpz_class bound = qmax * mpz_class(static_cast<unsigned long>(fib));
  if (bound >= (mpz_class(1) << 62)) return std::nullopt;
  return bound.get_ui();
}

inline Endpoints<std::uint64_t> word_root(const RationalInterval& base) {
  return {base.lo().num().get_ui(), base.lo().den().get_ui(), base.hi().num().get_ui(), base.hi().den().get_ui()};
}

inline Endpoints<mpz_class> big_root(const RationalInterval& base) {
  return {base.lo().num(), base.lo().den(), base.hi().num(), base.hi().den()};
}

inline Endpoints<double> float_root(const RationalInterval& base) {
  return {base.lo().num().get_d(), base.lo().den().get_d(), base.hi().num().get_d(), base.hi().den().get_d()};
}

inline constexpr std::uint64_t kDenseBucketLimit = std::uint64_t{1} << 21;

}  // namespace detail

/// Resolves automatic mode against the depth.
inline ArithmeticMode resolve_mode(ArithmeticMode mode, int depth, const EngineOptions& opt = {}) {
  if (mode != ArithmeticMode::automatic) return mode;
  return depth <= opt.exact_depth_limit ? ArithmeticMode::exact : ArithmeticMode::float64;
}

/// lambda (and mu when the base avoids 0) of F^{-depth}(base), streaming.
///
/// Exact mode buckets the leaf endpoints by denominator and sums them exactly
/// (sum of upper endpoints minus sum of lower endpoints). Float mode computes
/// each leaf length as K/(hi.den * lo.den) from the integer recurrences carried
/// in doubles and sums pairwise along the tree; the reported bound is
/// (depth + 3) u lambda, plus 2 depth u lambda once denominators pass 2^53,
/// with u the unit roundoff. mu per leaf is log1p(K/(hi.den * lo.num)) in long
/// double in both modes.
inline MeasureReport preimage_measure(const PreimageQuery& q, const EngineOptions& opt = {}) {
  using namespace detail;
  if (q.depth < 0 || q.depth > kMaxPreimageDepth) throw DomainError("preimage_measure: depth out of range");
  MeasureReport report;
  report.depth = q.depth;
  report.mode = resolve_mode(q.mode, q.depth, opt);
  report.interval_count = std::uint64_t{1} << q.depth;

  const RationalInterval& base = q.base;
  const ExactRational K_exact(mpz_class(base.hi().num() * base.lo().den() - base.lo().num() * base.hi().den()), mpz_class(1));
  const bool with_mu = !base.lo().is_zero();
  const int prefix = std::min(opt.prefix_depth, q.depth);
  const int subtree = q.depth - prefix;
  const std::size_t prefixes = std::size_t{1} << prefix;

  if (base.degenerate()) {
    report.lambda_exact = ExactRational(0);
    report.lambda = 0.0;
    if (with_mu) report.mu = 0.0L;
    if (report.mode == ArithmeticMode::float64) report.lambda_exact.reset();
    return report;
  }

  if (report.mode == ArithmeticMode::float64) {
    const double K = K_exact.to_double();
    const long double K_ld = to_long_double(K_exact);
    auto leaf = [&](const Endpoints<double>& e) {
      FloatAcc a;
      a.lambda = K / (e.hi_den * e.lo_den);
      if (with_mu) a.mu = std::log1p(K_ld / (static_cast<long double>(e.hi_den) * static_cast<long double>(e.lo_num)));
      return a;
    };
    std::vector<FloatAcc> parts(prefixes);
    const auto root = float_root(base);
    run_prefixes(prefixes, opt.threads, [&](std::size_t i, unsigned) {
      parts[i] = traverse<double, FloatAcc>(descend(root, i, prefix), subtree, leaf);
    });
    const FloatAcc total = reduce_pairwise(parts, 0, parts.size());
    report.lambda = total.lambda;
    if (with_mu) report.mu = total.mu;
    const auto bound = word_bound(base, q.depth);
    const bool exact_ints = bound && *bound < (std::uint64_t{1} << 53);
    const double u = DBL_EPSILON / 2;
    report.lambda_error_bound = 1.01 * (q.depth + 3 + (exact_ints ? 0 : 2 * q.depth)) * u * total.lambda;
    return report;
  }

  const auto bound = word_bound(base, q.depth);
  std::vector<MuAcc> mu_parts(prefixes);
  ExactRational lambda;
  if (bound) {
    const long double K_ld = to_long_double(K_exact);
    const unsigned workers = std::max(1U, std::min<unsigned>(opt.threads, static_cast<unsigned>(prefixes)));
    const std::uint64_t dense = *bound <= kDenseBucketLimit ? *bound : 0;
    std::vector<RationalSum> sums(workers, RationalSum(dense));
    const auto root = word_root(base);
    run_prefixes(prefixes, workers, [&](std::size_t i, unsigned t) {
      RationalSum& sum = sums[t];
      auto leaf = [&](const Endpoints<std::uint64_t>& e) {
        sum.add_term(static_cast<__int128>(e.hi_num), e.hi_den);
        sum.add_term(-static_cast<__int128>(e.lo_num), e.lo_den);
        MuAcc a;
        if (with_mu) a.mu = std::log1p(K_ld / (static_cast<long double>(e.hi_den) * static_cast<long double>(e.lo_num)));
        return a;
      };
      mu_parts[i] = traverse<std::uint64_t, MuAcc>(descend(root, i, prefix), subtree, leaf);
    });
    for (std::size_t t = 1; t < sums.size(); ++t) sums[0].merge(sums[t]);
    lambda = sums[0].total();
  } else {
    // Beyond machine words: plain mpz recurrences, single accumulator.
    RationalSum sum;
    const auto root = big_root(base);
    for (std::size_t i = 0; i < prefixes; ++i) {
      auto leaf = [&](const Endpoints<mpz_class>& e) {
        const ExactRational hi(e.hi_num, e.hi_den), lo(e.lo_num, e.lo_den);
        sum.add(hi);
        sum.add(-lo);
        MuAcc a;
        if (with_mu) a.mu = interval_mu<long double>(RationalInterval(lo, hi));
        return a;
      };
      mu_parts[i] = traverse<mpz_class, MuAcc>(descend(root, i, prefix), subtree, leaf);
    }
    lambda = sum.total();
  }
  report.lambda = lambda.to_double();
  report.lambda_exact = std::move(lambda);
  if (with_mu) report.mu = reduce_pairwise(mu_parts, 0, mu_parts.size()).mu;
  return report;
}

/// Calls visit(lo, hi) with exact endpoints for every leaf of F^{-depth}(base), in tree order.
template <class Visit>
void for_each_preimage_interval(const RationalInterval& base, int depth, Visit&& visit) {
  using namespace detail;
  if (depth < 0 || depth > kMaxPreimageDepth) throw DomainError("preimage: depth out of range");
  if (word_bound(base, depth)) {
    traverse<std::uint64_t, MuAcc>(word_root(base), depth, [&](const Endpoints<std::uint64_t>& e) {
      visit(WordFraction{e.lo_num, e.lo_den}.exact(), WordFraction{e.hi_num, e.hi_den}.exact());
      return MuAcc{};
    });
  } else {
    traverse<mpz_class, MuAcc>(big_root(base), depth, [&](const Endpoints<mpz_class>& e) {
      visit(ExactRational(e.lo_num, e.lo_den), ExactRational(e.hi_num, e.hi_den));
      return MuAcc{};
    });
  }
}

/// F^{-depth}(base) as a canonical set.
inline IntervalSet preimage_set(const PreimageQuery& q, const EngineOptions& opt = {}) {
  if (q.depth > opt.max_set_depth) {
    throw CapacityExceeded("preimage_set: depth " + std::to_string(q.depth) + " exceeds materialization bound " +
                           std::to_string(opt.max_set_depth) + "; use measure emission (streaming) instead");
  }
  std::vector<RationalInterval> raw;
  raw.reserve(std::size_t{1} << q.depth);
  for_each_preimage_interval(q.base, q.depth, [&](ExactRational lo, ExactRational hi) {
    raw.emplace_back(std::move(lo), std::move(hi));
  });
  return set_normalize(std::move(raw));
}

// ---------------------------------------------------------------------------
// Weighted integrals over preimages.

/// c_0 + c_1 x + ... with exact coefficients.
struct Polynomial {
  std::vector<ExactRational> coefficients;

  /// Antiderivative vanishing at 0, evaluated exactly.
  ExactRational antiderivative(const ExactRational& x) const {
    ExactRational acc(0);
    for (std::size_t j = coefficients.size(); j-- > 0;) {
      acc = (acc + coefficients[j] / ExactRational(static_cast<long>(j + 1))) * x;
    }
    return acc;
  }

  double operator()(double x) const {
    double acc = 0.0;
    for (std::size_t j = coefficients.size(); j-- > 0;) acc = acc * x + coefficients[j].to_double();
    return acc;
  }
};

using Weight = std::variant<Polynomial, std::function<double(double)>>;

/// Exact sum over leaves of the integral of a polynomial weight.
inline ExactRational integrate_polynomial_over_preimage(const RationalInterval& base, int depth, const Polynomial& p) {
  RationalSum sum;
  for_each_preimage_interval(base, depth, [&](const ExactRational& lo, const ExactRational& hi) {
    sum.add(p.antiderivative(hi));
    sum.add(-p.antiderivative(lo));
  });
  return sum.total();
}

/// Sum over leaves of the integral of f dlambda. Polynomials are integrated
/// exactly; callables with 8-point Gauss-Legendre on each leaf.
inline double integrate_over_preimage(const RationalInterval& base, int depth, const Weight& f) {
  if (const auto* p = std::get_if<Polynomial>(&f)) return integrate_polynomial_over_preimage(base, depth, *p).to_double();
  const auto& g = std::get<std::function<double(double)>>(f);
  double total = 0.0;
  for_each_preimage_interval(base, depth, [&](const ExactRational& lo, const ExactRational& hi) {
    total += boost::math::quadrature::gauss<double, 8>::integrate(g, lo.to_double(), hi.to_double());
  });
  return total;
}

// ---------------------------------------------------------------------------
// Sum-level sets from continued-fraction cylinders.

inline constexpr int kDefaultMaxCompositionLevel = 22;

namespace detail {

// Cylinder of [a_1..a_k] has endpoints p_k/q_k and (p_k + p_{k-1})/(q_k + q_{k-1}).
template <class Visit>
void for_each_composition_cylinder(std::uint64_t remaining, std::uint64_t p_prev, std::uint64_t q_prev,
                                   std::uint64_t p, std::uint64_t q, Visit& visit) {
  for (std::uint64_t a = 1; a <= remaining; ++a) {
    const std::uint64_t pn = a * p + p_prev;
    const std::uint64_t qn = a * q + q_prev;
    if (a == remaining) {
      WordFraction x{pn, qn}, y{pn + p, qn + q};
      // Order the endpoints: the cylinder flips orientation with the parity of k.
      if (static_cast<unsigned __int128>(x.num) * y.den <= static_cast<unsigned __int128>(y.num) * x.den) {
        visit(x, y);
      } else {
        visit(y, x);
      }
    } else {
      for_each_composition_cylinder(remaining - a, p, q, pn, qn, visit);
    }
  }
}

}  // namespace detail

/// Calls visit(lo, hi) with the cylinder of each of the 2^{n-1} compositions of n.
template <class Visit>
void for_each_sumlevel_cylinder(int n, Visit&& visit) {
  if (n < 1) throw DomainError("sumlevel cylinders: n must be >= 1");
  if (n > 80) throw CapacityExceeded("sumlevel cylinders: n too large for machine words");
  detail::for_each_composition_cylinder(static_cast<std::uint64_t>(n), 1, 0, 0, 1, visit);
}

/// C_n as the union over compositions (a_1..a_k) of n of the CF cylinders.
inline IntervalSet sumlevel_intervals_cf(int n, int max_n = kDefaultMaxCompositionLevel) {
  if (n > max_n) {
    throw CapacityExceeded("sumlevel_intervals_cf: n = " + std::to_string(n) + " exceeds bound " + std::to_string(max_n));
  }
  std::vector<RationalInterval> raw;
  raw.reserve(std::size_t{1} << (n - 1));
  for_each_sumlevel_cylinder(n, [&](WordFraction lo, WordFraction hi) { raw.emplace_back(lo.exact(), hi.exact()); });
  return set_normalize(std::move(raw));
}

/// lambda of the cylinder union, streaming. Cylinders of distinct compositions
/// overlap only at endpoints, so this is the sum of cylinder lengths.
inline ExactRational sumlevel_measure_cf(int n) {
  RationalSum sum(std::min(fibonacci(n + 2), detail::kDenseBucketLimit));
  for_each_sumlevel_cylinder(n, [&](WordFraction lo, WordFraction hi) {
    sum.add_term(static_cast<__int128>(hi.num), hi.den);
    sum.add_term(-static_cast<__int128>(lo.num), lo.den);
  });
  return sum.total();
}

}  // namespace farey
