#pragma once

// Numerical side of the Laplace-transform route to the partial-sum law:
// the kernel l_N, the constant C, the two auxiliary series with their
// integral forms, the renewal identity on A = [1/N, 1], the convolution
// identity, and fitted error reports for the three asymptotic laws.

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "farey/errors.hpp"
#include "farey/farey_dynamics.hpp"
#include "farey/numeric_core.hpp"
#include "farey/transfer_operator.hpp"

namespace farey {

/// l_N(0) = log N, l_N(n) = log((n+N)/(n+N-1)); partial sums telescope to log(m+N).
class KernelWeights {
 public:
  explicit KernelWeights(std::uint64_t N) : N_(N) {
    if (N < 2) throw DomainError("KernelWeights: N must be >= 2");
  }
  std::uint64_t N() const noexcept { return N_; }

  long double operator()(std::uint64_t n) const {
    const long double N = static_cast<long double>(N_);
    if (n == 0) return std::log(N);
    return std::log1p(1.0L / (static_cast<long double>(n) + N - 1.0L));
  }

  /// sum_{k<=m} l_N(k), accumulated term by term.
  long double partial_sum(std::uint64_t m) const {
    long double s = 0.0L;
    for (std::uint64_t k = 0; k <= m; ++k) s += (*this)(k);
    return s;
  }

 private:
  std::uint64_t N_;
};

struct ConstantC {
  /// integral over [0,1] of (e^{-x} - 1)/x
  double head = 0.0;
  /// integral over [1, inf) of e^{-x}/x
  double tail = 0.0;
  double value = 0.0;
  double error_estimate = 0.0;
  /// Euler-Mascheroni constant from an independent source; C should equal its negative.
  double gamma_ref = boost::math::constants::euler<double>();
};

inline ConstantC constant_C() {
  ConstantC c;
  double e1 = 0.0, e2 = 0.0;
  c.head = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      [](double x) { return x == 0.0 ? -1.0 : std::expm1(-x) / x; }, 0.0, 1.0, 15, 1e-15, &e1);
  boost::math::quadrature::exp_sinh<double> es;
  c.tail = es.integrate([](double x) { return std::exp(-x) / x; }, 1.0, std::numeric_limits<double>::infinity(), 1e-15,
                        &e2);
  c.value = c.head + c.tail;
  c.error_estimate = e1 + e2;
  return c;
}

namespace detail {

/// Truncation for series in e^{-n/sigma} with summable coefficients.
inline std::uint64_t series_cutoff(double sigma) {
  return static_cast<std::uint64_t>(std::max(std::ceil(45.0 * sigma), 1000.0));
}

/// Piecewise integral over [0, X] of e^{-x} g(floor(sigma x)), g supplied per piece,
/// each piece integrated by Gauss-Kronrod; X = 45 leaves e^{-45} of the mass.
template <class G>
double floor_integral(double sigma, G&& g, double* err_out) {
  constexpr double X = 45.0;
  long double total = 0.0L;
  double err = 0.0;
  auto f = [](double x) { return std::exp(-x); };
  for (std::uint64_t n = 0;; ++n) {
    const double a = static_cast<double>(n) / sigma;
    if (a >= X) break;
    const double b = std::min(static_cast<double>(n + 1) / sigma, X);
    double e = 0.0;
    // Short pieces need a single 31-point rule; long ones (small sigma) are subdivided.
    const unsigned depth = b - a <= 1.0 ? 0 : 12;
    const double piece = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, depth, 1e-14, &e);
    total += static_cast<long double>(piece) * g(n);
    err += e * std::abs(g(n));
  }
  if (err_out) *err_out = err;
  return static_cast<double>(total);
}

}  // namespace detail

struct LemmaValue {
  double sigma = 0.0;
  std::uint64_t N = 2;
  /// Direct summation of the series.
  double value = 0.0;
  double tail_bound = 0.0;
  /// The same quantity from its integral representation.
  double integral_form = 0.0;
  double integral_error = 0.0;
  /// value - 1 (series of inverse products) or value - log(sigma+N) - C (kernel series).
  double deviation = 0.0;
  /// |deviation| * sigma / log(sigma); only meaningful for sigma > 1.
  double scaled_deviation = 0.0;
};

/// (N-1)/N + sum_{n>=1} e^{-n/sigma} / ((n+N)(n+N-1)), and its integral form
/// 1 - int_0^inf e^{-x} / (floor(sigma x) + N) dx.
inline LemmaValue lemma3_eval(double sigma, std::uint64_t N) {
  if (!(sigma > 0.0)) throw DomainError("lemma3_eval: sigma must be positive");
  if (N < 2) throw DomainError("lemma3_eval: N must be >= 2");
  LemmaValue r;
  r.sigma = sigma;
  r.N = N;
  const long double Nl = static_cast<long double>(N);
  const std::uint64_t K = detail::series_cutoff(sigma);
  long double s = (Nl - 1.0L) / Nl;
  for (std::uint64_t n = 1; n <= K; ++n) {
    const long double m = static_cast<long double>(n) + Nl;
    s += std::exp(-static_cast<long double>(n) / sigma) / (m * (m - 1.0L));
  }
  r.value = static_cast<double>(s);
  // Remaining terms sum to at most e^{-(K+1)/sigma} times the telescoped 1/(K+N).
  r.tail_bound = std::exp(-static_cast<double>(K + 1) / sigma) / (static_cast<double>(K) + static_cast<double>(N));
  double err = 0.0;
  const double integral =
      detail::floor_integral(sigma, [&](std::uint64_t n) { return 1.0 / (static_cast<double>(n) + static_cast<double>(N)); }, &err);
  r.integral_form = 1.0 - integral;
  r.integral_error = err + std::exp(-45.0);
  r.deviation = r.value - 1.0;
  r.scaled_deviation = sigma > 1.0 ? std::abs(r.deviation) * sigma / std::log(sigma) : 0.0;
  return r;
}

/// log N + sum_{n>=1} e^{-n/sigma} l_N(n), and its integral form
/// int_0^inf e^{-x} log(floor(sigma x) + N) dx.
inline LemmaValue lemma4_eval(double sigma, std::uint64_t N, const ConstantC& C = constant_C()) {
  if (!(sigma > 0.0)) throw DomainError("lemma4_eval: sigma must be positive");
  const KernelWeights ell(N);
  LemmaValue r;
  r.sigma = sigma;
  r.N = N;
  const std::uint64_t K = detail::series_cutoff(sigma);
  long double s = ell(0);
  for (std::uint64_t n = 1; n <= K; ++n) s += std::exp(-static_cast<long double>(n) / sigma) * ell(n);
  r.value = static_cast<double>(s);
  const double q = std::exp(-1.0 / sigma);
  r.tail_bound = std::exp(-static_cast<double>(K + 1) / sigma) / (1.0 - q) / (static_cast<double>(K) + static_cast<double>(N));
  double err = 0.0;
  r.integral_form = detail::floor_integral(
      sigma, [&](std::uint64_t n) { return std::log(static_cast<double>(n) + static_cast<double>(N)); }, &err);
  // Beyond x = 45: e^{-x} log(sigma x + N) integrates to at most e^{-45}(log(45 sigma + N) + 1/45).
  r.integral_error = err + std::exp(-45.0) * (std::log(45.0 * sigma + static_cast<double>(N)) + 1.0 / 45.0);
  r.deviation = r.value - std::log(sigma + static_cast<double>(N)) - C.value;
  r.scaled_deviation = sigma > 1.0 ? std::abs(r.deviation) * sigma / std::log(sigma) : 0.0;
  return r;
}

inline double lemma4_deviation(double sigma, std::uint64_t N) { return lemma4_eval(sigma, N).deviation; }

// ---------------------------------------------------------------------------
// Renewal identity on A = [1/N, 1]

struct RenewalOptions {
  MeshSpec mesh;
  /// Truncation of the operator series; 0 picks max(50, 40 sigma).
  int K = 0;
  /// Also rerun on a mesh with half the nodes to estimate the discretization error.
  bool estimate_discretization = true;
  unsigned threads = 1;
};

struct RenewalCheck {
  std::uint64_t N = 2;
  double sigma = 0.0;
  int K = 0;
  /// Return-time pieces handled exactly before the sliver next to 1.
  std::uint64_t pieces = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double difference = 0.0;
  double truncation_tolerance = 0.0;
  double discretization_tolerance = 0.0;
  double tolerance() const { return truncation_tolerance + discretization_tolerance + 1e-12; }
  bool holds() const { return difference <= tolerance(); }
};

namespace detail {

/// Return-time pieces of A = [1/N, 1]: phi_A = 1 on [1/N, N/(N+1)] and j+1 on
/// ((N+j-1)/(N+j), (N+j)/(N+j+1)]. Each piece is confirmed by exact iteration
/// at an interior rational point. Returns endpoints and return times for
/// j < J; the sliver beyond has return time > J.
struct ReturnPiece {
  ExactRational lo, hi;
  std::uint64_t time;
};

inline std::vector<ReturnPiece> return_pieces(std::uint64_t N, std::uint64_t J) {
  std::vector<ReturnPiece> out;
  out.push_back({ExactRational(std::uint64_t{1}, N), ExactRational(N, N + 1), 1});
  for (std::uint64_t j = 1; j < J; ++j) out.push_back({ExactRational(N + j - 1, N + j), ExactRational(N + j, N + j + 1), j + 1});
  for (const auto& p : out) {
    const ExactRational mid = (p.lo + p.hi) / ExactRational(2);
    const auto t = return_time(mid, N);
    if (t != p.time) {
      throw Error("return-time piece [" + p.lo.str() + ", " + p.hi.str() + "] has return time " + std::to_string(t) +
                  " at its midpoint, expected " + std::to_string(p.time));
    }
  }
  return out;
}

/// int_A H (1 - e^{-phi_A/sigma}) dmu for a grid function H, plus the sliver allowance.
inline std::pair<double, double> renewal_lhs(const GridFunction& H, const std::vector<ReturnPiece>& pieces, double sigma) {
  long double total = 0.0L;
  for (const auto& p : pieces) {
    const double w = -std::expm1(-static_cast<double>(p.time) / sigma);
    total += static_cast<long double>(w) * H.integral_mu(p.lo.to_double(), p.hi.to_double());
  }
  // Sliver next to 1: weight in [1 - e^{-(J+1)/sigma}, 1]; use the midpoint and half the spread.
  const double lo = pieces.back().hi.to_double();
  const double sliver = H.integral_mu(lo, 1.0);
  const double spread = std::exp(-static_cast<double>(pieces.size() + 1) / sigma);
  total += static_cast<long double>(sliver) * (1.0 - spread / 2.0);
  return {static_cast<double>(total), std::abs(sliver) * spread / 2.0};
}

inline double renewal_lhs_on_mesh(double sigma, int K, const MeshSpec& spec,
                                  const std::vector<ReturnPiece>& pieces, unsigned threads, double* sliver_err) {
  const auto mesh = make_mesh(spec);
  std::vector<long double> acc(mesh->size(), 0.0L);
  for_each_transfer_iterate(
      phi0_on(mesh), K,
      [&](int n, const GridFunction& g) {
        const long double w = std::exp(-static_cast<long double>(n) / sigma);
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += w * g.values()[i];
      },
      threads);
  std::vector<double> h(acc.begin(), acc.end());
  const GridFunction H(mesh, std::move(h), GridFlags{true, false});
  const auto [value, err] = renewal_lhs(H, pieces, sigma);
  if (sliver_err) *sliver_err = err;
  return value;
}

inline std::uint64_t renewal_piece_count(double sigma) {
  return static_cast<std::uint64_t>(std::max(std::ceil(40.0 * sigma), 64.0));
}

}  // namespace detail

/// Both sides of the renewal identity for f = phi_0 and A = [1/N, 1]:
/// left, the integral over A of (sum_{n<=K} e^{-n/sigma} T^n phi_0)(1 - e^{-phi_A/sigma}) against mu on the grid;
/// right, (N-1)/N + sum_{n=1}^{K} e^{-n/sigma} / ((n+N)(n+N-1)).
inline RenewalCheck renewal_identity_check(std::uint64_t N, double sigma, const RenewalOptions& opt = {}) {
  if (N < 2) throw DomainError("renewal_identity_check: N must be >= 2");
  if (!(sigma > 0.0)) throw DomainError("renewal_identity_check: sigma must be positive");
  RenewalCheck c;
  c.N = N;
  c.sigma = sigma;
  c.K = opt.K > 0 ? opt.K : static_cast<int>(std::max(50.0, std::ceil(40.0 * sigma)));
  if (static_cast<double>(c.K) < 20.0 * sigma) {
    throw InsufficientTruncation("renewal_identity_check: K = " + std::to_string(c.K) + " below 20*sigma");
  }
  const auto pieces = detail::return_pieces(N, detail::renewal_piece_count(sigma));
  c.pieces = pieces.size();
  double sliver = 0.0;
  c.lhs = detail::renewal_lhs_on_mesh(sigma, c.K, opt.mesh, pieces, opt.threads, &sliver);
  const long double Nl = static_cast<long double>(N);
  long double r = (Nl - 1.0L) / Nl;
  for (int n = 1; n <= c.K; ++n) {
    const long double m = static_cast<long double>(n) + Nl;
    r += std::exp(-static_cast<long double>(n) / sigma) / (m * (m - 1.0L));
  }
  c.rhs = static_cast<double>(r);
  c.difference = std::abs(c.lhs - c.rhs);
  // Operator-series tail: 0 <= T^n phi_0 <= 1, weight <= 1, mu(A) = log N.
  const double q = std::exp(-1.0 / sigma);
  const double tail = std::exp(-static_cast<double>(c.K + 1) / sigma) / (1.0 - q);
  c.truncation_tolerance = tail * std::log(static_cast<double>(N)) + tail + sliver;
  if (opt.estimate_discretization) {
    MeshSpec coarse = opt.mesh;
    coarse.nodes /= 2;
    const double lhs_coarse = detail::renewal_lhs_on_mesh(sigma, c.K, coarse, pieces, opt.threads, nullptr);
    c.discretization_tolerance = std::abs(lhs_coarse - c.lhs);
  }
  return c;
}

/// The same identity for f = 1, where T^n 1 = 1 and no grid is needed:
/// left (1/(1-q)) int_A (1 - q^{phi_A}) dmu, right log N + sum_{n>=1} q^n log((n+N)/(n+N-1)).
inline RenewalCheck renewal_identity_check_constant(std::uint64_t N, double sigma) {
  if (N < 2) throw DomainError("renewal_identity_check_constant: N must be >= 2");
  if (!(sigma > 0.0)) throw DomainError("renewal_identity_check_constant: sigma must be positive");
  RenewalCheck c;
  c.N = N;
  c.sigma = sigma;
  const std::uint64_t J = detail::renewal_piece_count(sigma) * 4;
  c.K = static_cast<int>(detail::series_cutoff(sigma));
  const auto pieces = detail::return_pieces(N, std::min<std::uint64_t>(J, 256));
  // Pieces past the verified ones follow the same closed form.
  long double mass = 0.0L;
  const long double Nl = static_cast<long double>(N);
  for (std::uint64_t j = 0; j < J; ++j) {
    const long double lo = j == 0 ? 1.0L / Nl : (Nl + j - 1) / (Nl + j);
    const long double hi = (Nl + j) / (Nl + j + 1);
    const long double mu = std::log(hi / lo);
    mass += -std::expm1(-static_cast<long double>(j + 1) / sigma) * mu;
  }
  const long double sliver = std::log((Nl + J) / (Nl + J - 1.0L));
  const long double spread = std::exp(-static_cast<long double>(J + 1) / sigma);
  mass += sliver * (1.0L - spread / 2.0L);
  const long double q = std::exp(-1.0L / sigma);
  c.pieces = J;
  c.lhs = static_cast<double>(mass / (1.0L - q));
  const KernelWeights ell(N);
  long double r = ell(0);
  for (int n = 1; n <= c.K; ++n) r += std::exp(-static_cast<long double>(n) / sigma) * ell(static_cast<std::uint64_t>(n));
  c.rhs = static_cast<double>(r);
  c.difference = std::abs(c.lhs - c.rhs);
  c.truncation_tolerance = static_cast<double>(sliver * spread / 2.0L / (1.0L - q)) +
                           static_cast<double>(std::exp(-static_cast<long double>(c.K + 1) / sigma) / (1.0L - q));
  return c;
}

// ---------------------------------------------------------------------------
// Convolution and the partial-sum remainder

/// |sum_{k<=n} sum_{j<=k} a_j l_N(k-j) - sum_{k<=n} a_k log(n-k+N)| for a = lambda.
inline double convolution_telescope_check(std::uint64_t N, int n, const std::vector<double>& lambda) {
  if (n < 0 || static_cast<std::size_t>(n) >= lambda.size()) throw DomainError("convolution_telescope_check: n out of range");
  const KernelWeights ell(N);
  long double lhs = 0.0L, rhs = 0.0L;
  for (int k = 0; k <= n; ++k) {
    for (int j = 0; j <= k; ++j) lhs += lambda[static_cast<std::size_t>(j)] * ell(static_cast<std::uint64_t>(k - j));
    rhs += lambda[static_cast<std::size_t>(k)] * std::log(static_cast<long double>(n - k) + static_cast<long double>(N));
  }
  return static_cast<double>(std::abs(lhs - rhs));
}

/// sum_{k=1}^{n} lambda_k log(1 - k/(n+N)), expected O(n / log n).
inline double partial_sum_remainder(std::uint64_t N, int n, const std::vector<double>& lambda) {
  if (n < 1 || static_cast<std::size_t>(n) >= lambda.size()) throw DomainError("partial_sum_remainder: n out of range");
  long double s = 0.0L;
  const long double d = static_cast<long double>(n) + static_cast<long double>(N);
  for (int k = 1; k <= n; ++k) s += lambda[static_cast<std::size_t>(k)] * std::log1p(-static_cast<long double>(k) / d);
  return static_cast<double>(s);
}

// ---------------------------------------------------------------------------
// Fit reports

struct FitPoint {
  double n_or_sigma = 0.0;
  double value = 0.0;
  double error = 0.0;
  double scaled_error = 0.0;
};

enum class Verdict { bounded, growing };

inline const char* to_string(Verdict v) { return v == Verdict::bounded ? "bounded" : "growing"; }

/// Growth threshold of the trend rule: see trend_verdict.
inline constexpr double kGrowthFactor = 2.0;

/// "growing" when the scaled errors increase at every step of the grid and
/// the last exceeds the first by kGrowthFactor; "bounded" otherwise. A
/// quantity that is O(1) may drift upward slowly over finitely many points, so
/// plain monotonicity alone is not treated as growth.
inline Verdict trend_verdict(const std::vector<FitPoint>& pts) {
  if (pts.size() < 2) return Verdict::bounded;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (!(pts[i].scaled_error > pts[i - 1].scaled_error)) return Verdict::bounded;
  }
  return pts.back().scaled_error > kGrowthFactor * pts.front().scaled_error ? Verdict::growing : Verdict::bounded;
}

struct FitReport {
  std::string law;
  /// Parameters as exact strings (u, alpha, beta, N, splice, mesh).
  std::map<std::string, std::string> params;
  std::string error_definition;
  std::vector<FitPoint> points;
  double K = 0.0;
  Verdict verdict = Verdict::bounded;

  void finish() {
    K = 0.0;
    for (const auto& p : points) K = std::max(K, p.scaled_error);
    verdict = trend_verdict(points);
  }
};

struct LawOptions {
  MeshSpec mesh;
  /// Exact enumeration for k <= splice, grid beyond.
  int splice = 22;
  EngineOptions engine;
};

namespace detail {

inline void stamp(FitReport& r, const LawOptions& opt) {
  r.params["splice"] = std::to_string(opt.splice);
  r.params["mesh"] = opt.mesh.str();
}

inline int max_n(const std::vector<double>& grid) {
  double m = 0.0;
  for (double g : grid) {
    if (!(g >= 1.0) || g != std::floor(g)) throw DomainError("law grid points must be positive integers");
    m = std::max(m, g);
  }
  return static_cast<int>(m);
}

}  // namespace detail

/// e(sigma) = |S(sigma) - sigma/(log sigma + C)|, expected O(1).
inline FitReport s_law_fit(std::uint64_t N, const std::vector<double>& sigmas, const LawOptions& opt = {}) {
  if (sigmas.empty()) throw DomainError("s_law_fit: empty grid");
  const double sigma_max = *std::max_element(sigmas.begin(), sigmas.end());
  const int K = LaplaceSeries::truncation_for(sigma_max);
  const auto seq = sumlevel_sequence(ExactRational(std::uint64_t{1}, N), K, opt.splice, opt.mesh, opt.engine);
  const LaplaceSeries series(N, seq.lambda);
  const double C = constant_C().value;
  FitReport r;
  r.law = "s";
  r.params["N"] = std::to_string(N);
  r.params["K_max"] = std::to_string(K);
  detail::stamp(r, opt);
  r.error_definition = "e = |S(sigma) - sigma/(log(sigma) + C)|; scaled_error = e";
  for (double sigma : sigmas) {
    if (!(sigma > 1.0)) throw DomainError("s_law_fit: sigma must exceed 1");
    const double S = series.S(sigma).value;
    const double e = std::abs(S - sigma / (std::log(sigma) + C));
    r.points.push_back({sigma, S, e, e});
  }
  r.finish();
  return r;
}

/// e_n = |sum_{k<=n} lambda(C_{k+1}^u) log n / (n log(1/u)) - 1|, scaled by log n.
inline FitReport partial_sum_law_fit(const ExactRational& u, const std::vector<double>& ns, const LawOptions& opt = {}) {
  const int n_max = detail::max_n(ns);
  const auto seq = sumlevel_sequence(u, n_max, opt.splice, opt.mesh, opt.engine);
  const double log_inv_u = -std::log(u.to_double());
  FitReport r;
  r.law = "partial";
  r.params["u"] = u.str();
  detail::stamp(r, opt);
  r.error_definition = "e_n = |sum_{k<=n} lambda(C_{k+1}^u) * log(n) / (n log(1/u)) - 1|; scaled_error = e_n * log(n)";
  std::vector<long double> prefix(seq.lambda.size());
  long double s = 0.0L;
  for (std::size_t k = 0; k < seq.lambda.size(); ++k) prefix[k] = s += seq.lambda[k];
  for (double nd : ns) {
    const auto n = static_cast<std::size_t>(nd);
    if (n < 2) throw DomainError("partial_sum_law_fit: n must be >= 2");
    const double value = static_cast<double>(prefix[n]);
    const double ln = std::log(nd);
    const double e = std::abs(value * ln / (nd * log_inv_u) - 1.0);
    r.points.push_back({nd, value, e, e * ln});
  }
  r.finish();
  return r;
}

/// e_n = |lambda(F^{-(n-1)}[alpha, beta]) log n / log(beta/alpha) - 1|, scaled by log n.
/// The measure is lambda(C_n^alpha) - lambda(C_n^beta), or lambda(C_n^alpha) when beta = 1.
inline FitReport pointwise_law_fit(const ExactRational& alpha, const ExactRational& beta, const std::vector<double>& ns,
                                   const LawOptions& opt = {}) {
  if (alpha.sign() <= 0 || !(alpha < beta) || beta > ExactRational(1)) {
    throw DomainError("pointwise_law_fit: need 0 < alpha < beta <= 1");
  }
  const int n_max = detail::max_n(ns);
  const bool full = beta == ExactRational(1);
  std::vector<ExactRational> us{alpha};
  if (!full) us.push_back(beta);
  const auto seqs = sumlevel_sequences(us, n_max - 1, opt.splice, opt.mesh, opt.engine);
  const double log_ratio = std::log(beta.to_double() / alpha.to_double());
  FitReport r;
  r.law = "pointwise";
  r.params["alpha"] = alpha.str();
  r.params["beta"] = beta.str();
  detail::stamp(r, opt);
  r.error_definition =
      "e_n = |lambda(F^{-(n-1)}[alpha,beta]) * log(n) / log(beta/alpha) - 1|; scaled_error = e_n * log(n)";
  for (double nd : ns) {
    const auto k = static_cast<std::size_t>(nd) - 1;
    if (nd < 2) throw DomainError("pointwise_law_fit: n must be >= 2");
    const double value = full ? seqs[0].lambda[k] : seqs[0].lambda[k] - seqs[1].lambda[k];
    const double ln = std::log(nd);
    const double e = std::abs(value * ln / log_ratio - 1.0);
    r.points.push_back({nd, value, e, e * ln});
  }
  r.finish();
  return r;
}

/// |sum_{k=1}^n lambda(C_{k+1}^{1/N}) log(1 - k/(n+N))| log n / n, expected bounded.
inline FitReport remainder_fit(std::uint64_t N, const std::vector<double>& ns, const LawOptions& opt = {}) {
  const int n_max = detail::max_n(ns);
  const auto seq = sumlevel_sequence(ExactRational(std::uint64_t{1}, N), n_max, opt.splice, opt.mesh, opt.engine);
  FitReport r;
  r.law = "remainder";
  r.params["N"] = std::to_string(N);
  detail::stamp(r, opt);
  r.error_definition = "R_n = sum_{k=1}^n lambda(C_{k+1}^{1/N}) log(1 - k/(n+N)); scaled_error = |R_n| log(n) / n";
  for (double nd : ns) {
    const int n = static_cast<int>(nd);
    const double R = partial_sum_remainder(N, n, seq.lambda);
    r.points.push_back({nd, R, std::abs(R), std::abs(R) * std::log(nd) / nd});
  }
  r.finish();
  return r;
}

/// Lemma-style fits in sigma: scaled_error = |deviation| sigma / log sigma.
inline FitReport lemma_fit(int which, std::uint64_t N, const std::vector<double>& sigmas) {
  if (which != 3 && which != 4) throw DomainError("lemma_fit: which must be 3 or 4");
  FitReport r;
  r.law = which == 3 ? "lemma3" : "lemma4";
  r.params["N"] = std::to_string(N);
  r.error_definition = which == 3 ? "e = |series - 1|; scaled_error = e * sigma / log(sigma)"
                                  : "e = |series - log(sigma + N) - C|; scaled_error = e * sigma / log(sigma)";
  const ConstantC C = constant_C();
  for (double sigma : sigmas) {
    const LemmaValue v = which == 3 ? lemma3_eval(sigma, N) : lemma4_eval(sigma, N, C);
    r.points.push_back({sigma, v.value, std::abs(v.deviation), v.scaled_deviation});
  }
  r.finish();
  return r;
}

}  // namespace farey
