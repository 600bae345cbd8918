#pragma once

// The transfer operator of F with respect to mu,
//
//   (T f)(x) = [f(x/(1+x)) + x f(1/(1+x))] / (1+x),
//
// in three forms: pointwise application, the 2^n-term recursion for T^n f(x),
// and a graded-mesh grid operator that reaches n in the tens of thousands.
// Cesaro and Laplace sums of T^k phi_0 (phi_0(x) = x) and their deviation
// checks are built on top.

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cfloat>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "farey/errors.hpp"
#include "farey/farey_dynamics.hpp"
#include "farey/numeric_core.hpp"
#include "farey/preimage_engine.hpp"

namespace farey {

enum class Interpolation { linear, monotone_cubic };

inline const char* to_string(Interpolation i) { return i == Interpolation::linear ? "linear" : "monotone-cubic"; }

inline constexpr std::size_t kDefaultMeshNodes = 4096;
inline constexpr double kDefaultMeshXMin = 1e-7;
inline constexpr double kDefaultUniformShare = 0.25;

/// Geometric nodes from x_min up to 1/2, then uniform nodes on [1/2, 1].
/// uniform_share is the fraction of the node budget spent on [1/2, 1].
struct MeshSpec {
  std::size_t nodes = kDefaultMeshNodes;
  double x_min = kDefaultMeshXMin;
  double uniform_share = kDefaultUniformShare;
  Interpolation interpolation = Interpolation::monotone_cubic;

  std::string str() const {
    auto shortest = [](double v) {
      char buf[32];
      return std::string(buf, std::to_chars(buf, buf + sizeof buf, v).ptr);
    };
    return "nodes=" + std::to_string(nodes) + " x_min=" + shortest(x_min) + " uniform_share=" + shortest(uniform_share) +
           " interpolation=" + to_string(interpolation);
  }
};

class Mesh {
 public:
  struct Location {
    std::size_t cell = 0;  // x[cell] <= y <= x[cell+1]
    double t = 0.0;        // (y - x[cell]) / h
    bool below = false;    // y < x[0]
  };

  explicit Mesh(const MeshSpec& spec = {}) : interpolation_(spec.interpolation) {
    if (spec.nodes < 16) throw DomainError("mesh needs at least 16 nodes");
    if (!(spec.x_min > 0.0 && spec.x_min < 0.5)) throw DomainError("mesh x_min must lie in (0, 1/2)");
    if (!(spec.uniform_share > 0.0 && spec.uniform_share < 1.0)) throw DomainError("mesh uniform_share must lie in (0, 1)");
    const auto uniform = static_cast<std::size_t>(static_cast<double>(spec.nodes) * spec.uniform_share);
    const std::size_t geometric = spec.nodes - uniform;
    if (uniform < 4 || geometric < 4) throw DomainError("mesh uniform_share leaves a part with fewer than 4 nodes");
    x_.reserve(spec.nodes);
    const double span = std::log(0.5 / spec.x_min);
    for (std::size_t i = 0; i < geometric; ++i) {
      x_.push_back(spec.x_min * std::exp(span * static_cast<double>(i) / static_cast<double>(geometric)));
    }
    for (std::size_t i = 0; i < uniform; ++i) {
      x_.push_back(0.5 + 0.5 * static_cast<double>(i) / static_cast<double>(uniform - 1));
    }
  }

  /// Arbitrary strictly increasing nodes in (0, 1] ending at 1.
  Mesh(std::vector<double> nodes, Interpolation interpolation) : x_(std::move(nodes)), interpolation_(interpolation) {
    if (x_.size() < 4) throw DomainError("mesh needs at least 4 nodes");
    if (!(x_.front() > 0.0) || x_.back() != 1.0) throw DomainError("mesh must lie in (0,1] and end at 1");
    for (std::size_t i = 1; i < x_.size(); ++i) {
      if (!(x_[i] > x_[i - 1])) throw DomainError("mesh nodes must be strictly increasing");
    }
  }

  const std::vector<double>& nodes() const noexcept { return x_; }
  std::size_t size() const noexcept { return x_.size(); }
  double operator[](std::size_t i) const { return x_[i]; }
  Interpolation interpolation() const noexcept { return interpolation_; }

  Location locate(double y) const {
    if (y < x_.front()) return {0, 0.0, true};
    auto it = std::upper_bound(x_.begin(), x_.end(), y);
    std::size_t j = static_cast<std::size_t>(it - x_.begin());
    j = j == 0 ? 0 : j - 1;
    if (j >= x_.size() - 1) j = x_.size() - 2;
    const double t = (y - x_[j]) / (x_[j + 1] - x_[j]);
    return {j, std::clamp(t, 0.0, 1.0), false};
  }

 private:
  std::vector<double> x_;
  Interpolation interpolation_;
};

using MeshPtr = std::shared_ptr<const Mesh>;

inline MeshPtr make_mesh(const MeshSpec& spec = {}) { return std::make_shared<const Mesh>(spec); }

struct GridFlags {
  /// Extend below x[0] linearly through (0, 0) instead of by the constant x[0]-value.
  bool vanishes_at_zero = false;
  /// Values must be nondecreasing; checked on construction.
  bool monotone_increasing = false;
};

/// Decreases smaller than this fraction of the largest |value| are treated as rounding noise by the monotone check.
inline constexpr double kMonotoneSlack = 64 * DBL_EPSILON;

/// Samples on a mesh plus an interpolant: piecewise linear, or the Steffen
/// monotone cubic Hermite interpolant, which never overshoots monotone data.
class GridFunction {
 public:
  GridFunction(MeshPtr mesh, std::vector<double> values, GridFlags flags = {})
      : mesh_(std::move(mesh)), v_(std::move(values)), flags_(flags) {
    if (!mesh_) throw DomainError("GridFunction: null mesh");
    if (v_.size() != mesh_->size()) throw DomainError("GridFunction: value count differs from mesh size");
    if (flags_.monotone_increasing) check_monotone();
    if (mesh_->interpolation() == Interpolation::monotone_cubic) compute_slopes();
  }

  template <class F>
  static GridFunction sample(MeshPtr mesh, F&& f, GridFlags flags = {}) {
    std::vector<double> v(mesh->size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f((*mesh)[i]);
    return GridFunction(std::move(mesh), std::move(v), flags);
  }

  const Mesh& mesh() const noexcept { return *mesh_; }
  const MeshPtr& mesh_ptr() const noexcept { return mesh_; }
  const std::vector<double>& values() const noexcept { return v_; }
  const std::vector<double>& slopes() const noexcept { return d_; }
  GridFlags flags() const noexcept { return flags_; }

  double operator()(double y) const { return eval(mesh_->locate(y), y); }

  double eval(const Mesh::Location& at, double y) const {
    if (at.below) return flags_.vanishes_at_zero ? v_[0] * (y / (*mesh_)[0]) : v_[0];
    const std::size_t j = at.cell;
    const double t = at.t;
    const double dv = v_[j + 1] - v_[j];
    if (d_.empty()) return v_[j] + dv * t;
    // v_j + dv h01(t) + h (d_j h10(t) + d_{j+1} h11(t)); constant data comes back exactly.
    const double h = (*mesh_)[j + 1] - (*mesh_)[j];
    const double s = 1.0 - t;
    return v_[j] + dv * (t * t * (3.0 - 2.0 * t)) + h * (d_[j] * t * s * s - d_[j + 1] * t * t * s);
  }

  /// Integral of the interpolant against dx/x over [a, b], 0 <= a <= b <= 1.
  double integral_mu(double a, double b) const {
    if (!(a >= 0.0 && a <= b && b <= 1.0)) throw DomainError("integral_mu: need 0 <= a <= b <= 1");
    if (a == b) return 0.0;
    const Mesh& m = *mesh_;
    double total = 0.0;
    const double x0 = m[0];
    if (a < x0) {
      const double top = std::min(b, x0);
      if (flags_.vanishes_at_zero) {
        total += v_[0] * (top - a) / x0;
      } else {
        if (a == 0.0 && v_[0] != 0.0) throw InfiniteMeasure("integral_mu: interpolant is nonzero at 0");
        if (a > 0.0) total += v_[0] * std::log(top / a);
      }
      if (b <= x0) return total;
      a = x0;
    }
    const Mesh::Location la = m.locate(a), lb = m.locate(b);
    for (std::size_t j = la.cell; j <= lb.cell; ++j) {
      const double ta = j == la.cell ? la.t : 0.0;
      const double tb = j == lb.cell ? lb.t : 1.0;
      if (tb > ta) total += cell_integral(j, ta, tb);
    }
    return total;
  }

 private:
  void check_monotone() const {
    double scale = 0.0;
    for (double v : v_) scale = std::max(scale, std::abs(v));
    const double slack = kMonotoneSlack * scale;
    for (std::size_t i = 1; i < v_.size(); ++i) {
      if (v_[i] < v_[i - 1] - slack) {
        std::ostringstream os;
        os.precision(17);
        os << "values flagged monotone decrease between nodes " << i - 1 << " and " << i << " (x=" << (*mesh_)[i]
           << ", " << v_[i - 1] << " -> " << v_[i] << "); refine the mesh";
        throw MeshInadequate(os.str());
      }
    }
  }

  void compute_slopes() {
    const Mesh& x = *mesh_;
    const std::size_t n = v_.size();
    d_.assign(n, 0.0);
    auto secant = [&](std::size_t i) { return (v_[i + 1] - v_[i]) / (x[i + 1] - x[i]); };
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double h0 = x[i] - x[i - 1], h1 = x[i + 1] - x[i];
      const double s0 = secant(i - 1), s1 = secant(i);
      if (s0 * s1 <= 0.0) continue;
      const double p = (s0 * h1 + s1 * h0) / (h0 + h1);
      d_[i] = std::copysign(std::min({2.0 * std::abs(s0), 2.0 * std::abs(s1), std::abs(p)}), p);
    }
    // One-sided parabolic end slopes, limited to keep the end cells monotone.
    auto end_slope = [](double h0, double h1, double s0, double s1) {
      const double p = s0 * (1.0 + h0 / (h0 + h1)) - s1 * h0 / (h0 + h1);
      if (p * s0 <= 0.0) return 0.0;
      return std::abs(p) > 2.0 * std::abs(s0) ? 2.0 * s0 : p;
    };
    d_[0] = end_slope(x[1] - x[0], x[2] - x[1], secant(0), secant(1));
    d_[n - 1] = end_slope(x[n - 1] - x[n - 2], x[n - 2] - x[n - 3], secant(n - 2), secant(n - 3));
  }

  // Integral over t in [ta, tb] of cell j. With x = h (t + r), dx/x = dt / (t + r).
  double cell_integral(std::size_t j, double ta, double tb) const {
    const Mesh& m = *mesh_;
    const double h = m[j + 1] - m[j];
    const double r = m[j] / h;
    const double dv = v_[j + 1] - v_[j];
    if (d_.empty()) {
      // (v_j + dv t)/(t + r) = dv + (v_j - r dv)/(t + r)
      return dv * (tb - ta) + (v_[j] - r * dv) * std::log1p((tb - ta) / (ta + r));
    }
    // Dividing the cubic by t + r cancels badly once r = x/h is large, so use
    // 5-point Gauss-Legendre instead. Cells are short relative to x, which
    // makes the rule exact to rounding.
    const Mesh::Location base{j, 0.0, false};
    auto g = [&](double t) {
      Mesh::Location at = base;
      at.t = t;
      return eval(at, 0.0) / (t + r);
    };
    return boost::math::quadrature::gauss<double, 5>::integrate(g, ta, tb);
  }

  MeshPtr mesh_;
  std::vector<double> v_;
  std::vector<double> d_;
  GridFlags flags_;
};

/// phi_0(x) = x sampled on a mesh.
inline GridFunction phi0_on(MeshPtr mesh) {
  return GridFunction::sample(std::move(mesh), [](double x) { return x; }, GridFlags{true, true});
}

// ---------------------------------------------------------------------------
// Pointwise forms

template <class F, class T>
T transfer_apply_pointwise(F&& f, const T& x) {
  const T one(1);
  const T d = one + x;
  return (f(x / d) + x * f(one / d)) / d;
}

inline constexpr int kMaxExactTransferDepth = 26;

namespace detail {

template <class T, class F>
void transfer_dfs(F& f, const T& y, const T& w, int k, int n, std::vector<T>& out) {
  out[static_cast<std::size_t>(k)] += w * f(y);
  if (k == n) return;
  const T one(1);
  const T d = one + y;
  const T wd = w / d;
  transfer_dfs(f, y / d, wd, k + 1, n, out);
  transfer_dfs(f, one / d, wd * y, k + 1, n, out);
}

}  // namespace detail

/// [T^0 f(x), ..., T^n f(x)] from the branch-word expansion: the node reached
/// by a word carries a point y and weight W, and T^k f(x) sums W f(y) over the
/// 2^k words of length k.
template <class F, class T>
std::vector<T> transfer_iterates_pointwise(F&& f, const T& x, int n) {
  if (n < 0) throw DomainError("transfer_iterates_pointwise: negative n");
  if (n > kMaxExactTransferDepth) {
    throw CapacityExceeded("transfer recursion depth " + std::to_string(n) + " exceeds " +
                           std::to_string(kMaxExactTransferDepth) + "; use the grid operator");
  }
  std::vector<T> out(static_cast<std::size_t>(n) + 1, T(0));
  detail::transfer_dfs(f, x, T(1), 0, n, out);
  return out;
}

template <class F, class T>
T transfer_iterate_exact(F&& f, const T& x, int n) {
  return transfer_iterates_pointwise(std::forward<F>(f), x, n).back();
}

// ---------------------------------------------------------------------------
// Grid operator

/// T on a fixed mesh. The image points x/(1+x) and 1/(1+x) of every node are
/// located once; each application is then a pass over the nodes.
class TransferGrid {
 public:
  explicit TransferGrid(MeshPtr mesh) : mesh_(std::move(mesh)) {
    const std::size_t n = mesh_->size();
    left_.resize(n);
    right_.resize(n);
    yl_.resize(n);
    yr_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double x = (*mesh_)[i];
      yl_[i] = x / (1.0 + x);
      yr_[i] = 1.0 / (1.0 + x);
      left_[i] = mesh_->locate(yl_[i]);
      right_[i] = mesh_->locate(yr_[i]);
    }
  }

  const MeshPtr& mesh() const noexcept { return mesh_; }

  /// Throws MeshInadequate if g is flagged monotone and the result is not.
  GridFunction apply(const GridFunction& g, unsigned threads = 1) const {
    if (g.mesh_ptr() != mesh_ && g.mesh().nodes() != mesh_->nodes()) {
      throw DomainError("TransferGrid::apply: function lives on a different mesh");
    }
    std::vector<double> out(mesh_->size());
    auto run = [&](std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i) {
        const double x = (*mesh_)[i];
        out[i] = (g.eval(left_[i], yl_[i]) + x * g.eval(right_[i], yr_[i])) / (1.0 + x);
      }
    };
    const std::size_t n = out.size();
    const unsigned workers = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(n / 1024 + 1)));
    if (workers == 1) {
      run(0, n);
    } else {
      std::vector<std::thread> pool;
      for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, n * w / workers, n * (w + 1) / workers);
      for (auto& t : pool) t.join();
    }
    return GridFunction(mesh_, std::move(out), g.flags());
  }

 private:
  MeshPtr mesh_;
  std::vector<Mesh::Location> left_, right_;
  std::vector<double> yl_, yr_;
};

inline GridFunction transfer_apply_grid(const GridFunction& g, unsigned threads = 1) {
  return TransferGrid(g.mesh_ptr()).apply(g, threads);
}

/// Calls visit(k, T^k g) for k = 0..n and returns T^n g.
template <class Visit>
GridFunction for_each_transfer_iterate(const GridFunction& g, int n, Visit&& visit, unsigned threads = 1) {
  if (n < 0) throw DomainError("transfer iteration count must be >= 0");
  const TransferGrid op(g.mesh_ptr());
  GridFunction cur = g;
  visit(0, static_cast<const GridFunction&>(cur));
  for (int k = 1; k <= n; ++k) {
    cur = op.apply(cur, threads);
    visit(k, static_cast<const GridFunction&>(cur));
  }
  return cur;
}

inline GridFunction transfer_iterate_grid(const GridFunction& g, int n, unsigned threads = 1) {
  return for_each_transfer_iterate(g, n, [](int, const GridFunction&) {}, threads);
}

/// lambda(C_n^u) for n = 1..n_max, i.e. the integral of T^{n-1} phi_0 over [u, 1] against mu.
inline std::vector<double> sumlevel_measures_grid(double u, int n_max, const MeshSpec& spec = {}, unsigned threads = 1) {
  if (!(u > 0.0 && u < 1.0)) throw DomainError("sumlevel_measures_grid: u must lie in (0,1)");
  if (n_max < 1) throw DomainError("sumlevel_measures_grid: n must be >= 1");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n_max));
  for_each_transfer_iterate(
      phi0_on(make_mesh(spec)), n_max - 1, [&](int, const GridFunction& g) { out.push_back(g.integral_mu(u, 1.0)); },
      threads);
  return out;
}

inline double sumlevel_measure_grid(double u, int n, const MeshSpec& spec = {}) {
  return sumlevel_measures_grid(u, n, spec).back();
}

// ---------------------------------------------------------------------------
// Spliced sum-level sequences

inline constexpr int kDefaultSplice = 20;

/// lambda[k] = lambda(C_{k+1}^u) for k = 0..K: exact enumeration for k <= splice,
/// grid operator beyond.
struct SumLevelSequence {
  ExactRational u;
  int splice = kDefaultSplice;
  MeshSpec mesh;
  std::vector<double> lambda;
  std::vector<ExactRational> exact;
  /// Grid values for every k, kept for cross-validation against the exact part.
  std::vector<double> grid;
};

/// Shares one run of the grid operator between several u.
inline std::vector<SumLevelSequence> sumlevel_sequences(const std::vector<ExactRational>& us, int K,
                                                        int splice = kDefaultSplice, const MeshSpec& spec = {},
                                                        const EngineOptions& engine = {}) {
  if (K < 0) throw DomainError("sumlevel_sequences: K must be >= 0");
  std::vector<SumLevelSequence> out(us.size());
  std::vector<double> lows(us.size());
  for (std::size_t i = 0; i < us.size(); ++i) {
    if (us[i].sign() <= 0 || us[i] >= ExactRational(1)) throw DomainError("sumlevel_sequences: u must lie in (0,1)");
    out[i].u = us[i];
    out[i].splice = splice;
    out[i].mesh = spec;
    out[i].lambda.assign(static_cast<std::size_t>(K) + 1, 0.0);
    out[i].grid.reserve(static_cast<std::size_t>(K) + 1);
    lows[i] = us[i].to_double();
  }
  for_each_transfer_iterate(
      phi0_on(make_mesh(spec)), K,
      [&](int, const GridFunction& g) {
        for (std::size_t i = 0; i < us.size(); ++i) out[i].grid.push_back(g.integral_mu(lows[i], 1.0));
      },
      engine.threads);
  for (std::size_t i = 0; i < us.size(); ++i) {
    const int top = std::min(splice, K);
    for (int k = 0; k <= top; ++k) {
      PreimageQuery q;
      q.base = RationalInterval(us[i], ExactRational(1));
      q.depth = k;
      q.mode = ArithmeticMode::exact;
      auto rep = preimage_measure(q, engine);
      out[i].exact.push_back(*rep.lambda_exact);
    }
    for (int k = 0; k <= K; ++k) {
      const auto idx = static_cast<std::size_t>(k);
      out[i].lambda[idx] = k <= top ? out[i].exact[idx].to_double() : out[i].grid[idx];
    }
  }
  return out;
}

inline SumLevelSequence sumlevel_sequence(const ExactRational& u, int K, int splice = kDefaultSplice,
                                          const MeshSpec& spec = {}, const EngineOptions& engine = {}) {
  return std::move(sumlevel_sequences({u}, K, splice, spec, engine).front());
}

// ---------------------------------------------------------------------------
// Laplace and Cesaro sums

struct TailedValue {
  double value = 0.0;
  /// Upper bound on the neglected tail.
  double tail_bound = 0.0;
};

/// a(sigma) = (1/log N) sum_{k <= floor sigma} lambda_k and its Laplace
/// transform S(sigma) = (1/log N) sum_n e^{-n/sigma} lambda_n, where
/// lambda_k = lambda(C_{k+1}^{1/N}).
class LaplaceSeries {
 public:
  LaplaceSeries(std::uint64_t N, std::vector<double> lambda) : N_(N), lambda_(std::move(lambda)) {
    if (N < 2) throw DomainError("LaplaceSeries: N must be >= 2");
    if (lambda_.empty()) throw DomainError("LaplaceSeries: empty sequence");
    log_N_ = std::log(static_cast<double>(N));
    prefix_.resize(lambda_.size());
    long double s = 0.0L;
    for (std::size_t k = 0; k < lambda_.size(); ++k) prefix_[k] = static_cast<double>(s += lambda_[k]);
  }

  /// Truncation K_max = max(20 sigma_max, 1000) for a sigma range up to sigma_max.
  static int truncation_for(double sigma_max) {
    return static_cast<int>(std::max(std::ceil(20.0 * sigma_max), 1000.0));
  }

  std::uint64_t N() const noexcept { return N_; }
  double log_N() const noexcept { return log_N_; }
  std::size_t truncation() const noexcept { return lambda_.size() - 1; }
  const std::vector<double>& lambda() const noexcept { return lambda_; }

  double a(double sigma) const {
    if (sigma < 0.0) return 0.0;
    const double k = std::floor(sigma);
    if (k > static_cast<double>(truncation())) {
      throw InsufficientTruncation("a(sigma): floor(sigma) exceeds the sequence length " + std::to_string(truncation()));
    }
    return prefix_[static_cast<std::size_t>(k)] / log_N_;
  }

  /// Requires K_max >= 20 sigma, so the tail is below e^{-20}/(1 - e^{-1/sigma}) / log N.
  TailedValue S(double sigma) const {
    if (!(sigma > 0.0)) throw DomainError("S(sigma): sigma must be positive");
    const std::size_t K = truncation();
    if (static_cast<double>(K) < 20.0 * sigma) {
      throw InsufficientTruncation("S(sigma): truncation " + std::to_string(K) + " below 20*sigma");
    }
    long double s = 0.0L;
    for (std::size_t n = 0; n <= K; ++n) s += std::exp(-static_cast<long double>(n) / sigma) * lambda_[n];
    const double q = std::exp(-1.0 / sigma);
    return {static_cast<double>(s) / log_N_, std::exp(-static_cast<double>(K + 1) / sigma) / (1.0 - q) / log_N_};
  }

 private:
  std::uint64_t N_;
  double log_N_;
  std::vector<double> lambda_;
  std::vector<double> prefix_;
};

struct AbelCheck {
  double sigma = 0.0;
  long double lhs = 0.0L;
  long double rhs = 0.0L;
  long double difference = 0.0L;
  /// Exact truncation defect e^{-(K+1)/sigma} A_K plus a rounding allowance.
  long double tolerance = 0.0L;
  bool holds() const { return std::abs(difference) <= tolerance; }
};

/// sum a_n q^n against (1 - q) sum q^n A_n with q = e^{-1/sigma}, both truncated at K.
/// For finite sums they differ by exactly q^{K+1} A_K.
inline AbelCheck abel_identity_check(const std::vector<double>& a, double sigma) {
  if (a.empty() || !(sigma > 0.0)) throw DomainError("abel_identity_check: need a nonempty sequence and sigma > 0");
  AbelCheck c;
  c.sigma = sigma;
  const long double q = std::exp(-1.0L / sigma);
  long double qn = 1.0L, A = 0.0L, abs_sum = 0.0L, weighted = 0.0L;
  for (double an : a) {
    A += an;
    c.lhs += an * qn;
    weighted += qn * A;
    abs_sum += std::abs(an) * qn;
    qn *= q;
  }
  c.rhs = (1.0L - q) * weighted;
  c.difference = c.lhs - c.rhs;
  c.tolerance = qn * std::abs(A) + 64.0L * LDBL_EPSILON * static_cast<long double>(a.size()) * (abs_sum + std::abs(A));
  return c;
}

struct LemmaOptions {
  MeshSpec mesh;
  /// T^k phi_0(x) by the branch-word recursion for k up to here, grid beyond.
  int exact_limit = 20;
  int splice = kDefaultSplice;
  /// Sample points, equally spaced on [1/N, 1] including both ends.
  std::size_t samples = 17;
  EngineOptions engine;
};

/// values[k][i] = T^k phi_0(xs[i]) for k = 0..K.
inline std::vector<std::vector<double>> sample_phi0_iterates(const std::vector<double>& xs, int K,
                                                             const LemmaOptions& opt = {}) {
  std::vector<std::vector<double>> values(static_cast<std::size_t>(K) + 1, std::vector<double>(xs.size()));
  const int exact_top = std::min(opt.exact_limit, K);
  auto phi0 = [](double y) { return y; };
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const auto it = transfer_iterates_pointwise(phi0, xs[i], exact_top);
    for (int k = 0; k <= exact_top; ++k) values[static_cast<std::size_t>(k)][i] = it[static_cast<std::size_t>(k)];
  }
  if (K > exact_top) {
    for_each_transfer_iterate(
        phi0_on(make_mesh(opt.mesh)), K,
        [&](int k, const GridFunction& g) {
          if (k <= exact_top) return;
          for (std::size_t i = 0; i < xs.size(); ++i) values[static_cast<std::size_t>(k)][i] = g(xs[i]);
        },
        opt.engine.threads);
  }
  return values;
}

inline std::vector<double> lemma_sample_points(std::uint64_t N, std::size_t count) {
  if (count < 2) throw DomainError("need at least two sample points");
  std::vector<double> xs(count);
  const double lo = 1.0 / static_cast<double>(N);
  for (std::size_t i = 0; i < count; ++i) xs[i] = lo + (1.0 - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  return xs;
}

struct DeviationCheck {
  std::uint64_t N = 2;
  /// n for the Cesaro check, sigma for the Laplace check.
  double parameter = 0.0;
  double deviation = 0.0;
  double x_at_max = 0.0;
  double bound = 0.0;
  /// Truncation tails that could hide part of the deviation (Laplace check only).
  double tail = 0.0;
  bool holds() const { return deviation <= bound + tail; }
};

inline double lemma_bound(std::uint64_t N) { return static_cast<double>(N) * static_cast<double>(N - 1) / 2.0; }

/// max over sample x in [1/N,1] of |sum_{k<=n} T^k phi_0(x) - a(n)|, for every n = 0..n_max.
inline std::vector<DeviationCheck> cesaro_deviations(std::uint64_t N, int n_max, const LemmaOptions& opt = {}) {
  if (N < 2) throw DomainError("cesaro_deviations: N must be >= 2");
  if (n_max < 0) throw DomainError("cesaro_deviations: n must be >= 0");
  const auto xs = lemma_sample_points(N, opt.samples);
  const auto values = sample_phi0_iterates(xs, n_max, opt);
  const auto seq = sumlevel_sequence(ExactRational(std::uint64_t{1}, N), n_max, opt.splice, opt.mesh, opt.engine);
  const LaplaceSeries series(N, seq.lambda);
  std::vector<DeviationCheck> out;
  std::vector<long double> partial(xs.size(), 0.0L);
  for (int n = 0; n <= n_max; ++n) {
    DeviationCheck c;
    c.N = N;
    c.parameter = n;
    c.bound = lemma_bound(N);
    const double a = series.a(n);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      partial[i] += values[static_cast<std::size_t>(n)][i];
      const double dev = std::abs(static_cast<double>(partial[i]) - a);
      if (dev > c.deviation) {
        c.deviation = dev;
        c.x_at_max = xs[i];
      }
    }
    out.push_back(c);
  }
  return out;
}

inline DeviationCheck cesaro_deviation(std::uint64_t N, int n, const LemmaOptions& opt = {}) {
  return cesaro_deviations(N, n, opt).back();
}

/// max over sample x of |sum_n e^{-n/sigma} T^n phi_0(x) - S(sigma)| for each sigma,
/// truncated at K_max = max(20 sigma_max, 1000).
inline std::vector<DeviationCheck> laplace_deviations(std::uint64_t N, const std::vector<double>& sigmas,
                                                      const LemmaOptions& opt = {}) {
  if (N < 2) throw DomainError("laplace_deviations: N must be >= 2");
  if (sigmas.empty()) return {};
  const double sigma_max = *std::max_element(sigmas.begin(), sigmas.end());
  const int K = LaplaceSeries::truncation_for(sigma_max);
  const auto xs = lemma_sample_points(N, opt.samples);
  const auto values = sample_phi0_iterates(xs, K, opt);
  const auto seq = sumlevel_sequence(ExactRational(std::uint64_t{1}, N), K, opt.splice, opt.mesh, opt.engine);
  const LaplaceSeries series(N, seq.lambda);
  std::vector<DeviationCheck> out;
  for (double sigma : sigmas) {
    const TailedValue S = series.S(sigma);
    DeviationCheck c;
    c.N = N;
    c.parameter = sigma;
    c.bound = lemma_bound(N);
    // Pointwise tail: 0 <= T^n phi_0 <= 1 because T is positive and fixes 1.
    const double q = std::exp(-1.0 / sigma);
    c.tail = S.tail_bound + std::exp(-static_cast<double>(K + 1) / sigma) / (1.0 - q);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      long double s = 0.0L;
      for (int n = 0; n <= K; ++n) {
        s += std::exp(-static_cast<long double>(n) / sigma) * values[static_cast<std::size_t>(n)][i];
      }
      const double dev = std::abs(static_cast<double>(s) - S.value);
      if (dev > c.deviation) {
        c.deviation = dev;
        c.x_at_max = xs[i];
      }
    }
    out.push_back(c);
  }
  return out;
}

inline DeviationCheck laplace_deviation(std::uint64_t N, double sigma, const LemmaOptions& opt = {}) {
  return laplace_deviations(N, {sigma}, opt).front();
}

struct DualityReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double difference = 0.0;
  /// Error estimate of the adaptive quadrature on the left side.
  double quadrature_error = 0.0;
};

/// Integral of T g over B against mu, by adaptive Gauss-Kronrod on the
/// pointwise image of the interpolant, against the integral of g over
/// F^{-1}(B) = psi_left(B) u psi_right(B), in closed form on the grid.
inline DualityReport duality_check(const GridFunction& g, const RationalInterval& B) {
  if (B.lo().is_zero()) throw InfiniteMeasure("duality_check: B must avoid 0");
  const auto [L, R] = inverse_branch_images(B);
  DualityReport rep;
  auto Tg = [&](double x) { return transfer_apply_pointwise(g, x) / x; };
  double err = 0.0;
  rep.lhs = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(Tg, B.lo().to_double(), B.hi().to_double(),
                                                                          20, 1e-14, &err);
  rep.quadrature_error = err;
  rep.rhs = g.integral_mu(L.lo().to_double(), L.hi().to_double()) + g.integral_mu(R.lo().to_double(), R.hi().to_double());
  rep.difference = std::abs(rep.lhs - rep.rhs);
  return rep;
}

}  // namespace farey
