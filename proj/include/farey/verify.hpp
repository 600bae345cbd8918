#pragma once

// Self-check suites run by `farey verify`. Each check catches its own
// exceptions, so a failure is recorded and the suite carries on.

#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "farey/asymptotics.hpp"
#include "farey/farey_dynamics.hpp"
#include "farey/preimage_engine.hpp"
#include "farey/report.hpp"
#include "farey/stern_brocot.hpp"
#include "farey/transfer_operator.hpp"

namespace farey {

enum class Suite { oracles, lemmas, laws, all };

inline Suite parse_suite(const std::string& s) {
  if (s == "oracles") return Suite::oracles;
  if (s == "lemmas") return Suite::lemmas;
  if (s == "laws") return Suite::laws;
  if (s == "all") return Suite::all;
  throw DomainError("unknown suite '" + s + "' (expected oracles, lemmas, laws or all)");
}

struct CheckResult {
  std::string suite;
  std::string name;
  bool passed = false;
  std::string detail;
  nlohmann::ordered_json data = nlohmann::ordered_json::object();
};

struct VerifyOptions {
  MeshSpec mesh;
  EngineOptions engine;
};

inline nlohmann::ordered_json to_json(const CheckResult& c) {
  return {{"suite", c.suite}, {"name", c.name}, {"passed", c.passed}, {"detail", c.detail}, {"data", c.data}};
}

namespace detail {

using CheckBody = std::function<void(CheckResult&)>;

inline CheckResult run_check(const std::string& suite, const std::string& name, const CheckBody& body) {
  CheckResult c;
  c.suite = suite;
  c.name = name;
  try {
    body(c);
  } catch (const std::exception& e) {
    c.passed = false;
    c.detail = std::string("exception: ") + e.what();
  }
  return c;
}

inline const std::vector<ExactRational>& small_n_values() {
  static const std::vector<ExactRational> v{ExactRational(1, 2), ExactRational(1, 3), ExactRational(3, 10),
                                            ExactRational(39, 140), ExactRational(1129, 4290)};
  return v;
}

inline std::vector<CheckResult> oracle_suite(const VerifyOptions& opt) {
  const std::string S = "oracles";
  std::vector<CheckResult> out;

  out.push_back(run_check(S, "small_n_exact_measures", [&](CheckResult& c) {
    c.passed = true;
    for (int n = 1; n <= 5; ++n) {
      PreimageQuery q;
      q.depth = n - 1;
      q.mode = ArithmeticMode::exact;
      const ExactRational sb = sumlevel_measure_sb(n), cf = sumlevel_measure_cf(n),
                          pre = *preimage_measure(q, opt.engine).lambda_exact;
      const auto& want = small_n_values()[static_cast<std::size_t>(n - 1)];
      c.data[std::to_string(n)] = want.str();
      if (!(sb == want && cf == want && pre == want)) {
        c.passed = false;
        c.detail += "n=" + std::to_string(n) + " sb=" + sb.str() + " cf=" + cf.str() + " preimage=" + pre.str() + "; ";
      }
    }
  }));

  out.push_back(run_check(S, "triple_construction_set_equality", [&](CheckResult& c) {
    c.passed = true;
    for (int n = 2; n <= 18; ++n) {
      PreimageQuery q;
      q.depth = n - 1;
      q.emit = EmitMode::set;
      const auto a = sumlevel_intervals_sb(n), b = sumlevel_intervals_cf(n), p = preimage_set(q, opt.engine);
      if (!(a == b && b == p)) {
        c.passed = false;
        c.detail += "mismatch at n=" + std::to_string(n) + "; ";
      }
    }
    c.data["n_max"] = 18;
  }));

  out.push_back(run_check(S, "membership_oracle_equivalence", [&](CheckResult& c) {
    std::size_t tested = 0, bad = 0;
    for (std::uint64_t q = 1; q <= 60; ++q) {
      for (std::uint64_t p = 1; p <= q; ++p) {
        if (std::gcd(p, q) != 1) continue;
        const ExactRational x(p, q);
        for (std::uint64_t n = 1; n <= 25; ++n) {
          ++tested;
          if (sum_level_membership(x, n) != sum_level_membership_dynamical(x, n)) ++bad;
        }
      }
    }
    c.passed = bad == 0;
    c.data["pairs"] = tested;
    c.data["disagreements"] = bad;
  }));

  out.push_back(run_check(S, "cf_conjugacy", [&](CheckResult& c) {
    std::mt19937_64 rng(20240611);
    std::uniform_int_distribution<std::uint64_t> den(3, 1'000'000);
    std::size_t tested = 0, bad = 0;
    while (tested < 2000) {
      const std::uint64_t q = den(rng);
      const std::uint64_t p = std::uniform_int_distribution<std::uint64_t>(1, q)(rng);
      const ExactRational x(p, q);
      const CFWord w = cf_encode(x);
      if (w.size() < 2) continue;
      ++tested;
      if (cf_decode(farey_cf_step(w)) != farey_forward(x)) ++bad;
    }
    c.passed = bad == 0;
    c.data["samples"] = tested;
  }));

  out.push_back(run_check(S, "stern_brocot_unimodular", [&](CheckResult& c) {
    c.passed = true;
    for (int n = 0; n <= 20; ++n) {
      const auto level = sb_generate(n);
      for (std::size_t i = 0; i + 1 < level.fractions.size(); ++i) {
        const auto a = level.fractions[i], b = level.fractions[i + 1];
        if (std::uint64_t{b.num} * a.den - std::uint64_t{a.num} * b.den != 1) {
          c.passed = false;
          c.detail = "level " + std::to_string(n) + " index " + std::to_string(i);
          return;
        }
      }
    }
  }));

  out.push_back(run_check(S, "mu_invariance", [&](CheckResult& c) {
    const RationalInterval base(ExactRational(1, 3), ExactRational(4, 5));
    const long double want = interval_mu<long double>(base);
    long double worst = 0.0L;
    for (int n = 0; n <= 18; ++n) {
      PreimageQuery q;
      q.base = base;
      q.depth = n;
      q.mode = ArithmeticMode::float64;
      worst = std::max(worst, std::abs(*preimage_measure(q, opt.engine).mu - want));
    }
    c.passed = worst <= 1e-12L;
    c.data["max_abs_error"] = static_cast<double>(worst);
  }));

  out.push_back(run_check(S, "monotone_decrease_exact", [&](CheckResult& c) {
    c.passed = true;
    for (const ExactRational& u : {ExactRational(1, 2), ExactRational(1, 3), ExactRational(1, 5), ExactRational(7, 10)}) {
      ExactRational prev;
      for (int n = 1; n <= 23; ++n) {
        PreimageQuery q;
        q.base = RationalInterval(u, ExactRational(1));
        q.depth = n - 1;
        q.mode = ArithmeticMode::exact;
        ExactRational cur = *preimage_measure(q, opt.engine).lambda_exact;
        if (n > 1 && !(cur < prev)) {
          c.passed = false;
          c.detail += "u=" + u.str() + " n=" + std::to_string(n - 1) + "; ";
        }
        prev = std::move(cur);
      }
    }
  }));

  out.push_back(run_check(S, "grid_matches_exact", [&](CheckResult& c) {
    const auto grid = sumlevel_measures_grid(0.5, 20, opt.mesh, opt.engine.threads);
    double worst = 0.0;
    for (int n = 1; n <= 20; ++n) {
      PreimageQuery q;
      q.depth = n - 1;
      q.mode = ArithmeticMode::exact;
      const double exact = preimage_measure(q, opt.engine).lambda;
      worst = std::max(worst, std::abs(grid[static_cast<std::size_t>(n - 1)] - exact) / exact);
    }
    c.passed = worst <= 1e-6;
    c.data["max_rel_error"] = worst;
    c.data["mesh"] = opt.mesh.str();
  }));

  out.push_back(run_check(S, "monotone_decrease_grid", [&](CheckResult& c) {
    c.passed = true;
    const std::vector<ExactRational> us{ExactRational(1, 2), ExactRational(1, 3), ExactRational(1, 5), ExactRational(7, 10)};
    const auto seqs = sumlevel_sequences(us, 10000, -1, opt.mesh, opt.engine);
    constexpr double tol = 1e-12;
    for (const auto& s : seqs) {
      for (std::size_t k = 1; k < s.grid.size(); ++k) {
        if (s.grid[k] > s.grid[k - 1] + tol) {
          c.passed = false;
          c.detail += "u=" + s.u.str() + " n=" + std::to_string(k) + "; ";
          break;
        }
      }
    }
    c.data["n_max"] = 10001;
    c.data["tolerance"] = tol;
  }));

  return out;
}

inline std::vector<CheckResult> lemma_suite(const VerifyOptions& opt) {
  const std::string S = "lemmas";
  std::vector<CheckResult> out;
  LemmaOptions lo;
  lo.mesh = opt.mesh;
  lo.engine = opt.engine;

  for (std::uint64_t N : {2, 3, 5}) {
    out.push_back(run_check(S, "cesaro_bound_N" + std::to_string(N), [&](CheckResult& c) {
      const auto devs = cesaro_deviations(N, 30, lo);
      c.passed = true;
      double worst = 0.0;
      for (const auto& d : devs) {
        worst = std::max(worst, d.deviation);
        if (!d.holds()) c.passed = false;
      }
      c.data["max_deviation"] = worst;
      c.data["bound"] = lemma_bound(N);
    }));
    out.push_back(run_check(S, "laplace_bound_N" + std::to_string(N), [&](CheckResult& c) {
      const auto devs = laplace_deviations(N, {10.0, 100.0, 1000.0}, lo);
      c.passed = true;
      for (const auto& d : devs) {
        c.data["sigma_" + format_real(d.parameter)] = d.deviation;
        if (!d.holds()) c.passed = false;
      }
      c.data["bound"] = lemma_bound(N);
    }));
  }

  out.push_back(run_check(S, "abel_summation_identity", [&](CheckResult& c) {
    const auto seq = sumlevel_sequence(ExactRational(1, 2), 1000, kDefaultSplice, opt.mesh, opt.engine);
    const auto a = abel_identity_check(seq.lambda, 50.0);
    c.passed = a.holds();
    c.data["difference"] = static_cast<double>(a.difference);
    c.data["tolerance"] = static_cast<double>(a.tolerance);
  }));

  out.push_back(run_check(S, "constant_C", [&](CheckResult& c) {
    const ConstantC C = constant_C();
    c.passed = std::abs(C.value + C.gamma_ref) <= 1e-10;
    c.data["C"] = C.value;
    c.data["head"] = C.head;
    c.data["tail"] = C.tail;
  }));

  for (std::uint64_t N : {2, 3}) {
    for (int which : {3, 4}) {
      out.push_back(run_check(S, "lemma" + std::to_string(which) + "_trend_N" + std::to_string(N), [&](CheckResult& c) {
        const FitReport r = lemma_fit(which, N, {1e2, 1e3, 1e4});
        c.passed = r.verdict == Verdict::bounded;
        for (const auto& p : r.points) {
          const LemmaValue v = which == 3 ? lemma3_eval(p.n_or_sigma, N) : lemma4_eval(p.n_or_sigma, N);
          if (std::abs(v.value - v.integral_form) > v.integral_error + v.tail_bound + 1e-12) {
            c.passed = false;
            c.detail += "integral form differs at sigma=" + format_real(p.n_or_sigma) + "; ";
          }
        }
        c.data = to_json(r);
      }));
    }
  }

  for (std::uint64_t N : {2, 3}) {
    for (double sigma : {0.5, 2.0, 10.0}) {
      out.push_back(run_check(S, "renewal_identity_N" + std::to_string(N) + "_sigma" + format_real(sigma),
                              [&](CheckResult& c) {
                                RenewalOptions ro;
                                ro.mesh = opt.mesh;
                                ro.threads = opt.engine.threads;
                                const auto r = renewal_identity_check(N, sigma, ro);
                                const auto k = renewal_identity_check_constant(N, sigma);
                                c.passed = r.holds() && k.holds();
                                c.data["difference"] = r.difference;
                                c.data["tolerance"] = r.tolerance();
                                c.data["constant_difference"] = k.difference;
                                c.data["constant_tolerance"] = k.tolerance();
                              }));
    }
  }

  out.push_back(run_check(S, "convolution_telescope", [&](CheckResult& c) {
    const auto seq = sumlevel_sequence(ExactRational(1, 2), 50, kDefaultSplice, opt.mesh, opt.engine);
    double worst = convolution_telescope_check(2, 50, seq.lambda);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int t = 0; t < 100; ++t) {
      std::vector<double> a(51);
      for (auto& v : a) v = unit(rng);
      worst = std::max(worst, convolution_telescope_check(2 + static_cast<std::uint64_t>(t % 4), 50, a));
    }
    c.passed = worst <= 1e-12;
    c.data["max_difference"] = worst;
  }));

  out.push_back(run_check(S, "duality", [&](CheckResult& c) {
    const auto mesh = make_mesh(opt.mesh);
    const auto phi = phi0_on(mesh);
    const auto one = GridFunction::sample(mesh, [](double) { return 1.0; });
    double worst = 0.0;
    for (const auto& B : {RationalInterval(ExactRational(1, 2), ExactRational(1)),
                          RationalInterval(ExactRational(1, 3), ExactRational(2, 3)),
                          RationalInterval(ExactRational(1, 7), ExactRational(5, 6))}) {
      worst = std::max({worst, duality_check(phi, B).difference, duality_check(one, B).difference});
    }
    c.passed = worst <= 1e-10;
    c.data["max_difference"] = worst;
  }));

  return out;
}

inline std::vector<CheckResult> law_suite(const VerifyOptions& opt) {
  const std::string S = "laws";
  std::vector<CheckResult> out;
  LawOptions lo;
  lo.mesh = opt.mesh;
  lo.engine = opt.engine;
  const std::vector<double> grid{1e2, 1e3, 1e4};
  auto fit_check = [&](const std::string& name, auto make) {
    out.push_back(run_check(S, name, [&](CheckResult& c) {
      const FitReport r = make();
      c.passed = r.verdict == Verdict::bounded;
      c.detail = "K=" + format_real(r.K);
      c.data = to_json(r);
    }));
  };
  for (const auto& u : {ExactRational(1, 2), ExactRational(1, 3)}) {
    fit_check("partial_sum_law_u" + u.str(), [&] { return partial_sum_law_fit(u, grid, lo); });
  }
  fit_check("pointwise_law_1/2_1", [&] { return pointwise_law_fit(ExactRational(1, 2), ExactRational(1), grid, lo); });
  fit_check("pointwise_law_1/3_2/3",
            [&] { return pointwise_law_fit(ExactRational(1, 3), ExactRational(2, 3), grid, lo); });
  for (std::uint64_t N : {2, 3}) {
    fit_check("laplace_law_N" + std::to_string(N), [&] { return s_law_fit(N, grid, lo); });
  }
  fit_check("partial_sum_remainder_N2", [&] { return remainder_fit(2, grid, lo); });

  out.push_back(run_check(S, "splice_vs_grid_partial_sum", [&](CheckResult& c) {
    const auto spliced = sumlevel_sequence(ExactRational(1, 2), 100, 22, opt.mesh, opt.engine);
    long double a = 0.0L, b = 0.0L;
    for (std::size_t k = 0; k <= 100; ++k) {
      a += spliced.lambda[k];
      b += spliced.grid[k];
    }
    const double rel = static_cast<double>(std::abs(a - b) / a);
    c.passed = rel <= 1e-6;
    c.data["rel_difference"] = rel;
  }));

  out.push_back(run_check(S, "pointwise_grid_vs_exact", [&](CheckResult& c) {
    const auto seqs = sumlevel_sequences({ExactRational(1, 3), ExactRational(2, 3)}, 9, -1, opt.mesh, opt.engine);
    const double grid_value = seqs[0].grid[9] - seqs[1].grid[9];
    PreimageQuery q;
    q.base = RationalInterval(ExactRational(1, 3), ExactRational(2, 3));
    q.depth = 9;
    q.mode = ArithmeticMode::exact;
    const double exact = preimage_measure(q, opt.engine).lambda;
    const double rel = std::abs(grid_value - exact) / exact;
    c.passed = rel <= 1e-6;
    c.data["rel_difference"] = rel;
  }));
  return out;
}

}  // namespace detail

inline std::vector<CheckResult> run_suite(Suite s, const VerifyOptions& opt = {}) {
  std::vector<CheckResult> out;
  auto append = [&](std::vector<CheckResult> v) { out.insert(out.end(), v.begin(), v.end()); };
  if (s == Suite::oracles || s == Suite::all) append(detail::oracle_suite(opt));
  if (s == Suite::lemmas || s == Suite::all) append(detail::lemma_suite(opt));
  if (s == Suite::laws || s == Suite::all) append(detail::law_suite(opt));
  return out;
}

}  // namespace farey
