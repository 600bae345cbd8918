#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "farey/preimage_engine.hpp"
#include "farey/stern_brocot.hpp"
#include "oracles.hpp"

using namespace farey;

namespace {

PreimageQuery query(ExactRational lo, ExactRational hi, int depth, ArithmeticMode mode = ArithmeticMode::exact) {
  PreimageQuery q;
  q.base = RationalInterval(std::move(lo), std::move(hi));
  q.depth = depth;
  q.mode = mode;
  return q;
}

}  // namespace

TEST(PreimageMeasure, MatchesNaiveEnumerationOnRandomIntervals) {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<long> den(1, 50);
  for (int t = 0; t < 40; ++t) {
    const long q = den(rng);
    long a = std::uniform_int_distribution<long>(0, q)(rng), b = std::uniform_int_distribution<long>(0, q)(rng);
    if (a > b) std::swap(a, b);
    const int depth = static_cast<int>(t % 11);
    const auto r = preimage_measure(query(ExactRational(a, q), ExactRational(b, q), depth));
    ASSERT_TRUE(r.lambda_exact.has_value());
    EXPECT_EQ(r.lambda_exact->get(), oracle::total_length(oracle::preimage_pieces(mpq_class(a, q), mpq_class(b, q), depth)))
        << a << "/" << q << " " << b << "/" << q << " depth " << depth;
    EXPECT_EQ(r.interval_count, std::uint64_t{1} << depth);
  }
}

TEST(PreimageMeasure, BigIntegerPathAgreesWithOracle) {
  const mpz_class big = (mpz_class(1) << 70) + 1;
  const ExactRational lo(big, big * 3 + 7), hi(2, 3);
  const auto r = preimage_measure(query(lo, hi, 6));
  EXPECT_EQ(r.lambda_exact->get(), oracle::total_length(oracle::preimage_pieces(lo.get(), hi.get(), 6)));
}

TEST(PreimageMeasure, MuIsInvariant) {
  const auto base = RationalInterval(ExactRational(2, 7), ExactRational(5, 6));
  const long double want = interval_mu(base);
  for (int d = 0; d <= 16; ++d) {
    const auto r = preimage_measure(query(base.lo(), base.hi(), d));
    ASSERT_TRUE(r.mu.has_value());
    EXPECT_NEAR(static_cast<double>(*r.mu - want), 0.0, 1e-15) << d;
  }
}

TEST(PreimageMeasure, NoMuWhenBaseTouchesZero) {
  const auto r = preimage_measure(query(ExactRational(0), ExactRational(1, 2), 3));
  EXPECT_FALSE(r.mu.has_value());
  EXPECT_EQ(r.lambda_exact->get(), oracle::total_length(oracle::preimage_pieces(0, mpq_class(1, 2), 3)));
}

TEST(PreimageMeasure, WholeIntervalStaysWhole) {
  for (int d = 0; d <= 10; ++d) EXPECT_EQ(*preimage_measure(query(ExactRational(0), ExactRational(1), d)).lambda_exact, ExactRational(1));
}

TEST(PreimageMeasure, DegenerateBaseHasZeroMeasure) {
  const auto r = preimage_measure(query(ExactRational(1, 3), ExactRational(1, 3), 5));
  EXPECT_EQ(*r.lambda_exact, ExactRational(0));
}

TEST(PreimageMeasure, ThreadsAndPrefixDoNotChangeTheResult) {
  const auto q = query(ExactRational(1, 3), ExactRational(7, 9), 18);
  const auto ref = preimage_measure(q);
  for (unsigned threads : {2U, 3U, 8U}) {
    for (int prefix : {0, 3, 10}) {
      EngineOptions opt;
      opt.threads = threads;
      opt.prefix_depth = prefix;
      const auto r = preimage_measure(q, opt);
      EXPECT_EQ(*r.lambda_exact, *ref.lambda_exact);
      EXPECT_EQ(r.mu, ref.mu);
      auto qf = q;
      qf.mode = ArithmeticMode::float64;
      EXPECT_EQ(preimage_measure(qf, opt).lambda, preimage_measure(qf).lambda);
    }
  }
}

TEST(PreimageMeasure, FloatModeWithinReportedBound) {
  for (int d : {5, 12, 20}) {
    auto q = query(ExactRational(1, 2), ExactRational(1), d);
    const auto exact = preimage_measure(q);
    q.mode = ArithmeticMode::float64;
    const auto fl = preimage_measure(q);
    EXPECT_FALSE(fl.lambda_exact.has_value());
    EXPECT_GT(fl.lambda_error_bound, 0.0);
    EXPECT_LE(std::abs(fl.lambda - exact.lambda), fl.lambda_error_bound) << d;
  }
}

TEST(PreimageMeasure, AutomaticModeSwitchesAtTheLimit) {
  EngineOptions opt;
  opt.exact_depth_limit = 6;
  auto q = query(ExactRational(1, 2), ExactRational(1), 6, ArithmeticMode::automatic);
  EXPECT_EQ(preimage_measure(q, opt).mode, ArithmeticMode::exact);
  q.depth = 7;
  EXPECT_EQ(preimage_measure(q, opt).mode, ArithmeticMode::float64);
}

TEST(PreimageMeasure, DepthLimits) {
  EXPECT_THROW(preimage_measure(query(ExactRational(1, 2), ExactRational(1), -1)), DomainError);
  EXPECT_THROW(preimage_measure(query(ExactRational(1, 2), ExactRational(1), kMaxPreimageDepth + 1)), DomainError);
}

TEST(PreimageSet, MatchesNaiveUnion) {
  for (int d = 0; d <= 12; ++d) {
    auto q = query(ExactRational(1, 4), ExactRational(3, 5), d);
    q.emit = EmitMode::set;
    const auto s = preimage_set(q);
    const auto want = oracle::merge(oracle::preimage_pieces(mpq_class(1, 4), mpq_class(3, 5), d));
    ASSERT_EQ(s.size(), want.size());
    for (std::size_t i = 0; i < want.size(); ++i) {
      EXPECT_EQ(s.intervals()[i].lo().get(), want[i].first);
      EXPECT_EQ(s.intervals()[i].hi().get(), want[i].second);
    }
  }
}

TEST(PreimageSet, CapacityBoundNamesTheStreamingPath) {
  auto q = query(ExactRational(1, 2), ExactRational(1), kDefaultMaxSetDepth + 1);
  try {
    preimage_set(q);
    FAIL() << "expected CapacityExceeded";
  } catch (const CapacityExceeded& e) {
    EXPECT_NE(std::string(e.what()).find("stream"), std::string::npos);
  }
}

TEST(SumLevelCylinders, AgreeWithSternBrocotAndPreimages) {
  for (int n = 1; n <= 16; ++n) {
    auto q = query(ExactRational(1, 2), ExactRational(1), n - 1);
    q.emit = EmitMode::set;
    EXPECT_EQ(sumlevel_intervals_cf(n), sumlevel_intervals_sb(n)) << n;
    EXPECT_EQ(sumlevel_intervals_cf(n), preimage_set(q)) << n;
    EXPECT_EQ(sumlevel_measure_cf(n), sumlevel_measure_sb(n)) << n;
  }
  EXPECT_THROW(sumlevel_intervals_cf(kDefaultMaxCompositionLevel + 1), CapacityExceeded);
}

TEST(IntegrateOverPreimage, PolynomialWeightsAreExact) {
  const Polynomial p{{ExactRational(1), ExactRational(-2), ExactRational(3)}};  // 1 - 2x + 3x^2
  const auto base = RationalInterval(ExactRational(1, 2), ExactRational(1));
  for (int d = 0; d <= 8; ++d) {
    mpq_class want = 0;
    for (const auto& [a, b] : oracle::preimage_pieces(mpq_class(1, 2), 1, d)) {
      auto F = [](const mpq_class& x) { return mpq_class(x - x * x + x * x * x); };
      want += F(b) - F(a);
    }
    EXPECT_EQ(integrate_polynomial_over_preimage(base, d, p).get(), want);
  }
}

TEST(IntegrateOverPreimage, CallableWeightsUseQuadrature) {
  const auto base = RationalInterval(ExactRational(1, 3), ExactRational(1));
  const std::function<double(double)> one_over_x = [](double x) { return 1.0 / x; };
  // The mu-measure is invariant, so integrating dx/x over any preimage returns log 3.
  for (int d : {0, 4, 9}) EXPECT_NEAR(integrate_over_preimage(base, d, one_over_x), std::log(3.0), 1e-8);
}
