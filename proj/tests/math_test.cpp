#include "mlagg/math.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <gtest/gtest.h>

using namespace mlagg;
using namespace mlagg::math;

namespace {

// Reference values computed with mpmath at 40 significant digits.
struct Reference {
  double x;
  double value;
};

constexpr Reference kDigamma[] = {
    {1.0, -0.57721566490153286061},
    {2.0, 0.42278433509846713939},
    {0.5, -1.9635100260214234794},
    {1e-3, -1000.5755719318102797},
    {0.1, -10.423754940411076232},
    {3.7, 1.1671535393615114409},
    {10.0, 2.2517525890667211076},
    {123.456, 4.8118293238289854123},
    {1e6, 13.815510057964190771},
};

constexpr Reference kLogGamma[] = {
    {0.5, 0.5723649429247000870717},
    {1e-3, 6.907178885383853661684},
    {0.1, 2.252712651734205902006},
    {0.999, 0.0005780385328913802381689},
    {1.001, -0.0005763935982833061515192},
    {1.5, -0.1207822376352452223455},
    {2.5, 0.2846828704729191596325},
    {3.7, 1.4280723266653881292},
    {12.9, 19.73501585071300574307},
    {13.1, 20.24021272340143468099},
    {123.456, 469.6055471299294835002},
    {1e6, 12815504.56914761165998},
};

}  // namespace

TEST(Digamma, MatchesHighPrecisionReference) {
  for (const auto& ref : kDigamma) {
    EXPECT_NEAR(digamma(ref.x), ref.value, 1e-10) << "x = " << ref.x;
  }
}

TEST(Digamma, SpecExamples) {
  EXPECT_NEAR(digamma(1.0), -0.5772156649, 1e-10);
  EXPECT_NEAR(digamma(2.0), 0.4227843351, 1e-10);
  EXPECT_NEAR(digamma(0.5), -1.9635100260, 1e-10);
}

TEST(Digamma, RecurrenceHoldsOnRandomArguments) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(0.01, 100.0);
  for (int trial = 0; trial < 2000; ++trial) {
    const double x = dist(rng);
    EXPECT_NEAR(digamma(x + 1.0) - digamma(x) - 1.0 / x, 0.0, 1e-10) << "x = " << x;
  }
}

TEST(Digamma, RejectsNonPositiveAndNonFinite) {
  EXPECT_THROW(digamma(0.0), DomainError);
  EXPECT_THROW(digamma(-1.5), DomainError);
  EXPECT_THROW(digamma(std::numeric_limits<double>::infinity()), DomainError);
  EXPECT_THROW(digamma(std::numeric_limits<double>::quiet_NaN()), DomainError);
}

TEST(LogGamma, MatchesHighPrecisionReference) {
  for (const auto& ref : kLogGamma) {
    EXPECT_NEAR(log_gamma(ref.x), ref.value, 1e-12 * std::abs(ref.value)) << "x = " << ref.x;
  }
}

TEST(LogGamma, SpecExamples) {
  EXPECT_EQ(log_gamma(1.0), 0.0);
  EXPECT_EQ(log_gamma(2.0), 0.0);
  EXPECT_NEAR(log_gamma(5.0), std::log(24.0), 1e-12 * std::log(24.0));
  EXPECT_NEAR(log_gamma(0.5), 0.5 * std::log(std::acos(-1.0)), 1e-12);
}

TEST(LogGamma, AgreesWithStdLgammaAcrossRange) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> log_x(std::log(1e-3), std::log(1e6));
  for (int trial = 0; trial < 5000; ++trial) {
    const double x = std::exp(log_x(rng));
    const double expected = std::lgamma(x);
    // Absolute floor only near the roots at 1 and 2, where lgamma itself loses digits.
    EXPECT_NEAR(log_gamma(x), expected, std::max(1e-12 * std::abs(expected), 1e-15))
        << "x = " << x;
  }
}

TEST(LogGamma, FactorialRatioProperty) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> dist(0.01, 150.0);
  for (int trial = 0; trial < 2000; ++trial) {
    const double x = dist(rng);
    EXPECT_NEAR(std::exp(log_gamma(x + 1.0) - log_gamma(x)) / x, 1.0, 1e-9) << "x = " << x;
  }
}

TEST(LogGamma, RejectsNonPositive) {
  EXPECT_THROW(log_gamma(0.0), DomainError);
  EXPECT_THROW(log_gamma(-3.0), DomainError);
}

TEST(NormalizeLogWeights, SpecExamples) {
  const auto even = normalize_log_weights(std::vector<double>{0.0, 0.0});
  EXPECT_DOUBLE_EQ(even[0], 0.5);
  EXPECT_DOUBLE_EQ(even[1], 0.5);

  const auto ratio = normalize_log_weights(std::vector<double>{std::log(1.0), std::log(3.0)});
  EXPECT_NEAR(ratio[0], 0.25, 1e-15);
  EXPECT_NEAR(ratio[1], 0.75, 1e-15);

  const auto large = normalize_log_weights(std::vector<double>{1000.0, 1001.0});
  EXPECT_NEAR(large[0], 0.2689414, 1e-7);
  EXPECT_NEAR(large[1], 0.7310586, 1e-7);
}

TEST(NormalizeLogWeights, AllNegativeInfinityIsAnError) {
  const double ninf = -std::numeric_limits<double>::infinity();
  EXPECT_THROW(normalize_log_weights(std::vector<double>{ninf, ninf}), std::invalid_argument);
  EXPECT_THROW(normalize_log_weights(std::vector<double>{}), std::invalid_argument);
  const auto one = normalize_log_weights(std::vector<double>{ninf, 0.0});
  EXPECT_EQ(one[0], 0.0);
  EXPECT_EQ(one[1], 1.0);
}

TEST(NormalizeLogWeights, ValidAndShiftInvariant) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> w(-50.0, 50.0);
  std::uniform_real_distribution<double> shift(-500.0, 500.0);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> weights(1 + trial % 9);
    for (auto& v : weights) v = w(rng);
    const auto p = normalize_log_weights(weights);
    double total = 0.0;
    for (double v : p) {
      EXPECT_GE(v, 0.0);
      total += v;
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
    const double s = shift(rng);
    for (auto& v : weights) v += s;
    const auto q = normalize_log_weights(weights);
    for (std::size_t k = 0; k < p.size(); ++k) EXPECT_NEAR(p[k], q[k], 1e-12);
  }
}

TEST(NormalizePair, MatchesGeneralNormalization) {
  for (double a : {-800.0, -3.0, 0.0, 2.5, 700.0}) {
    for (double b : {-750.0, -1.0, 0.0, 4.0, 710.0}) {
      const auto p = normalize_log_weights(std::vector<double>{a, b});
      EXPECT_NEAR(normalize_pair(a, b), p[0], 1e-15);
    }
  }
}

TEST(BetaExpectLog, SpecExamples) {
  auto [a1, b1] = beta_expect_log(1.0, 1.0);
  EXPECT_NEAR(a1, -1.0, 1e-12);
  EXPECT_NEAR(b1, -1.0, 1e-12);

  auto [a2, b2] = beta_expect_log(2.0, 1.0);
  EXPECT_NEAR(a2, -0.5, 1e-12);
  EXPECT_NEAR(b2, -1.5, 1e-12);

  auto [c, d] = beta_expect_log(3.3, 0.7);
  auto [e, f] = beta_expect_log(0.7, 3.3);
  EXPECT_DOUBLE_EQ(c, f);
  EXPECT_DOUBLE_EQ(d, e);
}

TEST(BetaExpectLog, ComponentsStrictlyNegative) {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> log_v(std::log(1e-2), std::log(1e4));
  for (int trial = 0; trial < 1000; ++trial) {
    const double g = std::exp(log_v(rng));
    const double h = std::exp(log_v(rng));
    const auto [lp, lq] = beta_expect_log(g, h);
    EXPECT_LT(lp, 0.0);
    EXPECT_LT(lq, 0.0);
  }
  EXPECT_THROW(beta_expect_log(0.0, 1.0), DomainError);
}

TEST(DirichletExpectLog, Examples) {
  const auto ones = dirichlet_expect_log(std::vector<double>{1.0, 1.0});
  EXPECT_NEAR(ones[0], -1.0, 1e-12);
  EXPECT_NEAR(ones[1], -1.0, 1e-12);

  // ψ(2) − ψ(4) = −(1/2 + 1/3) by the recurrence.
  const auto twos = dirichlet_expect_log(std::vector<double>{2.0, 2.0});
  EXPECT_NEAR(twos[0], -5.0 / 6.0, 1e-12);
  EXPECT_DOUBLE_EQ(twos[0], twos[1]);

  const auto mixed = dirichlet_expect_log(std::vector<double>{0.3, 1.7, 0.3, 5.0});
  EXPECT_DOUBLE_EQ(mixed[0], mixed[2]);
  for (double v : mixed) EXPECT_LT(v, 0.0);

  EXPECT_THROW(dirichlet_expect_log(std::vector<double>{1.0, 0.0}), DomainError);
}

TEST(XLogX, ZeroConventionAndClamp) {
  EXPECT_EQ(xlogx_clamped(0.0), 0.0);
  // 1 − 1e-12 is not exact in binary, so only the magnitude is pinned.
  EXPECT_NEAR(xlogx_clamped(1.0), -1e-12, 1e-16);
  EXPECT_NEAR(xlogx_clamped(0.25), 0.25 * std::log(0.25), 1e-16);
}
