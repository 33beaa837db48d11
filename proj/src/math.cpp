#include "mlagg/math.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

namespace mlagg::math {
namespace {

constexpr double kEulerGamma = 0.57721566490153286061;
constexpr double kHalfLog2Pi = 0.91893853320467274178;

// ζ(k) − 1 for k = 2, 3, ..., 41.
constexpr std::array<double, 40> kZetaMinusOne = {
    6.44934066848226406e-01, 2.02056903159594292e-01, 8.23232337111381857e-02,
    3.69277551433699266e-02, 1.73430619844491402e-02, 8.34927738192282713e-03,
    4.07735619794433960e-03, 2.00839282608221426e-03, 9.94575127818085256e-04,
    4.94188604119464529e-04, 2.46086553308048320e-04, 1.22713347578489145e-04,
    6.12481350587048277e-05, 3.05882363070204933e-05, 1.52822594086518710e-05,
    7.63719763789976257e-06, 3.81729326499984022e-06, 1.90821271655393897e-06,
    9.53962033872796212e-07, 4.76932986787806447e-07, 2.38450502727733004e-07,
    1.19219925965311064e-07, 5.96081890512594801e-08, 2.98035035146522793e-08,
    1.49015548283650427e-08, 7.45071178983543006e-09, 3.72533402478845728e-09,
    1.86265972351304914e-09, 9.31327432419668166e-10, 4.65662906503378366e-10,
    2.32831183367650534e-10, 1.16415501727005193e-10, 5.82077208790270145e-11,
    2.91038504449710001e-11, 1.45519218910419849e-11, 7.27595983505748180e-12,
    3.63797954737865086e-12, 1.81898965030706607e-12, 9.09494784026388841e-13,
    4.54747378304215422e-13,
};

void require_positive(double x, const char* fn) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw DomainError(std::string(fn) + ": argument must be finite and > 0, got " +
                      std::to_string(x));
  }
}

// ln Γ(2 + eps) = eps (1 − γ) + Σ_{k≥2} (−1)^k (ζ(k) − 1) eps^k / k, |eps| ≤ 0.5.
// Vanishes exactly at eps = 0, so it stays relatively accurate near the root.
double log_gamma_two_plus(double eps) {
  double sum = 0.0;
  double power = -eps;
  for (std::size_t i = 0; i < kZetaMinusOne.size(); ++i) {
    const int k = static_cast<int>(i) + 2;
    power *= -eps;
    const double term = kZetaMinusOne[i] * power / k;
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return eps * (1.0 - kEulerGamma) + sum;
}

double log_gamma_stirling(double x) {
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  // Bernoulli terms B_2k / (2k (2k − 1) x^(2k − 1)).
  const double series =
      inv * (1.0 / 12.0 +
             inv2 * (-1.0 / 360.0 +
                     inv2 * (1.0 / 1260.0 +
                             inv2 * (-1.0 / 1680.0 +
                                     inv2 * (1.0 / 1188.0 +
                                             inv2 * (-691.0 / 360360.0 +
                                                     inv2 * (1.0 / 156.0 +
                                                             inv2 * (-3617.0 / 122400.0))))))));
  return (x - 0.5) * std::log(x) - x + kHalfLog2Pi + series;
}

}  // namespace

double digamma(double x) {
  require_positive(x, "digamma");
  double shift = 0.0;
  while (x < 10.0) {
    shift += 1.0 / x;
    x += 1.0;
  }
  const double inv2 = 1.0 / (x * x);
  const double series =
      inv2 * (1.0 / 12.0 -
              inv2 * (1.0 / 120.0 -
                      inv2 * (1.0 / 252.0 -
                              inv2 * (1.0 / 240.0 -
                                      inv2 * (1.0 / 132.0 -
                                              inv2 * (691.0 / 32760.0 - inv2 / 12.0))))));
  return std::log(x) - 0.5 / x - series - shift;
}

double log_gamma(double x) {
  require_positive(x, "log_gamma");
  if (x < 0.5) {
    return log_gamma(x + 1.0) - std::log(x);
  }
  if (x < 1.5) {
    // ln Γ(x) = ln Γ(x + 1) − ln x with x + 1 in [1.5, 2.5).
    return log_gamma_two_plus(x - 1.0) - std::log1p(x - 1.0);
  }
  if (x < 2.5) {
    return log_gamma_two_plus(x - 2.0);
  }
  if (x < 13.0) {
    double product = 1.0;
    while (x >= 2.5) {
      x -= 1.0;
      product *= x;
    }
    return log_gamma_two_plus(x - 2.0) + std::log(product);
  }
  return log_gamma_stirling(x);
}

double log_beta(double a, double b) {
  return log_gamma(a) + log_gamma(b) - log_gamma(a + b);
}

double log_sum_exp(std::span<const double> log_weights) {
  if (log_weights.empty()) return -std::numeric_limits<double>::infinity();
  const double top = *std::max_element(log_weights.begin(), log_weights.end());
  if (top == -std::numeric_limits<double>::infinity()) return top;
  double acc = 0.0;
  for (double w : log_weights) acc += std::exp(w - top);
  return top + std::log(acc);
}

void normalize_log_weights_inplace(std::span<double> log_weights) {
  if (log_weights.empty()) {
    throw std::invalid_argument("normalize_log_weights: empty weight vector");
  }
  const double top = *std::max_element(log_weights.begin(), log_weights.end());
  if (top == -std::numeric_limits<double>::infinity() || std::isnan(top)) {
    throw std::invalid_argument("normalize_log_weights: no finite weight");
  }
  double total = 0.0;
  for (double& w : log_weights) {
    w = std::exp(w - top);
    total += w;
  }
  for (double& w : log_weights) w /= total;
}

std::vector<double> normalize_log_weights(std::span<const double> log_weights) {
  std::vector<double> out(log_weights.begin(), log_weights.end());
  normalize_log_weights_inplace(out);
  return out;
}

double normalize_pair(double log_a, double log_b) {
  // Logistic of the difference, written so neither branch overflows.
  const double d = log_a - log_b;
  if (d >= 0.0) return 1.0 / (1.0 + std::exp(-d));
  const double e = std::exp(d);
  return e / (1.0 + e);
}

std::pair<double, double> beta_expect_log(double g, double h) {
  const double total = digamma(g + h);
  return {digamma(g) - total, digamma(h) - total};
}

std::vector<double> dirichlet_expect_log(std::span<const double> m) {
  double sum = 0.0;
  for (double v : m) {
    require_positive(v, "dirichlet_expect_log");
    sum += v;
  }
  std::vector<double> out;
  out.reserve(m.size());
  if (m.empty()) return out;
  const double total = digamma(sum);
  for (double v : m) out.push_back(digamma(v) - total);
  return out;
}

double xlogx_clamped(double x) {
  constexpr double kFloor = 1e-12;
  return x * std::log(std::clamp(x, kFloor, 1.0 - kFloor));
}

}  // namespace mlagg::math
