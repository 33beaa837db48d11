#pragma once

#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace mlagg {

/// Raised when a special function receives an argument outside its domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

namespace math {

/// Digamma ψ(x) for finite x > 0.
///
/// Arguments below the asymptotic threshold are shifted upward with
/// ψ(x+1) = ψ(x) + 1/x, then the Bernoulli asymptotic series is applied.
/// Absolute error is below 1e-10 on [1e-3, 1e6].
double digamma(double x);

/// ln Γ(x) for finite x > 0, relative error below 1e-12 on [1e-3, 1e6].
double log_gamma(double x);

/// ln B(a, b) = ln Γ(a) + ln Γ(b) − ln Γ(a + b).
double log_beta(double a, double b);

/// log Σ exp(w_i); returns -inf when every entry is -inf.
double log_sum_exp(std::span<const double> log_weights);

/// exp(w_i − logsumexp(w)). Throws std::invalid_argument if the input is
/// empty or every entry is -inf.
std::vector<double> normalize_log_weights(std::span<const double> log_weights);

/// In-place variant used by the update loops.
void normalize_log_weights_inplace(std::span<double> log_weights);

/// Two-way normalization: returns exp(a) / (exp(a) + exp(b)).
double normalize_pair(double log_a, double log_b);

/// Expected log of a Beta(g, h) variable and of its complement:
/// (ψ(g) − ψ(g+h), ψ(h) − ψ(g+h)).
std::pair<double, double> beta_expect_log(double g, double h);

/// Expected log of each coordinate of a Dirichlet(m) variable.
std::vector<double> dirichlet_expect_log(std::span<const double> m);

/// x log x with the 0 log 0 = 0 convention; x is clamped to [1e-12, 1 − 1e-12].
double xlogx_clamped(double x);

}  // namespace math
}  // namespace mlagg
