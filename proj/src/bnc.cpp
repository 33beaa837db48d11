#include "mlagg/bnc.hpp"

#include <cmath>
#include <tuple>
#include <vector>

#include "mlagg/annotator_block.hpp"
#include "mlagg/convergence.hpp"
#include "mlagg/math.hpp"

namespace mlagg::bnc {

BncState init(const AnnotationSet& y, const Hyperparams& hp) {
  hp.validate();
  BncState state;
  state.lambda = detail::smoothed_vote_frequency(y);
  update_gh(state, y, hp);
  update_ef(state, hp);
  return state;
}

void update_gh(BncState& state, const AnnotationSet& y, const Hyperparams& hp) {
  detail::update_reliability(y, state.lambda, hp, state.g, state.h);
}

void update_lambda(BncState& state, const AnnotationSet& y, const Hyperparams& /*hp*/) {
  const std::size_t c = y.num_labels();
  const auto ex = detail::reliability_expectations(state.g, state.h);
  std::vector<double> prior_pos(c), prior_neg(c);
  for (std::size_t j = 0; j < c; ++j) {
    std::tie(prior_pos[j], prior_neg[j]) = math::beta_expect_log(state.e[j], state.f[j]);
  }
  std::vector<double> pos(c), neg(c);
  for (std::size_t i = 0; i < y.num_instances(); ++i) {
    pos = prior_pos;
    neg = prior_neg;
    detail::add_annotator_evidence(y, ex, i, pos, neg);
    auto row = state.lambda.row(i);
    for (std::size_t j = 0; j < c; ++j) row[j] = math::normalize_pair(pos[j], neg[j]);
  }
}

void update_ef(BncState& state, const Hyperparams& hp) {
  const std::size_t c = state.lambda.cols;
  state.e.assign(c, hp.alpha);
  state.f.assign(c, hp.beta);
  for (std::size_t i = 0; i < state.lambda.rows; ++i) {
    const auto row = state.lambda.row(i);
    for (std::size_t j = 0; j < c; ++j) {
      state.e[j] += row[j];
      state.f[j] += 1.0 - row[j];
    }
  }
}

double elbo(const BncState& state, const AnnotationSet& y, const Hyperparams& hp) {
  const auto ex = detail::reliability_expectations(state.g, state.h);
  double total = detail::annotation_log_likelihood(y, state.lambda, ex);

  for (std::size_t k = 0; k < state.g.data.size(); ++k) {
    total += detail::neg_kl_beta(state.g.data[k], state.h.data[k], hp.a, hp.b,
                                 ex.log_psi.data[k], ex.log_one_minus_psi.data[k]);
  }

  const std::size_t c = state.e.size();
  std::vector<double> log_tau(c), log_one_minus_tau(c);
  for (std::size_t j = 0; j < c; ++j) {
    std::tie(log_tau[j], log_one_minus_tau[j]) = math::beta_expect_log(state.e[j], state.f[j]);
    total += detail::neg_kl_beta(state.e[j], state.f[j], hp.alpha, hp.beta, log_tau[j],
                                 log_one_minus_tau[j]);
  }

  for (std::size_t i = 0; i < state.lambda.rows; ++i) {
    const auto row = state.lambda.row(i);
    for (std::size_t j = 0; j < c; ++j) {
      total += row[j] * log_tau[j] + (1.0 - row[j]) * log_one_minus_tau[j];
    }
  }
  return total + detail::bernoulli_entropy(state.lambda);
}

FitResult fit(const AnnotationSet& y, const Hyperparams& hp, const FitConfig& cfg,
              const SweepObserver& observer) {
  hp.validate();
  cfg.validate();
  BncState state = init(y, hp);
  FitResult result;
  result.model = ModelTag::Bnc;
  detail::ConvergenceMonitor monitor(cfg.eta);
  for (std::size_t t = 0; t < cfg.max_iter; ++t) {
    update_lambda(state, y, hp);
    update_gh(state, y, hp);
    update_ef(state, hp);
    const double value = elbo(state, y, hp);
    result.elbo_trace.push_back(value);
    if (observer) observer(state, value);
    if (monitor.push(value)) {
      result.converged = true;
      break;
    }
  }
  result.iterations = result.elbo_trace.size();
  result.lambda = std::move(state.lambda);
  result.reliability = detail::beta_mean(state.g, state.h);
  return result;
}

}  // namespace mlagg::bnc
