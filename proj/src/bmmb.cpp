#include "mlagg/bmmb.hpp"

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "mlagg/annotator_block.hpp"
#include "mlagg/convergence.hpp"
#include "mlagg/math.hpp"

namespace mlagg::bmmb {
namespace {

constexpr double kInitNoise = 0.1;
constexpr std::uint64_t kRestartDomain = 21;

struct ComponentExpectations {
  Matrix log_tau;            // K×C
  Matrix log_one_minus_tau;  // K×C
};

ComponentExpectations component_expectations(const BmmbState& state) {
  ComponentExpectations ex{Matrix(state.e.rows, state.e.cols),
                           Matrix(state.e.rows, state.e.cols)};
  for (std::size_t k = 0; k < state.e.data.size(); ++k) {
    const auto [lt, lu] = math::beta_expect_log(state.e.data[k], state.f.data[k]);
    ex.log_tau.data[k] = lt;
    ex.log_one_minus_tau.data[k] = lu;
  }
  return ex;
}

}  // namespace

BmmbState init(const AnnotationSet& y, const Hyperparams& hp, RandomStream& rng) {
  hp.validate();
  const std::size_t k_count = hp.num_components;
  BmmbState state;
  state.lambda = detail::smoothed_vote_frequency(y);
  state.r = Matrix(y.num_instances(), k_count);
  for (std::size_t i = 0; i < y.num_instances(); ++i) {
    auto row = state.r.row(i);
    double total = 0.0;
    for (double& v : row) {
      v = rng.uniform() + kInitNoise * rng.uniform();
      total += v;
    }
    for (double& v : row) v /= total;
  }
  update_gh(state, y, hp);
  update_ef(state, hp);
  update_m(state, hp);
  return state;
}

void update_gh(BmmbState& state, const AnnotationSet& y, const Hyperparams& hp) {
  detail::update_reliability(y, state.lambda, hp, state.g, state.h);
}

void update_lambda(BmmbState& state, const AnnotationSet& y, const Hyperparams& /*hp*/) {
  const std::size_t c = y.num_labels();
  const std::size_t k_count = state.e.rows;
  const auto rel = detail::reliability_expectations(state.g, state.h);
  const auto comp = component_expectations(state);
  std::vector<double> pos(c), neg(c);
  for (std::size_t i = 0; i < y.num_instances(); ++i) {
    std::fill(pos.begin(), pos.end(), 0.0);
    std::fill(neg.begin(), neg.end(), 0.0);
    const auto resp = state.r.row(i);
    for (std::size_t k = 0; k < k_count; ++k) {
      const auto lt = comp.log_tau.row(k);
      const auto lu = comp.log_one_minus_tau.row(k);
      for (std::size_t j = 0; j < c; ++j) {
        pos[j] += resp[k] * lt[j];
        neg[j] += resp[k] * lu[j];
      }
    }
    detail::add_annotator_evidence(y, rel, i, pos, neg);
    auto row = state.lambda.row(i);
    for (std::size_t j = 0; j < c; ++j) row[j] = math::normalize_pair(pos[j], neg[j]);
  }
}

void update_ef(BmmbState& state, const Hyperparams& hp) {
  const std::size_t c = state.lambda.cols;
  const std::size_t k_count = state.r.cols;
  state.e = Matrix(k_count, c, hp.alpha);
  state.f = Matrix(k_count, c, hp.beta);
  for (std::size_t i = 0; i < state.lambda.rows; ++i) {
    const auto lam = state.lambda.row(i);
    const auto resp = state.r.row(i);
    for (std::size_t k = 0; k < k_count; ++k) {
      auto e_row = state.e.row(k);
      auto f_row = state.f.row(k);
      for (std::size_t j = 0; j < c; ++j) {
        e_row[j] += resp[k] * lam[j];
        f_row[j] += resp[k] * (1.0 - lam[j]);
      }
    }
  }
}

void update_r(BmmbState& state, const Hyperparams& /*hp*/) {
  const std::size_t c = state.lambda.cols;
  const std::size_t k_count = state.r.cols;
  const auto comp = component_expectations(state);
  const auto log_pi = math::dirichlet_expect_log(state.m);
  for (std::size_t i = 0; i < state.lambda.rows; ++i) {
    const auto lam = state.lambda.row(i);
    auto resp = state.r.row(i);
    for (std::size_t k = 0; k < k_count; ++k) {
      const auto lt = comp.log_tau.row(k);
      const auto lu = comp.log_one_minus_tau.row(k);
      double score = log_pi[k];
      for (std::size_t j = 0; j < c; ++j) score += lam[j] * lt[j] + (1.0 - lam[j]) * lu[j];
      resp[k] = score;
    }
    math::normalize_log_weights_inplace(resp);
  }
}

void update_m(BmmbState& state, const Hyperparams& hp) {
  state.m.assign(state.r.cols, hp.gamma);
  for (std::size_t i = 0; i < state.r.rows; ++i) {
    const auto resp = state.r.row(i);
    for (std::size_t k = 0; k < state.r.cols; ++k) state.m[k] += resp[k];
  }
}

double elbo(const BmmbState& state, const AnnotationSet& y, const Hyperparams& hp) {
  const auto rel = detail::reliability_expectations(state.g, state.h);
  double total = detail::annotation_log_likelihood(y, state.lambda, rel);

  for (std::size_t k = 0; k < state.g.data.size(); ++k) {
    total += detail::neg_kl_beta(state.g.data[k], state.h.data[k], hp.a, hp.b,
                                 rel.log_psi.data[k], rel.log_one_minus_psi.data[k]);
  }

  const auto comp = component_expectations(state);
  for (std::size_t k = 0; k < state.e.data.size(); ++k) {
    total += detail::neg_kl_beta(state.e.data[k], state.f.data[k], hp.alpha, hp.beta,
                                 comp.log_tau.data[k], comp.log_one_minus_tau.data[k]);
  }

  const std::size_t c = state.lambda.cols;
  const std::size_t k_count = state.r.cols;
  const auto log_pi = math::dirichlet_expect_log(state.m);
  for (std::size_t i = 0; i < state.lambda.rows; ++i) {
    const auto lam = state.lambda.row(i);
    const auto resp = state.r.row(i);
    for (std::size_t k = 0; k < k_count; ++k) {
      const auto lt = comp.log_tau.row(k);
      const auto lu = comp.log_one_minus_tau.row(k);
      double inner = 0.0;
      for (std::size_t j = 0; j < c; ++j) inner += lam[j] * lt[j] + (1.0 - lam[j]) * lu[j];
      total += resp[k] * (inner + log_pi[k]) - math::xlogx_clamped(resp[k]);
    }
  }
  total += detail::bernoulli_entropy(state.lambda);

  // −KL(Dirichlet(m) ‖ Dirichlet(γ)).
  const double kg = static_cast<double>(k_count) * hp.gamma;
  double m_sum = 0.0;
  total += math::log_gamma(kg) - static_cast<double>(k_count) * math::log_gamma(hp.gamma);
  for (std::size_t k = 0; k < k_count; ++k) {
    total += math::log_gamma(state.m[k]) + (hp.gamma - state.m[k]) * log_pi[k];
    m_sum += state.m[k];
  }
  total -= math::log_gamma(m_sum);
  return total;
}

MixtureEstimate mixture_estimate(const BmmbState& state) {
  MixtureEstimate est;
  double m_sum = 0.0;
  for (double v : state.m) m_sum += v;
  est.pi.reserve(state.m.size());
  for (double v : state.m) est.pi.push_back(v / m_sum);
  est.tau = detail::beta_mean(state.e, state.f);
  return est;
}

FitResult fit(const AnnotationSet& y, const Hyperparams& hp, const FitConfig& cfg,
              const SweepObserver& observer) {
  hp.validate();
  cfg.validate();
  FitResult best;
  bool have_best = false;
  for (std::size_t restart = 0; restart < cfg.restarts; ++restart) {
    RandomStream rng(cfg.seed, restart, kRestartDomain);
    BmmbState state = init(y, hp, rng);
    FitResult result;
    result.model = ModelTag::Bmmb;
    detail::ConvergenceMonitor monitor(cfg.eta);
    for (std::size_t t = 0; t < cfg.max_iter; ++t) {
      update_lambda(state, y, hp);
      update_r(state, hp);
      update_gh(state, y, hp);
      update_ef(state, hp);
      update_m(state, hp);
      const double value = elbo(state, y, hp);
      result.elbo_trace.push_back(value);
      if (observer) observer(restart, state, value);
      if (monitor.push(value)) {
        result.converged = true;
        break;
      }
    }
    if (have_best && result.elbo_trace.back() <= best.elbo_trace.back()) continue;
    result.iterations = result.elbo_trace.size();
    result.reliability = detail::beta_mean(state.g, state.h);
    result.mixture = mixture_estimate(state);
    result.lambda = std::move(state.lambda);
    best = std::move(result);
    have_best = true;
  }
  return best;
}

LabelSetDistribution estimate_label_distribution(const MixtureEstimate& mixture) {
  const std::size_t c = mixture.tau.cols;
  LabelSetDistribution::check_capacity(c);
  LabelSetDistribution dist;
  dist.num_labels = c;
  dist.probs.assign(std::size_t{1} << c, 0.0);
  for (std::size_t k = 0; k < mixture.pi.size(); ++k) {
    const auto tau = mixture.tau.row(k);
    // Build Π over labels one bit at a time: entries [0, 2^j) hold the
    // products over the first j labels.
    std::vector<double> partial(std::size_t{1} << c, 0.0);
    partial[0] = mixture.pi[k];
    for (std::size_t j = 0; j < c; ++j) {
      const std::size_t half = std::size_t{1} << j;
      for (std::size_t s = 0; s < half; ++s) {
        partial[s | half] = partial[s] * tau[j];
        partial[s] *= 1.0 - tau[j];
      }
    }
    for (std::size_t s = 0; s < partial.size(); ++s) dist.probs[s] += partial[s];
  }
  return dist;
}

LabelSetDistribution estimate_label_distribution(const FitResult& result) {
  if (!result.mixture) {
    throw std::invalid_argument("label-set estimate needs a fitted mixture (bmmb result)");
  }
  return estimate_label_distribution(*result.mixture);
}

}  // namespace mlagg::bmmb
