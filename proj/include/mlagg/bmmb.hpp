#pragma once

#include <functional>

#include "mlagg/data.hpp"
#include "mlagg/random.hpp"

/// Bayesian mixture of multiple Bernoullis: ground-truth label vectors come
/// from a K-component mixture of independent Bernoullis, which lets the
/// posterior of one label borrow strength from the others.
///
/// Variational family: q(Ψ) = Beta(g, h), q(z) = Bernoulli(λ),
/// q(τ) = Beta(e, f), q(x_i) = Discrete(r_i), q(π) = Dirichlet(m).
namespace mlagg::bmmb {

/// Smoothed-vote λ, responsibilities r_i,k ∝ U(0,1) + 0.1·U(0,1), then one pass of
/// the (g, h), (e, f) and m updates.
BmmbState init(const AnnotationSet& y, const Hyperparams& hp, RandomStream& rng);

void update_gh(BmmbState& state, const AnnotationSet& y, const Hyperparams& hp);
void update_lambda(BmmbState& state, const AnnotationSet& y, const Hyperparams& hp);
void update_ef(BmmbState& state, const Hyperparams& hp);
void update_r(BmmbState& state, const Hyperparams& hp);
void update_m(BmmbState& state, const Hyperparams& hp);

double elbo(const BmmbState& state, const AnnotationSet& y, const Hyperparams& hp);

/// Ê[π_k] = m_k / Σ m and Ê[τ_k,j] = e / (e + f).
MixtureEstimate mixture_estimate(const BmmbState& state);

/// Called after every completed sweep with the restart index, state and ELBO.
using SweepObserver = std::function<void(std::size_t restart, const BmmbState&, double elbo)>;

/// Runs cfg.restarts independent initializations (stream = restart index under
/// cfg.seed). Sweep order λ → r → (g, h) → (e, f) → m; the restart with the
/// highest final ELBO is returned.
FitResult fit(const AnnotationSet& y, const Hyperparams& hp, const FitConfig& cfg,
              const SweepObserver& observer = {});

/// Label-set distribution implied by the fitted mixture:
/// p_S = Σ_k Ê[π_k] Π_{j∈S} Ê[τ_k,j] Π_{j∉S} (1 − Ê[τ_k,j]).
/// Throws std::length_error for C > 20 and std::invalid_argument without a mixture.
LabelSetDistribution estimate_label_distribution(const FitResult& result);
LabelSetDistribution estimate_label_distribution(const MixtureEstimate& mixture);

}  // namespace mlagg::bmmb
