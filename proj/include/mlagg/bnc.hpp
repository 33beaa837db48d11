#pragma once

#include <functional>

#include "mlagg/data.hpp"

/// Label-independent Bayesian aggregation: every label is its own binary
/// truth-inference problem with per-annotator symmetric reliability Ψ and a
/// per-label prevalence τ_j.
namespace mlagg::bnc {

/// λ from smoothed vote frequencies, then one pass of the (g, h) and (e, f) updates.
BncState init(const AnnotationSet& y, const Hyperparams& hp);

void update_gh(BncState& state, const AnnotationSet& y, const Hyperparams& hp);
void update_lambda(BncState& state, const AnnotationSet& y, const Hyperparams& hp);
void update_ef(BncState& state, const Hyperparams& hp);

/// Evidence lower bound of the current variational state.
double elbo(const BncState& state, const AnnotationSet& y, const Hyperparams& hp);

/// Called after every completed sweep with the state and its ELBO.
using SweepObserver = std::function<void(const BncState&, double elbo)>;

/// Coordinate ascent with sweep order λ → (g, h) → (e, f), stopping when the
/// relative ELBO gain drops below cfg.eta or after cfg.max_iter sweeps.
FitResult fit(const AnnotationSet& y, const Hyperparams& hp, const FitConfig& cfg,
              const SweepObserver& observer = {});

}  // namespace mlagg::bnc
