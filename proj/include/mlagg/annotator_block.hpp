#pragma once

// Pieces shared by both models: the reliability posterior q(Ψ) = Beta(g, h)
// is updated identically, and annotator evidence enters λ the same way.

#include <span>

#include "mlagg/data.hpp"

namespace mlagg::detail {

/// E_q[log Ψ] and E_q[log(1 − Ψ)] for every (annotator, label).
struct ReliabilityExpectations {
  Matrix log_psi;
  Matrix log_one_minus_psi;
};

ReliabilityExpectations reliability_expectations(const Matrix& g, const Matrix& h);

/// g_j^l = a + Σ_{i∈N(l)} [λ y + (1 − λ)(1 − y)], h symmetric.
void update_reliability(const AnnotationSet& y, const Matrix& lambda, const Hyperparams& hp,
                        Matrix& g, Matrix& h);

/// Adds annotator evidence of instance i to the per-label log scores of
/// "label present" (pos) and "label absent" (neg).
void add_annotator_evidence(const AnnotationSet& y, const ReliabilityExpectations& ex,
                            std::size_t instance, std::span<double> pos, std::span<double> neg);

/// Expected log-likelihood of the annotations under q.
double annotation_log_likelihood(const AnnotationSet& y, const Matrix& lambda,
                                 const ReliabilityExpectations& ex);

/// −KL(Beta(g, h) ‖ Beta(prior_a, prior_b)) for one cell, given its expected logs.
double neg_kl_beta(double g, double h, double prior_a, double prior_b, double e_log,
                   double e_log_complement);

/// Smoothed vote frequency (pos + 0.5) / (n + 1) per (instance, label).
Matrix smoothed_vote_frequency(const AnnotationSet& y);

/// Σ over cells of −[λ log λ + (1 − λ) log(1 − λ)].
double bernoulli_entropy(const Matrix& lambda);

/// g/(g + h) elementwise.
Matrix beta_mean(const Matrix& g, const Matrix& h);

}  // namespace mlagg::detail
