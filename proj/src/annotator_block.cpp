#include "mlagg/annotator_block.hpp"

#include "mlagg/math.hpp"

namespace mlagg::detail {

ReliabilityExpectations reliability_expectations(const Matrix& g, const Matrix& h) {
  ReliabilityExpectations ex{Matrix(g.rows, g.cols), Matrix(g.rows, g.cols)};
  for (std::size_t k = 0; k < g.data.size(); ++k) {
    const auto [lp, lq] = math::beta_expect_log(g.data[k], h.data[k]);
    ex.log_psi.data[k] = lp;
    ex.log_one_minus_psi.data[k] = lq;
  }
  return ex;
}

void update_reliability(const AnnotationSet& y, const Matrix& lambda, const Hyperparams& hp,
                        Matrix& g, Matrix& h) {
  const std::size_t c = y.num_labels();
  g = Matrix(y.num_annotators(), c, hp.a);
  h = Matrix(y.num_annotators(), c, hp.b);
  for (std::size_t l = 0; l < y.num_annotators(); ++l) {
    auto g_row = g.row(l);
    auto h_row = h.row(l);
    for (std::size_t rec : y.by_annotator(l)) {
      const auto bits = y.labels(rec);
      const auto lam = lambda.row(y.instance(rec));
      for (std::size_t j = 0; j < c; ++j) {
        // Probability under q that the annotation agrees with the truth.
        const double agree = bits[j] ? lam[j] : 1.0 - lam[j];
        g_row[j] += agree;
        h_row[j] += 1.0 - agree;
      }
    }
  }
}

void add_annotator_evidence(const AnnotationSet& y, const ReliabilityExpectations& ex,
                            std::size_t instance, std::span<double> pos, std::span<double> neg) {
  const std::size_t c = y.num_labels();
  for (std::size_t rec : y.by_instance(instance)) {
    const auto bits = y.labels(rec);
    const auto lp = ex.log_psi.row(y.annotator(rec));
    const auto lq = ex.log_one_minus_psi.row(y.annotator(rec));
    for (std::size_t j = 0; j < c; ++j) {
      if (bits[j]) {
        pos[j] += lp[j];
        neg[j] += lq[j];
      } else {
        pos[j] += lq[j];
        neg[j] += lp[j];
      }
    }
  }
}

double annotation_log_likelihood(const AnnotationSet& y, const Matrix& lambda,
                                 const ReliabilityExpectations& ex) {
  const std::size_t c = y.num_labels();
  double total = 0.0;
  for (std::size_t rec = 0; rec < y.size(); ++rec) {
    const auto bits = y.labels(rec);
    const auto lam = lambda.row(y.instance(rec));
    const auto lp = ex.log_psi.row(y.annotator(rec));
    const auto lq = ex.log_one_minus_psi.row(y.annotator(rec));
    for (std::size_t j = 0; j < c; ++j) {
      const double agree = bits[j] ? lam[j] : 1.0 - lam[j];
      total += agree * lp[j] + (1.0 - agree) * lq[j];
    }
  }
  return total;
}

double neg_kl_beta(double g, double h, double prior_a, double prior_b, double e_log,
                   double e_log_complement) {
  // E_q[log p] − E_q[log q]; the log-normalizers are −log B(·,·).
  return math::log_beta(g, h) - math::log_beta(prior_a, prior_b) + (prior_a - g) * e_log +
         (prior_b - h) * e_log_complement;
}

Matrix smoothed_vote_frequency(const AnnotationSet& y) {
  const std::size_t c = y.num_labels();
  Matrix lambda(y.num_instances(), c);
  for (std::size_t i = 0; i < y.num_instances(); ++i) {
    const auto votes = y.by_instance(i);
    auto row = lambda.row(i);
    for (std::size_t rec : votes) {
      const auto bits = y.labels(rec);
      for (std::size_t j = 0; j < c; ++j) row[j] += bits[j];
    }
    const double denom = static_cast<double>(votes.size()) + 1.0;
    for (double& v : row) v = (v + 0.5) / denom;
  }
  return lambda;
}

double bernoulli_entropy(const Matrix& lambda) {
  double total = 0.0;
  for (double v : lambda.data) total -= math::xlogx_clamped(v) + math::xlogx_clamped(1.0 - v);
  return total;
}

Matrix beta_mean(const Matrix& g, const Matrix& h) {
  Matrix out(g.rows, g.cols);
  for (std::size_t k = 0; k < g.data.size(); ++k) out.data[k] = g.data[k] / (g.data[k] + h.data[k]);
  return out;
}

}  // namespace mlagg::detail
