#include "mlagg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

using namespace mlagg;
using namespace mlagg::metrics;
using sim::AnnotatorKind;

namespace {

LabelMatrix rows(std::size_t c, const std::vector<std::vector<std::uint8_t>>& values) {
  LabelMatrix z(values.size(), c);
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (std::size_t j = 0; j < c; ++j) z(i, j) = values[i][j];
  }
  return z;
}

LabelMatrix random_labels(std::mt19937_64& rng, std::size_t n, std::size_t c, double p) {
  std::bernoulli_distribution bit(p);
  LabelMatrix z(n, c);
  for (auto& v : z.data) v = bit(rng);
  return z;
}

LabelSetDistribution random_distribution(std::mt19937_64& rng, std::size_t c) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  LabelSetDistribution d;
  d.num_labels = c;
  d.probs.resize(std::size_t{1} << c);
  double total = 0.0;
  for (auto& v : d.probs) {
    // Some exact zeros on both sides.
    v = u(rng) < 0.2 ? 0.0 : u(rng);
    total += v;
  }
  if (total == 0.0) d.probs[0] = total = 1.0;
  for (auto& v : d.probs) v /= total;
  return d;
}

}  // namespace

TEST(MajorityVote, StrictMajority) {
  const AnnotationSet y(3, 1, 3,
                        {{0, 0, {1}}, {1, 0, {1}}, {2, 0, {0}}, {0, 1, {1}}, {1, 1, {0}}});
  const auto z = majority_vote(y);
  EXPECT_EQ(z(0, 0), 1);
  EXPECT_EQ(z(1, 0), 0);
  EXPECT_EQ(z(2, 0), 0);
}

TEST(MajorityVote, InvariantUnderPermutationAndDuplication) {
  std::mt19937_64 rng(4);
  const std::size_t n = 30, c = 4, l = 7;
  std::vector<Annotation> records;
  for (std::size_t a = 0; a < l; ++a) {
    for (std::size_t i = 0; i < n; ++i) {
      if (rng() % 3 == 0) continue;
      Annotation rec{a, i, std::vector<std::uint8_t>(c)};
      for (auto& v : rec.labels) v = rng() & 1;
      records.push_back(rec);
    }
  }
  const auto base = majority_vote(AnnotationSet(n, c, l, records));
  std::vector<Annotation> permuted, doubled;
  for (const auto& rec : records) {
    permuted.push_back({l - 1 - rec.annotator, rec.instance, rec.labels});
    doubled.push_back(rec);
    doubled.push_back({rec.annotator + l, rec.instance, rec.labels});
  }
  EXPECT_EQ(majority_vote(AnnotationSet(n, c, l, permuted)), base);
  EXPECT_EQ(majority_vote(AnnotationSet(n, c, 2 * l, doubled)), base);
}

TEST(F1, Examples) {
  const auto truth = rows(3, {{1, 0, 1}, {0, 1, 0}});
  const auto same = f1_scores(truth, truth);
  EXPECT_EQ(same.micro, 1.0);
  EXPECT_EQ(same.macro, 1.0);
  EXPECT_EQ(same.example, 1.0);

  EXPECT_EQ(f1_scores(rows(2, {{1, 0}}), rows(2, {{0, 0}})).micro, 0.0);

  // TP = 2, FP = 1, FN = 1.
  const auto t = rows(2, {{1, 1}, {1, 0}});
  const auto p = rows(2, {{1, 1}, {0, 1}});
  const auto s = f1_scores(t, p);
  EXPECT_NEAR(s.micro, 2.0 / 3.0, 1e-15);
  // Label 0: TP 1, FN 1 → 2/3; label 1: TP 1, FP 1 → 2/3.
  EXPECT_NEAR(s.macro, 2.0 / 3.0, 1e-15);
  // Row 0 perfect; row 1 shares nothing.
  EXPECT_NEAR(s.example, 0.5, 1e-15);

  EXPECT_THROW(f1_scores(rows(2, {{1, 0}}), rows(3, {{1, 0, 0}})), std::invalid_argument);
}

TEST(F1, EmptyUnitConvention) {
  const auto truth = rows(2, {{0, 0}, {1, 0}});
  const auto pred = rows(2, {{0, 0}, {1, 0}});
  const auto s = f1_scores(truth, pred);
  EXPECT_EQ(s.macro, 1.0);
  EXPECT_EQ(s.example, 1.0);
  const auto one_sided = f1_scores(rows(1, {{0}, {0}}), rows(1, {{1}, {0}}));
  EXPECT_EQ(one_sided.micro, 0.0);
  EXPECT_EQ(one_sided.example, 0.5);
}

TEST(F1, MicroSymmetricUnderRowAndColumnPermutation) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng() % 20, c = 1 + rng() % 6;
    const auto t = random_labels(rng, n, c, 0.4);
    const auto p = random_labels(rng, n, c, 0.4);
    std::vector<std::size_t> ri(n), ci(c);
    std::iota(ri.begin(), ri.end(), 0);
    std::iota(ci.begin(), ci.end(), 0);
    std::shuffle(ri.begin(), ri.end(), rng);
    std::shuffle(ci.begin(), ci.end(), rng);
    LabelMatrix tp(n, c), pp(n, c);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < c; ++j) {
        tp(i, j) = t(ri[i], ci[j]);
        pp(i, j) = p(ri[i], ci[j]);
      }
    }
    EXPECT_DOUBLE_EQ(f1_scores(t, p).micro, f1_scores(tp, pp).micro);
    const auto s = f1_scores(t, p);
    for (double v : {s.micro, s.macro, s.example}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(EmpiricalDistribution, Counting) {
  // Row {1,0} has label 0 present: bitmask 0b01.
  const auto d = empirical_label_distribution(rows(2, {{1, 1}, {1, 0}, {1, 0}, {0, 0}}));
  EXPECT_EQ(d.probs, (std::vector<double>{0.25, 0.5, 0.0, 0.25}));

  const auto point = empirical_label_distribution(rows(3, {{0, 1, 1}}));
  EXPECT_EQ(point.probs[0b110], 1.0);

  EXPECT_THROW(empirical_label_distribution(LabelMatrix(0, 2)), std::invalid_argument);
  EXPECT_THROW(empirical_label_distribution(LabelMatrix(3, 21)), std::length_error);

  std::mt19937_64 rng(8);
  const auto r = empirical_label_distribution(random_labels(rng, 64, 5, 0.3));
  EXPECT_EQ(std::accumulate(r.probs.begin(), r.probs.end(), 0.0), 1.0);
}

TEST(KlLabelsets, Examples) {
  LabelSetDistribution p{1, {1.0, 0.0}}, q{1, {0.5, 0.5}};
  EXPECT_NEAR(kl_labelsets(p, q), std::log(2.0), 1e-15);
  EXPECT_EQ(kl_labelsets(q, q), 0.0);
  LabelSetDistribution wide{2, {0.25, 0.25, 0.25, 0.25}};
  EXPECT_THROW(kl_labelsets(p, wide), std::invalid_argument);
  // The floor keeps the result finite.
  LabelSetDistribution hole{1, {0.0, 1.0}};
  EXPECT_NEAR(kl_labelsets(p, hole), -std::log(1e-10), 1e-9);
}

TEST(KlLabelsets, GibbsInequality) {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t c = 1 + rng() % 5;
    const auto p = random_distribution(rng, c);
    const auto q = random_distribution(rng, c);
    EXPECT_GE(kl_labelsets(p, q), 0.0);
    EXPECT_NEAR(kl_labelsets(p, p), 0.0, 1e-12);
  }
}

TEST(TypeRecovery, Classification) {
  EXPECT_EQ(classify_annotator(0.95), AnnotatorKind::Reliable);
  EXPECT_EQ(classify_annotator(0.50), AnnotatorKind::Random);
  EXPECT_EQ(classify_annotator(0.8375), AnnotatorKind::Reliable);
  EXPECT_EQ(classify_annotator(0.75), AnnotatorKind::Normal);
  EXPECT_EQ(classify_annotator(0.6275), AnnotatorKind::Normal);
  EXPECT_EQ(classify_annotator(0.62), AnnotatorKind::Random);
}

TEST(TypeRecovery, AveragesAcrossLabels) {
  std::vector<sim::AnnotatorProfile> truth = {
      {0, AnnotatorKind::Reliable, {0.9, 0.9}},
      {1, AnnotatorKind::Normal, {0.7, 0.7}},
      {2, AnnotatorKind::Random, {0.5, 0.5}},
      {3, AnnotatorKind::Random, {0.5, 0.5}},
  };
  Matrix hat(4, 2);
  const double values[4][2] = {{1.0, 0.86}, {0.8, 0.7}, {0.55, 0.45}, {0.99, 0.8}};
  for (std::size_t l = 0; l < 4; ++l) {
    for (std::size_t j = 0; j < 2; ++j) hat(l, j) = values[l][j];
  }
  EXPECT_DOUBLE_EQ(annotator_type_recovery(truth, hat), 0.75);
  EXPECT_THROW(annotator_type_recovery(truth, Matrix(3, 2)), std::invalid_argument);
}
