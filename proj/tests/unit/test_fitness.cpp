#include <doctest.h>

#include <cmath>

#include "error.hpp"
#include "fitness.hpp"
#include "rng.hpp"

using namespace psum;
using doctest::Approx;

namespace {

const auto kLimit4 = pso::SwarmConfig::uniform_limits(kMetricCount, {0.0, 6.0});

MetricMask bit(const char* name) { return MetricMask{1} << metric_index(name); }

TrainingSet::Entry entry(std::string id, std::vector<double> column0, std::set<std::size_t> labels) {
  TrainingSet::Entry e;
  e.doc_id = std::move(id);
  e.rows = column0.size();
  e.features.assign(e.rows * kMetricCount, 0.0);
  for (std::size_t i = 0; i < e.rows; ++i) e.features[i * kMetricCount] = column0[i];
  e.positive.assign(e.rows, 0);
  for (auto i : labels) e.positive[i] = 1;
  e.labels = std::move(labels);
  return e;
}

pso::Particle particle_with_bits(MetricMask mask) {
  pso::Particle p;
  p.bin = bits_from_mask(mask);
  p.real.assign(kMetricCount, 0.0);
  p.v1.assign(kMetricCount, 0.0);
  p.v2.assign(kMetricCount, 0.0);
  p.fit_mask.assign(kMetricCount, 0);
  return p;
}

}  // namespace

TEST_CASE("mask conversions") {
  const MetricMask m = bit("pos_l") | bit("d_cov_c");
  CHECK(mask_from_bits(bits_from_mask(m)) == m);
  CHECK(mask_size(m) == 2);
  CHECK(bits_from_mask(m).size() == kMetricCount);
}

TEST_CASE("coefficient normalization") {
  std::vector<double> real(kMetricCount, 0.0);
  real[0] = 3.0;
  real[1] = 0.0;
  real[2] = -3.0;
  const auto w = normalize_coefficients(real, 0b111, kLimit4);
  CHECK(w[0] == Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(w[1] == Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(w[2] == 0.0);
  for (std::size_t j = 3; j < kMetricCount; ++j) CHECK(w[j] == 0.0);

  SUBCASE("single metric gets weight 1") {
    for (double v : {-3.0, -1.0, 0.5, 3.0}) {
      std::vector<double> r(kMetricCount, v);
      CHECK(normalize_coefficients(r, bit("tf"), kLimit4)[metric_index("tf")] == 1.0);
    }
  }
  SUBCASE("all at the lower limit falls back to uniform") {
    std::vector<double> r(kMetricCount, -3.0);
    const auto u = normalize_coefficients(r, 0b1011, kLimit4);
    CHECK(u[0] == Approx(1.0 / 3.0));
    CHECK(u[1] == Approx(1.0 / 3.0));
    CHECK(u[2] == 0.0);
    CHECK(u[3] == Approx(1.0 / 3.0));
  }
  SUBCASE("empty mask gives zero weights") {
    const auto z = normalize_coefficients(real, 0, kLimit4);
    for (double v : z) CHECK(v == 0.0);
  }
}

TEST_CASE("sentence score") {
  std::array<double, kMetricCount> w{};
  std::vector<double> zero(kMetricCount, 0.0);
  w[0] = 0.5;
  w[1] = 0.5;
  CHECK(sentence_score(w, zero) == 0.0);
  std::vector<double> f(kMetricCount, 0.9);
  f[0] = 0.2;
  f[1] = 0.8;
  CHECK(sentence_score(w, f) == Approx(0.5).epsilon(1e-15));
  std::array<double, kMetricCount> single{};
  single[4] = 1.0;
  CHECK(sentence_score(single, f) == f[4]);
}

TEST_CASE("summary size and selection") {
  CHECK(summary_size(40, 0.10) == 4);
  CHECK(summary_size(5, 0.10) == 1);
  CHECK(summary_size(7, 1.0) == 7);
  CHECK(summary_size(25, 0.10) == 3);  // 2.5 rounds half away from zero
  CHECK_THROWS_AS(summary_size(10, 0.0), Error);
  CHECK_THROWS_AS(summary_size(10, 1.5), Error);

  const std::vector<double> flat(10, 0.3);
  CHECK(select_summary(flat, 0.3) == std::vector<std::size_t>{0, 1, 2});
  const std::vector<double> s{0.1, 0.9, 0.5, 0.9, 0.2};
  CHECK(select_summary(s, 0.4) == std::vector<std::size_t>{1, 3});
  CHECK(select_summary(s, 0.6) == std::vector<std::size_t>{1, 2, 3});
}

TEST_CASE("MCC") {
  CHECK(mcc({4, 0, 0, 36}) == 1.0);
  CHECK(mcc({2, 1, 1, 6}) == Approx(11.0 / 21.0).epsilon(1e-15));
  CHECK(mcc({0, 0, 0, 10}) == 0.0);
  CHECK(mcc({0, 5, 5, 0}) == -1.0);

  // brute-force recount of the 2/1/1/6 example
  const std::vector<int> label{1, 1, 1, 0, 0, 0, 0, 0, 0, 0};
  const std::vector<int> pred{1, 1, 0, 1, 0, 0, 0, 0, 0, 0};
  std::set<std::size_t> labels;
  std::vector<std::size_t> predicted;
  for (std::size_t i = 0; i < label.size(); ++i) {
    if (label[i]) labels.insert(i);
    if (pred[i]) predicted.push_back(i);
  }
  const auto m = confusion(predicted, labels, label.size());
  CHECK(m == ConfusionMatrix{2, 1, 1, 6});
  CHECK(m.total() == 10);
}

TEST_CASE("combination enumeration") {
  CHECK(enumerate_combinations(0).empty());
  CHECK(enumerate_combinations(bit("luhn")) == std::vector<MetricMask>{bit("luhn")});
  const MetricMask two_pos_three_title = bit("pos_f") | bit("pos_b") | bit("title_o") | bit("title_j") | bit("title_c");
  const auto six = enumerate_combinations(two_pos_three_title);
  CHECK(six.size() == 6);
  CHECK(combination_count(two_pos_three_title) == 6);
  for (auto m : six) CHECK(mask_size(m) == 2);
  CHECK(enumerate_combinations(0xFFFF).size() == 324);
  CHECK(std::is_sorted(six.begin(), six.end()));
}

TEST_CASE("particle fitness aggregation") {
  TrainingSet set;
  // 30 sentences, 3 labels the criterion ranks first: perfect MCC
  std::vector<double> a(30, 0.1);
  a[4] = a[9] = a[20] = 0.9;
  set.docs.push_back(entry("a", a, {4, 9, 20}));
  // one labeled sentence and nothing else: zero denominator, MCC 0
  set.docs.push_back(entry("b", {0.5}, {0}));
  set.total_labels = 4;

  const auto f = evaluate_particle(particle_with_bits(1), set, 0.10, kLimit4);
  CHECK(f.fitness == Approx(0.75).epsilon(1e-15));
  CHECK(f.fit_mask == 1);

  SUBCASE("single document: fitness equals its MCC") {
    TrainingSet one;
    one.docs.push_back(set.docs[0]);
    one.total_labels = 3;
    CHECK(evaluate_particle(particle_with_bits(1), one, 0.10, kLimit4).fitness == 1.0);
  }
  SUBCASE("empty BinInd scores -1") {
    const auto none = evaluate_particle(particle_with_bits(0), set, 0.10, kLimit4);
    CHECK(none.fitness == -1.0);
    CHECK(none.fit_mask == 0);
  }
}

TEST_CASE("best combination ties go to the smaller mask") {
  TrainingSet set;
  std::vector<double> a(10, 0.0);
  a[0] = 1.0;
  auto e = entry("a", a, {0});
  e.features[0 * kMetricCount + 1] = 1.0;  // column 1 ranks identically
  set.docs.push_back(e);
  set.total_labels = 1;
  const auto f = evaluate_particle(particle_with_bits(0b11), set, 0.10, kLimit4);
  CHECK(f.fitness == 1.0);
  CHECK(f.fit_mask == 0b01);
}

TEST_CASE("velocity penalty") {
  auto p = particle_with_bits(0b11);
  p.fit_mask = bits_from_mask(0b11);
  p.v1[0] = 0.3;
  p.v2[0] = 2.0;
  apply_velocity_penalty(p);
  CHECK(p.v1[0] == 0.3);
  CHECK(p.v2[0] == 2.0);

  p.fit_mask = bits_from_mask(0b01);
  p.v1[1] = -0.5;
  p.v2[1] = 2.0;
  apply_velocity_penalty(p);
  CHECK(p.v2[1] == 1.5);
  CHECK(p.v1[1] == Approx(-0.49).epsilon(1e-15));
  CHECK(p.v1[0] == 0.3);
}

TEST_CASE("criterion fitness matches direct evaluation") {
  psum::Rng rng(2);
  TrainingSet set;
  for (int d = 0; d < 5; ++d) {
    TrainingSet::Entry e;
    e.doc_id = "d" + std::to_string(d);
    e.rows = 10 + d * 3;
    e.features.resize(e.rows * kMetricCount);
    for (auto& v : e.features) v = rng.uniform01();
    e.positive.assign(e.rows, 0);
    for (std::size_t i = 0; i < e.rows; i += 4) {
      e.labels.insert(i);
      e.positive[i] = 1;
    }
    set.total_labels += e.labels.size();
    set.docs.push_back(std::move(e));
  }
  Criterion c;
  c.mask = 0b1000100;
  c.weights[2] = 0.25;
  c.weights[6] = 0.75;
  double weighted = 0.0;
  for (const auto& e : set.docs) {
    std::vector<double> scores(e.rows);
    for (std::size_t i = 0; i < e.rows; ++i)
      scores[i] = sentence_score(c.weights, std::span<const double>(e.features.data() + i * kMetricCount, kMetricCount));
    const auto picked = select_summary(scores, 0.2);
    weighted += static_cast<double>(e.labels.size()) * mcc(confusion(picked, e.labels, e.rows));
  }
  CHECK(criterion_fitness(c, set, 0.2) == Approx(weighted / static_cast<double>(set.total_labels)).epsilon(1e-14));
}
