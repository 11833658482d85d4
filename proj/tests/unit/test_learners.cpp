#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "uwbfp/error.hpp"
#include "uwbfp/learners.hpp"

using namespace uwbfp;

namespace {

TrainingSet identity_db_rows() {
  static const TrainingSet rows =
      training_set_from_db(build_db(CalibrationModel::identity(), GridSpec{}, AnchorLayout{}));
  return rows;
}

TrainingSet random_rows(std::mt19937_64& rng, std::size_t n, std::uint32_t labels) {
  std::uniform_real_distribution<double> u(0.0, 3000.0);
  std::uniform_int_distribution<std::uint32_t> l(0, labels - 1);
  TrainingSet rows;
  for (std::size_t i = 0; i < n; ++i) rows.push_back({{u(rng), u(rng), u(rng)}, {l(rng)}});
  return rows;
}

void check_distribution(const ClassProbabilities& p) {
  CHECK(std::abs(p.total() - 1.0) <= 1e-9);
  for (const auto& [label, m] : p.entries()) CHECK(m > 0.0);
}

}  // namespace

TEST_CASE("class probabilities normalize and merge") {
  const auto p = ClassProbabilities::from_weights({{{7}, 1.0}, {{3}, 2.0}, {{7}, 1.0}, {{9}, 0.0}});
  REQUIRE(p.entries().size() == 2);
  CHECK(p.entries()[0].first.index == 3);
  CHECK(p.mass({3}) == 0.5);
  CHECK(p.mass({7}) == 0.5);
  CHECK(p.mass({9}) == 0.0);
  CHECK(p.argmax().index == 3);
  CHECK_THROWS_AS(ClassProbabilities::from_weights({{{1}, -1.0}}), Error);
}

TEST_CASE("knn training errors") {
  try {
    KnnClassifier::train({}, 1);
    FAIL("expected EmptyTrainingSet");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::EmptyTrainingSet);
  }
  for (std::size_t k : {0u, 4u}) {
    try {
      KnnClassifier::train({{{1, 1, 1}, {0}}, {{2, 2, 2}, {1}}, {{3, 3, 3}, {2}}}, k);
      FAIL("expected KOutOfRange");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::KOutOfRange);
    }
  }
}

TEST_CASE("knn examples") {
  const TrainingSet three{{{0, 0, 0}, {0}}, {{1, 1, 1}, {1}}, {{10, 10, 10}, {2}}};
  const auto p = KnnClassifier::train(three, 3).predict_proba({0.4, 0.4, 0.4});
  for (std::uint32_t l = 0; l < 3; ++l) CHECK(p.mass({l}) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

  const auto p2 = KnnClassifier::train(three, 2).predict_proba({0.4, 0.4, 0.4});
  CHECK(p2.mass({0}) == 0.5);
  CHECK(p2.mass({1}) == 0.5);

  // Equidistant tie: label 9 is listed first but label 5 wins.
  const TrainingSet tie{{{0, 0, 0}, {9}}, {{2, 0, 0}, {5}}};
  CHECK(KnnClassifier::train(tie, 1).predict_proba({1, 0, 0}).argmax().index == 5);

  // k = |train| returns the global label frequency.
  const TrainingSet freq{{{0, 0, 0}, {4}}, {{5, 5, 5}, {4}}, {{9, 9, 9}, {8}}, {{1, 2, 3}, {4}}};
  const auto all = KnnClassifier::train(freq, 4).predict_proba({100, -3, 7});
  CHECK(all.mass({4}) == 0.75);
  CHECK(all.mass({8}) == 0.25);
}

TEST_CASE("1-NN recalls every stored fingerprint of the grid") {
  const auto rows = identity_db_rows();
  const auto knn = KnnClassifier::train(rows, 1);
  for (const auto& r : rows) {
    const auto p = knn.predict_proba(r.features);
    CHECK(p.mass(r.label) == 1.0);
  }
}

TEST_CASE("1-NN matches the exhaustive-scan oracle") {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<std::size_t> size(1, 500);
  std::uniform_real_distribution<double> u(-100.0, 3100.0);
  for (int db = 0; db < 20; ++db) {
    const auto rows = random_rows(rng, size(rng), 200);
    const auto knn = KnnClassifier::train(rows, 1);
    for (int q = 0; q < 100; ++q) {
      const RangeTriple query{u(rng), u(rng), u(rng)};
      const auto want = rows[oracle::nearest(rows, query.d_a, query.d_b, query.d_c)].label;
      CHECK(knn.predict_proba(query).argmax() == want);
    }
  }
}

TEST_CASE("tree examples") {
  const auto pure = TreeClassifier::train({{{1, 2, 3}, {6}}, {{4, 5, 6}, {6}}});
  CHECK(pure.node_count() == 1);
  CHECK(pure.predict_proba({100, 100, 100}).mass({6}) == 1.0);

  const TrainingSet pair{{{0, 0, 0}, {0}}, {{100, 100, 100}, {1}}};
  const auto t = TreeClassifier::train(pair);
  CHECK(t.node_count() == 3);
  CHECK(t.predict_proba({0, 0, 0}).argmax().index == 0);
  CHECK(t.predict_proba({100, 100, 100}).argmax().index == 1);
  // Threshold is the midpoint 50 on the first feature; equality goes left.
  CHECK(t.predict_proba({50, 1000, 1000}).argmax().index == 0);
  CHECK(t.predict_proba({50.000001, -1000, -1000}).argmax().index == 1);

  const auto impure = TreeClassifier::train({{{1, 1, 1}, {0}}, {{1, 1, 1}, {0}}, {{1, 1, 1}, {1}}});
  const auto p = impure.predict_proba({1, 1, 1});
  CHECK(p.mass({0}) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(p.mass({1}) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

  try {
    TreeClassifier::train({});
    FAIL("expected EmptyTrainingSet");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::EmptyTrainingSet);
  }
}

TEST_CASE("fully grown tree shatters the noise-free grid") {
  const auto rows = identity_db_rows();
  const auto tree = TreeClassifier::train(rows);
  std::size_t correct = 0;
  for (const auto& r : rows) {
    const auto p = tree.predict_proba(r.features);
    correct += p.mass(r.label) == 1.0;
  }
  CHECK(correct == rows.size());
}

TEST_CASE("tree depth and leaf size limits") {
  std::mt19937_64 rng(2);
  const auto rows = random_rows(rng, 400, 20);
  const auto shallow = TreeClassifier::train(rows, {3, 1});
  CHECK(shallow.depth() <= 3);
  const auto stump = TreeClassifier::train(rows, {1, 1});
  CHECK(stump.node_count() == 3);
  const auto big_leaves = TreeClassifier::train(rows, {0, 150});
  CHECK(big_leaves.node_count() <= 3);
  for (int i = 0; i < 50; ++i) check_distribution(shallow.predict_proba(rows[i].features));
}

TEST_CASE("single-member full forest equals the tree") {
  const auto rows = identity_db_rows();
  ForestParams fp;
  fp.n_trees = 1;
  fp.features_per_split = 3;
  fp.bootstrap = false;
  fp.seed = 1234;
  const auto forest = ForestClassifier::train(rows, fp);
  const auto tree = TreeClassifier::train(rows);
  for (const auto& r : rows) {
    CHECK(forest.predict_proba(r.features) == tree.predict_proba(r.features));
  }
}

TEST_CASE("forest seeds matter and predictions average the members") {
  std::mt19937_64 rng(8);
  const auto rows = random_rows(rng, 300, 15);
  ForestParams fp;
  fp.n_trees = 3;
  fp.seed = 1;
  const auto f1 = ForestClassifier::train(rows, fp);
  fp.seed = 2;
  const auto f2 = ForestClassifier::train(rows, fp);

  std::uniform_real_distribution<double> u(0.0, 3000.0);
  bool differs = false;
  for (int q = 0; q < 200; ++q) {
    const RangeTriple query{u(rng), u(rng), u(rng)};
    const auto p = f1.predict_proba(query);
    check_distribution(p);
    differs = differs || !(p == f2.predict_proba(query));

    for (std::uint32_t l = 0; l < 15; ++l) {
      double manual = 0.0;
      for (const auto& t : f1.members()) manual += t.predict_proba(query).mass({l});
      CHECK(p.mass({l}) == doctest::Approx(manual / 3.0).epsilon(1e-12));
    }
  }
  CHECK(differs);
}

TEST_CASE("forest is independent of thread count") {
  std::mt19937_64 rng(12);
  const auto rows = random_rows(rng, 200, 10);
  ForestParams fp;
  fp.n_trees = 8;
  fp.seed = 77;
  const auto a = ForestClassifier::train(rows, fp, 1);
  const auto b = ForestClassifier::train(rows, fp, 4);
  for (const auto& r : rows) CHECK(a.predict_proba(r.features) == b.predict_proba(r.features));
}

TEST_CASE("forest pure landing") {
  ForestParams fp;
  fp.n_trees = 5;
  const auto f = ForestClassifier::train({{{1, 1, 1}, {3}}, {{2, 2, 2}, {3}}}, fp);
  CHECK(f.predict_proba({0, 0, 0}).mass({3}) == 1.0);
  fp.features_per_split = 4;
  CHECK_THROWS_AS(ForestClassifier::train({{{1, 1, 1}, {3}}}, fp), Error);
}

TEST_CASE("soft vote examples") {
  const auto knn = ClassProbabilities::from_weights({{{3}, 1.0}});
  const auto tree = ClassProbabilities::from_weights({{{7}, 1.0}});
  CHECK(soft_vote(knn, tree, {1, 2}).index == 7);
  CHECK(soft_vote(knn, tree, {3, 1}).index == 3);
  CHECK(soft_vote(knn, tree, {1, 0}).index == 3);
  CHECK(soft_vote(knn, tree, {0, 1}).index == 7);
  // Exact tie goes to the lower label.
  CHECK(soft_vote(knn, tree, {1, 1}).index == 3);
  CHECK_THROWS_AS(soft_vote(knn, tree, {0, 0}), Error);
}

TEST_CASE("soft vote with weight (1, 0) is the knn argmax") {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<std::uint32_t> l(0, 30);
  for (int i = 0; i < 500; ++i) {
    std::vector<ClassProbabilities::Entry> a, b;
    for (int j = 0; j < 4; ++j) {
      a.emplace_back(CellLabel{l(rng)}, u(rng) + 0.01);
      b.emplace_back(CellLabel{l(rng)}, u(rng) + 0.01);
    }
    const auto pa = ClassProbabilities::from_weights(a);
    const auto pb = ClassProbabilities::from_weights(b);
    CHECK(soft_vote(pa, pb, {1, 0}) == pa.argmax());
  }
}
