#include "enq/model.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

namespace enq::model {
namespace {

std::vector<Example> separable() {
  std::vector<Example> out;
  for (int i = 0; i < 10; ++i) {
    out.push_back({{"f1", "g" + std::to_string(i % 3)}, Label::E});
    out.push_back({{"f2", "g" + std::to_string(i % 3)}, Label::NotE});
  }
  return out;
}

std::vector<Example> noisy(std::uint32_t seed, int n) {
  std::mt19937 rng(seed);
  std::bernoulli_distribution coin(0.5), flip(0.1), on(0.3);
  std::vector<Example> out;
  for (int i = 0; i < n; ++i) {
    Label y = coin(rng) ? Label::E : Label::NotE;
    FeatureVector v;
    for (int f = 0; f < 12; ++f)
      if (on(rng)) v.insert("x" + std::to_string(f));
    if (y == Label::E && !flip(rng)) v.insert("signal");
    out.push_back({v, y});
  }
  out[0].label = Label::E;
  out[1].label = Label::NotE;
  return out;
}

double training_accuracy(const TrainedModel& m, const std::vector<Example>& data) {
  int ok = 0;
  for (const auto& e : data) ok += predict(m, e.features) == e.label;
  return static_cast<double>(ok) / static_cast<double>(data.size());
}

TrainConfig linear_config() {
  TrainConfig c;
  c.algorithm = Algorithm::Linear;
  return c;
}

TEST(Dictionary, SortedAndEncodes) {
  std::vector<Example> data{{{"b", "a"}, Label::E}, {{"c"}, Label::NotE}};
  auto d = FeatureDictionary::build(data);
  EXPECT_EQ(d.names(), (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(d.encode({"c", "zzz", "a"}), (std::vector<int>{0, 2}));
  EXPECT_FALSE(d.index("zzz").has_value());
}

TEST(ParseAlgorithm, Aliases) {
  EXPECT_EQ(parse_algorithm("linear"), Algorithm::Linear);
  EXPECT_EQ(parse_algorithm("svm"), Algorithm::Linear);
  EXPECT_EQ(parse_algorithm("forest"), Algorithm::Forest);
  EXPECT_EQ(parse_algorithm("rf"), Algorithm::Forest);
  EXPECT_FALSE(parse_algorithm("knn").has_value());
}

TEST(Linear, SeparableToyIsLearned) {
  auto data = separable();
  auto m = fit(data, linear_config());
  EXPECT_DOUBLE_EQ(training_accuracy(m, data), 1.0);
}

TEST(Linear, DegenerateInputs) {
  std::vector<Example> empty;
  EXPECT_THROW(fit_linear(empty, linear_config()), DegenerateTrainingError);
  std::vector<Example> one{{{"a"}, Label::E}, {{"b"}, Label::E}};
  EXPECT_THROW(fit_linear(one, linear_config()), DegenerateTrainingError);
  EXPECT_THROW(fit_forest(one, TrainConfig{}), DegenerateTrainingError);
}

TEST(Linear, Deterministic) {
  auto data = noisy(1, 120);
  auto a = fit_linear(data, linear_config());
  auto b = fit_linear(data, linear_config());
  ASSERT_EQ(a.weights.size(), b.weights.size());
  for (Eigen::Index i = 0; i < a.weights.size(); ++i) EXPECT_EQ(a.weights[i], b.weights[i]);
  EXPECT_EQ(a.bias, b.bias);
}

TEST(Linear, ObjectiveNeverIncreases) {
  for (std::uint32_t seed : {2u, 3u, 4u}) {
    auto data = noisy(seed, 150);
    auto cfg = linear_config();
    cfg.tolerance = 0.0;
    cfg.max_epochs = 60;
    auto m = fit_linear(data, cfg);
    ASSERT_FALSE(m.objective_history.empty());
    for (std::size_t i = 1; i < m.objective_history.size(); ++i)
      EXPECT_LE(m.objective_history[i], m.objective_history[i - 1]);
    EXPECT_NEAR(hinge_objective(m, data), m.objective_history.back(), 1e-9 * m.objective_history.back());
  }
}

TEST(Linear, ZeroVectorFollowsBiasSign) {
  LinearModel m;
  m.dictionary = FeatureDictionary({"a"});
  m.weights = Eigen::VectorXd::Constant(1, 2.0);
  m.bias = -0.5;
  EXPECT_EQ(predict(m, {}), Label::NotE);
  EXPECT_EQ(predict(m, {"a"}), Label::E);
  m.bias = 0.0;
  m.weights[0] = 0.0;
  EXPECT_EQ(predict(m, {"a"}), Label::NotE);  // a zero margin is not E
}

TEST(Forest, SingleFeatureStumps) {
  std::vector<Example> data;
  for (int i = 0; i < 10; ++i) {
    data.push_back({{"f1"}, Label::E});
    data.push_back({{}, Label::NotE});
  }
  auto m = fit_forest(data, TrainConfig{});
  ASSERT_EQ(m.trees.size(), 20u);
  for (const auto& t : m.trees) {
    EXPECT_EQ(t.depth(), 1);
    ASSERT_EQ(t.nodes.size(), 3u);
    EXPECT_EQ(m.dictionary.name(t.nodes[0].feature), "f1");
  }
  EXPECT_EQ(predict(m, {"f1"}), Label::E);
  EXPECT_EQ(predict(m, {}), Label::NotE);
}

TEST(Forest, SingleTreeReproducible) {
  auto data = noisy(5, 80);
  TrainConfig c;
  c.n_trees = 1;
  std::ostringstream a, b;
  save_model(a, fit(data, c));
  save_model(b, fit(data, c));
  EXPECT_EQ(a.str(), b.str());
  c.seed = 43;
  std::ostringstream other;
  save_model(other, fit(data, c));
  EXPECT_NE(a.str(), other.str());
}

TEST(Forest, IdenticalVectorsGiveMajority) {
  std::vector<Example> data;
  for (int i = 0; i < 8; ++i) data.push_back({{"same"}, Label::E});
  for (int i = 0; i < 2; ++i) data.push_back({{"same"}, Label::NotE});
  TrainConfig c;
  c.n_trees = 21;
  auto m = fit_forest(data, c);
  for (const auto& t : m.trees) EXPECT_EQ(t.nodes.size(), 1u);
  EXPECT_EQ(predict(m, {"same"}), Label::E);
  EXPECT_EQ(predict(m, {"other"}), Label::E);
}

TEST(Forest, TiedVoteIsNotE) {
  ForestModel m;
  for (int i = 0; i < 20; ++i) {
    DecisionTree t;
    t.nodes.push_back({-1, -1, -1, i < 10 ? Label::E : Label::NotE});
    m.trees.push_back(t);
  }
  EXPECT_EQ(m.votes_for_e({}), 10);
  EXPECT_EQ(predict(m, {}), Label::NotE);
}

TEST(Forest, ParallelTrainingMatchesSerial) {
  auto data = noisy(6, 100);
  TrainConfig c;
  std::ostringstream serial, parallel;
  save_model(serial, fit(data, c));
  c.workers = 4;
  save_model(parallel, fit(data, c));
  EXPECT_EQ(serial.str(), parallel.str());
}

TEST(Forest, RespectsMaxDepth) {
  auto data = noisy(7, 120);
  TrainConfig c;
  c.max_depth = 2;
  auto m = fit_forest(data, c);
  for (const auto& t : m.trees) EXPECT_LE(t.depth(), 2);
}

TEST(Forest, UnboundedTreesFitTrainingData) {
  // Distinct vectors are always separable by enough presence splits.
  auto data = noisy(8, 60);
  TrainConfig c;
  c.n_trees = 51;
  EXPECT_GE(training_accuracy(fit(data, c), data), 0.9);
}

TEST(Predict, UnseenFeaturesAreIgnored) {
  auto data = noisy(9, 100);
  for (auto algo : {Algorithm::Linear, Algorithm::Forest}) {
    TrainConfig c;
    c.algorithm = algo;
    auto m = fit(data, c);
    for (const auto& e : data) {
      auto extended = e.features;
      extended.insert("never-seen-a");
      extended.insert("zz-never-seen");
      EXPECT_EQ(predict(m, extended), predict(m, e.features));
    }
  }
}

TEST(Serialization, RoundTripBothKinds) {
  auto data = noisy(10, 90);
  for (auto algo : {Algorithm::Linear, Algorithm::Forest}) {
    TrainConfig c;
    c.algorithm = algo;
    auto m = fit(data, c);
    std::ostringstream out;
    save_model(out, m);
    std::istringstream in(out.str());
    auto back = load_model(in, "mem");
    std::ostringstream again;
    save_model(again, back);
    EXPECT_EQ(out.str(), again.str());
    for (const auto& e : data) EXPECT_EQ(predict(back, e.features), predict(m, e.features));
  }
}

TEST(Serialization, RejectsGarbage) {
  std::istringstream in("not a model\n");
  EXPECT_THROW(load_model(in, "mem"), DataError);
  std::istringstream truncated("enq-model v1 forest\nfeatures 1\n0\ta\nseed\t1\ntrees 1\ntree 3\nS\t0\n");
  EXPECT_THROW(load_model(truncated, "mem"), DataError);
}

}  // namespace
}  // namespace enq::model
