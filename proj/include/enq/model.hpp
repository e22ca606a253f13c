#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "enq/common.hpp"
#include "enq/features.hpp"

namespace enq::model {

using features::FeatureVector;

struct Example {
  FeatureVector features;
  Label label = Label::NotE;
};

/// Feature name <-> dense index, frozen once built. Indices follow the sorted
/// order of names, so the same training split always yields the same
/// dictionary.
class FeatureDictionary {
 public:
  FeatureDictionary() = default;
  explicit FeatureDictionary(std::vector<std::string> names);

  static FeatureDictionary build(std::span<const Example> examples);

  std::optional<int> index(const std::string& name) const;
  const std::string& name(int index) const { return names_[static_cast<std::size_t>(index)]; }
  int size() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& names() const { return names_; }

  /// Sorted indices of the known features of v; unknown names are dropped.
  std::vector<int> encode(const FeatureVector& v) const;

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, int> index_;
};

enum class Algorithm { Linear, Forest };

/// Accepts "linear"/"svm" and "forest"/"rf".
std::optional<Algorithm> parse_algorithm(std::string_view text);
std::string_view to_string(Algorithm algo);

struct TrainConfig {
  Algorithm algorithm = Algorithm::Forest;
  double penalty_c = 1.0;
  int n_trees = 20;
  std::optional<int> max_depth;  // unlimited when empty
  std::uint64_t seed = 42;
  int max_epochs = 200;
  double tolerance = 1e-4;  // relative objective improvement that ends training
  unsigned workers = 1;     // tree-level parallelism; 0 = all processors

  void validate() const;
};

/// Maximum-margin hyperplane: E iff <w, x> + bias > 0.
struct LinearModel {
  FeatureDictionary dictionary;
  Eigen::VectorXd weights;
  double bias = 0.0;
  double penalty_c = 1.0;
  /// Primal objective after each epoch (not serialized).
  std::vector<double> objective_history;

  double decision_value(const FeatureVector& v) const;
};

/// Binary tree over feature presence. Nodes are stored in preorder; a split
/// node's absent child precedes its present child.
struct DecisionTree {
  struct Node {
    int feature = -1;  // -1 marks a leaf
    int absent = -1;
    int present = -1;
    Label label = Label::NotE;  // leaf vote
  };
  std::vector<Node> nodes;

  /// `features` must be sorted (as produced by FeatureDictionary::encode).
  Label predict(const std::vector<int>& features) const;
  int depth() const;
};

struct ForestModel {
  FeatureDictionary dictionary;
  std::vector<DecisionTree> trees;
  std::uint64_t seed = 0;

  /// Number of trees voting E.
  int votes_for_e(const FeatureVector& v) const;
};

using TrainedModel = std::variant<LinearModel, ForestModel>;

/// L2-regularized hinge loss 0.5|w|^2 + C * sum max(0, 1 - y(<w,x> + b)),
/// minimized by epochs of stochastic subgradient steps. An epoch is kept only
/// if it lowers the objective; otherwise it is undone and the step halves, so
/// objective_history never increases.
LinearModel fit_linear(std::span<const Example> train, const TrainConfig& config);

/// Bagged Gini trees, ceil(sqrt(d)) candidate features per node.
ForestModel fit_forest(std::span<const Example> train, const TrainConfig& config);

TrainedModel fit(std::span<const Example> train, const TrainConfig& config);

/// Value of the linear training objective for `model` on `data`.
double hinge_objective(const LinearModel& model, std::span<const Example> data);

Label predict(const LinearModel& model, const FeatureVector& v);
Label predict(const ForestModel& model, const FeatureVector& v);
Label predict(const TrainedModel& model, const FeatureVector& v);

void save_model(std::ostream& out, const TrainedModel& model);
TrainedModel load_model(std::istream& in, const std::string& source);

}  // namespace enq::model
