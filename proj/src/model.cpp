#include "enq/model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <set>

#include "enq/parallel.hpp"
#include "enq/rng.hpp"

namespace enq::model {

FeatureDictionary::FeatureDictionary(std::vector<std::string> names) : names_(std::move(names)) {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (!index_.emplace(names_[i], static_cast<int>(i)).second)
      throw DataError("duplicate feature name '" + names_[i] + "' in dictionary");
  }
}

FeatureDictionary FeatureDictionary::build(std::span<const Example> examples) {
  std::set<std::string> all;
  for (const auto& ex : examples) all.insert(ex.features.begin(), ex.features.end());
  return FeatureDictionary(std::vector<std::string>(all.begin(), all.end()));
}

std::optional<int> FeatureDictionary::index(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<int> FeatureDictionary::encode(const FeatureVector& v) const {
  std::vector<int> out;
  out.reserve(v.size());
  for (const auto& f : v)
    if (auto i = index(f)) out.push_back(*i);
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<Algorithm> parse_algorithm(std::string_view text) {
  if (text == "linear" || text == "svm") return Algorithm::Linear;
  if (text == "forest" || text == "rf") return Algorithm::Forest;
  return std::nullopt;
}

std::string_view to_string(Algorithm algo) { return algo == Algorithm::Linear ? "linear" : "forest"; }

void TrainConfig::validate() const {
  if (!(penalty_c > 0.0)) throw DataError("penalty C must be > 0");
  if (n_trees < 1) throw DataError("tree count must be >= 1");
  if (max_depth && *max_depth < 1) throw DataError("max depth must be >= 1");
  if (max_epochs < 1) throw DataError("max epochs must be >= 1");
  if (!(tolerance >= 0.0)) throw DataError("tolerance must be >= 0");
}

namespace {

void check_trainable(std::span<const Example> train) {
  if (train.empty()) throw DegenerateTrainingError("training set is empty");
  bool has_e = false, has_note = false;
  for (const auto& ex : train) (ex.label == Label::E ? has_e : has_note) = true;
  if (!has_e || !has_note) throw DegenerateTrainingError("training set contains a single class");
}

double sign_of(Label label) { return label == Label::E ? 1.0 : -1.0; }

double sparse_dot(const Eigen::VectorXd& w, const std::vector<int>& x) {
  double s = 0.0;
  for (int j : x) s += w[j];
  return s;
}

double objective(const Eigen::VectorXd& w, double bias, double c, const std::vector<std::vector<int>>& xs,
                 const std::vector<double>& ys) {
  double loss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) loss += std::max(0.0, 1.0 - ys[i] * (sparse_dot(w, xs[i]) + bias));
  return 0.5 * w.squaredNorm() + c * loss;
}

}  // namespace

double LinearModel::decision_value(const FeatureVector& v) const {
  return sparse_dot(weights, dictionary.encode(v)) + bias;
}

double hinge_objective(const LinearModel& model, std::span<const Example> data) {
  std::vector<std::vector<int>> xs;
  std::vector<double> ys;
  for (const auto& ex : data) {
    xs.push_back(model.dictionary.encode(ex.features));
    ys.push_back(sign_of(ex.label));
  }
  return objective(model.weights, model.bias, model.penalty_c, xs, ys);
}

LinearModel fit_linear(std::span<const Example> train, const TrainConfig& config) {
  config.validate();
  check_trainable(train);

  LinearModel model;
  model.dictionary = FeatureDictionary::build(train);
  model.penalty_c = config.penalty_c;
  const std::size_t n = train.size();
  const double c = config.penalty_c;

  std::vector<std::vector<int>> xs;
  std::vector<double> ys;
  xs.reserve(n);
  std::size_t max_nnz = 0;
  for (const auto& ex : train) {
    xs.push_back(model.dictionary.encode(ex.features));
    ys.push_back(sign_of(ex.label));
    max_nnz = std::max(max_nnz, xs.back().size());
  }

  // w = scale * v keeps the per-step shrinkage O(1).
  Eigen::VectorXd w = Eigen::VectorXd::Zero(model.dictionary.size());
  double bias = 0.0;
  double current = objective(w, bias, c, xs, ys);
  model.objective_history.push_back(current);

  // One margin violation moves that example's margin by at most ~1.
  const double initial_step = 1.0 / (c * static_cast<double>(max_nnz + 1));
  double step = initial_step;
  Rng rng(config.seed);
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;

  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    rng.shuffle(order);
    Eigen::VectorXd v = w;
    double scale = 1.0;
    double b = bias;
    const double shrink = 1.0 - step / static_cast<double>(n);
    for (std::size_t i : order) {
      double margin = ys[i] * (scale * sparse_dot(v, xs[i]) + b);
      scale *= shrink;
      if (margin < 1.0) {
        double delta = step * c * ys[i];
        for (int j : xs[i]) v[j] += delta / scale;
        b += delta;
      }
      if (scale < 1e-9) {
        v *= scale;
        scale = 1.0;
      }
    }
    Eigen::VectorXd candidate = scale * v;
    double value = objective(candidate, b, c, xs, ys);
    if (value <= current) {
      double improvement = current - value;
      w = std::move(candidate);
      bias = b;
      current = value;
      model.objective_history.push_back(current);
      if (improvement <= config.tolerance * std::max(1.0, current)) break;
    } else {
      model.objective_history.push_back(current);
      step *= 0.5;
      if (step < initial_step * 1e-6) break;
    }
  }

  model.weights = std::move(w);
  model.bias = bias;
  return model;
}

namespace {

class TreeBuilder {
 public:
  TreeBuilder(const std::vector<std::vector<int>>& xs, const std::vector<Label>& ys, int dims,
              std::optional<int> max_depth, std::uint64_t seed)
      : xs_(xs), ys_(ys), dims_(dims), max_depth_(max_depth), rng_(seed),
        candidates_(static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(dims))))),
        present_(static_cast<std::size_t>(dims), 0), present_pos_(static_cast<std::size_t>(dims), 0),
        pool_(static_cast<std::size_t>(dims)) {
    for (int f = 0; f < dims; ++f) pool_[static_cast<std::size_t>(f)] = f;
  }

  DecisionTree grow(const std::vector<std::size_t>& sample) {
    DecisionTree tree;
    grow_node(tree, sample, 0);
    return tree;
  }

 private:
  static double gini_mass(double count, double pos) {
    if (count <= 0.0) return 0.0;
    double q = pos / count;
    return count * 2.0 * q * (1.0 - q);
  }

  int grow_node(DecisionTree& tree, const std::vector<std::size_t>& sample, int depth) {
    int id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    std::size_t pos = 0;
    for (std::size_t i : sample) pos += ys_[i] == Label::E ? 1 : 0;
    const std::size_t total = sample.size();
    tree.nodes[id].label = 2 * pos > total ? Label::E : Label::NotE;
    if (pos == 0 || pos == total || (max_depth_ && depth >= *max_depth_)) return id;

    std::vector<int> touched;
    for (std::size_t i : sample) {
      for (int f : xs_[i]) {
        auto fi = static_cast<std::size_t>(f);
        if (present_[fi] == 0) touched.push_back(f);
        ++present_[fi];
        if (ys_[i] == Label::E) ++present_pos_[fi];
      }
    }
    std::size_t valid = 0;
    for (int f : touched)
      if (present_[static_cast<std::size_t>(f)] < total) ++valid;

    int best_feature = -1;
    double best_impurity = 0.0;
    if (valid > 0) {
      // Draw features without replacement; keep drawing past the candidate
      // budget until one of them actually separates the node.
      std::size_t seen_valid = 0;
      for (std::size_t drawn = 0; drawn < pool_.size(); ++drawn) {
        std::size_t j = drawn + rng_.below(pool_.size() - drawn);
        std::swap(pool_[drawn], pool_[j]);
        auto f = static_cast<std::size_t>(pool_[drawn]);
        std::size_t p = present_[f];
        if (p > 0 && p < total) {
          ++seen_valid;
          double pp = static_cast<double>(present_pos_[f]);
          double impurity = gini_mass(static_cast<double>(p), pp) +
                            gini_mass(static_cast<double>(total - p), static_cast<double>(pos) - pp);
          if (best_feature < 0 || impurity < best_impurity) {
            best_feature = pool_[drawn];
            best_impurity = impurity;
          }
        }
        if ((drawn + 1 >= candidates_ && best_feature >= 0) || seen_valid == valid) break;
      }
    }
    for (int f : touched) {
      present_[static_cast<std::size_t>(f)] = 0;
      present_pos_[static_cast<std::size_t>(f)] = 0;
    }
    if (best_feature < 0) return id;

    std::vector<std::size_t> absent, present;
    for (std::size_t i : sample) {
      const auto& x = xs_[i];
      (std::binary_search(x.begin(), x.end(), best_feature) ? present : absent).push_back(i);
    }
    tree.nodes[id].feature = best_feature;
    int a = grow_node(tree, absent, depth + 1);
    int p = grow_node(tree, present, depth + 1);
    tree.nodes[id].absent = a;
    tree.nodes[id].present = p;
    return id;
  }

  const std::vector<std::vector<int>>& xs_;
  const std::vector<Label>& ys_;
  int dims_;
  std::optional<int> max_depth_;
  Rng rng_;
  std::size_t candidates_;
  std::vector<std::size_t> present_;
  std::vector<std::size_t> present_pos_;
  std::vector<int> pool_;
};

}  // namespace

Label DecisionTree::predict(const std::vector<int>& features) const {
  int node = 0;
  while (nodes[node].feature >= 0) {
    bool has = std::binary_search(features.begin(), features.end(), nodes[node].feature);
    node = has ? nodes[node].present : nodes[node].absent;
  }
  return nodes[node].label;
}

int DecisionTree::depth() const {
  std::vector<int> level(nodes.size(), 0);
  int deepest = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    deepest = std::max(deepest, level[i]);
    if (nodes[i].feature >= 0) {
      level[static_cast<std::size_t>(nodes[i].absent)] = level[i] + 1;
      level[static_cast<std::size_t>(nodes[i].present)] = level[i] + 1;
    }
  }
  return deepest;
}

ForestModel fit_forest(std::span<const Example> train, const TrainConfig& config) {
  config.validate();
  check_trainable(train);

  ForestModel model;
  model.dictionary = FeatureDictionary::build(train);
  model.seed = config.seed;
  std::vector<std::vector<int>> xs;
  std::vector<Label> ys;
  for (const auto& ex : train) {
    xs.push_back(model.dictionary.encode(ex.features));
    ys.push_back(ex.label);
  }

  const std::size_t n = train.size();
  model.trees.resize(static_cast<std::size_t>(config.n_trees));
  parallel_for(model.trees.size(), config.workers, [&](std::size_t t) {
    std::uint64_t tree_seed = derive_seed(config.seed, t);
    Rng bootstrap(tree_seed);
    std::vector<std::size_t> sample(n);
    for (auto& s : sample) s = bootstrap.below(n);
    TreeBuilder builder(xs, ys, model.dictionary.size(), config.max_depth, derive_seed(tree_seed, 1));
    model.trees[t] = builder.grow(sample);
  });
  return model;
}

TrainedModel fit(std::span<const Example> train, const TrainConfig& config) {
  if (config.algorithm == Algorithm::Linear) return fit_linear(train, config);
  return fit_forest(train, config);
}

int ForestModel::votes_for_e(const FeatureVector& v) const {
  auto x = dictionary.encode(v);
  int votes = 0;
  for (const auto& tree : trees) votes += tree.predict(x) == Label::E ? 1 : 0;
  return votes;
}

Label predict(const LinearModel& model, const FeatureVector& v) {
  return model.decision_value(v) > 0.0 ? Label::E : Label::NotE;
}

Label predict(const ForestModel& model, const FeatureVector& v) {
  int votes = model.votes_for_e(v);
  return 2 * votes > static_cast<int>(model.trees.size()) ? Label::E : Label::NotE;
}

Label predict(const TrainedModel& model, const FeatureVector& v) {
  return std::visit([&](const auto& m) { return predict(m, v); }, model);
}

// Model file ------------------------------------------------------------------

namespace {

constexpr std::string_view kMagic = "enq-model v1";

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_dictionary(std::ostream& out, const FeatureDictionary& dict) {
  out << "features " << dict.size() << '\n';
  for (int i = 0; i < dict.size(); ++i) out << i << '\t' << dict.name(i) << '\n';
}

class ModelReader {
 public:
  ModelReader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

  std::string line() {
    std::string text;
    if (!std::getline(in_, text)) fail("unexpected end of file");
    ++lineno_;
    return std::string(chomp(text));
  }

  [[noreturn]] void fail(const std::string& why) const {
    throw DataError(source_ + ":" + std::to_string(lineno_) + ": " + why);
  }

  long long integer(std::string_view text) const {
    long long v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) fail("expected an integer, got '" + std::string(text) + "'");
    return v;
  }

  double real(const std::string& text) const {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(text, &used);
    } catch (const std::exception&) {
      fail("expected a number, got '" + text + "'");
    }
    if (used != text.size()) fail("expected a number, got '" + text + "'");
    return v;
  }

  /// Reads `<word> <count>` and returns count.
  long long counted(std::string_view word) {
    auto parts = split(line(), ' ');
    if (parts.size() != 2 || parts[0] != word) fail("expected '" + std::string(word) + " <count>'");
    long long n = integer(parts[1]);
    if (n < 0) fail("negative count");
    return n;
  }

  /// Reads `<key> \t <value>`.
  std::string keyed(std::string_view key) {
    auto parts = split(line(), '\t');
    if (parts.size() != 2 || parts[0] != key) fail("expected '" + std::string(key) + "\\t<value>'");
    return parts[1];
  }

  FeatureDictionary dictionary() {
    long long n = counted("features");
    std::vector<std::string> names;
    for (long long i = 0; i < n; ++i) {
      auto parts = split(line(), '\t');
      if (parts.size() != 2 || integer(parts[0]) != i) fail("expected '<index>\\t<name>' with index " + std::to_string(i));
      names.push_back(parts[1]);
    }
    return FeatureDictionary(std::move(names));
  }

 private:
  std::istream& in_;
  std::string source_;
  std::size_t lineno_ = 0;
};

}  // namespace

void save_model(std::ostream& out, const TrainedModel& model) {
  if (const auto* linear = std::get_if<LinearModel>(&model)) {
    out << kMagic << " linear\n";
    write_dictionary(out, linear->dictionary);
    out << "penalty_c\t" << format_double(linear->penalty_c) << '\n';
    out << "bias\t" << format_double(linear->bias) << '\n';
    out << "weights " << linear->weights.size() << '\n';
    for (Eigen::Index i = 0; i < linear->weights.size(); ++i) out << i << '\t' << format_double(linear->weights[i]) << '\n';
    return;
  }
  const auto& forest = std::get<ForestModel>(model);
  out << kMagic << " forest\n";
  write_dictionary(out, forest.dictionary);
  out << "seed\t" << forest.seed << '\n';
  out << "trees " << forest.trees.size() << '\n';
  for (std::size_t t = 0; t < forest.trees.size(); ++t) {
    const auto& tree = forest.trees[t];
    out << "tree " << tree.nodes.size() << '\n';
    for (const auto& node : tree.nodes) {
      if (node.feature >= 0)
        out << "S\t" << node.feature << '\n';
      else
        out << "L\t" << label_code(node.label) << '\n';
    }
  }
}

namespace {

// Rebuilds child links from a preorder node list; returns one past the subtree.
std::size_t link_preorder(std::vector<DecisionTree::Node>& nodes, std::size_t at, const ModelReader& reader) {
  if (at >= nodes.size()) reader.fail("truncated tree");
  if (nodes[at].feature < 0) return at + 1;
  nodes[at].absent = static_cast<int>(at + 1);
  std::size_t next = link_preorder(nodes, at + 1, reader);
  nodes[at].present = static_cast<int>(next);
  return link_preorder(nodes, next, reader);
}

}  // namespace

TrainedModel load_model(std::istream& in, const std::string& source) {
  ModelReader reader(in, source);
  std::string header = reader.line();
  if (header == std::string(kMagic) + " linear") {
    LinearModel m;
    m.dictionary = reader.dictionary();
    m.penalty_c = reader.real(reader.keyed("penalty_c"));
    m.bias = reader.real(reader.keyed("bias"));
    long long n = reader.counted("weights");
    if (n != m.dictionary.size()) reader.fail("weight count does not match dictionary size");
    m.weights = Eigen::VectorXd::Zero(n);
    for (long long i = 0; i < n; ++i) {
      auto parts = split(reader.line(), '\t');
      if (parts.size() != 2 || reader.integer(parts[0]) != i) reader.fail("expected '<index>\\t<weight>'");
      m.weights[i] = reader.real(parts[1]);
    }
    return m;
  }
  if (header == std::string(kMagic) + " forest") {
    ForestModel m;
    m.dictionary = reader.dictionary();
    m.seed = static_cast<std::uint64_t>(reader.integer(reader.keyed("seed")));
    long long trees = reader.counted("trees");
    for (long long t = 0; t < trees; ++t) {
      DecisionTree tree;
      long long count = reader.counted("tree");
      if (count < 1) reader.fail("empty tree");
      for (long long k = 0; k < count; ++k) {
        auto parts = split(reader.line(), '\t');
        DecisionTree::Node node;
        if (parts.size() == 2 && parts[0] == "S") {
          node.feature = static_cast<int>(reader.integer(parts[1]));
          if (node.feature < 0 || node.feature >= m.dictionary.size()) reader.fail("split feature out of range");
        } else if (parts.size() == 2 && parts[0] == "L") {
          try {
            node.label = parse_label_code(parts[1]);
          } catch (const DataError& e) {
            reader.fail(e.what());
          }
        } else {
          reader.fail("expected 'S\\t<feature>' or 'L\\t<E|N>'");
        }
        tree.nodes.push_back(node);
      }
      if (link_preorder(tree.nodes, 0, reader) != tree.nodes.size()) reader.fail("tree has trailing nodes");
      m.trees.push_back(std::move(tree));
    }
    if (m.trees.empty()) reader.fail("forest has no trees");
    return m;
  }
  reader.fail("not an enq-model v1 file");
}

}  // namespace enq::model
