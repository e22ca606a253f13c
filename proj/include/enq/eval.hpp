#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "enq/common.hpp"
#include "enq/features.hpp"
#include "enq/model.hpp"

namespace enq::eval {

/// Counts with E as the positive class.
struct ConfusionMatrix {
  std::uint64_t tp = 0, fp = 0, tn = 0, fn = 0;

  std::uint64_t total() const { return tp + fp + tn + fn; }
  void add(Label truth, Label predicted);
  ConfusionMatrix& operator+=(const ConfusionMatrix& o);
};

struct Metrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Precision/recall with a zero denominator are 0, and F1 is 0 when P+R = 0.
/// Throws DataError on an empty matrix.
Metrics metrics(const ConfusionMatrix& m);

struct Fold {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Seeded shuffle of [0, n) cut into k contiguous folds; the first n % k
/// folds hold one extra example. Throws DataError if n < k or k < 2.
std::vector<Fold> kfold(std::size_t n, std::size_t k, std::uint64_t seed);

struct EvalReport {
  Metrics mean;    // unweighted average of per-fold metrics
  Metrics pooled;  // metrics of the summed matrix
  std::vector<ConfusionMatrix> folds;
};

struct CvConfig {
  model::TrainConfig train;
  std::size_t folds = 10;
  std::uint64_t seed = 42;  // fold assignment
  unsigned workers = 1;     // folds evaluated concurrently; 0 = all processors
};

/// k-fold cross-validation. Each fold trains on its own split, so the
/// feature dictionary never sees test-only features.
EvalReport cross_validate(std::span<const model::Example> data, const CvConfig& config);

struct MetricDeltas {
  double accuracy = 0.0, precision = 0.0, recall = 0.0, f1 = 0.0;
};

struct AblationRow {
  features::FeatureGroupId removed_group{};
  std::size_t affected_queries = 0;
  MetricDeltas deltas;  // ablated minus full, fold-averaged metrics
  Metrics ablated;
};

/// Removes `group` from every vector and reruns the same cross-validation;
/// `full` must come from cross_validate on `data` with the same config.
AblationRow ablate(std::span<const model::Example> data, features::FeatureGroupId group, const CvConfig& config,
                   const EvalReport& full);

/// Examples carrying at least one feature of `group`.
std::size_t affected_queries(std::span<const model::Example> data, features::FeatureGroupId group);

/// One row of the cached SERP file.
struct SerpRecord {
  std::string query;  // joined normalized terms
  std::vector<std::string> ranked_hosts;
};

/// E iff the top-ranked host is Wikipedia. Throws DataError on an empty list.
Label baseline_classify(const SerpRecord& serp);

/// `joined-terms \t host1,host2,...`
std::vector<SerpRecord> read_serp(std::istream& in, const std::string& source);
void write_serp(std::ostream& out, const std::vector<SerpRecord>& records);

struct BaselineReport {
  ConfusionMatrix matrix;
  Metrics metrics;
  std::size_t missing = 0;  // dataset queries without a SERP row
};

BaselineReport evaluate_baseline(const std::vector<SerpRecord>& serps,
                                 const std::vector<std::pair<std::string, Label>>& dataset);

// Reports. All numbers use fixed six-decimal formatting so reruns compare
// byte-for-byte.
void write_metrics_tsv(std::ostream& out, const EvalReport& report);
void print_report(std::ostream& out, const std::string& title, const EvalReport& report);
void write_ablation_tsv(std::ostream& out, const std::vector<AblationRow>& rows);
void print_ablation(std::ostream& out, const EvalReport& full, const std::vector<AblationRow>& rows);
void write_baseline_tsv(std::ostream& out, const BaselineReport& report);

}  // namespace enq::eval
