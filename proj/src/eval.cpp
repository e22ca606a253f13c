#include "enq/eval.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <unordered_map>

#include "enq/parallel.hpp"
#include "enq/querylog.hpp"
#include "enq/rng.hpp"

namespace enq::eval {

void ConfusionMatrix::add(Label truth, Label predicted) {
  if (truth == Label::E)
    ++(predicted == Label::E ? tp : fn);
  else
    ++(predicted == Label::E ? fp : tn);
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& o) {
  tp += o.tp;
  fp += o.fp;
  tn += o.tn;
  fn += o.fn;
  return *this;
}

Metrics metrics(const ConfusionMatrix& m) {
  if (m.total() == 0) throw DataError("metrics of an empty confusion matrix");
  auto ratio = [](std::uint64_t num, std::uint64_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
  };
  Metrics out;
  out.accuracy = ratio(m.tp + m.tn, m.total());
  out.precision = ratio(m.tp, m.tp + m.fp);
  out.recall = ratio(m.tp, m.tp + m.fn);
  double pr = out.precision + out.recall;
  out.f1 = pr > 0.0 ? 2.0 * out.precision * out.recall / pr : 0.0;
  return out;
}

std::vector<Fold> kfold(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw DataError("k-fold needs k >= 2");
  if (n < k) throw DataError("dataset of " + std::to_string(n) + " examples is smaller than k=" + std::to_string(k));
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);

  std::vector<Fold> folds(k);
  std::size_t base = n / k, extra = n % k, start = 0;
  for (std::size_t f = 0; f < k; ++f) {
    std::size_t size = base + (f < extra ? 1 : 0);
    folds[f].test.assign(order.begin() + static_cast<std::ptrdiff_t>(start),
                         order.begin() + static_cast<std::ptrdiff_t>(start + size));
    folds[f].train.reserve(n - size);
    folds[f].train.insert(folds[f].train.end(), order.begin(), order.begin() + static_cast<std::ptrdiff_t>(start));
    folds[f].train.insert(folds[f].train.end(), order.begin() + static_cast<std::ptrdiff_t>(start + size), order.end());
    start += size;
  }
  return folds;
}

EvalReport cross_validate(std::span<const model::Example> data, const CvConfig& config) {
  auto folds = kfold(data.size(), config.folds, config.seed);
  EvalReport report;
  report.folds.resize(folds.size());
  model::TrainConfig train_config = config.train;
  // Fold-level parallelism replaces tree-level parallelism.
  if (resolve_workers(config.workers) > 1) train_config.workers = 1;

  parallel_for(folds.size(), config.workers, [&](std::size_t f) {
    std::vector<model::Example> train;
    train.reserve(folds[f].train.size());
    for (std::size_t i : folds[f].train) train.push_back(data[i]);
    auto trained = model::fit(train, train_config);
    ConfusionMatrix m;
    for (std::size_t i : folds[f].test) m.add(data[i].label, model::predict(trained, data[i].features));
    report.folds[f] = m;
  });

  ConfusionMatrix pooled;
  for (const auto& m : report.folds) {
    Metrics fm = metrics(m);
    report.mean.accuracy += fm.accuracy;
    report.mean.precision += fm.precision;
    report.mean.recall += fm.recall;
    report.mean.f1 += fm.f1;
    pooled += m;
  }
  const auto k = static_cast<double>(report.folds.size());
  report.mean.accuracy /= k;
  report.mean.precision /= k;
  report.mean.recall /= k;
  report.mean.f1 /= k;
  report.pooled = metrics(pooled);
  return report;
}

std::size_t affected_queries(std::span<const model::Example> data, features::FeatureGroupId group) {
  std::size_t count = 0;
  for (const auto& ex : data) {
    for (const auto& f : ex.features) {
      if (features::group_of(f) == group) {
        ++count;
        break;
      }
    }
  }
  return count;
}

AblationRow ablate(std::span<const model::Example> data, features::FeatureGroupId group, const CvConfig& config,
                   const EvalReport& full) {
  std::vector<model::Example> stripped;
  stripped.reserve(data.size());
  for (const auto& ex : data) stripped.push_back({features::strip_group(ex.features, group), ex.label});

  AblationRow row;
  row.removed_group = group;
  row.affected_queries = affected_queries(data, group);
  row.ablated = cross_validate(stripped, config).mean;
  row.deltas.accuracy = row.ablated.accuracy - full.mean.accuracy;
  row.deltas.precision = row.ablated.precision - full.mean.precision;
  row.deltas.recall = row.ablated.recall - full.mean.recall;
  row.deltas.f1 = row.ablated.f1 - full.mean.f1;
  return row;
}

Label baseline_classify(const SerpRecord& serp) {
  if (serp.ranked_hosts.empty()) throw DataError("SERP for '" + serp.query + "' has no results");
  return querylog::is_wikipedia_host(serp.ranked_hosts.front()) ? Label::E : Label::NotE;
}

std::vector<SerpRecord> read_serp(std::istream& in, const std::string& source) {
  std::vector<SerpRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view = chomp(line);
    if (view.empty()) continue;
    auto where = source + ":" + std::to_string(lineno) + ": ";
    auto fields = split(view, '\t');
    if (fields.size() != 2) throw DataError(where + "expected 2 TAB-separated fields");
    SerpRecord rec;
    rec.query = join(split_whitespace(fields[0]), " ");
    for (const auto& h : split(fields[1], ',')) {
      auto host = std::string(trim(h));
      if (host.empty()) throw DataError(where + "empty hostname in ranking");
      rec.ranked_hosts.push_back(std::move(host));
    }
    if (rec.query.empty()) throw DataError(where + "empty query");
    out.push_back(std::move(rec));
  }
  return out;
}

void write_serp(std::ostream& out, const std::vector<SerpRecord>& records) {
  for (const auto& r : records) out << r.query << '\t' << join(r.ranked_hosts, ",") << '\n';
}

BaselineReport evaluate_baseline(const std::vector<SerpRecord>& serps,
                                 const std::vector<std::pair<std::string, Label>>& dataset) {
  std::unordered_map<std::string, const SerpRecord*> by_query;
  for (const auto& s : serps) by_query.emplace(s.query, &s);
  BaselineReport report;
  for (const auto& [query, truth] : dataset) {
    auto it = by_query.find(query);
    if (it == by_query.end()) {
      ++report.missing;
      continue;
    }
    report.matrix.add(truth, baseline_classify(*it->second));
  }
  report.metrics = metrics(report.matrix);
  return report;
}

namespace {

std::string fixed(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}

std::string percent(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%7.2f%%", 100.0 * x);
  return buf;
}

std::string signed_percent(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%+7.2f%%", 100.0 * x);
  return buf;
}

void write_metric_lines(std::ostream& out, const std::string& prefix, const Metrics& m) {
  out << prefix << "accuracy\t" << fixed(m.accuracy) << '\n';
  out << prefix << "precision\t" << fixed(m.precision) << '\n';
  out << prefix << "recall\t" << fixed(m.recall) << '\n';
  out << prefix << "f1\t" << fixed(m.f1) << '\n';
}

}  // namespace

void write_metrics_tsv(std::ostream& out, const EvalReport& report) {
  write_metric_lines(out, "", report.mean);
  write_metric_lines(out, "pooled_", report.pooled);
  for (std::size_t f = 0; f < report.folds.size(); ++f) {
    const auto& m = report.folds[f];
    out << "fold" << f << "_tp_fp_tn_fn\t" << m.tp << ',' << m.fp << ',' << m.tn << ',' << m.fn << '\n';
  }
}

void print_report(std::ostream& out, const std::string& title, const EvalReport& report) {
  out << title << " (" << report.folds.size() << "-fold cross-validation)\n";
  out << "             Accuracy  Precision    Recall        F1\n";
  auto row = [&](const char* name, const Metrics& m) {
    out << name << "  " << percent(m.accuracy) << "   " << percent(m.precision) << "  " << percent(m.recall) << "  "
        << percent(m.f1) << '\n';
  };
  row("fold mean  ", report.mean);
  row("pooled     ", report.pooled);
}

void write_ablation_tsv(std::ostream& out, const std::vector<AblationRow>& rows) {
  out << "group\taffected_queries\tdelta_accuracy\tdelta_precision\tdelta_recall\tdelta_f1\n";
  for (const auto& r : rows) {
    out << features::to_string(r.removed_group) << '\t' << r.affected_queries << '\t' << fixed(r.deltas.accuracy) << '\t'
        << fixed(r.deltas.precision) << '\t' << fixed(r.deltas.recall) << '\t' << fixed(r.deltas.f1) << '\n';
  }
}

void print_ablation(std::ostream& out, const EvalReport& full, const std::vector<AblationRow>& rows) {
  out << "Feature group ablation (differences against all features)\n";
  out << "group             affected   Accuracy  Precision     Recall         F1\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%-16s %9zu  ", std::string(features::to_string(r.removed_group)).c_str(),
                  r.affected_queries);
    out << buf << signed_percent(r.deltas.accuracy) << "   " << signed_percent(r.deltas.precision) << "   "
        << signed_percent(r.deltas.recall) << "   " << signed_percent(r.deltas.f1) << '\n';
  }
  out << "all features               " << percent(full.mean.accuracy) << "   " << percent(full.mean.precision) << "   "
      << percent(full.mean.recall) << "   " << percent(full.mean.f1) << '\n';
}

void write_baseline_tsv(std::ostream& out, const BaselineReport& report) {
  write_metric_lines(out, "", report.metrics);
  const auto& m = report.matrix;
  out << "tp_fp_tn_fn\t" << m.tp << ',' << m.fp << ',' << m.tn << ',' << m.fn << '\n';
  out << "missing\t" << report.missing << '\n';
}

}  // namespace enq::eval
