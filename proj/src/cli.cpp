#include "enq/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "enq/common.hpp"
#include "enq/eval.hpp"
#include "enq/features.hpp"
#include "enq/kb.hpp"
#include "enq/labeler.hpp"
#include "enq/model.hpp"
#include "enq/parallel.hpp"
#include "enq/querylog.hpp"
#include "enq/synthgen.hpp"

namespace enq::cli {
namespace {

namespace fs = std::filesystem;

constexpr const char* kExitCodeHelp =
    "Exit codes:\n"
    "  0  success\n"
    "  1  internal error\n"
    "  2  usage error (unknown subcommand, missing or invalid flag)\n"
    "  3  I/O error (input missing, output not writable)\n"
    "  4  data error (malformed input, bad snapshot, degenerate training data)\n";

void require_file(const std::string& path, const std::string& what) {
  if (!fs::is_regular_file(path)) throw IoError(what + " not found: " + path);
}

void require_dir(const std::string& path, const std::string& what) {
  if (!fs::is_directory(path)) throw IoError(what + " directory not found: " + path);
}

void require_output(const std::string& path) {
  fs::path parent = fs::path(path).parent_path();
  if (!parent.empty() && !fs::is_directory(parent)) throw IoError("output directory does not exist: " + parent.string());
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path + ": cannot open");
  return in;
}

/// Writes `content` to `path`, replacing any previous file.
void write_output(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path + ": cannot write");
  out << content;
  out.flush();
  if (!out) throw IoError(path + ": write failed");
}

std::vector<model::Example> to_examples(const std::vector<features::FeatureRow>& rows) {
  std::vector<model::Example> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back({r.features, r.label});
  return out;
}

std::vector<model::Example> read_examples(const std::string& path) {
  auto in = open_in(path);
  return to_examples(features::read_features(in, path));
}

kb::KBSnapshot load_kb(const std::string& dir, const std::string& stopwords) {
  if (stopwords.empty()) return kb::load_snapshot(dir);
  return kb::load_snapshot(dir, querylog::NormalizationConfig::from_directory(stopwords));
}

/// Flags shared by every training subcommand.
struct TrainFlags {
  std::string algo = "forest";
  double penalty_c = 1.0;
  int trees = 20;
  int max_depth = 0;
  int max_epochs = 200;
  double tolerance = 1e-4;

  void attach(CLI::App* cmd) {
    cmd->add_option("--algo", algo, "linear|svm or forest|rf")->capture_default_str();
    cmd->add_option("--c", penalty_c, "SVM penalty C")->capture_default_str();
    cmd->add_option("--trees", trees, "number of trees")->capture_default_str();
    cmd->add_option("--max-depth", max_depth, "tree depth limit, 0 = unlimited")->capture_default_str();
    cmd->add_option("--max-epochs", max_epochs, "linear training epochs")->capture_default_str();
    cmd->add_option("--tolerance", tolerance, "relative objective improvement that stops training")
        ->capture_default_str();
  }

  model::TrainConfig config(std::uint64_t seed, unsigned workers) const {
    auto parsed = model::parse_algorithm(algo);
    if (!parsed) throw CLI::ValidationError("--algo", "expected linear, svm, forest or rf, got '" + algo + "'");
    model::TrainConfig c;
    c.algorithm = *parsed;
    c.penalty_c = penalty_c;
    c.n_trees = trees;
    if (max_depth > 0) c.max_depth = max_depth;
    c.max_epochs = max_epochs;
    c.tolerance = tolerance;
    c.seed = seed;
    c.workers = workers;
    c.validate();
    return c;
  }
};

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"enq: encyclopedic query intent classification from click-through logs", "enq"};
  app.footer(kExitCodeHelp);
  app.require_subcommand(1);
  app.set_config("--config", "", "optional key=value config file; command-line flags take precedence");
  unsigned workers = 0;
  std::uint64_t global_seed = 42;
  app.add_option("--workers", workers, "worker threads, 0 = number of processors")->capture_default_str();
  auto* global_seed_opt = app.add_option("--seed", global_seed, "default seed for seeded subcommands");

  // Subcommand seeds default to the global --seed unless given locally.
  auto seed_of = [&](CLI::Option* local, std::uint64_t value) {
    if (local->count() > 0) return value;
    if (global_seed_opt->count() > 0) return global_seed;
    return value;
  };

  // ingest
  auto* ingest = app.add_subcommand("ingest", "normalize a raw click log");
  std::string log_path, stopword_dir, ingest_out;
  ingest->add_option("--log", log_path, "raw TAB-separated click log")->required();
  ingest->add_option("--stopwords", stopword_dir, "directory of <lang>.txt stopword lists")->required();
  ingest->add_option("--out", ingest_out, "normalized records TSV")->required();

  // label
  auto* label_cmd = app.add_subcommand("label", "label queries by Wikipedia click ratio and build a balanced dataset");
  std::string label_in, label_out, unlabeled_out;
  labeler::LabelingConfig lcfg;
  label_cmd->add_option("--in", label_in, "normalized records from ingest")->required();
  label_cmd->add_option("--tau-e", lcfg.tau_e, "lowest ratio labeled E")->capture_default_str();
  label_cmd->add_option("--tau-ne", lcfg.tau_note, "highest ratio labeled N")->capture_default_str();
  label_cmd->add_option("--min-clicks", lcfg.min_wiki_clicks, "minimum Wikipedia clicks of a positive")
      ->capture_default_str();
  auto* label_seed = label_cmd->add_option("--seed", lcfg.seed, "negative sampling seed")->capture_default_str();
  label_cmd->add_option("--out", label_out, "dataset TSV")->required();
  label_cmd->add_option("--unlabeled", unlabeled_out, "side file of mid-ratio queries (default <out>.unlabeled.tsv)");

  // extract
  auto* extract_cmd = app.add_subcommand("extract", "compute feature vectors for a dataset");
  std::string dataset_path, snapshot_dir, extract_out, extract_stopwords;
  extract_cmd->add_option("--dataset", dataset_path, "dataset TSV from label")->required();
  extract_cmd->add_option("--snapshot", snapshot_dir, "KB snapshot directory")->required();
  extract_cmd->add_option("--out", extract_out, "feature TSV")->required();
  extract_cmd->add_option("--stopwords", extract_stopwords, "override the snapshot's stopword lists");

  // train
  auto* train_cmd = app.add_subcommand("train", "train a classifier on a feature file");
  std::string train_features, model_out;
  TrainFlags train_flags;
  std::uint64_t train_seed = 42;
  train_cmd->add_option("--features", train_features, "feature TSV from extract")->required();
  train_flags.attach(train_cmd);
  auto* train_seed_opt = train_cmd->add_option("--seed", train_seed, "training seed")->capture_default_str();
  train_cmd->add_option("--out", model_out, "model file")->required();

  // predict
  auto* predict_cmd = app.add_subcommand("predict", "classify a raw query with a trained model");
  std::string model_path, query_text, predict_snapshot, predict_stopwords;
  predict_cmd->add_option("--model", model_path, "model file from train")->required();
  predict_cmd->add_option("--query", query_text, "raw query text")->required();
  predict_cmd->add_option("--snapshot", predict_snapshot, "KB snapshot directory")->required();
  predict_cmd->add_option("--stopwords", predict_stopwords, "override the snapshot's stopword lists");
  bool show_features = false;
  predict_cmd->add_flag("--show-features", show_features, "also print the extracted features");

  // evaluate
  auto* eval_cmd = app.add_subcommand("evaluate", "k-fold cross-validation");
  std::string eval_features, eval_report;
  TrainFlags eval_flags;
  std::size_t eval_folds = 10;
  std::uint64_t eval_seed = 42;
  eval_cmd->add_option("--features", eval_features, "feature TSV")->required();
  eval_flags.attach(eval_cmd);
  eval_cmd->add_option("--folds", eval_folds, "number of folds")->capture_default_str();
  auto* eval_seed_opt = eval_cmd->add_option("--seed", eval_seed, "fold and training seed")->capture_default_str();
  eval_cmd->add_option("--report", eval_report, "metric TSV output");

  // ablate
  auto* ablate_cmd = app.add_subcommand("ablate", "feature-group ablation under cross-validation");
  std::string ablate_features, ablate_out;
  TrainFlags ablate_flags;
  std::size_t ablate_folds = 10;
  std::uint64_t ablate_seed = 42;
  std::vector<std::string> ablate_groups;
  ablate_cmd->add_option("--features", ablate_features, "feature TSV")->required();
  ablate_flags.attach(ablate_cmd);
  ablate_cmd->add_option("--folds", ablate_folds, "number of folds")->capture_default_str();
  auto* ablate_seed_opt = ablate_cmd->add_option("--seed", ablate_seed, "fold and training seed")->capture_default_str();
  ablate_cmd->add_option("--group", ablate_groups, "group(s) to remove (default: all eight)");
  ablate_cmd->add_option("--out", ablate_out, "ablation TSV output");

  // baseline
  auto* baseline_cmd = app.add_subcommand("baseline", "rank-1 Wikipedia baseline over cached SERPs");
  std::string serp_path, baseline_dataset, baseline_report;
  baseline_cmd->add_option("--serp", serp_path, "SERP cache TSV")->required();
  baseline_cmd->add_option("--dataset", baseline_dataset, "dataset TSV")->required();
  baseline_cmd->add_option("--report", baseline_report, "metric TSV output");

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "generate synthetic log and snapshot fixtures");
  synthgen::SynthConfig scfg;
  std::string synth_out;
  auto* synth_seed = synth_cmd->add_option("--seed", scfg.seed, "generator seed")->capture_default_str();
  synth_cmd->add_option("--enc", scfg.n_encyclopedic, "encyclopedic queries")->capture_default_str();
  synth_cmd->add_option("--other", scfg.n_other, "non-encyclopedic queries")->capture_default_str();
  synth_cmd->add_option("--mixed", scfg.n_mixed, "mixed-ratio queries")->capture_default_str();
  synth_cmd->add_option("--vocab", scfg.kb_vocab_size, "KB vocabulary size")->capture_default_str();
  synth_cmd->add_option("--out", synth_out, "output directory")->required();

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  } catch (const CLI::CallForVersion& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "enq: " << e.what() << "\n";
    err << "Run 'enq --help' for usage.\n";
    return kUsage;
  }

  try {
    if (ingest->parsed()) {
      require_file(log_path, "log");
      require_dir(stopword_dir, "stopword");
      require_output(ingest_out);
      auto config = querylog::NormalizationConfig::from_directory(stopword_dir);
      auto in = open_in(log_path);
      auto parsed = querylog::parse_log(in);
      auto records = querylog::normalize_records(parsed.records, config);
      std::ostringstream buf;
      querylog::write_normalized(buf, records);
      write_output(ingest_out, buf.str());
      out << "ingested " << parsed.records.size() << " records: " << records.size() << " kept, "
          << parsed.records.size() - records.size() << " empty after normalization, " << parsed.malformed
          << " malformed lines skipped\n";
    } else if (label_cmd->parsed()) {
      require_file(label_in, "normalized log");
      require_output(label_out);
      if (unlabeled_out.empty()) unlabeled_out = label_out + ".unlabeled.tsv";
      require_output(unlabeled_out);
      lcfg.seed = seed_of(label_seed, lcfg.seed);
      lcfg.validate();
      auto in = open_in(label_in);
      auto profiles = labeler::aggregate(querylog::read_normalized(in, label_in));
      auto dataset = labeler::build_dataset(profiles, lcfg);
      std::ostringstream data_buf, side_buf;
      labeler::write_dataset(data_buf, dataset.examples);
      labeler::write_unlabeled(side_buf, dataset.unlabeled);
      write_output(label_out, data_buf.str());
      write_output(unlabeled_out, side_buf.str());
      out << profiles.size() << " distinct queries; " << dataset.positive_pool << " eligible positives, "
          << dataset.negative_pool << " eligible negatives, " << dataset.unlabeled.size() << " unlabeled; wrote "
          << dataset.examples.size() << " examples\n";
    } else if (extract_cmd->parsed()) {
      require_file(dataset_path, "dataset");
      require_dir(snapshot_dir, "snapshot");
      if (!extract_stopwords.empty()) require_dir(extract_stopwords, "stopword");
      require_output(extract_out);
      auto in = open_in(dataset_path);
      auto dataset = labeler::read_dataset(in, dataset_path);
      auto snapshot = load_kb(snapshot_dir, extract_stopwords);
      std::vector<features::FeatureRow> rows(dataset.size());
      parallel_for(dataset.size(), workers, [&](std::size_t i) {
        rows[i] = {dataset[i].label, dataset[i].query.joined(), features::extract(dataset[i].query, snapshot)};
      });
      std::ostringstream buf;
      features::write_features(buf, rows);
      write_output(extract_out, buf.str());
      out << "extracted features for " << rows.size() << " queries\n";
    } else if (train_cmd->parsed()) {
      require_file(train_features, "feature file");
      require_output(model_out);
      auto config = train_flags.config(seed_of(train_seed_opt, train_seed), workers);
      auto examples = read_examples(train_features);
      auto trained = model::fit(examples, config);
      std::ostringstream buf;
      model::save_model(buf, trained);
      write_output(model_out, buf.str());
      out << "trained " << model::to_string(config.algorithm) << " model on " << examples.size() << " examples\n";
    } else if (predict_cmd->parsed()) {
      require_file(model_path, "model");
      require_dir(predict_snapshot, "snapshot");
      if (!predict_stopwords.empty()) require_dir(predict_stopwords, "stopword");
      auto in = open_in(model_path);
      auto trained = model::load_model(in, model_path);
      auto snapshot = load_kb(predict_snapshot, predict_stopwords);
      auto query = querylog::normalize(query_text, snapshot.normalization);
      if (query.empty()) throw DataError("query is empty after normalization");
      auto vec = features::extract(query, snapshot);
      out << label_code(model::predict(trained, vec)) << '\n';
      if (show_features) {
        for (const auto& f : vec) out << f << '\n';
      }
    } else if (eval_cmd->parsed()) {
      require_file(eval_features, "feature file");
      if (!eval_report.empty()) require_output(eval_report);
      std::uint64_t seed = seed_of(eval_seed_opt, eval_seed);
      eval::CvConfig cv{eval_flags.config(seed, workers), eval_folds, seed, workers};
      auto examples = read_examples(eval_features);
      auto report = eval::cross_validate(examples, cv);
      eval::print_report(out, std::string(model::to_string(cv.train.algorithm)), report);
      if (!eval_report.empty()) {
        std::ostringstream buf;
        eval::write_metrics_tsv(buf, report);
        write_output(eval_report, buf.str());
      }
    } else if (ablate_cmd->parsed()) {
      require_file(ablate_features, "feature file");
      if (!ablate_out.empty()) require_output(ablate_out);
      std::vector<features::FeatureGroupId> groups;
      for (const auto& g : ablate_groups) {
        auto id = features::parse_group(g);
        if (!id) throw CLI::ValidationError("--group", "unknown feature group '" + g + "'");
        groups.push_back(*id);
      }
      if (groups.empty()) groups.assign(features::kAllGroups.begin(), features::kAllGroups.end());
      std::uint64_t seed = seed_of(ablate_seed_opt, ablate_seed);
      eval::CvConfig cv{ablate_flags.config(seed, workers), ablate_folds, seed, workers};
      auto examples = read_examples(ablate_features);
      auto full = eval::cross_validate(examples, cv);
      std::vector<eval::AblationRow> rows;
      for (auto g : groups) rows.push_back(eval::ablate(examples, g, cv, full));
      eval::print_ablation(out, full, rows);
      if (!ablate_out.empty()) {
        std::ostringstream buf;
        eval::write_ablation_tsv(buf, rows);
        write_output(ablate_out, buf.str());
      }
    } else if (baseline_cmd->parsed()) {
      require_file(serp_path, "SERP cache");
      require_file(baseline_dataset, "dataset");
      if (!baseline_report.empty()) require_output(baseline_report);
      auto serp_in = open_in(serp_path);
      auto serps = eval::read_serp(serp_in, serp_path);
      auto data_in = open_in(baseline_dataset);
      std::vector<std::pair<std::string, Label>> truth;
      for (const auto& ex : labeler::read_dataset(data_in, baseline_dataset)) truth.emplace_back(ex.query.joined(), ex.label);
      auto report = eval::evaluate_baseline(serps, truth);
      char line[200];
      std::snprintf(line, sizeof line, "BASE  accuracy %.2f%%  precision %.2f%%  recall %.2f%%  f1 %.2f%%\n",
                    100 * report.metrics.accuracy, 100 * report.metrics.precision, 100 * report.metrics.recall,
                    100 * report.metrics.f1);
      out << line;
      if (report.missing > 0) out << report.missing << " dataset queries had no cached SERP and were skipped\n";
      if (!baseline_report.empty()) {
        std::ostringstream buf;
        eval::write_baseline_tsv(buf, report);
        write_output(baseline_report, buf.str());
      }
    } else if (synth_cmd->parsed()) {
      scfg.seed = seed_of(synth_seed, scfg.seed);
      auto manifest = synthgen::generate(scfg, synth_out);
      out << "wrote " << manifest.files.size() << " files under " << manifest.root.string() << '\n';
    }
  } catch (const CLI::ValidationError& e) {
    err << "enq: " << e.what() << '\n';
    return kUsage;
  } catch (const IoError& e) {
    err << "enq: " << e.what() << '\n';
    return kIo;
  } catch (const DataError& e) {
    err << "enq: " << e.what() << '\n';
    return kData;
  } catch (const std::exception& e) {
    err << "enq: internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kOk;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"enq"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace enq::cli
