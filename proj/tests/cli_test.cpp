#include "enq/cli.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "test_util.hpp"

namespace enq::cli {
namespace {

using enq::testing::TempDir;

struct Result {
  int code;
  std::string out, err;
};

Result invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

TEST(Cli, HelpExitsZero) {
  auto r = invoke({"--help"});
  EXPECT_EQ(r.code, kOk);
  EXPECT_NE(r.out.find("Usage"), std::string::npos);
}

TEST(Cli, UnknownSubcommandIsUsageError) {
  auto r = invoke({"bogus"});
  EXPECT_EQ(r.code, kUsage);
  EXPECT_FALSE(r.err.empty());
  EXPECT_EQ(invoke({}).code, kUsage);
}

TEST(Cli, MissingRequiredFlag) {
  EXPECT_EQ(invoke({"ingest", "--log", "x.tsv"}).code, kUsage);
}

TEST(Cli, BadAlgorithmIsUsageError) {
  TempDir dir("cli");
  enq::testing::write_text(dir / "f.tsv", "E\ta\ttp:len-1\n");
  EXPECT_EQ(invoke({"train", "--features", (dir / "f.tsv").string(), "--algo", "knn", "--out",
                    (dir / "m").string()})
                .code,
            kUsage);
}

TEST(Cli, MissingInputIsIoError) {
  TempDir dir("cli");
  auto r = invoke({"ingest", "--log", (dir / "absent.tsv").string(), "--stopwords",
                   (enq::testing::data_dir() / "stopwords").string(), "--out", (dir / "n.tsv").string()});
  EXPECT_EQ(r.code, kIo);
  EXPECT_NE(r.err.find("absent.tsv"), std::string::npos);
}

TEST(Cli, DegenerateTrainingIsDataError) {
  TempDir dir("cli");
  enq::testing::write_text(dir / "f.tsv", "E\ta\ttp:len-1\nE\tb\ttp:len-1\n");
  EXPECT_EQ(invoke({"train", "--features", (dir / "f.tsv").string(), "--out", (dir / "m").string()}).code, kData);
}

TEST(Cli, FullPipeline) {
  TempDir dir("cli");
  auto p = [&](const std::string& name) { return (dir / name).string(); };
  ASSERT_EQ(invoke({"synth", "--out", p("s"), "--enc", "40", "--other", "40", "--mixed", "10"}).code, kOk);
  ASSERT_EQ(invoke({"ingest", "--log", p("s/log.tsv"), "--stopwords", p("s/stopwords"), "--out", p("norm.tsv")}).code,
            kOk);
  ASSERT_EQ(invoke({"label", "--in", p("norm.tsv"), "--out", p("ds.tsv")}).code, kOk);
  EXPECT_TRUE(std::filesystem::exists(p("ds.tsv.unlabeled.tsv")));
  ASSERT_EQ(invoke({"extract", "--dataset", p("ds.tsv"), "--snapshot", p("s/snapshot"), "--out", p("f.tsv")}).code,
            kOk);
  ASSERT_EQ(invoke({"train", "--features", p("f.tsv"), "--algo", "linear", "--out", p("m.txt")}).code, kOk);
  ASSERT_EQ(invoke({"evaluate", "--features", p("f.tsv"), "--algo", "rf", "--report", p("eval.tsv")}).code, kOk);
  ASSERT_EQ(invoke({"ablate", "--features", p("f.tsv"), "--group", "wiki-graph", "--group", "term-patterns", "--out",
                    p("abl.tsv")})
                .code,
            kOk);
  ASSERT_EQ(invoke({"baseline", "--serp", p("s/serp.tsv"), "--dataset", p("ds.tsv"), "--report", p("bl.tsv")}).code,
            kOk);
  for (const char* f : {"eval.tsv", "abl.tsv", "bl.tsv", "m.txt"}) EXPECT_TRUE(std::filesystem::exists(p(f))) << f;
  auto abl = enq::testing::read_text(p("abl.tsv"));
  EXPECT_NE(abl.find("wiki-graph"), std::string::npos);
  EXPECT_EQ(abl.find("ontology"), std::string::npos);

  // A positive from the dataset is classified back as E.
  std::string first_e;
  std::istringstream ds(enq::testing::read_text(p("ds.tsv")));
  std::string line;
  while (std::getline(ds, line))
    if (line.starts_with("E\t")) {
      first_e = line.substr(2, line.find('\t', 2) - 2);
      break;
    }
  ASSERT_FALSE(first_e.empty());
  auto r = invoke({"predict", "--model", p("m.txt"), "--snapshot", p("s/snapshot"), "--query", first_e});
  EXPECT_EQ(r.code, kOk);
  EXPECT_EQ(r.out, "E\n");
}

TEST(Cli, ConfigFileSuppliesFlags) {
  TempDir dir("cli");
  enq::testing::write_text(dir / "run.ini", "[synth]\nenc=12\nother=12\nmixed=0\n");
  ASSERT_EQ(invoke({"--config", (dir / "run.ini").string(), "synth", "--out", (dir / "s").string()}).code, kOk);
  auto serp = enq::testing::read_text(dir / "s" / "serp.tsv");
  EXPECT_EQ(std::count(serp.begin(), serp.end(), '\n'), 24);
}

TEST(Cli, RerunOverwritesIdentically) {
  TempDir dir("cli");
  auto p = [&](const std::string& name) { return (dir / name).string(); };
  ASSERT_EQ(invoke({"synth", "--out", p("s"), "--enc", "20", "--other", "20"}).code, kOk);
  ASSERT_EQ(invoke({"ingest", "--log", p("s/log.tsv"), "--stopwords", p("s/stopwords"), "--out", p("n.tsv")}).code,
            kOk);
  ASSERT_EQ(invoke({"label", "--in", p("n.tsv"), "--out", p("a.tsv")}).code, kOk);
  auto first = enq::testing::read_text(p("a.tsv"));
  ASSERT_EQ(invoke({"label", "--in", p("n.tsv"), "--out", p("a.tsv")}).code, kOk);
  EXPECT_EQ(first, enq::testing::read_text(p("a.tsv")));
  ASSERT_EQ(invoke({"--seed", "5", "label", "--in", p("n.tsv"), "--out", p("b.tsv")}).code, kOk);
  EXPECT_NE(first, enq::testing::read_text(p("b.tsv")));
}

}  // namespace
}  // namespace enq::cli
