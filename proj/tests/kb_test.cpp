#include "enq/kb.hpp"

#include <gtest/gtest.h>

#include <random>

#include "test_util.hpp"

namespace enq::kb {
namespace {

using enq::testing::TempDir;

querylog::NormalizedQuery q(std::vector<std::string> terms) { return {std::move(terms), false, ""}; }

class SnapshotTest : public ::testing::Test {
 protected:
  void SetUp() override {
    enq::testing::write_fixture_snapshot(dir.path());
    snap = load_snapshot(dir.path());
  }
  TempDir dir{"kb"};
  KBSnapshot snap;
};

TEST_F(SnapshotTest, NineTitleLists) {
  ASSERT_EQ(snap.title_lists.size(), 9u);
  for (PageType t : kPageTypes)
    for (Language l : kLanguages) {
      const TitleList* list = snap.titles(t, l);
      ASSERT_NE(list, nullptr);
      EXPECT_EQ(list->page_type, t);
      EXPECT_EQ(list->language, l);
      EXPECT_GT(list->titles.size(), 0u);
    }
}

TEST_F(SnapshotTest, TitleKeysAreNormalized) {
  const TitleList* en = snap.titles(PageType::Article, Language::En);
  auto id = en->titles.find({"viking", "age"});
  ASSERT_TRUE(id.has_value());
  EXPECT_EQ(en->titles.entry(*id).original, "Viking Age");
  const TitleList* pt = snap.titles(PageType::Article, Language::Pt);
  EXPECT_TRUE(pt->titles.find({"palacio", "medicis"}).has_value());
}

TEST_F(SnapshotTest, StopwordsComeFromManifest) {
  EXPECT_TRUE(snap.normalization.stopwords.contains("the"));
  EXPECT_TRUE(snap.normalization.stopwords.contains("dos"));
}

TEST_F(SnapshotTest, SideResources) {
  EXPECT_EQ(snap.ontology.entries.at("edith piaf"), (std::set<std::string>{"Artist", "Person"}));
  EXPECT_EQ(snap.lexicon.entries.at("medico"), (std::set<std::string>{"job", "science"}));
  EXPECT_TRUE(snap.gazetteer.place_terms.contains("united kingdom"));
  EXPECT_TRUE(snap.gazetteer.months.at(Language::Pt).contains("marco"));
  EXPECT_EQ(snap.gazetteer.latin_suffixes.size(), 6u);
}

TEST_F(SnapshotTest, TaoismChain) {
  EXPECT_EQ(expand_categories(snap.graph, "taoism", 4),
            (std::set<std::string>{"chinese_philosophy", "philosophy", "humanities", "knowledge"}));
  EXPECT_EQ(expand_categories(snap.graph, "taoism", 1), (std::set<std::string>{"chinese_philosophy"}));
  // The main topics -> philosophy back edge closes a cycle one level further up.
  EXPECT_EQ(expand_categories(snap.graph, "taoism", 9).size(), 5u);
}

TEST_F(SnapshotTest, UnknownTitleExpandsToNothing) {
  EXPECT_TRUE(expand_categories(snap.graph, "viking age", 4).empty());
  EXPECT_THROW(expand_categories(snap.graph, "taoism", 0), std::invalid_argument);
}

TEST_F(SnapshotTest, EntitySearch) {
  auto m = entity_search(snap.entities, q({"depeche", "mode", "band"}));
  ASSERT_TRUE(m.has_value());
  EXPECT_EQ(m->name, "depeche mode");
  EXPECT_EQ(m->top_category, "/music/");
  EXPECT_NEAR(m->score, 0.8, 1e-12);
  EXPECT_FALSE(entity_search(snap.entities, q({"qqqq"})).has_value());
}

TEST_F(SnapshotTest, LoadingIsDeterministic) {
  KBSnapshot again = load_snapshot(dir.path());
  for (std::size_t i = 0; i < snap.title_lists.size(); ++i) {
    const auto& a = snap.title_lists[i].titles.entries();
    const auto& b = again.title_lists[i].titles.entries();
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t j = 0; j < a.size(); ++j) EXPECT_EQ(a[j].key, b[j].key);
  }
  EXPECT_EQ(snap.graph.nodes, again.graph.nodes);
}

TEST(EntitySearch, TieGoesToLexicographicallySmallerName) {
  EntityIndex index;
  index.add({"beta", "x"}, "Beta X", "/b/");
  index.add({"alpha", "x"}, "Alpha X", "/a/");
  auto m = entity_search(index, q({"x"}));
  ASSERT_TRUE(m.has_value());
  EXPECT_EQ(m->name, "alpha x");
  EXPECT_EQ(m->top_category, "/a/");
}

TEST(EntitySearch, ScoreInUnitInterval) {
  EntityIndex index;
  index.add({"a", "b"}, "A B", "/x/");
  index.add({"c"}, "C", "/y/");
  index.add({"a", "c", "d"}, "A C D", "/z/");
  std::mt19937 rng(1);
  const std::vector<std::string> vocab{"a", "b", "c", "d", "e"};
  std::uniform_int_distribution<int> len(1, 4), pick(0, 4);
  for (int i = 0; i < 200; ++i) {
    std::vector<std::string> t;
    for (int k = len(rng); k > 0; --k) t.push_back(vocab[static_cast<std::size_t>(pick(rng))]);
    auto m = entity_search(index, q(t));
    if (!m) continue;
    EXPECT_GT(m->score, 0.0);
    EXPECT_LE(m->score, 1.0);
  }
}

TEST(LoadSnapshot, MissingEntityFile) {
  TempDir dir("kb");
  enq::testing::write_fixture_snapshot(dir.path());
  std::filesystem::remove(dir / "entities.tsv");
  try {
    load_snapshot(dir.path());
    FAIL() << "expected LoadError";
  } catch (const LoadError& e) {
    EXPECT_NE(std::string(e.what()).find("entities: not found"), std::string::npos) << e.what();
  }
}

TEST(LoadSnapshot, MissingManifestEntry) {
  TempDir dir("kb");
  enq::testing::write_fixture_snapshot(dir.path(), "titles.category.es");
  try {
    load_snapshot(dir.path());
    FAIL() << "expected LoadError";
  } catch (const LoadError& e) {
    EXPECT_NE(std::string(e.what()).find("titles.category.es"), std::string::npos) << e.what();
  }
}

TEST(LoadSnapshot, MissingDirectory) {
  EXPECT_THROW(load_snapshot("/nonexistent/enq-snapshot"), LoadError);
}

TEST(LoadSnapshot, MalformedEntityRow) {
  TempDir dir("kb");
  enq::testing::write_fixture_snapshot(dir.path());
  enq::testing::write_text(dir / "entities.tsv", "Depeche Mode\tmusic\n");
  EXPECT_THROW(load_snapshot(dir.path()), LoadError);
}

TEST(CategoryId, FoldsAndJoins) {
  EXPECT_EQ(category_id("chinese-philosophy"), "chinese_philosophy");
  EXPECT_EQ(category_id("Main Topics"), "main_topics");
  EXPECT_EQ(category_id("Filosofía"), "filosofia");
}

// Random graphs against exhaustive path enumeration.
TEST(ExpandCategories, MatchesBoundedPathOracle) {
  std::mt19937 rng(2024);
  for (int g = 0; g < 30; ++g) {
    std::uniform_int_distribution<int> size(2, 60);
    int n = size(rng);
    std::uniform_int_distribution<int> node(0, n - 1);
    CategoryGraph graph;
    std::map<std::string, std::set<std::string>> parents;
    int edges = n * 2;
    for (int e = 0; e < edges; ++e) {
      std::string a = "c" + std::to_string(node(rng)), b = "c" + std::to_string(node(rng));
      graph.add_parent(a, b);
      parents[a].insert(b);
    }
    std::set<std::string> start;
    for (int k = 0; k < 3; ++k) {
      std::string c = "c" + std::to_string(node(rng));
      graph.add_article_category("art", c);
      start.insert(c);
    }
    for (int depth = 1; depth <= 4; ++depth)
      EXPECT_EQ(expand_categories(graph, "art", depth), enq::testing::oracle_bounded_paths(parents, start, depth))
          << "graph " << g << " depth " << depth;
  }
}

TEST(ExpandCategories, MonotoneInDepth) {
  TempDir dir("kb");
  enq::testing::write_fixture_snapshot(dir.path());
  auto snap = load_snapshot(dir.path());
  for (const char* title : {"taoism", "edith piaf"}) {
    auto prev = expand_categories(snap.graph, title, 1);
    for (int d = 2; d <= 6; ++d) {
      auto cur = expand_categories(snap.graph, title, d);
      EXPECT_TRUE(std::includes(cur.begin(), cur.end(), prev.begin(), prev.end()));
      prev = cur;
    }
  }
}

}  // namespace
}  // namespace enq::kb
