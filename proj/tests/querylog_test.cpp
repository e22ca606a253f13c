#include "enq/querylog.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "enq/common.hpp"
#include "test_util.hpp"

namespace enq::querylog {
namespace {

NormalizedQuery q(std::vector<std::string> terms) { return NormalizedQuery{std::move(terms), false, ""}; }

class QueryLogTest : public ::testing::Test {
 protected:
  NormalizationConfig config = testing::default_normalization();
};

TEST(ParseLog, ReadsTriTuple) {
  std::istringstream in("academy awards 2011\toscars.org\t4\n");
  auto result = parse_log(in);
  ASSERT_EQ(result.records.size(), 1u);
  EXPECT_EQ(result.records[0].query, "academy awards 2011");
  EXPECT_EQ(result.records[0].hostname, "oscars.org");
  EXPECT_EQ(result.records[0].count, 4u);
  EXPECT_EQ(result.malformed, 0u);
}

TEST(ParseLog, EmptyInput) {
  std::istringstream in("");
  auto result = parse_log(in);
  EXPECT_TRUE(result.records.empty());
  EXPECT_EQ(result.malformed, 0u);
}

TEST(ParseLog, MalformedLinesAreTallied) {
  std::istringstream in(
      "a\tb\tnotanumber\n"
      "only two\tfields\n"
      "zero\thost.com\t0\n"
      "neg\thost.com\t-3\n"
      "\thost.com\t2\n"
      "four\tfields\t1\textra\n"
      "ok query\tHost.COM\t7\r\n"
      "\n");
  auto result = parse_log(in);
  EXPECT_EQ(result.malformed, 6u);
  ASSERT_EQ(result.records.size(), 1u);
  EXPECT_EQ(result.records[0].hostname, "host.com");
  EXPECT_EQ(result.records[0].count, 7u);
}

TEST(ParseLog, KeepsInputOrder) {
  std::istringstream in("b\th1\t1\na\th2\t2\nc\th3\t3\n");
  auto result = parse_log(in);
  ASSERT_EQ(result.records.size(), 3u);
  EXPECT_EQ(result.records[0].query, "b");
  EXPECT_EQ(result.records[1].query, "a");
  EXPECT_EQ(result.records[2].query, "c");
}

TEST_F(QueryLogTest, StripsAccentsAndPlusSign) {
  auto n = normalize("vuelta+españa", config);
  EXPECT_EQ(n.terms, (std::vector<std::string>{"vuelta", "espana"}));
  EXPECT_FALSE(n.has_question_mark);
}

TEST_F(QueryLogTest, QuestionMarkBecomesFlag) {
  auto n = normalize("protoestrela?", config);
  EXPECT_EQ(n.terms, (std::vector<std::string>{"protoestrela"}));
  EXPECT_TRUE(n.has_question_mark);
}

TEST_F(QueryLogTest, EmptyQuery) {
  auto n = normalize("", config);
  EXPECT_TRUE(n.terms.empty());
  EXPECT_FALSE(n.has_question_mark);
}

TEST_F(QueryLogTest, OtherExamples) {
  EXPECT_EQ(normalize("beyoncé and jay-z", config).terms, (std::vector<std::string>{"beyonce", "jay", "z"}));
  EXPECT_EQ(normalize("The ballades of Chopin...", config).terms, (std::vector<std::string>{"ballades", "chopin"}));
  EXPECT_EQ(normalize("latex/accents", config).terms, (std::vector<std::string>{"latex", "accents"}));
  EXPECT_EQ(normalize("\"Palácio\" (dos Médicis)", config).terms,
            (std::vector<std::string>{"palacio", "medicis"}));
  EXPECT_EQ(normalize("STRAßE Æon Łódź", config).terms,
            (std::vector<std::string>{"strasse", "aeon", "lodz"}));
}

TEST_F(QueryLogTest, AlreadyDecomposedInputFolds) {
  // "e" followed by COMBINING ACUTE ACCENT.
  EXPECT_EQ(normalize("beyoncé", config).terms, (std::vector<std::string>{"beyonce"}));
}

TEST_F(QueryLogTest, AllStopwordsYieldsEmpty) {
  EXPECT_TRUE(normalize("the of de la ...", config).terms.empty());
}

TEST_F(QueryLogTest, InvalidUtf8DoesNotThrow) {
  std::string bad = "abc\xff\xfe" "def";
  auto n = normalize(bad, config);
  EXPECT_EQ(n.terms, (std::vector<std::string>{"abc", "def"}));
}

std::string random_query(std::mt19937& rng) {
  static const std::vector<std::string> pieces{
      "Café", "the",  "jay-z", "?",  "España", "(x)", "1999", "Über", "de",  "wiki", "+",
      "naïve", "...", "São", "Ångström", "a/b", "\"q\"",  "México", "e", "中文"};
  std::uniform_int_distribution<int> len(0, 8), pick(0, static_cast<int>(pieces.size()) - 1), sep(0, 2);
  std::string s;
  int n = len(rng);
  for (int i = 0; i < n; ++i) {
    s += pieces[static_cast<std::size_t>(pick(rng))];
    s += sep(rng) == 0 ? "" : " ";
  }
  return s;
}

TEST_F(QueryLogTest, NormalizeIsIdempotent) {
  std::mt19937 rng(11);
  for (int i = 0; i < 500; ++i) {
    auto first = normalize(random_query(rng), config);
    auto second = normalize(first.joined(), config);
    EXPECT_EQ(first.terms, second.terms);
  }
}

TEST_F(QueryLogTest, TokensAreAsciiAlnumAndNotStopwords) {
  std::mt19937 rng(12);
  for (int i = 0; i < 500; ++i) {
    for (const auto& t : normalize(random_query(rng), config).terms) {
      EXPECT_FALSE(t.empty());
      EXPECT_TRUE(std::all_of(t.begin(), t.end(), [](char c) { return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9'); }))
          << t;
      EXPECT_FALSE(config.stopwords.contains(t)) << t;
    }
  }
}

TEST(StopwordConfig, MissingFileIsIoError) {
  testing::TempDir dir("stopwords");
  EXPECT_THROW(NormalizationConfig::from_directory(dir.path(), {"pt"}), IoError);
}

TEST(StopwordConfig, EmptyListIsRejected) {
  testing::TempDir dir("stopwords");
  testing::write_text(dir / "pt.txt", "# only a comment\n\n");
  EXPECT_THROW(NormalizationConfig::from_directory(dir.path(), {"pt"}), DataError);
}

TEST(StopwordConfig, CommentsIgnoredAndWordsFolded) {
  testing::TempDir dir("stopwords");
  testing::write_text(dir / "pt.txt", "# header\nnão\ntambém\n");
  auto config = NormalizationConfig::from_directory(dir.path(), {"pt"});
  EXPECT_TRUE(config.stopwords.contains("nao"));
  EXPECT_TRUE(config.stopwords.contains("tambem"));
  EXPECT_FALSE(config.stopwords.contains("#"));
  EXPECT_EQ(config.stopwords.size(), 2u);
}

TEST(Navigational, TermContainedInHost) {
  EXPECT_TRUE(is_navigational(q({"amazon", "books"}), {"amazon.com"}));
  EXPECT_FALSE(is_navigational(q({"anaemia", "symptoms"}), {"webmd.com"}));
  EXPECT_FALSE(is_navigational(q({}), {"amazon.com", "x.org"}));
  EXPECT_FALSE(is_navigational(q({"amazon"}), {}));
}

TEST(Navigational, MonotoneInHostSet) {
  std::mt19937 rng(5);
  const std::vector<std::string> terms{"amazon", "books", "mtv", "pt", "news", "porto"};
  const std::vector<std::string> hosts{"amazon.com", "mtv.pt", "publico.pt", "webmd.com", "portoeditora.pt", "x.org"};
  std::bernoulli_distribution coin(0.4);
  for (int i = 0; i < 300; ++i) {
    std::vector<std::string> qt;
    for (const auto& t : terms)
      if (coin(rng)) qt.push_back(t);
    std::set<std::string> h1, h2;
    for (const auto& h : hosts) {
      if (coin(rng)) h1.insert(h);
      if (coin(rng)) h2.insert(h);
    }
    std::set<std::string> both = h1;
    both.insert(h2.begin(), h2.end());
    EXPECT_EQ(is_navigational(q(qt), both), is_navigational(q(qt), h1) || is_navigational(q(qt), h2));
  }
}

TEST(WikiQuery, MisspellingsAndAbbreviation) {
  EXPECT_TRUE(is_wiki_query(q({"james", "dean", "wikpedia"})));
  EXPECT_TRUE(is_wiki_query(q({"madrid", "wiki"})));
  EXPECT_TRUE(is_wiki_query(q({"kennedy", "weekpedia"})));
  EXPECT_TRUE(is_wiki_query(q({"wekpedia", "velvet", "revolution"})));
  EXPECT_TRUE(is_wiki_query(q({"ancient", "greece", "wikipedia"})));
  EXPECT_FALSE(is_wiki_query(q({"cold", "war"})));
  EXPECT_FALSE(is_wiki_query(q({})));
}

TEST(WikiQuery, InvariantUnderPermutation) {
  std::vector<std::string> terms{"wekpedia", "velvet", "revolution", "history"};
  std::sort(terms.begin(), terms.end());
  do {
    EXPECT_TRUE(is_wiki_query(q(terms)));
  } while (std::next_permutation(terms.begin(), terms.end()));
  std::vector<std::string> plain{"cold", "war", "berlin"};
  std::sort(plain.begin(), plain.end());
  do {
    EXPECT_FALSE(is_wiki_query(q(plain)));
  } while (std::next_permutation(plain.begin(), plain.end()));
}

TEST(Levenshtein, KnownDistances) {
  EXPECT_EQ(levenshtein("wikpedia", "wikipedia"), 1u);
  EXPECT_EQ(levenshtein("wekpedia", "wikipedia"), 2u);
  EXPECT_EQ(levenshtein("weekpedia", "wikipedia"), 3u);
  EXPECT_EQ(levenshtein("", "abc"), 3u);
  EXPECT_EQ(levenshtein("kitten", "sitting"), 3u);
}

TEST(WikipediaHost, SubdomainsCount) {
  EXPECT_TRUE(is_wikipedia_host("wikipedia.org"));
  EXPECT_TRUE(is_wikipedia_host("pt.wikipedia.org"));
  EXPECT_FALSE(is_wikipedia_host("notwikipedia.org"));
  EXPECT_FALSE(is_wikipedia_host("wikipedia.org.evil.com"));
}

TEST_F(QueryLogTest, NormalizedFileRoundTrip) {
  std::istringstream raw("Vuelta+España\tes.wikipedia.org\t3\nthe of\tx.com\t1\nprotoestrela?\tastro.pt\t2\n");
  auto records = normalize_records(parse_log(raw).records, config);
  ASSERT_EQ(records.size(), 2u);  // all-stopword query dropped
  std::ostringstream out;
  write_normalized(out, records);
  EXPECT_EQ(out.str(), "vuelta espana\t0\tes.wikipedia.org\t3\nprotoestrela\t1\tastro.pt\t2\n");
  std::istringstream back(out.str());
  auto again = read_normalized(back, "mem");
  ASSERT_EQ(again.size(), 2u);
  EXPECT_EQ(again[1].query.terms, (std::vector<std::string>{"protoestrela"}));
  EXPECT_TRUE(again[1].query.has_question_mark);
  EXPECT_EQ(again[0].count, 3u);
}

TEST(ReadNormalized, RejectsBadRows) {
  std::istringstream in("q\t2\thost\t1\n");
  EXPECT_THROW(read_normalized(in, "mem"), DataError);
}

}  // namespace
}  // namespace enq::querylog
