#include "enq/synthgen.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "enq/common.hpp"
#include "enq/features.hpp"
#include "enq/querylog.hpp"
#include "enq/rng.hpp"

namespace enq::synthgen {
namespace {

namespace fs = std::filesystem;

const std::map<std::string, std::vector<std::string>> kStopwords{
    {"pt", {"de", "a", "o", "do", "da", "e", "em", "dos", "das", "para"}},
    {"es", {"de", "la", "el", "y", "en", "los", "las", "del"}},
    {"en", {"the", "of", "and", "in", "a", "for", "to"}},
};

const std::map<std::string, std::vector<std::string>> kMonths{
    {"pt", {"janeiro", "fevereiro", "março", "abril", "maio", "junho", "julho", "agosto", "setembro", "outubro",
            "novembro", "dezembro"}},
    {"en", {"january", "february", "march", "april", "may", "june", "july", "august", "september", "october",
            "november", "december"}},
    {"es", {"enero", "febrero", "marzo", "abril", "mayo", "junio", "julio", "agosto", "septiembre", "octubre",
            "noviembre", "diciembre"}},
};

const std::vector<std::string> kPlaces{"Portugal", "Spain", "España", "Lisbon", "Lisboa", "Porto",  "Madrid",
                                       "Norway",   "Kazakhstan", "France", "United Kingdom", "Brasil", "Brazil",
                                       "Angola",   "Mexico", "Sevilla", "Coimbra", "Braga", "Chile",  "Peru"};

const std::vector<std::string> kLatinSuffixes{"atus", "arium", "icus", "idae", "ensis", "aurea"};
const std::vector<std::string> kOntologyClasses{"Person", "Place", "Organisation", "Work", "Species", "Event"};
const std::vector<std::string> kTopCategories{"/music/", "/people/", "/location/", "/film/", "/book/", "/biology/"};
const std::vector<std::string> kLexiconKbCategories{"job", "nationality", "organization-type", "science", "art"};
const std::vector<std::string> kLexiconOtherCategories{"product", "service", "software"};
const std::vector<std::string> kLanguages{"pt", "en", "es"};
const std::vector<std::string> kCommonHosts{"imdb.com", "lastfm.com", "youtube.com", "answers.yahoo.com"};

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& items) {
  return items[rng.below(items.size())];
}

bool chance(Rng& rng, double p) { return rng.unit() < p; }

class Generator {
 public:
  Generator(const SynthConfig& config) : config_(config), rng_(config.seed) {
    for (const auto& [lang, words] : kStopwords) {
      std::ostringstream text;
      for (const auto& w : words) text << w << '\n';
      std::istringstream in(text.str());
      norm_.add_stopwords(in, lang);
      reserved_.insert(words.begin(), words.end());
    }
    norm_.languages = kLanguages;
    for (const auto& [lang, months] : kMonths)
      for (const auto& m : months)
        for (auto& t : querylog::fold_tokens(m)) reserved_.insert(t);
    for (const auto& p : kPlaces)
      for (auto& t : querylog::fold_tokens(p)) reserved_.insert(t);
    reserved_.insert("wiki");
  }

  SynthManifest run(const fs::path& out) {
    SynthManifest manifest;
    manifest.root = out;
    manifest.log = out / "log.tsv";
    manifest.stopwords = out / "stopwords";
    manifest.snapshot = out / "snapshot";
    manifest.serp = out / "serp.tsv";
    try {
      fs::create_directories(manifest.stopwords);
      fs::create_directories(manifest.snapshot);
    } catch (const fs::filesystem_error& e) {
      throw IoError(std::string("cannot create output directories: ") + e.what());
    }
    out_ = out;

    std::size_t vocab = std::max<std::size_t>(config_.kb_vocab_size, 20);
    kb_words_ = make_vocab(vocab);
    other_words_ = make_vocab(std::max<std::size_t>(config_.n_other * 2, 40));
    host_words_ = make_vocab(std::max<std::size_t>(config_.n_other + config_.n_mixed, 20));

    build_kb();
    build_queries();

    for (const auto& [lang, words] : kStopwords) write_lines("stopwords/" + lang + ".txt", words);
    write_snapshot();
    write_log();
    write_serp();
    manifest.files = written_;
    return manifest;
  }

 private:
  struct Query {
    std::string raw;
    std::string key;
    std::vector<std::string> terms;
  };

  struct Article {
    std::string title;
    std::string lang;
  };

  std::string make_word() {
    static const std::string consonants = "bcdfgklmnprstvz";
    static const std::string vowels = "aeiou";
    while (true) {
      std::size_t syllables = 2 + rng_.below(3);
      std::string w;
      for (std::size_t s = 0; s < syllables; ++s) {
        w.push_back(consonants[rng_.below(consonants.size())]);
        w.push_back(vowels[rng_.below(vowels.size())]);
      }
      if (rng_.below(3) == 0) w.push_back(consonants[rng_.below(consonants.size())]);
      if (used_.contains(w) || reserved_.contains(w) || features::is_roman_numeral(w)) continue;
      if (querylog::is_wiki_query(querylog::NormalizedQuery{{w}, false, w})) continue;
      used_.insert(w);
      return w;
    }
  }

  std::vector<std::string> make_vocab(std::size_t n) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(make_word());
    return out;
  }

  std::string words_text(const std::vector<std::string>& words, std::size_t min, std::size_t max) {
    std::size_t n = min + rng_.below(max - min + 1);
    std::vector<std::string> parts;
    while (parts.size() < n) {
      const auto& w = pick(rng_, words);
      if (std::find(parts.begin(), parts.end(), w) == parts.end()) parts.push_back(w);
    }
    return join(parts, " ");
  }

  void build_kb() {
    std::size_t n_articles = config_.n_encyclopedic + kb_words_.size() / 10;
    std::set<std::string> keys;
    while (articles_.size() < n_articles) {
      std::string title = words_text(kb_words_, 1, 3);
      if (!keys.insert(title).second) continue;
      // Capitalized like real page titles.
      std::string shown = title;
      shown[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(shown[0])));
      for (std::size_t i = 1; i < shown.size(); ++i)
        if (shown[i - 1] == ' ') shown[i] = static_cast<char>(std::toupper(static_cast<unsigned char>(shown[i])));
      articles_.push_back({shown, pick(rng_, kLanguages)});
    }

    // Category hierarchy: five levels, each node with one or two parents one
    // level up, plus a few edges from the roots back down to create cycles.
    std::vector<std::vector<std::string>> levels(5);
    std::size_t size = std::max<std::size_t>(10, n_articles / 5);
    std::set<std::string> category_keys;
    for (auto& level : levels) {
      while (level.size() < size) {
        std::string name = words_text(kb_words_, 2, 2);
        if (category_keys.insert(name).second) level.push_back(name);
      }
      size = std::max<std::size_t>(2, size / 2);
    }
    for (std::size_t l = 0; l + 1 < levels.size(); ++l) {
      for (const auto& child : levels[l]) {
        std::size_t parents = 1 + rng_.below(2);
        std::set<std::string> chosen;
        for (std::size_t p = 0; p < parents; ++p) chosen.insert(pick(rng_, levels[l + 1]));
        for (const auto& parent : chosen) edges_.push_back(child + "\t" + parent);
      }
    }
    for (const auto& root : levels.back()) edges_.push_back(root + "\t" + pick(rng_, levels[2]));
    for (const auto& level : levels) categories_.insert(categories_.end(), level.begin(), level.end());

    for (const auto& a : articles_) {
      std::size_t n = 1 + rng_.below(2);
      std::set<std::string> chosen;
      for (std::size_t i = 0; i < n; ++i) chosen.insert(pick(rng_, levels[0]));
      for (const auto& c : chosen) article_cats_.push_back(a.title + "\t" + c);
      if (chance(rng_, 0.8)) {
        std::string classes = pick(rng_, kOntologyClasses);
        if (chance(rng_, 0.3)) {
          const auto& extra = pick(rng_, kOntologyClasses);
          if (extra != classes) classes += "," + extra;
        }
        ontology_.push_back(a.title + "\t" + classes);
      }
      if (chance(rng_, 0.7)) entities_.push_back(a.title + "\t" + pick(rng_, kTopCategories));
    }

    for (std::size_t i = 0; i < kb_words_.size() / 10; ++i) {
      const auto& w = pick(rng_, kb_words_);
      w_disambig_[pick(rng_, kLanguages)].insert(w);
    }
    for (const auto& c : categories_) {
      std::string shown = c;
      shown[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(shown[0])));
      w_category_[pick(rng_, kLanguages)].insert(shown);
    }
    for (std::size_t i = 0; i < 60 && i < kb_words_.size(); ++i)
      lexicon_[kb_words_[i]] = pick(rng_, kLexiconKbCategories);
    for (std::size_t i = 0; i < 20 && i < other_words_.size(); ++i)
      lexicon_[other_words_[i]] = pick(rng_, kLexiconOtherCategories);
  }

  /// Renders normalized terms as a messy raw query that normalizes back.
  std::string render(const std::vector<std::string>& terms, bool question) {
    static const std::map<char, std::string> accents{{'a', "á"}, {'e', "é"}, {'o', "ó"}, {'u', "ú"}, {'i', "í"}};
    std::string raw;
    for (std::size_t i = 0; i < terms.size(); ++i) {
      std::string word = terms[i];
      if (chance(rng_, 0.2)) {
        auto pos = word.find_first_of("aeoui");
        if (pos != std::string::npos) word = word.substr(0, pos) + accents.at(word[pos]) + word.substr(pos + 1);
      }
      if (chance(rng_, 0.4)) word[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(word[0])));
      if (i > 0) {
        double r = rng_.unit();
        if (r < 0.08)
          raw += "-";
        else if (r < 0.14)
          raw += "+";
        else if (r < 0.3)
          raw += " " + pick(rng_, kStopwords.at(pick(rng_, kLanguages))) + " ";
        else
          raw += " ";
      }
      raw += word;
    }
    if (question) raw += "?";
    return raw;
  }

  std::vector<std::string> place_terms() { return querylog::fold_tokens(pick(rng_, kPlaces)); }

  std::string year() { return std::to_string(1000 + rng_.below(1100)); }

  bool accept(Query& q, std::set<std::string>& keys) {
    auto norm = querylog::normalize(q.raw, norm_);
    if (norm.empty() || querylog::is_wiki_query(norm)) return false;
    q.key = norm.joined();
    q.terms = norm.terms;
    return keys.insert(q.key).second;
  }

  void build_queries() {
    std::set<std::string> keys;
    std::vector<std::size_t> order(articles_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng_.shuffle(order);

    std::size_t next_article = 0;
    while (enc_.size() < config_.n_encyclopedic) {
      if (next_article >= order.size()) next_article = 0;
      const Article& a = articles_[order[next_article++]];
      std::vector<std::string> terms = querylog::normalize(a.title, norm_).terms;
      if (chance(rng_, 0.3)) {
        const auto& extra = pick(rng_, kb_words_);
        if (std::find(terms.begin(), terms.end(), extra) == terms.end()) terms.push_back(extra);
      }
      if (chance(rng_, 0.15)) terms.push_back(year());
      if (chance(rng_, 0.1)) {
        auto place = place_terms();
        terms.insert(terms.end(), place.begin(), place.end());
      }
      Query q{render(terms, chance(rng_, 0.08)), {}, {}};
      if (accept(q, keys)) enc_.push_back(std::move(q));
    }
    while (other_.size() < config_.n_other) {
      auto text = words_text(other_words_, 1, 4);
      std::vector<std::string> terms = split(text, ' ');
      if (chance(rng_, 0.15)) terms.push_back(year());
      if (chance(rng_, 0.1)) {
        auto place = place_terms();
        terms.insert(terms.end(), place.begin(), place.end());
      }
      if (chance(rng_, 0.05)) terms.push_back(querylog::fold_tokens(pick(rng_, kMonths.at("en")))[0]);
      Query q{render(terms, chance(rng_, 0.05)), {}, {}};
      if (accept(q, keys)) other_.push_back(std::move(q));
    }
    while (mixed_.size() < config_.n_mixed) {
      auto terms = split(words_text(kb_words_, 1, 2), ' ');
      terms.push_back(pick(rng_, other_words_));
      Query q{render(terms, false), {}, {}};
      if (accept(q, keys)) mixed_.push_back(std::move(q));
    }
  }

  /// Non-Wikipedia host that contains none of the query terms.
  std::string host_for(const Query& q) {
    querylog::NormalizedQuery nq{q.terms, false, q.key};
    while (true) {
      std::string host = pick(rng_, host_words_) + (chance(rng_, 0.5) ? ".com" : chance(rng_, 0.5) ? ".pt" : ".net");
      if (!querylog::is_navigational(nq, {host})) return host;
    }
  }

  std::string wiki_host() { return pick(rng_, kLanguages) + ".wikipedia.org"; }

  void write_file(const std::string& relative, const std::string& content) {
    fs::path path = out_ / relative;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(path.string() + ": cannot write");
    out << content;
    if (!out) throw IoError(path.string() + ": write failed");
    written_.push_back(relative);
  }

  template <typename Range>
  void write_lines(const std::string& relative, const Range& lines) {
    std::string content;
    for (const auto& l : lines) content += l + "\n";
    write_file(relative, content);
  }

  void write_snapshot() {
    std::ostringstream manifest;
    manifest << "# synthetic knowledge-base snapshot (seed " << config_.seed << ")\n";
    auto entry = [&](const std::string& key, const std::string& file) {
      manifest << key << " = " << file << '\n';
    };
    for (const auto& lang : kLanguages) {
      std::vector<std::string> titles;
      for (const auto& a : articles_)
        if (a.lang == lang) titles.push_back(a.title);
      write_lines("snapshot/titles_article_" + lang + ".txt", titles);
      entry("titles.article." + lang, "titles_article_" + lang + ".txt");
      write_lines("snapshot/titles_disambiguation_" + lang + ".txt", w_disambig_[lang]);
      entry("titles.disambiguation." + lang, "titles_disambiguation_" + lang + ".txt");
      write_lines("snapshot/titles_category_" + lang + ".txt", w_category_[lang]);
      entry("titles.category." + lang, "titles_category_" + lang + ".txt");
    }
    write_lines("snapshot/graph_edges.tsv", edges_);
    entry("graph.edges", "graph_edges.tsv");
    write_lines("snapshot/article_categories.tsv", article_cats_);
    entry("graph.article_cats", "article_categories.tsv");
    write_lines("snapshot/ontology.tsv", ontology_);
    entry("ontology", "ontology.tsv");
    write_lines("snapshot/entities.tsv", entities_);
    entry("entities", "entities.tsv");
    std::vector<std::string> lexicon;
    for (const auto& [word, cat] : lexicon_) lexicon.push_back(word + "\t" + cat);
    write_lines("snapshot/lexicon.tsv", lexicon);
    entry("lexicon", "lexicon.tsv");
    for (const auto& [lang, months] : kMonths) {
      write_lines("snapshot/months_" + lang + ".txt", months);
      entry("gazetteer.months." + lang, "months_" + lang + ".txt");
    }
    write_lines("snapshot/places.txt", kPlaces);
    entry("gazetteer.places", "places.txt");
    write_lines("snapshot/latin_suffixes.txt", kLatinSuffixes);
    entry("gazetteer.latin_suffixes", "latin_suffixes.txt");
    for (const auto& lang : kLanguages) entry("stopwords." + lang, "../stopwords/" + lang + ".txt");
    write_file("snapshot/snapshot.toml", manifest.str());
  }

  void write_log() {
    std::vector<std::string> lines;
    auto record = [&](const Query& q, const std::string& host, std::uint64_t count) {
      lines.push_back(q.raw + "\t" + host + "\t" + std::to_string(count));
    };
    for (const auto& q : enc_) {
      std::uint64_t clicks = 3 + rng_.below(10);
      std::size_t parts = 1 + rng_.below(std::min<std::uint64_t>(3, clicks));
      for (std::size_t p = 0; p + 1 < parts; ++p) {
        record(q, wiki_host(), 1);
        --clicks;
      }
      record(q, wiki_host(), clicks);
    }
    for (const auto& q : other_) {
      std::size_t parts = 1 + rng_.below(3);
      for (std::size_t p = 0; p < parts; ++p) record(q, host_for(q), 1 + rng_.below(10));
    }
    for (const auto& q : mixed_) {
      std::uint64_t clicks = 1 + rng_.below(8);
      record(q, wiki_host(), clicks);
      record(q, rng_.below(2) == 0 ? pick(rng_, kCommonHosts) : host_for(q), clicks);
    }
    rng_.shuffle(lines);
    write_lines("log.tsv", lines);
  }

  void write_serp() {
    std::vector<std::string> lines;
    auto ranking = [&](const Query& q, double wiki_first) {
      std::vector<std::string> hosts;
      if (chance(rng_, wiki_first)) hosts.push_back(wiki_host());
      while (hosts.size() < 10) {
        if (hosts.size() > 0 && chance(rng_, 0.1))
          hosts.push_back(wiki_host());
        else
          hosts.push_back(chance(rng_, 0.5) ? pick(rng_, kCommonHosts) : host_for(q));
      }
      lines.push_back(q.key + "\t" + join(hosts, ","));
    };
    for (const auto& q : enc_) ranking(q, 0.75);
    for (const auto& q : other_) ranking(q, 0.1);
    for (const auto& q : mixed_) ranking(q, 0.5);
    write_lines("serp.tsv", lines);
  }

  SynthConfig config_;
  Rng rng_;
  querylog::NormalizationConfig norm_;
  std::set<std::string> reserved_;
  std::set<std::string> used_;
  std::vector<std::string> kb_words_, other_words_, host_words_;
  std::vector<Article> articles_;
  std::vector<std::string> categories_;
  std::vector<std::string> edges_, article_cats_, ontology_, entities_;
  std::map<std::string, std::set<std::string>> w_disambig_, w_category_;
  std::map<std::string, std::string> lexicon_;
  std::vector<Query> enc_, other_, mixed_;
  fs::path out_;
  std::vector<fs::path> written_;
};

}  // namespace

SynthManifest generate(const SynthConfig& config, const std::filesystem::path& out) {
  Generator gen(config);
  return gen.run(out);
}

}  // namespace enq::synthgen
