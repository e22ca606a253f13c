#include "enq/features.hpp"

#include <algorithm>
#include <cctype>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace enq::features {

std::string_view to_string(FeatureGroupId group) {
  switch (group) {
    case FeatureGroupId::Directories: return "directories";
    case FeatureGroupId::TermPatterns: return "term-patterns";
    case FeatureGroupId::WikiArticles: return "wiki-articles";
    case FeatureGroupId::WikiDisambig: return "wiki-disambig";
    case FeatureGroupId::WikiCategories: return "wiki-categories";
    case FeatureGroupId::WikiGraph: return "wiki-graph";
    case FeatureGroupId::Ontology: return "ontology";
    case FeatureGroupId::Entities: return "entities";
  }
  return "directories";
}

std::optional<FeatureGroupId> parse_group(std::string_view text) {
  for (auto g : kAllGroups)
    if (to_string(g) == text) return g;
  return std::nullopt;
}

FeatureGroupId group_of(std::string_view name) {
  if (name.starts_with("dir:")) return FeatureGroupId::Directories;
  if (name.starts_with("tp:")) return FeatureGroupId::TermPatterns;
  if (name.starts_with("title:article-")) return FeatureGroupId::WikiArticles;
  if (name.starts_with("title:disambiguation-")) return FeatureGroupId::WikiDisambig;
  if (name.starts_with("title:category-")) return FeatureGroupId::WikiCategories;
  if (name.starts_with("graph:")) return FeatureGroupId::WikiGraph;
  if (name.starts_with("ont:")) return FeatureGroupId::Ontology;
  if (name.starts_with("fb:")) return FeatureGroupId::Entities;
  throw DataError("unknown feature group in '" + std::string(name) + "'");
}

FeatureVector strip_group(const FeatureVector& v, FeatureGroupId group) {
  FeatureVector out;
  for (const auto& f : v)
    if (group_of(f) != group) out.insert(out.end(), f);
  return out;
}

FeatureVector select_group(const FeatureVector& v, FeatureGroupId group) {
  FeatureVector out;
  for (const auto& f : v)
    if (group_of(f) == group) out.insert(out.end(), f);
  return out;
}

std::string_view score_bucket(double s) {
  if (!(s > 0.0 && s <= 1.0)) throw std::invalid_argument("score_bucket: score outside (0, 1]");
  if (s <= 0.2) return kBuckets[0];
  if (s <= 0.4) return kBuckets[1];
  if (s <= 0.6) return kBuckets[2];
  if (s <= 0.8) return kBuckets[3];
  if (s < 1.0) return kBuckets[4];
  return kBuckets[5];
}

bool is_roman_numeral(std::string_view token) {
  if (token.empty() || token.size() > 15) return false;
  auto digit = [](char c) -> int {
    switch (std::tolower(static_cast<unsigned char>(c))) {
      case 'i': return 1;
      case 'v': return 5;
      case 'x': return 10;
      case 'l': return 50;
      case 'c': return 100;
      case 'd': return 500;
      case 'm': return 1000;
      default: return 0;
    }
  };
  int value = 0;
  for (std::size_t i = 0; i < token.size(); ++i) {
    int d = digit(token[i]);
    if (d == 0) return false;
    int next = i + 1 < token.size() ? digit(token[i + 1]) : 0;
    value += d < next ? -d : d;
  }
  if (value < 2 || value > 3999) return false;

  // Only the canonical spelling of the value counts ("iiii" and "ic" do not).
  static constexpr std::pair<int, std::string_view> kTable[] = {
      {1000, "m"}, {900, "cm"}, {500, "d"}, {400, "cd"}, {100, "c"}, {90, "xc"}, {50, "l"},
      {40, "xl"},  {10, "x"},   {9, "ix"},  {5, "v"},    {4, "iv"},  {1, "i"}};
  std::string canonical;
  int rest = value;
  for (const auto& [v, s] : kTable) {
    while (rest >= v) {
      canonical += s;
      rest -= v;
    }
  }
  std::string lower(token);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return lower == canonical;
}

namespace {

bool is_year(std::string_view token) {
  if (token.size() != 4 || token.front() == '0') return false;
  if (!std::all_of(token.begin(), token.end(), [](unsigned char c) { return std::isdigit(c); })) return false;
  int year = std::stoi(std::string(token));
  return year >= 1000 && year <= 2099;
}

constexpr std::size_t kMinSuffixTokenLength = 5;

}  // namespace

FeatureVector term_pattern_features(const NormalizedQuery& q, const kb::Gazetteer& gaz) {
  FeatureVector out;
  if (q.terms.empty()) return out;
  const auto& terms = q.terms;

  for (const auto& t : terms) {
    bool month = std::any_of(gaz.months.begin(), gaz.months.end(),
                             [&](const auto& entry) { return entry.second.contains(t); });
    if (month || is_year(t)) {
      out.insert("tp:date");
      break;
    }
  }
  for (const auto& t : terms) {
    bool suffix = t.size() >= kMinSuffixTokenLength &&
                  std::any_of(gaz.latin_suffixes.begin(), gaz.latin_suffixes.end(),
                              [&](const std::string& s) { return ends_with(t, s); });
    if (suffix || is_roman_numeral(t)) {
      out.insert("tp:latin");
      break;
    }
  }
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (gaz.place_terms.contains(terms[i]) ||
        (i + 1 < terms.size() && gaz.place_terms.contains(terms[i] + " " + terms[i + 1]))) {
      out.insert("tp:geo");
      break;
    }
  }
  if (q.has_question_mark) out.insert("tp:question");
  out.insert(terms.size() > 5 ? std::string("tp:len-5plus") : "tp:len-" + std::to_string(terms.size()));
  return out;
}

FeatureVector directory_features(const NormalizedQuery& q, const kb::Lexicon& lex) {
  FeatureVector out;
  for (const auto& t : q.terms) {
    auto it = lex.entries.find(t);
    if (it == lex.entries.end()) continue;
    for (const auto& cat : it->second) out.insert("dir:" + cat);
  }
  return out;
}

namespace {

std::string upper(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return out;
}

bool better_title(const TitleMatch& cand, const TitleMatch& cur) {
  if (cand.score != cur.score) return cand.score > cur.score;
  if (cand.key.size() != cur.key.size()) return cand.key.size() < cur.key.size();
  return cand.key < cur.key;
}

}  // namespace

TitleProjection title_projection_features(const NormalizedQuery& q, const std::vector<kb::TitleList>& lists) {
  TitleProjection out;
  if (q.terms.empty()) return out;
  for (const auto& list : lists) {
    auto match = list.titles.best_match(q.terms);
    if (!match) continue;
    out.features.insert("title:" + std::string(kb::to_string(list.page_type)) + "-" +
                        upper(kb::to_string(list.language)) + "-" + std::string(score_bucket(match->score)));
    if (list.page_type != kb::PageType::Article) continue;
    const auto& entry = list.titles.entry(match->id);
    TitleMatch tm{entry.key, entry.original, list.language, match->score};
    auto [it, inserted] = out.best_article_by_language.try_emplace(list.language, tm);
    if (!inserted && better_title(tm, it->second)) it->second = tm;
    if (!out.best_article || better_title(tm, *out.best_article)) out.best_article = tm;
  }
  return out;
}

FeatureVector graph_features(const std::optional<TitleMatch>& best_title, const kb::CategoryGraph& graph) {
  FeatureVector out;
  if (!best_title || best_title->score <= 0.0) return out;
  for (const auto& cat : kb::expand_categories(graph, best_title->key, kGraphDepth)) out.insert("graph:" + cat);
  return out;
}

FeatureVector ontology_features(const std::optional<TitleMatch>& best_title, const kb::OntologyMap& ont) {
  FeatureVector out;
  if (!best_title || best_title->score <= 0.0) return out;
  auto it = ont.entries.find(best_title->key);
  if (it == ont.entries.end()) return out;
  for (const auto& cls : it->second) out.insert("ont:" + cls);
  return out;
}

FeatureVector entity_features(const NormalizedQuery& q, const kb::EntityIndex& index) {
  FeatureVector out;
  auto match = kb::entity_search(index, q);
  if (!match) return out;
  out.insert("fb:match");
  out.insert("fb:cat:" + match->top_category);
  return out;
}

FeatureVector extract(const NormalizedQuery& q, const kb::KBSnapshot& snapshot) {
  if (q.terms.empty()) throw std::invalid_argument("extract: empty query");
  FeatureVector out = term_pattern_features(q, snapshot.gazetteer);
  out.merge(directory_features(q, snapshot.lexicon));
  TitleProjection titles = title_projection_features(q, snapshot.title_lists);
  out.merge(titles.features);
  out.merge(graph_features(titles.best_article, snapshot.graph));
  out.merge(ontology_features(titles.best_article, snapshot.ontology));
  out.merge(entity_features(q, snapshot.entities));
  return out;
}

void write_features(std::ostream& out, const std::vector<FeatureRow>& rows) {
  for (const auto& row : rows) {
    out << label_code(row.label) << '\t' << row.query << '\t';
    bool first = true;
    for (const auto& f : row.features) {
      if (!first) out << ' ';
      out << f;
      first = false;
    }
    out << '\n';
  }
}

std::vector<FeatureRow> read_features(std::istream& in, const std::string& source) {
  std::vector<FeatureRow> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view = chomp(line);
    if (view.empty()) continue;
    auto where = source + ":" + std::to_string(lineno) + ": ";
    auto fields = split(view, '\t');
    if (fields.size() != 3) throw DataError(where + "expected 3 TAB-separated fields");
    FeatureRow row;
    try {
      row.label = parse_label_code(fields[0]);
      row.query = fields[1];
      for (auto& f : split_whitespace(fields[2])) {
        group_of(f);
        row.features.insert(std::move(f));
      }
    } catch (const DataError& e) {
      throw DataError(where + e.what());
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace enq::features
