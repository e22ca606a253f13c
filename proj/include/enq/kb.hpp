#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "enq/querylog.hpp"
#include "enq/similarity.hpp"

namespace enq::kb {

enum class PageType { Article, Disambiguation, Category };
enum class Language { Pt, En, Es };

inline constexpr std::array<PageType, 3> kPageTypes{PageType::Article, PageType::Disambiguation, PageType::Category};
inline constexpr std::array<Language, 3> kLanguages{Language::Pt, Language::En, Language::Es};

std::string_view to_string(PageType type);  // "article", "disambiguation", "category"
std::string_view to_string(Language lang);   // "pt", "en", "es"
std::optional<PageType> parse_page_type(std::string_view text);
std::optional<Language> parse_language(std::string_view text);

/// Titles of one page type in one language, normalized like queries.
struct TitleList {
  PageType page_type = PageType::Article;
  Language language = Language::En;
  TermSetIndex titles;
};

/// Upward (child -> parent) category structure. Categories are identified by
/// their folded, underscore-joined name ("Chinese philosophy" ->
/// "chinese_philosophy"); articles by their normalized title key.
struct CategoryGraph {
  std::set<std::string> nodes;
  std::unordered_map<std::string, std::set<std::string>> parent_edges;
  std::unordered_map<std::string, std::set<std::string>> article_categories;

  void add_parent(const std::string& child, const std::string& parent);
  void add_article_category(const std::string& article, const std::string& category);
};

/// Categories reachable from the article's own categories within `depth`
/// levels (depth 1 = the article's categories). Cycle-safe breadth-first
/// search. Unknown article -> empty set; depth 0 -> std::invalid_argument.
std::set<std::string> expand_categories(const CategoryGraph& graph, const std::string& article_key, int depth);

/// Canonical category identifier used by the graph and by graph:* features.
std::string category_id(std::string_view name);

/// Feature-safe form of a free-text label: whitespace runs become '_'.
std::string sanitize_label(std::string_view text);

struct OntologyMap {
  std::unordered_map<std::string, std::set<std::string>> entries;  // article key -> classes
};

struct EntityMatch {
  std::string name;  // normalized key
  std::string top_category;
  double score = 0.0;
};

struct EntityIndex {
  TermSetIndex names;
  std::vector<std::string> top_category;  // by TermSetIndex id

  void add(const std::vector<std::string>& terms, std::string original, std::string category);
};

/// Best Dice-overlap entity for the query, or nothing if no term overlaps.
std::optional<EntityMatch> entity_search(const EntityIndex& index, const querylog::NormalizedQuery& query);

struct Lexicon {
  std::unordered_map<std::string, std::set<std::string>> entries;  // word -> semantic categories
};

struct Gazetteer {
  std::map<Language, std::set<std::string>> months;
  std::set<std::string> place_terms;  // normalized, space-joined
  std::vector<std::string> latin_suffixes;
};

/// Immutable bundle of every knowledge-base resource the features use.
struct KBSnapshot {
  std::vector<TitleList> title_lists;  // one per (page type, language)
  CategoryGraph graph;
  OntologyMap ontology;
  EntityIndex entities;
  Lexicon lexicon;
  Gazetteer gazetteer;
  /// Normalization used for titles; queries must use the same one.
  querylog::NormalizationConfig normalization;

  const TitleList* titles(PageType type, Language lang) const;
};

/// Name of the manifest file inside a snapshot directory.
inline constexpr std::string_view kManifestName = "snapshot.toml";

/// Loads `<dir>/snapshot.toml` and every file it references. If the manifest
/// lists `stopwords.<lang>` files they form the normalization config;
/// otherwise `normalization` is used (and stored in the snapshot).
/// Errors are LoadError with the manifest key or file:line in the message.
KBSnapshot load_snapshot(const std::filesystem::path& dir,
                         std::optional<querylog::NormalizationConfig> normalization = std::nullopt);

}  // namespace enq::kb
