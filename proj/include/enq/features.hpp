#pragma once

#include <array>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "enq/common.hpp"
#include "enq/kb.hpp"
#include "enq/querylog.hpp"
#include "enq/similarity.hpp"

namespace enq::features {

using querylog::NormalizedQuery;

/// Sparse binary features of one query: the set of active feature names.
/// Names follow `group ":" detail` with group in {dir, tp, title, graph, ont, fb}.
using FeatureVector = std::set<std::string>;

/// The eight ablation groups.
enum class FeatureGroupId {
  Directories,
  TermPatterns,
  WikiArticles,
  WikiDisambig,
  WikiCategories,
  WikiGraph,
  Ontology,
  Entities,
};

inline constexpr std::array<FeatureGroupId, 8> kAllGroups{
    FeatureGroupId::Directories,  FeatureGroupId::TermPatterns, FeatureGroupId::WikiArticles,
    FeatureGroupId::WikiDisambig, FeatureGroupId::WikiCategories, FeatureGroupId::WikiGraph,
    FeatureGroupId::Ontology,     FeatureGroupId::Entities};

std::string_view to_string(FeatureGroupId group);
std::optional<FeatureGroupId> parse_group(std::string_view text);

/// Group of a feature name by prefix. Throws DataError on an unknown prefix.
FeatureGroupId group_of(std::string_view feature_name);

/// Copy of `v` without features of `group`.
FeatureVector strip_group(const FeatureVector& v, FeatureGroupId group);
/// Only the features of `group`.
FeatureVector select_group(const FeatureVector& v, FeatureGroupId group);

/// Interval label of s in (0, 1]: (0,.2]->"0.2", (.2,.4]->"0.4", (.4,.6]->"0.6",
/// (.6,.8]->"0.8", (.8,1)->"0.99", 1->"1.0". Throws std::invalid_argument
/// outside (0, 1].
std::string_view score_bucket(double s);
inline constexpr std::array<std::string_view, 6> kBuckets{"0.2", "0.4", "0.6", "0.8", "0.99", "1.0"};

/// tp:date, tp:latin, tp:geo, tp:question and one tp:len-* feature.
FeatureVector term_pattern_features(const NormalizedQuery& q, const kb::Gazetteer& gaz);

/// True iff token is a canonical Roman numeral worth 2..3999.
bool is_roman_numeral(std::string_view token);

FeatureVector directory_features(const NormalizedQuery& q, const kb::Lexicon& lex);

struct TitleMatch {
  std::string key;  // normalized title
  std::string original;
  kb::Language language = kb::Language::En;
  double score = 0.0;
};

struct TitleProjection {
  FeatureVector features;
  /// Best article title per language (score > 0 only).
  std::map<kb::Language, TitleMatch> best_article_by_language;
  /// Highest-scoring article title over all languages; ties go to the
  /// shorter key, then the lexicographically smaller one.
  std::optional<TitleMatch> best_article;
};

/// One title:<type>-<LANG>-<bucket> feature per list whose max Dice is > 0.
TitleProjection title_projection_features(const NormalizedQuery& q, const std::vector<kb::TitleList>& lists);

/// graph:<category> for every category within 4 levels of the best title.
FeatureVector graph_features(const std::optional<TitleMatch>& best_title, const kb::CategoryGraph& graph);
inline constexpr int kGraphDepth = 4;

/// ont:<class> for each ontology class of the best title.
FeatureVector ontology_features(const std::optional<TitleMatch>& best_title, const kb::OntologyMap& ont);

/// fb:match and fb:cat:<top_category> on an entity match.
FeatureVector entity_features(const NormalizedQuery& q, const kb::EntityIndex& index);

/// Union of every group. Throws std::invalid_argument on an empty query.
FeatureVector extract(const NormalizedQuery& q, const kb::KBSnapshot& snapshot);

/// One line of a feature file.
struct FeatureRow {
  Label label = Label::NotE;
  std::string query;  // joined terms
  FeatureVector features;
};

/// `label \t joined-terms \t space-separated sorted feature names`
void write_features(std::ostream& out, const std::vector<FeatureRow>& rows);
std::vector<FeatureRow> read_features(std::istream& in, const std::string& source);

}  // namespace enq::features
