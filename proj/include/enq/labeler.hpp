#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "enq/common.hpp"
#include "enq/querylog.hpp"

namespace enq::labeler {

using querylog::NormalizedQuery;
using querylog::NormalizedRecord;

/// Click totals of one normalized query: wiki clicks C_w, other clicks, hosts.
struct ClickProfile {
  NormalizedQuery query;
  std::uint64_t wiki_clicks = 0;
  std::uint64_t other_clicks = 0;
  std::set<std::string> hosts;

  std::uint64_t total() const { return wiki_clicks + other_clicks; }
};

/// Keyed by NormalizedQuery::joined(); ordered so downstream sampling is
/// reproducible.
using ProfileMap = std::map<std::string, ClickProfile>;

struct LabelingConfig {
  double tau_e = 1.0;
  double tau_note = 0.0;
  std::uint64_t min_wiki_clicks = 3;
  std::uint64_t seed = 42;

  /// Throws DataError unless 0 <= tau_note < tau_e <= 1 and min_wiki_clicks >= 1.
  void validate() const;
};

struct LabeledQuery {
  NormalizedQuery query;
  Label label = Label::NotE;
  std::uint64_t wiki_clicks = 0;
};

/// Sums clicks per distinct term sequence. The question-mark flag of a
/// profile is set if any contributing record had one.
ProfileMap aggregate(const std::vector<NormalizedRecord>& records);

/// Merges partial aggregations (the fold is a commutative monoid).
void merge_into(ProfileMap& into, const ProfileMap& from);

/// Wikipedia click ratio R_w = C_w / (C_w + C_other).
double ratio(const ClickProfile& profile);

/// E if R_w >= tau_e, notE if R_w <= tau_note, nothing in between.
std::optional<LabeledQuery> label(const ClickProfile& profile, const LabelingConfig& config);

struct Dataset {
  std::vector<LabeledQuery> examples;   // balanced and shuffled
  std::vector<ClickProfile> unlabeled;  // mid-ratio queries, for inspection
  std::size_t positive_pool = 0;
  std::size_t negative_pool = 0;
};

/// Balanced dataset: every eligible positive (wiki_clicks >= min, not a wiki
/// query) plus an equal number of non-navigational negatives sampled
/// without replacement, shuffled by seed.
Dataset build_dataset(const ProfileMap& profiles, const LabelingConfig& config);

/// `label(E/N) \t joined-terms \t has_question_mark \t wiki_clicks`
void write_dataset(std::ostream& out, const std::vector<LabeledQuery>& examples);
std::vector<LabeledQuery> read_dataset(std::istream& in, const std::string& source);

/// `joined-terms \t wiki_clicks \t other_clicks \t ratio`
void write_unlabeled(std::ostream& out, const std::vector<ClickProfile>& profiles);

}  // namespace enq::labeler
