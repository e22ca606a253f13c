#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace enq {

/// Dice coefficient over term sets: 2|A∩B| / (|A|+|B|), duplicates collapsed.
/// Throws std::invalid_argument if either side is empty.
double dice(const std::vector<std::string>& a, const std::vector<std::string>& b);

/// Sorted, de-duplicated copy of `terms`.
std::vector<std::string> distinct_terms(std::vector<std::string> terms);

/// Inverted index of term sets supporting max-Dice retrieval.
///
/// Only entries sharing at least one term with the probe can score above
/// zero, so a probe touches the posting lists of its own terms only.
class TermSetIndex {
 public:
  struct Entry {
    std::string key;  // terms joined by spaces
    std::string original;
    std::vector<std::string> terms;  // distinct, sorted
  };

  struct Match {
    std::uint32_t id = 0;
    double score = 0.0;
  };

  /// Adds an entry unless its key is already present; returns its id.
  /// Entries with no terms are ignored (returns nullopt).
  std::optional<std::uint32_t> add(const std::vector<std::string>& terms, std::string original);

  enum class TieBreak { ShorterThenLexicographic, Lexicographic };

  /// Highest-Dice entry with score > 0. By default ties go to the shorter
  /// key, then the lexicographically smaller one.
  std::optional<Match> best_match(const std::vector<std::string>& probe,
                                  TieBreak tie = TieBreak::ShorterThenLexicographic) const;

  std::optional<std::uint32_t> find(const std::vector<std::string>& terms) const;

  const Entry& entry(std::uint32_t id) const { return entries_[id]; }
  std::size_t size() const { return entries_.size(); }
  const std::vector<Entry>& entries() const { return entries_; }

 private:
  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::uint32_t> by_key_;
  std::unordered_map<std::string, std::vector<std::uint32_t>> postings_;
};

}  // namespace enq
