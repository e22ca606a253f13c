#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "enq/common.hpp"

namespace enq::querylog {

/// One <query, hostname, clicks> line of a click-through log.
struct RawLogRecord {
  std::string query;
  std::string hostname;  // lowercase
  std::uint64_t count = 0;
};

struct ParseResult {
  std::vector<RawLogRecord> records;
  std::size_t malformed = 0;
};

/// Parses TAB-separated `query \t hostname \t count` lines. Malformed lines
/// (wrong field count, empty field, non-integer or zero count) are skipped
/// and tallied; blank lines are ignored.
ParseResult parse_log(std::istream& in);

struct NormalizedQuery {
  std::vector<std::string> terms;
  bool has_question_mark = false;
  std::string original;

  /// Terms joined by single spaces; the aggregation key.
  std::string joined() const;
  bool empty() const { return terms.empty(); }
};

struct NormalizationConfig {
  std::vector<std::string> languages{"pt", "es", "en"};
  /// Union of the stopword sets of all active languages, already folded.
  std::unordered_set<std::string> stopwords;

  /// Reads `<dir>/<lang>.txt` for every language. Throws IoError if a file is
  /// missing and DataError if a list is empty.
  static NormalizationConfig from_directory(const std::filesystem::path& dir,
                                            std::vector<std::string> languages = {"pt", "es", "en"});
  void add_stopwords(std::istream& in, const std::string& source);
};

/// Lowercases, strips diacritics (canonical decomposition, combining marks
/// dropped), splits on anything that is not [a-z0-9] and drops stopwords.
/// A '?' anywhere sets has_question_mark.
NormalizedQuery normalize(std::string_view query, const NormalizationConfig& config);

/// Folding step of normalize() without stopword removal. Used for KB keys.
std::vector<std::string> fold_tokens(std::string_view text, bool* saw_question_mark = nullptr);

/// True iff some query term is a substring of some clicked hostname.
bool is_navigational(const NormalizedQuery& query, const std::set<std::string>& clicked_hosts);

/// True iff some term is "wiki" or within edit distance 3 of "wikipedia".
bool is_wiki_query(const NormalizedQuery& query);

/// "wikipedia.org" or any of its subdomains.
bool is_wikipedia_host(std::string_view hostname);

std::size_t levenshtein(std::string_view a, std::string_view b);

/// A log record after normalization; the rows of the ingest output file.
struct NormalizedRecord {
  NormalizedQuery query;
  std::string hostname;
  std::uint64_t count = 0;
};

/// Normalizes every record and drops those whose term list is empty.
std::vector<NormalizedRecord> normalize_records(const std::vector<RawLogRecord>& records,
                                                const NormalizationConfig& config);

/// `joined-terms \t has_question_mark(0/1) \t hostname \t count`
void write_normalized(std::ostream& out, const std::vector<NormalizedRecord>& records);
std::vector<NormalizedRecord> read_normalized(std::istream& in, const std::string& source);

}  // namespace enq::querylog
