#include "enq/querylog.hpp"

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

#include "enq/common.hpp"

namespace enq::querylog {

ParseResult parse_log(std::istream& in) {
  ParseResult result;
  std::string line;
  while (std::getline(in, line)) {
    std::string_view view = chomp(line);
    if (trim(view).empty()) continue;
    auto fields = split(view, '\t');
    if (fields.size() != 3 || fields[0].empty() || fields[1].empty() || fields[2].empty()) {
      ++result.malformed;
      continue;
    }
    std::uint64_t count = 0;
    const std::string& c = fields[2];
    auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), count);
    if (ec != std::errc() || ptr != c.data() + c.size() || count < 1) {
      ++result.malformed;
      continue;
    }
    std::string host = fields[1];
    std::transform(host.begin(), host.end(), host.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    result.records.push_back({std::move(fields[0]), std::move(host), count});
  }
  return result;
}

std::string NormalizedQuery::joined() const { return join(terms, " "); }

namespace {

// Letters that survive canonical decomposition but have a customary ASCII
// spelling. Anything else outside [a-z0-9] separates tokens.
const char* ascii_fold(UChar32 c) {
  switch (c) {
    case 0x00DF: return "ss";  // ß
    case 0x00E6: return "ae";  // æ
    case 0x00F0: return "d";   // ð
    case 0x00F8: return "o";   // ø
    case 0x00FE: return "th";  // þ
    case 0x0111: return "d";   // đ
    case 0x0127: return "h";   // ħ
    case 0x0131: return "i";   // ı
    case 0x0138: return "k";   // ĸ
    case 0x0140: return "l";   // ŀ
    case 0x0142: return "l";   // ł
    case 0x014B: return "n";   // ŋ
    case 0x0153: return "oe";  // œ
    case 0x0167: return "t";   // ŧ
    case 0x017F: return "s";   // ſ
    default: return nullptr;
  }
}

}  // namespace

std::vector<std::string> fold_tokens(std::string_view text, bool* saw_question_mark) {
  icu::UnicodeString ustr = icu::UnicodeString::fromUTF8(icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  ustr.toLower(icu::Locale::getRoot());
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfd = icu::Normalizer2::getNFDInstance(status);
  if (U_SUCCESS(status)) {
    icu::UnicodeString decomposed = nfd->normalize(ustr, status);
    if (U_SUCCESS(status)) ustr = std::move(decomposed);
  }

  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
  };
  bool question = false;
  for (int32_t i = 0; i < ustr.length(); i = ustr.moveIndex32(i, 1)) {
    UChar32 c = ustr.char32At(i);
    if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) {
      current.push_back(static_cast<char>(c));
    } else if (u_charType(c) == U_NON_SPACING_MARK) {
      continue;
    } else if (const char* folded = ascii_fold(c)) {
      current += folded;
    } else {
      if (c == '?') question = true;
      flush();
    }
  }
  flush();
  if (saw_question_mark) *saw_question_mark = question;
  return tokens;
}

NormalizedQuery normalize(std::string_view query, const NormalizationConfig& config) {
  NormalizedQuery out;
  out.original = std::string(query);
  for (auto& token : fold_tokens(query, &out.has_question_mark)) {
    if (!config.stopwords.contains(token)) out.terms.push_back(std::move(token));
  }
  return out;
}

void NormalizationConfig::add_stopwords(std::istream& in, const std::string& source) {
  std::size_t added = 0;
  std::string line;
  while (std::getline(in, line)) {
    std::string_view word = trim(chomp(line));
    if (word.empty() || word.front() == '#') continue;
    for (auto& token : fold_tokens(word)) {
      stopwords.insert(std::move(token));
      ++added;
    }
  }
  if (added == 0) throw DataError(source + ": stopword list is empty");
}

NormalizationConfig NormalizationConfig::from_directory(const std::filesystem::path& dir,
                                                        std::vector<std::string> languages) {
  if (languages.empty()) throw DataError("no stopword languages configured");
  NormalizationConfig config;
  config.languages = std::move(languages);
  for (const auto& lang : config.languages) {
    auto path = dir / (lang + ".txt");
    std::ifstream in(path);
    if (!in) throw IoError(path.string() + ": cannot open stopword file");
    config.add_stopwords(in, path.string());
  }
  return config;
}

bool is_navigational(const NormalizedQuery& query, const std::set<std::string>& clicked_hosts) {
  for (const auto& term : query.terms) {
    for (const auto& host : clicked_hosts) {
      if (host.find(term) != std::string::npos) return true;
    }
  }
  return false;
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t up = row[j];
      std::size_t sub = diag + (a[i - 1] == b[j - 1] ? 0 : 1);
      row[j] = std::min({up + 1, row[j - 1] + 1, sub});
      diag = up;
    }
  }
  return row[b.size()];
}

bool is_wiki_query(const NormalizedQuery& query) {
  constexpr std::string_view kWikipedia = "wikipedia";
  for (const auto& term : query.terms) {
    if (term == "wiki") return true;
    // Length gap alone bounds the distance; skip the DP for far-off tokens.
    std::size_t gap = term.size() > kWikipedia.size() ? term.size() - kWikipedia.size() : kWikipedia.size() - term.size();
    if (gap <= 3 && levenshtein(term, kWikipedia) <= 3) return true;
  }
  return false;
}

bool is_wikipedia_host(std::string_view hostname) {
  return hostname == "wikipedia.org" || ends_with(hostname, ".wikipedia.org");
}

std::vector<NormalizedRecord> normalize_records(const std::vector<RawLogRecord>& records,
                                                const NormalizationConfig& config) {
  std::vector<NormalizedRecord> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    NormalizedQuery q = normalize(r.query, config);
    if (q.empty()) continue;
    out.push_back({std::move(q), r.hostname, r.count});
  }
  return out;
}

void write_normalized(std::ostream& out, const std::vector<NormalizedRecord>& records) {
  for (const auto& r : records) {
    out << r.query.joined() << '\t' << (r.query.has_question_mark ? '1' : '0') << '\t' << r.hostname << '\t'
        << r.count << '\n';
  }
}

std::vector<NormalizedRecord> read_normalized(std::istream& in, const std::string& source) {
  std::vector<NormalizedRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view = chomp(line);
    if (view.empty()) continue;
    auto fields = split(view, '\t');
    auto fail = [&](const std::string& why) {
      return DataError(source + ":" + std::to_string(lineno) + ": " + why);
    };
    if (fields.size() != 4) throw fail("expected 4 TAB-separated fields");
    if (fields[1] != "0" && fields[1] != "1") throw fail("question-mark flag must be 0 or 1");
    std::uint64_t count = 0;
    auto [ptr, ec] = std::from_chars(fields[3].data(), fields[3].data() + fields[3].size(), count);
    if (ec != std::errc() || ptr != fields[3].data() + fields[3].size() || count < 1) throw fail("invalid count");
    NormalizedRecord rec;
    rec.query.terms = split_whitespace(fields[0]);
    rec.query.original = fields[0];
    rec.query.has_question_mark = fields[1] == "1";
    if (rec.query.empty() || fields[2].empty()) throw fail("empty query or hostname");
    rec.hostname = std::move(fields[2]);
    rec.count = count;
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace enq::querylog
