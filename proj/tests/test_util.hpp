#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "enq/kb.hpp"
#include "enq/querylog.hpp"

namespace enq::testing {

namespace fs = std::filesystem;

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

fs::path data_dir();

/// Stopword lists shipped in data/stopwords.
querylog::NormalizationConfig default_normalization();

void write_text(const fs::path& path, const std::string& content);
std::string read_text(const fs::path& path);

/// Small hand-written snapshot: "Viking Age" (EN article), "Taoismo" (PT
/// article), the taoism -> chinese-philosophy -> philosophy -> humanities ->
/// knowledge category chain, "Depeche Mode" (/music/) and friends.
/// `skip_key` leaves one manifest entry out.
void write_fixture_snapshot(const fs::path& dir, const std::string& skip_key = "");

// Oracles. Deliberately naive and independent of the library code paths.

/// Dice on term sets via explicit de-duplication and linear scans.
double oracle_dice(const std::vector<std::string>& a, const std::vector<std::string>& b);

/// Union of nodes on every upward path of length <= depth that starts at one
/// of the article's categories, by exhaustive path enumeration.
std::set<std::string> oracle_bounded_paths(const std::map<std::string, std::set<std::string>>& parents,
                                           const std::set<std::string>& start, int depth);

}  // namespace enq::testing
