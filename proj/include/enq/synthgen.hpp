#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace enq::synthgen {

struct SynthConfig {
  std::uint64_t seed = 7;
  std::size_t n_encyclopedic = 200;  // R_w = 1, built from KB article titles
  std::size_t n_other = 200;         // R_w = 0, vocabulary disjoint from the KB
  std::size_t n_mixed = 50;          // R_w = 0.5
  std::size_t kb_vocab_size = 500;
};

/// Output locations of generate(). `files` lists every written file relative
/// to `root`.
struct SynthManifest {
  std::filesystem::path root;
  std::filesystem::path log;        // click log (querylog format)
  std::filesystem::path stopwords;  // directory of <lang>.txt
  std::filesystem::path snapshot;   // KB snapshot directory
  std::filesystem::path serp;       // cached SERP rankings for every labeled query
  std::vector<std::filesystem::path> files;
};

/// Writes a click log, stopword lists, a KB snapshot and a SERP cache under
/// `out`. Output depends only on the config. Throws IoError if `out` cannot
/// be written.
SynthManifest generate(const SynthConfig& config, const std::filesystem::path& out);

}  // namespace enq::synthgen
