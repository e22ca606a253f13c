#include "enq/similarity.hpp"

#include <algorithm>
#include <stdexcept>

#include "enq/common.hpp"

namespace enq {

std::vector<std::string> distinct_terms(std::vector<std::string> terms) {
  std::sort(terms.begin(), terms.end());
  terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
  return terms;
}

namespace {

double dice_from_counts(std::size_t overlap, std::size_t a, std::size_t b) {
  return 2.0 * static_cast<double>(overlap) / static_cast<double>(a + b);
}

}  // namespace

double dice(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("dice: empty term sequence");
  auto sa = distinct_terms(a);
  auto sb = distinct_terms(b);
  std::size_t overlap = 0;
  auto ia = sa.begin();
  auto ib = sb.begin();
  while (ia != sa.end() && ib != sb.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++overlap;
      ++ia;
      ++ib;
    }
  }
  return dice_from_counts(overlap, sa.size(), sb.size());
}

std::optional<std::uint32_t> TermSetIndex::add(const std::vector<std::string>& terms, std::string original) {
  if (terms.empty()) return std::nullopt;
  std::string key = join(terms, " ");
  if (auto it = by_key_.find(key); it != by_key_.end()) return it->second;
  auto id = static_cast<std::uint32_t>(entries_.size());
  Entry e{key, std::move(original), distinct_terms(terms)};
  for (const auto& t : e.terms) postings_[t].push_back(id);
  by_key_.emplace(std::move(key), id);
  entries_.push_back(std::move(e));
  return id;
}

std::optional<std::uint32_t> TermSetIndex::find(const std::vector<std::string>& terms) const {
  auto it = by_key_.find(join(terms, " "));
  if (it == by_key_.end()) return std::nullopt;
  return it->second;
}

std::optional<TermSetIndex::Match> TermSetIndex::best_match(const std::vector<std::string>& probe,
                                                           TieBreak tie) const {
  auto query = distinct_terms(probe);
  if (query.empty()) return std::nullopt;
  std::unordered_map<std::uint32_t, std::size_t> overlap;
  for (const auto& t : query) {
    auto it = postings_.find(t);
    if (it == postings_.end()) continue;
    for (std::uint32_t id : it->second) ++overlap[id];
  }
  std::optional<Match> best;
  for (const auto& [id, count] : overlap) {
    double s = dice_from_counts(count, query.size(), entries_[id].terms.size());
    if (!best || s > best->score) {
      best = Match{id, s};
      continue;
    }
    if (s < best->score) continue;
    const std::string& cand = entries_[id].key;
    const std::string& cur = entries_[best->id].key;
    bool better = tie == TieBreak::Lexicographic
                      ? cand < cur
                      : cand.size() < cur.size() || (cand.size() == cur.size() && cand < cur);
    if (better) best = Match{id, s};
  }
  return best;
}

}  // namespace enq
