#include "enq/labeler.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>

#include "enq/rng.hpp"

namespace enq::labeler {

void LabelingConfig::validate() const {
  if (!(tau_note >= 0.0 && tau_e <= 1.0 && tau_note < tau_e))
    throw DataError("labeling thresholds must satisfy 0 <= tau_ne < tau_e <= 1");
  if (min_wiki_clicks < 1) throw DataError("min_wiki_clicks must be >= 1");
}

ProfileMap aggregate(const std::vector<NormalizedRecord>& records) {
  ProfileMap profiles;
  for (const auto& r : records) {
    if (r.query.empty() || r.count == 0) continue;
    std::string key = r.query.joined();
    auto [it, inserted] = profiles.try_emplace(key);
    ClickProfile& p = it->second;
    if (inserted) {
      p.query.terms = r.query.terms;
      p.query.original = key;
    }
    p.query.has_question_mark = p.query.has_question_mark || r.query.has_question_mark;
    if (querylog::is_wikipedia_host(r.hostname))
      p.wiki_clicks += r.count;
    else
      p.other_clicks += r.count;
    p.hosts.insert(r.hostname);
  }
  return profiles;
}

void merge_into(ProfileMap& into, const ProfileMap& from) {
  for (const auto& [key, p] : from) {
    auto [it, inserted] = into.try_emplace(key, p);
    if (inserted) continue;
    ClickProfile& q = it->second;
    q.wiki_clicks += p.wiki_clicks;
    q.other_clicks += p.other_clicks;
    q.hosts.insert(p.hosts.begin(), p.hosts.end());
    q.query.has_question_mark = q.query.has_question_mark || p.query.has_question_mark;
  }
}

double ratio(const ClickProfile& profile) {
  if (profile.total() == 0) throw UndefinedProfileError("click profile '" + profile.query.joined() + "' has no clicks");
  return static_cast<double>(profile.wiki_clicks) / static_cast<double>(profile.total());
}

std::optional<LabeledQuery> label(const ClickProfile& profile, const LabelingConfig& config) {
  double r = ratio(profile);
  if (r >= config.tau_e) return LabeledQuery{profile.query, Label::E, profile.wiki_clicks};
  if (r <= config.tau_note) return LabeledQuery{profile.query, Label::NotE, profile.wiki_clicks};
  return std::nullopt;
}

Dataset build_dataset(const ProfileMap& profiles, const LabelingConfig& config) {
  config.validate();
  Dataset out;
  std::vector<const ClickProfile*> positives;
  std::vector<const ClickProfile*> negatives;
  for (const auto& [key, p] : profiles) {
    if (p.total() == 0) continue;
    auto labeled = label(p, config);
    if (!labeled) {
      out.unlabeled.push_back(p);
      continue;
    }
    if (labeled->label == Label::E) {
      if (p.wiki_clicks >= config.min_wiki_clicks && !querylog::is_wiki_query(p.query)) positives.push_back(&p);
    } else if (!querylog::is_navigational(p.query, p.hosts)) {
      negatives.push_back(&p);
    }
  }
  out.positive_pool = positives.size();
  out.negative_pool = negatives.size();
  if (negatives.size() < positives.size()) {
    throw InsufficientNegativesError("need " + std::to_string(positives.size()) + " negatives but only " +
                                     std::to_string(negatives.size()) + " eligible");
  }

  Rng rng(config.seed);
  // Partial Fisher-Yates: the first |positives| slots are a uniform sample
  // without replacement.
  for (std::size_t i = 0; i < positives.size(); ++i) {
    std::size_t j = i + rng.below(negatives.size() - i);
    std::swap(negatives[i], negatives[j]);
  }
  for (const ClickProfile* p : positives) out.examples.push_back({p->query, Label::E, p->wiki_clicks});
  for (std::size_t i = 0; i < positives.size(); ++i)
    out.examples.push_back({negatives[i]->query, Label::NotE, negatives[i]->wiki_clicks});
  rng.shuffle(out.examples);
  return out;
}

void write_dataset(std::ostream& out, const std::vector<LabeledQuery>& examples) {
  for (const auto& ex : examples) {
    out << label_code(ex.label) << '\t' << ex.query.joined() << '\t' << (ex.query.has_question_mark ? '1' : '0')
        << '\t' << ex.wiki_clicks << '\n';
  }
}

std::vector<LabeledQuery> read_dataset(std::istream& in, const std::string& source) {
  std::vector<LabeledQuery> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view = chomp(line);
    if (view.empty()) continue;
    auto fields = split(view, '\t');
    auto where = source + ":" + std::to_string(lineno) + ": ";
    if (fields.size() != 4) throw DataError(where + "expected 4 TAB-separated fields");
    LabeledQuery ex;
    try {
      ex.label = parse_label_code(fields[0]);
    } catch (const DataError& e) {
      throw DataError(where + e.what());
    }
    ex.query.terms = split_whitespace(fields[1]);
    ex.query.original = fields[1];
    if (ex.query.empty()) throw DataError(where + "empty query");
    if (fields[2] != "0" && fields[2] != "1") throw DataError(where + "question-mark flag must be 0 or 1");
    ex.query.has_question_mark = fields[2] == "1";
    auto [ptr, ec] = std::from_chars(fields[3].data(), fields[3].data() + fields[3].size(), ex.wiki_clicks);
    if (ec != std::errc() || ptr != fields[3].data() + fields[3].size()) throw DataError(where + "invalid wiki_clicks");
    out.push_back(std::move(ex));
  }
  return out;
}

void write_unlabeled(std::ostream& out, const std::vector<ClickProfile>& profiles) {
  char buf[32];
  for (const auto& p : profiles) {
    std::snprintf(buf, sizeof buf, "%.6f", ratio(p));
    out << p.query.joined() << '\t' << p.wiki_clicks << '\t' << p.other_clicks << '\t' << buf << '\n';
  }
}

}  // namespace enq::labeler
