#include "enq/kb.hpp"

#include <cctype>
#include <deque>
#include <fstream>
#include <stdexcept>

#include "enq/common.hpp"

namespace enq::kb {

std::string_view to_string(PageType type) {
  switch (type) {
    case PageType::Article: return "article";
    case PageType::Disambiguation: return "disambiguation";
    case PageType::Category: return "category";
  }
  return "article";
}

std::string_view to_string(Language lang) {
  switch (lang) {
    case Language::Pt: return "pt";
    case Language::En: return "en";
    case Language::Es: return "es";
  }
  return "en";
}

std::optional<PageType> parse_page_type(std::string_view text) {
  for (auto t : kPageTypes)
    if (to_string(t) == text) return t;
  return std::nullopt;
}

std::optional<Language> parse_language(std::string_view text) {
  for (auto l : kLanguages)
    if (to_string(l) == text) return l;
  return std::nullopt;
}

void CategoryGraph::add_parent(const std::string& child, const std::string& parent) {
  nodes.insert(child);
  nodes.insert(parent);
  parent_edges[child].insert(parent);
}

void CategoryGraph::add_article_category(const std::string& article, const std::string& category) {
  nodes.insert(article);
  nodes.insert(category);
  article_categories[article].insert(category);
}

std::set<std::string> expand_categories(const CategoryGraph& graph, const std::string& article_key, int depth) {
  if (depth < 1) throw std::invalid_argument("expand_categories: depth must be >= 1");
  std::set<std::string> visited;
  auto start = graph.article_categories.find(article_key);
  if (start == graph.article_categories.end()) return visited;

  std::vector<std::string> frontier;
  for (const auto& c : start->second)
    if (visited.insert(c).second) frontier.push_back(c);
  for (int level = 2; level <= depth && !frontier.empty(); ++level) {
    std::vector<std::string> next;
    for (const auto& node : frontier) {
      auto it = graph.parent_edges.find(node);
      if (it == graph.parent_edges.end()) continue;
      for (const auto& parent : it->second)
        if (visited.insert(parent).second) next.push_back(parent);
    }
    frontier = std::move(next);
  }
  return visited;
}

std::string category_id(std::string_view name) { return join(querylog::fold_tokens(name), "_"); }

std::string sanitize_label(std::string_view text) {
  std::string out;
  bool pending = false;
  for (char ch : trim(text)) {
    if (std::isspace(static_cast<unsigned char>(ch))) {
      pending = true;
      continue;
    }
    if (pending) out.push_back('_');
    pending = false;
    out.push_back(ch);
  }
  return out;
}

void EntityIndex::add(const std::vector<std::string>& terms, std::string original, std::string category) {
  auto before = names.size();
  auto id = names.add(terms, std::move(original));
  // First occurrence of a name wins.
  if (id && names.size() > before) top_category.push_back(std::move(category));
}

std::optional<EntityMatch> entity_search(const EntityIndex& index, const querylog::NormalizedQuery& query) {
  auto match = index.names.best_match(query.terms, TermSetIndex::TieBreak::Lexicographic);
  if (!match) return std::nullopt;
  return EntityMatch{index.names.entry(match->id).key, index.top_category[match->id], match->score};
}

const TitleList* KBSnapshot::titles(PageType type, Language lang) const {
  for (const auto& list : title_lists)
    if (list.page_type == type && list.language == lang) return &list;
  return nullptr;
}

namespace {

struct Manifest {
  std::map<std::string, std::filesystem::path> entries;
  std::filesystem::path path;

  const std::filesystem::path& require(const std::string& key) const {
    auto it = entries.find(key);
    if (it == entries.end()) throw LoadError(key + ": missing manifest entry in " + path.string());
    if (!std::filesystem::is_regular_file(it->second)) throw LoadError(key + ": not found: " + it->second.string());
    return it->second;
  }
};

bool known_key(const std::string& key) {
  static const std::set<std::string> fixed{"graph.edges", "graph.article_cats", "ontology", "entities",
                                           "lexicon",     "gazetteer.places",   "gazetteer.latin_suffixes"};
  if (fixed.contains(key)) return true;
  auto parts = split(key, '.');
  if (parts.size() == 3 && parts[0] == "titles") return parse_page_type(parts[1]) && parse_language(parts[2]);
  if (parts.size() == 3 && parts[0] == "gazetteer" && parts[1] == "months") return parse_language(parts[2]).has_value();
  if (parts.size() == 2 && parts[0] == "stopwords") return !parts[1].empty();
  return false;
}

Manifest read_manifest(const std::filesystem::path& dir) {
  Manifest m;
  m.path = dir / kManifestName;
  std::ifstream in(m.path);
  if (!in) throw LoadError("manifest: not found: " + m.path.string());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view = trim(chomp(line));
    if (view.empty() || view.front() == '#') continue;
    auto where = m.path.string() + ":" + std::to_string(lineno) + ": ";
    auto eq = view.find('=');
    if (eq == std::string_view::npos) throw LoadError(where + "expected key = value");
    std::string key(trim(view.substr(0, eq)));
    std::string_view value = trim(view.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    if (!known_key(key)) throw LoadError(where + "unknown manifest key '" + key + "'");
    if (value.empty()) throw LoadError(where + "empty path for '" + key + "'");
    if (m.entries.contains(key)) {
      if (key.starts_with("titles.")) throw LoadError(where + "duplicate title list '" + key + "'");
      throw LoadError(where + "duplicate manifest key '" + key + "'");
    }
    std::filesystem::path p(value);
    m.entries.emplace(key, p.is_absolute() ? p : dir / p);
  }
  return m;
}

/// Calls fn(fields, where) for each non-empty line, checking the field count.
template <typename Fn>
void for_each_row(const std::filesystem::path& path, std::size_t fields_expected, Fn&& fn) {
  std::ifstream in(path);
  if (!in) throw LoadError(path.string() + ": cannot open");
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view = chomp(line);
    if (trim(view).empty()) continue;
    auto where = path.string() + ":" + std::to_string(lineno) + ": ";
    auto fields = fields_expected == 1 ? std::vector<std::string>{std::string(trim(view))} : split(view, '\t');
    if (fields.size() != fields_expected)
      throw LoadError(where + "expected " + std::to_string(fields_expected) + " TAB-separated fields");
    for (auto& f : fields) f = std::string(trim(f));
    for (const auto& f : fields)
      if (f.empty()) throw LoadError(where + "empty field");
    fn(fields, where);
  }
}

std::set<std::string> split_labels(const std::string& field, const std::string& where) {
  std::set<std::string> out;
  for (const auto& part : split(field, ',')) {
    std::string label = sanitize_label(part);
    if (label.empty()) throw LoadError(where + "empty class or category");
    out.insert(std::move(label));
  }
  return out;
}

}  // namespace

KBSnapshot load_snapshot(const std::filesystem::path& dir, std::optional<querylog::NormalizationConfig> normalization) {
  Manifest manifest = read_manifest(dir);
  KBSnapshot snap;

  if (normalization) {
    snap.normalization = std::move(*normalization);
  } else {
    snap.normalization.languages.clear();
    for (const auto& [key, path] : manifest.entries) {
      if (!key.starts_with("stopwords.")) continue;
      std::ifstream in(manifest.require(key));
      snap.normalization.languages.push_back(key.substr(std::string_view("stopwords.").size()));
      snap.normalization.add_stopwords(in, path.string());
    }
  }
  const auto& norm = snap.normalization;
  auto key_of = [&](std::string_view text) { return querylog::normalize(text, norm).terms; };

  for (auto type : kPageTypes) {
    for (auto lang : kLanguages) {
      std::string key = "titles." + std::string(to_string(type)) + "." + std::string(to_string(lang));
      TitleList list;
      list.page_type = type;
      list.language = lang;
      for_each_row(manifest.require(key), 1, [&](const std::vector<std::string>& f, const std::string&) {
        list.titles.add(key_of(f[0]), f[0]);
      });
      snap.title_lists.push_back(std::move(list));
    }
  }

  for_each_row(manifest.require("graph.edges"), 2, [&](const std::vector<std::string>& f, const std::string& where) {
    auto child = category_id(f[0]);
    auto parent = category_id(f[1]);
    if (child.empty() || parent.empty()) throw LoadError(where + "category name folds to nothing");
    snap.graph.add_parent(child, parent);
  });
  for_each_row(manifest.require("graph.article_cats"), 2,
               [&](const std::vector<std::string>& f, const std::string& where) {
                 auto article = join(key_of(f[0]), " ");
                 auto category = category_id(f[1]);
                 if (article.empty() || category.empty()) throw LoadError(where + "name folds to nothing");
                 snap.graph.add_article_category(article, category);
               });

  for_each_row(manifest.require("ontology"), 2, [&](const std::vector<std::string>& f, const std::string& where) {
    auto article = join(key_of(f[0]), " ");
    if (article.empty()) throw LoadError(where + "title folds to nothing");
    auto classes = split_labels(f[1], where);
    snap.ontology.entries[article].insert(classes.begin(), classes.end());
  });

  for_each_row(manifest.require("entities"), 2, [&](const std::vector<std::string>& f, const std::string& where) {
    const std::string& cat = f[1];
    if (cat.size() < 2 || cat.front() != '/' || cat.back() != '/' || sanitize_label(cat) != cat)
      throw LoadError(where + "top category must look like /name/");
    snap.entities.add(key_of(f[0]), f[0], cat);
  });

  for_each_row(manifest.require("lexicon"), 2, [&](const std::vector<std::string>& f, const std::string& where) {
    auto word = join(querylog::fold_tokens(f[0]), " ");
    if (word.empty()) throw LoadError(where + "word folds to nothing");
    auto cats = split_labels(f[1], where);
    snap.lexicon.entries[word].insert(cats.begin(), cats.end());
  });

  for (auto lang : kLanguages) {
    auto& months = snap.gazetteer.months[lang];
    for_each_row(manifest.require("gazetteer.months." + std::string(to_string(lang))), 1,
                 [&](const std::vector<std::string>& f, const std::string&) {
                   for (auto& t : querylog::fold_tokens(f[0])) months.insert(std::move(t));
                 });
  }
  for_each_row(manifest.require("gazetteer.places"), 1, [&](const std::vector<std::string>& f, const std::string&) {
    auto key = join(key_of(f[0]), " ");
    if (!key.empty()) snap.gazetteer.place_terms.insert(std::move(key));
  });
  const auto& suffix_path = manifest.require("gazetteer.latin_suffixes");
  for_each_row(suffix_path, 1, [&](const std::vector<std::string>& f, const std::string&) {
    for (auto& t : querylog::fold_tokens(f[0])) snap.gazetteer.latin_suffixes.push_back(std::move(t));
  });
  if (snap.gazetteer.latin_suffixes.empty()) throw LoadError(suffix_path.string() + ": latin suffix list is empty");

  return snap;
}

}  // namespace enq::kb
