#include "planrag/corpus/document_index.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "planrag/error.hpp"
#include "planrag/textproc.hpp"

namespace planrag::corpus {
namespace {

std::string first_words(std::string_view text, std::size_t limit) {
  std::string out;
  std::size_t count = 0;
  std::size_t pos = 0;
  while (pos < text.size() && count < limit) {
    if (const auto ws = textproc::whitespace_length(text, pos); ws > 0) {
      pos += ws;
      continue;
    }
    const std::size_t start = pos;
    while (pos < text.size() && textproc::whitespace_length(text, pos) == 0) ++pos;
    if (!out.empty()) out.push_back(' ');
    out.append(text.substr(start, pos - start));
    ++count;
  }
  return out;
}

}  // namespace

DocumentIndex::DocumentIndex(std::vector<Document> docs, std::size_t snippet_tokens)
    : docs_(std::move(docs)), snippet_tokens_(snippet_tokens) {
  if (snippet_tokens_ == 0) throw Error(ErrorCode::kInvalidParams, "snippet length must be >= 1");
  std::set<std::string> ids;
  for (std::size_t d = 0; d < docs_.size(); ++d) {
    if (docs_[d].id.empty()) throw Error(ErrorCode::kInvalidParams, "document without an id");
    if (!ids.insert(docs_[d].id).second) throw Error(ErrorCode::kInvalidParams, "duplicate document id " + docs_[d].id);
    std::map<std::string, std::size_t> tf;
    for (auto& t : textproc::tokenize(docs_[d].title + "\n" + docs_[d].body)) ++tf[t];
    for (auto& [token, count] : tf) postings_[token].push_back({d, count});
  }
}

DocumentIndex DocumentIndex::load_directory(const std::filesystem::path& dir, std::size_t snippet_tokens) {
  if (!std::filesystem::is_directory(dir)) {
    throw Error(ErrorCode::kFileNotFound, "document directory " + dir.string() + " does not exist");
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  std::vector<Document> docs;
  for (const auto& path : files) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::kFileNotFound, "cannot read " + path.string());
    Document doc;
    doc.id = std::filesystem::relative(path, dir).generic_string();
    std::string line;
    std::getline(in, line);
    doc.title = textproc::trim(line);
    std::ostringstream body;
    if (std::getline(in, line)) {
      const std::string second = textproc::trim(line);
      if (second.rfind("http://", 0) == 0 || second.rfind("https://", 0) == 0) {
        doc.url = second;
      } else {
        body << line << "\n";
      }
    }
    body << in.rdbuf();
    doc.body = textproc::trim(body.str());
    if (doc.body.empty()) continue;
    docs.push_back(std::move(doc));
  }
  return DocumentIndex(std::move(docs), snippet_tokens);
}

DocumentIndex DocumentIndex::from_json(const nlohmann::json& j) {
  std::vector<Document> docs;
  for (const auto& d : j.at("docs")) {
    docs.push_back({d.at("id").get<std::string>(), d.value("title", ""), d.at("body").get<std::string>(),
                    d.value("url", "")});
  }
  return DocumentIndex(std::move(docs), j.value("snippet_tokens", kDefaultSnippetTokens));
}

nlohmann::json DocumentIndex::to_json() const {
  nlohmann::json docs = nlohmann::json::array();
  for (const auto& d : docs_) docs.push_back({{"id", d.id}, {"title", d.title}, {"body", d.body}, {"url", d.url}});
  return {{"snippet_tokens", snippet_tokens_}, {"docs", docs}};
}

double DocumentIndex::idf(const std::string& token) const {
  const auto it = postings_.find(token);
  if (it == postings_.end() || it->second.empty()) return 0.0;
  return std::log(1.0 + static_cast<double>(docs_.size()) / static_cast<double>(it->second.size()));
}

std::vector<backends::Snippet> DocumentIndex::search(std::string_view query, int k) const {
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1");
  std::vector<double> score(docs_.size(), 0.0);
  for (const auto& token : textproc::tokenize(query)) {
    const auto it = postings_.find(token);
    if (it == postings_.end()) continue;
    const double w = idf(token);
    for (const auto& p : it->second) score[p.doc] += static_cast<double>(p.tf) * w;
  }

  std::vector<std::size_t> hits;
  for (std::size_t d = 0; d < docs_.size(); ++d) {
    if (score[d] > 0.0) hits.push_back(d);
  }
  std::sort(hits.begin(), hits.end(), [&](std::size_t a, std::size_t b) {
    if (score[a] != score[b]) return score[a] > score[b];
    return docs_[a].id < docs_[b].id;
  });
  if (hits.size() > static_cast<std::size_t>(k)) hits.resize(static_cast<std::size_t>(k));

  std::vector<backends::Snippet> out;
  for (std::size_t i = 0; i < hits.size(); ++i) {
    const auto& doc = docs_[hits[i]];
    out.push_back({doc.id, doc.title, first_words(doc.body, snippet_tokens_), doc.url, static_cast<int>(i) + 1,
                   std::string(query)});
  }
  return out;
}

LocalSearchEngine::LocalSearchEngine(std::shared_ptr<const DocumentIndex> index) : index_(std::move(index)) {}

std::vector<backends::Snippet> LocalSearchEngine::do_search(std::string_view query, int k) {
  return index_->search(query, k);
}

}  // namespace planrag::corpus
