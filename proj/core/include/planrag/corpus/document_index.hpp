#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "planrag/backends/interfaces.hpp"

namespace planrag::corpus {

struct Document {
  std::string id;
  std::string title;
  std::string body;
  std::string url;

  bool operator==(const Document&) const = default;
};

/// Immutable tf-idf index over a document collection. Title and body are
/// both indexed with the shared tokenizer; no stemming.
class DocumentIndex {
 public:
  struct Posting {
    std::size_t doc = 0;  // position in docs()
    std::size_t tf = 0;

    bool operator==(const Posting&) const = default;
  };

  static constexpr std::size_t kDefaultSnippetTokens = 80;

  /// Throws INVALID_PARAMS on duplicate or empty ids.
  explicit DocumentIndex(std::vector<Document> docs, std::size_t snippet_tokens = kDefaultSnippetTokens);

  /// Plain-text files, one document each: first line title, optional second
  /// line URL (http:// or https://), remainder body. The id is the path
  /// relative to `dir`. Files are read in sorted path order.
  static DocumentIndex load_directory(const std::filesystem::path& dir,
                                      std::size_t snippet_tokens = kDefaultSnippetTokens);

  static DocumentIndex from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  /// Ranks documents by sum over query tokens of tf(token, doc) * idf(token)
  /// with idf = ln(1 + N / df). Zero-score documents are never returned;
  /// ties go to the smaller id. Snippet bodies are the first
  /// snippet_tokens whitespace-separated words of the document body.
  std::vector<backends::Snippet> search(std::string_view query, int k) const;

  double idf(const std::string& token) const;

  const std::vector<Document>& docs() const { return docs_; }
  const std::map<std::string, std::vector<Posting>>& postings() const { return postings_; }
  std::size_t snippet_tokens() const { return snippet_tokens_; }

 private:
  std::vector<Document> docs_;
  std::map<std::string, std::vector<Posting>> postings_;
  std::size_t snippet_tokens_;
};

/// SearchEngine adapter over a shared index.
class LocalSearchEngine : public backends::SearchEngine {
 public:
  explicit LocalSearchEngine(std::shared_ptr<const DocumentIndex> index);

 protected:
  std::vector<backends::Snippet> do_search(std::string_view query, int k) override;

 private:
  std::shared_ptr<const DocumentIndex> index_;
};

}  // namespace planrag::corpus
