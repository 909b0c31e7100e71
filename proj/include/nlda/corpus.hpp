#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace nlda {

using WordId = std::uint32_t;

/// Bidirectional word <-> id map. Ids are dense (0..size()-1) and follow
/// insertion order.
class Vocabulary {
 public:
  Vocabulary() = default;
  /// Throws InputError on duplicate words.
  explicit Vocabulary(std::vector<std::string> words);

  /// Returns the id of `word`, inserting it at the end when absent.
  WordId add(std::string_view word);
  std::optional<WordId> find(std::string_view word) const;
  bool contains(std::string_view word) const { return find(word).has_value(); }

  const std::string& word(WordId id) const { return words_.at(id); }
  const std::vector<std::string>& words() const { return words_; }
  std::size_t size() const { return words_.size(); }
  bool empty() const { return words_.empty(); }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.words_ == b.words_;
  }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, WordId> index_;
};

struct Document {
  std::vector<WordId> tokens;
  std::optional<std::string> label;
  std::string source_id;

  friend bool operator==(const Document&, const Document&) = default;
};

/// Id-encoded document collection. Immutable once constructed; the
/// constructor checks that every token id is inside the vocabulary.
class Corpus {
 public:
  Corpus(Vocabulary vocabulary, std::vector<Document> documents);

  const Vocabulary& vocabulary() const { return vocabulary_; }
  const std::vector<Document>& documents() const { return documents_; }
  const Document& document(std::size_t d) const { return documents_.at(d); }
  std::size_t size() const { return documents_.size(); }

  /// Distinct labels over all documents; empty when no document is labeled.
  const std::set<std::string>& labels() const { return labels_; }
  bool has_labels() const { return !labels_.empty(); }
  std::size_t labeled_count() const { return labeled_count_; }

  std::size_t token_count() const { return token_count_; }
  std::size_t empty_document_count() const;

  /// Token strings of document `d`.
  std::vector<std::string> decode(std::size_t d) const;

  friend bool operator==(const Corpus& a, const Corpus& b) {
    return a.vocabulary_ == b.vocabulary_ && a.documents_ == b.documents_;
  }

 private:
  Vocabulary vocabulary_;
  std::vector<Document> documents_;
  std::set<std::string> labels_;
  std::size_t labeled_count_ = 0;
  std::size_t token_count_ = 0;
};

struct PipelineConfig {
  bool lowercase = true;
  bool strip_punctuation = true;
  std::size_t min_token_len = 1;
  std::set<std::string> stopwords;
  /// Keep only the first k characters of each token; nullopt disables.
  std::optional<std::size_t> prefix_stem;
  bool drop_empty_docs = true;

  /// Throws InputError when min_token_len or the prefix length is zero.
  void validate() const;

  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

/// First `k` characters of a UTF-8 token (code points, not bytes).
std::string prefix_stem(std::string_view token, std::size_t k);

std::vector<std::string> tokenize(std::string_view raw_text,
                                  const PipelineConfig& config);

struct LabeledLine {
  std::optional<std::string> label;
  std::string text;
};

/// Tokenizes every line and assigns word ids in first-occurrence order.
/// Throws InputError("empty corpus") when every document ends up empty.
Corpus build_corpus(const std::vector<LabeledLine>& lines,
                    const PipelineConfig& config);

/// Re-encodes `corpus` against `new_vocab`, dropping tokens outside it.
/// Emptied documents are kept so document indices stay stable.
/// Throws InputError when `new_vocab` has a word the corpus never had.
Corpus reencode(const Corpus& corpus, const Vocabulary& new_vocab);

/// Like reencode, but words of `vocab` missing from the corpus are allowed.
/// Used to evaluate a model on text it was not trained on.
Corpus project(const Corpus& corpus, const Vocabulary& vocab);

/// Parses `label<TAB>text` or bare `text` lines; `#` lines and blank
/// lines are skipped.
std::vector<LabeledLine> read_labeled_lines(std::istream& in);
std::vector<LabeledLine> read_labeled_lines_file(const std::string& path);

std::set<std::string> read_stopwords_file(const std::string& path);

}  // namespace nlda
