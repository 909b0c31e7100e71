#include "nlda/corpus.hpp"

#include "nlda/error.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <fstream>
#include <locale>

namespace nlda {

namespace {

// Invalid UTF-8 bytes decode to U+DC80..U+DCFF so encoding restores them.
constexpr char32_t kEscapeBase = 0xDC00;

std::u32string decode_utf8(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    std::size_t len = 0;
    char32_t cp = 0;
    if (b0 < 0x80) {
      len = 1;
      cp = b0;
    } else if ((b0 & 0xE0) == 0xC0) {
      len = 2;
      cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3;
      cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4;
      cp = b0 & 0x07;
    }
    bool ok = len > 0 && i + len <= s.size();
    for (std::size_t j = 1; ok && j < len; ++j) {
      const auto b = static_cast<unsigned char>(s[i + j]);
      if ((b & 0xC0) != 0x80) {
        ok = false;
      } else {
        cp = (cp << 6) | (b & 0x3F);
      }
    }
    if (ok && len > 1) {
      static constexpr char32_t kMinForLen[] = {0, 0, 0x80, 0x800, 0x10000};
      ok = cp >= kMinForLen[len] && cp <= 0x10FFFF &&
           !(cp >= 0xD800 && cp <= 0xDFFF);
    }
    if (!ok) {
      out.push_back(kEscapeBase + b0);
      ++i;
    } else {
      out.push_back(cp);
      i += len;
    }
  }
  return out;
}

bool is_escaped_byte(char32_t cp) {
  return cp >= kEscapeBase + 0x80 && cp <= kEscapeBase + 0xFF;
}

void append_utf8(std::string& out, char32_t cp) {
  if (is_escaped_byte(cp)) {
    out.push_back(static_cast<char>(cp - kEscapeBase));
  } else if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::string encode_utf8(std::u32string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char32_t cp : s) append_utf8(out, cp);
  return out;
}

// Character classification for non-ASCII letters goes through the wide
// ctype facet of a UTF-8 locale; wchar_t is UTF-32 on the supported targets.
const std::ctype<wchar_t>& wide_ctype() {
  static const std::locale loc = [] {
    for (const char* name : {"C.UTF-8", "C.utf8", "en_US.UTF-8"}) {
      try {
        return std::locale(name);
      } catch (const std::runtime_error&) {
      }
    }
    spdlog::warn("no UTF-8 locale available; non-ASCII case folding disabled");
    return std::locale::classic();
  }();
  return std::use_facet<std::ctype<wchar_t>>(loc);
}

char32_t to_lower(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= 'A' && cp <= 'Z') ? cp + ('a' - 'A') : cp;
  }
  if (is_escaped_byte(cp)) return cp;
  return static_cast<char32_t>(wide_ctype().tolower(static_cast<wchar_t>(cp)));
}

bool is_punct(char32_t cp) {
  if (is_escaped_byte(cp)) return false;
  if (cp < 0x80) {
    return (cp >= 0x21 && cp <= 0x2F) || (cp >= 0x3A && cp <= 0x40) ||
           (cp >= 0x5B && cp <= 0x60) || (cp >= 0x7B && cp <= 0x7E);
  }
  return wide_ctype().is(std::ctype_base::punct, static_cast<wchar_t>(cp));
}

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

}  // namespace

Vocabulary::Vocabulary(std::vector<std::string> words) {
  words_.reserve(words.size());
  for (auto& w : words) {
    if (index_.contains(w)) {
      throw InputError(fmt::format("duplicate word in vocabulary: '{}'", w));
    }
    index_.emplace(w, static_cast<WordId>(words_.size()));
    words_.push_back(std::move(w));
  }
}

WordId Vocabulary::add(std::string_view word) {
  if (auto it = index_.find(std::string(word)); it != index_.end()) {
    return it->second;
  }
  const auto id = static_cast<WordId>(words_.size());
  words_.emplace_back(word);
  index_.emplace(words_.back(), id);
  return id;
}

std::optional<WordId> Vocabulary::find(std::string_view word) const {
  if (auto it = index_.find(std::string(word)); it != index_.end()) {
    return it->second;
  }
  return std::nullopt;
}

Corpus::Corpus(Vocabulary vocabulary, std::vector<Document> documents)
    : vocabulary_(std::move(vocabulary)), documents_(std::move(documents)) {
  const auto v = vocabulary_.size();
  for (const auto& doc : documents_) {
    for (WordId w : doc.tokens) {
      if (w >= v) {
        throw InputError(fmt::format(
            "document '{}' has word id {} outside vocabulary of size {}",
            doc.source_id, w, v));
      }
    }
    token_count_ += doc.tokens.size();
    if (doc.label) {
      labels_.insert(*doc.label);
      ++labeled_count_;
    }
  }
}

std::size_t Corpus::empty_document_count() const {
  std::size_t n = 0;
  for (const auto& doc : documents_) n += doc.tokens.empty() ? 1 : 0;
  return n;
}

std::vector<std::string> Corpus::decode(std::size_t d) const {
  std::vector<std::string> out;
  for (WordId w : document(d).tokens) out.push_back(vocabulary_.word(w));
  return out;
}

void PipelineConfig::validate() const {
  if (min_token_len == 0) {
    throw InputError("min_token_len must be at least 1");
  }
  if (prefix_stem && *prefix_stem == 0) {
    throw InputError("prefix stem length must be at least 1");
  }
}

std::string prefix_stem(std::string_view token, std::size_t k) {
  if (k == 0) throw InputError("prefix stem length must be at least 1");
  const auto chars = decode_utf8(token);
  if (chars.size() <= k) return std::string(token);
  return encode_utf8(std::u32string_view(chars).substr(0, k));
}

std::vector<std::string> tokenize(std::string_view raw_text,
                                  const PipelineConfig& config) {
  config.validate();
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < raw_text.size()) {
    while (i < raw_text.size() && is_space(raw_text[i])) ++i;
    const std::size_t start = i;
    while (i < raw_text.size() && !is_space(raw_text[i])) ++i;
    if (start == i) break;

    std::u32string chars = decode_utf8(raw_text.substr(start, i - start));
    if (config.lowercase) {
      for (auto& c : chars) c = to_lower(c);
    }
    if (config.strip_punctuation) {
      std::erase_if(chars, is_punct);
    }
    if (chars.size() < config.min_token_len) continue;
    std::string token = encode_utf8(chars);
    if (config.stopwords.contains(token)) continue;
    if (config.prefix_stem && chars.size() > *config.prefix_stem) {
      token = encode_utf8(
          std::u32string_view(chars).substr(0, *config.prefix_stem));
    }
    tokens.push_back(std::move(token));
  }
  return tokens;
}

Corpus build_corpus(const std::vector<LabeledLine>& lines,
                    const PipelineConfig& config) {
  config.validate();
  if (lines.empty()) throw InputError("empty corpus: no input lines");

  Vocabulary vocab;
  std::vector<Document> docs;
  docs.reserve(lines.size());
  bool any_tokens = false;
  for (std::size_t n = 0; n < lines.size(); ++n) {
    Document doc;
    for (const auto& token : tokenize(lines[n].text, config)) {
      doc.tokens.push_back(vocab.add(token));
    }
    if (doc.tokens.empty() && config.drop_empty_docs) continue;
    any_tokens = any_tokens || !doc.tokens.empty();
    doc.label = lines[n].label;
    doc.source_id = fmt::format("line:{}", n + 1);
    docs.push_back(std::move(doc));
  }
  if (!any_tokens) {
    throw InputError("empty corpus: every document is empty after tokenization");
  }
  return Corpus(std::move(vocab), std::move(docs));
}

namespace {

Corpus remap(const Corpus& corpus, const Vocabulary& new_vocab, bool strict) {
  const auto& old_vocab = corpus.vocabulary();
  if (strict) {
    for (const auto& w : new_vocab.words()) {
      if (!old_vocab.contains(w)) {
        throw InputError(
            fmt::format("vocabulary not a subset: '{}' is not in the corpus", w));
      }
    }
  }
  constexpr auto kDropped = static_cast<WordId>(-1);
  std::vector<WordId> old_to_new(old_vocab.size(), kDropped);
  for (WordId w = 0; w < old_vocab.size(); ++w) {
    if (auto id = new_vocab.find(old_vocab.word(w))) old_to_new[w] = *id;
  }

  std::vector<Document> docs;
  docs.reserve(corpus.size());
  std::size_t emptied = 0;
  for (const auto& doc : corpus.documents()) {
    Document out{.tokens = {}, .label = doc.label, .source_id = doc.source_id};
    for (WordId w : doc.tokens) {
      if (old_to_new[w] != kDropped) out.tokens.push_back(old_to_new[w]);
    }
    if (out.tokens.empty() && !doc.tokens.empty()) ++emptied;
    docs.push_back(std::move(out));
  }
  if (emptied > 0) {
    spdlog::warn("{} document(s) became empty after re-encoding", emptied);
  }
  return Corpus(new_vocab, std::move(docs));
}

}  // namespace

Corpus reencode(const Corpus& corpus, const Vocabulary& new_vocab) {
  return remap(corpus, new_vocab, true);
}

Corpus project(const Corpus& corpus, const Vocabulary& vocab) {
  return remap(corpus, vocab, false);
}

std::vector<LabeledLine> read_labeled_lines(std::istream& in) {
  std::vector<LabeledLine> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (auto tab = line.find('\t'); tab != std::string::npos) {
      auto label = line.substr(0, tab);
      lines.push_back({label.empty() ? std::nullopt
                                     : std::optional<std::string>(label),
                       line.substr(tab + 1)});
    } else {
      lines.push_back({std::nullopt, line});
    }
  }
  return lines;
}

std::vector<LabeledLine> read_labeled_lines_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(fmt::format("cannot read corpus file '{}'", path));
  return read_labeled_lines(in);
}

std::set<std::string> read_stopwords_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(fmt::format("cannot read stopword file '{}'", path));
  std::set<std::string> words;
  std::string w;
  while (in >> w) words.insert(w);
  return words;
}

}  // namespace nlda
