#pragma once

#include "nlda/corpus.hpp"
#include "nlda/matrix.hpp"

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace nlda {

/// Parameters of the seeded LDA-style corpus generator.
///
/// Topic k owns `words_per_topic` words ("t<k>w<j>"); its generating
/// distribution puts an even mix of Dirichlet(1) and uniform weights on
/// them and spreads
/// `off_topic_mass` uniformly over the other topics' words. `noise_words`
/// extra words ("noise<j>") are drawn uniformly with probability
/// `noise_rate` per token and never belong to a topic.
///
/// Documents draw theta ~ Dirichlet(doc_alpha) and are labeled "c<k>"
/// with k the argmax of theta. With `pure_documents` each document instead
/// picks one topic uniformly and draws every non-noise token from it.
struct SyntheticSpec {
  std::size_t num_topics = 3;
  std::size_t words_per_topic = 10;
  std::size_t noise_words = 0;
  std::size_t num_docs = 200;
  std::size_t doc_length = 50;
  double doc_alpha = 0.1;
  double off_topic_mass = 0.02;
  double noise_rate = 0.0;
  bool pure_documents = false;
  std::uint64_t seed = 1;

  /// K=3, V=30, N=200, 50 tokens per document, alpha 0.1.
  static SyntheticSpec clean();
  /// K=3, 150 topic words plus 150 uniform noise words, N=400.
  static SyntheticSpec noisy();
  /// Two groups of documents over disjoint vocabularies, K=2.
  static SyntheticSpec disjoint();
  /// "clean", "noisy" or "disjoint"; throws InputError otherwise.
  static SyntheticSpec preset(std::string_view name);
};

struct SyntheticCorpus {
  std::vector<LabeledLine> lines;
  /// All generator words: topic words first, then noise words.
  std::vector<std::string> words;
  /// Generating topic-word distributions, K x words.size().
  Matrix<double> phi;
  std::vector<std::size_t> doc_class;
};

SyntheticCorpus generate_synthetic(const SyntheticSpec& spec);

/// `label<TAB>text` lines, LF endings.
void write_tsv(const SyntheticCorpus& corpus, std::ostream& out);

}  // namespace nlda
