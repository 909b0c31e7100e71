#pragma once

#include "nlda/corpus.hpp"
#include "nlda/inference.hpp"

#include <cstddef>
#include <filesystem>
#include <ostream>
#include <string_view>

namespace nlda {

enum class ArffMode {
  /// One row per document: its theta row plus the true class label.
  DocumentTopics,
  /// One row per topic: its phi row over the vocabulary, no class.
  TopicWords,
};

ArffMode parse_arff_mode(std::string_view name);

/// Writes `@RELATION nstage_lda`. In DocumentTopics mode the corpus must be
/// labeled (InputError otherwise) and row order follows document order.
/// Values are printed with 6 decimals.
void export_arff(const TopicModel& model, const Corpus& corpus,
                 std::ostream& out, ArffMode mode = ArffMode::DocumentTopics);
void export_arff(const TopicModel& model, const Corpus& corpus,
                 const std::filesystem::path& path,
                 ArffMode mode = ArffMode::DocumentTopics);

/// Tab-separated `topic  word  weight` rows: for each topic its `top_m`
/// heaviest words (ties by word id), weights with 6 decimals.
void export_topics(const TopicModel& model, std::size_t top_m,
                   std::ostream& out);
void export_topics(const TopicModel& model, std::size_t top_m,
                   const std::filesystem::path& path);

}  // namespace nlda
