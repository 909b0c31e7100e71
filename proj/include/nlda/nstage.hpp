#pragma once

#include "nlda/corpus.hpp"
#include "nlda/inference.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace nlda {

/// Mean of a topic's word weights. Throws InputError("empty topic") for an
/// empty span.
double topic_threshold(std::span<const double> weights);

/// Words of `support` whose weight in `phi_row` is at least the mean weight
/// over `support`. Sub-threshold words are deleted; ties survive, so the
/// result always contains the row maximum. Returned ids are ascending.
std::vector<WordId> survivors_for_topic(std::span<const double> phi_row,
                                        std::span<const WordId> support);

/// Words assigned to topic `k` at least once, ascending. When `top_n` is
/// non-zero the support is cut down to the `top_n` heaviest of them
/// (ties by ascending id).
std::vector<WordId> topic_support(const TopicModel& model,
                                  const GibbsState& state, std::size_t k,
                                  std::size_t top_n = 0);

/// Union of every topic's survivors, in the old vocabulary's id order.
Vocabulary rebuild_dictionary(const TopicModel& model, const GibbsState& state,
                              std::size_t top_n_support = 0);

struct StageReport {
  std::size_t stage_index = 1;
  std::size_t vocab_size_before = 0;
  std::size_t vocab_size_after = 0;
  /// Thresholds that produced this stage's deletions; empty for stage 1.
  std::vector<double> per_topic_threshold;
  std::vector<std::string> deleted_words;
  double model_perplexity = 0.0;
  std::size_t emptied_doc_count = 0;
};

/// One JSON object on a single line.
std::string to_json_line(const StageReport& report);

struct NStageConfig {
  std::size_t stages = 1;
  LdaConfig lda;
  /// 0 thresholds over the full assigned support of each topic.
  std::size_t top_n_support = 0;

  void validate() const;
};

/// Everything a single stage produced, handed to the stage observer.
struct StageOutcome {
  const Corpus& corpus;
  const FitResult& fit;
  const StageReport& report;
};

struct NStageResult {
  Corpus corpus;  // final stage encoding
  FitResult fit;
  std::vector<StageReport> reports;
};

using StageObserver = std::function<void(const StageOutcome&)>;

/// Stage 1 fits the input corpus; each later stage prunes the dictionary of
/// the previous fit, re-encodes the corpus and fits again with seed
/// base + (stage - 1).
NStageResult run_nstage(const Corpus& corpus, const NStageConfig& config,
                        const StageObserver& observer = {});

}  // namespace nlda
