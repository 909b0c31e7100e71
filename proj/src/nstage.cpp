#include "nlda/nstage.hpp"

#include "nlda/error.hpp"

#include <fmt/format.h>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <numeric>

namespace nlda {

double topic_threshold(std::span<const double> weights) {
  if (weights.empty()) throw InputError("empty topic");
  double sum = 0.0;
  for (double w : weights) sum += w;
  return sum / static_cast<double>(weights.size());
}

std::vector<WordId> survivors_for_topic(std::span<const double> phi_row,
                                        std::span<const WordId> support) {
  if (support.empty()) throw InputError("empty topic");
  std::vector<double> weights;
  weights.reserve(support.size());
  for (WordId w : support) {
    if (w >= phi_row.size()) {
      throw InputError(fmt::format("support word id {} outside row of size {}",
                                   w, phi_row.size()));
    }
    weights.push_back(phi_row[w]);
  }
  const double threshold = topic_threshold(weights);
  std::vector<WordId> out;
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (!(weights[i] < threshold)) out.push_back(support[i]);
  }
  // Rounding in the mean can put it a hair above a constant row.
  if (out.empty()) {
    const auto it = std::max_element(weights.begin(), weights.end());
    out.push_back(support[static_cast<std::size_t>(it - weights.begin())]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<WordId> topic_support(const TopicModel& model,
                                  const GibbsState& state, std::size_t k,
                                  std::size_t top_n) {
  std::vector<WordId> support;
  const auto counts = state.topic_word.row(k);
  for (WordId w = 0; w < counts.size(); ++w) {
    if (counts[w] > 0) support.push_back(w);
  }
  if (top_n > 0 && support.size() > top_n) {
    const auto row = model.phi.row(k);
    std::stable_sort(support.begin(), support.end(),
                     [&](WordId a, WordId b) { return row[a] > row[b]; });
    support.resize(top_n);
    std::sort(support.begin(), support.end());
  }
  return support;
}

namespace {

struct Rebuild {
  Vocabulary vocabulary;
  std::vector<double> thresholds;
};

Rebuild rebuild_with_thresholds(const TopicModel& model,
                                const GibbsState& state, std::size_t top_n) {
  const auto V = model.vocabulary.size();
  if (state.topic_word.rows() != model.num_topics() ||
      state.topic_word.cols() != V) {
    throw InputError("Gibbs state does not match the model");
  }
  std::vector<bool> keep(V, false);
  std::vector<double> thresholds(model.num_topics(), 0.0);
  bool any_support = false;
  for (std::size_t k = 0; k < model.num_topics(); ++k) {
    const auto support = topic_support(model, state, k, top_n);
    if (support.empty()) continue;
    any_support = true;
    const auto row = model.phi.row(k);
    std::vector<double> weights;
    for (WordId w : support) weights.push_back(row[w]);
    thresholds[k] = topic_threshold(weights);
    for (WordId w : survivors_for_topic(row, support)) keep[w] = true;
  }
  if (!any_support) {
    throw InternalError("every topic has an empty support");
  }
  std::vector<std::string> words;
  for (WordId w = 0; w < V; ++w) {
    if (keep[w]) words.push_back(model.vocabulary.word(w));
  }
  return {Vocabulary(std::move(words)), std::move(thresholds)};
}

}  // namespace

Vocabulary rebuild_dictionary(const TopicModel& model, const GibbsState& state,
                              std::size_t top_n_support) {
  return rebuild_with_thresholds(model, state, top_n_support).vocabulary;
}

std::string to_json_line(const StageReport& r) {
  nlohmann::ordered_json j;
  j["stage"] = r.stage_index;
  j["vocab_size_before"] = r.vocab_size_before;
  j["vocab_size_after"] = r.vocab_size_after;
  j["per_topic_threshold"] = r.per_topic_threshold;
  j["deleted_words"] = r.deleted_words;
  j["model_perplexity"] = r.model_perplexity;
  j["emptied_doc_count"] = r.emptied_doc_count;
  return j.dump();
}

void NStageConfig::validate() const {
  if (stages == 0) throw InputError("number of stages must be >= 1");
  lda.validate();
}

NStageResult run_nstage(const Corpus& corpus, const NStageConfig& config,
                        const StageObserver& observer) {
  config.validate();
  std::vector<StageReport> reports;

  auto run_stage = [&](Corpus stage_corpus, std::size_t stage,
                       StageReport report) {
    LdaConfig lda = config.lda;
    lda.seed = config.lda.seed + (stage - 1);
    FitResult result = fit(stage_corpus, lda);
    report.stage_index = stage;
    report.vocab_size_after = stage_corpus.vocabulary().size();
    report.emptied_doc_count = stage_corpus.empty_document_count();
    report.model_perplexity = stage_corpus.token_count() > 0
                                  ? perplexity(result.model, stage_corpus)
                                  : 0.0;
    spdlog::info("stage {}: vocabulary {} -> {}, perplexity {:.4f}", stage,
                 report.vocab_size_before, report.vocab_size_after,
                 report.model_perplexity);
    reports.push_back(std::move(report));
    if (observer) observer({stage_corpus, result, reports.back()});
    return NStageResult{std::move(stage_corpus), std::move(result), {}};
  };

  StageReport first;
  first.vocab_size_before = corpus.vocabulary().size();
  NStageResult current = run_stage(corpus, 1, std::move(first));

  for (std::size_t stage = 2; stage <= config.stages; ++stage) {
    const auto& prev = current.fit;
    Rebuild rebuilt =
        rebuild_with_thresholds(prev.model, prev.state, config.top_n_support);
    if (rebuilt.vocabulary.empty()) {
      throw InternalError("dictionary pruning removed every word");
    }
    StageReport report;
    report.vocab_size_before = prev.model.vocabulary.size();
    report.per_topic_threshold = std::move(rebuilt.thresholds);
    for (const auto& w : prev.model.vocabulary.words()) {
      if (!rebuilt.vocabulary.contains(w)) report.deleted_words.push_back(w);
    }
    Corpus next = reencode(current.corpus, rebuilt.vocabulary);
    current = run_stage(std::move(next), stage, std::move(report));
  }
  current.reports = std::move(reports);
  return current;
}

}  // namespace nlda
