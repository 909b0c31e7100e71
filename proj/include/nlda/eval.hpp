#pragma once

#include "nlda/corpus.hpp"
#include "nlda/inference.hpp"
#include "nlda/matrix.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nlda {

/// Argmax of a theta row; ties go to the lowest index.
std::size_t dominant_topic(std::span<const double> theta_row);

enum class LabelingMethod { Majority, Hungarian };

std::string_view to_string(LabelingMethod method);
/// Accepts "majority" or "hungarian"; throws InputError otherwise.
LabelingMethod parse_labeling_method(std::string_view name);

struct TopicLabeling {
  std::vector<std::string> topic_to_label;
  LabelingMethod method = LabelingMethod::Majority;
};

/// Topic -> class label mapping learned from labeled documents.
///
/// Majority: each topic takes the most frequent true label among the
/// documents it dominates (ties to the lexicographically smallest label);
/// topics that dominate no document take the most frequent label overall.
///
/// Hungarian: labels are assigned to distinct topics so that the number
/// of agreeing documents is maximal. Needs K >= label count; topics left
/// over when K exceeds the label count fall back to the majority rule.
///
/// Only labeled documents count. Throws InputError("labels required")
/// when the corpus carries no labels.
TopicLabeling label_topics(const TopicModel& model, const Corpus& corpus,
                           LabelingMethod method);

/// Same, for an explicit theta matrix (e.g. fold-in estimates).
TopicLabeling label_topics(const Matrix<double>& theta, const Corpus& corpus,
                           LabelingMethod method);

struct EvalResult {
  double accuracy = 0.0;
  /// Sorted class labels; rows of `confusion` are true labels, columns
  /// predicted labels, both in this order.
  std::vector<std::string> labels;
  Matrix<std::size_t> confusion;
  std::size_t evaluated = 0;
  std::size_t correct = 0;
};

EvalResult evaluate(const TopicModel& model, const Corpus& corpus,
                    const TopicLabeling& labeling);
EvalResult evaluate(const Matrix<double>& theta, const Corpus& corpus,
                    const TopicLabeling& labeling);

/// Aligned text table of the confusion matrix.
std::string format_confusion(const EvalResult& result);
std::string to_json(const EvalResult& result);

}  // namespace nlda
