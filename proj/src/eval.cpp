#include "nlda/eval.hpp"

#include "nlda/assignment.hpp"
#include "nlda/error.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <map>

namespace nlda {

std::size_t dominant_topic(std::span<const double> theta_row) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < theta_row.size(); ++k) {
    if (theta_row[k] > theta_row[best]) best = k;
  }
  return best;
}

std::string_view to_string(LabelingMethod method) {
  return method == LabelingMethod::Majority ? "majority" : "hungarian";
}

LabelingMethod parse_labeling_method(std::string_view name) {
  if (name == "majority") return LabelingMethod::Majority;
  if (name == "hungarian") return LabelingMethod::Hungarian;
  throw InputError(fmt::format("unknown labeling method '{}'", name));
}

namespace {

void check_shape(const Matrix<double>& theta, const Corpus& corpus) {
  if (theta.rows() != corpus.size()) {
    throw InputError(fmt::format("model has {} documents but the corpus has {}",
                                 theta.rows(), corpus.size()));
  }
}

// Label with the highest count; ties go to the earlier (smaller) label.
std::size_t argmax_count(std::span<const std::size_t> counts) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < counts.size(); ++i) {
    if (counts[i] > counts[best]) best = i;
  }
  return best;
}

}  // namespace

TopicLabeling label_topics(const Matrix<double>& theta, const Corpus& corpus,
                           LabelingMethod method) {
  check_shape(theta, corpus);
  if (!corpus.has_labels()) throw InputError("labels required");

  const std::vector<std::string> labels(corpus.labels().begin(),
                                        corpus.labels().end());
  std::map<std::string, std::size_t> label_index;
  for (std::size_t i = 0; i < labels.size(); ++i) label_index[labels[i]] = i;

  const std::size_t K = theta.cols();
  const std::size_t L = labels.size();
  Matrix<std::size_t> agreement(K, L);
  std::vector<std::size_t> label_totals(L, 0);
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    const auto& label = corpus.document(d).label;
    if (!label) continue;
    const auto l = label_index.at(*label);
    ++agreement(dominant_topic(theta.row(d)), l);
    ++label_totals[l];
  }
  const std::size_t global_majority = argmax_count(label_totals);

  auto majority_label = [&](std::size_t k) {
    const auto row = agreement.row(k);
    const bool owns_docs =
        std::any_of(row.begin(), row.end(), [](std::size_t c) { return c > 0; });
    return owns_docs ? argmax_count(row) : global_majority;
  };

  TopicLabeling out{.topic_to_label = std::vector<std::string>(K),
                    .method = method};
  if (method == LabelingMethod::Majority) {
    for (std::size_t k = 0; k < K; ++k) out.topic_to_label[k] = labels[majority_label(k)];
    return out;
  }

  if (K < L) {
    throw InputError(fmt::format(
        "hungarian labeling needs at least as many topics ({}) as labels ({})",
        K, L));
  }
  Matrix<double> score(L, K);
  for (std::size_t l = 0; l < L; ++l) {
    for (std::size_t k = 0; k < K; ++k) {
      score(l, k) = static_cast<double>(agreement(k, l));
    }
  }
  const auto label_to_topic = max_score_assignment(score);
  std::vector<bool> assigned(K, false);
  for (std::size_t l = 0; l < L; ++l) {
    out.topic_to_label[label_to_topic[l]] = labels[l];
    assigned[label_to_topic[l]] = true;
  }
  for (std::size_t k = 0; k < K; ++k) {
    if (!assigned[k]) out.topic_to_label[k] = labels[majority_label(k)];
  }
  return out;
}

TopicLabeling label_topics(const TopicModel& model, const Corpus& corpus,
                           LabelingMethod method) {
  return label_topics(model.theta, corpus, method);
}

EvalResult evaluate(const Matrix<double>& theta, const Corpus& corpus,
                    const TopicLabeling& labeling) {
  check_shape(theta, corpus);
  if (labeling.topic_to_label.size() != theta.cols()) {
    throw InputError("labeling does not cover every topic");
  }
  EvalResult r;
  std::set<std::string> all_labels = corpus.labels();
  all_labels.insert(labeling.topic_to_label.begin(),
                    labeling.topic_to_label.end());
  r.labels.assign(all_labels.begin(), all_labels.end());
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < r.labels.size(); ++i) index[r.labels[i]] = i;
  r.confusion = Matrix<std::size_t>(r.labels.size(), r.labels.size());

  for (std::size_t d = 0; d < corpus.size(); ++d) {
    const auto& label = corpus.document(d).label;
    if (!label) continue;
    const auto& predicted = labeling.topic_to_label[dominant_topic(theta.row(d))];
    ++r.confusion(index.at(*label), index.at(predicted));
    ++r.evaluated;
    if (predicted == *label) ++r.correct;
  }
  if (r.evaluated == 0) throw InputError("labels required: no labeled documents");
  r.accuracy = static_cast<double>(r.correct) / static_cast<double>(r.evaluated);
  return r;
}

EvalResult evaluate(const TopicModel& model, const Corpus& corpus,
                    const TopicLabeling& labeling) {
  return evaluate(model.theta, corpus, labeling);
}

std::string format_confusion(const EvalResult& result) {
  std::size_t width = std::string_view("true\\pred").size();
  for (const auto& l : result.labels) width = std::max(width, l.size());
  for (std::size_t i = 0; i < result.labels.size(); ++i) {
    for (std::size_t j = 0; j < result.labels.size(); ++j) {
      width = std::max(width, fmt::formatted_size("{}", result.confusion(i, j)));
    }
  }
  std::string out = fmt::format("{:<{}}", "true\\pred", width);
  for (const auto& l : result.labels) out += fmt::format("  {:>{}}", l, width);
  out += '\n';
  for (std::size_t i = 0; i < result.labels.size(); ++i) {
    out += fmt::format("{:<{}}", result.labels[i], width);
    for (std::size_t j = 0; j < result.labels.size(); ++j) {
      out += fmt::format("  {:>{}}", result.confusion(i, j), width);
    }
    out += '\n';
  }
  return out;
}

std::string to_json(const EvalResult& result) {
  nlohmann::ordered_json j;
  j["accuracy"] = result.accuracy;
  j["evaluated"] = result.evaluated;
  j["correct"] = result.correct;
  j["labels"] = result.labels;
  auto rows = nlohmann::json::array();
  for (std::size_t i = 0; i < result.confusion.rows(); ++i) {
    const auto row = result.confusion.row(i);
    rows.push_back(std::vector<std::size_t>(row.begin(), row.end()));
  }
  j["confusion"] = std::move(rows);
  return j.dump();
}

}  // namespace nlda
