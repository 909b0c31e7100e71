#include "nlda/export.hpp"

#include "nlda/arff.hpp"
#include "nlda/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <numeric>

namespace nlda {

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw InputError(fmt::format("cannot write '{}'", path.string()));
  }
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw InputError(fmt::format("error writing '{}'", path.string()));
}

}  // namespace

ArffMode parse_arff_mode(std::string_view name) {
  if (name == "doc-topics") return ArffMode::DocumentTopics;
  if (name == "topic-words") return ArffMode::TopicWords;
  throw InputError(fmt::format("unknown ARFF mode '{}'", name));
}

void export_arff(const TopicModel& model, const Corpus& corpus,
                 std::ostream& out, ArffMode mode) {
  const auto K = model.num_topics();
  out << "@RELATION nstage_lda\n\n";

  if (mode == ArffMode::TopicWords) {
    for (const auto& w : model.vocabulary.words()) {
      out << "@ATTRIBUTE " << arff_quote(w) << " NUMERIC\n";
    }
    out << "\n@DATA\n";
    for (std::size_t k = 0; k < K; ++k) {
      const auto row = model.phi.row(k);
      for (std::size_t w = 0; w < row.size(); ++w) {
        out << (w == 0 ? "" : ",") << fmt::format("{:.6f}", row[w]);
      }
      out << '\n';
    }
    return;
  }

  if (model.theta.rows() != corpus.size()) {
    throw InputError(fmt::format("model has {} documents but the corpus has {}",
                                 model.theta.rows(), corpus.size()));
  }
  if (corpus.labeled_count() != corpus.size()) {
    throw InputError("labels required: every document needs a class label");
  }
  for (std::size_t k = 0; k < K; ++k) out << "@ATTRIBUTE t" << k << " NUMERIC\n";
  out << "@ATTRIBUTE class {";
  bool first = true;
  for (const auto& label : corpus.labels()) {
    out << (first ? "" : ",") << arff_quote(label);
    first = false;
  }
  out << "}\n\n@DATA\n";
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    for (double v : model.theta.row(d)) out << fmt::format("{:.6f},", v);
    out << arff_quote(*corpus.document(d).label) << '\n';
  }
}

void export_arff(const TopicModel& model, const Corpus& corpus,
                 const std::filesystem::path& path, ArffMode mode) {
  auto out = open_output(path);
  export_arff(model, corpus, out, mode);
  finish(out, path);
}

void export_topics(const TopicModel& model, std::size_t top_m,
                   std::ostream& out) {
  if (top_m == 0) throw InputError("top-m must be at least 1");
  const auto V = model.vocabulary.size();
  out << "topic\tword\tweight\n";
  std::vector<WordId> order(V);
  for (std::size_t k = 0; k < model.num_topics(); ++k) {
    const auto row = model.phi.row(k);
    std::iota(order.begin(), order.end(), WordId{0});
    const auto m = std::min(top_m, V);
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(m),
                      order.end(), [&](WordId a, WordId b) {
                        return row[a] != row[b] ? row[a] > row[b] : a < b;
                      });
    for (std::size_t i = 0; i < m; ++i) {
      out << k << '\t' << model.vocabulary.word(order[i]) << '\t'
          << fmt::format("{:.6f}", row[order[i]]) << '\n';
    }
  }
}

void export_topics(const TopicModel& model, std::size_t top_m,
                   const std::filesystem::path& path) {
  if (top_m == 0) throw InputError("top-m must be at least 1");
  auto out = open_output(path);
  export_topics(model, top_m, out);
  finish(out, path);
}

}  // namespace nlda
