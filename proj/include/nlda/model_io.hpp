#pragma once

#include "nlda/corpus.hpp"
#include "nlda/inference.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>

namespace nlda {

/// A fitted model plus what is needed to re-tokenize text for it.
///
/// JSON layout:
///   { "format": "nstage-lda-model/1",
///     "config": { "num_topics", "alpha", "beta", "burn_in_sweeps",
///                 "total_sweeps", "seed", "stages", "base_seed",
///                 "top_n_support", "pipeline": {...} },
///     "vocabulary": [word, ...],
///     "phi":   [[K rows of V values]],
///     "theta": [[N rows of K values]] }
/// Reals are printed with 17 significant digits so a load reproduces the
/// exact doubles.
struct ModelBundle {
  TopicModel model;
  PipelineConfig pipeline;
  std::size_t stages = 1;
  std::uint64_t base_seed = 0;
  std::size_t top_n_support = 0;
};

std::string serialize_model(const ModelBundle& bundle);
/// Throws InputError on malformed or inconsistent documents.
ModelBundle parse_model(const std::string& json_text);

void save_model(const ModelBundle& bundle, const std::filesystem::path& path);
ModelBundle load_model(const std::filesystem::path& path);

}  // namespace nlda
