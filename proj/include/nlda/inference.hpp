#pragma once

#include "nlda/corpus.hpp"
#include "nlda/matrix.hpp"

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace nlda {

using TopicId = std::uint32_t;

struct LdaConfig {
  std::size_t num_topics = 10;
  double alpha = 5.0;
  double beta = 0.01;
  std::size_t burn_in_sweeps = 100;
  std::size_t total_sweeps = 1000;
  std::uint64_t seed = 0;

  /// Common-practice defaults: alpha = 50/K, beta = 0.01, 1000 sweeps.
  static LdaConfig defaults(std::size_t num_topics);

  /// Throws InputError unless K >= 2, alpha > 0, beta > 0 and
  /// total_sweeps > burn_in_sweeps.
  void validate() const;

  friend bool operator==(const LdaConfig&, const LdaConfig&) = default;
};

/// Sampler state: one topic per token plus the three count tables that
/// collapsed Gibbs sampling keeps in sync with it.
struct GibbsState {
  std::vector<std::vector<TopicId>> z;
  Matrix<std::uint32_t> doc_topic;   // N x K
  Matrix<std::uint32_t> topic_word;  // K x V
  std::vector<std::uint64_t> topic_total;

  std::size_t num_topics() const { return topic_total.size(); }

  friend bool operator==(const GibbsState&, const GibbsState&) = default;
};

/// Point estimates of the topic-word (phi, K x V) and document-topic
/// (theta, N x K) distributions.
struct TopicModel {
  Matrix<double> phi;
  Matrix<double> theta;
  LdaConfig config;
  Vocabulary vocabulary;

  std::size_t num_topics() const { return phi.rows(); }

  friend bool operator==(const TopicModel&, const TopicModel&) = default;
};

/// 64-bit Mersenne twister; every random draw in the library goes through
/// this type so a seed pins a run.
using Rng = std::mt19937_64;

/// Uniform double in [0, 1) built from the top 53 bits of one draw.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

GibbsState init_state(const Corpus& corpus, const LdaConfig& config, Rng& rng);

/// Resamples every token once, documents in order and tokens in order.
void gibbs_sweep(GibbsState& state, const Corpus& corpus,
                 const LdaConfig& config, Rng& rng);

/// Returns a description of the first broken count invariant, or an
/// empty string when the state is consistent with `corpus`.
std::string find_invariant_violation(const GibbsState& state,
                                     const Corpus& corpus);

/// Turns per-sweep invariant checking on or off for gibbs_sweep/fit.
/// Defaults to on in builds without NDEBUG. A failed check throws
/// InternalError.
void set_sweep_checks(bool enabled);
bool sweep_checks_enabled();

struct SweepCheckStats {
  std::uint64_t checks = 0;
  std::uint64_t violations = 0;
};
SweepCheckStats sweep_check_stats();

TopicModel estimate(const GibbsState& state, const Corpus& corpus,
                    const LdaConfig& config);

struct FitResult {
  TopicModel model;
  GibbsState state;
};

/// init_state followed by total_sweeps sweeps; the estimate comes from the
/// final sample. Deterministic in (corpus, config).
FitResult fit(const Corpus& corpus, const LdaConfig& config);

/// exp(-mean per-token log likelihood) of `corpus` under `model`.
/// The corpus must be encoded against model.vocabulary and have as many
/// documents as model.theta has rows.
double perplexity(const TopicModel& model, const Corpus& corpus);

/// Infers theta for unseen documents with phi held fixed (Gibbs sampling
/// over topic assignments only). `corpus` must be encoded against
/// model.vocabulary. Returns an N x K matrix.
Matrix<double> infer_theta(const TopicModel& model, const Corpus& corpus,
                           std::size_t sweeps, std::uint64_t seed);

}  // namespace nlda
