#include "nlda/inference.hpp"

#include "nlda/error.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <atomic>
#include <cmath>
#include <numeric>

namespace nlda {

namespace {

#ifdef NDEBUG
std::atomic<bool> g_sweep_checks{false};
#else
std::atomic<bool> g_sweep_checks{true};
#endif
std::atomic<std::uint64_t> g_checks{0};
std::atomic<std::uint64_t> g_violations{0};

TopicId uniform_topic(Rng& rng, std::size_t num_topics) {
  return static_cast<TopicId>(uniform01(rng) * static_cast<double>(num_topics));
}

// Cumulative-sum inversion: first k with u < cumulative[k].
TopicId draw_topic(std::span<const double> cumulative, Rng& rng) {
  const double u = uniform01(rng) * cumulative.back();
  for (std::size_t k = 0; k < cumulative.size(); ++k) {
    if (u < cumulative[k]) return static_cast<TopicId>(k);
  }
  return static_cast<TopicId>(cumulative.size() - 1);
}

void run_sweep_check(const GibbsState& state, const Corpus& corpus) {
  ++g_checks;
  if (auto msg = find_invariant_violation(state, corpus); !msg.empty()) {
    ++g_violations;
    throw InternalError("Gibbs state invariant violated: " + msg);
  }
}

}  // namespace

LdaConfig LdaConfig::defaults(std::size_t num_topics) {
  LdaConfig c;
  c.num_topics = num_topics;
  c.alpha = num_topics > 0 ? 50.0 / static_cast<double>(num_topics) : 0.0;
  return c;
}

void LdaConfig::validate() const {
  if (num_topics < 2) {
    throw InputError(fmt::format("number of topics must be >= 2 (got {})",
                                 num_topics));
  }
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw InputError(fmt::format("alpha must be positive (got {})", alpha));
  }
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw InputError(fmt::format("beta must be positive (got {})", beta));
  }
  if (total_sweeps <= burn_in_sweeps) {
    throw InputError(fmt::format(
        "total sweeps ({}) must exceed burn-in sweeps ({})", total_sweeps,
        burn_in_sweeps));
  }
}

void set_sweep_checks(bool enabled) { g_sweep_checks = enabled; }
bool sweep_checks_enabled() { return g_sweep_checks; }
SweepCheckStats sweep_check_stats() { return {g_checks, g_violations}; }

GibbsState init_state(const Corpus& corpus, const LdaConfig& config, Rng& rng) {
  config.validate();
  const auto V = corpus.vocabulary().size();
  if (V == 0) throw InputError("empty vocabulary");
  if (corpus.size() == 0) throw InputError("empty corpus");
  const auto K = config.num_topics;

  GibbsState s{
      .z = std::vector<std::vector<TopicId>>(corpus.size()),
      .doc_topic = Matrix<std::uint32_t>(corpus.size(), K),
      .topic_word = Matrix<std::uint32_t>(K, V),
      .topic_total = std::vector<std::uint64_t>(K, 0),
  };
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    const auto& tokens = corpus.document(d).tokens;
    s.z[d].reserve(tokens.size());
    for (WordId w : tokens) {
      const TopicId k = uniform_topic(rng, K);
      s.z[d].push_back(k);
      ++s.doc_topic(d, k);
      ++s.topic_word(k, w);
      ++s.topic_total[k];
    }
  }
  if (g_sweep_checks) run_sweep_check(s, corpus);
  return s;
}

void gibbs_sweep(GibbsState& state, const Corpus& corpus,
                 const LdaConfig& config, Rng& rng) {
  const auto K = state.num_topics();
  const double alpha = config.alpha;
  const double beta = config.beta;
  const double v_beta = static_cast<double>(corpus.vocabulary().size()) * beta;
  std::vector<double> cumulative(K);

  for (std::size_t d = 0; d < corpus.size(); ++d) {
    const auto& tokens = corpus.document(d).tokens;
    auto& z = state.z[d];
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      const WordId w = tokens[i];
      const TopicId old_k = z[i];
      --state.doc_topic(d, old_k);
      --state.topic_word(old_k, w);
      --state.topic_total[old_k];

      double acc = 0.0;
      for (std::size_t k = 0; k < K; ++k) {
        acc += (state.doc_topic(d, k) + alpha) *
               (state.topic_word(k, w) + beta) /
               (static_cast<double>(state.topic_total[k]) + v_beta);
        cumulative[k] = acc;
      }
      const TopicId new_k = draw_topic(cumulative, rng);

      z[i] = new_k;
      ++state.doc_topic(d, new_k);
      ++state.topic_word(new_k, w);
      ++state.topic_total[new_k];
    }
  }
  if (g_sweep_checks) run_sweep_check(state, corpus);
}

std::string find_invariant_violation(const GibbsState& state,
                                     const Corpus& corpus) {
  const auto K = state.num_topics();
  const auto V = corpus.vocabulary().size();
  const auto N = corpus.size();
  if (state.z.size() != N || state.doc_topic.rows() != N ||
      state.doc_topic.cols() != K || state.topic_word.rows() != K ||
      state.topic_word.cols() != V) {
    return "state dimensions do not match the corpus";
  }

  Matrix<std::uint64_t> topic_word(K, V);
  std::vector<std::uint64_t> totals(K, 0);
  for (std::size_t d = 0; d < N; ++d) {
    const auto& tokens = corpus.document(d).tokens;
    if (state.z[d].size() != tokens.size()) {
      return fmt::format("document {} has {} assignments for {} tokens", d,
                         state.z[d].size(), tokens.size());
    }
    std::vector<std::uint64_t> doc_counts(K, 0);
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      const TopicId k = state.z[d][i];
      if (k >= K) return fmt::format("z[{}][{}] = {} is out of range", d, i, k);
      ++doc_counts[k];
      ++topic_word(k, tokens[i]);
      ++totals[k];
    }
    std::uint64_t row_sum = 0;
    for (std::size_t k = 0; k < K; ++k) {
      if (state.doc_topic(d, k) != doc_counts[k]) {
        return fmt::format("doc-topic count ({}, {}) is {} but z implies {}", d,
                           k, state.doc_topic(d, k), doc_counts[k]);
      }
      row_sum += state.doc_topic(d, k);
    }
    if (row_sum != tokens.size()) {
      return fmt::format("doc-topic row {} sums to {} not {}", d, row_sum,
                         tokens.size());
    }
  }
  std::uint64_t grand_total = 0;
  for (std::size_t k = 0; k < K; ++k) {
    std::uint64_t row_sum = 0;
    for (std::size_t w = 0; w < V; ++w) {
      if (state.topic_word(k, w) != topic_word(k, w)) {
        return fmt::format("topic-word count ({}, {}) is {} but z implies {}",
                           k, w, state.topic_word(k, w), topic_word(k, w));
      }
      row_sum += state.topic_word(k, w);
    }
    if (row_sum != state.topic_total[k] || totals[k] != state.topic_total[k]) {
      return fmt::format("topic total {} is {} but its row sums to {}", k,
                         state.topic_total[k], row_sum);
    }
    grand_total += state.topic_total[k];
  }
  if (grand_total != corpus.token_count()) {
    return fmt::format("topic totals sum to {} but the corpus has {} tokens",
                       grand_total, corpus.token_count());
  }
  return {};
}

TopicModel estimate(const GibbsState& state, const Corpus& corpus,
                    const LdaConfig& config) {
  const auto K = state.num_topics();
  const auto V = corpus.vocabulary().size();
  const auto N = corpus.size();
  const double Vd = static_cast<double>(V);
  const double Kd = static_cast<double>(K);

  TopicModel m{.phi = Matrix<double>(K, V),
               .theta = Matrix<double>(N, K),
               .config = config,
               .vocabulary = corpus.vocabulary()};
  for (std::size_t k = 0; k < K; ++k) {
    const double denom =
        static_cast<double>(state.topic_total[k]) + Vd * config.beta;
    for (std::size_t w = 0; w < V; ++w) {
      m.phi(k, w) = (state.topic_word(k, w) + config.beta) / denom;
    }
  }
  for (std::size_t d = 0; d < N; ++d) {
    const double denom =
        static_cast<double>(corpus.document(d).tokens.size()) +
        Kd * config.alpha;
    for (std::size_t k = 0; k < K; ++k) {
      m.theta(d, k) = (state.doc_topic(d, k) + config.alpha) / denom;
    }
  }
  return m;
}

FitResult fit(const Corpus& corpus, const LdaConfig& config) {
  config.validate();
  Rng rng(config.seed);
  GibbsState state = init_state(corpus, config, rng);
  for (std::size_t sweep = 1; sweep <= config.total_sweeps; ++sweep) {
    gibbs_sweep(state, corpus, config, rng);
    if (sweep % 100 == 0) {
      spdlog::debug("sweep {}/{}", sweep, config.total_sweeps);
    }
    if (sweep == config.burn_in_sweeps &&
        spdlog::should_log(spdlog::level::debug)) {
      spdlog::debug("burn-in done; training perplexity {:.4f}",
                    perplexity(estimate(state, corpus, config), corpus));
    }
  }
  TopicModel model = estimate(state, corpus, config);
  return {std::move(model), std::move(state)};
}

double perplexity(const TopicModel& model, const Corpus& corpus) {
  if (corpus.vocabulary().size() != model.vocabulary.size() ||
      corpus.size() != model.theta.rows()) {
    throw InputError("corpus does not match the model's vocabulary/documents");
  }
  const auto K = model.num_topics();
  double log_likelihood = 0.0;
  std::size_t tokens = 0;
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    for (WordId w : corpus.document(d).tokens) {
      double p = 0.0;
      for (std::size_t k = 0; k < K; ++k) p += model.theta(d, k) * model.phi(k, w);
      log_likelihood += std::log(p);
      ++tokens;
    }
  }
  if (tokens == 0) throw InputError("no tokens");
  return std::exp(-log_likelihood / static_cast<double>(tokens));
}

Matrix<double> infer_theta(const TopicModel& model, const Corpus& corpus,
                           std::size_t sweeps, std::uint64_t seed) {
  if (corpus.vocabulary().size() != model.vocabulary.size()) {
    throw InputError("corpus is not encoded against the model vocabulary");
  }
  const auto K = model.num_topics();
  const double alpha = model.config.alpha;
  Rng rng(seed);
  Matrix<std::uint32_t> counts(corpus.size(), K);
  std::vector<double> cumulative(K);
  Matrix<double> theta(corpus.size(), K);

  for (std::size_t d = 0; d < corpus.size(); ++d) {
    const auto& tokens = corpus.document(d).tokens;
    std::vector<TopicId> z(tokens.size());
    for (auto& k : z) {
      k = uniform_topic(rng, K);
      ++counts(d, k);
    }
    for (std::size_t sweep = 0; sweep < sweeps; ++sweep) {
      for (std::size_t i = 0; i < tokens.size(); ++i) {
        --counts(d, z[i]);
        double acc = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
          acc += (counts(d, k) + alpha) * model.phi(k, tokens[i]);
          cumulative[k] = acc;
        }
        z[i] = draw_topic(cumulative, rng);
        ++counts(d, z[i]);
      }
    }
    const double denom =
        static_cast<double>(tokens.size()) + static_cast<double>(K) * alpha;
    for (std::size_t k = 0; k < K; ++k) {
      theta(d, k) = (counts(d, k) + alpha) / denom;
    }
  }
  return theta;
}

}  // namespace nlda
