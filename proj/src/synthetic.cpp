#include "nlda/synthetic.hpp"

#include "nlda/error.hpp"
#include "nlda/inference.hpp"

#include <fmt/format.h>

#include <random>

namespace nlda {

SyntheticSpec SyntheticSpec::clean() { return {}; }

SyntheticSpec SyntheticSpec::noisy() {
  SyntheticSpec s;
  s.words_per_topic = 50;
  s.noise_words = 150;
  s.num_docs = 400;
  s.doc_length = 20;
  s.doc_alpha = 0.3;
  s.off_topic_mass = 0.1;
  s.noise_rate = 0.5;
  s.seed = 2;
  return s;
}

SyntheticSpec SyntheticSpec::disjoint() {
  SyntheticSpec s;
  s.num_topics = 2;
  s.words_per_topic = 8;
  s.num_docs = 40;
  s.doc_length = 30;
  s.off_topic_mass = 0.0;
  s.pure_documents = true;
  s.seed = 3;
  return s;
}

SyntheticSpec SyntheticSpec::preset(std::string_view name) {
  if (name == "clean") return clean();
  if (name == "noisy") return noisy();
  if (name == "disjoint") return disjoint();
  throw InputError(fmt::format("unknown synthetic preset '{}'", name));
}

namespace {

std::vector<double> dirichlet(Rng& rng, std::size_t n, double concentration) {
  std::gamma_distribution<double> gamma(concentration, 1.0);
  std::vector<double> out(n);
  double sum = 0.0;
  for (auto& x : out) {
    x = gamma(rng);
    sum += x;
  }
  if (sum <= 0.0) {
    // Tiny concentrations can underflow every draw; fall back to one-hot.
    out.assign(n, 0.0);
    out[static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n))] = 1.0;
    return out;
  }
  for (auto& x : out) x /= sum;
  return out;
}

std::size_t draw(std::span<const double> weights, Rng& rng) {
  double total = 0.0;
  for (double w : weights) total += w;
  const double u = uniform01(rng) * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    if (u < acc) return i;
  }
  return weights.size() - 1;
}

}  // namespace

SyntheticCorpus generate_synthetic(const SyntheticSpec& spec) {
  if (spec.num_topics < 1 || spec.words_per_topic < 1 || spec.num_docs < 1 ||
      spec.doc_length < 1) {
    throw InputError("synthetic spec needs topics, words, documents and length >= 1");
  }
  if (spec.noise_rate < 0.0 || spec.noise_rate > 1.0 ||
      (spec.noise_rate > 0.0 && spec.noise_words == 0)) {
    throw InputError("noise rate must be in [0, 1] and needs noise words");
  }
  const auto K = spec.num_topics;
  const auto topic_vocab = K * spec.words_per_topic;
  const auto V = topic_vocab + spec.noise_words;
  Rng rng(spec.seed);

  SyntheticCorpus out;
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t j = 0; j < spec.words_per_topic; ++j) {
      out.words.push_back(fmt::format("t{}w{}", k, j));
    }
  }
  for (std::size_t j = 0; j < spec.noise_words; ++j) {
    out.words.push_back(fmt::format("noise{}", j));
  }

  out.phi = Matrix<double>(K, V);
  const double off_each =
      K > 1 ? spec.off_topic_mass / static_cast<double>(topic_vocab - spec.words_per_topic)
            : 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    // Half Dirichlet(1), half uniform, so every topic word has real mass.
    auto own = dirichlet(rng, spec.words_per_topic, 1.0);
    for (auto& x : own) x = 0.5 * x + 0.5 / static_cast<double>(own.size());
    const double own_mass = K > 1 ? 1.0 - spec.off_topic_mass : 1.0;
    for (std::size_t w = 0; w < topic_vocab; ++w) {
      const bool in_block = w / spec.words_per_topic == k;
      out.phi(k, w) =
          in_block ? own_mass * own[w % spec.words_per_topic] : off_each;
    }
  }

  for (std::size_t d = 0; d < spec.num_docs; ++d) {
    std::vector<double> theta;
    if (spec.pure_documents) {
      theta.assign(K, 0.0);
      theta[static_cast<std::size_t>(uniform01(rng) * static_cast<double>(K))] = 1.0;
    } else {
      theta = dirichlet(rng, K, spec.doc_alpha);
    }
    std::size_t label = 0;
    for (std::size_t k = 1; k < K; ++k) {
      if (theta[k] > theta[label]) label = k;
    }
    std::string text;
    for (std::size_t i = 0; i < spec.doc_length; ++i) {
      std::size_t w;
      if (spec.noise_rate > 0.0 && uniform01(rng) < spec.noise_rate) {
        w = topic_vocab + static_cast<std::size_t>(
                              uniform01(rng) * static_cast<double>(spec.noise_words));
      } else {
        w = draw(out.phi.row(draw(theta, rng)), rng);
      }
      if (i > 0) text.push_back(' ');
      text += out.words[w];
    }
    out.doc_class.push_back(label);
    out.lines.push_back({fmt::format("c{}", label), std::move(text)});
  }
  return out;
}

void write_tsv(const SyntheticCorpus& corpus, std::ostream& out) {
  for (const auto& line : corpus.lines) {
    out << line.label.value_or("") << '\t' << line.text << '\n';
  }
}

}  // namespace nlda
