// End-to-end exit criteria. Prints one PASS/FAIL line per criterion and
// exits non-zero if any fails.

#include "nlda/arff.hpp"
#include "nlda/assignment.hpp"
#include "nlda/eval.hpp"
#include "nlda/export.hpp"
#include "nlda/model_io.hpp"
#include "nlda/nstage.hpp"
#include "test_support.hpp"

#include <fmt/format.h>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>

using namespace nlda;
using namespace nlda::testing;

namespace {

const std::string kCli = NLDA_CLI_PATH;
const std::string kData = NLDA_DATA_DIR;

// Pinned reference values for the noisy corpus (majority labeling,
// shipped seeds). Frozen from the reference run; asserted exactly.
constexpr std::size_t kNoisyDocs = 400;
constexpr std::size_t kStage1Correct = 308;
constexpr std::size_t kStage3Correct = 331;
constexpr double kMinAccuracyGain = 0.03;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& name, const std::function<Outcome()>& body) {
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::cout << fmt::format("[{}] {:>2}. {}: {}\n", o.pass ? "PASS" : "FAIL", id, name,
                           o.detail)
            << std::flush;
}

Corpus load_corpus(const std::string& name, const PipelineConfig& pipeline = {}) {
  return build_corpus(read_labeled_lines_file(kData + "/" + name), pipeline);
}

// Every fitted model the suite produces, for the threshold oracle.
std::vector<FitResult> g_fitted;

NStageResult staged(const Corpus& corpus, std::size_t stages, std::vector<FitResult>* per_stage = nullptr) {
  NStageConfig config;
  config.stages = stages;
  config.lda = synthetic_lda(3);
  return run_nstage(corpus, config, [&](const StageOutcome& s) {
    g_fitted.push_back(s.fit);
    if (per_stage) per_stage->push_back(s.fit);
  });
}

EvalResult majority_eval(const TopicModel& model, const Corpus& corpus) {
  return evaluate(model, corpus, label_topics(model, corpus, LabelingMethod::Majority));
}

}  // namespace

int main() {
  spdlog::set_level(spdlog::level::off);
  set_sweep_checks(true);

  const auto tiny = load_corpus("tiny.tsv");
  const auto clean = load_corpus("synthetic_clean.tsv");
  const auto noisy = load_corpus("synthetic_noisy.tsv");

  criterion(1, "n=1 equals plain LDA", [&] {
    const auto start = Clock::now();
    NStageConfig config;
    config.stages = 1;
    config.lda = LdaConfig::defaults(3);
    config.lda.seed = 7;
    const auto one = run_nstage(tiny, config);
    const auto plain = fit(tiny, config.lda);
    g_fitted.push_back(plain);
    const double t = seconds_since(start);
    const bool same = one.fit.model == plain.model && one.fit.state == plain.state;
    return Outcome{same && t < 5.0,
                   fmt::format("bit-identical={} runtime={:.2f}s (limit 5s)", same, t)};
  });

  std::vector<FitResult> noisy_stages;
  criterion(3, "vocabulary monotonicity (noisy corpus, 4 stages)", [&] {
    const auto start = Clock::now();
    const auto result = staged(noisy, 4, &noisy_stages);
    const double t = seconds_since(start);
    std::vector<std::size_t> sizes;
    for (const auto& r : result.reports) sizes.push_back(r.vocab_size_after);
    const bool ok = noisy.vocabulary().size() == 300 && noisy.size() == 400 &&
                    sizes.size() == 4 && sizes[1] < sizes[0] && sizes[2] < sizes[1] &&
                    sizes[3] <= sizes[2];
    return Outcome{ok && t < 60.0,
                   fmt::format("V={} sizes={} runtime={:.2f}s (limit 60s)",
                               noisy.vocabulary().size(), fmt::join(sizes, "->"), t)};
  });

  criterion(4, "3-stage accuracy >= 1-stage + 0.03 (pinned)", [&] {
    const auto one = staged(noisy, 1);
    const auto three = staged(noisy, 3);
    const auto a1 = majority_eval(one.fit.model, one.corpus);
    const auto a3 = majority_eval(three.fit.model, three.corpus);
    const bool pinned = a1.evaluated == kNoisyDocs && a3.evaluated == kNoisyDocs &&
                        a1.correct == kStage1Correct && a3.correct == kStage3Correct;
    const bool gain = a3.accuracy >= a1.accuracy + kMinAccuracyGain;
    return Outcome{pinned && gain,
                   fmt::format("stage1={}/{} ({:.4f}) stage3={}/{} ({:.4f}) gain={:+.4f} "
                               "pinned={}",
                               a1.correct, a1.evaluated, a1.accuracy, a3.correct,
                               a3.evaluated, a3.accuracy, a3.accuracy - a1.accuracy, pinned)};
  });

  criterion(5, "topic recovery on the clean corpus (TV <= 0.15)", [&] {
    const auto start = Clock::now();
    const auto synthetic = generate_synthetic(SyntheticSpec::clean());
    const auto result = fit(clean, synthetic_lda(3));
    g_fitted.push_back(result);
    const double t = seconds_since(start);
    const auto fitted = phi_over(result.model, synthetic.words);
    const std::size_t K = synthetic.phi.rows();
    Matrix<double> cost(K, K);
    auto row = [](const Matrix<double>& m, std::size_t r) {
      return std::vector<double>(m.row(r).begin(), m.row(r).end());
    };
    for (std::size_t a = 0; a < K; ++a)
      for (std::size_t b = 0; b < K; ++b)
        cost(a, b) = tv_distance(row(synthetic.phi, a), row(fitted, b));
    const auto match = min_cost_assignment(cost);
    std::vector<double> tv;
    double total = 0.0;
    for (std::size_t a = 0; a < K; ++a) {
      tv.push_back(cost(a, match[a]));
      total += tv.back();
    }
    double enum_total = 0.0;
    for (double d : matched_tv_by_enumeration(synthetic.phi, fitted)) enum_total += d;
    const bool within = std::all_of(tv.begin(), tv.end(), [](double d) { return d <= 0.15; });
    const bool agree = std::abs(total - enum_total) < 1e-12;
    return Outcome{within && agree && t < 30.0,
                   fmt::format("TV={:.4f} matching-optimal={} runtime={:.2f}s (limit 30s)",
                               fmt::join(tv, ","), agree, t)};
  });

  criterion(7, "uniform-model perplexity equals V", [&] {
    std::string detail;
    bool ok = true;
    for (const Corpus* c : {&tiny, &clean, &noisy}) {
      const auto V = c->vocabulary().size();
      TopicModel m{.phi = Matrix<double>(3, V, 1.0 / static_cast<double>(V)),
                   .theta = Matrix<double>(c->size(), 3, 1.0 / 3.0),
                   .config = synthetic_lda(3),
                   .vocabulary = c->vocabulary()};
      const double pp = perplexity(m, *c);
      const double rel = std::abs(pp - static_cast<double>(V)) / static_cast<double>(V);
      ok = ok && rel <= 1e-9;
      detail += fmt::format("V={} rel.err={:.1e}; ", V, rel);
    }
    return Outcome{ok, detail};
  });

  criterion(8, "stage-3 max topic weight >= stage 1 (matched topics)", [&] {
    if (noisy_stages.size() < 3) return Outcome{false, "noisy stage run missing"};
    const auto& s1 = noisy_stages[0].model;
    const auto& s3 = noisy_stages[2].model;
    const std::size_t K = s1.num_topics();
    // Documents are shared across stages; match topics by theta overlap.
    Matrix<double> overlap(K, K);
    for (std::size_t d = 0; d < s1.theta.rows(); ++d)
      for (std::size_t a = 0; a < K; ++a)
        for (std::size_t b = 0; b < K; ++b) overlap(a, b) += s1.theta(d, a) * s3.theta(d, b);
    const auto match = max_score_assignment(overlap);
    bool ok = true;
    std::string detail;
    for (std::size_t a = 0; a < K; ++a) {
      const auto r1 = s1.phi.row(a);
      const auto r3 = s3.phi.row(match[a]);
      const double m1 = *std::max_element(r1.begin(), r1.end());
      const double m3 = *std::max_element(r3.begin(), r3.end());
      ok = ok && m3 >= m1 - 1e-9;
      detail += fmt::format("t{}->t{}: {:.4f}->{:.4f}; ", a, match[a], m1, m3);
    }
    return Outcome{ok, detail};
  });

  criterion(9, "ARFF round trip", [&] {
    const auto result = staged(noisy, 3);
    TempDir dir;
    export_arff(result.fit.model, result.corpus, dir / "noisy.arff");
    const auto parsed = parse_arff_file((dir / "noisy.arff").string());
    const std::size_t K = result.fit.model.num_topics();
    double worst = 0.0;
    for (const auto& row : parsed.rows) {
      double sum = 0.0;
      for (std::size_t k = 0; k < K; ++k) sum += std::stod(row[k]);
      worst = std::max(worst, std::abs(sum - 1.0));
    }
    const bool ok = parsed.rows.size() == result.corpus.size() &&
                    parsed.attributes.size() == K + 1 && worst <= 5e-6;
    return Outcome{ok, fmt::format("rows={} attributes={} max|sum-1|={:.1e}",
                                   parsed.rows.size(), parsed.attributes.size(), worst)};
  });

  criterion(10, "CLI runs are byte-identical", [&] {
    TempDir a, b;
    auto pipeline = [&](const TempDir& dir) {
      const auto input = kData + "/synthetic_noisy.tsv";
      const auto model = (dir / "model.json").string();
      const auto fit_cmd =
          fmt::format("{} fit --input {} --topics 3 --stages 3 --alpha 0.1 --beta 0.01 "
                      "--sweeps 300 --burn-in 50 --seed 1 --model-out {} --report {}",
                      kCli, input, model, (dir / "report.jsonl").string());
      const auto export_cmd =
          fmt::format("{} export --model {} --input {} --arff {} --topics-table {} --top-m 10",
                      kCli, model, input, (dir / "docs.arff").string(),
                      (dir / "topics.tsv").string());
      return run_command(fit_cmd).exit_code == 0 && run_command(export_cmd).exit_code == 0;
    };
    if (!pipeline(a) || !pipeline(b)) return Outcome{false, "CLI run failed"};
    bool same = true;
    for (const char* f : {"model.json", "report.jsonl", "docs.arff", "topics.tsv"}) {
      same = same && read_file(a / f) == read_file(b / f);
    }
    return Outcome{same, "model.json report.jsonl docs.arff topics.tsv identical=" +
                             std::string(same ? "true" : "false")};
  });

  criterion(2, "survivor sets match the brute-force oracle", [&] {
    std::size_t topics = 0, mismatches = 0;
    for (const auto& f : g_fitted) {
      const auto parsed = nlohmann::json::parse(serialize_model({f.model, {}, 1, 0, 0}));
      const auto words = parsed["vocabulary"].get<std::vector<std::string>>();
      for (std::size_t k = 0; k < f.model.num_topics(); ++k) {
        const auto counts_span = f.state.topic_word.row(k);
        const std::vector<std::uint32_t> counts(counts_span.begin(), counts_span.end());
        const auto expected =
            brute_force_survivors(parsed["phi"][k].get<std::vector<double>>(), words, counts);
        const auto support = topic_support(f.model, f.state, k);
        std::set<std::string> actual;
        if (!support.empty()) {
          for (WordId w : survivors_for_topic(f.model.phi.row(k), support)) {
            actual.insert(f.model.vocabulary.word(w));
          }
        }
        ++topics;
        if (actual != expected) ++mismatches;
      }
    }
    return Outcome{mismatches == 0 && topics > 0,
                   fmt::format("{} models, {} topics, {} mismatches", g_fitted.size(), topics,
                               mismatches)};
  });

  criterion(6, "Gibbs count invariants after every sweep", [&] {
    const auto stats = sweep_check_stats();
    return Outcome{stats.checks > 0 && stats.violations == 0,
                   fmt::format("{} checks, {} violations", stats.checks, stats.violations)};
  });

  std::cout << (failures == 0 ? "all acceptance criteria passed\n"
                              : fmt::format("{} acceptance criteria failed\n", failures));
  return failures == 0 ? 0 : 1;
}
