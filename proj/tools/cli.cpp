#include "cli.hpp"

#include "nlda/corpus.hpp"
#include "nlda/error.hpp"
#include "nlda/eval.hpp"
#include "nlda/export.hpp"
#include "nlda/inference.hpp"
#include "nlda/model_io.hpp"
#include "nlda/nstage.hpp"
#include "nlda/synthetic.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>

namespace nlda::cli {

namespace {

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("nstage-lda");
  logger->set_pattern("[%l] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("NSTAGE_LOG"); env && *env) {
    const auto level = spdlog::level::from_str(env);
    // from_str maps unknown names to "off"
    if (level == spdlog::level::off && std::string_view(env) != "off") {
      spdlog::warn("NSTAGE_LOG='{}' is not a log level", env);
    } else {
      spdlog::set_level(level);
    }
  }
}

struct PipelineArgs {
  bool lowercase = true;
  bool strip_punctuation = true;
  std::size_t min_token_len = 1;
  std::string stopwords_file;
  std::optional<std::size_t> prefix_stem;
  bool keep_empty_docs = false;

  void attach(CLI::App& cmd) {
    cmd.add_flag("--lowercase,!--no-lowercase", lowercase,
                 "Lowercase tokens (default on)");
    cmd.add_flag("--strip-punctuation,!--no-strip-punctuation",
                 strip_punctuation, "Remove punctuation characters (default on)");
    cmd.add_option("--min-token-len", min_token_len,
                   "Drop tokens shorter than this many characters");
    cmd.add_option("--stopwords", stopwords_file,
                   "Whitespace-separated stopword file");
    cmd.add_option("--prefix-stem", prefix_stem,
                   "Keep only the first K characters of each token");
    cmd.add_flag("--keep-empty-docs", keep_empty_docs,
                 "Keep documents that are empty after tokenization");
  }

  PipelineConfig build() const {
    PipelineConfig p;
    p.lowercase = lowercase;
    p.strip_punctuation = strip_punctuation;
    p.min_token_len = min_token_len;
    if (!stopwords_file.empty()) p.stopwords = read_stopwords_file(stopwords_file);
    p.prefix_stem = prefix_stem;
    p.drop_empty_docs = !keep_empty_docs;
    p.validate();
    return p;
  }
};

struct FitArgs {
  std::string input;
  std::size_t topics = 10;
  std::size_t stages = 1;
  std::optional<double> alpha;
  double beta = 0.01;
  std::size_t sweeps = 1000;
  std::optional<std::size_t> burn_in;
  std::uint64_t seed = 0;
  std::string model_out = "model.json";
  std::string report;
  std::string stage_models;
  std::size_t top_n_support = 0;
  std::size_t chains = 1;
  PipelineArgs pipeline;
};

struct ChainResult {
  NStageResult result;
  std::vector<ModelBundle> stage_models;
};

ChainResult run_chain(const Corpus& corpus, const NStageConfig& config,
                      const PipelineConfig& pipeline, bool keep_stages) {
  std::vector<ModelBundle> stage_models;
  StageObserver observer;
  if (keep_stages) {
    observer = [&](const StageOutcome& s) {
      stage_models.push_back({s.fit.model, pipeline, s.report.stage_index,
                              config.lda.seed, config.top_n_support});
    };
  }
  auto result = run_nstage(corpus, config, observer);
  return {std::move(result), std::move(stage_models)};
}

int cmd_fit(const FitArgs& a) {
  const auto pipeline = a.pipeline.build();
  const auto corpus = build_corpus(read_labeled_lines_file(a.input), pipeline);
  spdlog::info("corpus: {} documents, {} tokens, vocabulary {}", corpus.size(),
               corpus.token_count(), corpus.vocabulary().size());

  NStageConfig config;
  config.stages = a.stages;
  config.top_n_support = a.top_n_support;
  config.lda = LdaConfig::defaults(a.topics);
  if (a.alpha) config.lda.alpha = *a.alpha;
  config.lda.beta = a.beta;
  config.lda.total_sweeps = a.sweeps;
  config.lda.burn_in_sweeps = a.burn_in.value_or(a.sweeps / 10);
  config.lda.seed = a.seed;
  config.validate();
  if (a.chains == 0) throw InputError("--chains must be at least 1");

  const bool keep_stages = !a.stage_models.empty();
  std::vector<std::future<ChainResult>> futures;
  for (std::size_t c = 0; c < a.chains; ++c) {
    NStageConfig chain_config = config;
    chain_config.lda.seed = a.seed + c * 0x9E3779B97F4A7C15ULL;
    futures.push_back(std::async(std::launch::async, run_chain, std::cref(corpus),
                                 chain_config, std::cref(pipeline), keep_stages));
  }
  std::vector<ChainResult> chains;
  for (auto& f : futures) chains.push_back(f.get());
  std::size_t best = 0;
  for (std::size_t c = 1; c < chains.size(); ++c) {
    if (chains[c].result.reports.back().model_perplexity <
        chains[best].result.reports.back().model_perplexity) {
      best = c;
    }
  }
  if (chains.size() > 1) {
    spdlog::info("keeping chain {} of {}", best, chains.size());
  }
  auto& chosen = chains[best];
  const auto chain_seed = a.seed + best * 0x9E3779B97F4A7C15ULL;

  save_model({chosen.result.fit.model, pipeline, a.stages, chain_seed,
              a.top_n_support},
             a.model_out);
  if (!a.report.empty()) {
    std::ofstream out(a.report, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError(fmt::format("cannot write '{}'", a.report));
    for (const auto& r : chosen.result.reports) out << to_json_line(r) << '\n';
  }
  if (keep_stages) {
    std::filesystem::create_directories(a.stage_models);
    for (const auto& b : chosen.stage_models) {
      save_model(b, std::filesystem::path(a.stage_models) /
                        fmt::format("stage{}.json", b.stages));
    }
  }
  for (const auto& r : chosen.result.reports) {
    std::cout << fmt::format(
        "stage {}: vocabulary {} -> {}, deleted {}, emptied docs {}, "
        "perplexity {:.4f}\n",
        r.stage_index, r.vocab_size_before, r.vocab_size_after,
        r.deleted_words.size(), r.emptied_doc_count, r.model_perplexity);
  }
  return kExitOk;
}

struct EvalArgs {
  std::vector<std::string> models;
  std::string input;
  std::string labeling = "majority";
  bool fold_in = false;
  std::size_t fold_in_sweeps = 200;
  std::string json_out;
};

EvalResult evaluate_bundle(const ModelBundle& bundle,
                           const std::vector<LabeledLine>& lines,
                           const EvalArgs& a) {
  const auto method = parse_labeling_method(a.labeling);
  const auto raw = build_corpus(lines, bundle.pipeline);
  if (!raw.has_labels()) throw InputError("labels required");
  const auto& model = bundle.model;
  if (a.fold_in) {
    const auto corpus = project(raw, model.vocabulary);
    const auto theta =
        infer_theta(model, corpus, a.fold_in_sweeps, bundle.base_seed);
    return evaluate(theta, corpus, label_topics(theta, corpus, method));
  }
  Corpus corpus = [&] {
    try {
      return reencode(raw, model.vocabulary);
    } catch (const InputError& e) {
      throw InputError(fmt::format(
          "model/corpus vocabulary mismatch ({}); use --fold-in for text the "
          "model was not trained on",
          e.what()));
    }
  }();
  if (corpus.size() != model.theta.rows()) {
    throw InputError(fmt::format(
        "model/corpus mismatch: model has {} documents, input has {}",
        model.theta.rows(), corpus.size()));
  }
  return evaluate(model, corpus, label_topics(model, corpus, method));
}

int cmd_eval(const EvalArgs& a) {
  parse_labeling_method(a.labeling);
  const auto lines = read_labeled_lines_file(a.input);
  std::vector<std::pair<std::size_t, EvalResult>> results;
  for (const auto& path : a.models) {
    const auto bundle = load_model(path);
    results.emplace_back(bundle.stages, evaluate_bundle(bundle, lines, a));
  }
  std::stable_sort(results.begin(), results.end(),
                   [](const auto& x, const auto& y) { return x.first < y.first; });

  if (results.size() == 1) {
    std::cout << fmt::format("accuracy {:.4f}\n", results[0].second.accuracy)
              << format_confusion(results[0].second);
  } else {
    for (const auto& [stage, r] : results) {
      std::cout << fmt::format("stage {} accuracy {:.4f}\n", stage, r.accuracy);
    }
  }
  if (!a.json_out.empty()) {
    std::ofstream out(a.json_out, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError(fmt::format("cannot write '{}'", a.json_out));
    for (const auto& [stage, r] : results) out << to_json(r) << '\n';
  }
  return kExitOk;
}

struct ExportArgs {
  std::string model;
  std::string input;
  std::string arff;
  std::string arff_mode = "doc-topics";
  std::string topics_table;
  std::size_t top_m = 10;
};

int cmd_export(const ExportArgs& a) {
  if (a.arff.empty() && a.topics_table.empty()) {
    throw InputError("nothing to export: pass --arff and/or --topics-table");
  }
  if (a.top_m == 0) throw InputError("--top-m must be at least 1");
  const auto mode = parse_arff_mode(a.arff_mode);
  const auto bundle = load_model(a.model);
  if (!a.arff.empty()) {
    if (mode == ArffMode::DocumentTopics) {
      if (a.input.empty()) throw InputError("--input is required for doc-topics ARFF");
      const auto raw = build_corpus(read_labeled_lines_file(a.input), bundle.pipeline);
      const auto corpus = reencode(raw, bundle.model.vocabulary);
      export_arff(bundle.model, corpus, a.arff, mode);
    } else {
      export_arff(bundle.model, Corpus({}, {}), a.arff, mode);
    }
  }
  if (!a.topics_table.empty()) export_topics(bundle.model, a.top_m, a.topics_table);
  return kExitOk;
}

struct SynthArgs {
  std::string preset = "noisy";
  std::optional<std::uint64_t> seed;
  std::string output;
};

int cmd_gen_synthetic(const SynthArgs& a) {
  auto spec = SyntheticSpec::preset(a.preset);
  if (a.seed) spec.seed = *a.seed;
  const auto corpus = generate_synthetic(spec);
  if (a.output.empty() || a.output == "-") {
    write_tsv(corpus, std::cout);
    return kExitOk;
  }
  std::ofstream out(a.output, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError(fmt::format("cannot write '{}'", a.output));
  write_tsv(corpus, out);
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv) {
  setup_logging();

  CLI::App app{"n-stage LDA: topic modeling with iterative dictionary pruning",
               "nstage-lda"};
  app.set_config("--config", "", "TOML config file; flags override its values");
  app.require_subcommand(1);

  FitArgs fit_args;
  auto* fit_cmd = app.add_subcommand("fit", "Fit an n-stage LDA model");
  fit_cmd->add_option("--input", fit_args.input, "Corpus file (label<TAB>text)")
      ->required();
  fit_cmd->add_option("--topics", fit_args.topics, "Number of topics K");
  fit_cmd->add_option("--stages", fit_args.stages, "Number of stages n");
  fit_cmd->add_option("--alpha", fit_args.alpha, "Document-topic prior (default 50/K)");
  fit_cmd->add_option("--beta", fit_args.beta, "Topic-word prior");
  fit_cmd->add_option("--sweeps", fit_args.sweeps, "Gibbs sweeps per stage");
  fit_cmd->add_option("--burn-in", fit_args.burn_in,
                      "Burn-in sweeps (diagnostics only; default sweeps/10)");
  fit_cmd->add_option("--seed", fit_args.seed, "Base random seed");
  fit_cmd->add_option("--model-out", fit_args.model_out, "Model JSON output");
  fit_cmd->add_option("--report", fit_args.report, "Stage report (JSON lines)");
  fit_cmd->add_option("--stage-models", fit_args.stage_models,
                      "Directory for per-stage model files stage<i>.json");
  fit_cmd->add_option("--topn-support", fit_args.top_n_support,
                      "Threshold over each topic's M heaviest words (0 = all)");
  fit_cmd->add_option("--chains", fit_args.chains,
                      "Independent chains; the lowest-perplexity one is kept");
  fit_args.pipeline.attach(*fit_cmd);

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "Classify documents by dominant topic");
  eval_cmd->add_option("--model", eval_args.models, "Model file(s); repeat for per-stage")
      ->required();
  eval_cmd->add_option("--input", eval_args.input, "Labeled corpus file")->required();
  eval_cmd->add_option("--labeling", eval_args.labeling, "majority or hungarian");
  eval_cmd->add_flag("--fold-in", eval_args.fold_in,
                     "Infer theta for the input instead of using the model's");
  eval_cmd->add_option("--fold-in-sweeps", eval_args.fold_in_sweeps,
                       "Sweeps for --fold-in");
  eval_cmd->add_option("--json", eval_args.json_out, "Write results as JSON lines");

  ExportArgs export_args;
  auto* export_cmd = app.add_subcommand("export", "Write ARFF and topic tables");
  export_cmd->add_option("--model", export_args.model, "Model file")->required();
  export_cmd->add_option("--input", export_args.input, "Labeled corpus file");
  export_cmd->add_option("--arff", export_args.arff, "ARFF output path");
  export_cmd->add_option("--arff-mode", export_args.arff_mode,
                         "doc-topics (default) or topic-words");
  export_cmd->add_option("--topics-table", export_args.topics_table, "TSV output path");
  export_cmd->add_option("--top-m", export_args.top_m, "Words per topic in the table");

  SynthArgs synth_args;
  auto* synth_cmd =
      app.add_subcommand("gen-synthetic", "Write a seeded synthetic labeled corpus");
  synth_cmd->add_option("--preset", synth_args.preset, "clean, noisy or disjoint");
  synth_cmd->add_option("--seed", synth_args.seed, "Override the preset seed");
  synth_cmd->add_option("--output", synth_args.output, "Output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*fit_cmd) return cmd_fit(fit_args);
    if (*eval_cmd) return cmd_eval(eval_args);
    if (*export_cmd) return cmd_export(export_args);
    if (*synth_cmd) return cmd_gen_synthetic(synth_args);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const InternalError& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInternal;
}

}  // namespace nlda::cli
