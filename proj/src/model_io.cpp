#include "nlda/model_io.hpp"

#include "nlda/error.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <fstream>
#include <sstream>

namespace nlda {

namespace {

constexpr std::string_view kFormat = "nstage-lda-model/1";

std::string quoted(const std::string& s) { return nlohmann::json(s).dump(); }

std::string real(double v) { return fmt::format("{:.17g}", v); }

void write_matrix(std::string& out, const Matrix<double>& m) {
  out += "[";
  for (std::size_t r = 0; r < m.rows(); ++r) {
    out += r == 0 ? "\n    [" : ",\n    [";
    const auto row = m.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) out += ", ";
      out += real(row[c]);
    }
    out += "]";
  }
  out += m.rows() == 0 ? "]" : "\n  ]";
}

Matrix<double> read_matrix(const nlohmann::json& j, std::size_t rows,
                           std::size_t cols, const char* name) {
  if (!j.is_array() || j.size() != rows) {
    throw InputError(fmt::format("model '{}' must have {} rows", name, rows));
  }
  Matrix<double> m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto& row = j[r];
    if (!row.is_array() || row.size() != cols) {
      throw InputError(
          fmt::format("model '{}' row {} must have {} values", name, r, cols));
    }
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = row[c].get<double>();
  }
  return m;
}

}  // namespace

std::string serialize_model(const ModelBundle& b) {
  const auto& m = b.model;
  const auto& c = m.config;
  const auto& p = b.pipeline;

  std::string stopwords = "[";
  bool first = true;
  for (const auto& w : p.stopwords) {
    stopwords += (first ? "" : ", ") + quoted(w);
    first = false;
  }
  stopwords += "]";

  std::string out = "{\n";
  out += fmt::format("  \"format\": {},\n", quoted(std::string(kFormat)));
  out += "  \"config\": {\n";
  out += fmt::format("    \"num_topics\": {},\n", c.num_topics);
  out += fmt::format("    \"alpha\": {},\n", real(c.alpha));
  out += fmt::format("    \"beta\": {},\n", real(c.beta));
  out += fmt::format("    \"burn_in_sweeps\": {},\n", c.burn_in_sweeps);
  out += fmt::format("    \"total_sweeps\": {},\n", c.total_sweeps);
  out += fmt::format("    \"seed\": {},\n", c.seed);
  out += fmt::format("    \"stages\": {},\n", b.stages);
  out += fmt::format("    \"base_seed\": {},\n", b.base_seed);
  out += fmt::format("    \"top_n_support\": {},\n", b.top_n_support);
  out += "    \"pipeline\": {\n";
  out += fmt::format("      \"lowercase\": {},\n", p.lowercase);
  out += fmt::format("      \"strip_punctuation\": {},\n", p.strip_punctuation);
  out += fmt::format("      \"min_token_len\": {},\n", p.min_token_len);
  out += fmt::format("      \"stopwords\": {},\n", stopwords);
  out += fmt::format("      \"prefix_stem\": {},\n",
                     p.prefix_stem ? std::to_string(*p.prefix_stem) : "null");
  out += fmt::format("      \"drop_empty_docs\": {}\n", p.drop_empty_docs);
  out += "    }\n  },\n";

  out += "  \"vocabulary\": [";
  for (std::size_t w = 0; w < m.vocabulary.size(); ++w) {
    out += (w == 0 ? "" : ", ") + quoted(m.vocabulary.word(static_cast<WordId>(w)));
  }
  out += "],\n  \"phi\": ";
  write_matrix(out, m.phi);
  out += ",\n  \"theta\": ";
  write_matrix(out, m.theta);
  out += "\n}\n";
  return out;
}

ModelBundle parse_model(const std::string& json_text) {
  try {
    const auto j = nlohmann::json::parse(json_text);
    if (j.value("format", std::string{}) != kFormat) {
      throw InputError("not an n-stage LDA model file");
    }
    const auto& c = j.at("config");
    ModelBundle b;
    auto& cfg = b.model.config;
    cfg.num_topics = c.at("num_topics").get<std::size_t>();
    cfg.alpha = c.at("alpha").get<double>();
    cfg.beta = c.at("beta").get<double>();
    cfg.burn_in_sweeps = c.at("burn_in_sweeps").get<std::size_t>();
    cfg.total_sweeps = c.at("total_sweeps").get<std::size_t>();
    cfg.seed = c.at("seed").get<std::uint64_t>();
    cfg.validate();
    b.stages = c.at("stages").get<std::size_t>();
    b.base_seed = c.at("base_seed").get<std::uint64_t>();
    b.top_n_support = c.value("top_n_support", std::size_t{0});

    const auto& p = c.at("pipeline");
    b.pipeline.lowercase = p.at("lowercase").get<bool>();
    b.pipeline.strip_punctuation = p.at("strip_punctuation").get<bool>();
    b.pipeline.min_token_len = p.at("min_token_len").get<std::size_t>();
    b.pipeline.stopwords = p.at("stopwords").get<std::set<std::string>>();
    if (!p.at("prefix_stem").is_null()) {
      b.pipeline.prefix_stem = p.at("prefix_stem").get<std::size_t>();
    }
    b.pipeline.drop_empty_docs = p.at("drop_empty_docs").get<bool>();
    b.pipeline.validate();

    b.model.vocabulary =
        Vocabulary(j.at("vocabulary").get<std::vector<std::string>>());
    const auto K = cfg.num_topics;
    const auto V = b.model.vocabulary.size();
    b.model.phi = read_matrix(j.at("phi"), K, V, "phi");
    const auto& theta = j.at("theta");
    b.model.theta = read_matrix(theta, theta.size(), K, "theta");
    return b;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(fmt::format("malformed model file: {}", e.what()));
  }
}

void save_model(const ModelBundle& bundle, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError(fmt::format("cannot write '{}'", path.string()));
  out << serialize_model(bundle);
  out.flush();
  if (!out) throw InputError(fmt::format("error writing '{}'", path.string()));
}

ModelBundle load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(fmt::format("cannot read model '{}'", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str());
}

}  // namespace nlda
