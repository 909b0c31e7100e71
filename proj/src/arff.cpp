#include "nlda/arff.hpp"

#include "nlda/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <fstream>

namespace nlda {

namespace {

std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return s;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

class Cursor {
 public:
  Cursor(const std::string& s, std::size_t line) : s_(s), line_(line) {}

  void skip_space() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }
  bool done() {
    skip_space();
    return pos_ >= s_.size();
  }
  char peek() {
    skip_space();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }
  void expect(char c) {
    if (peek() != c) fail(fmt::format("expected '{}'", c));
    ++pos_;
  }
  std::string rest() {
    skip_space();
    return trim(s_.substr(pos_));
  }

  /// A quoted string, or a bare run up to whitespace or any of `stops`.
  std::string token(std::string_view stops) {
    skip_space();
    if (pos_ >= s_.size()) fail("unexpected end of line");
    const char q = s_[pos_];
    if (q == '\'' || q == '"') {
      ++pos_;
      std::string out;
      while (pos_ < s_.size() && s_[pos_] != q) {
        if (s_[pos_] == '\\' && pos_ + 1 < s_.size()) ++pos_;
        out.push_back(s_[pos_++]);
      }
      if (pos_ >= s_.size()) fail("unterminated quote");
      ++pos_;
      return out;
    }
    const auto start = pos_;
    while (pos_ < s_.size() && s_[pos_] != ' ' && s_[pos_] != '\t' &&
           stops.find(s_[pos_]) == std::string_view::npos) {
      ++pos_;
    }
    if (pos_ == start) fail("empty token");
    return s_.substr(start, pos_ - start);
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw InputError(fmt::format("ARFF line {}: {}", line_, what));
  }

 private:
  const std::string& s_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

}  // namespace

ArffData parse_arff(std::istream& in) {
  ArffData data;
  bool in_data = false;
  bool seen_relation = false;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line.front() == '%') continue;
    Cursor cur(line, line_no);

    if (!in_data) {
      if (line.front() != '@') cur.fail("expected a header declaration");
      const std::string keyword = upper(cur.token(""));
      if (keyword == "@RELATION") {
        data.relation = cur.token("");
        seen_relation = true;
      } else if (keyword == "@ATTRIBUTE") {
        if (!seen_relation) cur.fail("@ATTRIBUTE before @RELATION");
        ArffAttribute attr;
        attr.name = cur.token("{");
        if (cur.peek() == '{') {
          cur.expect('{');
          attr.type = "NOMINAL";
          while (cur.peek() != '}') {
            attr.values.push_back(cur.token(",}"));
            if (cur.peek() == ',') cur.expect(',');
          }
          cur.expect('}');
        } else {
          attr.type = upper(cur.rest());
          if (attr.type == "REAL" || attr.type == "INTEGER") attr.type = "NUMERIC";
          if (attr.type != "NUMERIC" && attr.type != "STRING") {
            cur.fail(fmt::format("unsupported attribute type '{}'", attr.type));
          }
        }
        data.attributes.push_back(std::move(attr));
      } else if (keyword == "@DATA") {
        if (data.attributes.empty()) cur.fail("@DATA without attributes");
        in_data = true;
      } else {
        cur.fail(fmt::format("unknown declaration '{}'", keyword));
      }
      continue;
    }

    if (line.front() == '{') cur.fail("sparse rows are not supported");
    std::vector<std::string> row;
    while (true) {
      row.push_back(cur.token(","));
      if (cur.done()) break;
      cur.expect(',');
    }
    if (row.size() != data.attributes.size()) {
      cur.fail(fmt::format("row has {} values for {} attributes", row.size(),
                           data.attributes.size()));
    }
    for (std::size_t i = 0; i < row.size(); ++i) {
      const auto& attr = data.attributes[i];
      if (row[i] == "?") continue;
      if (attr.type == "NUMERIC") {
        std::size_t used = 0;
        try {
          (void)std::stod(row[i], &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used != row[i].size()) {
          cur.fail(fmt::format("'{}' is not numeric", row[i]));
        }
      } else if (attr.type == "NOMINAL" &&
                 std::find(attr.values.begin(), attr.values.end(), row[i]) ==
                     attr.values.end()) {
        cur.fail(fmt::format("'{}' is not a declared value of '{}'", row[i],
                             attr.name));
      }
    }
    data.rows.push_back(std::move(row));
  }
  if (!in_data) throw InputError("ARFF input has no @DATA section");
  return data;
}

ArffData parse_arff_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(fmt::format("cannot read ARFF file '{}'", path));
  return parse_arff(in);
}

std::string arff_quote(const std::string& s) {
  const bool needs = s.empty() || s == "?" ||
                     s.find_first_of(" \t,{}'\"%\\") != std::string::npos;
  if (!needs) return s;
  std::string out = "'";
  for (char c : s) {
    if (c == '\'' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('\'');
  return out;
}

}  // namespace nlda
