#pragma once

#include <istream>
#include <string>
#include <vector>

namespace nlda {

struct ArffAttribute {
  std::string name;
  /// "NUMERIC", "STRING", or "NOMINAL" (then `values` holds the classes).
  std::string type;
  std::vector<std::string> values;
};

struct ArffData {
  std::string relation;
  std::vector<ArffAttribute> attributes;
  std::vector<std::vector<std::string>> rows;
};

/// Minimal ARFF reader: dense data only, `%` comments, single- or
/// double-quoted names and values. Throws InputError on malformed input,
/// including rows whose width differs from the attribute count and
/// nominal values outside the declared set.
ArffData parse_arff(std::istream& in);
ArffData parse_arff_file(const std::string& path);

/// Quotes `s` for ARFF when it contains separators, quotes or spaces.
std::string arff_quote(const std::string& s);

}  // namespace nlda
