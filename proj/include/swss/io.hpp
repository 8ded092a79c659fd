#pragma once

#include <optional>
#include <string>

#include <Eigen/Core>
#include <json.hpp>

#include "swss/network.hpp"

namespace swss {

using Json = nlohmann::ordered_json;

/// A network file: the model plus optional analysis defaults.
struct SpecFile {
  NetworkSpec spec;
  std::optional<Eigen::VectorXd> p;
  std::optional<Edge> anchor;
};

/// Throws SpecParseError on malformed JSON, wrong types or unknown ids, and
/// EdgeRateMissing for an edge without "mu".
auto parse_spec(const Json& doc) -> SpecFile;
auto parse_spec_text(const std::string& text) -> SpecFile;
auto load_spec(const std::string& path) -> SpecFile;

/// Inverse of parse_spec.
auto spec_to_json(const SpecFile& file) -> Json;

/// Rounds to 12 significant digits so dumps are stable; non-finite -> null.
auto round12(double v) -> Json;
auto to_json(const Eigen::VectorXd& v) -> Json;
auto to_json(const Eigen::MatrixXd& m) -> Json;  // array of rows

/// "%.12g".
auto format12(double v) -> std::string;

/// Writes `doc.dump(2)` plus a newline, creating parent directories.
void write_json(const std::string& path, const Json& doc);

}  // namespace swss
