#include "swss/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "swss/errors.hpp"

namespace swss {

namespace {

auto index_of(const std::vector<std::string>& ids, const std::string& id,
              const char* what) -> int {
  for (std::size_t k = 0; k < ids.size(); ++k) {
    if (ids[k] == id) return static_cast<int>(k);
  }
  throw Error(ErrorKind::SpecParseError, std::string("unknown ") + what + " id '" + id + "'");
}

auto id_string(const Json& v) -> std::string {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw Error(ErrorKind::SpecParseError, "ids must be strings or integers");
}

auto vector_field(const Json& doc, const char* key, std::size_t size, bool required)
    -> Eigen::VectorXd {
  if (!doc.contains(key)) {
    if (required) throw Error(ErrorKind::SpecParseError, std::string("missing field '") + key + "'");
    return Eigen::VectorXd::Zero(static_cast<Eigen::Index>(size));
  }
  const Json& arr = doc.at(key);
  if (!arr.is_array() || arr.size() != size) {
    std::ostringstream msg;
    msg << "field '" << key << "' must be an array of " << size << " numbers";
    throw Error(ErrorKind::SpecParseError, msg.str());
  }
  Eigen::VectorXd v(static_cast<Eigen::Index>(size));
  for (std::size_t k = 0; k < size; ++k) {
    if (!arr[k].is_number()) {
      throw Error(ErrorKind::SpecParseError, std::string("field '") + key + "' must hold numbers");
    }
    v(static_cast<Eigen::Index>(k)) = arr[k].get<double>();
  }
  return v;
}

}  // namespace

auto parse_spec(const Json& doc) -> SpecFile {
  try {
    if (!doc.is_object()) throw Error(ErrorKind::SpecParseError, "spec must be a JSON object");
    SpecFile out;
    NetworkSpec& s = out.spec;
    for (const auto& c : doc.at("classes")) s.classes.push_back(id_string(c));
    for (const auto& p : doc.at("pools")) s.pools.push_back(id_string(p));
    const std::size_t I = s.classes.size();
    const std::size_t J = s.pools.size();
    s.lambda = vector_field(doc, "lambda", I, true);
    s.lambda_hat = vector_field(doc, "lambda_hat", I, false);
    s.nu = vector_field(doc, "nu", J, true);
    s.nu_hat = vector_field(doc, "nu_hat", J, false);

    const Json& edges = doc.at("edges");
    if (!edges.is_array()) throw Error(ErrorKind::SpecParseError, "'edges' must be an array");
    s.mu.resize(static_cast<Eigen::Index>(edges.size()));
    s.mu_hat.resize(static_cast<Eigen::Index>(edges.size()));
    for (std::size_t k = 0; k < edges.size(); ++k) {
      const Json& e = edges[k];
      const int cls = index_of(s.classes, id_string(e.at("class")), "class");
      const int pool = index_of(s.pools, id_string(e.at("pool")), "pool");
      s.edges.push_back({cls, pool});
      if (!e.contains("mu")) {
        std::ostringstream msg;
        msg << "edge (" << s.classes[static_cast<std::size_t>(cls)] << ", "
            << s.pools[static_cast<std::size_t>(pool)] << ") has no service rate";
        throw Error(ErrorKind::EdgeRateMissing, msg.str());
      }
      s.mu(static_cast<Eigen::Index>(k)) = e.at("mu").get<double>();
      s.mu_hat(static_cast<Eigen::Index>(k)) = e.value("mu_hat", 0.0);
    }

    if (doc.contains("nth")) {
      const Json& n = doc.at("nth");
      NthSystemParams nth;
      nth.n = n.at("n").get<std::int64_t>();
      nth.lambda_n = vector_field(n, "lambda_n", I, true);
      nth.mu_n = vector_field(n, "mu_n", s.edges.size(), true);
      for (const auto& v : n.at("N_n")) nth.N_n.push_back(v.get<std::int64_t>());
      s.nth = nth;
    }
    if (doc.contains("p")) out.p = vector_field(doc, "p", I, true);
    if (doc.contains("anchor")) {
      const Json& a = doc.at("anchor");
      out.anchor = Edge{index_of(s.classes, id_string(a.at("class")), "class"),
                        index_of(s.pools, id_string(a.at("pool")), "pool")};
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::SpecParseError, e.what());
  }
}

auto parse_spec_text(const std::string& text) -> SpecFile {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::SpecParseError, e.what());
  }
  return parse_spec(doc);
}

auto load_spec(const std::string& path) -> SpecFile {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::SpecParseError, "cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_spec_text(buf.str());
}

auto spec_to_json(const SpecFile& file) -> Json {
  const NetworkSpec& s = file.spec;
  Json doc;
  doc["classes"] = s.classes;
  doc["pools"] = s.pools;
  doc["lambda"] = to_json(s.lambda);
  doc["lambda_hat"] = to_json(s.lambda_hat);
  doc["nu"] = to_json(s.nu);
  doc["nu_hat"] = to_json(s.nu_hat);
  Json edges = Json::array();
  for (std::size_t k = 0; k < s.edges.size(); ++k) {
    const auto e = static_cast<Eigen::Index>(k);
    edges.push_back({{"class", s.classes[static_cast<std::size_t>(s.edges[k].cls)]},
                     {"pool", s.pools[static_cast<std::size_t>(s.edges[k].pool)]},
                     {"mu", round12(s.mu(e))},
                     {"mu_hat", round12(s.mu_hat(e))}});
  }
  doc["edges"] = edges;
  if (s.nth) {
    doc["nth"] = {{"n", s.nth->n},
                  {"lambda_n", to_json(s.nth->lambda_n)},
                  {"mu_n", to_json(s.nth->mu_n)},
                  {"N_n", s.nth->N_n}};
  }
  if (file.p) doc["p"] = to_json(*file.p);
  if (file.anchor) {
    doc["anchor"] = {{"class", s.classes[static_cast<std::size_t>(file.anchor->cls)]},
                     {"pool", s.pools[static_cast<std::size_t>(file.anchor->pool)]}};
  }
  return doc;
}

auto format12(double v) -> std::string {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

auto round12(double v) -> Json {
  if (!std::isfinite(v)) return nullptr;
  const double r = std::strtod(format12(v).c_str(), nullptr);
  return r == 0.0 ? 0.0 : r;  // no negative zero
}

auto to_json(const Eigen::VectorXd& v) -> Json {
  Json arr = Json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) arr.push_back(round12(v(k)));
  return arr;
}

auto to_json(const Eigen::MatrixXd& m) -> Json {
  Json arr = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) arr.push_back(to_json(Eigen::VectorXd(m.row(r).transpose())));
  return arr;
}

void write_json(const std::string& path, const Json& doc) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << doc.dump(2) << "\n";
}

}  // namespace swss
