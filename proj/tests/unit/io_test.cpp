#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "swss/errors.hpp"
#include "swss/fixtures.hpp"
#include "swss/io.hpp"

using namespace swss;

namespace {

auto kind_of(const std::string& text) -> ErrorKind {
  try {
    parse_spec_text(text);
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error for " << text;
  return ErrorKind::PreconditionFailed;
}

const char* kN = R"({
  "classes": ["1", "2"], "pools": ["1", "2"],
  "lambda": [2, 0.5], "nu": [1, 1], "nu_hat": [1, 1],
  "edges": [{"class": "1", "pool": "1", "mu": 1},
            {"class": "1", "pool": "2", "mu": 2},
            {"class": "2", "pool": "2", "mu": 1}]
})";

}  // namespace

TEST(ParseSpec, NFixture) {
  const SpecFile f = parse_spec_text(kN);
  const NetworkSpec ref = fixtures::n_network();
  EXPECT_EQ(f.spec.classes, ref.classes);
  EXPECT_EQ(f.spec.pools, ref.pools);
  ASSERT_EQ(f.spec.edges.size(), ref.edges.size());
  for (std::size_t k = 0; k < ref.edges.size(); ++k) {
    EXPECT_EQ(f.spec.edges[k].cls, ref.edges[k].cls);
    EXPECT_EQ(f.spec.edges[k].pool, ref.edges[k].pool);
  }
  EXPECT_EQ(f.spec.mu, ref.mu);
  EXPECT_EQ(f.spec.lambda, ref.lambda);
  EXPECT_EQ(f.spec.lambda_hat, ref.lambda_hat);  // defaulted to zero
  EXPECT_EQ(f.spec.mu_hat, ref.mu_hat);
  EXPECT_FALSE(f.p.has_value());
  EXPECT_FALSE(f.anchor.has_value());
}

TEST(ParseSpec, Errors) {
  EXPECT_EQ(kind_of("{"), ErrorKind::SpecParseError);
  EXPECT_EQ(kind_of("[1, 2]"), ErrorKind::SpecParseError);
  EXPECT_EQ(kind_of(R"({"classes": ["1"], "pools": ["1"], "nu": [1], "edges": []})"),
            ErrorKind::SpecParseError);  // lambda missing
  EXPECT_EQ(kind_of(R"({"classes": ["1"], "pools": ["1"], "lambda": [1, 2], "nu": [1],
                        "edges": []})"),
            ErrorKind::SpecParseError);  // wrong length
  EXPECT_EQ(kind_of(R"({"classes": ["1"], "pools": ["1"], "lambda": [1], "nu": [1],
                        "edges": [{"class": "1", "pool": "9", "mu": 1}]})"),
            ErrorKind::SpecParseError);  // unknown pool
  EXPECT_EQ(kind_of(R"({"classes": ["1"], "pools": ["1"], "lambda": [1], "nu": [1],
                        "edges": [{"class": "1", "pool": "1"}]})"),
            ErrorKind::EdgeRateMissing);
  EXPECT_EQ(kind_of(R"({"classes": ["1"], "pools": ["1"], "lambda": ["x"], "nu": [1],
                        "edges": []})"),
            ErrorKind::SpecParseError);
}

TEST(ParseSpec, IntegerIdsAndExtras) {
  const SpecFile f = parse_spec_text(R"({
    "classes": [1], "pools": [7], "lambda": [3], "nu": [1.5],
    "edges": [{"class": 1, "pool": 7, "mu": 2, "mu_hat": 0.25}],
    "nth": {"n": 100, "lambda_n": [300], "mu_n": [2.025], "N_n": [150]},
    "p": [1], "anchor": {"class": 1, "pool": 7}})");
  EXPECT_EQ(f.spec.classes[0], "1");
  EXPECT_EQ(f.spec.pools[0], "7");
  EXPECT_DOUBLE_EQ(f.spec.mu_hat(0), 0.25);
  ASSERT_TRUE(f.spec.nth.has_value());
  EXPECT_EQ(f.spec.nth->n, 100);
  EXPECT_EQ(f.spec.nth->N_n, std::vector<std::int64_t>{150});
  ASSERT_TRUE(f.anchor.has_value());
  EXPECT_EQ(f.anchor->pool, 0);
}

TEST(SpecToJson, RoundTrip) {
  SpecFile f = parse_spec_text(kN);
  f.p = Eigen::Vector2d(0.25, 0.75);
  f.anchor = Edge{1, 1};
  const SpecFile g = parse_spec(spec_to_json(f));
  EXPECT_EQ(spec_to_json(g).dump(), spec_to_json(f).dump());
  EXPECT_EQ(*g.p, *f.p);
  EXPECT_EQ(g.anchor->cls, 1);
}

TEST(Round12, Formatting) {
  EXPECT_EQ(round12(0.1 + 0.2).dump(), "0.3");
  EXPECT_EQ(round12(-0.0).dump(), "0.0");
  EXPECT_EQ(round12(-1e-300 * 1e-300).dump(), "0.0");
  EXPECT_TRUE(round12(std::numeric_limits<double>::infinity()).is_null());
  EXPECT_TRUE(round12(std::nan("")).is_null());
  EXPECT_EQ(format12(1.0 / 3.0), "0.333333333333");
  EXPECT_EQ(to_json(Eigen::MatrixXd(Eigen::MatrixXd::Identity(2, 2))).dump(), "[[1.0,0.0],[0.0,1.0]]");
}
