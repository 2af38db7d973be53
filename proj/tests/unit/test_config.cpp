#include <sstream>

#include <gtest/gtest.h>

#include "proxipair/config.hpp"

using namespace proxipair;

namespace {

const char* kBase = R"(dimension = 2
[set_a]
type = box
lo = 0, 0
hi = 1, 1
[set_b]
type = box
lo = 0, 2
hi = 1, 3
)";

ProblemConfig load(const std::string& text) {
  std::istringstream in(text);
  return load_config(ConfigDocument::parse(in, "test.cfg"));
}

ConfigError load_error(const std::string& text) {
  try {
    load(text);
  } catch (const ConfigError& e) {
    return e;
  }
  ADD_FAILURE() << "expected a config error";
  return ConfigError("", 0, 0, "", "");
}

}  // namespace

TEST(Config, LoadsBundledSinExample) {
  const ProblemConfig c = load_config(std::string(PROXIPAIR_SOURCE_DIR) + "/configs/paper_example.cfg");
  EXPECT_EQ(c.dimension, 2u);
  EXPECT_EQ(c.map.name(), "sin_example");
  EXPECT_FALSE(c.map.is_contraction());
  ASSERT_TRUE(c.solver.anchor.has_value());
  EXPECT_EQ(c.solver.anchor->a0, (Vector{0, 1}));
  EXPECT_EQ(c.solver.schedule.front(), 2);
  EXPECT_EQ(c.solver.schedule.back(), 1024);
  ASSERT_TRUE(c.stability.has_value());
  EXPECT_EQ(c.stability->epsilons.size(), 3u);
  ASSERT_TRUE(c.oracle.has_value());
  EXPECT_DOUBLE_EQ(c.oracle->resolution, 0.05);
}

TEST(Config, AnchoredMapWithMatrices) {
  const ProblemConfig c = load(std::string(kBase) + R"(
[map]
family = anchored_affine   # trailing comment
lambda = 0.5
a_star = 0, 1
b_star = 0, 2
iso_ab = 1, 0; 0, -1
iso_ba = 1, 0; 0, -1
)");
  EXPECT_TRUE(c.map.is_contraction());
  EXPECT_DOUBLE_EQ(*c.map.declared_lambda(), 0.5);
  EXPECT_FALSE(c.stability.has_value());
}

TEST(Config, LambdaOutOfRangeNamesTheField) {
  const ConfigError e = load_error(std::string(kBase) + "[map]\nfamily = anchored_affine\nlambda = 1.5\n");
  EXPECT_EQ(e.line(), 12);
  EXPECT_EQ(e.column(), 10);
  EXPECT_EQ(e.field(), "[map] lambda");
  EXPECT_NE(std::string(e.what()).find("lambda"), std::string::npos);
}

TEST(Config, PositionalErrors) {
  EXPECT_EQ(load_error("dimension = two\n").column(), 13);
  const ConfigError bad_num = load_error("dimension = 2\n[set_a]\ntype = box\nlo = 0, x\nhi = 1, 1\n");
  EXPECT_EQ(bad_num.line(), 4);
  EXPECT_EQ(bad_num.column(), 9);
  EXPECT_EQ(load_error(std::string(kBase) + "[mapp]\n").field(), "[mapp]");
  EXPECT_EQ(load_error(std::string(kBase) + "[map]\nfamily = sin_example\ncolour = red\n").field(), "[map] colour");
  EXPECT_EQ(load_error(std::string(kBase) + "[map]\nfamily = warp\n").field(), "[map] family");
  EXPECT_EQ(load_error("dimension = 2\ndimension = 3\n").line(), 2);
  EXPECT_EQ(load_error("dimension 2\n").line(), 1);
  EXPECT_EQ(load_error("[set_a\n").line(), 1);
  EXPECT_EQ(load_error("seed = 1\n").field(), "dimension");
}

TEST(Config, SemanticErrors) {
  // wrong coordinate count
  EXPECT_EQ(load_error("dimension = 3\n[set_a]\ntype = box\nlo = 0, 0\nhi = 1, 1, 1\n").field(), "[set_a] lo");
  // empty polytope
  EXPECT_EQ(load_error("dimension = 1\n[set_a]\ntype = polytope\nhalfspace = 1 <= -1\nhalfspace = -1 <= -1\n").line(), 4);
  // sin_example off its domain
  EXPECT_EQ(load_error("dimension = 2\n[set_a]\ntype = box\nlo = 0, 0\nhi = 2, 1\n[set_b]\ntype = box\nlo = 0, 2\n"
                       "hi = 1, 3\n[map]\nfamily = sin_example\n")
                .field(),
            "[map] family");
  // start outside A
  EXPECT_EQ(load_error(std::string(kBase) + "[map]\nfamily = sin_example\n[solver]\nstart_a = 5, 5\nstart_b = 0, 2\n")
                .field(),
            "[solver] start_a");
  // anchored map whose image leaves B
  EXPECT_EQ(load_error(std::string(kBase) + "[map]\nfamily = anchored_affine\nlambda = 0.5\na_star = 0, 1\n"
                                            "b_star = 0, 2\n")
                .field(),
            "[map] family");
  // contraction bound on a nonexpansive map
  EXPECT_EQ(load_error(std::string(kBase) + "[map]\nfamily = sin_example\n[stability]\nepsilon = 0.1\n"
                                            "bounds = contraction\n")
                .field(),
            "[stability] bounds");
  EXPECT_EQ(load_error(std::string(kBase) + "[map]\nfamily = sin_example\n[solver]\nschedule = 4, 2\n").field(),
            "[solver] schedule");
}

TEST(Config, MissingFileIsAConfigError) { EXPECT_THROW(load_config("/nonexistent/x.cfg"), ConfigError); }
