#include <hardylab/config.hpp>

#include <filesystem>

#include "helpers.hpp"

using namespace hardylab;

namespace {

RunConfig sample() {
  RunConfig c;
  c.geometry.N = 6;
  c.geometry.k = 2;
  c.geometry.R = 0.125;
  c.geometry.n_r = 40;
  c.geometry.n_z = 12;
  c.weights.family = Family::SinPower;
  c.weights.A = 0.3;
  c.weights.beta = 0.75;
  c.weights.z0 = {0.1, 0.7};
  c.weights.b_profile = {1.0, 0.0, 0.5};
  c.solver.eigen.tol = 1e-9;
  c.solver.levels = {128, 256, 512};
  c.solver.gap_tolerance = 0.003;
  c.solver.lambda = -1.0 / 3.0;
  c.solver.epsilons = {0.0, 0.2};
  c.output.dir = "somewhere/out";
  c.output.dump_grid = true;
  return c;
}

}  // namespace

TEST(Config, RoundTrip) {
  const RunConfig c = sample();
  const std::string text = to_ini(c);
  const RunConfig back = parse_config(text);
  EXPECT_EQ(to_ini(back), text);
  EXPECT_EQ(back.geometry.N, 6);
  EXPECT_EQ(back.weights.z0, (std::vector<double>{0.1, 0.7}));
  EXPECT_EQ(back.solver.lambda, -1.0 / 3.0);  // 17 digits survive exactly
  ASSERT_TRUE(back.solver.gap_tolerance.has_value());
  EXPECT_EQ(*back.solver.gap_tolerance, 0.003);
  EXPECT_TRUE(back.output.dump_grid);
}

TEST(Config, DefaultsRoundTrip) {
  const std::string text = to_ini(RunConfig{});
  EXPECT_EQ(to_ini(parse_config(text)), text);
  EXPECT_FALSE(parse_config(text).solver.gap_tolerance.has_value());
}

TEST(Config, PartialFileKeepsDefaults) {
  const RunConfig c = parse_config("[geometry]\ndimension = 4\n# comment\n; other comment\n");
  EXPECT_EQ(c.geometry.N, 4);
  EXPECT_EQ(c.geometry.n_r, RunConfig{}.geometry.n_r);
}

TEST(Config, Rejections) {
  EXPECT_HL_ERROR(parse_config("[geometry]\ndimensoin = 4\n"), InvalidConfig);
  EXPECT_HL_ERROR(parse_config("[geometry]\ndimension = 4\ndimension = 5\n"), InvalidConfig);
  EXPECT_HL_ERROR(parse_config("[nonsense]\n"), InvalidConfig);
  EXPECT_HL_ERROR(parse_config("dimension = 4\n"), InvalidConfig);
  EXPECT_HL_ERROR(parse_config("[geometry]\ndimension = four\n"), InvalidConfig);
  EXPECT_HL_ERROR(parse_config("[geometry]\nn_r = 12x\n"), InvalidConfig);
  EXPECT_HL_ERROR(parse_config("[solver]\ninner = lu\n"), InvalidConfig);
  EXPECT_HL_ERROR(parse_config("[geometry]\nno equals sign\n"), InvalidConfig);
}

TEST(Config, Lists) {
  EXPECT_EQ(parse_int_list("1, 2,3"), (std::vector<int>{1, 2, 3}));
  EXPECT_EQ(parse_double_list("0.5,-1e-3"), (std::vector<double>{0.5, -1e-3}));
  EXPECT_TRUE(parse_double_list("").empty());
  EXPECT_HL_ERROR(parse_int_list("1,,2"), InvalidConfig);
  EXPECT_HL_ERROR(parse_double_list("1,x"), InvalidConfig);
}

TEST(Config, FormatDouble) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(1.0), "1");
  EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(Config, ModelBlocksIgnoreSolverAndOutput) {
  RunConfig a = sample(), b = sample();
  b.solver.eigen.tol = 1e-6;
  b.output.dir = "elsewhere";
  EXPECT_EQ(model_blocks(a), model_blocks(b));
  b.geometry.n_r += 1;
  EXPECT_NE(model_blocks(a), model_blocks(b));
}

TEST(Config, LoadMissingFile) { EXPECT_HL_ERROR(load_config("/nonexistent/dir/x.ini"), IOError); }
