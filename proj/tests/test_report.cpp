#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "ipbt/errors.hpp"
#include "ipbt/report.hpp"
#include "test_support.hpp"

using namespace ipbt;
using namespace ipbt::testing;
using io::Json;

namespace {

bool all_verified(const RunReport& r) {
  for (const auto& c : r.verification) {
    if (!c.passed) return false;
  }
  return true;
}

}  // namespace

TEST(Cli, SolveRswMotivating) {
  const auto r = cmd_solve("rsw", load("motivating"), {});
  EXPECT_TRUE(r.verified());
  const Json j = r.to_json();
  EXPECT_EQ(j["outputs"]["allocation"]["t"][1][1], "800/3");
  EXPECT_EQ(j["outputs"]["allocation"]["q"][1][1], "2/3");
  EXPECT_EQ(j["outputs"]["seller_payoffs"][0], 200);
  EXPECT_EQ(j["outputs"]["certificate"]["pi1"][0], "5/6");
  EXPECT_EQ(j["command"], "solve rsw");
}

TEST(Cli, WeightsOption) {
  RunOptions o;
  o.weights = parse_weights("1,3");
  const auto r = cmd_solve("rsw", load("motivating"), o);
  EXPECT_TRUE(all_verified(r));
  EXPECT_EQ(r.outputs["weighted_seller_payoffs"], r.outputs["seller_payoffs"]);
}

TEST(Cli, SolveOtherKinds) {
  const auto eff = cmd_solve("efficient", load("example1"), {});
  EXPECT_EQ(eff.outputs["allocation"]["q"], Json::parse("[[1,1],[1,1]]"));

  const auto full = cmd_solve("full-info", load("one_type_seller"), {});
  EXPECT_TRUE(full.verified());
  EXPECT_EQ(full.outputs["menus"][0]["threshold"], 2);
  EXPECT_EQ(full.outputs["menus"][0]["price"], 25);

  RunOptions iir;
  iir.seller_iir = true;
  const auto ea = cmd_solve("ex-ante", load("motivating"), iir);
  EXPECT_EQ(ea.outputs["value"], 250);
  EXPECT_TRUE(ea.outputs["seller_iir"].get<bool>());

  EXPECT_THROW(cmd_solve("nonsense", load("motivating"), {}), InputError);
}

TEST(Cli, CheckFeasibleAndCore) {
  const auto env = load("b2");
  const auto none = Allocation::no_trade(env);
  const auto f = cmd_check("feasible", env, none, {});
  EXPECT_TRUE(f.outputs["verdict"].get<bool>());
  EXPECT_TRUE(f.outputs["constraints"]["violations"].empty());

  const auto c = cmd_check("core", env, none, {});
  EXPECT_FALSE(c.outputs["verdict"].get<bool>());
  EXPECT_EQ(c.outputs["coalitions_checked"].get<int>(), 3);
  EXPECT_TRUE(c.outputs.contains("blocking_coalition"));

  try {
    cmd_check("core", env, std::nullopt, {});
    FAIL() << "expected MissingAllocation";
  } catch (const InputError& e) {
    EXPECT_EQ(e.code(), "MissingAllocation");
  }
}

TEST(Cli, CheckRefinements) {
  const auto snp = cmd_check("snp", load("b3"), std::nullopt, {});
  EXPECT_FALSE(snp.outputs["verdict"].get<bool>());
  EXPECT_TRUE(snp.outputs["allocation"].is_null());
  EXPECT_TRUE(snp.verified());

  const auto fgp = cmd_check("fgp", load("b3"), std::nullopt, {});
  EXPECT_TRUE(fgp.outputs["verdict"].get<bool>());
  EXPECT_TRUE(fgp.outputs["spot_check_agrees"].get<bool>());

  const auto strong = cmd_check("strong-solution", load("example1"), std::nullopt, {});
  EXPECT_FALSE(strong.outputs["verdict"].get<bool>());
  EXPECT_TRUE(strong.outputs.contains("dominating_payoffs"));
}

TEST(Cli, ReportMotivating) {
  const auto dir = std::filesystem::temp_directory_path() / "ipbt_report_test";
  std::filesystem::remove_all(dir);
  RunOptions o;
  o.csv_dir = dir.string();
  const auto r = cmd_report(load("motivating"), o);
  EXPECT_TRUE(r.verified());
  const auto& ps = r.outputs["payoff_set"];
  ASSERT_EQ(ps["vertices"].size(), 3u);
  EXPECT_EQ(ps["vertices"][1]["u1"], "700/3");
  EXPECT_EQ(r.outputs["ex_ante_values"]["optimal"], 250);
  EXPECT_EQ(r.outputs["ex_ante_values"]["rsw"], "700/3");
  EXPECT_FALSE(r.outputs["checks"]["strong_solution"].get<bool>());
  ASSERT_TRUE(std::filesystem::exists(dir / "plot.csv"));
  std::ifstream poly(dir / "polygon.csv");
  std::string header, first;
  std::getline(poly, header);
  std::getline(poly, first);
  EXPECT_EQ(header, "u1,u2");
  EXPECT_EQ(first, "200,800/3");
  std::filesystem::remove_all(dir);
}

TEST(Cli, ReportIsDeterministic) {
  const auto env = load("b2");
  const auto a = io::canonical_dump(cmd_report(env, {}).to_json());
  const auto b = io::canonical_dump(cmd_report(env, {}).to_json());
  EXPECT_EQ(a, b);
  EXPECT_EQ(cmd_report(env, {}).digest, io::environment_digest(env));
  EXPECT_EQ(io::environment_digest(env).size(), 64u);
  EXPECT_NE(io::environment_digest(env), io::environment_digest(load("b3")));
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(exit_code_for(InputError("X", "y")), kExitInput);
  EXPECT_EQ(exit_code_for(PreconditionError("X", "y")), kExitPrecondition);
  EXPECT_EQ(exit_code_for(VerificationError("X", "y")), kExitVerification);
  EXPECT_EQ(exit_code_for(std::runtime_error("boom")), kExitVerification);
}

TEST(Cli, ParseWeights) {
  EXPECT_EQ(parse_weights("1/2,3"), V({"1/2", "3"}));
  EXPECT_THROW(parse_weights(""), InputError);
  EXPECT_THROW(parse_weights("1,a"), InputError);
}

TEST(Io, EnvironmentRoundTrip) {
  for (const char* name : {"motivating", "example3", "one_type_seller"}) {
    const auto env = load(name);
    const auto again = io::environment_from_json(io::to_json(env));
    EXPECT_EQ(again.data().p1, env.data().p1);
    EXPECT_EQ(again.data().v22, env.data().v22);
    EXPECT_EQ(io::environment_digest(again), io::environment_digest(env));
  }
}

TEST(Io, AllocationRoundTripAndRationalEncoding) {
  const auto env = load("motivating");
  const auto g = A(env, M({{"1", "1"}, {"0", "2/3"}}), M({{"200", "200"}, {"0", "800/3"}}));
  const Json j = io::to_json(g);
  EXPECT_TRUE(j["q"][0][0].is_number_integer());
  EXPECT_TRUE(j["q"][1][1].is_string());
  EXPECT_EQ(io::allocation_from_json(env, j), g);
  EXPECT_EQ(io::rational_from_json(Json("-3/6"), "x"), R("-1/2"));
  EXPECT_THROW(io::rational_from_json(Json(0.5), "x"), InputError);  // inputs must be exact
}

TEST(Io, ParseErrors) {
  const auto env = load("motivating");
  auto expect_parse_error = [](auto&& fn) {
    try {
      fn();
      FAIL() << "expected an input error";
    } catch (const InputError& e) {
      EXPECT_FALSE(e.code().empty());
    }
  };
  expect_parse_error([] { io::rational_from_json(Json("1/0"), "x"); });
  expect_parse_error([] { io::rational_from_json(Json(true), "x"); });
  expect_parse_error([] { io::environment_from_json(Json::parse(R"({"x_size": 2})")); });
  expect_parse_error([&] { io::allocation_from_json(env, Json::parse(R"({"q": [[1]]})")); });
  expect_parse_error([] { io::load_environment("/nonexistent/env.json"); });
  expect_parse_error([] { io::load_environment(data_path("invalid_prior")); });
}
