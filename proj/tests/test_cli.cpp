#include "cli.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <sstream>

namespace {

struct Outcome
{
	int code;
	std::string out, err;
};

Outcome run(std::vector<std::string> args)
{
	std::ostringstream out, err;
	int code = qheis::cli::run(args, out, err);
	return {code, out.str(), err.str()};
}

} // namespace

TEST(Cli, BracketExample)
{
	auto r = run({"bracket", "--algebra", "bhatq", "--r", "1", "--s", "0", "--m", "3", "--n", "-3"});
	EXPECT_EQ(r.code, 0);
	EXPECT_EQ(r.out, "-3\n");
}

TEST(Cli, PhiProductExample)
{
	auto r = run({"phi-product", "--algebra", "hq", "--r", "1", "--s", "0", "--n", "0", "--level", "symbolic", "--window", "4"});
	EXPECT_EQ(r.code, 0);
	// l / (q - q^-1) in canonical form
	EXPECT_EQ(r.out, "((q*l)/(q^2 - 1))*1_W\n");
	auto z = run({"phi-product", "--algebra", "hq", "--r", "2", "--s", "0", "--n", "0", "--window", "4"});
	EXPECT_EQ(z.out, "0\n");
}

TEST(Cli, PhiProductAtRationalLevel)
{
	auto r = run({"phi-product", "--algebra", "hq", "--r", "1", "--s", "0", "--n", "0", "--q", "2", "--level", "3", "--window", "3"});
	EXPECT_EQ(r.code, 0);
	EXPECT_EQ(r.out, "(2)*1_W\n"); // 3 / (2 - 1/2)
}

TEST(Cli, FockApply)
{
	auto r = run({"fock-apply", "--algebra", "hq", "--word", "b_2", "--state", "b_-2"});
	EXPECT_EQ(r.code, 0);
	EXPECT_EQ(r.out, "((q^2*l + l)/q)*|0>\n");
}

TEST(Cli, ExpandAndShapeError)
{
	auto r = run({"expand", "--kernel", "1/(1-q*x1/x2)^2", "--direction", "x2,x1", "--window", "2"});
	EXPECT_EQ(r.code, 0);
	EXPECT_NE(r.out.find("2*q*x2^-1 x1"), std::string::npos);
	auto bad = run({"expand", "--kernel", "1/(x1^2+x2^2)"});
	EXPECT_EQ(bad.code, 2);
	EXPECT_NE(bad.err.find('^'), std::string::npos);
	auto syn = run({"expand", "--kernel", "1/(1-q*x1"});
	EXPECT_EQ(syn.code, 2);
}

TEST(Cli, UsageErrorsExitTwo)
{
	EXPECT_EQ(run({}).code, 2);
	EXPECT_EQ(run({"frobnicate"}).code, 2);
	EXPECT_EQ(run({"verify", "--law", "eq-9.9"}).code, 2);
	EXPECT_EQ(run({"verify", "--law", "eq-3.5", "--window", "abc"}).code, 2);
	EXPECT_EQ(run({"verify", "--law", "eq-3.5", "--window", "0"}).code, 2);
	EXPECT_EQ(run({"verify", "--law", "eq-3.5", "--q", "3/5"}).code, 2); // level missing
	EXPECT_EQ(run({"verify", "--law", "eq-3.5", "--param", "novalue"}).code, 2);
	EXPECT_EQ(run({"suite", "nightly"}).code, 2);
	EXPECT_EQ(run({"bracket", "--algebra", "sl2", "--m", "1", "--n", "-1"}).code, 2);
	auto u = run({"verify", "--law", "eq-9.9"});
	EXPECT_NE(u.err.find("^^^^^^"), std::string::npos);
}

// Mutations injected through law parameters flip the exit code.
TEST(Cli, ExitCodeFollowsStatus)
{
	EXPECT_EQ(run({"verify", "--law", "eq-3.5", "--window", "4"}).code, 0);
	EXPECT_EQ(run({"verify", "--law", "eq-3.5", "--window", "4", "--param", "p=x1 - q*x2"}).code, 1);
	EXPECT_EQ(run({"verify", "--law", "eq-4.5", "--window", "4", "--param", "p=(x1 - x2)*(x1 - q*x2)^2"}).code, 1);
	EXPECT_EQ(run({"verify", "--law", "thm-3.4-products", "--window", "3", "--param", "p=x1 - x2"}).code, 1);
	EXPECT_EQ(run({"verify", "--law", "eq-3.3", "--law", "eq-3.5", "--window", "4", "--param", "p=x1 - q*x2"}).code, 1);
}

TEST(Cli, MachineReport)
{
	auto r = run({"verify", "--law", "eq-3.5", "--law", "eq-3.3", "--window", "3", "--json", "--no-timing"});
	ASSERT_EQ(r.code, 0);
	auto doc = nlohmann::json::parse(r.out);
	for (char const *k : {"suite", "params", "window", "status", "failures", "seed", "elapsed_ms"})
		EXPECT_TRUE(doc.contains(k)) << k;
	EXPECT_EQ(doc["status"], "pass");
	EXPECT_EQ(doc["seed"], 20240611);
	ASSERT_EQ(doc["laws"].size(), 2u);
	EXPECT_EQ(doc["laws"][0]["suite"], "eq-3.3"); // sorted by id
	EXPECT_EQ(doc["laws"][1]["params"]["mode"], "symbolic");

	auto f = run({"verify", "--law", "eq-3.5", "--window", "3", "--json", "--param", "p=x1 - q*x2"});
	auto bad = nlohmann::json::parse(f.out);
	EXPECT_EQ(bad["status"], "fail");
	ASSERT_FALSE(bad["failures"].empty());
	EXPECT_EQ(bad["failures"][0]["expected"], "0");
}

TEST(Cli, DeterministicReports)
{
	std::vector<std::string> args{"verify", "--law", "lemma-4.6", "--law", "eq-3.3", "--window", "3", "--json", "--no-timing", "--seed", "7"};
	auto a = run(args), b = run(args);
	EXPECT_EQ(a.out, b.out);
	args.push_back("--jobs");
	args.push_back("2");
	EXPECT_EQ(run(args).out, a.out);
}

TEST(Cli, RationalModeLabelled)
{
	auto r = run({"verify", "--law", "eq-3.3", "--window", "3", "--json", "--q", "3/5", "--level", "2"});
	ASSERT_EQ(r.code, 0);
	auto doc = nlohmann::json::parse(r.out);
	EXPECT_EQ(doc["params"]["mode"], "rational q=3/5 l=2");
	EXPECT_EQ(doc["laws"][0]["params"]["mode"], "rational q=3/5 l=2");
}
