#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "nulltube/cli.hpp"

using namespace nulltube;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

}  // namespace

TEST_CASE("exit codes") {
  CHECK(run({"chart-info", "--chart", "minkowski"}).code == 0);
  CHECK(run({"chart-info", "--chart", "no-such-chart"}).code == 2);
  CHECK(run({"surface", "--grid", "17"}).code == 2);
  CHECK(run({"surface", "--grid", "1024"}).code == 2);
  CHECK(run({"chart-info", "--format", "xml"}).code == 2);
  CHECK(run({"no-such-command"}).code == 2);
  CHECK(run({"find-marginal", "--chart", "minkowski", "--s0", "2"}).code == 2);  // missing bracket
  CHECK(run({"find-marginal", "--chart", "minkowski", "--s0", "2", "--sbar0", "1", "--bracket", "1", "9"}).code == 2);
  const Run none = run({"find-marginal", "--chart", "minkowski", "--s0", "2", "--bracket", "1", "9", "--grid", "16"});
  CHECK(none.code == 4);
  CHECK(none.err.find("no marginal surface") != std::string::npos);
  CHECK(run({"chart-info", "--chart", "schwarzschild", "--param", "M=-1"}).code == 2);
}

TEST_CASE("csv headers") {
  const Run r = run({"residuals", "--chart", "minkowski", "--samples", "3", "--format", "csv"});
  CHECK(r.code == 0);
  CHECK(first_line(r.out) == "s,sbar,th1,th2,residual,value,status");
  const Run s = run({"surface", "--chart", "minkowski", "--grid", "64", "--format", "csv"});
  CHECK(s.code == 0);
  CHECK(first_line(s.out).rfind("i,j,th1,th2,f,fbar,tr_chi", 0) == 0);
}

TEST_CASE("json reports") {
  const Run r = run({"find-marginal", "--chart", "schwarzschild", "--sbar0", "0.5", "--bracket", "-0.4", "0.4",
                     "--grid", "16"});
  REQUIRE(r.code == 0);
  const nlohmann::json j = nlohmann::json::parse(r.out);
  CHECK(j["schema"] == 1);
  CHECK(j["command"] == "find-marginal");
  CHECK(j["family"] == "incoming");
  CHECK(std::abs(j["area_radius"]["max"].get<double>() - 2.0) < 1e-8);
  CHECK(std::abs(j["area_radius"]["min"].get<double>() - 2.0) < 1e-8);

  const Run v = run({"verify-tube", "--tube", "null-hyperplane", "--levels", "2", "--bumps", "1"});
  REQUIRE(v.code == 0);
  const nlohmann::json vj = nlohmann::json::parse(v.out);
  CHECK(vj["theorem_consistent"] == true);
  CHECK(vj["scan"]["all_sections_marginal"] == true);
  CHECK(vj["classification"]["class"] == "null");
}

TEST_CASE("reproducible output") {
  const std::vector<std::string> args = {"surface", "--chart", "minkowski_shifted", "--grid", "64", "--seed", "7"};
  const Run a = run(args), b = run(args);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  std::vector<std::string> other = args;
  other.back() = "8";
  CHECK(run(other).out != a.out);
}

TEST_CASE("out file") {
  const auto path = std::filesystem::temp_directory_path() / "nulltube_test_cli.json";
  std::filesystem::remove(path);
  const Run r = run({"verify-tube", "--tube", "spacelike-hyperplane", "--levels", "2", "--bumps", "1", "--report",
                     path.string()});
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream in(path);
  REQUIRE(in.good());
  const nlohmann::json j = nlohmann::json::parse(in);
  CHECK(j["classification"]["class"] == "spacelike");
  std::filesystem::remove(path);
}

TEST_CASE("coarse surface grid fails verification") {
  const Run r = run({"surface", "--chart", "minkowski", "--grid", "16"});
  CHECK(r.code == 5);
  CHECK(nlohmann::json::parse(r.out)["pass"] == false);
}
