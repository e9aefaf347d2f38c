#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "commands.hpp"

using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = nads::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

json result_line(const std::string& s) {
  auto pos = s.rfind("# result: ");
  REQUIRE(pos != std::string::npos);
  return json::parse(s.substr(pos + 10));
}

const std::string kFigure1 = R"({"rule": {"kind": "figure1"}})";
const std::string kTent = R"({"rule": {"kind": "constant", "map": "tent"}})";

}  // namespace

TEST_CASE("exit codes") {
  CHECK(run({"validate", "--descriptor", kFigure1}).code == 0);
  auto bad = run({"validate", "--descriptor", R"({"rule": {"kind": "spiral"}})"});
  CHECK(bad.code == 2);
  CHECK(!bad.err.empty());
  CHECK(run({"validate", "--descriptor", "/nonexistent/system.json"}).code == 2);
  CHECK(run({"profile", "--descriptor", kTent, "--pair", "0.1,1.5"}).code == 2);
  CHECK(run({"bogus"}).code == 2);
  CHECK(run({"entropy", "--descriptor", kFigure1, "--n-max", "9", "--budget", "100"}).code == 3);

  setenv("NADS_BUDGET", "100", 1);
  CHECK(run({"entropy", "--descriptor", kFigure1, "--n-max", "9"}).code == 3);
  // the flag wins over the environment
  CHECK(run({"entropy", "--descriptor", kFigure1, "--n-max", "4", "--budget", "100000"}).code == 0);
  unsetenv("NADS_BUDGET");
  CHECK(run({"entropy", "--descriptor", kFigure1, "--n-max", "4"}).code == 0);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("classify and construct") {
  auto r = run({"classify", "--descriptor", kFigure1});
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["verdict"] == "pointwise_only");

  auto c = run({"construct", "--kind", "shrink", "--N", "3", "--descriptor", kFigure1});
  REQUIRE(c.code == 0);
  auto desc = json::parse(c.out);
  CHECK(desc["rule"]["kind"] == "shrink");
  auto r2 = run({"classify", "--descriptor", desc.dump()});
  REQUIRE(r2.code == 0);
  CHECK(json::parse(r2.out)["verdict"] == "uniform");

  auto t = run({"construct", "--kind", "tail_splice", "--eps", "1/20", "--descriptor", desc.dump()});
  REQUIRE(t.code == 0);
  CHECK(json::parse(t.out)["rule"]["kind"] == "tail_splice");
  CHECK(run({"construct", "--kind", "tail_splice", "--eps", "1/20", "--descriptor", kFigure1, "--scan-max", "6"})
            .code == 2);
  CHECK(run({"construct", "--kind", "odometer", "--depth", "16"}).code == 0);
}

TEST_CASE("csv output carries the configuration") {
  auto r = run({"entropy", "--descriptor", kTent, "--n-max", "6", "--eps", "1/4,1/8"});
  REQUIRE(r.code == 0);
  std::string head = first_line(r.out);
  REQUIRE(head.rfind("# config: ", 0) == 0);
  auto cfg = json::parse(head.substr(10));
  CHECK(cfg["command"] == "entropy");
  CHECK(cfg["descriptor"]["rule"]["kind"] == "constant");
  CHECK(!cfg.contains("jobs"));
  auto res = result_line(r.out);
  CHECK(res["method"] == "lap_exact");
  CHECK(res["slopes"].size() == 2);
  CHECK(r.out.find("\nn,eps,s_n,method,slope\n") != std::string::npos);
}

TEST_CASE("output does not depend on the thread count") {
  std::vector<std::string> scan{"dcscan", "--descriptor", kFigure1, "--pairs", "12", "--seed", "5", "--horizon", "500"};
  auto a = scan, b = scan;
  a.insert(a.end(), {"--jobs", "1"});
  b.insert(b.end(), {"--jobs", "4"});
  auto ra = run(a), rb = run(b);
  REQUIRE(ra.code == 0);
  CHECK(ra.out == rb.out);
  CHECK(result_line(ra.out)["pairs"] == 12);

  std::vector<std::string> ent{"entropy", "--descriptor", kFigure1, "--method", "grid", "--grid-intervals", "500",
                               "--n-max", "4", "--eps", "1/10,1/20"};
  auto ea = ent, eb = ent;
  ea.insert(ea.end(), {"--jobs", "1"});
  eb.insert(eb.end(), {"--jobs", "3"});
  CHECK(run(ea).out == run(eb).out);
}

TEST_CASE("profile and sidecar files") {
  auto dir = std::filesystem::temp_directory_path() / "nads_cli_test";
  std::filesystem::create_directories(dir);
  auto out = (dir / "profile.csv").string();
  auto r = run({"profile", "--descriptor", kTent, "--schedule-pair", "--horizon", "20000", "--out", out});
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream side(out + ".json");
  REQUIRE(side);
  auto j = json::parse(side);
  CHECK(j["verdict"] == "DC1");
  CHECK(j["horizon"] == 20000);
  std::ifstream csv(out);
  std::string line;
  std::getline(csv, line);
  CHECK(line.rfind("# config: ", 0) == 0);
  std::getline(csv, line);
  CHECK(line == "t,psi_lower,psi_upper");
  std::filesystem::remove_all(dir);

  auto od = run({"profile", "--descriptor", R"({"rule": {"kind": "odometer", "depth": 4}, "space": "cantor"})", "--pair", "0110,0100",
                 "--horizon", "100", "--t-grid", "0.2,0.6"});
  REQUIRE(od.code == 0);
  CHECK(od.out.find("\n0.2,0,0\n0.6,1,1\n") != std::string::npos);
  CHECK(result_line(od.out)["verdict"] == "none");

  auto win = run({"profile", "--descriptor", R"({"rule": {"kind": "dc1_window", "eps": "1/10", "base": {"rule": {"kind": "figure1"}}}})",
                  "--schedule-pair", "--horizon", "20000"});
  REQUIRE(win.code == 0);
  CHECK(result_line(win.out)["verdict"] == "DC1");
  CHECK(run({"profile", "--descriptor", kTent}).code == 2);
}
