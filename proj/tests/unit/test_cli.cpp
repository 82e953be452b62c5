#include "catch_amalgamated.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "mcdt_cli/cli.hpp"
#include "mcdt_cli/io.hpp"

namespace fs = std::filesystem;
using namespace mcdt::cli;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "mcdt_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST_CASE("critvals", "[cli]") {
  const auto r = run({"critvals", "--k", "1", "--procedure", "step-up"});
  CHECK(r.code == kOk);
  CHECK(r.out.find("1.64485") != std::string::npos);

  const auto sd = run({"critvals", "--k", "3", "--rho", "0", "--procedure", "step-down", "--method", "closed-form"});
  CHECK(sd.code == kOk);
  CHECK(sd.out.find("1.95") != std::string::npos);

  CHECK(run({"critvals", "--k", "2", "--alpha", "1.5"}).code == kUsage);
  CHECK(run({"critvals", "--k", "3", "--rho", "-0.7"}).code == kUsage);
  CHECK(run({"no-such-command"}).code == kUsage);
}

TEST_CASE("decide", "[cli]") {
  const auto in = scratch("obs.csv");
  write(in, "z1,z2\n1.5,2.5\n1.7,2.5\n");
  const auto r = run({"decide", "--k", "2", "--procedure", "step-down", "--values", "1.6449,1.9545", "--input", in.string()});
  CHECK(r.code == kOk);
  CHECK(r.out.find("1.5,2.5,0,1") != std::string::npos);
  CHECK(r.out.find("1.7,2.5,1,1") != std::string::npos);

  write(in, "");
  const auto empty = run({"decide", "--k", "2", "--procedure", "step-down", "--values", "1.6449,1.9545", "--input", in.string()});
  CHECK(empty.code == kOk);
  CHECK(std::count(empty.out.begin(), empty.out.end(), '\n') == 1);

  write(in, "1.0,2.0\n1.0,abc\n");
  const auto bad = run({"decide", "--k", "2", "--procedure", "step-down", "--values", "1.6449,1.9545", "--input", in.string()});
  CHECK(bad.code == kDataError);
  CHECK(bad.err.find("line 2") != std::string::npos);

  write(in, "1.0,2.0,3.0\n");
  CHECK(run({"decide", "--k", "2", "--procedure", "step-down", "--values", "1.6449,1.9545", "--input", in.string()}).code ==
        kDataError);
}

TEST_CASE("observation reader", "[cli]") {
  std::istringstream ok("z1,z2\n 1.5 , -2\n\n3,4\n");
  const auto t = read_observations(ok, 2);
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0][1] == -2.0);
  std::istringstream header("a,b\n1,2\n");
  CHECK_THROWS_AS(read_observations(header, 2), DataError);
}

TEST_CASE("risk-curve", "[cli]") {
  const auto r = run({"risk-curve", "--k", "2", "--procedure", "accept-all", "--values", "1.6449,1.6449", "--mu", "1,1",
                      "--b", "1", "--mc-reps", "1000"});
  CHECK(r.code == kOk);
  CHECK(r.out.find("1,1,2,") != std::string::npos);
  CHECK(run({"risk-curve", "--k", "2", "--procedure", "single-step", "--values", "1.6,1.6", "--mu", "3:1:1,0"}).code == kUsage);
}

TEST_CASE("manifest and replay", "[cli]") {
  const auto out = scratch("crit.txt");
  const auto r = run({"critvals", "--k", "2", "--rho", "0.3", "--procedure", "step-down", "--mc-reps", "20000", "--seed", "9",
                      "--out", out.string()});
  REQUIRE(r.code == kOk);
  const auto mpath = manifest_path(out.string());
  REQUIRE(fs::exists(mpath));
  const auto m = parse_manifest(read_file(mpath));
  CHECK(m.command == "critvals");
  REQUIRE(m.digests.size() == 1);
  CHECK(m.digests[0].second == sha256_hex(read_file(out.string())));

  const auto rep = run({"replay", mpath});
  CHECK(rep.code == kOk);
  CHECK(rep.out.find("result=identical") != std::string::npos);

  auto text = read_file(mpath);
  const auto digest = m.digests[0].second;
  text.replace(text.find(digest), digest.size(), std::string(digest.size(), '0'));
  write(mpath, text);
  const auto bad = run({"replay", mpath});
  CHECK(bad.code == kCheckFailed);
  CHECK(bad.out.find("result=different") != std::string::npos);
}

TEST_CASE("sha256", "[cli]") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
