#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mhr/cli/commands.hpp"
#include "mhr/cli/io.hpp"
#include "mhr/error.hpp"
#include "mhr/simulation.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using namespace mhr;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

fs::path write_sample(const fs::path& dir, const CensoredSample& s, const std::string& name = "data.csv") {
  std::ostringstream csv;
  csv << "time,status,arm\n";
  for (const auto& o : s.observations())
    csv << cli::format_number(o.time) << ',' << (o.event ? 1 : 0) << ',' << (o.arm == Arm::treatment ? 1 : 0)
        << '\n';
  const auto path = dir / name;
  cli::write_text_file(path, csv.str());
  return path;
}

const std::string kReps = "300";

}  // namespace

TEST_CASE("sample CSV parsing", "[cli]") {
  const auto s = cli::parse_sample_csv("arm,time,status\n1,0.5,1\n0,1.5,0\n");
  REQUIRE(s.size() == 2);
  CHECK(s.observations()[0].arm == Arm::treatment);
  CHECK(s.observations()[1].time == 1.5);
  CHECK_FALSE(s.observations()[1].event);
  CHECK_THROWS_AS(cli::parse_sample_csv("time,status\n1,1\n"), InputError);
  CHECK_THROWS_AS(cli::parse_sample_csv("time,status,arm\n1,2,0\n"), InputError);
  CHECK_THROWS_AS(cli::parse_sample_csv("time,status,arm\nx,1,0\n"), InputError);
}

TEST_CASE("number formatting round-trips", "[cli]") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 12345.678, -2.5}) CHECK(std::stod(cli::format_number(v)) == v);
  CHECK(cli::format_number(0.5) == "0.5");
}

TEST_CASE("estimate writes its artifacts", "[cli]") {
  const auto dir = testing::scratch_dir("cli_estimate");
  const auto data = write_sample(dir, generate_dataset(Scenario(Shape::linear), 400, 0.5, 5));
  const auto out = dir / "out";
  const auto r = run_cli({"estimate", data.string(), "--out", out.string(), "--cache-dir",
                          (dir / "cache").string(), "--chernoff-reps", kReps});
  INFO(r.err);
  REQUIRE(r.code == cli::kExitOk);
  for (const char* f : {"fit.json", "ci.csv", "theta.svg", "manifest.json"}) CHECK(fs::exists(out / f));
  const auto ci = slurp(out / "ci.csv");
  CHECK(ci.rfind("x,estimate,lower,upper,method\n", 0) == 0);
  CHECK(line_count(ci) == 51);
  const auto svg = slurp(out / "theta.svg");
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);

  // fit.json reproduces the fit
  const auto fit = cli::fit_from_json(nlohmann::json::parse(slurp(out / "fit.json")));
  CHECK(fit.n == 400);
  CHECK(cli::fit_to_json(fit).dump(2) + "\n" == slurp(out / "fit.json"));

  const auto manifest = nlohmann::json::parse(slurp(out / "manifest.json"));
  CHECK(manifest["command"] == "estimate");
  CHECK(manifest["version"] == cli::kToolVersion);
}

TEST_CASE("estimate input and degenerate errors", "[cli]") {
  const auto dir = testing::scratch_dir("cli_errors");
  cli::write_text_file(dir / "bad.csv", "time,status\n1,1\n2,0\n");
  auto r = run_cli({"estimate", (dir / "bad.csv").string(), "--out", dir.string(), "--no-plot"});
  CHECK(r.code == cli::kExitInput);
  CHECK_FALSE(r.err.empty());

  const auto data = write_sample(dir, generate_dataset(Scenario(Shape::linear), 60, 0.5, 8));
  r = run_cli({"estimate", data.string(), "--ci", "split", "--splits", "50", "--out", dir.string()});
  CHECK(r.code == cli::kExitDegenerate);

  r = run_cli({"estimate", data.string(), "--ci", "split", "--grid", "50", "--out", dir.string()});
  CHECK(r.code == cli::kExitInput);  // beyond the truncation time

  r = run_cli({"estimate", data.string(), "--alpha", "2", "--out", dir.string()});
  CHECK(r.code == cli::kExitInput);

  r = run_cli({"estimate", (dir / "missing.csv").string()});
  CHECK(r.code == cli::kExitInput);

  r = run_cli({"nonsense"});
  CHECK(r.code == cli::kExitInput);
}

TEST_CASE("estimate with split intervals and clamping", "[cli]") {
  const auto dir = testing::scratch_dir("cli_split");
  const auto data = write_sample(dir, generate_dataset(Scenario(Shape::convex), 500, 0.5, 2));
  const auto r = run_cli({"estimate", data.string(), "--ci", "split", "--grid", "0.3,0.6,5", "--clamp",
                          "--out", dir.string(), "--no-plot"});
  INFO(r.err);
  REQUIRE(r.code == cli::kExitOk);
  CHECK_FALSE(fs::exists(dir / "theta.svg"));
  CHECK(line_count(slurp(dir / "ci.csv")) == 4);
}

TEST_CASE("diagnose writes one row per curve point", "[cli]") {
  const auto dir = testing::scratch_dir("cli_diagnose");
  const auto sample = generate_dataset(Scenario(Shape::concave), 300, 0.5, 4);
  const auto data = write_sample(dir, sample);
  const auto r = run_cli({"diagnose", data.string(), "--out", dir.string()});
  INFO(r.err);
  REQUIRE(r.code == cli::kExitOk);
  const auto curve = diagnostic_curve(sample, TruncationPolicy::recommended());
  const auto csv = slurp(dir / "diagnostic.csv");
  CHECK(line_count(csv) == curve.points.size() + 1);
  CHECK(csv.rfind("cumhaz_control,cumhaz_treatment,hull,gap\n", 0) == 0);
  const auto svg = slurp(dir / "diagnostic.svg");
  CHECK(svg.rfind("<?xml", 0) == 0);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
}

TEST_CASE("simulate is deterministic", "[cli]") {
  const auto dir = testing::scratch_dir("cli_simulate");
  const std::vector<std::string> common{"simulate", "--scenario", "convex", "--n", "200", "--reps", "6",
                                        "--methods", "monotone,split,kernel", "--splits", "3",
                                        "--cache-dir", (dir / "cache").string(), "--chernoff-reps", kReps};
  auto a = common;
  a.insert(a.end(), {"--out", (dir / "a").string(), "--threads", "1"});
  auto b = common;
  b.insert(b.end(), {"--out", (dir / "b").string(), "--threads", "3"});
  const auto ra = run_cli(a);
  INFO(ra.err);
  REQUIRE(ra.code == cli::kExitOk);
  REQUIRE(run_cli(b).code == cli::kExitOk);
  CHECK(slurp(dir / "a" / "metrics.csv") == slurp(dir / "b" / "metrics.csv"));
  CHECK(slurp(dir / "a" / "metrics.json") == slurp(dir / "b" / "metrics.json"));
  CHECK(line_count(slurp(dir / "a" / "metrics.csv")) == 10);

  CHECK(run_cli({"simulate", "--scenario", "cubic", "--out", dir.string()}).code == cli::kExitInput);
  CHECK(run_cli({"simulate", "--grid", "0.5,2.5", "--out", dir.string()}).code == cli::kExitInput);
}

TEST_CASE("order-check", "[cli]") {
  const auto dir = testing::scratch_dir("cli_orders");
  auto r = run_cli({"order-check", "--figure1", "--out", dir.string()});
  REQUIRE(r.code == cli::kExitOk);
  CHECK(r.out.find("weibull") != std::string::npos);
  CHECK(line_count(slurp(dir / "orders.csv")) == 5);

  cli::write_text_file(dir / "a.csv", "support,mass\n1,0.25\n2,0.25\n3,0.5\n");
  r = run_cli({"order-check", (dir / "a.csv").string(), (dir / "a.csv").string()});
  REQUIRE(r.code == cli::kExitOk);
  CHECK(r.out.find("no") == std::string::npos);

  cli::write_text_file(dir / "bad.csv", "support,mass\n1,0.25\n2,0.25\n");
  r = run_cli({"order-check", (dir / "a.csv").string(), (dir / "bad.csv").string()});
  CHECK(r.code == cli::kExitInput);
  CHECK(run_cli({"order-check", (dir / "a.csv").string()}).code == cli::kExitInput);
}

TEST_CASE("chernoff command reuses its table", "[cli]") {
  const auto dir = testing::scratch_dir("cli_chernoff");
  const auto path = dir / "table.json";
  const std::vector<std::string> args{"chernoff", "--reps", "200", "--L", "3", "--delta", "0.01", "--out",
                                      path.string()};
  auto r = run_cli(args);
  REQUIRE(r.code == cli::kExitOk);
  CHECK(r.out.rfind("simulated", 0) == 0);
  const auto stamp = fs::last_write_time(path);
  r = run_cli(args);
  REQUIRE(r.code == cli::kExitOk);
  CHECK(r.out.rfind("cache hit", 0) == 0);
  CHECK(fs::last_write_time(path) == stamp);
  CHECK(fs::exists(dir / "table.manifest.json"));
  CHECK(run_cli({"chernoff", "--probs", "0.5,1.5", "--out", path.string()}).code == cli::kExitInput);
}
