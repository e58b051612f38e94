#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace std;
namespace fs = std::filesystem;

namespace {

struct CmdResult {
  int status = -1;
  std::string out;
  std::string err;
};

fs::path temp_dir() {
  static fs::path dir = [] {
    auto d = fs::temp_directory_path() / "fixpoint_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

CmdResult run_cli(const std::string& args, const std::string& env_prefix = "") {
  static int counter = 0;
  fs::path out_file = temp_dir() / ("out" + std::to_string(counter));
  fs::path err_file = temp_dir() / ("err" + std::to_string(counter));
  ++counter;
  std::string cmd = env_prefix + (env_prefix.empty() ? "" : " ") + FIXPOINT_CLI_BIN + " " + args +
                    " >" + out_file.string() + " 2>" + err_file.string();
  int rc = std::system(cmd.c_str());
  CmdResult res;
  res.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  res.out = slurp(out_file);
  res.err = slurp(err_file);
  return res;
}

std::string cfg(const std::string& name) {
  return std::string(FIXPOINT_CONFIG_DIR) + "/" + name;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

// value of a quoted string field in a JSON blob, empty if absent
std::string json_string_field(const std::string& blob, const std::string& key) {
  auto at = blob.find("\"" + key + "\"");
  if (at == std::string::npos) return {};
  at = blob.find(':', at);
  at = blob.find('"', at);
  auto end = blob.find('"', at + 1);
  return blob.substr(at + 1, end - at - 1);
}

}  // namespace

TEST_CASE("run: bundled feasibility config") {
  auto res = run_cli("run " + cfg("feasibility2.json"));
  CHECK(res.status == 0);
  CHECK(json_string_field(res.out, "outcome") == "converged_target");
  CHECK(res.out.find("\"config_digest\"") != std::string::npos);
  CHECK(res.out.find("\"iterations\"") != std::string::npos);
}

TEST_CASE("run: missing config is a runtime error naming the path") {
  auto res = run_cli("run /nowhere/missing.json");
  CHECK(res.status == 2);
  CHECK(res.err.find("missing.json") != std::string::npos);
  CHECK(res.out.empty());
}

TEST_CASE("run: failing schedule conditions exit 1 and name the condition") {
  auto res = run_cli("run " + cfg("badschedule.json"));
  CHECK(res.status == 1);
  CHECK(res.err.find("(2)") != std::string::npos);

  auto js = run_cli("run --json " + cfg("badschedule.json"));
  CHECK(js.status == 1);
  CHECK(json_string_field(js.out, "kind") == "validation");
}

TEST_CASE("run: --force runs anyway and warns loudly") {
  auto res = run_cli("run --force " + cfg("badschedule.json"));
  CHECK(res.status == 0);
  CHECK(res.err.find("WARNING") != std::string::npos);
  CHECK(res.out.find("\"outcome\"") != std::string::npos);
}

TEST_CASE("run: option overrides") {
  auto res = run_cli("run --max-iters 5 " + cfg("feasibility2.json"));
  CHECK(res.status == 0);
  CHECK(json_string_field(res.out, "outcome") == "max_iters");
  CHECK(res.out.find("\"iterations\": 5") != std::string::npos);

  auto loose = run_cli("run --tol 0.05 " + cfg("feasibility2.json"));
  CHECK(loose.status == 0);
  CHECK(json_string_field(loose.out, "outcome") == "converged_target");
}

TEST_CASE("run: --out writes trace, summary, and plot inputs") {
  fs::path prefix = temp_dir() / "runout";
  auto res = run_cli("run --out " + prefix.string() + " " + cfg("feasibility2.json"));
  CHECK(res.status == 0);
  CHECK(fs::exists(prefix.string() + ".trace.csv"));
  CHECK(fs::exists(prefix.string() + ".summary.json"));

  auto plot = run_cli("plot " + prefix.string() + ".trace.csv " + (temp_dir() / "p.svg").string());
  CHECK(plot.status == 0);
  CHECK(slurp(temp_dir() / "p.svg").find("<svg") != std::string::npos);
}

TEST_CASE("run: the seed environment override changes the digest") {
  auto a = run_cli("run --max-iters 5 " + cfg("feasibility2.json"));
  auto b = run_cli("run --max-iters 5 " + cfg("feasibility2.json"), "FIXPOINT_SEED=99");
  CHECK(a.status == 0);
  CHECK(b.status == 0);
  std::string da = json_string_field(a.out, "config_digest");
  std::string db = json_string_field(b.out, "config_digest");
  CHECK(!da.empty());
  CHECK(da != db);
}

TEST_CASE("validate: bare schedule against the anchor conditions") {
  fs::path sched = temp_dir() / "sched.json";
  write_file(sched, R"({"form": "power", "a": 1, "b": 1})");

  auto res = run_cli("validate " + sched.string());
  CHECK(res.status == 1);
  CHECK(res.out.find("C1") != std::string::npos);
  CHECK(res.out.find("C3") != std::string::npos);
  CHECK(res.out.find("fails") != std::string::npos);

  write_file(sched, R"({"form": "power", "a": 1, "b": 0.5})");
  res = run_cli("validate " + sched.string());
  CHECK(res.status == 0);
  CHECK(res.out.find("all conditions hold") != std::string::npos);

  auto js = run_cli("validate --json " + sched.string());
  CHECK(js.status == 0);
  CHECK(js.out.find("\"C1\"") != std::string::npos);
}

TEST_CASE("validate: bare schedule against other condition sets") {
  fs::path sched = temp_dir() / "sched2.json";
  write_file(sched, R"({"form": "power", "a": 0.5, "b": 1})");
  auto res = run_cli("validate --conditions theorem " + sched.string());
  CHECK(res.status == 0);

  write_file(sched, R"({"form": "const", "c": 0.5})");
  res = run_cli("validate --conditions dk " + sched.string());
  CHECK(res.status == 0);

  res = run_cli("validate --conditions bogus " + sched.string());
  CHECK(res.status == 2);
}

TEST_CASE("validate: config paths infer their condition set") {
  auto res = run_cli("validate " + cfg("feasibility2.json"));
  CHECK(res.status == 0);
  res = run_cli("validate " + cfg("badschedule.json"));
  CHECK(res.status == 1);
  CHECK(res.out.find("(2)") != std::string::npos);
  res = run_cli("validate " + cfg("halpern_rotation.json"));
  CHECK(res.status == 0);
}

TEST_CASE("compare: table and JSON forms") {
  auto res = run_cli("compare " + cfg("compare_feasibility.json"));
  CHECK(res.status == 0);
  CHECK(res.out.find("halpern") != std::string::npos);
  CHECK(res.out.find("itnew") != std::string::npos);
  CHECK(res.out.find("corollary") != std::string::npos);

  auto js = run_cli("compare --json " + cfg("compare_feasibility.json"));
  CHECK(js.status == 0);
  std::size_t outcomes = 0;
  for (auto at = js.out.find("\"outcome\""); at != std::string::npos;
       at = js.out.find("\"outcome\"", at + 1))
    ++outcomes;
  CHECK(outcomes == 3);

  fs::path prefix = temp_dir() / "cmpout";
  auto withfile = run_cli("compare --out " + prefix.string() + " " +
                          cfg("compare_feasibility.json"));
  CHECK(withfile.status == 0);
  CHECK(fs::exists(prefix.string() + ".compare.csv"));
}

TEST_CASE("probe: modulus estimates as JSON") {
  auto res = run_cli("probe --space euclid --dim 2 --eps 1 --samples 20000");
  CHECK(res.status == 0);
  for (const char* key : {"space", "dim", "eps", "samples", "delta", "rho", "seed"})
    CHECK(res.out.find(std::string("\"") + key + "\"") != std::string::npos);

  auto at = res.out.find("\"delta\"");
  double delta = std::stod(res.out.substr(res.out.find(':', at) + 1));
  CHECK(delta == doctest::Approx(0.1340).epsilon(0.2));

  auto zero = run_cli("probe --space euclid --dim 2 --eps 0 --samples 100");
  CHECK(zero.status == 0);
  auto z = zero.out.find("\"delta\"");
  CHECK(std::stod(zero.out.substr(zero.out.find(':', z) + 1)) == 0.0);

  auto lp = run_cli("probe --space lp:3 --dim 2 --eps 1 --samples 2000");
  CHECK(lp.status == 0);

  // invalid exponent maps to a validation failure for this command
  auto bad = run_cli("probe --space lp:1 --dim 2 --eps 1 --samples 100");
  CHECK(bad.status == 1);
  auto eps = run_cli("probe --space euclid --dim 2 --eps 3 --samples 100");
  CHECK(eps.status == 1);
}

TEST_CASE("plot: failure modes") {
  auto res = run_cli("plot /nowhere/trace.csv " + (temp_dir() / "x.svg").string());
  CHECK(res.status == 2);

  fs::path empty_csv = temp_dir() / "empty.csv";
  write_file(empty_csv, "n,step_norm,w_gap,residual_max,residual_i0,v0,v1\n");
  res = run_cli("plot " + empty_csv.string() + " " + (temp_dir() / "y.svg").string());
  CHECK(res.status == 2);
}

TEST_CASE("list: the catalogue is printed") {
  auto res = run_cli("list");
  CHECK(res.status == 0);
  for (const char* entry : {"halfspace", "ball", "box", "affine", "rotation", "subgradient",
                            "composition", "quadratic", "l1", "indicator", "linear_psd", "const",
                            "power", "table", "itnew", "res", "corollary", "halpern", "dk"})
    CHECK(res.out.find(entry) != std::string::npos);
}

TEST_CASE("argument errors") {
  auto res = run_cli("run --bogus " + cfg("feasibility2.json"));
  CHECK(res.status == 2);
  res = run_cli("");
  CHECK(res.status == 2);
  res = run_cli("--help");
  CHECK(res.status == 0);
  CHECK(res.out.find("run") != std::string::npos);
}
