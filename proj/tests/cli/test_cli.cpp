#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <fmt/format.h>
#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

namespace {

struct Result {
  int code = -1;
  std::string out;
};

// Runs the CLI through the shell; stderr is merged into the captured output
// only when `merge_err` is set.
Result run(const std::string& args, bool merge_err = false) {
  std::string cmd = fmt::format("{} {}{}", FAIRMON_BIN, args, merge_err ? " 2>&1" : " 2>/dev/null");
  Result r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

void write(const std::string& path, const std::string& text) {
  std::ofstream(path) << text;
}

int count_lines(const std::string& s) {
  int n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

struct Files {
  Files() {
    std::filesystem::create_directories("cli_data");
    write("cli_data/lending.json", R"({"states":["init","g","ng","gy","ngy","ny","z","nz"],
"transitions":[[0,0.5,0.5,0,0,0,0,0],[0,0,0,0.8,0,0.2,0,0],[0,0,0,0,0.6,0.4,0,0],[0,0,0,0,0,0,0.9,0.1],
[0,0,0,0,0,0,0.8,0.2],[1,0,0,0,0,0,0,0],[1,0,0,0,0,0,0,0],[1,0,0,0,0,0,0,0]],
"initial":[1,0,0,0,0,0,0,0]})");
    write("cli_data/dp.spec", "# demographic parity\nproperty: T[g->gy] - T[ng->ngy]\n");
    write("cli_data/cycle.json", R"({"states":["a","b"],"transitions":[[0,1],[1,0]],"initial":[1,0]})");
    write("cli_data/three.json", R"({"states":["1","2","3"],
"transitions":[[0.2,0.3,0.5],[0.5,0.25,0.25],[0.6,0.2,0.2]],"initial":[1,0,0]})");
    write("cli_data/rho.spec", "property: T[1->2]\n");
    write("cli_data/ab.spec", "alphabet: a b\nproperty: P[a b] - P[b a]\n");
    write("cli_data/bad.spec", "alphabet: a b\nproperty: P[a c]\n");
    std::string stream;
    for (int i = 0; i < 1'000'000; ++i) stream += (i % 3 == 0) ? "a\n" : "b\n";
    write("cli_data/big.txt", stream);
  }
};

const Files& files() {
  static Files f;
  return f;
}

}  // namespace

TEST_CASE("truth prints the exact value") {
  files();
  Result r = run("truth --model cli_data/lending.json --spec cli_data/dp.spec");
  CHECK(r.code == 0);
  CHECK(r.out == "0.2\n");
  r = run("truth --model cli_data/three.json --spec cli_data/rho.spec");
  CHECK(r.out == "0.3\n");
}

TEST_CASE("simulate is deterministic and follows the chain") {
  files();
  Result r = run("simulate --model cli_data/cycle.json --steps 4");
  CHECK(r.code == 0);
  CHECK(r.out == "a\nb\na\nb\n");
  Result a = run("simulate --model cli_data/three.json --steps 500 --seed 7 --start stationary");
  Result b = run("simulate --model cli_data/three.json --steps 500 --seed 7 --start stationary");
  CHECK(a.out == b.out);
  CHECK(count_lines(a.out) == 500);
  Result l = run("simulate --model cli_data/lending.json --steps 2");
  CHECK((l.out == "init\ng\n" || l.out == "init\nng\n"));
}

TEST_CASE("monitor: one record per event, stride, formats") {
  files();
  Result r = run("monitor --spec cli_data/ab.spec --tau-mix 1 --input cli_data/big.txt --stride 1000");
  CHECK(r.code == 0);
  CHECK(count_lines(r.out) == 1000);
  CHECK(r.out.rfind("{\"t\":1000,\"lo\":", 0) == 0);
  CHECK(r.out.find("\"t\":1000000,") != std::string::npos);

  write("cli_data/few.txt", "a\n\nb\n  a  \n");
  r = run("monitor --spec cli_data/ab.spec --tau-mix 1 --input cli_data/few.txt");
  CHECK(r.code == 0);
  CHECK(count_lines(r.out) == 3);
  CHECK(r.out.rfind("{\"t\":1,\"lo\":null,\"hi\":null,\"point\":null,\"verdict\":\"inconclusive\"}\n", 0) == 0);

  r = run("monitor --spec cli_data/ab.spec --tau-mix 1 --format csv --input cli_data/few.txt");
  CHECK(r.code == 0);
  CHECK(r.out.rfind("t,lo,hi,point,verdict\n1,,,,inconclusive\n", 0) == 0);
}

TEST_CASE("monitor: mc engine on a simulated lending stream is reproducible") {
  files();
  std::string cmd = fmt::format("simulate --model cli_data/lending.json --steps 50000 --seed 3 | {} monitor "
                                "--spec cli_data/dp.spec --model cli_data/lending.json --engine mc --seed 9 "
                                "--stride 10000",
                                FAIRMON_BIN);
  Result a = run(cmd);
  Result b = run(cmd);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(count_lines(a.out) == 5);
  CHECK(a.out.find("\"verdict\":\"ok\"") != std::string::npos);
}

TEST_CASE("monitor: malformed events exit 3 and name the line") {
  files();
  write("cli_data/bad.txt", "a\nb\nQ\na\n");
  Result r = run("monitor --spec cli_data/ab.spec --tau-mix 1 --input cli_data/bad.txt", true);
  CHECK(r.code == 3);
  CHECK(r.out.find("line 3") != std::string::npos);
  CHECK(r.out.find("'Q'") != std::string::npos);
}

TEST_CASE("config errors exit 2") {
  files();
  CHECK(run("monitor --spec cli_data/ab.spec --tau-mix 1 --delta 1.5 --input cli_data/few.txt").code == 2);
  CHECK(run("monitor --spec cli_data/ab.spec --input cli_data/few.txt").code == 2);  // no tau-mix, no model
  CHECK(run("monitor --spec cli_data/ab.spec --tau-mix 1 --mode sideways --input cli_data/few.txt").code == 2);
  CHECK(run("monitor --spec cli_data/ab.spec --tau-mix 1 --engine mc --input cli_data/few.txt").code == 2);
  CHECK(run("monitor --spec cli_data/missing.spec --tau-mix 1").code == 2);
  Result bad = run("monitor --spec cli_data/bad.spec --tau-mix 1 --input cli_data/few.txt", true);
  CHECK(bad.code == 2);
  CHECK(bad.out.find("line 2") != std::string::npos);
  CHECK(run("monitor --tau-mix 1").code == 2);
  CHECK(run("frobnicate").code == 2);
  CHECK(run("truth --model cli_data/cycle.json --spec cli_data/missing.spec").code == 2);
  CHECK(run("experiment nope --out-dir cli_out").code == 2);
  CHECK(run("simulate --model cli_data/cycle.json --start sideways").code == 2);
}

TEST_CASE("compare-bounds prints a table") {
  files();
  Result r = run("compare-bounds --t-min 1000 --t-max 1000000 --points 4");
  CHECK(r.code == 0);
  CHECK(r.out.rfind("t,mc-pointwise,mc-uniform,poly-union,exp-union\n1000,", 0) == 0);
  CHECK(count_lines(r.out) == 5);
  r = run("compare-bounds --methods pomc-pointwise --t-min 10 --t-max 10 --points 1");
  CHECK(r.code == 2);
  r = run("compare-bounds --methods pomc-pointwise --tau-mix 1 --t-min 1000 --t-max 1000 --points 1");
  REQUIRE(r.out.rfind("t,pomc-pointwise\n1000,", 0) == 0);
  CHECK(std::abs(std::stod(r.out.substr(22)) - 0.12884082250402127) < 1e-15);
}

TEST_CASE("experiment writes its three files") {
  files();
  std::filesystem::remove_all("cli_out");
  Result r = run("experiment nonconvergent fig3-ratio --out-dir cli_out --seed 5");
  CHECK(r.code == 0);
  for (const char* n : {"nonconvergent", "fig3-ratio"}) {
    for (const char* f : {"report.json", "series.csv", "manifest.json"}) {
      CHECK(std::filesystem::exists(std::filesystem::path("cli_out") / n / f));
    }
  }
}
