#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "feller/cli.hpp"

namespace {

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "feller");
  std::ostringstream out, err;
  Result r;
  r.code = feller::cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

bool has_line(const std::string& text, const std::string& line) {
  for (const auto& l : lines(text))
    if (l == line) return true;
  return false;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("table 1 --analytic --round prints the theoretical percentages") {
  const auto r = run({"table", "1", "--analytic", "--round", "--seed", "1"});
  REQUIRE(r.code == 0);
  CHECK(r.err.empty());
  const auto ls = lines(r.out);
  REQUIRE(ls.size() == 24);
  CHECK(ls[0] == "# seed=1");
  CHECK(ls[1] == "# table=1");
  CHECK(ls[3] == "param,t,theo_pct,sim_pct,stderr_pct");
  for (const char* row : {"0.1,5000,1.83,,0.13", "0.1,20000,36.79,,0.48", "1,1000,13.53,,0.34",
                          "1,5000,67.03,,0.47", "1,10000,81.87,,0.39", "1,20000,90.48,,0.29",
                          "10,5000,96.08,,0.19", "10,10000,98.02,,0.14", "10,20000,99.00,,0.10",
                          "100,5000,99.60,,0.06", "100,10000,99.80,,0.04", "100,20000,99.90,,0.03",
                          "1,100,0.00,,0.00"}) {
    CAPTURE(row);
    CHECK(has_line(r.out, row));
  }
}

TEST_CASE("survival --analytic gives theo 90.48 at t = 20000") {
  const auto r = run({"survival", "--sigma2", "1", "--x0", "1000", "--dt", "1", "--tn", "20000",
                      "--paths", "10000", "--checkpoints", "100,1000,5000,10000,20000", "--analytic",
                      "--round", "--seed", "4"});
  REQUIRE(r.code == 0);
  CHECK(has_line(r.out, "1,20000,90.48,,0.29"));
}

TEST_CASE("full-precision cells round-trip") {
  const auto r = run({"survival", "--analytic", "--checkpoints", "5000", "--seed", "1"});
  REQUIRE(r.code == 0);
  const auto ls = lines(r.out);
  const auto& row = ls.back();
  const auto first = row.find(',', row.find(',') + 1);
  const auto second = row.find(',', first + 1);
  const double theo = std::stod(row.substr(first + 1, second - first - 1));
  CHECK(theo == 100.0 * std::exp(-0.4));
  CHECK(row.substr(first + 1, second - first - 1).size() >= 15);
}

TEST_CASE("paths with x0 = 0 is an all-zero long-format table") {
  const auto r = run({"paths", "--paths", "1", "--x0", "0", "--tn", "5", "--seed", "2"});
  REQUIRE(r.code == 0);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() == 8);
  CHECK(ls[1] == "path_id,t,x");
  for (std::size_t i = 2; i < ls.size(); ++i)
    CHECK(ls[i] == "0," + std::to_string(i - 2) + ",0");
}

TEST_CASE("identical invocations are byte-identical, across thread counts too") {
  const std::vector<std::string> base{"survival", "--x0", "50", "--tn", "500", "--paths", "300",
                                      "--checkpoints", "10,100,500", "--seed", "77"};
  auto with_threads = [&](const char* n) {
    auto args = base;
    args.insert(args.end(), {"--threads", n});
    return run(args);
  };
  const auto a = with_threads("1");
  const auto b = with_threads("1");
  const auto c = with_threads("3");
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out == c.out);
  const auto other = run({"survival", "--x0", "50", "--tn", "500", "--paths", "300",
                          "--checkpoints", "10,100,500", "--seed", "78"});
  CHECK(other.out != a.out);
}

TEST_CASE("hitting writes tstar and censored metadata") {
  const auto r = run({"hitting", "--sigma2", "10", "--x0", "100", "--tn", "2000", "--paths", "500",
                      "--bins", "20", "--seed", "9"});
  REQUIRE(r.code == 0);
  CHECK(has_line(r.out, "# tstar=10"));
  CHECK(r.out.find("# censored=") != std::string::npos);
  CHECK(has_line(r.out, "bin_lo,bin_hi,count,density,f_theory"));
}

TEST_CASE("meanpos, density, validate and tsv output") {
  const auto m = run({"meanpos", "--x0", "100", "--tn", "100", "--paths", "50",
                      "--checkpoints", "10,100", "--seed", "1", "--format", "tsv"});
  REQUIRE(m.code == 0);
  CHECK(has_line(m.out, "x0\tt\txbar\tci_lo\tci_hi\talpha"));
  CHECK(m.out.find("# outside_ci=") != std::string::npos);

  const auto d = run({"density", "--x0", "10", "--t", "5", "--samples", "2000", "--bins", "10",
                      "--seed", "1"});
  REQUIRE(d.code == 0);
  CHECK(has_line(d.out, "bin_lo,bin_hi,count,density,theory"));

  const auto v = run({"validate", "--x0", "1.25", "--samples", "500", "--substeps", "20", "--seed", "1"});
  REQUIRE(v.code == 0);
  CHECK(v.out.find("lambda,sigma2,x0,dt,n,substeps") != std::string::npos);
}

TEST_CASE("omitted seed is drawn and reported") {
  const auto r = run({"survival", "--analytic", "--checkpoints", "100"});
  REQUIRE(r.code == 0);
  REQUIRE(r.err.rfind("seed=", 0) == 0);
  const std::string seed = r.err.substr(5, r.err.find('\n') - 5);
  CHECK(has_line(r.out, "# seed=" + seed));
}

TEST_CASE("config file supplies defaults; flags win") {
  const auto dir = std::filesystem::temp_directory_path() / "feller_cli_test";
  std::filesystem::create_directories(dir);
  const auto cfg = dir / "run.ini";
  {
    std::ofstream f(cfg);
    f << "sigma2=10\nx0=100\nseed=5\n";
  }
  const auto from_file = run({"--config", cfg.string(), "survival", "--analytic", "--checkpoints",
                              "100", "--round"});
  REQUIRE(from_file.code == 0);
  CHECK(has_line(from_file.out, "# seed=5"));
  CHECK(has_line(from_file.out, "10,100,81.87,,3.85"));
  const auto overridden = run({"--config", cfg.string(), "survival", "--analytic", "--checkpoints",
                               "100", "--round", "--sigma2", "1"});
  REQUIRE(overridden.code == 0);
  CHECK(has_line(overridden.out, "1,100,13.53,,3.42"));
}

TEST_CASE("output file and exit codes") {
  const auto dir = std::filesystem::temp_directory_path() / "feller_cli_test";
  std::filesystem::create_directories(dir);
  const auto file = dir / "out.csv";
  const auto ok = run({"table", "2", "--analytic", "--seed", "3", "-o", file.string()});
  CHECK(ok.code == 0);
  CHECK(ok.out.empty());
  CHECK(slurp(file) == run({"table", "2", "--analytic", "--seed", "3"}).out);

  CHECK(run({}).code == 2);
  CHECK(run({"bogus"}).code == 2);
  CHECK(run({"survival", "--no-such-flag"}).code == 2);
  CHECK(run({"survival", "--sigma2", "-1", "--seed", "1"}).code == 2);
  CHECK(run({"survival", "--dt", "0", "--seed", "1"}).code == 2);
  CHECK(run({"survival", "--tn", "0", "--seed", "1"}).code == 2);
  CHECK(run({"survival", "--checkpoints", "10.5", "--seed", "1", "--analytic"}).code == 2);
  CHECK(run({"table", "7"}).code == 2);
  CHECK(run({"meanpos", "--alpha", "1.5", "--seed", "1", "--analytic"}).code == 2);
  CHECK(run({"survival", "--format", "xml"}).code == 2);
  // Nothing absorbed before tn: empty histogram is a numerical failure.
  CHECK(run({"hitting", "--x0", "1e6", "--tn", "10", "--paths", "5", "--seed", "1"}).code == 3);
  CHECK(run({"table", "1", "--analytic", "--seed", "1", "-o", "/nonexistent-dir/x.csv"}).code == 3);
  const auto help = run({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("survival") != std::string::npos);
}
