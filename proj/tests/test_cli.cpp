#include <fstream>
#include <sstream>

#include "doctest.h"
#include "impute/config.hpp"
#include "impute/errors.hpp"

using namespace impute;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "impute_cli");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = parse_and_dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

std::string temp_path(const std::string& name) { return std::string(IMPUTE_TEST_TMPDIR) + "/" + name; }

void write_file(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

const std::vector<std::string> kFast{"--reps", "3", "--pop-size", "100000", "--seed", "123"};

std::vector<std::string> with_fast(std::vector<std::string> args) {
  args.insert(args.end(), kFast.begin(), kFast.end());
  return args;
}

}  // namespace

TEST_CASE("table1 writes ten data rows and is reproducible") {
  const auto a = run(with_fast({"table1", "--format", "csv"}));
  CHECK(a.code == 0);
  CHECK(count_lines(a.out) == 11);
  CHECK(a.out.rfind("signal,method,mechanism,mu,", 0) == 0);
  const auto b = run(with_fast({"table1", "--format", "csv"}));
  CHECK(a.out == b.out);
  const auto md = run(with_fast({"table1", "--format", "markdown"}));
  CHECK(md.code == 0);
  CHECK(md.out.find('|') != std::string::npos);
}

TEST_CASE("usage errors exit with 2") {
  CHECK(run({}).code == 2);
  CHECK(run({"table1", "--no-such-flag"}).code == 2);
  CHECK(run({"bogus"}).code == 2);
  CHECK(run({"table1", "--reps", "many"}).code == 2);
}

TEST_CASE("help lists flags with defaults") {
  const auto h = run({"table1", "--help"});
  CHECK(h.code == 0);
  CHECK(h.out.find("--reps") != std::string::npos);
  CHECK(h.out.find("200") != std::string::npos);
  CHECK(h.out.find("--config") != std::string::npos);
}

TEST_CASE("runtime errors exit with 1 and a diagnostic") {
  const auto missing = run({"run", "--config", "missing.file"});
  CHECK(missing.code == 1);
  CHECK(missing.err.find("missing.file") != std::string::npos);

  const std::string bad = temp_path("bad_key.conf");
  write_file(bad, "reps = 2\nnot_a_key = 1\n");
  const auto r = run({"run", "--config", bad});
  CHECK(r.code == 1);
  CHECK(r.err.find("not_a_key") != std::string::npos);
  CHECK(r.err.find("bad_key.conf:2") != std::string::npos);

  CHECK(run(with_fast({"run", "--methods", "mice"})).code == 1);
  CHECK(run(with_fast({"table1", "--samples", "0"})).code == 1);
}

TEST_CASE("config files drive run and flags override them") {
  const std::string path = temp_path("grid.conf");
  write_file(path,
             "# small grid\n"
             "r_squared = 0.5\n"
             "mechanisms = MAR\n"
             "methods = predict, pmm\n"
             "reps = 2\n"
             "pop_size = 50000\n"
             "format = markdown\n");
  const auto md = run({"run", "--config", path});
  CHECK(md.code == 0);
  CHECK(md.out.find("r2=0.5") != std::string::npos);
  const auto csv = run({"run", "--config", path, "--format", "csv"});
  CHECK(csv.code == 0);
  CHECK(csv.out.rfind("signal,method", 0) == 0);
  CHECK(count_lines(csv.out) == 4);  // header, ground truth, two methods x one mechanism
  const auto one = run({"run", "--config", path, "--format", "csv", "--methods", "draw"});
  CHECK(count_lines(one.out) == 3);
}

TEST_CASE("figure and decompose subcommands") {
  const std::string out = temp_path("figure.csv");
  const auto f = run({"figure", "--pop-size", "100000", "--out", out});
  CHECK(f.code == 0);
  std::ifstream in(out);
  std::stringstream text;
  text << in.rdbuf();
  CHECK(count_lines(text.str()) == 2001);

  const auto d = run({"decompose", "--pop-size", "100000", "--repeats", "10", "--method", "predict"});
  CHECK(d.code == 0);
  CHECK(d.out.rfind("signal,mechanism,method,bias_sq,variance,noise,total\n", 0) == 0);
  CHECK(d.out.find("low,MCAR,predict,") != std::string::npos);
  CHECK(run({"decompose", "--repeats", "1", "--pop-size", "100000"}).code == 1);
}

TEST_CASE("config parsing") {
  RunSettings s;
  apply_config_text("samples = 500\n# comment line\nseed = 7\n\nmethods = forest,softimpute\nforest_trees = 12\n", "inline", s);
  s.finalize();
  CHECK(s.experiment.n_sample == 500);
  CHECK(s.experiment.base_seed == 7);
  REQUIRE(s.experiment.methods.size() == 2);
  CHECK(std::get<method::Forest>(s.experiment.methods[0]).params.n_trees == 12);
  CHECK_THROWS_AS(apply_config_text("samples = lots\n", "inline", s), InvalidArgument);
  CHECK_THROWS_AS(apply_config_text("samples\n", "inline", s), InvalidArgument);
  CHECK_THROWS_AS(load_config_file(temp_path("nope.conf"), s), InvalidArgument);
  CHECK(parse_mechanism("MAR") == Mechanism::mar_right);
  CHECK_THROWS_AS(parse_style("html"), InvalidArgument);
}
