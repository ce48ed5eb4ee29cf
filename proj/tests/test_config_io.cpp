#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "polymerlab/config.hpp"
#include "polymerlab/io.hpp"

using namespace polymerlab;

TEST_CASE("config text parsing") {
  const Config c = parse_config_text(
      "# header comment\n"
      "[model]\n"
      "family = gaussian\n"
      "variance = 0.25  ; trailing comment\n"
      "\n"
      "[run]\n"
      "seed=7\n"
      "betas = 0.5, 1.0\n");
  CHECK(c.at("model").at("family") == "gaussian");
  CHECK(c.at("model").at("variance") == "0.25");
  CHECK(c.at("run").at("seed") == "7");
  CHECK(c.at("run").at("betas") == "0.5, 1.0");
  CHECK_THROWS_AS(parse_config_text("[model\nx=1\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config_text("just a line\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config_text("= value\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config_file("/nonexistent/path.ini"), std::invalid_argument);
}

TEST_CASE("canonical string and hash are stable") {
  Config c;
  c["model"] = {{"family", "gaussian"}, {"variance", "1"}};
  c["run"] = {{"seed", "7"}};
  const std::string s = canonical_config_string(c);
  CHECK(s == "[model]\nfamily=gaussian\nvariance=1\n[run]\nseed=7\n");
  CHECK(fnv1a64(s) == fnv1a64(s));
  CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a64("a") != fnv1a64("b"));
}

TEST_CASE("double list parsing") {
  const auto v = parse_double_list("0.6,0.8, 1.0 ,1.2");
  REQUIRE(v.size() == 4);
  CHECK(v[0] == 0.6);
  CHECK(v[3] == 1.2);
  CHECK_THROWS_AS(parse_double_list("1.0,x"), std::invalid_argument);
  CHECK_THROWS_AS(parse_double_list(""), std::invalid_argument);
}

TEST_CASE("csv writer") {
  const std::string path = "test_io_scratch.csv";
  {
    CsvWriter w(path);
    w.header({"a", "b"});
    w.row({"1", g17(0.1)});
    CHECK_THROWS_AS(w.row({"only one"}), std::logic_error);
    w.close();
  }
  std::ifstream f(path);
  std::string line;
  std::getline(f, line);
  CHECK(line == "a,b");
  std::getline(f, line);
  CHECK(line == "1,0.10000000000000001");
  std::remove(path.c_str());
  CsvWriter no_header(path);
  CHECK_THROWS_AS(no_header.row({"x"}), std::logic_error);
  std::remove(path.c_str());
}

TEST_CASE("g17 round-trips doubles") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456.789}) {
    CHECK(std::stod(g17(v)) == v);
  }
}
