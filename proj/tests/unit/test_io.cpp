#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "qsd/errors.hpp"
#include "qsd/io.hpp"

using namespace qsd;

TEST_CASE("17 significant digits round-trip") {
  for (double v : {0.1, 1.0 / 3.0, 0.90610570356389986, 1e-300, -2.5e17}) {
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(NAN) == "nan");
}

TEST_CASE("json writer output parses") {
  const std::vector<double> xs{1.5, 2.25};
  const auto text = JsonWriter()
                        .add("x", 0.1)
                        .add("n", 3)
                        .add("flag", true)
                        .add("name", std::string("a\"b"))
                        .add("nan", NAN)
                        .add("xs", std::span<const double>(xs))
                        .str();
  const auto j = nlohmann::json::parse(text);
  CHECK(j["x"].get<double>() == 0.1);
  CHECK(j["n"].get<int>() == 3);
  CHECK(j["flag"].get<bool>());
  CHECK(j["name"] == "a\"b");
  CHECK(j["nan"].is_null());
  CHECK(j["xs"][1].get<double>() == 2.25);
}

TEST_CASE("csv writer") {
  const auto p = std::filesystem::temp_directory_path() / "qsd_io_test" / "t.csv";
  write_csv(p, {"a", "b"}, {{1.0, 2.0}, {0.5, 0.25}});
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == "a,b\n1,0.5\n2,0.25\n");
  CHECK_THROWS_AS(write_csv(p, {"a"}, {{1.0}, {2.0}}), ArgumentError);
  CHECK_THROWS_AS(write_csv(p, {"a", "b"}, {{1.0}, {2.0, 3.0}}), ArgumentError);
}
