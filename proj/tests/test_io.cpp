#include <filesystem>
#include <limits>

#include "doctest.h"

#include "cais/error.hpp"
#include "cais/io.hpp"
#include "cais/rng.hpp"

using namespace cais;
using namespace cais::io;

TEST_CASE("sha256 known vectors") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("format_double round-trips exactly") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(5000.0) == "5000");
  Rng rng(4);
  for (int i = 0; i < 2000; ++i) {
    const double v = rng.uniform(-1e6, 1e6) * std::pow(10.0, rng.uniform(-12.0, 4.0));
    CHECK(parse_double(format_double(v)) == v);
  }
  CHECK(parse_double(format_double(std::numeric_limits<double>::min())) == std::numeric_limits<double>::min());
}

TEST_CASE("strict number parsing") {
  CHECK(parse_double("2.5") == 2.5);
  CHECK(parse_double("-1e-3") == -1e-3);
  CHECK_FALSE(parse_double("2.5x"));
  CHECK_FALSE(parse_double(""));
  CHECK_FALSE(parse_double("abc"));
  CHECK(parse_int("-42") == -42);
  CHECK_FALSE(parse_int("4.2"));
  CHECK(trim("  a b \t") == "a b");
  CHECK(split("a,,b", ',') == std::vector<std::string>{"a", "", "b"});
}

TEST_CASE("key-value documents") {
  const auto d = KvDocument::parse("# header\n\nbelt.speed = 0.3\n  name=  two words  \n", "cell");
  REQUIRE(d.entries().size() == 2);
  CHECK(d.find("belt.speed")->value == "0.3");
  CHECK(d.find("belt.speed")->line == 3);
  CHECK(d.find("name")->value == "two words");
  CHECK_FALSE(d.contains("missing"));
  CHECK(KvDocument::parse(d.to_string()).entries().size() == 2);
  CHECK_THROWS_AS(KvDocument::parse("no equals sign\n"), IoError);
  CHECK_THROWS_AS(KvDocument::parse("a = 1\na = 2\n"), IoError);
}

TEST_CASE("atomic write replaces the file") {
  const auto dir = std::filesystem::temp_directory_path() / "cais_io_test";
  std::filesystem::create_directories(dir);
  const auto p = dir / "f.txt";
  write_file_atomic(p, "first");
  write_file_atomic(p, "second");
  CHECK(read_file(p) == "second");
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir)) ++files;
  CHECK(files == 1);
  std::filesystem::remove_all(dir);
  CHECK_THROWS_AS(read_file(dir / "gone.txt"), IoError);
}
