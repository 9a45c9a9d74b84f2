#include <doctest.h>

#include <filesystem>
#include <string>

#include "bmw/csv.hpp"
#include "bmw/errors.hpp"

namespace fs = std::filesystem;

TEST_CASE("parses quoted cells, escapes and CRLF") {
  bmw::CsvTable t = bmw::parse_csv("id,note\r\na,\"hello, world\"\nb,\"say \"\"hi\"\"\"\n");
  REQUIRE(t.header.size() == 2);
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0][1] == "hello, world");
  CHECK(t.rows[1][1] == "say \"hi\"");
}

TEST_CASE("round trip preserves cells that need quoting") {
  bmw::CsvTable t;
  t.header = {"id", "x"};
  t.rows = {{"a,b", "line\nbreak"}, {"q\"q", "plain"}};
  bmw::CsvTable back = bmw::parse_csv(bmw::to_csv(t));
  CHECK(back.header == t.header);
  CHECK(back.rows == t.rows);
}

TEST_CASE("ragged rows are an IO error") {
  CHECK_THROWS_AS(bmw::parse_csv("a,b\n1\n"), bmw::IoError);
  CHECK_THROWS_AS(bmw::parse_csv("a,b\n1,2,3\n"), bmw::IoError);
}

TEST_CASE("atomic write leaves no temp file behind") {
  fs::path dir = fs::temp_directory_path() / "bmw_csv_test";
  fs::remove_all(dir);
  fs::path target = dir / "out.csv";
  bmw::write_file_atomic(target.string(), "x,y\n1,2\n");
  CHECK(bmw::read_file(target.string()) == "x,y\n1,2\n");
  int entries = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++entries;
  CHECK(entries == 1);
  fs::remove_all(dir);
}

TEST_CASE("reading a missing file is an IO error") {
  CHECK_THROWS_AS(bmw::read_file("/nonexistent/bmw/path.csv"), bmw::IoError);
}
