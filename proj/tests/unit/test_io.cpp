#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cgle/dynamics.hpp"
#include "cgle/error.hpp"
#include "cgle/io.hpp"
#include "doctest.h"
#include "reference/reference.hpp"

using namespace cgle;

namespace {

const Parameters kP{16.0, -7.0, 5.0};

StatePoint sample_state() {
  return StatePoint{reference::random_field(Grid(8, 10), 1), GroupShift{0.1 + 1e-17, kTwoPi / 3, 0.123456789}, kP};
}

std::string serialize(const StatePoint& s) {
  std::ostringstream os;
  write_solution(os, s);
  return os.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  for (std::string l; std::getline(is, l);) out.push_back(l);
  return out;
}

std::string join(const std::vector<std::string>& lines) {
  std::string s;
  for (const auto& l : lines) s += l + "\n";
  return s;
}

/// Line number reported for malformed `text`, or 0 if it parsed.
std::size_t parse_error_line(const std::string& text) {
  std::istringstream is(text);
  try {
    read_solution(is);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

std::filesystem::path temp_dir() {
  auto dir = std::filesystem::temp_directory_path() / ("cgle_io_test_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("round trip is exact") {
  const StatePoint s = sample_state();
  std::istringstream is(serialize(s));
  const StatePoint t = read_solution(is);
  CHECK(t.grid() == s.grid());
  CHECK(t.shift == s.shift);
  CHECK(t.params == s.params);
  for (std::size_t i = 0; i < s.field.size(); ++i) CHECK(t.field[i] == s.field[i]);
}

TEST_CASE("file layout") {
  const auto lines = lines_of(serialize(sample_state()));
  REQUIRE(lines.size() == 5u + 7u * 9u);
  CHECK(lines[0] == "RPO1");
  CHECK(lines[1].rfind("Lx ", 0) == 0);
  CHECK(lines[2] == "params 16 -7 5");
  CHECK(lines[4] == "grid 8 10");
  CHECK(lines[5].rfind("coef -3 -4 ", 0) == 0);
  CHECK(lines.back().rfind("coef 3 4 ", 0) == 0);
}

TEST_CASE("malformed files report the offending line") {
  const auto good = lines_of(serialize(sample_state()));

  auto truncated = good;
  truncated.resize(20);
  CHECK(parse_error_line(join(truncated)) == 21);

  auto header = good;
  header[0] = "RPO2";
  CHECK(parse_error_line(join(header)) == 1);

  auto lx = good;
  lx[1] = "Lx 6.0";
  CHECK(parse_error_line(join(lx)) == 2);

  auto period = good;
  period[3] = "group 0.1 0.2 -1";
  CHECK(parse_error_line(join(period)) == 4);

  auto grid = good;
  grid[4] = "grid 7 10";
  CHECK(parse_error_line(join(grid)) == 5);

  auto order = good;
  std::swap(order[6], order[7]);
  CHECK(parse_error_line(join(order)) == 7);

  auto number = good;
  number[10] = "coef -3 -3 1.0x 0";
  CHECK(parse_error_line(join(number)) == 11);

  auto trailing = good;
  trailing.push_back("extra");
  CHECK(parse_error_line(join(trailing)) == good.size() + 1);

  auto missing = good;
  missing[2] = "params 16 -7";
  CHECK(parse_error_line(join(missing)) == 3);

  CHECK(parse_error_line("") == 1);
}

TEST_CASE("files on disk") {
  const auto dir = temp_dir();
  const StatePoint s = plane_wave(1, kP, 0.1, 1.0, Grid(8, 8));
  save_solution(dir / "pw.rpo", s);
  const StatePoint t = load_solution(dir / "pw.rpo");
  CHECK(t.shift == s.shift);
  CHECK(residual(t).norm() <= 1e-12);
  CHECK_THROWS_AS(load_solution(dir / "missing.rpo"), Error);
  try {
    load_solution(dir / "missing.rpo");
  } catch (const ParseError&) {
    FAIL("missing file must not be a parse error");
  } catch (const Error&) {
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("continuation CSV") {
  const auto dir = temp_dir();
  {
    PathCsvWriter w(dir / "path.csv");
    PathPoint pt(plane_wave(0, kP, 0.05, 0.0, Grid(8, 8)));
    pt.step = 3;
    pt.lambda = 16.5;
    pt.ds = 0.25;
    pt.symmetry = "l=2,even@0";
    w.append(pt, Param::R, "step_00003.rpo");
  }
  std::ifstream in(dir / "path.csv");
  std::string header, row, extra;
  std::getline(in, header);
  std::getline(in, row);
  CHECK(header == PathCsvWriter::header());
  CHECK(row.rfind("3,", 0) == 0);
  CHECK(row.find("\"l=2,even@0\"") != std::string::npos);
  CHECK(row.find("\"step_00003.rpo\"") != std::string::npos);
  CHECK_FALSE(std::getline(in, extra));
  std::filesystem::remove_all(dir);
}

TEST_CASE("real formatting round-trips") {
  for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 6.283185307179586}) {
    CHECK(std::stod(format_real(x)) == x);
  }
}
