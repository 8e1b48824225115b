#pragma once

// Text persistence.
//
// Solution file:
//   RPO1
//   Lx <v>
//   params <R> <nu> <mu>
//   group <phi> <S> <T>
//   grid <Nx> <Nt>
//   coef <m> <n> <re> <im>      (one line per mode, canonical order)
// Reals are written with 17 significant digits.

#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <string>

#include "cgle/continuation.hpp"
#include "cgle/system.hpp"

namespace cgle {

void write_solution(std::ostream& os, const StatePoint& s);
/// Throws ParseError (with 1-based line number) on malformed input.
StatePoint read_solution(std::istream& is);

void save_solution(const std::filesystem::path& file, const StatePoint& s);
/// Throws Error if the file cannot be opened, ParseError if it is malformed.
StatePoint load_solution(const std::filesystem::path& file);

/// Appends one CSV row per accepted continuation point, flushing after each row.
class PathCsvWriter {
 public:
  /// Truncates `file` and writes the header.
  explicit PathCsvWriter(const std::filesystem::path& file);

  void append(const PathPoint& pt, Param param, const std::string& solution_file);

  static const char* header();

 private:
  std::ofstream out_;
};

/// "%.17g".
std::string format_real(double x);

}  // namespace cgle
