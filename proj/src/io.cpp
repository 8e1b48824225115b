#include "cgle/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "cgle/error.hpp"

namespace cgle {

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_solution(std::ostream& os, const StatePoint& s) {
  const Grid& g = s.grid();
  os << "RPO1\n";
  os << "Lx " << format_real(kLx) << '\n';
  os << "params " << format_real(s.params.R) << ' ' << format_real(s.params.nu) << ' ' << format_real(s.params.mu)
     << '\n';
  os << "group " << format_real(s.shift.phi) << ' ' << format_real(s.shift.S) << ' ' << format_real(s.shift.T)
     << '\n';
  os << "grid " << g.nx() << ' ' << g.nt() << '\n';
  for (std::size_t i = 0; i < g.size(); ++i) {
    os << "coef " << g.m_of(i) << ' ' << g.n_of(i) << ' ' << format_real(s.field[i].real()) << ' '
       << format_real(s.field[i].imag()) << '\n';
  }
}

namespace {

class LineReader {
 public:
  explicit LineReader(std::istream& is) : is_(is) {}

  /// Next line split on whitespace; throws at end of input.
  std::vector<std::string> next(const std::string& expected) {
    std::string line;
    if (!std::getline(is_, line)) {
      throw ParseError(line_ + 1, "unexpected end of file, expected " + expected);
    }
    ++line_;
    std::istringstream ss(line);
    std::vector<std::string> tok;
    for (std::string t; ss >> t;) tok.push_back(t);
    return tok;
  }

  std::size_t line() const { return line_; }

  void expect_end() {
    std::string line;
    while (std::getline(is_, line)) {
      ++line_;
      if (line.find_first_not_of(" \t\r") != std::string::npos) throw ParseError(line_, "unexpected trailing content");
    }
  }

 private:
  std::istream& is_;
  std::size_t line_ = 0;
};

double to_real(const std::string& s, std::size_t line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw ParseError(line, "invalid real '" + s + "'");
  }
  return v;
}

int to_int(const std::string& s, std::size_t line) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ParseError(line, "invalid integer '" + s + "'");
  return v;
}

std::vector<std::string> keyed(LineReader& r, const std::string& key, std::size_t count) {
  auto tok = r.next("'" + key + "'");
  if (tok.empty() || tok[0] != key) throw ParseError(r.line(), "expected '" + key + "'");
  if (tok.size() != count + 1) {
    throw ParseError(r.line(), "'" + key + "' takes " + std::to_string(count) + " values");
  }
  return tok;
}

}  // namespace

StatePoint read_solution(std::istream& is) {
  LineReader r(is);
  auto magic = r.next("magic 'RPO1'");
  if (magic.size() != 1 || magic[0] != "RPO1") throw ParseError(r.line(), "missing magic 'RPO1'");

  auto lx = keyed(r, "Lx", 1);
  const double lxv = to_real(lx[1], r.line());
  if (std::abs(lxv - kLx) > 1e-12 * kLx) throw ParseError(r.line(), "only Lx = 2 pi is supported");

  auto pt = keyed(r, "params", 3);
  const std::size_t pline = r.line();
  Parameters params{to_real(pt[1], pline), to_real(pt[2], pline), to_real(pt[3], pline)};

  auto gt = keyed(r, "group", 3);
  const std::size_t gline = r.line();
  GroupShift shift{to_real(gt[1], gline), to_real(gt[2], gline), to_real(gt[3], gline)};
  if (!(shift.T > 0.0)) throw ParseError(gline, "period T must be positive");

  auto gr = keyed(r, "grid", 2);
  const int nx = to_int(gr[1], r.line());
  const int nt = to_int(gr[2], r.line());
  if (nx < 8 || nt < 8 || nx % 2 != 0 || nt % 2 != 0) throw ParseError(r.line(), "grid sizes must be even and >= 8");
  if (static_cast<long long>(nx) * nt > (1LL << 26)) throw ParseError(r.line(), "grid too large");
  const Grid grid(nx, nt);

  SpectralField field(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const int m = grid.m_of(i);
    const int n = grid.n_of(i);
    const std::string want = "coef " + std::to_string(m) + " " + std::to_string(n);
    auto tok = r.next("'" + want + "'");
    if (tok.size() != 5 || tok[0] != "coef") throw ParseError(r.line(), "expected '" + want + " <re> <im>'");
    if (to_int(tok[1], r.line()) != m || to_int(tok[2], r.line()) != n) {
      throw ParseError(r.line(), "coefficients out of order, expected '" + want + "'");
    }
    field[i] = cplx(to_real(tok[3], r.line()), to_real(tok[4], r.line()));
  }
  r.expect_end();
  return StatePoint{std::move(field), shift, params};
}

void save_solution(const std::filesystem::path& file, const StatePoint& s) {
  std::ofstream os(file);
  if (!os) throw Error("cannot open '" + file.string() + "' for writing");
  write_solution(os, s);
  os.flush();
  if (!os) throw Error("write to '" + file.string() + "' failed");
}

StatePoint load_solution(const std::filesystem::path& file) {
  std::ifstream is(file);
  if (!is) throw Error("cannot open '" + file.string() + "'");
  return read_solution(is);
}

const char* PathCsvWriter::header() {
  return "step,param,R,nu,mu,phi,S,T,field_norm,residual_norm,newton_iters,gmres_max_iters,symmetry,solution_file";
}

PathCsvWriter::PathCsvWriter(const std::filesystem::path& file) : out_(file, std::ios::trunc) {
  if (!out_) throw Error("cannot open '" + file.string() + "' for writing");
  out_ << header() << '\n';
  out_.flush();
}

namespace {

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

void PathCsvWriter::append(const PathPoint& pt, Param param, const std::string& solution_file) {
  const StatePoint& s = pt.state;
  std::ostringstream row;
  row << pt.step << ',' << to_string(param) << ',' << format_real(s.params.R) << ',' << format_real(s.params.nu) << ','
      << format_real(s.params.mu) << ',' << format_real(s.shift.phi) << ',' << format_real(s.shift.S) << ','
      << format_real(s.shift.T) << ',' << format_real(s.field.norm()) << ',' << format_real(pt.residual_norm) << ','
      << pt.newton_iterations << ',' << pt.max_gmres_iterations << ',' << quoted(pt.symmetry) << ','
      << quoted(solution_file) << '\n';
  out_ << row.str();
  out_.flush();
  if (!out_) throw Error("path CSV write failed");
}

}  // namespace cgle
