#include "mps/mtxio.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace mps {

namespace {

enum class Field { Real, Integer, Complex, Pattern };
enum class Symmetry { General, Symmetric, Skew, Hermitian };

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

[[noreturn]] void fail(MtxParseError::Kind kind, std::size_t line, const std::string& what) {
  throw MtxParseError(kind, "matrix market, line " + std::to_string(line) + ": " + what);
}

bool next_content_line(std::istream& in, std::string& line, std::size_t& lineno) {
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t i = 0;
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i == line.size() || line[i] == '%') continue;
    return true;
  }
  return false;
}

std::int64_t parse_index(const char*& p, std::size_t lineno) {
  errno = 0;
  char* end = nullptr;
  long long v = std::strtoll(p, &end, 10);
  if (end == p || errno == ERANGE) fail(MtxParseError::Kind::BadEntry, lineno, "expected integer");
  p = end;
  return static_cast<std::int64_t>(v);
}

double parse_value(const char*& p, std::size_t lineno) {
  errno = 0;
  char* end = nullptr;
  double v = std::strtod(p, &end);
  if (end == p || errno == ERANGE) fail(MtxParseError::Kind::BadEntry, lineno, "expected number");
  p = end;
  return v;
}

void expect_line_end(const char* p, std::size_t lineno) {
  while (*p != '\0') {
    if (!std::isspace(static_cast<unsigned char>(*p)))
      fail(MtxParseError::Kind::BadEntry, lineno, "trailing characters after entry");
    ++p;
  }
}

template <class E>
void append_expanded(CooMatrix<E>& m, std::int64_t r, std::int64_t c, E v, Symmetry sym,
                     std::size_t lineno) {
  if (sym != Symmetry::General && c > r)
    fail(MtxParseError::Kind::BadEntry, lineno,
         "entry above the diagonal in a symmetric-format matrix");
  m.entries.push_back({r, c, v});
  if (sym == Symmetry::General || r == c) return;
  E mirror = v;
  if constexpr (std::is_same_v<E, std::complex<double>>) {
    if (sym == Symmetry::Hermitian) mirror = std::conj(v);
  }
  if (sym == Symmetry::Skew) mirror = -mirror;
  m.entries.push_back({c, r, mirror});
}

}  // namespace

ParsedMtx parse_mtx(std::istream& in, bool require_square) {
  std::string line;
  std::size_t lineno = 0;

  if (!std::getline(in, line)) fail(MtxParseError::Kind::BadHeader, 1, "empty stream");
  ++lineno;
  std::istringstream hdr(lower(line));
  std::string banner, object, format, field_s, sym_s;
  hdr >> banner >> object >> format >> field_s >> sym_s;
  if (banner != "%%matrixmarket" || object != "matrix")
    fail(MtxParseError::Kind::BadHeader, lineno, "missing %%MatrixMarket banner");
  if (format != "coordinate")
    fail(MtxParseError::Kind::BadHeader, lineno, "only coordinate format is supported");

  Field field;
  if (field_s == "real") field = Field::Real;
  else if (field_s == "integer") field = Field::Integer;
  else if (field_s == "complex") field = Field::Complex;
  else if (field_s == "pattern") field = Field::Pattern;
  else fail(MtxParseError::Kind::BadHeader, lineno, "unknown field '" + field_s + "'");

  Symmetry sym;
  if (sym_s == "general") sym = Symmetry::General;
  else if (sym_s == "symmetric") sym = Symmetry::Symmetric;
  else if (sym_s == "skew-symmetric") sym = Symmetry::Skew;
  else if (sym_s == "hermitian") sym = Symmetry::Hermitian;
  else fail(MtxParseError::Kind::BadHeader, lineno, "unknown symmetry '" + sym_s + "'");

  if (sym == Symmetry::Hermitian && field != Field::Complex)
    fail(MtxParseError::Kind::BadHeader, lineno, "hermitian requires a complex field");

  if (!next_content_line(in, line, lineno))
    fail(MtxParseError::Kind::BadSize, lineno + 1, "missing size line");
  std::int64_t nrows, ncols, declared;
  {
    const char* p = line.c_str();
    nrows = parse_index(p, lineno);
    ncols = parse_index(p, lineno);
    declared = parse_index(p, lineno);
    expect_line_end(p, lineno);
  }
  if (nrows <= 0 || ncols <= 0 || declared < 0)
    fail(MtxParseError::Kind::BadSize, lineno, "invalid dimensions");
  if (require_square && nrows != ncols)
    fail(MtxParseError::Kind::NotSquare, lineno,
         "matrix is " + std::to_string(nrows) + "x" + std::to_string(ncols) +
             " but a square matrix is required");
  if (sym != Symmetry::General && nrows != ncols)
    fail(MtxParseError::Kind::BadSize, lineno, "symmetric storage requires a square matrix");

  const bool complex_out = field == Field::Complex;
  CooMatrix<double> real_m;
  CooMatrix<std::complex<double>> cplx_m;
  real_m.nrows = cplx_m.nrows = nrows;
  real_m.ncols = cplx_m.ncols = ncols;

  std::int64_t seen = 0;
  while (seen < declared) {
    if (!next_content_line(in, line, lineno))
      fail(MtxParseError::Kind::CountMismatch, lineno,
           "expected " + std::to_string(declared) + " entries, found " + std::to_string(seen));
    const char* p = line.c_str();
    std::int64_t r = parse_index(p, lineno) - 1;
    std::int64_t c = parse_index(p, lineno) - 1;
    if (r < 0 || r >= nrows || c < 0 || c >= ncols)
      fail(MtxParseError::Kind::IndexOutOfRange, lineno, "entry index out of range");

    if (complex_out) {
      double re = parse_value(p, lineno);
      double im = parse_value(p, lineno);
      expect_line_end(p, lineno);
      if (sym == Symmetry::Hermitian && r == c && im != 0.0)
        fail(MtxParseError::Kind::BadEntry, lineno, "hermitian diagonal must be real");
      append_expanded(cplx_m, r, c, std::complex<double>(re, im), sym, lineno);
    } else {
      double v = 1.0;
      if (field != Field::Pattern) v = parse_value(p, lineno);
      expect_line_end(p, lineno);
      append_expanded(real_m, r, c, v, sym, lineno);
    }
    ++seen;
  }

  while (next_content_line(in, line, lineno))
    fail(MtxParseError::Kind::CountMismatch, lineno, "more entries than declared");

  if (complex_out) return cplx_m;
  return real_m;
}

ParsedMtx parse_mtx_file(const std::filesystem::path& path, bool require_square) {
  std::ifstream in(path);
  if (!in) throw MtxParseError(MtxParseError::Kind::Io, "cannot open " + path.string());
  return parse_mtx(in, require_square);
}

namespace {

void write_header(std::ostream& out, const char* field, std::int64_t nrows, std::int64_t ncols,
                  std::size_t nnz) {
  out << "%%MatrixMarket matrix coordinate " << field << " general\n"
      << nrows << ' ' << ncols << ' ' << nnz << '\n';
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_mtx(const CooMatrix<double>& m, std::ostream& out) {
  write_header(out, "real", m.nrows, m.ncols, m.entries.size());
  for (const auto& e : m.entries)
    out << (e.row + 1) << ' ' << (e.col + 1) << ' ' << fmt17(e.value) << '\n';
}

void write_mtx(const CooMatrix<std::complex<double>>& m, std::ostream& out) {
  write_header(out, "complex", m.nrows, m.ncols, m.entries.size());
  for (const auto& e : m.entries)
    out << (e.row + 1) << ' ' << (e.col + 1) << ' ' << fmt17(e.value.real()) << ' '
        << fmt17(e.value.imag()) << '\n';
}

void write_mtx_file(const ParsedMtx& m, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw MtxParseError(MtxParseError::Kind::Io, "cannot open " + path.string());
  std::visit([&](const auto& coo) { write_mtx(coo, out); }, m);
  out.flush();
  if (!out) throw MtxParseError(MtxParseError::Kind::Io, "write failed: " + path.string());
}

}  // namespace mps
