#pragma once

#include <complex>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <variant>

#include "mps/sparse.hpp"

// Matrix Market coordinate I/O. The parser handles real, integer,
// complex and pattern fields with general, symmetric, skew-symmetric and
// hermitian storage, expanding symmetry into explicit entries.

namespace mps {

class MtxParseError : public std::runtime_error {
 public:
  enum class Kind {
    BadHeader,
    BadSize,
    BadEntry,
    IndexOutOfRange,
    CountMismatch,
    NotSquare,
    Io,
  };

  MtxParseError(Kind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

using ParsedMtx = std::variant<CooMatrix<double>, CooMatrix<std::complex<double>>>;

ParsedMtx parse_mtx(std::istream& in, bool require_square = false);
ParsedMtx parse_mtx_file(const std::filesystem::path& path, bool require_square = false);

void write_mtx(const CooMatrix<double>& m, std::ostream& out);
void write_mtx(const CooMatrix<std::complex<double>>& m, std::ostream& out);
void write_mtx_file(const ParsedMtx& m, const std::filesystem::path& path);

inline bool is_complex(const ParsedMtx& m) {
  return std::holds_alternative<CooMatrix<std::complex<double>>>(m);
}

}  // namespace mps
