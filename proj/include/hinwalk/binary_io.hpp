#pragma once

// Little-endian primitives for the binary artifact formats.

#include <Eigen/Dense>
#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>

#include "hinwalk/errors.hpp"

namespace hinwalk::bin {

inline void put_u64(std::ostream& out, std::uint64_t v, int bytes = 8) {
  char b[8];
  for (int i = 0; i < bytes; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
  out.write(b, bytes);
}

inline std::uint64_t get_u64(std::istream& in, int bytes = 8) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), bytes)) throw DataError("truncated binary file");
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

inline void put_u32(std::ostream& out, std::uint32_t v) { put_u64(out, v, 4); }
inline std::uint32_t get_u32(std::istream& in) { return static_cast<std::uint32_t>(get_u64(in, 4)); }

inline void put_f32(std::ostream& out, double x) {
  put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(x)));
}
inline double get_f32(std::istream& in) { return std::bit_cast<float>(get_u32(in)); }

inline void put_f64(std::ostream& out, double x) { put_u64(out, std::bit_cast<std::uint64_t>(x)); }
inline double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

inline void put_string(std::ostream& out, const std::string& s) {
  put_u64(out, s.size());
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::string get_string(std::istream& in) {
  std::uint64_t n = get_u64(in);
  if (n > (std::uint64_t{1} << 32)) throw DataError("implausible string length in binary file");
  std::string s(n, '\0');
  if (!in.read(s.data(), static_cast<std::streamsize>(n))) throw DataError("truncated binary file");
  return s;
}

// u64 rows, u64 cols, column-major float64.
template <class Derived>
void put_matrix(std::ostream& out, const Eigen::MatrixBase<Derived>& m) {
  put_u64(out, static_cast<std::uint64_t>(m.rows()));
  put_u64(out, static_cast<std::uint64_t>(m.cols()));
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) put_f64(out, m(i, j));
}

template <class M>
void get_matrix(std::istream& in, M& m) {
  auto rows = static_cast<Eigen::Index>(get_u64(in));
  auto cols = static_cast<Eigen::Index>(get_u64(in));
  if (rows < 0 || cols < 0 || rows * cols > (Eigen::Index{1} << 31))
    throw DataError("implausible tensor shape in binary file");
  if constexpr (M::ColsAtCompileTime == 1) {
    if (cols != 1) throw DataError("expected a vector in binary file");
    m.resize(rows);
  } else {
    m.resize(rows, cols);
  }
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = get_f64(in);
}

}  // namespace hinwalk::bin
