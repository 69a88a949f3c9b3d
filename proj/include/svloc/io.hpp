#pragma once

#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "svloc/matrix.hpp"

namespace svloc {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Binary matrix layout (all little-endian):
//   bytes 0..3   magic "SVLM"
//   bytes 4..7   uint32 format version
//   bytes 8..11  uint32 rows N
//   bytes 12..15 uint32 cols n
//   then N*n IEEE-754 binary64 entries, row-major.
inline constexpr std::array<char, 4> kMatrixMagic{'S', 'V', 'L', 'M'};
inline constexpr std::uint32_t kMatrixFormatVersion = 1;

namespace detail {

inline void put_u32(std::string& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xffu));
}

inline std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

inline void put_f64(std::string& out, double x) {
  const auto bits = std::bit_cast<std::uint64_t>(x);
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xffu));
}

inline double get_f64(const unsigned char* p) {
  std::uint64_t bits = 0;
  for (int b = 7; b >= 0; --b) bits = (bits << 8) | p[b];
  return std::bit_cast<double>(bits);
}

}  // namespace detail

inline std::string encode_matrix(const Matrix& x) {
  if (x.rows() > std::numeric_limits<std::uint32_t>::max() ||
      x.cols() > std::numeric_limits<std::uint32_t>::max())
    throw std::invalid_argument("encode_matrix: dimensions exceed 32 bits");
  std::string out;
  out.reserve(16 + 8 * x.size());
  out.append(kMatrixMagic.data(), kMatrixMagic.size());
  detail::put_u32(out, kMatrixFormatVersion);
  detail::put_u32(out, static_cast<std::uint32_t>(x.rows()));
  detail::put_u32(out, static_cast<std::uint32_t>(x.cols()));
  for (double v : x.data()) detail::put_f64(out, v);
  return out;
}

inline Matrix decode_matrix(const std::string& bytes) {
  if (bytes.size() < 16) throw IoError("matrix file truncated: missing 16-byte header");
  if (std::memcmp(bytes.data(), kMatrixMagic.data(), 4) != 0)
    throw IoError("matrix file: bad magic (expected SVLM)");
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::uint32_t version = detail::get_u32(p + 4);
  if (version != kMatrixFormatVersion)
    throw IoError("matrix file: unsupported version " + std::to_string(version));
  const std::size_t rows = detail::get_u32(p + 8);
  const std::size_t cols = detail::get_u32(p + 12);
  if (bytes.size() != 16 + 8 * rows * cols)
    throw IoError("matrix file: payload size does not match " + std::to_string(rows) + "x" +
                  std::to_string(cols));
  std::vector<double> data(rows * cols);
  for (std::size_t k = 0; k < data.size(); ++k) data[k] = detail::get_f64(p + 16 + 8 * k);
  Matrix x(rows, cols, std::move(data));
  if (!x.all_finite()) throw IoError("matrix file: non-finite entry");
  return x;
}

inline void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void save_matrix(const std::filesystem::path& path, const Matrix& x) {
  write_file(path, encode_matrix(x));
}

inline Matrix load_matrix(const std::filesystem::path& path) { return decode_matrix(read_file(path)); }

// Shortest round-trip decimal text for a double.
inline std::string format_double(double x) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), res.ptr);
}

// Header row c1..cn, one line per matrix row, LF endings.
inline std::string matrix_to_csv(const Matrix& x) {
  std::string out;
  for (std::size_t j = 0; j < x.cols(); ++j) {
    if (j) out += ',';
    out += "c" + std::to_string(j + 1);
  }
  out += '\n';
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < x.cols(); ++j) {
      if (j) out += ',';
      out += format_double(x(i, j));
    }
    out += '\n';
  }
  return out;
}

}  // namespace svloc
