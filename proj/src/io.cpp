#include "usm/io.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

namespace usm {

namespace {

static_assert(std::endian::native == std::endian::little,
              "USM1 writer assumes a little-endian host");

void check_stream(const std::ios& s, const std::string& what) {
  if (!s.good()) fail(ErrorCode::IoError, what);
}

}  // namespace

void write_usm1(std::ostream& os, const Mat& m) {
  os << "USM1 " << m.rows() << " " << m.cols() << "\n";
  std::vector<double> row(static_cast<size_t>(m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) row[static_cast<size_t>(c)] = m(r, c);
    os.write(reinterpret_cast<const char*>(row.data()),
             static_cast<std::streamsize>(row.size() * sizeof(double)));
  }
  check_stream(os, "USM1: write failed");
}

Mat read_usm1(std::istream& is) {
  std::string magic;
  long long rows = 0, cols = 0;
  is >> magic >> rows >> cols;
  if (!is || magic != "USM1" || rows <= 0 || cols <= 0)
    fail(ErrorCode::ParseError, "USM1: bad header");
  is.get();  // consume the newline after the header
  Mat m(rows, cols);
  std::vector<double> row(static_cast<size_t>(cols));
  for (long long r = 0; r < rows; ++r) {
    is.read(reinterpret_cast<char*>(row.data()),
            static_cast<std::streamsize>(row.size() * sizeof(double)));
    if (!is) fail(ErrorCode::ParseError, "USM1: truncated payload");
    for (long long c = 0; c < cols; ++c) m(r, c) = row[static_cast<size_t>(c)];
  }
  if (!m.allFinite()) fail(ErrorCode::ParseError, "USM1: non-finite entries");
  return m;
}

void write_usm1_file(const std::string& path, const Mat& m) {
  std::ofstream os(path, std::ios::binary);
  check_stream(os, "cannot open " + path + " for writing");
  write_usm1(os, m);
}

Mat read_usm1_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  check_stream(is, "cannot open " + path);
  return read_usm1(is);
}

void write_pgm_file(const std::string& path, const ImageGrid& img) {
  std::ofstream os(path);
  check_stream(os, "cannot open " + path + " for writing");
  os << "P2\n" << img.width() << " " << img.height() << "\n65535\n";
  for (int r = 0; r < img.height(); ++r) {
    for (int c = 0; c < img.width(); ++c) {
      const long v = std::lround(img.pixels(r, c) * 65535.0);
      os << (c ? " " : "") << std::min(65535L, std::max(0L, v));
    }
    os << "\n";
  }
  check_stream(os, "PGM: write failed");
}

ImageGrid read_pgm_file(const std::string& path) {
  std::ifstream is(path);
  check_stream(is, "cannot open " + path);
  std::string magic;
  is >> magic;
  if (magic != "P2") fail(ErrorCode::ParseError, "PGM: expected P2 magic");
  long width = 0, height = 0, maxval = 0;
  is >> width >> height >> maxval;
  if (!is || width <= 0 || height <= 0 || maxval <= 0)
    fail(ErrorCode::ParseError, "PGM: bad header");
  ImageGrid img;
  img.pixels.resize(height, width);
  for (long r = 0; r < height; ++r)
    for (long c = 0; c < width; ++c) {
      long v = 0;
      is >> v;
      if (!is) fail(ErrorCode::ParseError, "PGM: truncated pixel data");
      if (v < 0 || v > maxval)
        fail(ErrorCode::ParseError, "PGM: pixel out of range");
      img.pixels(r, c) = static_cast<double>(v) / static_cast<double>(maxval);
    }
  return img;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace usm
