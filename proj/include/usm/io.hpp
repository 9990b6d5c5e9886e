#ifndef USM_IO_HPP_
#define USM_IO_HPP_

#include <iosfwd>
#include <string>

#include "usm/numerics.hpp"
#include "usm/patchgrid.hpp"

namespace usm {

// USM1: ASCII header "USM1 <rows> <cols>\n" followed by rows*cols
// little-endian IEEE-754 doubles in row-major order.
void write_usm1(std::ostream& os, const Mat& m);
Mat read_usm1(std::istream& is);
void write_usm1_file(const std::string& path, const Mat& m);
Mat read_usm1_file(const std::string& path);

// Plain-text PGM ("P2"), maxval 65535, pixel = round(v * 65535).
void write_pgm_file(const std::string& path, const ImageGrid& img);
ImageGrid read_pgm_file(const std::string& path);

// Fixed 17-significant-digit float formatting for CSV artifacts.
std::string format_double(double v);

}  // namespace usm

#endif  // USM_IO_HPP_
