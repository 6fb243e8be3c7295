#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace pcw {

// Writes content to path through a temporary file in the same directory and
// an atomic rename.
void atomic_write(const std::string& path, const std::string& content);

// Scientific notation with enough digits to round-trip a double.
std::string sci(double v);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }
  std::string str() const;
};

// 8-bit grayscale image, row 0 at the top.
struct Gray8 {
  int width = 0;
  int height = 0;
  std::vector<unsigned char> pixels;
};

// Maps values to gray levels, saturating at the given percentile of |v|.
// Non-finite entries map to 255 (rendered white).
Gray8 to_gray(const std::vector<double>& values, int width, int height, double saturation,
              double* scale_max = nullptr);
std::string encode_pgm(const Gray8& img);

struct Rgb8 {
  int width = 0;
  int height = 0;
  std::vector<unsigned char> pixels;  // r, g, b
};
std::string encode_ppm(const Rgb8& img);

// Percentile of |v| over finite entries (q in [0, 1]).
double abs_percentile(const std::vector<double>& v, double q);

uint64_t fnv1a64(const std::string& s);
std::string hex64(uint64_t v);

}  // namespace pcw
