#include "pcw/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unistd.h>

namespace pcw {

void atomic_write(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  fs::path tmp = p;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, p);
}

std::string sci(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10e", v);
  return buf;
}

std::string CsvTable::str() const {
  std::ostringstream os;
  for (size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << '\n';
  for (auto& r : rows) {
    for (size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
    os << '\n';
  }
  return os.str();
}

double abs_percentile(const std::vector<double>& v, double q) {
  std::vector<double> a;
  a.reserve(v.size());
  for (double x : v)
    if (std::isfinite(x)) a.push_back(std::abs(x));
  if (a.empty()) return 0.0;
  size_t k = static_cast<size_t>(std::clamp(q, 0.0, 1.0) * (a.size() - 1));
  std::nth_element(a.begin(), a.begin() + k, a.end());
  return a[k];
}

Gray8 to_gray(const std::vector<double>& values, int width, int height, double saturation,
              double* scale_max) {
  Gray8 img;
  img.width = width;
  img.height = height;
  img.pixels.assign(static_cast<size_t>(width) * height, 255);
  double top = abs_percentile(values, saturation);
  if (scale_max) *scale_max = top;
  for (int r = 0; r < height; ++r)
    for (int c = 0; c < width; ++c) {
      double v = values[c + static_cast<size_t>(width) * (height - 1 - r)];
      if (!std::isfinite(v)) continue;
      double t = top > 0 ? std::min(1.0, std::abs(v) / top) : 0.0;
      img.pixels[c + static_cast<size_t>(width) * r] = static_cast<unsigned char>(std::lround(254.0 * t));
    }
  return img;
}

std::string encode_pgm(const Gray8& img) {
  std::string s = "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
  s.append(reinterpret_cast<const char*>(img.pixels.data()), img.pixels.size());
  return s;
}

std::string encode_ppm(const Rgb8& img) {
  std::string s = "P6\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
  s.append(reinterpret_cast<const char*>(img.pixels.data()), img.pixels.size());
  return s;
}

uint64_t fnv1a64(const std::string& s) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace pcw
