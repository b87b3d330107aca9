#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

namespace eik {

/// Grayscale raster, row-major, `height` rows of `width` pixels.
struct GrayImage {
  std::size_t width = 0;
  std::size_t height = 0;
  int maxval = 255;
  std::vector<std::uint16_t> pixels;

  std::uint16_t at(std::size_t row, std::size_t col) const {
    return pixels[row * width + col];
  }
};

/// Reads binary (P5) or ASCII (P2) PGM, maxval up to 65535.
GrayImage read_pgm(std::istream& is);
GrayImage read_pgm(const std::filesystem::path& path);

/// Writes P5 (binary) or P2 (ascii).
void write_pgm(std::ostream& os, const GrayImage& img, bool binary = true);
void write_pgm(const std::filesystem::path& path, const GrayImage& img, bool binary = true);

}  // namespace eik
