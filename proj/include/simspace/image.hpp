#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

namespace simspace {

/// Interleaved raster with values in [0, 1]; pixel (x, y) channel c lives at
/// data[(y * width + x) * channels + c].
struct RasterImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t channels = 0;  // 1 or 3
  std::vector<double> data;

  RasterImage() = default;
  RasterImage(std::size_t w, std::size_t h, std::size_t c, double fill = 0.0);

  double& at(std::size_t x, std::size_t y, std::size_t c) { return data[(y * width + x) * channels + c]; }
  double at(std::size_t x, std::size_t y, std::size_t c) const { return data[(y * width + x) * channels + c]; }

  /// Throws InvalidArgument unless dimensions are positive and values lie in [0, 1].
  void validate() const;
};

/// Decodes PNG or JPEG (detected from the file signature). Grayscale stays
/// single-channel, everything else becomes RGB; alpha is dropped.
RasterImage load_image(const std::filesystem::path& path);

/// 8-bit PNG; values are rounded to the nearest of 256 levels.
void save_png(const RasterImage& image, const std::filesystem::path& path);

/// Regular files with a .png/.jpg/.jpeg extension, sorted by file name.
std::vector<std::filesystem::path> list_images(const std::filesystem::path& directory);

}  // namespace simspace
