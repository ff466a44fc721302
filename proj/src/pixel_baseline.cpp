#include "simspace/pixel_baseline.hpp"

#include "simspace/error.hpp"
#include "simspace/parallel.hpp"

#include <algorithm>
#include <numeric>

namespace simspace {

const char* to_string(Aggregator agg) noexcept {
  switch (agg) {
    case Aggregator::min: return "min";
    case Aggregator::mean: return "mean";
    case Aggregator::median: return "median";
    case Aggregator::max: return "max";
  }
  return "unknown";
}

Aggregator parse_aggregator(std::string_view text) {
  if (text == "min") return Aggregator::min;
  if (text == "mean") return Aggregator::mean;
  if (text == "median") return Aggregator::median;
  if (text == "max") return Aggregator::max;
  throw Error(ErrorKind::InvalidArgument, "unknown aggregator '" + std::string(text) + "'");
}

namespace {

double aggregate(std::vector<double>& values, Aggregator agg) {
  switch (agg) {
    case Aggregator::min: return *std::min_element(values.begin(), values.end());
    case Aggregator::max: return *std::max_element(values.begin(), values.end());
    case Aggregator::mean: {
      // Offsets from the block minimum keep constant blocks exact and the
      // result inside [min, max].
      const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
      double offset = 0.0;
      for (double v : values) offset += v - *lo;
      return std::min(*hi, *lo + offset / static_cast<double>(values.size()));
    }
    case Aggregator::median: {
      std::sort(values.begin(), values.end());
      const std::size_t n = values.size();
      return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
    }
  }
  return 0.0;
}

}  // namespace

std::vector<double> block_downscale(const RasterImage& image, std::size_t block, Aggregator agg) {
  image.validate();
  if (block < 1 || block > std::max(image.width, image.height)) {
    throw Error(ErrorKind::InvalidBlockSize, "block size " + std::to_string(block) + " outside [1, " +
                                                 std::to_string(std::max(image.width, image.height)) + "]");
  }
  const std::size_t cols = (image.width + block - 1) / block;
  const std::size_t rows = (image.height + block - 1) / block;
  std::vector<double> out;
  out.reserve(image.channels * rows * cols);
  std::vector<double> cell;
  for (std::size_t c = 0; c < image.channels; ++c) {
    for (std::size_t by = 0; by < rows; ++by) {
      for (std::size_t bx = 0; bx < cols; ++bx) {
        cell.clear();
        const std::size_t y_end = std::min(image.height, (by + 1) * block);
        const std::size_t x_end = std::min(image.width, (bx + 1) * block);
        for (std::size_t y = by * block; y < y_end; ++y)
          for (std::size_t x = bx * block; x < x_end; ++x) cell.push_back(image.at(x, y, c));
        out.push_back(aggregate(cell, agg));
      }
    }
  }
  return out;
}

FeatureMatrix pixel_features(const std::filesystem::path& directory, std::size_t block, Aggregator agg,
                             const std::map<std::string, std::string>& group_of) {
  const auto files = list_images(directory);
  if (files.empty()) throw Error(ErrorKind::EmptyInput, "no PNG/JPEG images in " + directory.string());

  std::vector<std::vector<double>> vectors(files.size());
  parallel_for(files.size(), [&](std::size_t i) { vectors[i] = block_downscale(load_image(files[i]), block, agg); });

  const std::size_t k = vectors.front().size();
  Eigen::MatrixXd values(static_cast<Eigen::Index>(files.size()), static_cast<Eigen::Index>(k));
  std::vector<std::string> samples;
  std::vector<std::string> groups;
  for (std::size_t i = 0; i < files.size(); ++i) {
    if (vectors[i].size() != k) {
      throw Error(ErrorKind::DimensionMismatch, files[i].string() + " yields " + std::to_string(vectors[i].size()) +
                                                    " features, expected " + std::to_string(k));
    }
    for (std::size_t f = 0; f < k; ++f) values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(f)) = vectors[i][f];
    const std::string stem = files[i].stem().string();
    samples.push_back(stem);
    const auto it = group_of.find(stem);
    groups.push_back(it == group_of.end() ? stem : it->second);
  }
  return FeatureMatrix(std::move(samples), std::move(groups), std::move(values));
}

}  // namespace simspace
