#pragma once

#include "simspace/data_model.hpp"
#include "simspace/image.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace simspace {

enum class Aggregator { min, mean, median, max };

const char* to_string(Aggregator agg) noexcept;
Aggregator parse_aggregator(std::string_view text);

/// Aggregates every k x k block into one value per channel. The output has
/// ceil(w/k) * ceil(h/k) cells per channel; edge blocks use only the pixels
/// present. Layout is channel-major, then block row, then block column.
std::vector<double> block_downscale(const RasterImage& image, std::size_t block, Aggregator agg);

/// Features for every image in `directory` (sorted by file name). The sample
/// id is the file stem; the group id is taken from `group_of` when the stem
/// is listed there, else it is the stem itself.
FeatureMatrix pixel_features(const std::filesystem::path& directory, std::size_t block, Aggregator agg,
                             const std::map<std::string, std::string>& group_of = {});

}  // namespace simspace
