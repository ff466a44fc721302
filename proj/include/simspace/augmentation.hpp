#pragma once

#include "simspace/image.hpp"
#include "simspace/rng.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace simspace {

enum class AugmentStep { crop, blur, noise, affine, contrast, brightness };

const char* to_string(AugmentStep step) noexcept;
AugmentStep parse_augment_step(std::string_view text);

struct ParameterRange {
  double lo = 0.0;
  double hi = 0.0;
};

/// Seeded augmentation settings. Each replicate applies the enabled steps in
/// a random order with parameters drawn uniformly from these ranges.
///
/// Documented bounds, enforced by validate():
///   crop_fraction (0, 1]   blur_sigma [0, 10] px   noise_sigma [0, 1]
///   rotation_deg [-180, 180]   shear_deg [-45, 45]   translation [-1, 1]
///   scale (0, 10]   contrast [0, 10]   brightness [-1, 1]
struct AugmentationPlan {
  std::size_t per_image = 1000;
  std::uint64_t seed = 0;
  std::vector<AugmentStep> steps{AugmentStep::crop,   AugmentStep::blur,     AugmentStep::noise,
                                 AugmentStep::affine, AugmentStep::contrast, AugmentStep::brightness};

  ParameterRange crop_fraction{0.9, 1.0};  // retained share of each side
  ParameterRange blur_sigma{0.0, 2.0};
  ParameterRange noise_sigma{0.0, 0.05};
  ParameterRange rotation_deg{-15.0, 15.0};
  ParameterRange shear_deg{-10.0, 10.0};
  ParameterRange translation{-0.1, 0.1};  // share of width / height
  ParameterRange scale{0.9, 1.1};
  ParameterRange contrast{0.8, 1.2};
  ParameterRange brightness{-0.1, 0.1};

  void validate() const;

  /// Every range collapsed to the identity transform.
  static AugmentationPlan identity();
};

struct AugmentationParams {
  std::vector<AugmentStep> order;
  double crop_w = 1.0, crop_h = 1.0;  // retained fractions
  double crop_x = 0.0, crop_y = 0.0;  // offsets as a share of the removed margin
  double blur_sigma = 0.0;
  double noise_sigma = 0.0;
  double rotation_deg = 0.0, shear_deg = 0.0;
  double translate_x = 0.0, translate_y = 0.0;
  double scale = 1.0;
  double contrast = 1.0;
  double brightness = 0.0;

  std::string order_text() const;   // steps joined by '|'
  std::string params_text() const;  // key=value pairs joined by ';'
};

AugmentationParams sample_parameters(const AugmentationPlan& plan, Rng& rng);

/// Applies the steps in params.order; additive noise draws from `rng`.
/// Output keeps the input size and is clamped to [0, 1].
RasterImage apply_augmentation(const RasterImage& image, const AugmentationParams& params, Rng& rng);

struct ManifestRow {
  std::string sample_id;
  std::string group_id;
  std::string step_order;
  std::string params;
};

struct AugmentationManifest {
  std::vector<ManifestRow> rows;

  /// sample_id -> group_id
  std::map<std::string, std::string> group_map() const;

  void save(const std::filesystem::path& path) const;
  static AugmentationManifest load(const std::filesystem::path& path);
};

/// Writes per_image PNG variants of every image in `images` to `out`
/// (named <stem>_<index>.png) together with out/manifest.csv. Replicate j of
/// image `stem` uses the stream (seed, stem, j), so output bytes do not depend
/// on scheduling.
AugmentationManifest augment_dataset(const std::filesystem::path& images, const AugmentationPlan& plan,
                                     const std::filesystem::path& out);

}  // namespace simspace
