#include "simspace/augmentation.hpp"

#include "simspace/csv.hpp"
#include "simspace/data_model.hpp"
#include "simspace/error.hpp"
#include "simspace/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace simspace {

const char* to_string(AugmentStep step) noexcept {
  switch (step) {
    case AugmentStep::crop: return "crop";
    case AugmentStep::blur: return "blur";
    case AugmentStep::noise: return "noise";
    case AugmentStep::affine: return "affine";
    case AugmentStep::contrast: return "contrast";
    case AugmentStep::brightness: return "brightness";
  }
  return "unknown";
}

AugmentStep parse_augment_step(std::string_view text) {
  for (auto step : {AugmentStep::crop, AugmentStep::blur, AugmentStep::noise, AugmentStep::affine,
                    AugmentStep::contrast, AugmentStep::brightness}) {
    if (text == to_string(step)) return step;
  }
  throw Error(ErrorKind::InvalidArgument, "unknown augmentation step '" + std::string(text) + "'");
}

namespace {

void check_range(const ParameterRange& r, double lo, double hi, bool open_lo, const char* name) {
  const bool lower_ok = open_lo ? r.lo > lo : r.lo >= lo;
  if (!(r.lo <= r.hi) || !lower_ok || !(r.hi <= hi)) {
    throw Error(ErrorKind::InvalidArgument, std::string(name) + " range [" + format_double(r.lo) + ", " +
                                                format_double(r.hi) + "] outside its bounds");
  }
}

double draw(Rng& rng, const ParameterRange& r) { return r.lo == r.hi ? r.lo : rng.uniform(r.lo, r.hi); }

// Bilinear sample with edge replication.
double sample(const RasterImage& img, double x, double y, std::size_t c) {
  const double max_x = static_cast<double>(img.width - 1);
  const double max_y = static_cast<double>(img.height - 1);
  x = std::clamp(x, 0.0, max_x);
  y = std::clamp(y, 0.0, max_y);
  const auto x0 = static_cast<std::size_t>(std::floor(x));
  const auto y0 = static_cast<std::size_t>(std::floor(y));
  const std::size_t x1 = std::min(x0 + 1, img.width - 1);
  const std::size_t y1 = std::min(y0 + 1, img.height - 1);
  const double fx = x - static_cast<double>(x0);
  const double fy = y - static_cast<double>(y0);
  if (fx == 0.0 && fy == 0.0) return img.at(x0, y0, c);
  const double top = img.at(x0, y0, c) * (1.0 - fx) + img.at(x1, y0, c) * fx;
  const double bottom = img.at(x0, y1, c) * (1.0 - fx) + img.at(x1, y1, c) * fx;
  return top * (1.0 - fy) + bottom * fy;
}

RasterImage crop(const RasterImage& img, const AugmentationParams& p) {
  if (p.crop_w == 1.0 && p.crop_h == 1.0) return img;
  const double w = static_cast<double>(img.width);
  const double h = static_cast<double>(img.height);
  const double cw = p.crop_w * w;
  const double ch = p.crop_h * h;
  const double x0 = p.crop_x * (w - cw);
  const double y0 = p.crop_y * (h - ch);
  RasterImage out(img.width, img.height, img.channels);
  for (std::size_t y = 0; y < img.height; ++y) {
    const double sy = y0 + (static_cast<double>(y) + 0.5) * ch / h - 0.5;
    for (std::size_t x = 0; x < img.width; ++x) {
      const double sx = x0 + (static_cast<double>(x) + 0.5) * cw / w - 0.5;
      for (std::size_t c = 0; c < img.channels; ++c) out.at(x, y, c) = sample(img, sx, sy, c);
    }
  }
  return out;
}

RasterImage blur(const RasterImage& img, double sigma) {
  if (sigma <= 0.0) return img;
  const auto radius = static_cast<long>(std::ceil(3.0 * sigma));
  std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
  double total = 0.0;
  for (long i = -radius; i <= radius; ++i) {
    const double v = std::exp(-0.5 * static_cast<double>(i * i) / (sigma * sigma));
    kernel[static_cast<std::size_t>(i + radius)] = v;
    total += v;
  }
  for (double& v : kernel) v /= total;

  const auto clamp_index = [](long i, std::size_t n) {
    return static_cast<std::size_t>(std::clamp<long>(i, 0, static_cast<long>(n) - 1));
  };
  RasterImage tmp(img.width, img.height, img.channels);
  for (std::size_t y = 0; y < img.height; ++y)
    for (std::size_t x = 0; x < img.width; ++x)
      for (std::size_t c = 0; c < img.channels; ++c) {
        double acc = 0.0;
        for (long i = -radius; i <= radius; ++i)
          acc += kernel[static_cast<std::size_t>(i + radius)] * img.at(clamp_index(static_cast<long>(x) + i, img.width), y, c);
        tmp.at(x, y, c) = acc;
      }
  RasterImage out(img.width, img.height, img.channels);
  for (std::size_t y = 0; y < img.height; ++y)
    for (std::size_t x = 0; x < img.width; ++x)
      for (std::size_t c = 0; c < img.channels; ++c) {
        double acc = 0.0;
        for (long i = -radius; i <= radius; ++i)
          acc += kernel[static_cast<std::size_t>(i + radius)] * tmp.at(x, clamp_index(static_cast<long>(y) + i, img.height), c);
        out.at(x, y, c) = acc;
      }
  return out;
}

RasterImage noise(const RasterImage& img, double sigma, Rng& rng) {
  if (sigma <= 0.0) return img;
  RasterImage out = img;
  for (double& v : out.data) v += sigma * rng.normal();
  return out;
}

RasterImage affine(const RasterImage& img, const AugmentationParams& p) {
  if (p.rotation_deg == 0.0 && p.shear_deg == 0.0 && p.translate_x == 0.0 && p.translate_y == 0.0 && p.scale == 1.0) {
    return img;
  }
  const double theta = p.rotation_deg * std::numbers::pi / 180.0;
  const double shear = std::tan(p.shear_deg * std::numbers::pi / 180.0);
  // forward = scale * R(theta) * [[1, shear], [0, 1]]
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const double m00 = p.scale * c;
  const double m01 = p.scale * (c * shear - s);
  const double m10 = p.scale * s;
  const double m11 = p.scale * (s * shear + c);
  const double det = m00 * m11 - m01 * m10;
  const double i00 = m11 / det;
  const double i01 = -m01 / det;
  const double i10 = -m10 / det;
  const double i11 = m00 / det;

  const double cx = 0.5 * static_cast<double>(img.width) - 0.5;
  const double cy = 0.5 * static_cast<double>(img.height) - 0.5;
  const double tx = p.translate_x * static_cast<double>(img.width);
  const double ty = p.translate_y * static_cast<double>(img.height);
  RasterImage out(img.width, img.height, img.channels);
  for (std::size_t y = 0; y < img.height; ++y) {
    for (std::size_t x = 0; x < img.width; ++x) {
      const double dx = static_cast<double>(x) - cx - tx;
      const double dy = static_cast<double>(y) - cy - ty;
      const double sx = i00 * dx + i01 * dy + cx;
      const double sy = i10 * dx + i11 * dy + cy;
      for (std::size_t ch = 0; ch < img.channels; ++ch) out.at(x, y, ch) = sample(img, sx, sy, ch);
    }
  }
  return out;
}

RasterImage contrast(const RasterImage& img, double factor) {
  if (factor == 1.0) return img;
  double mean = 0.0;
  for (double v : img.data) mean += v;
  mean /= static_cast<double>(img.data.size());
  RasterImage out = img;
  for (double& v : out.data) v = mean + factor * (v - mean);
  return out;
}

RasterImage brightness(const RasterImage& img, double delta) {
  if (delta == 0.0) return img;
  RasterImage out = img;
  for (double& v : out.data) v += delta;
  return out;
}

}  // namespace

void AugmentationPlan::validate() const {
  if (per_image < 1) throw Error(ErrorKind::InvalidArgument, "per_image must be >= 1");
  for (std::size_t i = 0; i < steps.size(); ++i)
    for (std::size_t j = i + 1; j < steps.size(); ++j)
      if (steps[i] == steps[j]) throw Error(ErrorKind::InvalidArgument, "augmentation step listed twice");
  check_range(crop_fraction, 0.0, 1.0, true, "crop_fraction");
  check_range(blur_sigma, 0.0, 10.0, false, "blur_sigma");
  check_range(noise_sigma, 0.0, 1.0, false, "noise_sigma");
  check_range(rotation_deg, -180.0, 180.0, false, "rotation_deg");
  check_range(shear_deg, -45.0, 45.0, false, "shear_deg");
  check_range(translation, -1.0, 1.0, false, "translation");
  check_range(scale, 0.0, 10.0, true, "scale");
  check_range(contrast, 0.0, 10.0, false, "contrast");
  check_range(brightness, -1.0, 1.0, false, "brightness");
}

AugmentationPlan AugmentationPlan::identity() {
  AugmentationPlan plan;
  plan.per_image = 1;
  plan.crop_fraction = {1.0, 1.0};
  plan.blur_sigma = {0.0, 0.0};
  plan.noise_sigma = {0.0, 0.0};
  plan.rotation_deg = {0.0, 0.0};
  plan.shear_deg = {0.0, 0.0};
  plan.translation = {0.0, 0.0};
  plan.scale = {1.0, 1.0};
  plan.contrast = {1.0, 1.0};
  plan.brightness = {0.0, 0.0};
  return plan;
}

std::string AugmentationParams::order_text() const {
  std::string text;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i > 0) text += '|';
    text += to_string(order[i]);
  }
  return text;
}

std::string AugmentationParams::params_text() const {
  std::ostringstream out;
  bool first = true;
  const auto put = [&](const char* key, double value) {
    if (!first) out << ';';
    first = false;
    out << key << '=' << format_double(value);
  };
  for (auto step : order) {
    switch (step) {
      case AugmentStep::crop:
        put("crop_w", crop_w);
        put("crop_h", crop_h);
        put("crop_x", crop_x);
        put("crop_y", crop_y);
        break;
      case AugmentStep::blur: put("blur_sigma", blur_sigma); break;
      case AugmentStep::noise: put("noise_sigma", noise_sigma); break;
      case AugmentStep::affine:
        put("rotation_deg", rotation_deg);
        put("shear_deg", shear_deg);
        put("translate_x", translate_x);
        put("translate_y", translate_y);
        put("scale", scale);
        break;
      case AugmentStep::contrast: put("contrast", contrast); break;
      case AugmentStep::brightness: put("brightness", brightness); break;
    }
  }
  return out.str();
}

AugmentationParams sample_parameters(const AugmentationPlan& plan, Rng& rng) {
  AugmentationParams p;
  p.order = plan.steps;
  rng.shuffle(std::span<AugmentStep>(p.order));
  // Draw every parameter in a fixed order regardless of the step order.
  for (auto step : plan.steps) {
    switch (step) {
      case AugmentStep::crop:
        p.crop_w = draw(rng, plan.crop_fraction);
        p.crop_h = draw(rng, plan.crop_fraction);
        p.crop_x = rng.uniform();
        p.crop_y = rng.uniform();
        break;
      case AugmentStep::blur: p.blur_sigma = draw(rng, plan.blur_sigma); break;
      case AugmentStep::noise: p.noise_sigma = draw(rng, plan.noise_sigma); break;
      case AugmentStep::affine:
        p.rotation_deg = draw(rng, plan.rotation_deg);
        p.shear_deg = draw(rng, plan.shear_deg);
        p.translate_x = draw(rng, plan.translation);
        p.translate_y = draw(rng, plan.translation);
        p.scale = draw(rng, plan.scale);
        break;
      case AugmentStep::contrast: p.contrast = draw(rng, plan.contrast); break;
      case AugmentStep::brightness: p.brightness = draw(rng, plan.brightness); break;
    }
  }
  return p;
}

RasterImage apply_augmentation(const RasterImage& image, const AugmentationParams& params, Rng& rng) {
  RasterImage current = image;
  for (auto step : params.order) {
    switch (step) {
      case AugmentStep::crop: current = crop(current, params); break;
      case AugmentStep::blur: current = blur(current, params.blur_sigma); break;
      case AugmentStep::noise: current = noise(current, params.noise_sigma, rng); break;
      case AugmentStep::affine: current = affine(current, params); break;
      case AugmentStep::contrast: current = contrast(current, params.contrast); break;
      case AugmentStep::brightness: current = brightness(current, params.brightness); break;
    }
  }
  for (double& v : current.data) v = std::clamp(v, 0.0, 1.0);
  return current;
}

std::map<std::string, std::string> AugmentationManifest::group_map() const {
  std::map<std::string, std::string> out;
  for (const auto& row : rows) out.emplace(row.sample_id, row.group_id);
  return out;
}

void AugmentationManifest::save(const std::filesystem::path& path) const {
  auto out = csv::open_output(path);
  out << "sample_id,group_id,step_order,params\n";
  for (const auto& row : rows) {
    out << row.sample_id << ',' << row.group_id << ',' << row.step_order << ',' << row.params << '\n';
  }
  if (!out) throw Error(ErrorKind::Io, "failed writing " + path.string());
}

AugmentationManifest AugmentationManifest::load(const std::filesystem::path& path) {
  const auto table = csv::read(path);
  if (table.header.size() != 4 || table.header[0] != "sample_id" || table.header[1] != "group_id") {
    throw Error(ErrorKind::MalformedCsv, path.string() + ": expected header sample_id,group_id,step_order,params");
  }
  AugmentationManifest manifest;
  for (const auto& cells : table.rows) manifest.rows.push_back({cells[0], cells[1], cells[2], cells[3]});
  return manifest;
}

AugmentationManifest augment_dataset(const std::filesystem::path& images, const AugmentationPlan& plan,
                                     const std::filesystem::path& out) {
  plan.validate();
  const auto files = list_images(images);
  if (files.empty()) throw Error(ErrorKind::EmptyInput, "no PNG/JPEG images in " + images.string());
  std::error_code ec;
  std::filesystem::create_directories(out, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create " + out.string() + ": " + ec.message());

  const std::size_t width = std::to_string(plan.per_image - 1).size();
  AugmentationManifest manifest;
  manifest.rows.resize(files.size() * plan.per_image);
  for (std::size_t f = 0; f < files.size(); ++f) {
    const RasterImage original = load_image(files[f]);
    const std::string stem = files[f].stem().string();
    parallel_for(plan.per_image, [&](std::size_t j) {
      auto rng = Rng::stream(plan.seed, stem, j);
      const AugmentationParams params = sample_parameters(plan, rng);
      const RasterImage augmented = apply_augmentation(original, params, rng);
      std::string index = std::to_string(j);
      index.insert(0, width - index.size(), '0');
      const std::string sample_id = stem + "_" + index;
      save_png(augmented, out / (sample_id + ".png"));
      manifest.rows[f * plan.per_image + j] = {sample_id, stem, params.order_text(), params.params_text()};
    });
  }
  manifest.save(out / "manifest.csv");
  return manifest;
}

}  // namespace simspace
