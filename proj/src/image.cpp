#include "simspace/image.hpp"

#include "simspace/error.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <fstream>
#include <memory>
#include <string>

// jpeglib.h needs FILE and size_t declared beforehand.
#include <jpeglib.h>

namespace simspace {

RasterImage::RasterImage(std::size_t w, std::size_t h, std::size_t c, double fill)
    : width(w), height(h), channels(c), data(w * h * c, fill) {}

void RasterImage::validate() const {
  if (width == 0 || height == 0) throw Error(ErrorKind::InvalidArgument, "image dimensions must be positive");
  if (channels != 1 && channels != 3) throw Error(ErrorKind::InvalidArgument, "images must have 1 or 3 channels");
  if (data.size() != width * height * channels) throw Error(ErrorKind::InvalidArgument, "image buffer size mismatch");
  for (double v : data) {
    if (!(v >= 0.0 && v <= 1.0)) throw Error(ErrorKind::InvalidArgument, "image values must lie in [0, 1]");
  }
}

namespace {

RasterImage from_bytes(std::size_t w, std::size_t h, std::size_t c, const std::vector<unsigned char>& bytes) {
  RasterImage image(w, h, c);
  for (std::size_t i = 0; i < bytes.size(); ++i) image.data[i] = bytes[i] / 255.0;
  return image;
}

RasterImage load_png(const std::filesystem::path& path) {
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  if (png_image_begin_read_from_file(&png, path.c_str()) == 0) {
    const std::string message = png.message;
    png_image_free(&png);
    throw Error(ErrorKind::Decode, path.string() + ": " + message);
  }
  const bool color = (png.format & PNG_FORMAT_FLAG_COLOR) != 0;
  const bool alpha = (png.format & PNG_FORMAT_FLAG_ALPHA) != 0;
  png.format = (color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY) | (alpha ? PNG_FORMAT_FLAG_ALPHA : 0);
  const std::size_t stored = (color ? 3 : 1) + (alpha ? 1 : 0);
  std::vector<unsigned char> buffer(PNG_IMAGE_SIZE(png));
  if (png_image_finish_read(&png, nullptr, buffer.data(), 0, nullptr) == 0) {
    const std::string message = png.message;
    png_image_free(&png);
    throw Error(ErrorKind::Decode, path.string() + ": " + message);
  }
  const std::size_t w = png.width;
  const std::size_t h = png.height;
  const std::size_t c = color ? 3 : 1;
  std::vector<unsigned char> pixels(w * h * c);
  for (std::size_t p = 0; p < w * h; ++p)
    for (std::size_t ch = 0; ch < c; ++ch) pixels[p * c + ch] = buffer[p * stored + ch];
  return from_bytes(w, h, c, pixels);
}

struct JpegErrorManager {
  jpeg_error_mgr base;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void jpeg_fail(j_common_ptr info) {
  auto* manager = reinterpret_cast<JpegErrorManager*>(info->err);
  (*info->err->format_message)(info, manager->message);
  std::longjmp(manager->jump, 1);
}

void jpeg_quiet(j_common_ptr info, int level) {
  // Count warnings (level -1) so truncated streams can be rejected.
  if (level < 0) ++info->err->num_warnings;
}

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};

// Decodes into `bytes`; returns an empty string on success, the error
// otherwise. Kept free of non-trivial locals because of setjmp.
std::string decode_jpeg(std::FILE* file, std::vector<unsigned char>& bytes, std::size_t& w, std::size_t& h,
                        std::size_t& c) {
  jpeg_decompress_struct info{};
  JpegErrorManager errors{};
  info.err = jpeg_std_error(&errors.base);
  errors.base.error_exit = jpeg_fail;
  errors.base.emit_message = jpeg_quiet;
  if (setjmp(errors.jump) != 0) {
    jpeg_destroy_decompress(&info);
    return errors.message;
  }
  jpeg_create_decompress(&info);
  jpeg_stdio_src(&info, file);
  jpeg_read_header(&info, TRUE);
  info.out_color_space = info.num_components == 1 ? JCS_GRAYSCALE : JCS_RGB;
  jpeg_start_decompress(&info);
  w = info.output_width;
  h = info.output_height;
  c = static_cast<std::size_t>(info.output_components);
  bytes.resize(w * h * c);
  while (info.output_scanline < info.output_height) {
    JSAMPROW row = bytes.data() + static_cast<std::size_t>(info.output_scanline) * w * c;
    jpeg_read_scanlines(&info, &row, 1);
  }
  jpeg_finish_decompress(&info);
  const long warnings = errors.base.num_warnings;
  jpeg_destroy_decompress(&info);
  if (warnings > 0) return "corrupt or truncated JPEG data";
  return {};
}

RasterImage load_jpeg(const std::filesystem::path& path) {
  std::unique_ptr<std::FILE, FileCloser> file(std::fopen(path.c_str(), "rb"));
  if (!file) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::vector<unsigned char> bytes;
  std::size_t w = 0;
  std::size_t h = 0;
  std::size_t c = 0;
  const std::string failure = decode_jpeg(file.get(), bytes, w, h, c);
  if (!failure.empty()) throw Error(ErrorKind::Decode, path.string() + ": " + failure);
  return from_bytes(w, h, c, bytes);
}

}  // namespace

RasterImage load_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::array<unsigned char, 8> magic{};
  in.read(reinterpret_cast<char*>(magic.data()), magic.size());
  const auto got = static_cast<std::size_t>(in.gcount());
  in.close();

  static constexpr std::array<unsigned char, 8> kPng{0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};
  if (got == 8 && magic == kPng) return load_png(path);
  if (got >= 3 && magic[0] == 0xFF && magic[1] == 0xD8 && magic[2] == 0xFF) return load_jpeg(path);
  throw Error(ErrorKind::UnsupportedFormat, path.string() + " is neither PNG nor JPEG");
}

void save_png(const RasterImage& image, const std::filesystem::path& path) {
  image.validate();
  std::vector<unsigned char> bytes(image.data.size());
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    bytes[i] = static_cast<unsigned char>(std::lround(std::clamp(image.data[i], 0.0, 1.0) * 255.0));
  }
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(image.width);
  png.height = static_cast<png_uint_32>(image.height);
  png.format = image.channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  if (png_image_write_to_file(&png, path.c_str(), 0, bytes.data(), 0, nullptr) == 0) {
    const std::string message = png.message;
    png_image_free(&png);
    throw Error(ErrorKind::Io, "cannot write " + path.string() + ": " + message);
  }
}

std::vector<std::filesystem::path> list_images(const std::filesystem::path& directory) {
  std::error_code ec;
  if (!std::filesystem::is_directory(directory, ec)) {
    throw Error(ErrorKind::Io, directory.string() + " is not a directory");
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(directory)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char ch) { return std::tolower(ch); });
    if (ext == ".png" || ext == ".jpg" || ext == ".jpeg") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace simspace
