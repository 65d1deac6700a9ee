#include "lpsim/image_io.h"

#include <png.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "lpsim/error.h"

namespace lpsim {
namespace fs = std::filesystem;
namespace {

std::vector<std::uint8_t> read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string(), "cannot open file");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Image from_interleaved(const std::vector<std::uint8_t>& bytes,
                       std::size_t offset, int width, int height,
                       int channels, int bytes_per_sample, double max_code,
                       const fs::path& path) {
  const std::size_t needed = static_cast<std::size_t>(width) * height *
                             channels * bytes_per_sample;
  if (bytes.size() < offset + needed) {
    throw IoError(path.string(), "truncated pixel data");
  }
  Image image(width, height, channels);
  const std::uint8_t* p = bytes.data() + offset;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      for (int c = 0; c < channels; ++c) {
        unsigned code = *p++;
        if (bytes_per_sample == 2) code = (code << 8) | *p++;
        image.at(x, y, c) = code / max_code;
      }
    }
  }
  return image;
}

struct MemoryReader {
  const std::vector<std::uint8_t>* bytes;
  std::size_t pos;
};

void png_read_from_memory(png_structp png, png_bytep out, png_size_t n) {
  auto* reader = static_cast<MemoryReader*>(png_get_io_ptr(png));
  if (reader->pos + n > reader->bytes->size()) {
    png_error(png, "unexpected end of data");
  }
  std::memcpy(out, reader->bytes->data() + reader->pos, n);
  reader->pos += n;
}

void png_write_to_vector(png_structp png, png_bytep data, png_size_t n) {
  auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + n);
}

void png_flush_noop(png_structp) {}

Image decode_png(const std::vector<std::uint8_t>& bytes, const fs::path& path) {
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError(path.string(), "libpng initialization failed");
  png_infop info = png_create_info_struct(png);
  MemoryReader reader{&bytes, 0};
  // Everything touched after setjmp lives outside its scope.
  std::vector<std::uint8_t> pixels;
  std::vector<png_bytep> rows;
  png_uint_32 width = 0, height = 0;
  int channels = 0, depth = 0;

  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError(path.string(), "corrupt or unsupported PNG");
  }
  png_set_read_fn(png, &reader, png_read_from_memory);
  png_read_info(png, info);
  const int color_type = png_get_color_type(png, info);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8) {
    png_set_expand_gray_1_2_4_to_8(png);
  }
  if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  png_read_update_info(png, info);

  width = png_get_image_width(png, info);
  height = png_get_image_height(png, info);
  channels = png_get_channels(png, info);
  depth = png_get_bit_depth(png, info);
  const std::size_t row_bytes = png_get_rowbytes(png, info);
  pixels.resize(row_bytes * height);
  rows.resize(height);
  for (png_uint_32 y = 0; y < height; ++y) rows[y] = pixels.data() + y * row_bytes;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  if (channels != 1 && channels != 3) {
    throw IoError(path.string(), "unsupported channel count " +
                                     std::to_string(channels));
  }
  const int bps = depth == 16 ? 2 : 1;
  return from_interleaved(pixels, 0, static_cast<int>(width),
                          static_cast<int>(height), channels, bps,
                          depth == 16 ? 65535.0 : 255.0, path);
}

// Parses the next whitespace-delimited header token, skipping '#' comments.
long long pnm_token(const std::vector<std::uint8_t>& bytes, std::size_t& pos,
                    const fs::path& path) {
  while (pos < bytes.size()) {
    if (bytes[pos] == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
    } else if (std::isspace(bytes[pos])) {
      ++pos;
    } else {
      break;
    }
  }
  long long value = 0;
  std::size_t digits = 0;
  while (pos < bytes.size() && std::isdigit(bytes[pos])) {
    value = value * 10 + (bytes[pos++] - '0');
    if (++digits > 9) throw IoError(path.string(), "PNM header value too large");
  }
  if (digits == 0) throw IoError(path.string(), "malformed PNM header");
  return value;
}

Image decode_pnm(const std::vector<std::uint8_t>& bytes, const fs::path& path) {
  const int channels = bytes[1] == '5' ? 1 : 3;
  std::size_t pos = 2;
  const long long width = pnm_token(bytes, pos, path);
  const long long height = pnm_token(bytes, pos, path);
  const long long maxval = pnm_token(bytes, pos, path);
  if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 65535) {
    throw IoError(path.string(), "invalid PNM header values");
  }
  ++pos;  // single whitespace before the raster
  return from_interleaved(bytes, pos, static_cast<int>(width),
                          static_cast<int>(height), channels,
                          maxval > 255 ? 2 : 1, static_cast<double>(maxval),
                          path);
}

}  // namespace

std::uint16_t quantize(double v, int bit_depth) {
  const double max_code = bit_depth == 16 ? 65535.0 : 255.0;
  const double clamped = std::clamp(v, 0.0, 1.0);
  return static_cast<std::uint16_t>(std::floor(clamped * max_code + 0.5));
}

Image read_image(const fs::path& path) {
  const auto bytes = read_bytes(path);
  static constexpr std::uint8_t kPngSig[8] = {0x89, 'P', 'N', 'G',
                                              '\r', '\n', 0x1a, '\n'};
  if (bytes.size() >= 8 && std::equal(kPngSig, kPngSig + 8, bytes.begin())) {
    return decode_png(bytes, path);
  }
  if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '5' || bytes[1] == '6')) {
    return decode_pnm(bytes, path);
  }
  throw IoError(path.string(), "unrecognized image format");
}

BinaryMask read_mask(const fs::path& path) {
  return BinaryMask::FromImage(read_image(path), 0.5);
}

std::vector<std::uint8_t> encode_png(const Image& image, int bit_depth) {
  if (bit_depth != 8 && bit_depth != 16) {
    throw ParameterError("bit_depth", "must be 8 or 16");
  }
  if (image.empty()) throw ParameterError("image", "cannot encode an empty image");
  const int channels = image.channels();
  const int bps = bit_depth / 8;
  const std::size_t row_bytes =
      static_cast<std::size_t>(image.width()) * channels * bps;
  std::vector<std::uint8_t> raster(row_bytes * image.height());
  std::uint8_t* p = raster.data();
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      for (int c = 0; c < channels; ++c) {
        const std::uint16_t code = quantize(image.at(x, y, c), bit_depth);
        if (bps == 2) *p++ = static_cast<std::uint8_t>(code >> 8);
        *p++ = static_cast<std::uint8_t>(code & 0xff);
      }
    }
  }
  std::vector<png_bytep> rows(image.height());
  for (int y = 0; y < image.height(); ++y) rows[y] = raster.data() + y * row_bytes;

  std::vector<std::uint8_t> out;
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw Error("png", "libpng initialization failed");
  png_infop info = png_create_info_struct(png);
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error("png", "PNG encoding failed");
  }
  png_set_write_fn(png, &out, png_write_to_vector, png_flush_noop);
  png_set_IHDR(png, info, image.width(), image.height(), bit_depth,
               channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_set_compression_level(png, 6);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

void write_png(const fs::path& path, const Image& image, int bit_depth) {
  const auto bytes = encode_png(image, bit_depth);
  write_file_atomic(path, bytes.data(), bytes.size());
}

void write_pnm(const fs::path& path, const Image& image, int bit_depth) {
  if (bit_depth != 8 && bit_depth != 16) {
    throw ParameterError("bit_depth", "must be 8 or 16");
  }
  const int channels = image.channels();
  const std::string header = std::string(channels == 1 ? "P5" : "P6") + "\n" +
                             std::to_string(image.width()) + " " +
                             std::to_string(image.height()) + "\n" +
                             (bit_depth == 16 ? "65535" : "255") + "\n";
  std::vector<std::uint8_t> bytes(header.begin(), header.end());
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      for (int c = 0; c < channels; ++c) {
        const std::uint16_t code = quantize(image.at(x, y, c), bit_depth);
        if (bit_depth == 16) bytes.push_back(static_cast<std::uint8_t>(code >> 8));
        bytes.push_back(static_cast<std::uint8_t>(code & 0xff));
      }
    }
  }
  write_file_atomic(path, bytes.data(), bytes.size());
}

void write_file_atomic(const fs::path& path, const void* data,
                       std::size_t size) {
  static std::atomic<unsigned long long> counter{0};
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid()) + "." +
         std::to_string(counter.fetch_add(1));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(tmp.string(), "cannot open for writing");
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
    if (!out) throw IoError(tmp.string(), "write failed");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError(path.string(), "rename failed");
  }
}

}  // namespace lpsim
