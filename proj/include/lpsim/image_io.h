#ifndef LPSIM_IMAGE_IO_H_
#define LPSIM_IMAGE_IO_H_

#include <cstdint>
#include <filesystem>
#include <vector>

#include "lpsim/image.h"

namespace lpsim {

// Decodes PNG (8/16-bit, gray/RGB, alpha dropped, palettes expanded) or
// binary PGM/PPM (P5/P6, any maxval up to 65535), chosen by file signature.
// Samples are divided by the maximum code value.
Image read_image(const std::filesystem::path& path);

// Reads any supported image and thresholds it at 0.5 (see
// BinaryMask::FromImage).
BinaryMask read_mask(const std::filesystem::path& path);

// Encoders quantize clamp(v, 0, 1) * maxcode with round-half-up. Output is
// byte-stable for identical input. Files are written to a sibling temporary
// and renamed into place.
std::vector<std::uint8_t> encode_png(const Image& image, int bit_depth);
void write_png(const std::filesystem::path& path, const Image& image,
               int bit_depth = 8);
// P5 for one channel, P6 for three.
void write_pnm(const std::filesystem::path& path, const Image& image,
               int bit_depth = 16);

// Writes bytes atomically (temporary file in the same directory + rename).
void write_file_atomic(const std::filesystem::path& path,
                       const void* data, std::size_t size);

// Quantized code value for `v` at the given depth.
std::uint16_t quantize(double v, int bit_depth);

}  // namespace lpsim

#endif  // LPSIM_IMAGE_IO_H_
