#ifndef LPSIM_DIGEST_H_
#define LPSIM_DIGEST_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include "lpsim/image.h"

namespace lpsim {

// Lowercase hex SHA-256.
std::string sha256_hex(std::span<const std::uint8_t> bytes);
std::string sha256_hex(std::string_view text);
std::string sha256_file(const std::filesystem::path& path);

// Digest of an image's shape and little-endian IEEE-754 samples. Two images
// share a digest iff they are bitwise identical.
std::string image_digest(const Image& image);

}  // namespace lpsim

#endif  // LPSIM_DIGEST_H_
