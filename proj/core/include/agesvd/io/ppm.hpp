#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "agesvd/matrix.hpp"

namespace agesvd::io {

struct RgbImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;  // row-major, interleaved RGB

  [[nodiscard]] Matrix channel(std::size_t c) const;
  void set_channel(std::size_t c, const Matrix& values);
  friend bool operator==(const RgbImage&, const RgbImage&) = default;
};

enum class PpmEncoding { ascii, binary };

[[nodiscard]] RgbImage read_ppm(std::istream& in);
[[nodiscard]] RgbImage load_ppm(const std::filesystem::path& path);
void write_ppm(std::ostream& out, const RgbImage& image, PpmEncoding encoding = PpmEncoding::binary);
void save_ppm(const std::filesystem::path& path, const RgbImage& image, PpmEncoding encoding = PpmEncoding::binary);

// Per-channel rank-k truncation; k beyond a channel's rank keeps the channel exact.
[[nodiscard]] RgbImage rank_approx(const RgbImage& image, std::size_t k);

// Frobenius norm of the byte difference for one channel.
[[nodiscard]] double channel_error(const RgbImage& a, const RgbImage& b, std::size_t c);

void image_rank_approx(const std::filesystem::path& in, const std::filesystem::path& out, std::size_t k);

}  // namespace agesvd::io
