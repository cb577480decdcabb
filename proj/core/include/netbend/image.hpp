#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "netbend/tensor.hpp"

namespace netbend {

/// 8-bit RGB raster, row-major, channels interleaved.
struct ImageBuffer {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> rgb;

  friend bool operator==(const ImageBuffer&, const ImageBuffer&) = default;
};

/// [1,3,R,C] tensor to bytes: v = clamp((x + 1) / 2, 0, 1), byte =
/// round(255 v) with halves rounded away from zero. NaN maps to 0.
ImageBuffer to_image(const Tensor& x);

enum class ImageFormat { kPpm, kPng };

std::string_view format_name(ImageFormat format) noexcept;
std::optional<ImageFormat> parse_format(std::string_view name) noexcept;
std::string_view content_type(ImageFormat format) noexcept;

/// Binary PPM (P6, maxval 255).
std::string encode_ppm(const ImageBuffer& image);
/// 8-bit RGB PNG, filter type 0, zlib level 6.
std::string encode_png(const ImageBuffer& image);
std::string encode(const ImageBuffer& image, ImageFormat format);

/// Parses a P6 file as written by encode_ppm. Throws std::invalid_argument.
ImageBuffer decode_ppm(std::string_view bytes);

/// Places equally sized images left to right.
ImageBuffer hconcat(const std::vector<ImageBuffer>& cells);

}  // namespace netbend
