#include "netbend/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

#include <zlib.h>

namespace netbend {

ImageBuffer to_image(const Tensor& x) {
  if (x.rank() != 4 || x.extent(0) != 1 || x.extent(1) != 3) {
    throw ShapeError("to_image expects [1,3,H,W], got " + shape_to_string(x.shape()));
  }
  const std::size_t H = x.extent(2), W = x.extent(3), P = H * W;
  ImageBuffer img{W, H, std::vector<std::uint8_t>(P * 3)};
  auto data = x.data();
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t p = 0; p < P; ++p) {
      float v = (data[c * P + p] + 1.0f) * 0.5f;
      v = std::isnan(v) ? 0.0f : std::clamp(v, 0.0f, 1.0f);
      img.rgb[p * 3 + c] = static_cast<std::uint8_t>(std::round(v * 255.0f));
    }
  }
  return img;
}

std::string_view format_name(ImageFormat format) noexcept { return format == ImageFormat::kPng ? "png" : "ppm"; }

std::optional<ImageFormat> parse_format(std::string_view name) noexcept {
  if (name == "ppm") return ImageFormat::kPpm;
  if (name == "png") return ImageFormat::kPng;
  return std::nullopt;
}

std::string_view content_type(ImageFormat format) noexcept {
  return format == ImageFormat::kPng ? "image/png" : "image/x-portable-pixmap";
}

std::string encode_ppm(const ImageBuffer& image) {
  std::string out = "P6\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(image.rgb.data()), image.rgb.size());
  return out;
}

namespace {

void put_be32(std::string& out, std::uint32_t v) {
  out += static_cast<char>((v >> 24) & 0xFF);
  out += static_cast<char>((v >> 16) & 0xFF);
  out += static_cast<char>((v >> 8) & 0xFF);
  out += static_cast<char>(v & 0xFF);
}

void put_chunk(std::string& out, const char type[4], const std::string& payload) {
  put_be32(out, static_cast<std::uint32_t>(payload.size()));
  const std::size_t start = out.size();
  out.append(type, 4);
  out += payload;
  const auto* p = reinterpret_cast<const Bytef*>(out.data() + start);
  put_be32(out, static_cast<std::uint32_t>(crc32(0L, p, static_cast<uInt>(out.size() - start))));
}

}  // namespace

std::string encode_png(const ImageBuffer& image) {
  const std::size_t stride = image.width * 3;
  std::string raw;
  raw.reserve((stride + 1) * image.height);
  for (std::size_t y = 0; y < image.height; ++y) {
    raw += '\0';
    raw.append(reinterpret_cast<const char*>(image.rgb.data() + y * stride), stride);
  }
  uLongf zsize = compressBound(static_cast<uLong>(raw.size()));
  std::string z(zsize, '\0');
  if (compress2(reinterpret_cast<Bytef*>(z.data()), &zsize, reinterpret_cast<const Bytef*>(raw.data()),
                static_cast<uLong>(raw.size()), 6) != Z_OK) {
    throw std::runtime_error("png: deflate failed");
  }
  z.resize(zsize);

  std::string ihdr;
  put_be32(ihdr, static_cast<std::uint32_t>(image.width));
  put_be32(ihdr, static_cast<std::uint32_t>(image.height));
  ihdr += '\x08';  // bit depth
  ihdr += '\x02';  // colour type RGB
  ihdr += std::string(3, '\0');

  std::string out = "\x89PNG\r\n\x1a\n";
  put_chunk(out, "IHDR", ihdr);
  put_chunk(out, "IDAT", z);
  put_chunk(out, "IEND", "");
  return out;
}

std::string encode(const ImageBuffer& image, ImageFormat format) {
  return format == ImageFormat::kPng ? encode_png(image) : encode_ppm(image);
}

ImageBuffer decode_ppm(std::string_view bytes) {
  std::size_t pos = 0;
  auto token = [&]() {
    while (pos < bytes.size() && std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
    const std::size_t start = pos;
    while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
    return std::string(bytes.substr(start, pos - start));
  };
  if (token() != "P6") throw std::invalid_argument("ppm: missing P6 magic");
  ImageBuffer img;
  try {
    img.width = std::stoul(token());
    img.height = std::stoul(token());
    if (token() != "255") throw std::invalid_argument("ppm: maxval must be 255");
  } catch (const std::logic_error&) {
    throw std::invalid_argument("ppm: malformed header");
  }
  ++pos;  // single whitespace before the raster
  const std::size_t n = img.width * img.height * 3;
  if (pos + n != bytes.size()) throw std::invalid_argument("ppm: raster size mismatch");
  img.rgb.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos), bytes.end());
  return img;
}

ImageBuffer hconcat(const std::vector<ImageBuffer>& cells) {
  if (cells.empty()) throw std::invalid_argument("hconcat: no cells");
  const std::size_t w = cells.front().width, h = cells.front().height;
  for (const auto& c : cells) {
    if (c.width != w || c.height != h) throw std::invalid_argument("hconcat: cells differ in size");
  }
  ImageBuffer out{w * cells.size(), h, std::vector<std::uint8_t>(w * cells.size() * h * 3)};
  for (std::size_t i = 0; i < cells.size(); ++i) {
    for (std::size_t y = 0; y < h; ++y) {
      std::copy_n(cells[i].rgb.begin() + static_cast<std::ptrdiff_t>(y * w * 3), w * 3,
                  out.rgb.begin() + static_cast<std::ptrdiff_t>((y * out.width + i * w) * 3));
    }
  }
  return out;
}

}  // namespace netbend
