#include "netbend/format.hpp"

#include <charconv>
#include <cmath>
#include <system_error>

namespace netbend {

std::string format_float(float v) {
  // "-0" would read back as the integer 0.
  if (v == 0.0f && std::signbit(v)) return "-0.0";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, end);
}

double float_as_decimal(float v) {
  const std::string text = format_float(v);
  double d = 0.0;
  std::from_chars(text.data(), text.data() + text.size(), d);
  return d;
}

}  // namespace netbend
