#pragma once

#include <string>

namespace netbend {

/// Shortest decimal text that parses back to exactly `v`.
std::string format_float(float v);

/// The double nearest to the shortest decimal form of `v`, so JSON writers
/// print 0.2f as 0.2 instead of 0.20000000298023224.
double float_as_decimal(float v);

}  // namespace netbend
