#pragma once

#include <string>

namespace clutter::csv {

// Shortest-round-trip-safe text for a double: 17 significant digits,
// locale independent ("%.17g" semantics).
std::string number(double value);

}  // namespace clutter::csv
