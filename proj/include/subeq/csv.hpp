#pragma once

#include <string>

namespace subeq {

/// Shortest decimal text that reads back to the same double; locale independent.
std::string format_double(double value);

}  // namespace subeq
