#ifndef FLOWRL_TEXTIO_HPP_
#define FLOWRL_TEXTIO_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace flowrl {

// 17 significant digits: parses back to the same double.
std::string format_exact(double value);
// Shortest text that parses back to the same double.
std::string format_short(double value);
// Fixed notation with `digits` fractional digits.
std::string format_fixed(double value, int digits);

std::vector<std::string> split(std::string_view text, char sep);
std::string_view trim(std::string_view text);

bool parse_int(std::string_view text, std::int64_t* out);
bool parse_double(std::string_view text, double* out);

}  // namespace flowrl

#endif  // FLOWRL_TEXTIO_HPP_
