#pragma once

#include <boost/rational.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace matchlab {

/// Exact rational number. All utilities, beliefs and expected utilities are
/// held as rationals so that equality and strict comparison are never subject
/// to floating-point noise.
using Rat = boost::rational<std::int64_t>;

/// Parses "p", "-p" or "p/q" (q > 0 after normalization). Throws
/// std::invalid_argument on anything else.
Rat parse_rational(std::string_view text);

/// Renders as "p" when the denominator is 1, otherwise "p/q".
std::string format_rational(const Rat& value);

}  // namespace matchlab
