#pragma once

#include <string_view>

namespace condmon::bus {

// Pattern grammar: '/'-separated segments; "*" matches exactly one segment,
// a trailing "**" matches any (possibly empty) remaining suffix.
bool is_valid_pattern(std::string_view pattern);

// Segment-wise glob match. Both arguments are expected to be well-formed;
// malformed input simply does not match.
bool match_topic(std::string_view pattern, std::string_view topic);

}  // namespace condmon::bus
