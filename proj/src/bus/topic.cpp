#include "condmon/bus/topic.hpp"

#include "condmon/stream.hpp"

namespace condmon::bus {

namespace {

// Splits off the next segment; returns false at end of input.
bool next_segment(std::string_view& rest, std::string_view& seg) {
  if (rest.empty()) return false;
  auto slash = rest.find('/');
  if (slash == std::string_view::npos) {
    seg = rest;
    rest = {};
  } else {
    seg = rest.substr(0, slash);
    rest = rest.substr(slash + 1);
  }
  return true;
}

}  // namespace

bool is_valid_pattern(std::string_view pattern) {
  if (!is_valid_topic(pattern)) return false;
  std::string_view rest = pattern, seg;
  while (next_segment(rest, seg)) {
    if (seg == "**" && !rest.empty()) return false;
    if (seg != "*" && seg != "**" && seg.find('*') != std::string_view::npos) return false;
  }
  return true;
}

bool match_topic(std::string_view pattern, std::string_view topic) {
  std::string_view prest = pattern, trest = topic, pseg, tseg;
  while (next_segment(prest, pseg)) {
    if (pseg == "**") return true;
    if (!next_segment(trest, tseg)) return false;
    if (pseg != "*" && pseg != tseg) return false;
  }
  return trest.empty();
}

}  // namespace condmon::bus
