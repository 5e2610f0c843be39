#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "condmon/stream.hpp"

namespace condmon::bag {

struct ReadOptions {
  // When false, a damaged index throws CorruptIndex and a partial chunk
  // throws TruncatedChunk instead of falling back to a recovery scan.
  bool allow_recovery = true;
};

struct BagContents {
  Timestamp creation;
  std::vector<StreamDescriptor> streams;     // id order
  std::vector<StampedMessage> file_order;    // as written
  std::map<std::string, std::uint64_t> index_counts;  // from the index, when valid
  bool index_valid = false;
  bool recovered = false;  // contents came from a recovery scan
  std::uint64_t file_size = 0;
};

// Loads a bag. Throws BadMagic, IoError, and (strict mode) CorruptIndex /
// TruncatedChunk.
BagContents load(const std::string& path, ReadOptions opts = {});

// Messages in global stamp order, ties broken by stream id then seq.
std::vector<StampedMessage> read(const std::string& path, ReadOptions opts = {});
std::vector<StampedMessage> sorted_messages(std::vector<StampedMessage> msgs);

struct StreamSummary {
  StreamDescriptor desc;
  std::uint64_t count = 0;
  double rate_hz = 0;  // (count - 1) / stream duration, 0 below two messages
  std::optional<Timestamp> first, last;
};

struct BagSummary {
  Timestamp creation;
  std::optional<Timestamp> first, last;
  std::int64_t duration_ns = 0;
  std::uint64_t total = 0;
  std::uint64_t size_bytes = 0;
  bool recovered = false;
  std::vector<StreamSummary> streams;
};

BagSummary bag_info(const std::string& path);

}  // namespace condmon::bag
