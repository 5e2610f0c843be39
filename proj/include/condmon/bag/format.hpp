#pragma once

#include <cstdint>
#include <string_view>

#include "condmon/bytes.hpp"

// On-disk layout of a .cmbag file (all integers little-endian):
//
//   header   "CMBAG1\n" | creation stamp (u64 s, u32 ns) | u32 stream count |
//            stream count x (u32 len | ADVERTISE body)
//   chunk*   "CHNK" | first stamp | last stamp | u32 message count |
//            u8 compressed | u32 body length | u32 body crc32 | body
//            body = record* with record = u8 type | u32 len | bytes
//              type 1: stream definition (ADVERTISE body)
//              type 2: message (PUBLISH body, verbatim)
//   index    "CMIX" | u32 stream count | per stream: u32 len | ADVERTISE body |
//            u64 message count | u32 entry count | entry* (u64 chunk offset,
//            u32 count) | u64 total messages | u32 crc32 of the index so far
//   trailer  "CMBAGEND" | u64 index offset
//
// The index and trailer are only present after a clean close; without them
// the chunk sequence is scanned and stops at the first incomplete chunk.
namespace condmon::bag {

inline constexpr std::string_view kFileMagic = "CMBAG1\n";
inline constexpr std::string_view kChunkMagic = "CHNK";
inline constexpr std::string_view kIndexMagic = "CMIX";
inline constexpr std::string_view kTrailerMagic = "CMBAGEND";
inline constexpr std::size_t kChunkHeaderSize = 4 + 12 + 12 + 4 + 1 + 4 + 4;
inline constexpr std::size_t kTrailerSize = 8 + 8;

enum class RecordType : std::uint8_t { StreamDef = 1, Message = 2 };

std::uint32_t crc32(ByteView data);

}  // namespace condmon::bag
