#include "condmon/bag/reader.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>

#include "condmon/bag/format.hpp"
#include "condmon/bus/frame.hpp"
#include "condmon/error.hpp"

namespace condmon::bag {

namespace {

struct ParsedChunk {
  std::size_t end = 0;  // offset just past the chunk
  std::vector<StreamDescriptor> defs;
  std::vector<StampedMessage> messages;
};

enum class ChunkStatus { Ok, Incomplete, Corrupt, NotAChunk };

std::optional<Timestamp> get_stamp(ByteReader& r) {
  auto s = r.u64();
  auto ns = r.u32();
  if (!s || !ns || *ns >= kNanosPerSecond) return std::nullopt;
  return Timestamp{*s, *ns};
}

ChunkStatus parse_chunk(ByteView file, std::size_t offset, ParsedChunk& out) {
  if (offset >= file.size()) return ChunkStatus::Incomplete;
  auto rest = file.subspan(offset);
  if (rest.size() < kChunkMagic.size()) return ChunkStatus::Incomplete;
  if (!std::equal(kChunkMagic.begin(), kChunkMagic.end(), rest.begin())) return ChunkStatus::NotAChunk;
  if (rest.size() < kChunkHeaderSize) return ChunkStatus::Incomplete;
  ByteReader r(rest.subspan(kChunkMagic.size()));
  auto first = get_stamp(r);
  auto last = get_stamp(r);
  auto count = r.u32();
  auto compressed = r.u8();
  auto body_len = r.u32();
  auto crc = r.u32();
  if (!first || !last || !count || !compressed || !body_len || !crc) return ChunkStatus::Corrupt;
  if (rest.size() - kChunkHeaderSize < *body_len) return ChunkStatus::Incomplete;
  auto body = rest.subspan(kChunkHeaderSize, *body_len);
  if (crc32(body) != *crc) return ChunkStatus::Corrupt;
  if (*compressed != 0) throw Error(Errc::IoError, "compressed chunks are not supported by this reader");

  ByteReader br(body);
  while (br.remaining() > 0) {
    auto type = br.u8();
    auto len = br.u32();
    auto bytes = len ? br.take(*len) : std::nullopt;
    if (!type || !bytes) return ChunkStatus::Corrupt;
    try {
      if (*type == static_cast<std::uint8_t>(RecordType::StreamDef)) {
        out.defs.push_back(bus::decode_advertise(*bytes));
      } else if (*type == static_cast<std::uint8_t>(RecordType::Message)) {
        out.messages.push_back(bus::decode_publish(*bytes));
      } else {
        return ChunkStatus::Corrupt;
      }
    } catch (const Error&) {
      return ChunkStatus::Corrupt;
    }
  }
  if (out.messages.size() != *count) return ChunkStatus::Corrupt;
  out.end = offset + kChunkHeaderSize + *body_len;
  return ChunkStatus::Ok;
}

Bytes slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open '" + path + "'");
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

struct IndexEntry {
  StreamDescriptor desc;
  std::uint64_t count = 0;
  std::vector<std::pair<std::uint64_t, std::uint32_t>> chunks;
};

// Parses and cross-checks the trailer index; nullopt when absent or damaged.
std::optional<std::vector<IndexEntry>> parse_index(ByteView file, std::size_t data_start,
                                                   std::size_t& index_offset) {
  if (file.size() < data_start + kTrailerSize) return std::nullopt;
  auto trailer = file.subspan(file.size() - kTrailerSize);
  if (!std::equal(kTrailerMagic.begin(), kTrailerMagic.end(), trailer.begin())) return std::nullopt;
  ByteReader tr(trailer.subspan(kTrailerMagic.size()));
  auto off = *tr.u64();
  if (off < data_start || off > file.size() - kTrailerSize) return std::nullopt;
  auto index = file.subspan(off, file.size() - kTrailerSize - off);
  if (index.size() < kIndexMagic.size() + 4 + 8 + 4) return std::nullopt;
  if (!std::equal(kIndexMagic.begin(), kIndexMagic.end(), index.begin())) return std::nullopt;
  ByteReader crc_r(index.subspan(index.size() - 4));
  if (crc32(index.first(index.size() - 4)) != *crc_r.u32()) return std::nullopt;

  ByteReader r(index.subspan(kIndexMagic.size(), index.size() - kIndexMagic.size() - 4));
  auto n = r.u32();
  if (!n) return std::nullopt;
  std::vector<IndexEntry> out;
  std::uint64_t sum = 0;
  try {
    for (std::uint32_t i = 0; i < *n; ++i) {
      IndexEntry e;
      auto len = r.u32();
      auto def = len ? r.take(*len) : std::nullopt;
      auto count = r.u64();
      auto entries = r.u32();
      if (!def || !count || !entries) return std::nullopt;
      e.desc = bus::decode_advertise(*def);
      e.count = *count;
      std::uint64_t chunk_sum = 0;
      for (std::uint32_t k = 0; k < *entries; ++k) {
        auto co = r.u64();
        auto cn = r.u32();
        if (!co || !cn) return std::nullopt;
        e.chunks.emplace_back(*co, *cn);
        chunk_sum += *cn;
      }
      if (chunk_sum != e.count) return std::nullopt;
      sum += e.count;
      out.push_back(std::move(e));
    }
  } catch (const Error&) {
    return std::nullopt;
  }
  auto total = r.u64();
  if (!total || *total != sum || r.remaining() != 0) return std::nullopt;
  index_offset = off;
  return out;
}

}  // namespace

BagContents load(const std::string& path, ReadOptions opts) {
  const Bytes file = slurp(path);
  const ByteView view(file);
  BagContents bag;
  bag.file_size = file.size();

  // A file shorter than the magic that matches it so far is an empty,
  // truncated recording.
  const auto magic_len = std::min(file.size(), kFileMagic.size());
  if (!std::equal(kFileMagic.begin(), kFileMagic.begin() + magic_len, file.begin()) || file.empty()) {
    throw Error(Errc::BadMagic, "'" + path + "' is not a condmon bag");
  }
  std::map<std::string, StreamDescriptor> streams;
  ByteReader hr(view.subspan(magic_len));
  std::size_t data_start = 0;
  bool header_ok = magic_len == kFileMagic.size();
  if (header_ok) {
    auto creation = get_stamp(hr);
    auto n = hr.u32();
    header_ok = creation && n;
    if (header_ok) {
      bag.creation = *creation;
      for (std::uint32_t i = 0; i < *n && header_ok; ++i) {
        auto len = hr.u32();
        auto def = len ? hr.take(*len) : std::nullopt;
        if (!def) {
          header_ok = false;
          break;
        }
        auto d = bus::decode_advertise(*def);
        streams[d.id] = d;
      }
    }
    data_start = magic_len + hr.position();
  }
  if (!header_ok) {
    if (!opts.allow_recovery) throw Error(Errc::TruncatedChunk, "header of '" + path + "' is incomplete");
    bag.recovered = true;
    return bag;
  }

  std::size_t index_offset = 0;
  auto index = parse_index(view, data_start, index_offset);
  if (!index && !opts.allow_recovery && file.size() >= data_start + kTrailerSize &&
      std::equal(kTrailerMagic.begin(), kTrailerMagic.end(), file.end() - kTrailerSize)) {
    throw Error(Errc::CorruptIndex, "index of '" + path + "' is damaged");
  }
  if (index) {
    // Read exactly the chunks the index names, in file order.
    std::vector<std::uint64_t> offsets;
    for (const auto& e : *index) {
      for (auto [off, cnt] : e.chunks) offsets.push_back(off);
    }
    std::sort(offsets.begin(), offsets.end());
    offsets.erase(std::unique(offsets.begin(), offsets.end()), offsets.end());
    std::map<std::string, std::uint64_t> seen;
    bool ok = true;
    std::vector<StampedMessage> msgs;
    for (auto off : offsets) {
      ParsedChunk c;
      if (off >= index_offset || parse_chunk(view, off, c) != ChunkStatus::Ok) {
        ok = false;
        break;
      }
      for (auto& d : c.defs) streams[d.id] = d;
      for (auto& m : c.messages) {
        ++seen[m.stream];
        msgs.push_back(std::move(m));
      }
    }
    for (const auto& e : *index) {
      auto it = seen.find(e.desc.id);
      if ((it == seen.end() ? 0 : it->second) != e.count) ok = false;
    }
    if (ok) {
      for (const auto& e : *index) {
        streams[e.desc.id] = e.desc;
        bag.index_counts[e.desc.id] = e.count;
      }
      bag.index_valid = true;
      bag.file_order = std::move(msgs);
      for (auto& [id, d] : streams) bag.streams.push_back(d);
      return bag;
    }
    if (!opts.allow_recovery) throw Error(Errc::CorruptIndex, "index of '" + path + "' is inconsistent");
  }

  // Recovery scan: whole chunks from the start, stopping at the first that
  // is incomplete or damaged.
  bag.recovered = true;
  std::size_t off = data_start;
  while (off < file.size()) {
    ParsedChunk c;
    auto st = parse_chunk(view, off, c);
    if (st == ChunkStatus::NotAChunk) break;  // index section or garbage
    if (st != ChunkStatus::Ok) {
      if (!opts.allow_recovery) throw Error(Errc::TruncatedChunk, "chunk at offset " + std::to_string(off));
      break;
    }
    for (auto& d : c.defs) streams[d.id] = d;
    for (auto& m : c.messages) bag.file_order.push_back(std::move(m));
    off = c.end;
  }
  for (auto& [id, d] : streams) bag.streams.push_back(d);
  return bag;
}

std::vector<StampedMessage> sorted_messages(std::vector<StampedMessage> msgs) {
  std::stable_sort(msgs.begin(), msgs.end(), [](const StampedMessage& a, const StampedMessage& b) {
    if (a.stamp != b.stamp) return a.stamp < b.stamp;
    if (a.stream != b.stream) return a.stream < b.stream;
    return a.seq < b.seq;
  });
  return msgs;
}

std::vector<StampedMessage> read(const std::string& path, ReadOptions opts) {
  return sorted_messages(load(path, opts).file_order);
}

BagSummary bag_info(const std::string& path) {
  auto bag = load(path);
  BagSummary s;
  s.creation = bag.creation;
  s.size_bytes = bag.file_size;
  s.recovered = bag.recovered;
  s.total = bag.file_order.size();
  std::map<std::string, StreamSummary> per;
  for (const auto& d : bag.streams) per[d.id].desc = d;
  for (const auto& m : bag.file_order) {
    auto& ss = per[m.stream];
    ++ss.count;
    if (!ss.first || m.stamp < *ss.first) ss.first = m.stamp;
    if (!ss.last || m.stamp > *ss.last) ss.last = m.stamp;
    if (!s.first || m.stamp < *s.first) s.first = m.stamp;
    if (!s.last || m.stamp > *s.last) s.last = m.stamp;
  }
  if (bag.index_valid) {
    for (auto& [id, ss] : per) {
      auto it = bag.index_counts.find(id);
      if (it == bag.index_counts.end() || it->second != ss.count) {
        throw Error(Errc::CorruptIndex, "index count mismatch for " + id);
      }
    }
  }
  if (s.first) s.duration_ns = timestamp_diff(*s.last, *s.first);
  for (auto& [id, ss] : per) {
    if (ss.count >= 2) {
      auto dur = timestamp_diff(*ss.last, *ss.first);
      if (dur > 0) ss.rate_hz = static_cast<double>(ss.count - 1) * 1e9 / static_cast<double>(dur);
    }
    s.streams.push_back(ss);
  }
  return s;
}

}  // namespace condmon::bag
