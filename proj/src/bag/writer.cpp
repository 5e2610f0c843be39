#include "condmon/bag/writer.hpp"

#include "condmon/bus/frame.hpp"
#include "condmon/error.hpp"

namespace condmon::bag {

namespace {

void put_stamp(ByteWriter& w, Timestamp t) {
  w.u64(t.seconds);
  w.u32(t.nanos);
}

}  // namespace

Writer::Writer(const std::string& path, WriterOptions opts, std::vector<StreamDescriptor> streams)
    : path_(path), opts_(opts) {
  out_.open(path, std::ios::binary | std::ios::trunc);
  if (!out_) throw Error(Errc::IoError, "cannot open '" + path + "' for writing");
  if (opts_.creation == Timestamp{}) opts_.creation = SystemClock().now();

  Bytes header;
  ByteWriter w(header);
  w.raw(kFileMagic);
  put_stamp(w, opts_.creation);
  w.u32(static_cast<std::uint32_t>(streams.size()));
  for (const auto& d : streams) {
    ensure_stream(d, true);
    auto def = bus::encode_advertise(d);
    w.u32(static_cast<std::uint32_t>(def.size()));
    w.raw(def);
  }
  write(header);
  out_.flush();
  chunk_started_ = std::chrono::steady_clock::now();
}

Writer::~Writer() {
  try {
    close();
  } catch (...) {
  }
}

void Writer::write(ByteView bytes) {
  out_.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out_) throw Error(Errc::IoError, "write to '" + path_ + "' failed");
  offset_ += bytes.size();
}

void Writer::add_record(RecordType type, ByteView bytes) {
  ByteWriter w(chunk_);
  w.u8(static_cast<std::uint8_t>(type));
  w.u32(static_cast<std::uint32_t>(bytes.size()));
  w.raw(bytes);
}

Writer::StreamInfo& Writer::ensure_stream(const StreamDescriptor& desc, bool update) {
  auto [it, inserted] = streams_.try_emplace(desc.id);
  if (inserted || (update && !(it->second.desc == desc))) it->second.desc = desc;
  return it->second;
}

void Writer::advertise(const StreamDescriptor& desc) {
  if (closed_) throw Error(Errc::IoError, "bag already closed");
  desc.validate();
  auto it = streams_.find(desc.id);
  if (it != streams_.end() && it->second.desc == desc) return;
  ensure_stream(desc, true);
  add_record(RecordType::StreamDef, bus::encode_advertise(desc));
}

void Writer::publish(const StampedMessage& msg) {
  if (closed_) throw Error(Errc::IoError, "bag already closed");
  if (streams_.find(msg.stream) == streams_.end()) {
    StreamDescriptor d;
    d.id = msg.stream;
    d.kind = infer_kind(msg.stream);
    advertise(d);
  }
  auto& info = streams_.at(msg.stream);
  if (info.last_stamp && msg.stamp < *info.last_stamp) {
    throw Error(Errc::OutOfOrder, msg.stream + " stamp went backwards");
  }
  info.last_stamp = msg.stamp;

  add_record(RecordType::Message, bus::encode_publish(msg));
  if (chunk_messages_ == 0) {
    chunk_first_ = chunk_last_ = msg.stamp;
  } else {
    chunk_first_ = std::min(chunk_first_, msg.stamp);
    chunk_last_ = std::max(chunk_last_, msg.stamp);
  }
  ++chunk_messages_;
  ++info.in_chunk;
  ++info.count;
  ++total_;

  if (chunk_.size() >= opts_.chunk_bytes ||
      std::chrono::steady_clock::now() - chunk_started_ >= opts_.chunk_interval) {
    flush();
  }
}

void Writer::flush() {
  if (closed_) return;
  if (!chunk_.empty()) {
    const std::uint64_t chunk_offset = offset_;
    Bytes head;
    ByteWriter w(head);
    w.raw(kChunkMagic);
    put_stamp(w, chunk_first_);
    put_stamp(w, chunk_last_);
    w.u32(chunk_messages_);
    w.u8(0);  // uncompressed
    w.u32(static_cast<std::uint32_t>(chunk_.size()));
    w.u32(crc32(chunk_));
    write(head);
    write(chunk_);
    for (auto& [id, info] : streams_) {
      if (info.in_chunk > 0) info.chunks.emplace_back(chunk_offset, info.in_chunk);
      info.in_chunk = 0;
    }
    chunk_.clear();
    chunk_messages_ = 0;
  }
  out_.flush();
  chunk_started_ = std::chrono::steady_clock::now();
}

void Writer::tick() {
  if (!closed_ && chunk_messages_ > 0 &&
      std::chrono::steady_clock::now() - chunk_started_ >= opts_.chunk_interval) {
    flush();
  }
}

void Writer::close() {
  if (closed_) return;
  flush();
  const std::uint64_t index_offset = offset_;
  Bytes index;
  ByteWriter w(index);
  w.raw(kIndexMagic);
  w.u32(static_cast<std::uint32_t>(streams_.size()));
  for (const auto& [id, info] : streams_) {
    auto def = bus::encode_advertise(info.desc);
    w.u32(static_cast<std::uint32_t>(def.size()));
    w.raw(def);
    w.u64(info.count);
    w.u32(static_cast<std::uint32_t>(info.chunks.size()));
    for (auto [off, n] : info.chunks) {
      w.u64(off);
      w.u32(n);
    }
  }
  w.u64(total_);
  w.u32(crc32(index));
  w.raw(kTrailerMagic);
  w.u64(index_offset);
  write(index);
  out_.flush();
  out_.close();
  closed_ = true;
}

}  // namespace condmon::bag
