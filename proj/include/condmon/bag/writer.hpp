#pragma once

#include <chrono>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "condmon/bag/format.hpp"
#include "condmon/sink.hpp"

namespace condmon::bag {

struct WriterOptions {
  std::size_t chunk_bytes = 4 * 1024 * 1024;
  std::chrono::milliseconds chunk_interval{5000};
  Timestamp creation;  // header stamp; zero means "now"
};

// Append-only chunked writer. One writer per file.
class Writer final : public MessageSink {
 public:
  // Throws IoError. `streams` go into the header table.
  Writer(const std::string& path, WriterOptions opts = {}, std::vector<StreamDescriptor> streams = {});
  ~Writer() override;
  Writer(const Writer&) = delete;
  Writer& operator=(const Writer&) = delete;

  void advertise(const StreamDescriptor& desc) override;
  // Unknown streams are registered with a descriptor inferred from the topic.
  // Throws OutOfOrder when a stream's stamp goes backwards.
  void publish(const StampedMessage& msg) override;

  void flush();  // seals the current chunk
  void tick();   // flushes when the chunk interval has elapsed
  void close();  // flush + index + trailer; idempotent

  std::uint64_t message_count() const { return total_; }
  const std::string& path() const { return path_; }

 private:
  struct StreamInfo {
    StreamDescriptor desc;
    std::uint64_t count = 0;
    std::vector<std::pair<std::uint64_t, std::uint32_t>> chunks;  // offset, count
    std::uint32_t in_chunk = 0;
    std::optional<Timestamp> last_stamp;
  };

  void add_record(RecordType type, ByteView bytes);
  void write(ByteView bytes);
  StreamInfo& ensure_stream(const StreamDescriptor& desc, bool update);

  std::string path_;
  WriterOptions opts_;
  std::ofstream out_;
  std::uint64_t offset_ = 0;
  std::map<std::string, StreamInfo> streams_;
  Bytes chunk_;
  std::uint32_t chunk_messages_ = 0;
  Timestamp chunk_first_, chunk_last_;
  std::chrono::steady_clock::time_point chunk_started_;
  std::uint64_t total_ = 0;
  bool closed_ = false;
};

}  // namespace condmon::bag
