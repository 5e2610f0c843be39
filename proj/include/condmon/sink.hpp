#pragma once

#include "condmon/stream.hpp"

namespace condmon {

// Anything stamped messages can be published into: a bus client, a bag
// writer, or a test capture.
class MessageSink {
 public:
  virtual ~MessageSink() = default;
  virtual void advertise(const StreamDescriptor& desc) = 0;
  virtual void publish(const StampedMessage& msg) = 0;
};

}  // namespace condmon
