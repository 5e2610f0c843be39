#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace condmon {

enum class Errc {
  SchemaMismatch,
  Overflow,
  InvalidArgument,
  // bus
  BodyTooLarge,
  BadMagic,
  UnsupportedVersion,
  TruncatedBody,
  UnknownStream,
  BadPattern,
  BrokerDisconnected,
  BindFailed,
  // syncfilter
  OutOfOrder,
  TooLarge,
  // bag
  IoError,
  CorruptIndex,
  TruncatedChunk,
  // features
  EmptyWindow,
  SingleSample,
  EmptySeries,
  InsufficientSamples,
  ClockSkew,
  MissingBaseline,
  MissingStream,
  // sim / cli
  BadConfig,
  NoData,
  BadRange,
};

std::string_view errc_name(Errc code) noexcept;

// Domain error carrying a machine-checkable code.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace condmon
