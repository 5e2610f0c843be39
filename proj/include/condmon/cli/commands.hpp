#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "condmon/stream.hpp"

namespace condmon::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitUsage = 2;

// Entry point of the `condmon` tool; args exclude the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

struct PlotSpec {
  enum class Format { Csv, Svg };

  std::string input;                 // bag path
  std::vector<std::string> streams;  // topic patterns, >= 1
  std::optional<double> from_s, to_s;  // offsets from the first message; default whole bag
  double period_s = 1.0;             // CSV grid period
  std::string output;
  Format format = Format::Csv;
  bool markers = false;              // SVG: overlay markers/segment and markers/stimulus
};

// Format from the output extension (".svg" -> Svg, otherwise Csv).
PlotSpec::Format format_for(const std::string& path);

// Renders without touching the filesystem. Throws BadRange when the range is
// empty or inverted, NoData when no matched stream has samples in it.
std::string render_plot(const PlotSpec& spec, const std::vector<StampedMessage>& sorted,
                        const std::vector<StreamDescriptor>& streams);

// Reads spec.input and writes spec.output; nothing is written on error.
void write_plot(const PlotSpec& spec);

}  // namespace condmon::cli
