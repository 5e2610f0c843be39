#include "condmon/bag/format.hpp"

#include <zlib.h>

namespace condmon::bag {

std::uint32_t crc32(ByteView data) {
  uLong c = ::crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in bounded slices.
  std::size_t off = 0;
  while (off < data.size()) {
    auto n = static_cast<uInt>(std::min<std::size_t>(data.size() - off, 1u << 30));
    c = ::crc32(c, data.data() + off, n);
    off += n;
  }
  return static_cast<std::uint32_t>(c);
}

}  // namespace condmon::bag
