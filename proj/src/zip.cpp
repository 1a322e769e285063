#include "zkeval/zip.hpp"

#include <zlib.h>

#include "zkeval/errors.hpp"

namespace zkeval::zip {

namespace {

constexpr uint32_t kLocalSig = 0x04034b50;
constexpr uint32_t kCentralSig = 0x02014b50;
constexpr uint32_t kEndSig = 0x06054b50;

void le16(Bytes& out, uint16_t v) {
  out.push_back(static_cast<uint8_t>(v));
  out.push_back(static_cast<uint8_t>(v >> 8));
}
void le32(Bytes& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

uint16_t rd16(std::span<const uint8_t> d, size_t at) {
  if (at + 2 > d.size()) throw FormatError("truncated zip archive");
  return static_cast<uint16_t>(d[at] | (d[at + 1] << 8));
}
uint32_t rd32(std::span<const uint8_t> d, size_t at) {
  if (at + 4 > d.size()) throw FormatError("truncated zip archive");
  return static_cast<uint32_t>(d[at]) | (static_cast<uint32_t>(d[at + 1]) << 8) |
         (static_cast<uint32_t>(d[at + 2]) << 16) | (static_cast<uint32_t>(d[at + 3]) << 24);
}

uint32_t crc_of(std::span<const uint8_t> data) {
  uLong crc = crc32(0L, Z_NULL, 0);
  size_t pos = 0;
  while (pos < data.size()) {
    uInt n = static_cast<uInt>(std::min<size_t>(data.size() - pos, 1u << 30));
    crc = crc32(crc, data.data() + pos, n);
    pos += n;
  }
  return static_cast<uint32_t>(crc);
}

}  // namespace

Bytes write(const Entries& entries) {
  if (entries.size() > 0xffff) throw InvalidArgument("too many zip entries");
  Bytes out, central;
  for (const auto& [name, data] : entries) {
    if (data.size() > 0xffffffffULL || name.size() > 0xffff) throw InvalidArgument("zip entry too large");
    const uint32_t crc = crc_of(data);
    const uint32_t offset = static_cast<uint32_t>(out.size());
    const auto size = static_cast<uint32_t>(data.size());
    // Fixed DOS timestamp (1980-01-01) keeps archives byte-reproducible.
    le32(out, kLocalSig);
    le16(out, 20);
    le16(out, 0);
    le16(out, 0);
    le16(out, 0);
    le16(out, 0x21);
    le32(out, crc);
    le32(out, size);
    le32(out, size);
    le16(out, static_cast<uint16_t>(name.size()));
    le16(out, 0);
    out.insert(out.end(), name.begin(), name.end());
    out.insert(out.end(), data.begin(), data.end());

    le32(central, kCentralSig);
    le16(central, 20);
    le16(central, 20);
    le16(central, 0);
    le16(central, 0);
    le16(central, 0);
    le16(central, 0x21);
    le32(central, crc);
    le32(central, size);
    le32(central, size);
    le16(central, static_cast<uint16_t>(name.size()));
    le16(central, 0);
    le16(central, 0);
    le16(central, 0);
    le16(central, 0);
    le32(central, 0);
    le32(central, offset);
    central.insert(central.end(), name.begin(), name.end());
  }
  if (out.size() + central.size() > 0xffffffffULL) throw InvalidArgument("zip archive too large");
  const auto cd_offset = static_cast<uint32_t>(out.size());
  out.insert(out.end(), central.begin(), central.end());
  le32(out, kEndSig);
  le16(out, 0);
  le16(out, 0);
  le16(out, static_cast<uint16_t>(entries.size()));
  le16(out, static_cast<uint16_t>(entries.size()));
  le32(out, static_cast<uint32_t>(central.size()));
  le32(out, cd_offset);
  le16(out, 0);
  return out;
}

std::map<std::string, Bytes> read(std::span<const uint8_t> d) {
  if (d.size() < 22) throw FormatError("not a zip archive");
  size_t eocd = d.size() - 22;
  // Allow a trailing comment.
  while (rd32(d, eocd) != kEndSig) {
    if (eocd == 0 || d.size() - eocd > 22 + 0xffff) throw FormatError("zip end record not found");
    --eocd;
  }
  const uint16_t count = rd16(d, eocd + 10);
  size_t at = rd32(d, eocd + 16);
  std::map<std::string, Bytes> files;
  for (uint16_t i = 0; i < count; ++i) {
    if (rd32(d, at) != kCentralSig) throw FormatError("corrupt zip central directory");
    const uint16_t method = rd16(d, at + 10);
    const uint32_t crc = rd32(d, at + 16);
    const uint32_t csize = rd32(d, at + 20);
    const uint32_t usize = rd32(d, at + 24);
    const uint16_t nlen = rd16(d, at + 28), xlen = rd16(d, at + 30), clen = rd16(d, at + 32);
    const uint32_t local = rd32(d, at + 42);
    if (at + 46 + nlen > d.size()) throw FormatError("truncated zip archive");
    std::string name(reinterpret_cast<const char*>(d.data() + at + 46), nlen);
    at += 46 + nlen + xlen + clen;
    if (method != 0 || csize != usize) throw FormatError("zip entry '" + name + "' is compressed");
    if (rd32(d, local) != kLocalSig) throw FormatError("corrupt zip local header");
    const size_t start = local + 30 + rd16(d, local + 26) + rd16(d, local + 28);
    if (start + csize > d.size()) throw FormatError("truncated zip entry '" + name + "'");
    Bytes data(d.begin() + start, d.begin() + start + csize);
    if (crc_of(data) != crc) throw FormatError("crc mismatch in zip entry '" + name + "'");
    if (!files.emplace(std::move(name), std::move(data)).second) throw FormatError("duplicate zip entry");
  }
  return files;
}

}  // namespace zkeval::zip
