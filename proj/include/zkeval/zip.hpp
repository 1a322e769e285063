#pragma once

#include <map>
#include <string>
#include <vector>

#include "zkeval/bytes.hpp"

// Minimal zip container (stored entries, no compression). Proofs are hash
// output and do not compress anyway.
namespace zkeval::zip {

using Entries = std::vector<std::pair<std::string, Bytes>>;

Bytes write(const Entries& entries);
// Throws FormatError on anything it cannot read, including compressed entries.
std::map<std::string, Bytes> read(std::span<const uint8_t> archive);

}  // namespace zkeval::zip
