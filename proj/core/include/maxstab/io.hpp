#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "maxstab/grid.hpp"

namespace maxstab {

// Binary field container, format version 1. Little-endian fixed layout with
// the values stored as raw IEEE doubles, so write/read round trips are bit
// exact. Not an interchange format; a consumer on a big-endian host would
// have to swap.
void write_field(const std::filesystem::path& path, const FieldRealization& f);
FieldRealization read_field(const std::filesystem::path& path);

// Numeric CSV with a header row. Cells print with %.17g so values survive a
// parse round trip; rows must all match the header width.
void write_csv(const std::filesystem::path& path,
               const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

// One row per site: coordinates then the field value.
void field_to_csv(const std::filesystem::path& path, const FieldRealization& f);

std::string sha256_hex(std::span<const unsigned char> bytes);
std::string sha256_file(const std::filesystem::path& path);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

// %.17g, the shortest-round-trip-safe fixed style used across all artifacts.
std::string format_double(double x);

}  // namespace maxstab
