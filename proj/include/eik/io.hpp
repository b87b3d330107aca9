#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "eik/field.hpp"

namespace eik::io {

// EIKF v1: one ASCII header line
//   EIKF 1 <ndims> <dim0> [dim1] <origin...> <spacing...>\n
// followed by size() little-endian IEEE-754 doubles in row-major order.

void write_eikf(std::ostream& os, const ScalarField& field);
ScalarField read_eikf(std::istream& is);
void write_eikf(const std::filesystem::path& path, const ScalarField& field);
ScalarField read_eikf(const std::filesystem::path& path);

/// One line per grid row (fixed axis-0 index), values as %.17g.
void write_csv(std::ostream& os, const ScalarField& field);
void write_csv(const std::filesystem::path& path, const ScalarField& field);

/// Ordered `key = value` text, as used by reports and run manifests.
using KeyValues = std::vector<std::pair<std::string, std::string>>;

void write_key_values(const std::filesystem::path& path, const KeyValues& kv);
KeyValues read_key_values(const std::filesystem::path& path);
KeyValues parse_key_values(std::istream& is);

/// %.17g formatting; round-trips every double exactly.
std::string format_double(double v);

}  // namespace eik::io
