#include "eik/io.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace eik::io {

namespace {

std::uint64_t to_le(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) return v;
  std::uint64_t r = 0;
  for (int b = 0; b < 8; ++b) r |= ((v >> (8 * b)) & 0xffu) << (8 * (7 - b));
  return r;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_eikf(std::ostream& os, const ScalarField& field) {
  const GridSpec& g = field.grid();
  std::string header = "EIKF 1 " + std::to_string(g.ndims());
  for (int a = 0; a < g.ndims(); ++a) header += " " + std::to_string(g.dim(a));
  for (int a = 0; a < g.ndims(); ++a) header += " " + format_double(g.origin(a));
  for (int a = 0; a < g.ndims(); ++a) header += " " + format_double(g.spacing(a));
  header += "\n";
  os.write(header.data(), static_cast<std::streamsize>(header.size()));
  for (double v : field.values()) {
    const std::uint64_t bits = to_le(std::bit_cast<std::uint64_t>(v));
    char bytes[8];
    std::memcpy(bytes, &bits, 8);
    os.write(bytes, 8);
  }
  if (!os) throw Error("EIKF: write failed");
}

ScalarField read_eikf(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) throw Error("EIKF: missing header line");
  std::istringstream hs(header);
  std::string magic;
  int version = 0, nd = 0;
  hs >> magic >> version >> nd;
  if (magic != "EIKF") throw Error("EIKF: bad magic '" + magic + "'");
  if (version != 1) throw Error("EIKF: unsupported version " + std::to_string(version));
  if (nd != 1 && nd != 2) throw Error("EIKF: ndims must be 1 or 2");
  std::array<long long, 2> dims{1, 1};
  std::array<double, 2> origin{0, 0}, spacing{1, 1};
  for (int a = 0; a < nd; ++a) hs >> dims[a];
  for (int a = 0; a < nd; ++a) hs >> origin[a];
  for (int a = 0; a < nd; ++a) hs >> spacing[a];
  std::string extra;
  if (!hs || (hs >> extra)) throw Error("EIKF: malformed header '" + header + "'");
  if (dims[0] < 1 || dims[1] < 1) throw Error("EIKF: dimensions must be positive");
  const GridSpec g =
      nd == 1 ? GridSpec::line(static_cast<std::size_t>(dims[0]), origin[0], spacing[0])
              : GridSpec::plane(static_cast<std::size_t>(dims[0]),
                                static_cast<std::size_t>(dims[1]), origin, spacing);
  std::vector<double> values(g.size());
  for (double& v : values) {
    char bytes[8];
    if (!is.read(bytes, 8)) throw Error("EIKF: truncated value block");
    std::uint64_t bits;
    std::memcpy(&bits, bytes, 8);
    v = std::bit_cast<double>(to_le(bits));
  }
  return ScalarField(g, std::move(values));
}

void write_eikf(const std::filesystem::path& path, const ScalarField& field) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  write_eikf(os, field);
}

ScalarField read_eikf(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path.string());
  return read_eikf(is);
}

void write_csv(std::ostream& os, const ScalarField& field) {
  const GridSpec& g = field.grid();
  const std::size_t n0 = g.dim(0), n1 = g.dim(1);
  for (std::size_t i = 0; i < n0; ++i) {
    for (std::size_t j = 0; j < n1; ++j) {
      if (j) os << ',';
      os << format_double(field[i * n1 + j]);
    }
    os << '\n';
  }
}

void write_csv(const std::filesystem::path& path, const ScalarField& field) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  write_csv(os, field);
}

void write_key_values(const std::filesystem::path& path, const KeyValues& kv) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  for (const auto& [k, v] : kv) os << k << " = " << v << '\n';
}

KeyValues parse_key_values(std::istream& is) {
  KeyValues kv;
  std::string line;
  while (std::getline(is, line)) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw Error("key-value line without '=': " + t);
    kv.emplace_back(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  return kv;
}

KeyValues read_key_values(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path.string());
  return parse_key_values(is);
}

}  // namespace eik::io
