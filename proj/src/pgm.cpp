#include "eik/pgm.hpp"

#include <cctype>
#include <fstream>
#include <string>

#include "eik/field.hpp"

namespace eik {

namespace {

// Next header token, skipping whitespace and '#' comments.
std::string header_token(std::istream& is) {
  std::string tok;
  int c;
  while ((c = is.get()) != EOF) {
    if (c == '#') {
      while ((c = is.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  if (tok.empty()) throw Error("PGM: truncated header");
  return tok;
}

long parse_positive(const std::string& tok, const char* what) {
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(tok, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != tok.size() || v <= 0) throw Error(std::string("PGM: bad ") + what + " '" + tok + "'");
  return v;
}

}  // namespace

GrayImage read_pgm(std::istream& is) {
  const std::string magic = header_token(is);
  if (magic != "P5" && magic != "P2") throw Error("PGM: unsupported magic '" + magic + "'");
  GrayImage img;
  img.width = static_cast<std::size_t>(parse_positive(header_token(is), "width"));
  img.height = static_cast<std::size_t>(parse_positive(header_token(is), "height"));
  img.maxval = static_cast<int>(parse_positive(header_token(is), "maxval"));
  if (img.maxval > 65535) throw Error("PGM: maxval above 65535");
  img.pixels.resize(img.width * img.height);

  if (magic == "P2") {
    for (auto& p : img.pixels) {
      long v = -1;
      if (!(is >> v) || v < 0 || v > img.maxval) throw Error("PGM: bad or missing pixel value");
      p = static_cast<std::uint16_t>(v);
    }
  } else {
    const bool wide = img.maxval > 255;
    for (auto& p : img.pixels) {
      const int hi = is.get();
      if (hi == EOF) throw Error("PGM: truncated pixel data");
      int v = hi;
      if (wide) {
        const int lo = is.get();
        if (lo == EOF) throw Error("PGM: truncated pixel data");
        v = (hi << 8) | lo;
      }
      if (v > img.maxval) throw Error("PGM: pixel exceeds maxval");
      p = static_cast<std::uint16_t>(v);
    }
  }
  return img;
}

GrayImage read_pgm(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path.string());
  return read_pgm(is);
}

void write_pgm(std::ostream& os, const GrayImage& img, bool binary) {
  if (img.pixels.size() != img.width * img.height) throw Error("PGM: pixel count mismatch");
  os << (binary ? "P5" : "P2") << '\n'
     << img.width << ' ' << img.height << '\n'
     << img.maxval << '\n';
  if (binary) {
    for (auto p : img.pixels) {
      if (img.maxval > 255) os.put(static_cast<char>(p >> 8));
      os.put(static_cast<char>(p & 0xff));
    }
  } else {
    for (std::size_t r = 0; r < img.height; ++r) {
      for (std::size_t c = 0; c < img.width; ++c) os << (c ? " " : "") << img.at(r, c);
      os << '\n';
    }
  }
  if (!os) throw Error("PGM: write failed");
}

void write_pgm(const std::filesystem::path& path, const GrayImage& img, bool binary) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  write_pgm(os, img, binary);
}

}  // namespace eik
