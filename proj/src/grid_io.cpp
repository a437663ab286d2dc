#include "encore/grid_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "encore/errors.hpp"

namespace encore {

namespace {

void write_p5(const std::filesystem::path& path,
              const std::vector<std::uint8_t>& bytes, std::size_t h,
              std::size_t w) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot open for writing: " + path.string());
  }
  out << "P5\n" << w << " " << h << "\n255\n";
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw IoError("write failed: " + path.string());
  }
}

// Reads the P5 header, skipping whitespace and '#' comments.
struct PgmHeader {
  std::size_t width = 0;
  std::size_t height = 0;
  unsigned maxval = 0;
};

int next_header_token(std::ifstream& in) {
  int ch = in.get();
  while (ch != EOF) {
    if (ch == '#') {
      while (ch != EOF && ch != '\n') {
        ch = in.get();
      }
    } else if (!std::isspace(ch)) {
      return ch;
    }
    ch = in.get();
  }
  return EOF;
}

unsigned read_header_number(std::ifstream& in, const std::string& path) {
  int ch = next_header_token(in);
  if (ch == EOF || !std::isdigit(ch)) {
    throw IoError("malformed PGM header: " + path);
  }
  unsigned value = 0;
  while (ch != EOF && std::isdigit(ch)) {
    value = value * 10 + static_cast<unsigned>(ch - '0');
    ch = in.get();
  }
  return value;
}

std::vector<std::uint8_t> read_p5(const std::filesystem::path& path,
                                  PgmHeader& hdr) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open: " + path.string());
  }
  char m0 = 0;
  char m1 = 0;
  in.get(m0);
  in.get(m1);
  if (m0 != 'P' || m1 != '5') {
    throw IoError("not a binary PGM (P5): " + path.string());
  }
  hdr.width = read_header_number(in, path.string());
  hdr.height = read_header_number(in, path.string());
  hdr.maxval = read_header_number(in, path.string());
  if (hdr.maxval != 255) {
    throw IoError("unsupported PGM maxval (want 255): " + path.string());
  }
  std::vector<std::uint8_t> bytes(hdr.width * hdr.height);
  in.read(reinterpret_cast<char*>(bytes.data()),
          static_cast<std::streamsize>(bytes.size()));
  if (in.gcount() != static_cast<std::streamsize>(bytes.size())) {
    throw IoError("truncated PGM payload: " + path.string());
  }
  return bytes;
}

}  // namespace

void write_pgm(const std::filesystem::path& path, const Grid& image) {
  if (image.rank() != 3 || image.shape[0] != 1) {
    throw ShapeError("write_pgm expects a (1,H,W) grid");
  }
  const std::size_t h = image.shape[1];
  const std::size_t w = image.shape[2];
  std::vector<std::uint8_t> bytes(h * w);
  for (std::size_t i = 0; i < h * w; ++i) {
    const double v = std::min(1.0, std::max(0.0, image.data[i]));
    bytes[i] = static_cast<std::uint8_t>(std::lround(v * 255.0));
  }
  write_p5(path, bytes, h, w);
}

Grid read_pgm(const std::filesystem::path& path) {
  PgmHeader hdr;
  const auto bytes = read_p5(path, hdr);
  Grid image({1, hdr.height, hdr.width});
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    image.data[i] = static_cast<double>(bytes[i]) / 255.0;
  }
  return image;
}

void write_label_pgm(const std::filesystem::path& path,
                     const LabelMask& mask) {
  std::vector<std::uint8_t> bytes(mask.size());
  for (std::size_t i = 0; i < mask.size(); ++i) {
    const int v = mask.labels[i];
    if (v < 0 || v > 255) {
      throw ValidationError("label out of byte range: " + std::to_string(v));
    }
    bytes[i] = static_cast<std::uint8_t>(v);
  }
  write_p5(path, bytes, mask.height, mask.width);
}

LabelMask read_label_pgm(const std::filesystem::path& path) {
  PgmHeader hdr;
  const auto bytes = read_p5(path, hdr);
  LabelMask mask(hdr.height, hdr.width);
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    mask.labels[i] = bytes[i];
  }
  return mask;
}

void write_csv(const std::filesystem::path& path, const Grid& grid) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot open for writing: " + path.string());
  }
  out << "# shape:";
  for (const std::size_t d : grid.shape) {
    out << " " << d;
  }
  out << "\n";
  const std::size_t cols = grid.shape.back();
  char buf[32];
  for (std::size_t i = 0; i < grid.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", grid.data[i]);
    out << buf;
    out << (((i + 1) % cols == 0) ? '\n' : ',');
  }
  if (!out) {
    throw IoError("write failed: " + path.string());
  }
}

}  // namespace encore
