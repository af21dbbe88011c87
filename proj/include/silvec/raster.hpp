#pragma once

// Binary silhouettes: loading from PNG/PGM and boundary extraction along the
// 0.5 iso-level of the pixel grid.

#include <silvec/errors.hpp>
#include <silvec/geometry.hpp>

#include <png.h>

#include <array>
#include <bit>
#include <cctype>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

namespace silvec {

// Row-major foreground mask; pixel (x, y) covers [x, x+1] x [y, y+1].
struct BinaryImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> mask;

  BinaryImage() = default;
  BinaryImage(int w, int h) : width(w), height(h), mask(static_cast<std::size_t>(w) * h, 0) {
    if (w < 1 || h < 1) throw ImageError("image dimensions must be positive");
  }

  bool at(int x, int y) const noexcept {
    if (x < 0 || y < 0 || x >= width || y >= height) return false;
    return mask[static_cast<std::size_t>(y) * width + x] != 0;
  }
  void set(int x, int y, bool v) { mask[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0; }

  std::size_t foreground_count() const noexcept {
    std::size_t c = 0;
    for (auto m : mask) c += m != 0;
    return c;
  }
};

struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;
};

namespace detail {

inline std::vector<unsigned char> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ImageError("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline GrayImage decode_png(const std::vector<unsigned char>& bytes) {
  png_image img;
  std::memset(&img, 0, sizeof img);
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&img, bytes.data(), bytes.size()))
    throw ImageError(std::string("PNG decode failed: ") + img.message);
  // libpng converts color to gray with the sRGB luma coefficients.
  img.format = PNG_FORMAT_GRAY;
  GrayImage out{static_cast<int>(img.width), static_cast<int>(img.height), {}};
  out.pixels.resize(PNG_IMAGE_SIZE(img));
  if (!png_image_finish_read(&img, nullptr, out.pixels.data(), 0, nullptr)) {
    png_image_free(&img);
    throw ImageError(std::string("PNG decode failed: ") + img.message);
  }
  return out;
}

inline GrayImage decode_pgm(const std::vector<unsigned char>& bytes) {
  std::size_t pos = 2;
  auto next_token = [&]() -> long {
    for (;;) {
      while (pos < bytes.size() && std::isspace(bytes[pos])) ++pos;
      if (pos < bytes.size() && bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
        continue;
      }
      break;
    }
    if (pos >= bytes.size() || !std::isdigit(bytes[pos])) throw ImageError("malformed PGM header");
    long v = 0;
    while (pos < bytes.size() && std::isdigit(bytes[pos])) v = v * 10 + (bytes[pos++] - '0');
    return v;
  };
  const bool binary = bytes[1] == '5';
  const long w = next_token(), h = next_token(), maxval = next_token();
  if (w < 1 || h < 1 || maxval < 1 || maxval > 65535) throw ImageError("malformed PGM header");
  GrayImage out{static_cast<int>(w), static_cast<int>(h), {}};
  const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  out.pixels.resize(n);
  auto scale = [&](long v) {
    return static_cast<std::uint8_t>(std::lround(255.0 * static_cast<double>(std::min(v, maxval)) / maxval));
  };
  if (binary) {
    ++pos;  // single whitespace after maxval
    const std::size_t bpp = maxval > 255 ? 2 : 1;
    if (bytes.size() < pos + n * bpp) throw ImageError("truncated PGM data");
    for (std::size_t i = 0; i < n; ++i) {
      const long v = bpp == 1 ? bytes[pos + i] : (bytes[pos + 2 * i] << 8) | bytes[pos + 2 * i + 1];
      out.pixels[i] = scale(v);
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) out.pixels[i] = scale(next_token());
  }
  return out;
}

}  // namespace detail

inline GrayImage load_gray(const std::string& path) {
  const auto bytes = detail::read_file(path);
  static constexpr std::array<unsigned char, 8> png_sig{0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (bytes.size() >= 8 && std::equal(png_sig.begin(), png_sig.end(), bytes.begin())) return detail::decode_png(bytes);
  if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '2' || bytes[1] == '5')) return detail::decode_pgm(bytes);
  throw ImageError("unsupported image format in '" + path + "' (expected PNG or PGM)");
}

// Foreground iff luminance < threshold (dark shape on light background);
// `invert` swaps the roles.
inline BinaryImage threshold_image(const GrayImage& gray, int threshold, bool invert = false) {
  if (threshold < 0 || threshold > 255) throw ParameterError("threshold must be in [0, 255]");
  BinaryImage img(gray.width, gray.height);
  for (std::size_t i = 0; i < gray.pixels.size(); ++i) {
    const bool fg = gray.pixels[i] < threshold;
    img.mask[i] = (fg != invert) ? 1 : 0;
  }
  return img;
}

inline BinaryImage load_binary(const std::string& path, int threshold = 128, bool invert = false) {
  return threshold_image(load_gray(path), threshold, invert);
}

// 8-bit gray PNG writer; foreground pixels are black.
inline void write_png(const std::string& path, const BinaryImage& img) {
  png_image out;
  std::memset(&out, 0, sizeof out);
  out.version = PNG_IMAGE_VERSION;
  out.width = static_cast<png_uint_32>(img.width);
  out.height = static_cast<png_uint_32>(img.height);
  out.format = PNG_FORMAT_GRAY;
  std::vector<std::uint8_t> px(img.mask.size());
  for (std::size_t i = 0; i < px.size(); ++i) px[i] = img.mask[i] ? 0 : 255;
  if (!png_image_write_to_file(&out, path.c_str(), 0, px.data(), 0, nullptr))
    throw ImageError("cannot write PNG '" + path + "': " + out.message);
}

inline void write_pgm(const std::string& path, const BinaryImage& img) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ImageError("cannot write '" + path + "'");
  f << "P5\n" << img.width << ' ' << img.height << "\n255\n";
  for (auto m : img.mask) f.put(static_cast<char>(m ? 0 : 255));
}

// Boundary cracks traced with the foreground on the left, so outer loops have
// positive signed area and holes negative. Vertices are crack midpoints, i.e.
// the marching-squares contour at level 0.5 over pixel centers. Where two
// diagonal foreground pixels meet, the trace turns around the current pixel,
// keeping diagonal neighbors apart (4-connected foreground).
inline std::vector<ClosedCurve> trace_crack_loops(const BinaryImage& img) {
  const int W = img.width, H = img.height;
  // Lattice vertices (0..W) x (0..H); each crack starts at a vertex and heads
  // in one of 4 directions: 0 = +x, 1 = +y, 2 = -x, 3 = -y.
  static constexpr int dx[4] = {1, 0, -1, 0};
  static constexpr int dy[4] = {0, 1, 0, -1};
  const std::size_t VW = static_cast<std::size_t>(W) + 1;
  auto vid = [&](int x, int y) { return static_cast<std::size_t>(y) * VW + static_cast<std::size_t>(x); };
  std::vector<std::uint8_t> out((VW) * (static_cast<std::size_t>(H) + 1), 0);  // bitmask of outgoing cracks
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      if (!img.at(x, y)) continue;
      if (!img.at(x, y - 1)) out[vid(x, y)] |= 1 << 0;          // top: (x,y) -> (x+1,y)
      if (!img.at(x + 1, y)) out[vid(x + 1, y)] |= 1 << 1;      // right: (x+1,y) -> (x+1,y+1)
      if (!img.at(x, y + 1)) out[vid(x + 1, y + 1)] |= 1 << 2;  // bottom: (x+1,y+1) -> (x,y+1)
      if (!img.at(x - 1, y)) out[vid(x, y + 1)] |= 1 << 3;      // left: (x,y+1) -> (x,y)
    }
  }
  std::vector<ClosedCurve> loops;
  for (int y = 0; y <= H; ++y) {
    for (int x = 0; x <= W; ++x) {
      while (out[vid(x, y)] != 0) {
        const int start_dir = std::countr_zero(static_cast<unsigned>(out[vid(x, y)]));
        int dir = start_dir;
        int cx = x, cy = y;
        std::vector<Point2> pts;
        for (;;) {
          out[vid(cx, cy)] &= static_cast<std::uint8_t>(~(1 << dir));
          pts.push_back({cx + 0.5 * dx[dir], cy + 0.5 * dy[dir]});
          cx += dx[dir];
          cy += dy[dir];
          unsigned avail = out[vid(cx, cy)];
          const bool at_start = cx == x && cy == y;
          if (at_start) avail |= 1u << start_dir;
          // Prefer turning toward the foreground side, then straight, then away.
          const int order[3] = {(dir + 1) % 4, dir, (dir + 3) % 4};
          int nd = -1;
          for (int c : order)
            if (avail & (1u << c)) { nd = c; break; }
          if (nd < 0 || (at_start && nd == start_dir)) break;
          dir = nd;
        }
        // Drop collinear midpoints on straight runs; the loop geometry is unchanged.
        std::vector<Point2> simplified;
        simplified.reserve(pts.size());
        for (std::size_t i = 0; i < pts.size(); ++i) {
          const Point2 a = pts[(i + pts.size() - 1) % pts.size()], b = pts[i], c = pts[(i + 1) % pts.size()];
          if (cross(b - a, c - b) != 0.0) simplified.push_back(b);
        }
        loops.emplace_back(std::move(simplified));
      }
    }
  }
  return loops;
}

// One oriented closed curve per boundary component, re-sampled at ~1 px.
inline std::vector<ClosedCurve> extract_boundaries(const BinaryImage& img, double spacing = 1.0) {
  if (img.foreground_count() == 0) throw EmptySilhouetteError();
  std::vector<ClosedCurve> curves;
  for (auto& loop : trace_crack_loops(img)) curves.push_back(loop.resampled(spacing));
  return curves;
}

}  // namespace silvec
