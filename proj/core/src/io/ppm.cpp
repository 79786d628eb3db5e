#include "agesvd/io/ppm.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "agesvd/error.hpp"
#include "agesvd/linalg.hpp"

namespace agesvd::io {

Matrix RgbImage::channel(std::size_t c) const {
  Matrix m(height, width);
  for (std::size_t r = 0; r < height; ++r)
    for (std::size_t x = 0; x < width; ++x) m(r, x) = pixels[(r * width + x) * 3 + c];
  return m;
}

void RgbImage::set_channel(std::size_t c, const Matrix& values) {
  for (std::size_t r = 0; r < height; ++r) {
    for (std::size_t x = 0; x < width; ++x) {
      const double v = std::clamp(std::round(values(r, x)), 0.0, 255.0);
      pixels[(r * width + x) * 3 + c] = static_cast<std::uint8_t>(v);
    }
  }
}

namespace {

void skip_space_and_comments(std::istream& in) {
  while (true) {
    const int ch = in.peek();
    if (ch == '#') {
      std::string ignored;
      std::getline(in, ignored);
    } else if (ch != EOF && std::isspace(ch)) {
      in.get();
    } else {
      return;
    }
  }
}

std::size_t read_header_int(std::istream& in, const char* what) {
  skip_space_and_comments(in);
  long long v = -1;
  if (!(in >> v) || v <= 0) throw DataError(std::string("ppm: invalid ") + what);
  return static_cast<std::size_t>(v);
}

}  // namespace

RgbImage read_ppm(std::istream& in) {
  std::string magic(2, '\0');
  in.read(magic.data(), 2);
  if (!in || (magic != "P3" && magic != "P6")) throw DataError("ppm: unsupported format (expected P3 or P6)");
  RgbImage img;
  img.width = read_header_int(in, "width");
  img.height = read_header_int(in, "height");
  const std::size_t maxval = read_header_int(in, "maxval");
  if (maxval != 255) throw DataError("ppm: only 8-bit channels (maxval 255) are supported");
  const std::size_t count = img.width * img.height * 3;
  img.pixels.resize(count);
  if (magic == "P6") {
    in.get();  // single whitespace byte after maxval
    in.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(count));
    if (static_cast<std::size_t>(in.gcount()) != count) throw DataError("ppm: truncated pixel data");
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      skip_space_and_comments(in);
      int v = -1;
      if (!(in >> v) || v < 0 || v > 255) throw DataError("ppm: invalid sample " + std::to_string(i));
      img.pixels[i] = static_cast<std::uint8_t>(v);
    }
  }
  return img;
}

RgbImage load_ppm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  try {
    return read_ppm(in);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_ppm(std::ostream& out, const RgbImage& image, PpmEncoding encoding) {
  if (image.pixels.size() != image.width * image.height * 3) throw DataError("ppm: pixel buffer has the wrong size");
  if (encoding == PpmEncoding::binary) {
    out << "P6\n" << image.width << ' ' << image.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(image.pixels.data()), static_cast<std::streamsize>(image.pixels.size()));
    return;
  }
  out << "P3\n" << image.width << ' ' << image.height << "\n255\n";
  for (std::size_t i = 0; i < image.pixels.size(); ++i) {
    out << static_cast<int>(image.pixels[i]) << ((i + 1) % (image.width * 3) == 0 ? '\n' : ' ');
  }
}

void save_ppm(const std::filesystem::path& path, const RgbImage& image, PpmEncoding encoding) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  write_ppm(out, image, encoding);
}

RgbImage rank_approx(const RgbImage& image, std::size_t k) {
  if (k == 0) throw UsageError("image: rank must be at least 1");
  RgbImage out = image;
  for (std::size_t c = 0; c < 3; ++c) {
    const Matrix channel = image.channel(c);
    const SvdFactorization f = svd(channel);
    if (f.rank() == 0) continue;  // all-zero channel stays zero
    out.set_channel(c, reconstruct_rank(f, std::min(k, f.rank())));
  }
  return out;
}

double channel_error(const RgbImage& a, const RgbImage& b, std::size_t c) {
  if (a.width != b.width || a.height != b.height) throw DataError("image: dimensions differ");
  double ss = 0.0;
  for (std::size_t i = c; i < a.pixels.size(); i += 3) {
    const double d = static_cast<double>(a.pixels[i]) - static_cast<double>(b.pixels[i]);
    ss += d * d;
  }
  return std::sqrt(ss);
}

void image_rank_approx(const std::filesystem::path& in, const std::filesystem::path& out, std::size_t k) {
  save_ppm(out, rank_approx(load_ppm(in), k));
}

}  // namespace agesvd::io
