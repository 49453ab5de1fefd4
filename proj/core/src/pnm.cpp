#include "msfl/pnm.hpp"

#include <cctype>
#include <cmath>
#include <fstream>

#include "msfl/errors.hpp"

namespace msfl {

// Next header token, skipping whitespace and # comments.
static std::string pnm_token(std::istream& in, const std::string& path) {
  std::string tok;
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (std::isspace(c)) {
      c = in.get();
    } else {
      break;
    }
  }
  while (c != EOF && !std::isspace(c) && c != '#') {
    tok.push_back(static_cast<char>(c));
    c = in.get();
  }
  if (c == '#') in.unget();
  if (tok.empty()) throw IoError(path + ": truncated header");
  return tok;
}

static int pnm_int(std::istream& in, const std::string& path,
                   const char* what) {
  const std::string tok = pnm_token(in, path);
  try {
    std::size_t pos = 0;
    const int value = std::stoi(tok, &pos);
    if (pos != tok.size() || value < 0) throw std::invalid_argument(tok);
    return value;
  } catch (const std::exception&) {
    throw IoError(path + ": bad " + what + " '" + tok + "'");
  }
}

Image read_pnm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path + ": cannot open");
  const std::string magic = pnm_token(in, path);
  int channels;
  if (magic == "P5") channels = 1;
  else if (magic == "P6") channels = 3;
  else throw IoError(path + ": not a binary PGM/PPM (magic '" + magic + "')");

  const int width = pnm_int(in, path, "width");
  const int height = pnm_int(in, path, "height");
  const int maxval = pnm_int(in, path, "maxval");
  if (width < 1 || height < 1) throw IoError(path + ": empty image");
  if (maxval < 1 || maxval > 255)
    throw IoError(path + ": maxval " + std::to_string(maxval) +
                  " out of the supported 1..255 range");
  // The token scan consumed the single whitespace byte before the raster.

  Image img = Image::zeros(width, height, channels);
  std::vector<unsigned char> raw(img.size());
  in.read(reinterpret_cast<char*>(raw.data()),
          static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(in.gcount()) != raw.size())
    throw IoError(path + ": raster shorter than " +
                  std::to_string(raw.size()) + " bytes");
  for (std::size_t i = 0; i < raw.size(); ++i)
    img.pixels[i] = static_cast<double>(raw[i]) / maxval;
  return img;
}

void write_pnm(const Image& img, const std::string& path) {
  validate_image(img, path);
  if (img.channels != 1 && img.channels != 3)
    throw IoError(path + ": only 1- or 3-channel images can be written");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path + ": cannot open for writing");
  out << (img.channels == 1 ? "P5" : "P6") << "\n"
      << img.width << " " << img.height << "\n255\n";
  std::vector<unsigned char> raw(img.size());
  for (std::size_t i = 0; i < raw.size(); ++i)
    raw[i] = static_cast<unsigned char>(std::lround(img.pixels[i] * 255.0));
  out.write(reinterpret_cast<const char*>(raw.data()),
            static_cast<std::streamsize>(raw.size()));
  if (!out) throw IoError(path + ": write failed");
}

}  // namespace msfl
