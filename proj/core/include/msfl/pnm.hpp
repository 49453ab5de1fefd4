#pragma once

#include <string>

#include "msfl/image.hpp"

namespace msfl {

// Binary PGM (P5) or PPM (P6) with maxval <= 255; intensities come back as
// value / maxval. Throws IoError on malformed headers or short files.
Image read_pnm(const std::string& path);

// Writes P5 for single-channel images, P6 for three-channel, maxval 255,
// each sample round(v * 255). Reading a written file and writing it again
// reproduces the bytes exactly.
void write_pnm(const Image& img, const std::string& path);

}  // namespace msfl
