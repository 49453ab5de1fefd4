#include "msfl/scalespace.hpp"

#include <cmath>
#include <string>

#include "msfl/errors.hpp"

namespace msfl {

void ScaleConfig::validate() const {
  if (mode == Mode::BlurStack) {
    if (sigmas.empty()) throw ConfigError("ScaleConfig: sigmas empty");
    for (std::size_t j = 0; j < sigmas.size(); ++j) {
      if (sigmas[j] < 0.0) throw ConfigError("ScaleConfig: negative sigma");
      if (j > 0 && sigmas[j] <= sigmas[j - 1])
        throw ConfigError("ScaleConfig: sigmas must be strictly increasing");
    }
  } else {
    if (levels < 1) throw ConfigError("ScaleConfig: levels must be >= 1");
  }
}

namespace {

// Mirror an index into [0, n) without repeating the border sample,
// folding as often as the kernel radius requires.
int reflect_index(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * n - 2;
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

std::vector<double> gaussian_kernel(double sigma) {
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
    sum += k[i + radius];
  }
  for (double& w : k) w /= sum;
  return k;
}

// 1-D pass over one axis. The sum is written as center + sum of weighted
// differences, which keeps constant regions bit-exact.
void convolve_axis(const Image& src, Image& dst,
                   const std::vector<double>& kernel, bool horizontal) {
  const int radius = static_cast<int>(kernel.size() / 2);
  for (int y = 0; y < src.height; ++y) {
    for (int x = 0; x < src.width; ++x) {
      for (int c = 0; c < src.channels; ++c) {
        const double center = src.at(x, y, c);
        double acc = 0.0;
        for (int t = -radius; t <= radius; ++t) {
          int xs = x, ys = y;
          if (horizontal)
            xs = reflect_index(x + t, src.width);
          else
            ys = reflect_index(y + t, src.height);
          acc += kernel[t + radius] * (src.at(xs, ys, c) - center);
        }
        dst.at(x, y, c) = center + acc;
      }
    }
  }
}

}  // namespace

Image gaussian_blur(const Image& img, double sigma) {
  if (sigma < 0.0) throw ConfigError("gaussian_blur: sigma must be >= 0");
  if (sigma == 0.0) return img;
  const std::vector<double> kernel = gaussian_kernel(sigma);
  if (kernel.size() == 1) return img;
  Image tmp = Image::zeros(img.width, img.height, img.channels);
  Image out = Image::zeros(img.width, img.height, img.channels);
  convolve_axis(img, tmp, kernel, true);
  convolve_axis(tmp, out, kernel, false);
  return out;
}

std::vector<Image> build_pyramid(const Image& img, int levels) {
  if (levels < 1) throw ConfigError("build_pyramid: levels must be >= 1");
  const int min_side = std::min(img.width, img.height);
  if (min_side < (1 << (levels - 1))) {
    throw SizingError("build_pyramid: " + std::to_string(levels) +
                      " levels need side >= " +
                      std::to_string(1 << (levels - 1)) + ", image is " +
                      std::to_string(img.width) + "x" +
                      std::to_string(img.height));
  }
  std::vector<Image> pyr;
  pyr.reserve(levels);
  pyr.push_back(img);
  for (int k = 1; k < levels; ++k) {
    const Image blurred = gaussian_blur(pyr.back(), 1.0);
    const int w = (blurred.width + 1) / 2;
    const int h = (blurred.height + 1) / 2;
    Image down = Image::zeros(w, h, blurred.channels);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        for (int c = 0; c < blurred.channels; ++c)
          down.at(x, y, c) = blurred.at(2 * x, 2 * y, c);
    pyr.push_back(std::move(down));
  }
  return pyr;
}

MultiScalePatch multiscale_patch(const std::vector<Image>& pyramid, int cx,
                                 int cy, int side, bool clamp_to_fit) {
  if (pyramid.empty()) throw ConfigError("multiscale_patch: empty pyramid");
  if (pyramid[0].channels != 1)
    throw ConfigError("multiscale_patch: expects grayscale pyramid");
  MultiScalePatch msp;
  msp.side = side;
  const int m = static_cast<int>(pyramid.size());
  msp.joint.resize(static_cast<Eigen::Index>(m) * side * side);
  Eigen::Index off = 0;
  for (int k = 0; k < m; ++k) {
    const Image& level = pyramid[k];
    const double scale = static_cast<double>(1 << k);
    const int ckx = static_cast<int>(std::llround(cx / scale));
    const int cky = static_cast<int>(std::llround(cy / scale));
    int x0 = ckx - side / 2;
    int y0 = cky - side / 2;
    if (clamp_to_fit) {
      x0 = std::min(std::max(x0, 0), level.width - side);
      y0 = std::min(std::max(y0, 0), level.height - side);
    }
    if (x0 < 0 || y0 < 0 || x0 + side > level.width ||
        y0 + side > level.height) {
      throw SizingError("multiscale_patch: side " + std::to_string(side) +
                        " at center (" + std::to_string(cx) + "," +
                        std::to_string(cy) + ") falls outside level " +
                        std::to_string(k) + " (" + std::to_string(level.width) +
                        "x" + std::to_string(level.height) + ")");
    }
    Patch p = normalize_patch(extract_patch(level, x0, y0, side));
    msp.joint.segment(off, p.v.size()) = p.v;
    off += p.v.size();
    msp.levels.push_back(std::move(p));
  }
  return msp;
}

}  // namespace msfl
