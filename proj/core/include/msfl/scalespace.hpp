#pragma once

#include <vector>

#include "msfl/image.hpp"

namespace msfl {

// Scale structure used by the multi-scale coders: either a stack of
// progressively blurred copies at full resolution, or a half-sampled pyramid.
struct ScaleConfig {
  enum class Mode { BlurStack, Pyramid };
  Mode mode = Mode::BlurStack;
  std::vector<double> sigmas;  // blur-stack: strictly increasing, >= 0
  int levels = 1;              // pyramid: M >= 1, downsample factor 2

  int scale_count() const {
    return mode == Mode::BlurStack ? static_cast<int>(sigmas.size()) : levels;
  }
  void validate() const;
};

// One patch observed at every scale level, plus the concatenated joint
// vector of dimension M * side^2 (levels standardized independently).
struct MultiScalePatch {
  int side = 0;
  std::vector<Patch> levels;
  Eigen::VectorXd joint;
};

// Separable Gaussian convolution, kernel truncated at radius ceil(3*sigma)
// and renormalized, reflecting at borders. sigma = 0 is the identity.
// Constant images pass through bit-exact.
Image gaussian_blur(const Image& img, double sigma);

// Level 0 is the input; each next level blurs with sigma = 1 and keeps every
// second pixel per axis, so level k has sides ceil(side / 2^k).
std::vector<Image> build_pyramid(const Image& img, int levels);

// Extracts the side x side patch around the geometrically corresponding
// center at every pyramid level (center / 2^k, rounded to nearest) and
// standardizes each level independently. Throws SizingError when a level's
// patch does not fit. clamp_to_fit shifts out-of-range origins inward
// instead, for dense whole-image encoding.
MultiScalePatch multiscale_patch(const std::vector<Image>& pyramid, int cx,
                                 int cy, int side, bool clamp_to_fit = false);

}  // namespace msfl
