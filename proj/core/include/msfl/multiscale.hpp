#pragma once

#include <optional>
#include <vector>

#include "msfl/s3c.hpp"
#include "msfl/scalespace.hpp"

namespace msfl {

// Stacked multi-scale coder: an independent spike-and-slab model per blur
// width, codes concatenated scale by scale. With tied=true a single
// parameter set is shared across all scales.
struct S4CModel {
  std::vector<S3CParams> scales;  // per sigma; single entry when tied
  ScaleConfig config;             // blur-stack
  int patch_side = 12;
  bool tied = false;

  int scale_count() const { return config.scale_count(); }
  const S3CParams& scale_params(int j) const {
    return scales[tied ? 0 : static_cast<std::size_t>(j)];
  }
  int code_dim() const { return scale_count() * scales[0].dict_size(); }
};

// Joint multi-scale coder: one spike-and-slab model over patches stacked
// across pyramid levels, optionally paired with a base-scale color model.
struct MS4CModel {
  S3CParams joint;     // visible dimension levels * side^2
  ScaleConfig config;  // pyramid
  int patch_side = 12;
  std::optional<S3CParams> color;  // base-scale RGB companion

  int levels() const { return config.levels; }
};

struct S4CLearnConfig {
  std::vector<double> sigmas = {0.0, 1.0, 2.0};
  int patch_side = 12;
  int patches_per_scale = 5000;
  bool tied = false;
  S3CLearnConfig s3c;  // s3c.seed is the master seed
};

struct MS4CLearnConfig {
  int levels = 3;
  int patch_side = 12;
  int n_patches = 5000;
  bool with_color = false;
  S3CLearnConfig s3c;
};

// Per-scale pipeline: blur every (gray-converted) image with sigma_j, sample
// and standardize patches, train. Scale j draws its model seed from
// mix_seed(seed, 2j) and its sampling seed from mix_seed(seed, 2j+1), so a
// single-scale stack with sigma = {0} reproduces a plain single-scale run.
// tied=true pools the patches of all scales and trains one model.
S4CModel s4c_learn(const std::vector<Image>& images, const S4CLearnConfig& cfg);

// The sigma-blurred copies of one image, in scale order.
std::vector<Image> s4c_blur_stack(const S4CModel& m, const Image& img);

// Code of the patch at origin (x0, y0): block j is the scale-j code of the
// standardized patch cut from stack[j].
Eigen::VectorXd s4c_encode_stack(const S4CModel& m,
                                 const std::vector<Image>& stack, int x0,
                                 int y0, int max_sweeps = 50,
                                 double tol = 1e-5);

// Convenience wrapper around s4c_blur_stack + s4c_encode_stack for the
// patch centered at (cx, cy).
Eigen::VectorXd s4c_encode(const S4CModel& m, const Image& img, int cx,
                           int cy, int max_sweeps = 50, double tol = 1e-5);

// Samples pyramid-stacked joint patches from the (gray-converted) images
// and trains a single model over them; with_color additionally trains the
// base-scale companion on raw RGB patches (images must have 3 channels).
MS4CModel ms4c_learn(const std::vector<Image>& images,
                     const MS4CLearnConfig& cfg);

// Inclusive center range [lo, hi] along one axis such that the multi-scale
// patch fits at every pyramid level; lo > hi when nothing fits.
std::pair<int, int> ms4c_center_range(int image_side, int patch_side,
                                      int levels);

// Joint code of the multi-scale patch centered at (cx, cy) of the prebuilt
// pyramid; color_img supplies the base-scale RGB block when with_color.
Eigen::VectorXd ms4c_encode_pyramid(const MS4CModel& m,
                                    const std::vector<Image>& pyramid,
                                    const Image* color_img, int cx, int cy,
                                    bool with_color, bool clamp_to_fit = false,
                                    int max_sweeps = 50, double tol = 1e-5);

// Convenience wrapper building the pyramid internally.
Eigen::VectorXd ms4c_encode(const MS4CModel& m, const Image& img, int cx,
                            int cy, bool with_color = false,
                            int max_sweeps = 50, double tol = 1e-5);

}  // namespace msfl
