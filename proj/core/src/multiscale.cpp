#include "msfl/multiscale.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "msfl/errors.hpp"
#include "msfl/rng.hpp"

namespace msfl {

static std::vector<Image> gray_all(const std::vector<Image>& images) {
  std::vector<Image> out;
  out.reserve(images.size());
  for (const Image& img : images) out.push_back(to_grayscale(img));
  return out;
}

S4CModel s4c_learn(const std::vector<Image>& images, const S4CLearnConfig& cfg) {
  if (cfg.sigmas.empty()) throw ConfigError("s4c_learn: no sigmas");
  if (images.empty()) throw ConfigError("s4c_learn: no images");
  const int m = static_cast<int>(cfg.sigmas.size());
  const std::uint64_t seed = cfg.s3c.seed;

  S4CModel model;
  model.config.mode = ScaleConfig::Mode::BlurStack;
  model.config.sigmas = cfg.sigmas;
  model.config.validate();
  model.patch_side = cfg.patch_side;
  model.tied = cfg.tied;

  const std::vector<Image> gray = gray_all(images);
  Eigen::MatrixXd pooled;
  for (int j = 0; j < m; ++j) {
    std::vector<Image> blurred;
    blurred.reserve(gray.size());
    for (const Image& img : gray)
      blurred.push_back(gaussian_blur(img, cfg.sigmas[j]));
    const std::vector<Patch> patches =
        sample_random_patches(blurred, cfg.patch_side, cfg.patches_per_scale,
                              mix_seed(seed, 2 * j + 1));
    const Eigen::MatrixXd X = normalized_patch_matrix(patches);
    if (cfg.tied) {
      const Eigen::Index base = pooled.cols();
      pooled.conservativeResize(X.rows(), base + X.cols());
      pooled.rightCols(X.cols()) = X;
    } else {
      S3CLearnConfig sub = cfg.s3c;
      sub.seed = mix_seed(seed, 2 * j);
      model.scales.push_back(s3c_learn(X, sub).params);
    }
  }
  if (cfg.tied) {
    S3CLearnConfig sub = cfg.s3c;
    model.scales.push_back(s3c_learn(pooled, sub).params);
  }
  return model;
}

std::vector<Image> s4c_blur_stack(const S4CModel& m, const Image& img) {
  const Image gray = to_grayscale(img);
  std::vector<Image> stack;
  stack.reserve(m.config.sigmas.size());
  for (double sigma : m.config.sigmas)
    stack.push_back(gaussian_blur(gray, sigma));
  return stack;
}

Eigen::VectorXd s4c_encode_stack(const S4CModel& m,
                                 const std::vector<Image>& stack, int x0,
                                 int y0, int max_sweeps, double tol) {
  const int scales = m.scale_count();
  if (static_cast<int>(stack.size()) != scales)
    throw ConfigError("s4c_encode_stack: stack size does not match model");
  const int n = m.scales[0].dict_size();
  Eigen::VectorXd code(scales * n);
  for (int j = 0; j < scales; ++j) {
    const Patch patch =
        normalize_patch(extract_patch(stack[j], x0, y0, m.patch_side));
    code.segment(static_cast<Eigen::Index>(j) * n, n) =
        s3c_encode(m.scale_params(j), patch.v, S3CCode::Spike, max_sweeps, tol);
  }
  return code;
}

Eigen::VectorXd s4c_encode(const S4CModel& m, const Image& img, int cx,
                           int cy, int max_sweeps, double tol) {
  return s4c_encode_stack(m, s4c_blur_stack(m, img), cx - m.patch_side / 2,
                          cy - m.patch_side / 2, max_sweeps, tol);
}

std::pair<int, int> ms4c_center_range(int image_side, int patch_side,
                                      int levels) {
  int lo = image_side, hi = -1;
  for (int c = 0; c < image_side; ++c) {
    bool ok = true;
    int side = image_side;
    for (int k = 0; k < levels; ++k) {
      const int ck = static_cast<int>(std::llround(c / std::pow(2.0, k)));
      if (ck - patch_side / 2 < 0 || ck - patch_side / 2 + patch_side > side) {
        ok = false;
        break;
      }
      side = (side + 1) / 2;
    }
    if (ok) {
      lo = std::min(lo, c);
      hi = std::max(hi, c);
    }
  }
  return {lo, hi};
}

MS4CModel ms4c_learn(const std::vector<Image>& images,
                     const MS4CLearnConfig& cfg) {
  if (images.empty()) throw ConfigError("ms4c_learn: no images");
  const int p = cfg.patch_side;
  const std::uint64_t seed = cfg.s3c.seed;

  MS4CModel model;
  model.config.mode = ScaleConfig::Mode::Pyramid;
  model.config.levels = cfg.levels;
  model.config.validate();
  model.patch_side = p;

  const std::vector<Image> gray = gray_all(images);
  std::vector<std::vector<Image>> pyramids;
  std::vector<std::pair<int, int>> xr, yr;
  pyramids.reserve(gray.size());
  for (std::size_t i = 0; i < gray.size(); ++i) {
    pyramids.push_back(build_pyramid(gray[i], cfg.levels));
    xr.push_back(ms4c_center_range(gray[i].width, p, cfg.levels));
    yr.push_back(ms4c_center_range(gray[i].height, p, cfg.levels));
    if (xr.back().first > xr.back().second ||
        yr.back().first > yr.back().second)
      throw SizingError("ms4c_learn: image " + std::to_string(i) +
                        " too small for a " + std::to_string(cfg.levels) +
                        "-level patch of side " + std::to_string(p));
  }

  Rng rng(mix_seed(seed, 1));
  Eigen::MatrixXd X(cfg.levels * p * p, cfg.n_patches);
  for (int t = 0; t < cfg.n_patches; ++t) {
    const std::size_t i = rng.uniform_int(gray.size());
    const int cx =
        xr[i].first +
        static_cast<int>(rng.uniform_int(xr[i].second - xr[i].first + 1));
    const int cy =
        yr[i].first +
        static_cast<int>(rng.uniform_int(yr[i].second - yr[i].first + 1));
    X.col(t) = multiscale_patch(pyramids[i], cx, cy, p).joint;
  }
  S3CLearnConfig sub = cfg.s3c;
  model.joint = s3c_learn(X, sub).params;

  if (cfg.with_color) {
    for (std::size_t i = 0; i < images.size(); ++i)
      if (images[i].channels != 3)
        throw ConfigError("ms4c_learn: color companion needs RGB images, "
                          "image " + std::to_string(i) + " has " +
                          std::to_string(images[i].channels) + " channel(s)");
    const std::vector<Patch> patches =
        sample_random_patches(images, p, cfg.n_patches, mix_seed(seed, 2));
    S3CLearnConfig csub = cfg.s3c;
    csub.seed = mix_seed(seed, 3);
    model.color = s3c_learn(normalized_patch_matrix(patches), csub).params;
  }
  return model;
}

Eigen::VectorXd ms4c_encode_pyramid(const MS4CModel& m,
                                    const std::vector<Image>& pyramid,
                                    const Image* color_img, int cx, int cy,
                                    bool with_color, bool clamp_to_fit,
                                    int max_sweeps, double tol) {
  if (with_color && !m.color)
    throw ConfigError("ms4c_encode: no color companion in this model");
  const MultiScalePatch msp =
      multiscale_patch(pyramid, cx, cy, m.patch_side, clamp_to_fit);
  const Eigen::VectorXd joint =
      s3c_encode(m.joint, msp.joint, S3CCode::Spike, max_sweeps, tol);
  if (!with_color) return joint;

  if (!color_img || color_img->channels != 3)
    throw ConfigError("ms4c_encode: color encoding needs an RGB image");
  const int p = m.patch_side;
  int x0 = cx - p / 2, y0 = cy - p / 2;
  if (clamp_to_fit) {
    x0 = std::clamp(x0, 0, color_img->width - p);
    y0 = std::clamp(y0, 0, color_img->height - p);
  }
  const Patch patch = normalize_patch(extract_patch(*color_img, x0, y0, p));
  const Eigen::VectorXd ccode =
      s3c_encode(*m.color, patch.v, S3CCode::Spike, max_sweeps, tol);
  Eigen::VectorXd out(joint.size() + ccode.size());
  out << joint, ccode;
  return out;
}

Eigen::VectorXd ms4c_encode(const MS4CModel& m, const Image& img, int cx,
                            int cy, bool with_color, int max_sweeps,
                            double tol) {
  const Image gray = to_grayscale(img);
  const std::vector<Image> pyr = build_pyramid(gray, m.config.levels);
  return ms4c_encode_pyramid(m, pyr, &img, cx, cy, with_color, false,
                             max_sweeps, tol);
}

}  // namespace msfl
