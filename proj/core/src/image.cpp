#include "msfl/image.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <cstdio>
#include <string>

#include "msfl/errors.hpp"
#include "msfl/rng.hpp"

namespace msfl {

void log_warn(const std::string& msg) {
  std::fprintf(stderr, "[msfl] warning: %s\n", msg.c_str());
}

void validate_image(const Image& img, const std::string& name) {
  if (img.width <= 0 || img.height <= 0 ||
      (img.channels != 1 && img.channels != 3)) {
    throw ConfigError(name + ": bad dimensions " + std::to_string(img.width) +
                      "x" + std::to_string(img.height) + "x" +
                      std::to_string(img.channels));
  }
  const std::size_t expect =
      static_cast<std::size_t>(img.width) * img.height * img.channels;
  if (img.pixels.size() != expect) {
    throw ConfigError(name + ": pixel count " +
                      std::to_string(img.pixels.size()) + " != " +
                      std::to_string(expect));
  }
  for (double p : img.pixels) {
    if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
      throw ConfigError(name + ": intensity " + std::to_string(p) +
                        " outside [0,1]");
    }
  }
}

Patch extract_patch(const Image& img, int x0, int y0, int side) {
  if (x0 < 0 || y0 < 0 || x0 + side > img.width || y0 + side > img.height) {
    throw SizingError("extract_patch: window " + std::to_string(side) + "x" +
                      std::to_string(side) + " at (" + std::to_string(x0) +
                      ", " + std::to_string(y0) + ") leaves the " +
                      std::to_string(img.width) + "x" +
                      std::to_string(img.height) + " image");
  }
  Patch p;
  p.side = side;
  p.channels = img.channels;
  p.v.resize(p.dim());
  int k = 0;
  for (int y = 0; y < side; ++y)
    for (int x = 0; x < side; ++x)
      for (int c = 0; c < img.channels; ++c)
        p.v[k++] = img.at(x0 + x, y0 + y, c);
  return p;
}

std::vector<Patch> sample_random_patches(const std::vector<Image>& images,
                                         int side, int n, std::uint64_t seed) {
  if (images.empty()) throw ConfigError("sample_random_patches: no images");
  if (n < 1) throw ConfigError("sample_random_patches: n must be >= 1");
  const int ch = images[0].channels;
  for (std::size_t i = 0; i < images.size(); ++i) {
    const Image& img = images[i];
    if (img.width < side || img.height < side) {
      throw SizingError("image " + std::to_string(i) + " (" +
                        std::to_string(img.width) + "x" +
                        std::to_string(img.height) +
                        ") is smaller than patch side " + std::to_string(side));
    }
    if (img.channels != ch) {
      throw ConfigError("image " + std::to_string(i) +
                        " channel count differs from image 0");
    }
  }
  Rng rng(seed);
  std::vector<Patch> out;
  out.reserve(n);
  for (int k = 0; k < n; ++k) {
    const Image& img = images[rng.uniform_int(images.size())];
    const int x0 = static_cast<int>(rng.uniform_int(img.width - side + 1));
    const int y0 = static_cast<int>(rng.uniform_int(img.height - side + 1));
    out.push_back(extract_patch(img, x0, y0, side));
  }
  return out;
}

PatchGrid extract_grid(const Image& img, int side, int stride) {
  if (stride < 1) throw ConfigError("extract_grid: stride must be >= 1");
  if (side > img.width || side > img.height) {
    throw SizingError("extract_grid: patch side " + std::to_string(side) +
                      " exceeds image " + std::to_string(img.width) + "x" +
                      std::to_string(img.height));
  }
  PatchGrid g;
  g.side = side;
  g.stride = stride;
  g.cols = (img.width - side) / stride + 1;
  g.rows = (img.height - side) / stride + 1;
  g.origins.reserve(static_cast<std::size_t>(g.rows) * g.cols);
  g.patches.reserve(static_cast<std::size_t>(g.rows) * g.cols);
  for (int r = 0; r < g.rows; ++r) {
    for (int c = 0; c < g.cols; ++c) {
      const int x0 = c * stride;
      const int y0 = r * stride;
      g.origins.emplace_back(x0, y0);
      g.patches.push_back(extract_patch(img, x0, y0, side));
    }
  }
  return g;
}

Eigen::VectorXd normalize_vector(const Eigen::VectorXd& v, double eps) {
  if (eps <= 0.0) throw ConfigError("normalize: eps must be > 0");
  const double mean = v.mean();
  const double var = (v.array() - mean).square().mean();
  const double sd = std::sqrt(var);
  if (sd <= eps) return Eigen::VectorXd::Zero(v.size());
  return (v.array() - mean) / sd;
}

Patch normalize_patch(const Patch& p, double eps) {
  Patch out = p;
  out.v = normalize_vector(p.v, eps);
  return out;
}

Image to_grayscale(const Image& img) {
  if (img.channels == 1) return img;
  if (img.channels != 3) throw ConfigError("to_grayscale: expected 1 or 3 channels");
  Image out = Image::zeros(img.width, img.height, 1);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      double g = 0.299 * img.at(x, y, 0) + 0.587 * img.at(x, y, 1) +
                 0.114 * img.at(x, y, 2);
      out.at(x, y) = std::min(1.0, std::max(0.0, g));
    }
  }
  return out;
}

ZcaTransform zca_fit(const Eigen::MatrixXd& patches, double eps) {
  if (patches.cols() < 2) throw ConfigError("zca_fit: need at least 2 patches");
  ZcaTransform z;
  z.mean = patches.rowwise().mean();
  Eigen::MatrixXd centered = patches.colwise() - z.mean;
  Eigen::MatrixXd cov =
      centered * centered.transpose() / static_cast<double>(patches.cols());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  Eigen::VectorXd scale =
      (es.eigenvalues().array().max(0.0) + eps).rsqrt().matrix();
  z.transform = es.eigenvectors() * scale.asDiagonal() *
                es.eigenvectors().transpose();
  return z;
}

Eigen::VectorXd zca_apply(const ZcaTransform& z, const Eigen::VectorXd& v) {
  if (v.size() != z.mean.size())
    throw ConfigError("zca_apply: dimension mismatch");
  return z.transform * (v - z.mean);
}

Eigen::MatrixXd patches_to_matrix(const std::vector<Patch>& patches) {
  if (patches.empty()) throw ConfigError("patches_to_matrix: empty list");
  Eigen::MatrixXd X(patches[0].v.size(), patches.size());
  for (std::size_t i = 0; i < patches.size(); ++i) {
    if (patches[i].v.size() != X.rows())
      throw ConfigError("patches_to_matrix: inconsistent patch dimensions");
    X.col(static_cast<Eigen::Index>(i)) = patches[i].v;
  }
  return X;
}

Eigen::MatrixXd normalized_patch_matrix(const std::vector<Patch>& patches,
                                        double eps) {
  Eigen::MatrixXd X = patches_to_matrix(patches);
  for (Eigen::Index c = 0; c < X.cols(); ++c)
    X.col(c) = normalize_vector(X.col(c), eps);
  return X;
}

}  // namespace msfl
