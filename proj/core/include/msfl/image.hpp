#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

namespace msfl {

// Pixel grid with intensities in [0,1], row-major, channels interleaved.
struct Image {
  int width = 0;
  int height = 0;
  int channels = 1;  // 1 gray, 3 color
  std::vector<double> pixels;

  static Image zeros(int w, int h, int c = 1) {
    Image img;
    img.width = w;
    img.height = h;
    img.channels = c;
    img.pixels.assign(static_cast<std::size_t>(w) * h * c, 0.0);
    return img;
  }

  double at(int x, int y, int c = 0) const {
    return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  double& at(int x, int y, int c = 0) {
    return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }

  std::size_t size() const { return pixels.size(); }
};

// Throws ConfigError if dimensions and pixel count disagree or any intensity
// is non-finite or outside [0,1].
void validate_image(const Image& img, const std::string& name = "image");

// Square patch flattened to a visible vector v of dimension side^2 * channels,
// row-major with channels interleaved, matching Image layout.
struct Patch {
  int side = 0;
  int channels = 1;
  Eigen::VectorXd v;

  int dim() const { return side * side * channels; }
};

// Regular grid of patches covering an image. Origins are row-major
// (y outer, x inner) and patches[i] starts at origins[i].
struct PatchGrid {
  int side = 0;
  int stride = 0;
  int rows = 0;
  int cols = 0;
  std::vector<std::pair<int, int>> origins;  // (x, y)
  std::vector<Patch> patches;
};

// Copies the side*side window at (x0, y0) out of img. Throws SizingError
// when the window does not fit inside the image.
Patch extract_patch(const Image& img, int x0, int y0, int side);

// Draws n patches of the given side uniformly at random: uniform image pick,
// then uniform valid origin. Every image must be at least side x side and all
// images must share a channel count.
std::vector<Patch> sample_random_patches(const std::vector<Image>& images,
                                         int side, int n, std::uint64_t seed);

// All patches at origins {0, stride, 2*stride, ...} that fit, row-major.
// Count is (floor((w-p)/stride)+1) * (floor((h-p)/stride)+1).
PatchGrid extract_grid(const Image& img, int side, int stride);

// Per-patch standardization: subtract the mean, divide by the population
// standard deviation. Patches with std <= eps map to the zero vector.
Patch normalize_patch(const Patch& p, double eps = 1e-8);
Eigen::VectorXd normalize_vector(const Eigen::VectorXd& v, double eps = 1e-8);

// BT.601 luma: 0.299 R + 0.587 G + 0.114 B. Gray input passes through.
Image to_grayscale(const Image& img);

// Optional ZCA whitening, fit on standardized training patches.
// transform maps (v - mean) into the whitened space.
struct ZcaTransform {
  Eigen::VectorXd mean;
  Eigen::MatrixXd transform;  // D x D
};

ZcaTransform zca_fit(const Eigen::MatrixXd& patches, double eps = 1e-2);
Eigen::VectorXd zca_apply(const ZcaTransform& z, const Eigen::VectorXd& v);

// Stacks patches as columns of a D x n matrix.
Eigen::MatrixXd patches_to_matrix(const std::vector<Patch>& patches);

// Standardizes every patch and stacks the results as columns.
Eigen::MatrixXd normalized_patch_matrix(const std::vector<Patch>& patches,
                                        double eps = 1e-8);

}  // namespace msfl
