#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "msfl/errors.hpp"
#include "msfl/image.hpp"

using namespace msfl;

namespace {

Image ramp_image(int w, int h) {
  Image img = Image::zeros(w, h, 1);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      img.at(x, y) = static_cast<double>(y * w + x) / (w * h);
  return img;
}

}  // namespace

TEST_SUITE("image") {

TEST_CASE("extract_patch copies the window row-major") {
  const Image img = ramp_image(4, 4);
  const Patch p = extract_patch(img, 1, 2, 2);
  CHECK(p.side == 2);
  CHECK(p.v.size() == 4);
  CHECK(p.v[0] == img.at(1, 2));
  CHECK(p.v[1] == img.at(2, 2));
  CHECK(p.v[2] == img.at(1, 3));
  CHECK(p.v[3] == img.at(2, 3));
}

TEST_CASE("extract_patch rejects windows off the image") {
  const Image img = ramp_image(4, 4);
  CHECK_THROWS_AS(extract_patch(img, 3, 0, 2), SizingError);
  CHECK_THROWS_AS(extract_patch(img, -1, 0, 2), SizingError);
  CHECK_THROWS_AS(extract_patch(img, 0, 0, 5), SizingError);
}

TEST_CASE("extract_grid covers the image row-major") {
  const Image img = ramp_image(10, 7);
  const PatchGrid grid = extract_grid(img, 3, 2);
  CHECK(grid.cols == (10 - 3) / 2 + 1);
  CHECK(grid.rows == (7 - 3) / 2 + 1);
  REQUIRE(grid.patches.size() == static_cast<std::size_t>(grid.rows) * grid.cols);
  for (std::size_t i = 0; i < grid.origins.size(); ++i) {
    const auto [x0, y0] = grid.origins[i];
    CHECK(x0 == static_cast<int>(i) % grid.cols * 2);
    CHECK(y0 == static_cast<int>(i) / grid.cols * 2);
    const Patch ref = extract_patch(img, x0, y0, 3);
    CHECK(grid.patches[i].v == ref.v);
  }
}

TEST_CASE("sample_random_patches draws valid deterministic patches") {
  std::vector<Image> images = {ramp_image(9, 9), ramp_image(12, 6)};
  const auto a = sample_random_patches(images, 4, 25, 7);
  const auto b = sample_random_patches(images, 4, 25, 7);
  REQUIRE(a.size() == 25);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].side == 4);
    CHECK(a[i].v == b[i].v);
  }
  const auto c = sample_random_patches(images, 4, 25, 8);
  int same = 0;
  for (std::size_t i = 0; i < c.size(); ++i) same += a[i].v == c[i].v;
  CHECK(same < 20);
}

TEST_CASE("sample_random_patches rejects oversized patches") {
  std::vector<Image> images = {ramp_image(9, 9), ramp_image(5, 5)};
  CHECK_THROWS_AS(sample_random_patches(images, 6, 3, 0), SizingError);
  CHECK_THROWS_AS(sample_random_patches({}, 2, 3, 0), ConfigError);
}

TEST_CASE("normalize_patch standardizes with the population convention") {
  Patch p;
  p.side = 2;
  p.channels = 1;
  p.v.resize(4);
  p.v << 1.0, 2.0, 3.0, 6.0;
  const Patch n = normalize_patch(p);
  const double mean = p.v.mean();
  const double var = (p.v.array() - mean).square().sum() / 4.0;
  for (int i = 0; i < 4; ++i)
    CHECK(n.v[i] == doctest::Approx((p.v[i] - mean) / std::sqrt(var)).epsilon(1e-12));
  CHECK(std::abs(n.v.mean()) < 1e-12);
  CHECK(n.v.squaredNorm() / 4.0 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("constant patches standardize to zero") {
  Patch p;
  p.side = 2;
  p.channels = 1;
  p.v = Eigen::VectorXd::Constant(4, 0.7);
  CHECK(normalize_patch(p).v.isZero(0.0));
}

TEST_CASE("to_grayscale uses BT.601 weights and passes gray through") {
  Image color = Image::zeros(2, 1, 3);
  color.at(0, 0, 0) = 1.0;
  color.at(1, 0, 0) = 0.2;
  color.at(1, 0, 1) = 0.4;
  color.at(1, 0, 2) = 0.8;
  const Image gray = to_grayscale(color);
  CHECK(gray.channels == 1);
  CHECK(gray.at(0, 0) == doctest::Approx(0.299).epsilon(1e-12));
  CHECK(gray.at(1, 0) ==
        doctest::Approx(0.299 * 0.2 + 0.587 * 0.4 + 0.114 * 0.8).epsilon(1e-12));
  const Image g = ramp_image(3, 3);
  const Image g2 = to_grayscale(g);
  CHECK(g2.pixels == g.pixels);
}

TEST_CASE("validate_image flags bad pixels and bad geometry") {
  Image img = ramp_image(3, 3);
  CHECK_NOTHROW(validate_image(img));
  img.at(1, 1) = 1.5;
  CHECK_THROWS_AS(validate_image(img), ConfigError);
  img.at(1, 1) = std::nan("");
  CHECK_THROWS_AS(validate_image(img), ConfigError);
  img.at(1, 1) = 0.5;
  img.pixels.pop_back();
  CHECK_THROWS_AS(validate_image(img), ConfigError);
}

TEST_CASE("zca whitening decorrelates standardized patches") {
  Rng rng(11);
  const int dim = 16;
  const int n = 4000;
  Eigen::MatrixXd base = Eigen::MatrixXd::Zero(dim, n);
  Eigen::MatrixXd mix(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) mix(i, j) = rng.normal() * 0.4;
  for (int c = 0; c < n; ++c)
    base.col(c) = mix * test::random_normal_vector(dim, rng);
  // With a tiny eps the fit whitens its own sample almost exactly; a larger
  // eps only shrinks small eigenvalues toward zero, which the last check
  // bounds by lambda / (lambda + eps).
  const ZcaTransform z = zca_fit(base, 1e-8);
  CHECK((z.transform - z.transform.transpose()).cwiseAbs().maxCoeff() < 1e-8);
  Eigen::MatrixXd white(dim, n);
  for (int c = 0; c < n; ++c) white.col(c) = zca_apply(z, base.col(c));
  const Eigen::VectorXd mean = white.rowwise().mean();
  CHECK(mean.cwiseAbs().maxCoeff() < 1e-10);
  const Eigen::MatrixXd cov = white * white.transpose() / n;
  CHECK((cov - Eigen::MatrixXd::Identity(dim, dim)).cwiseAbs().maxCoeff() <
        1e-4);
  const ZcaTransform soft = zca_fit(base, 1e-3);
  Eigen::MatrixXd soft_white(dim, n);
  for (int c = 0; c < n; ++c) soft_white.col(c) = zca_apply(soft, base.col(c));
  const Eigen::MatrixXd soft_cov = soft_white * soft_white.transpose() / n;
  const double worst =
      (soft_cov - Eigen::MatrixXd::Identity(dim, dim)).cwiseAbs().maxCoeff();
  CHECK(worst < 1.0);
  CHECK(soft_cov.diagonal().maxCoeff() < 1.0 + 1e-8);
}

TEST_CASE("patch matrices stack columns in order") {
  std::vector<Image> images = {ramp_image(8, 8)};
  const auto patches = sample_random_patches(images, 3, 5, 1);
  const Eigen::MatrixXd M = patches_to_matrix(patches);
  REQUIRE(M.rows() == 9);
  REQUIRE(M.cols() == 5);
  for (int c = 0; c < 5; ++c) CHECK(M.col(c) == patches[c].v);
  const Eigen::MatrixXd N = normalized_patch_matrix(patches);
  for (int c = 0; c < 5; ++c)
    CHECK(N.col(c) == normalize_patch(patches[c]).v);
}

}  // TEST_SUITE
