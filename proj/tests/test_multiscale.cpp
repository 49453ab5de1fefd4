#include <doctest.h>

#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "msfl/errors.hpp"
#include "msfl/multiscale.hpp"
#include "msfl/scalespace.hpp"

using namespace msfl;
using namespace msfl::test;

namespace {

std::vector<Image> random_images(int count, int side, Rng& rng,
                                 int channels = 1) {
  std::vector<Image> images;
  for (int i = 0; i < count; ++i)
    images.push_back(random_quantized_image(side, side, rng, channels));
  return images;
}

S3CLearnConfig tiny_s3c(int dict, std::uint64_t seed) {
  S3CLearnConfig cfg;
  cfg.dict_size = dict;
  cfg.epochs = 2;
  cfg.batch_size = 40;
  cfg.estep_sweeps = 20;
  cfg.estep_tol = 1e-4;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_SUITE("multiscale") {

TEST_CASE("a single zero-sigma scale degenerates to the plain pipeline") {
  Rng rng(71);
  const std::vector<Image> images = random_images(3, 20, rng);
  S4CLearnConfig cfg;
  cfg.sigmas = {0.0};
  cfg.patch_side = 6;
  cfg.patches_per_scale = 80;
  cfg.s3c = tiny_s3c(5, 17);
  const S4CModel model = s4c_learn(images, cfg);
  REQUIRE(model.scales.size() == 1);

  const auto patches =
      sample_random_patches(images, 6, 80, mix_seed(17, 1));
  S3CLearnConfig plain = tiny_s3c(5, 17);
  const S3CLearnResult ref = s3c_learn(normalized_patch_matrix(patches), plain);
  CHECK(model.scales[0].W == ref.params.W);
  CHECK(model.scales[0].b == ref.params.b);
  CHECK(model.scales[0].beta == ref.params.beta);
}

TEST_CASE("stack codes are the per-scale codes of the blurred copies") {
  Rng rng(72);
  const std::vector<Image> images = random_images(3, 24, rng);
  S4CLearnConfig cfg;
  cfg.sigmas = {0.0, 1.0, 2.0};
  cfg.patch_side = 6;
  cfg.patches_per_scale = 60;
  cfg.s3c = tiny_s3c(4, 3);
  const S4CModel model = s4c_learn(images, cfg);
  CHECK(model.code_dim() == 12);
  REQUIRE(model.scales.size() == 3);

  const Image& img = images[0];
  const auto stack = s4c_blur_stack(model, img);
  REQUIRE(stack.size() == 3);
  for (int j = 0; j < 3; ++j) {
    const Image ref = gaussian_blur(img, cfg.sigmas[j]);
    CHECK(stack[j].pixels == ref.pixels);
  }

  const Eigen::VectorXd code = s4c_encode(model, img, 11, 9);
  REQUIRE(code.size() == 12);
  for (int j = 0; j < 3; ++j) {
    const Patch patch = normalize_patch(extract_patch(stack[j], 8, 6, 6));
    const Eigen::VectorXd block =
        s3c_encode(model.scale_params(j), patch.v, S3CCode::Spike, 50, 1e-5);
    CHECK(code.segment(4 * j, 4) == block);
  }
}

TEST_CASE("tied stacks reuse one dictionary across scales") {
  Rng rng(73);
  const std::vector<Image> images = random_images(3, 20, rng);
  S4CLearnConfig cfg;
  cfg.sigmas = {0.0, 1.5};
  cfg.patch_side = 6;
  cfg.patches_per_scale = 50;
  cfg.tied = true;
  cfg.s3c = tiny_s3c(4, 5);
  const S4CModel model = s4c_learn(images, cfg);
  CHECK(model.tied);
  CHECK(model.scales.size() == 1);
  CHECK(model.code_dim() == 8);
  CHECK(&model.scale_params(0) == &model.scale_params(1));
}

TEST_CASE("center ranges match a brute-force fit check") {
  Rng rng(74);
  for (int side : {8, 13, 21, 32}) {
    const Image img = random_quantized_image(side, side, rng);
    for (int levels : {1, 2, 3}) {
      const auto pyramid = build_pyramid(img, levels);
      for (int p : {4, 6}) {
        const auto [lo, hi] = ms4c_center_range(side, p, levels);
        for (int c = 0; c < side; ++c) {
          bool fits = true;
          try {
            multiscale_patch(pyramid, c, c, p);
          } catch (const SizingError&) {
            fits = false;
          }
          CHECK(fits == (c >= lo && c <= hi));
        }
      }
    }
  }
}

TEST_CASE("a one-level joint model encodes like a plain coder") {
  Rng rng(75);
  const std::vector<Image> images = random_images(3, 18, rng);
  MS4CLearnConfig cfg;
  cfg.levels = 1;
  cfg.patch_side = 6;
  cfg.n_patches = 60;
  cfg.s3c = tiny_s3c(4, 9);
  const MS4CModel model = ms4c_learn(images, cfg);
  CHECK(model.levels() == 1);
  CHECK(!model.color.has_value());

  const Image& img = images[1];
  const Eigen::VectorXd code = ms4c_encode(model, img, 9, 8);
  const Patch patch = normalize_patch(extract_patch(img, 6, 5, 6));
  const Eigen::VectorXd ref =
      s3c_encode(model.joint, patch.v, S3CCode::Spike, 50, 1e-5);
  CHECK(code == ref);
}

TEST_CASE("joint codes stack pyramid levels") {
  Rng rng(76);
  const std::vector<Image> images = random_images(3, 32, rng);
  MS4CLearnConfig cfg;
  cfg.levels = 2;
  cfg.patch_side = 6;
  cfg.n_patches = 60;
  cfg.s3c = tiny_s3c(5, 13);
  const MS4CModel model = ms4c_learn(images, cfg);
  CHECK(model.joint.input_dim() == 72);

  const auto pyramid = build_pyramid(images[0], 2);
  const Eigen::VectorXd code =
      ms4c_encode_pyramid(model, pyramid, nullptr, 15, 15, false);
  const MultiScalePatch mp = multiscale_patch(pyramid, 15, 15, 6);
  const Eigen::VectorXd ref =
      s3c_encode(model.joint, mp.joint, S3CCode::Spike, 50, 1e-5);
  CHECK(code == ref);
}

TEST_CASE("color companions require color input and a color model") {
  Rng rng(77);
  const std::vector<Image> gray = random_images(2, 24, rng);
  MS4CLearnConfig cfg;
  cfg.levels = 2;
  cfg.patch_side = 6;
  cfg.n_patches = 40;
  cfg.with_color = true;
  cfg.s3c = tiny_s3c(4, 2);
  CHECK_THROWS_AS(ms4c_learn(gray, cfg), ConfigError);

  const std::vector<Image> color = random_images(2, 24, rng, 3);
  const MS4CModel model = ms4c_learn(color, cfg);
  REQUIRE(model.color.has_value());
  CHECK(model.color->input_dim() == 108);

  const Eigen::VectorXd code = ms4c_encode(model, color[0], 12, 12, true);
  CHECK(code.size() == 4 + model.color->dict_size());

  cfg.with_color = false;
  const MS4CModel plain = ms4c_learn(color, cfg);
  CHECK_THROWS_AS(ms4c_encode(plain, color[0], 12, 12, true), ConfigError);
}

TEST_CASE("images too small for the pyramid are rejected") {
  Rng rng(78);
  const std::vector<Image> tiny = random_images(2, 8, rng);
  MS4CLearnConfig cfg;
  cfg.levels = 3;
  cfg.patch_side = 6;
  cfg.n_patches = 20;
  cfg.s3c = tiny_s3c(3, 1);
  CHECK_THROWS_AS(ms4c_learn(tiny, cfg), SizingError);
}

}  // TEST_SUITE
