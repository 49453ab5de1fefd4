#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "msfl/image.hpp"
#include "msfl/rng.hpp"

namespace msfl {

// Procedural texture benchmark. Four classes by default, drawn from three
// texture families (class id modulo 3): oriented stripes, rotated
// checkerboards and Gaussian blob fields. Classes sharing a family differ in
// frequency and orientation. Every image gets per-image jitter in rotation,
// phase and brightness, and a per-image scale factor that stretches the
// texture. Train images always use scales in [1.0, 1.3]. With disjoint_scale
// the test images use [1.5, 2.0] instead, so single-scale models meet
// textures coarser than anything they trained on.
struct SynthSpec {
  int classes = 4;
  int per_class_train = 50;
  int per_class_test = 50;
  int side = 64;
  std::uint64_t seed = 0;
  bool disjoint_scale = false;
};

struct SynthCorpus {
  std::vector<Image> train_images;
  std::vector<int> train_labels;
  std::vector<Image> test_images;
  std::vector<int> test_labels;
  std::vector<std::string> class_names;
};

// Renders one texture of the given class at the given scale. The rng drives
// all jitter for this image.
Image synth_image(const SynthSpec& spec, int class_id, double scale, Rng& rng);

// Full corpus in memory. Image k (train first, then test, each ordered by
// class then index) is rendered from Rng(mix_seed(seed, k)), so any prefix of
// the corpus is independent of the rest of the spec counts. Pixels are
// quantized to 1/255 steps, which makes the in-memory corpus identical to a
// PGM round trip.
SynthCorpus synth_corpus(const SynthSpec& spec);

// Writes the corpus as out_dir/{train,test}/<class>/img_NNNN.pgm plus a
// manifest.json describing the split.
void synth_generate(const SynthSpec& spec, const std::string& out_dir);

}  // namespace msfl
