#include "msfl/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "msfl/dataset.hpp"
#include "msfl/errors.hpp"
#include "msfl/pnm.hpp"

namespace fs = std::filesystem;

namespace msfl {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Texture family of a class and the variant index among classes sharing
// that family. Classes 0 and 3 are both stripes but differ in frequency
// and base orientation through the variant index.
struct ClassStyle {
  int family = 0;   // 0 stripes, 1 checks, 2 blobs
  int variant = 0;  // class_id / 3
};

ClassStyle class_style(int class_id) {
  return {class_id % 3, class_id / 3};
}

const char* family_name(int family) {
  switch (family) {
    case 0: return "stripes";
    case 1: return "checks";
    default: return "blobs";
  }
}

double quantize(double v) {
  return std::round(std::clamp(v, 0.0, 1.0) * 255.0) / 255.0;
}

void render_stripes(Image& img, int variant, double scale, Rng& rng) {
  const double freq0 = variant == 0 ? 0.125 : 0.26;
  const double theta0 = 0.35 + 1.1 * variant;
  const double theta = theta0 + rng.uniform(-0.35, 0.35);
  const double phase = rng.uniform(0.0, 2.0 * kPi);
  const double freq = freq0 / scale;
  const double cx = std::cos(theta);
  const double sy = std::sin(theta);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      const double t = x * cx + y * sy;
      img.at(x, y) = 0.5 + 0.35 * std::sin(2.0 * kPi * freq * t + phase);
    }
}

void render_checks(Image& img, int variant, double scale, Rng& rng) {
  const double period = (5.0 + 4.0 * variant) * scale;
  const double theta0 = 0.2 + 0.8 * variant;
  const double theta = theta0 + rng.uniform(-0.35, 0.35);
  const double ox = rng.uniform(0.0, 1.0);
  const double oy = rng.uniform(0.0, 1.0);
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      const double u = (x * c + y * s) / period + ox;
      const double v = (-x * s + y * c) / period + oy;
      const long cell = std::lround(std::floor(u)) + std::lround(std::floor(v));
      img.at(x, y) = (cell & 1) ? 0.75 : 0.3;
    }
}

void render_blobs(Image& img, int variant, double scale, Rng& rng) {
  const double radius = (2.2 + 1.3 * variant) * scale;
  const double density = 0.02 / (1 + variant);
  const int side = img.width;
  const int count = std::max<int>(
      1, std::lround(density * side * side / (scale * scale)));
  std::vector<std::pair<double, double>> centers(count);
  for (auto& ctr : centers) {
    ctr.first = rng.uniform(0.0, side);
    ctr.second = rng.uniform(0.0, side);
  }
  const double inv = 1.0 / (2.0 * radius * radius);
  const double cutoff = 9.0 * radius * radius;  // 3 sigma support
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      double v = 0.15;
      for (const auto& ctr : centers) {
        const double dx = x - ctr.first;
        const double dy = y - ctr.second;
        const double d2 = dx * dx + dy * dy;
        if (d2 < cutoff) v += 0.75 * std::exp(-d2 * inv);
      }
      img.at(x, y) = v;
    }
}

}  // namespace

Image synth_image(const SynthSpec& spec, int class_id, double scale,
                  Rng& rng) {
  if (class_id < 0 || class_id >= spec.classes)
    throw ConfigError("synth class id out of range");
  if (spec.side < 8) throw ConfigError("synth image side must be at least 8");
  Image img = Image::zeros(spec.side, spec.side, 1);
  const ClassStyle style = class_style(class_id);
  switch (style.family) {
    case 0: render_stripes(img, style.variant, scale, rng); break;
    case 1: render_checks(img, style.variant, scale, rng); break;
    default: render_blobs(img, style.variant, scale, rng); break;
  }
  const double bright = rng.uniform(-0.08, 0.08);
  for (double& p : img.pixels) p = quantize(p + bright);
  return img;
}

SynthCorpus synth_corpus(const SynthSpec& spec) {
  if (spec.classes < 2) throw ConfigError("synth needs at least 2 classes");
  SynthCorpus corpus;
  for (int c = 0; c < spec.classes; ++c) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "c%02d_%s", c,
                  family_name(class_style(c).family));
    corpus.class_names.push_back(buf);
  }
  std::uint64_t index = 0;
  const auto render = [&spec, &index](int c, double lo, double hi) {
    Rng rng(mix_seed(spec.seed, index++));
    const double scale = rng.uniform(lo, hi);
    return synth_image(spec, c, scale, rng);
  };
  for (int c = 0; c < spec.classes; ++c)
    for (int i = 0; i < spec.per_class_train; ++i) {
      corpus.train_images.push_back(render(c, 1.0, 1.3));
      corpus.train_labels.push_back(c);
    }
  const double test_lo = spec.disjoint_scale ? 1.5 : 1.0;
  const double test_hi = spec.disjoint_scale ? 2.0 : 1.3;
  for (int c = 0; c < spec.classes; ++c)
    for (int i = 0; i < spec.per_class_test; ++i) {
      corpus.test_images.push_back(render(c, test_lo, test_hi));
      corpus.test_labels.push_back(c);
    }
  return corpus;
}

void synth_generate(const SynthSpec& spec, const std::string& out_dir) {
  const SynthCorpus corpus = synth_corpus(spec);
  LabeledDataset ds;
  ds.root = out_dir;
  ds.class_names = corpus.class_names;

  const auto write_split = [&](const char* split,
                               const std::vector<Image>& images,
                               const std::vector<int>& labels) {
    std::vector<int> next(corpus.class_names.size(), 0);
    for (std::size_t i = 0; i < images.size(); ++i) {
      const int c = labels[i];
      char buf[64];
      std::snprintf(buf, sizeof(buf), "img_%04d.pgm", next[c]++);
      const fs::path rel = fs::path(split) / corpus.class_names[c] / buf;
      fs::create_directories(fs::path(out_dir) / rel.parent_path());
      write_pnm(images[i], (fs::path(out_dir) / rel).string());
      DatasetItem item;
      item.path = rel.generic_string();
      item.class_id = c;
      item.split = split;
      ds.items.push_back(std::move(item));
    }
  };
  write_split("train", corpus.train_images, corpus.train_labels);
  write_split("test", corpus.test_images, corpus.test_labels);
  save_manifest(ds, (fs::path(out_dir) / "manifest.json").string());
}

}  // namespace msfl
