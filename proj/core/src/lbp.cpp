#include "msfl/lbp.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "msfl/errors.hpp"

namespace msfl {

LBPConfig mlbp_config() {
  LBPConfig cfg;
  cfg.variant = LBPVariant::Uniform;
  cfg.rings = {{1.0, 8}, {2.0, 16}, {3.0, 24}};
  return cfg;
}

static std::uint32_t rotr_bits(std::uint32_t code, int r, int p) {
  const std::uint32_t mask = (p == 32) ? 0xffffffffu : ((1u << p) - 1u);
  r %= p;
  return ((code >> r) | (code << (p - r))) & mask;
}

static int transitions(std::uint32_t code, int p) {
  return std::popcount(code ^ rotr_bits(code, 1, p));
}

static std::uint32_t min_rotation_bits(std::uint32_t code, int p) {
  std::uint32_t best = code;
  for (int r = 1; r < p; ++r) best = std::min(best, rotr_bits(code, r, p));
  return best;
}

static bool is_min_rotation(std::uint32_t code, int p) {
  for (int r = 1; r < p; ++r)
    if (rotr_bits(code, r, p) < code) return false;
  return true;
}

int lbp_bin_count(LBPVariant variant, int p) {
  if (p < 4) throw ConfigError("lbp: need at least 4 samples");
  switch (variant) {
    case LBPVariant::Plain:
      if (p > 16) throw ConfigError("lbp: plain variant limited to P <= 16");
      return 1 << p;
    case LBPVariant::Uniform:
      return p * (p - 1) + 3;
    case LBPVariant::Ri: {
      if (p > 16) throw ConfigError("lbp: ri variant limited to P <= 16");
      // Count cyclic orbits: codes that are their own minimal rotation.
      int count = 0;
      for (std::uint32_t c = 0; c < (1u << p); ++c)
        if (is_min_rotation(c, p)) ++count;
      return count;
    }
    case LBPVariant::RiUniform:
      return p + 2;
  }
  throw ConfigError("lbp: bad variant");
}

std::uint32_t lbp_code(const std::vector<double>& neighbors, double center) {
  if (neighbors.size() < 4 || neighbors.size() > 32)
    throw ConfigError("lbp_code: sample count out of range");
  std::uint32_t code = 0;
  for (std::size_t k = 0; k < neighbors.size(); ++k)
    if (neighbors[k] >= center) code |= 1u << k;
  return code;
}

std::uint32_t lbp_map(std::uint32_t code, LBPVariant variant, int p) {
  switch (variant) {
    case LBPVariant::Plain:
      return code;
    case LBPVariant::Uniform: {
      const int k = std::popcount(code);
      if (k == 0) return 0;
      if (k == p) return static_cast<std::uint32_t>(p * (p - 1) + 1);
      if (transitions(code, p) > 2)
        return static_cast<std::uint32_t>(p * (p - 1) + 2);
      // Single circular run of k ones; r is where the run starts.
      int r = -1;
      for (int i = 0; i < p; ++i) {
        const bool here = code >> i & 1;
        const bool prev = code >> ((i + p - 1) % p) & 1;
        if (here && !prev) { r = i; break; }
      }
      return static_cast<std::uint32_t>((k - 1) * p + r + 1);
    }
    case LBPVariant::Ri: {
      // Dense orbit index: minimal representatives numbered in increasing
      // order. The histogram path uses a precomputed table with the same
      // numbering.
      const std::uint32_t best = min_rotation_bits(code, p);
      std::uint32_t bin = 0;
      for (std::uint32_t c = 0; c < best; ++c)
        if (is_min_rotation(c, p)) ++bin;
      return bin;
    }
    case LBPVariant::RiUniform: {
      if (transitions(code, p) > 2) return static_cast<std::uint32_t>(p + 1);
      return static_cast<std::uint32_t>(std::popcount(code));
    }
  }
  throw ConfigError("lbp_map: bad variant");
}

// Offsets in exact quarter-turn orbits when P is divisible by 4:
// the first quadrant is computed, the rest derived by (x,y) -> (-y,x).
static std::vector<std::pair<double, double>> ring_offsets(double radius,
                                                          int p) {
  std::vector<std::pair<double, double>> off(p);
  if (p % 4 == 0) {
    const int q = p / 4;
    for (int k = 0; k < q; ++k) {
      const double t = 2.0 * M_PI * k / p;
      off[k] = {k == 0 ? radius : radius * std::cos(t),
                k == 0 ? 0.0 : radius * std::sin(t)};
    }
    for (int k = q; k < p; ++k)
      off[k] = {-off[k - q].second, off[k - q].first};
  } else {
    for (int k = 0; k < p; ++k) {
      const double t = 2.0 * M_PI * k / p;
      off[k] = {radius * std::cos(t), radius * std::sin(t)};
    }
  }
  return off;
}

// Bilinear sample; the nested-lerp form reproduces equal endpoints exactly,
// so constant regions compare as exact ties.
static double sample_at(const Image& img, double x, double y) {
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const double fx = x - x0;
  const double fy = y - y0;
  const double v00 = img.at(x0, y0);
  if (fx == 0.0 && fy == 0.0) return v00;
  if (fy == 0.0) {
    const double v10 = img.at(x0 + 1, y0);
    return v00 + fx * (v10 - v00);
  }
  if (fx == 0.0) {
    const double v01 = img.at(x0, y0 + 1);
    return v00 + fy * (v01 - v00);
  }
  const double v10 = img.at(x0 + 1, y0);
  const double v01 = img.at(x0, y0 + 1);
  const double v11 = img.at(x0 + 1, y0 + 1);
  const double top = v00 + fx * (v10 - v00);
  const double bot = v01 + fx * (v11 - v01);
  return top + fy * (bot - top);
}

Eigen::VectorXd lbp_histogram(const Image& img, const LBPConfig& cfg) {
  if (cfg.rings.empty()) throw ConfigError("lbp_histogram: no rings");
  const Image gray = to_grayscale(img);

  int total = 0;
  for (const LBPRing& ring : cfg.rings)
    total += lbp_bin_count(cfg.variant, ring.samples);

  Eigen::VectorXd hist = Eigen::VectorXd::Zero(total);
  int base = 0;
  for (const LBPRing& ring : cfg.rings) {
    if (ring.radius < 1.0)
      throw ConfigError("lbp_histogram: ring radius must be >= 1");
    const int p = ring.samples;
    const int bins = lbp_bin_count(cfg.variant, p);
    const int margin = static_cast<int>(std::ceil(ring.radius));
    if (gray.width <= 2 * margin || gray.height <= 2 * margin)
      throw SizingError("lbp_histogram: radius " +
                        std::to_string(ring.radius) +
                        " exceeds the margin of a " +
                        std::to_string(gray.width) + "x" +
                        std::to_string(gray.height) + " image");

    // The per-code ri mapping counts orbits from scratch; a representative
    // indexed table gives the same numbering at table-lookup cost.
    std::vector<std::uint32_t> dense;
    if (cfg.variant == LBPVariant::Ri) {
      dense.assign(1u << p, 0);
      std::uint32_t next = 0;
      for (std::uint32_t c = 0; c < (1u << p); ++c)
        if (is_min_rotation(c, p)) dense[c] = next++;
    }

    const auto offsets = ring_offsets(ring.radius, p);
    std::vector<double> neighbors(p);
    for (int cy = margin; cy < gray.height - margin; ++cy) {
      for (int cx = margin; cx < gray.width - margin; ++cx) {
        for (int k = 0; k < p; ++k)
          neighbors[k] =
              sample_at(gray, cx + offsets[k].first, cy + offsets[k].second);
        const std::uint32_t raw = lbp_code(neighbors, gray.at(cx, cy));
        const std::uint32_t bin =
            cfg.variant == LBPVariant::Ri
                ? dense[min_rotation_bits(raw, p)]
                : lbp_map(raw, cfg.variant, p);
        hist[base + static_cast<int>(bin)] += 1.0;
      }
    }
    const double sum = hist.segment(base, bins).sum();
    hist.segment(base, bins) /= sum;
    base += bins;
  }
  return hist;
}

}  // namespace msfl
