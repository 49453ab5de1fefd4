#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "msfl/image.hpp"

namespace msfl {

enum class LBPVariant { Plain, Uniform, Ri, RiUniform };

struct LBPRing {
  double radius = 1.0;
  int samples = 8;
};

struct LBPConfig {
  LBPVariant variant = LBPVariant::Uniform;
  std::vector<LBPRing> rings = {{1.0, 8}};
};

// The standard multi-resolution ring set {(1,8),(2,16),(3,24)} with the
// uniform mapping per ring: 59 + 243 + 555 bins.
LBPConfig mlbp_config();

// Histogram length for one ring. Plain: 2^P; uniform: P(P-1)+3 (P=8: 59);
// ri: cyclic orbit count; ri-uniform: P+2. Plain and ri require P <= 16.
int lbp_bin_count(LBPVariant variant, int samples);

// Raw code: bit k set when neighbor k >= center (ties count as above).
std::uint32_t lbp_code(const std::vector<double>& neighbors, double center);

// Maps a raw code to its histogram bin under the variant.
std::uint32_t lbp_map(std::uint32_t code, LBPVariant variant, int samples);

// Per ring: codes of every pixel whose ring fits (margin ceil(R)), off-grid
// neighbors bilinearly interpolated, histogram normalized to sum 1. Ring
// histograms are concatenated in order. Neighbor positions come in exact
// quarter-turn orbits when P is divisible by 4, which makes the ri and
// ri-uniform histograms invariant under 90-degree image rotation.
Eigen::VectorXd lbp_histogram(const Image& img, const LBPConfig& cfg);

}  // namespace msfl
