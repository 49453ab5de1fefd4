#pragma once

#include <string>

#include "msfl/image.hpp"
#include "msfl/model.hpp"

namespace msfl {

// Renders the learned dictionary as a tile grid. Each atom becomes one tile,
// min-max scaled to [0,1] on its own (flat atoms render mid-gray). Tiles are
// laid out row-major in a near-square grid with unused cells mid-gray and no
// separators, so 64 atoms of side 12 give a 96x96 image.
//
// Single-scale kinds tile each dictionary column as a patch. Stacked
// multi-scale models contribute one tile per atom per scale. The joint
// multi-scale kind splits each column into its per-level patches and stacks
// them vertically inside one tall tile. A color companion dictionary is not
// rendered.
Image filter_montage(const Model& m);

// Writes filter_montage(m) at the given path as a PGM file.
void viz_filters(const Model& m, const std::string& path);

}  // namespace msfl
