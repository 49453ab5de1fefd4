#include "msfl/viz.hpp"

#include <cmath>
#include <vector>

#include "msfl/errors.hpp"
#include "msfl/pnm.hpp"

namespace msfl {

namespace {

// One tile per atom, tile_h rows of tile_w, values already in [0,1].
struct TileSheet {
  int tile_w = 0;
  int tile_h = 0;
  std::vector<Eigen::VectorXd> tiles;  // column-major within each p x p block
};

Eigen::VectorXd scaled_unit(const Eigen::VectorXd& v) {
  const double lo = v.minCoeff();
  const double hi = v.maxCoeff();
  if (hi - lo <= 1e-12)
    return Eigen::VectorXd::Constant(v.size(), 0.5);
  return (v.array() - lo) / (hi - lo);
}

void require_patch_dim(Eigen::Index dim, int side) {
  if (dim != static_cast<Eigen::Index>(side) * side)
    throw ConfigError("cannot tile atoms of dimension " +
                      std::to_string(dim) + " as " + std::to_string(side) +
                      "x" + std::to_string(side) + " patches");
}

void add_columns(TileSheet& sheet, const Eigen::MatrixXd& W, int side) {
  require_patch_dim(W.rows(), side);
  for (Eigen::Index j = 0; j < W.cols(); ++j)
    sheet.tiles.push_back(scaled_unit(W.col(j)));
}

TileSheet model_tiles(const Model& m) {
  TileSheet sheet;
  const int p = m.patch_side;
  sheet.tile_w = p;
  sheet.tile_h = p;
  switch (m.kind) {
    case ModelKind::KMeans:
      add_columns(sheet, std::get<KMeansDict>(m.value).centers, p);
      break;
    case ModelKind::SparseCoding:
      add_columns(sheet, std::get<ScDict>(m.value).W, p);
      break;
    case ModelKind::Autoencoder:
      add_columns(sheet, std::get<AEParams>(m.value).W.transpose(), p);
      break;
    case ModelKind::S3C:
      add_columns(sheet, std::get<S3CParams>(m.value).W, p);
      break;
    case ModelKind::S4C: {
      const S4CModel& s4c = std::get<S4CModel>(m.value);
      const int count = s4c.tied ? 1 : s4c.scale_count();
      for (int j = 0; j < count; ++j)
        add_columns(sheet, s4c.scales[j].W, p);
      break;
    }
    case ModelKind::MS4C: {
      const MS4CModel& ms = std::get<MS4CModel>(m.value);
      const int levels = ms.levels();
      require_patch_dim(ms.joint.W.rows() / levels, p);
      sheet.tile_h = p * levels;
      for (Eigen::Index j = 0; j < ms.joint.W.cols(); ++j) {
        Eigen::VectorXd tall(ms.joint.W.rows());
        for (int k = 0; k < levels; ++k)
          tall.segment(static_cast<Eigen::Index>(k) * p * p, p * p) =
              scaled_unit(ms.joint.W.col(j).segment(
                  static_cast<Eigen::Index>(k) * p * p, p * p));
        sheet.tiles.push_back(std::move(tall));
      }
      break;
    }
  }
  return sheet;
}

}  // namespace

Image filter_montage(const Model& m) {
  const TileSheet sheet = model_tiles(m);
  const int n = static_cast<int>(sheet.tiles.size());
  if (n == 0) throw ConfigError("model has no atoms to render");
  const int cols = static_cast<int>(std::ceil(std::sqrt(double(n))));
  const int rows = (n + cols - 1) / cols;
  Image img = Image::zeros(cols * sheet.tile_w, rows * sheet.tile_h, 1);
  for (double& px : img.pixels) px = 0.5;
  for (int t = 0; t < n; ++t) {
    const int gx = (t % cols) * sheet.tile_w;
    const int gy = (t / cols) * sheet.tile_h;
    const Eigen::VectorXd& tile = sheet.tiles[t];
    for (int y = 0; y < sheet.tile_h; ++y)
      for (int x = 0; x < sheet.tile_w; ++x)
        img.at(gx + x, gy + y) = tile[y * sheet.tile_w + x];
  }
  return img;
}

void viz_filters(const Model& m, const std::string& path) {
  write_pnm(filter_montage(m), path);
}

}  // namespace msfl
