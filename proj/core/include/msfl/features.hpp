#pragma once

#include <Eigen/Core>

#include "msfl/model.hpp"

namespace msfl {

// Codes of the dense patch grid of one image, cells in row-major origin
// order as columns.
struct CodeGrid {
  int rows = 0;
  int cols = 0;
  Eigen::MatrixXd codes;  // code_dim x (rows * cols)
};

struct PoolingConfig {
  int grid = 2;  // cells per axis: 1, 2 or 3
  enum class Reducer { Mean, Max };
  Reducer reducer = Reducer::Mean;
  int stride = 0;  // patch-grid stride in pixels; 0 means patch_side / 2
  bool l2_normalize = true;
};

struct EncodeOptions {
  bool with_color = false;       // MS4C companion block
  S3CCode s3c_mode = S3CCode::Spike;
  int estep_sweeps = 50;
  double estep_tol = 1e-4;
};

// One code per patch of the dense grid at the given stride. Color input is
// gray-converted for every coder except the MS4C color companion, which
// reads the original channels.
CodeGrid encode_image(const Model& m, const Image& img, int stride,
                      const EncodeOptions& opts = {});

// Partitions the code grid into cfg.grid x cfg.grid balanced spatial cells,
// reduces each cell per dimension, concatenates cells row-major, and
// L2-normalizes when configured.
Eigen::VectorXd pool(const CodeGrid& grid, const PoolingConfig& cfg);

// encode_image + pool with the config's stride.
Eigen::VectorXd image_feature(const Model& m, const Image& img,
                              const PoolingConfig& cfg,
                              const EncodeOptions& opts = {});

}  // namespace msfl
