#include "msfl/features.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "msfl/errors.hpp"

namespace msfl {

static Eigen::VectorXd preprocess(const Model& m, const Patch& patch) {
  Eigen::VectorXd v = normalize_patch(patch).v;
  if (m.zca) v = zca_apply(*m.zca, v);
  return v;
}

static void check_patch_dim(int expected, int actual, const char* what) {
  if (expected != actual)
    throw ConfigError(std::string(what) + ": model expects dimension " +
                      std::to_string(expected) + " but the patch geometry " +
                      "gives " + std::to_string(actual));
}

CodeGrid encode_image(const Model& m, const Image& img, int stride,
                      const EncodeOptions& opts) {
  if (stride < 1) throw ConfigError("encode_image: stride must be positive");
  if (opts.with_color && m.kind != ModelKind::MS4C)
    throw ConfigError(
        "encode_image: with_color requires a joint multi-scale model with a "
        "color companion");
  const int p = m.patch_side;
  const Image gray = to_grayscale(img);
  if (gray.width < p || gray.height < p)
    throw SizingError("encode_image: image " + std::to_string(gray.width) +
                      "x" + std::to_string(gray.height) +
                      " smaller than patch side " + std::to_string(p));

  CodeGrid out;
  out.cols = (gray.width - p) / stride + 1;
  out.rows = (gray.height - p) / stride + 1;
  const int cells = out.rows * out.cols;
  out.codes.resize(m.code_dim(opts.with_color), cells);

  switch (m.kind) {
    case ModelKind::KMeans: {
      const KMeansDict& dict = std::get<KMeansDict>(m.value);
      check_patch_dim(static_cast<int>(dict.centers.rows()), p * p,
                      "encode_image(km)");
      int c = 0;
      for (int gy = 0; gy < out.rows; ++gy)
        for (int gx = 0; gx < out.cols; ++gx, ++c)
          out.codes.col(c) = kmeans_encode(
              dict, preprocess(m, extract_patch(gray, gx * stride,
                                                gy * stride, p)));
      break;
    }
    case ModelKind::SparseCoding: {
      const ScDict& dict = std::get<ScDict>(m.value);
      check_patch_dim(static_cast<int>(dict.W.rows()), p * p,
                      "encode_image(sc)");
      const ScEncoder enc(dict.W, dict.beta);
      int c = 0;
      for (int gy = 0; gy < out.rows; ++gy)
        for (int gx = 0; gx < out.cols; ++gx, ++c)
          out.codes.col(c) = enc.encode(
              preprocess(m, extract_patch(gray, gx * stride, gy * stride, p)));
      break;
    }
    case ModelKind::Autoencoder: {
      const AEParams& ae = std::get<AEParams>(m.value);
      check_patch_dim(ae.input_dim(), p * p, "encode_image(ae)");
      int c = 0;
      for (int gy = 0; gy < out.rows; ++gy)
        for (int gx = 0; gx < out.cols; ++gx, ++c)
          out.codes.col(c) = ae_encode(
              ae, preprocess(m, extract_patch(gray, gx * stride,
                                              gy * stride, p)));
      break;
    }
    case ModelKind::S3C: {
      const S3CParams& s3c = std::get<S3CParams>(m.value);
      check_patch_dim(s3c.input_dim(), p * p, "encode_image(s3c)");
      int c = 0;
      for (int gy = 0; gy < out.rows; ++gy)
        for (int gx = 0; gx < out.cols; ++gx, ++c)
          out.codes.col(c) = s3c_encode(
              s3c, preprocess(m, extract_patch(gray, gx * stride,
                                               gy * stride, p)),
              opts.s3c_mode, opts.estep_sweeps, opts.estep_tol);
      break;
    }
    case ModelKind::S4C: {
      const S4CModel& s4c = std::get<S4CModel>(m.value);
      check_patch_dim(s4c.scales[0].input_dim(), p * p, "encode_image(s4c)");
      const std::vector<Image> stack = s4c_blur_stack(s4c, gray);
      int c = 0;
      for (int gy = 0; gy < out.rows; ++gy)
        for (int gx = 0; gx < out.cols; ++gx, ++c)
          out.codes.col(c) =
              s4c_encode_stack(s4c, stack, gx * stride, gy * stride,
                               opts.estep_sweeps, opts.estep_tol);
      break;
    }
    case ModelKind::MS4C: {
      const MS4CModel& ms4c = std::get<MS4CModel>(m.value);
      check_patch_dim(ms4c.joint.input_dim(), ms4c.levels() * p * p,
                      "encode_image(ms4c)");
      const std::vector<Image> pyr = build_pyramid(gray, ms4c.levels());
      const Image* color = img.channels == 3 ? &img : nullptr;
      int c = 0;
      for (int gy = 0; gy < out.rows; ++gy)
        for (int gx = 0; gx < out.cols; ++gx, ++c)
          out.codes.col(c) = ms4c_encode_pyramid(
              ms4c, pyr, color, gx * stride + p / 2, gy * stride + p / 2,
              opts.with_color, true, opts.estep_sweeps, opts.estep_tol);
      break;
    }
  }
  return out;
}

Eigen::VectorXd pool(const CodeGrid& grid, const PoolingConfig& cfg) {
  if (grid.rows < 1 || grid.cols < 1)
    throw ConfigError("pool: empty code grid");
  if (cfg.grid < 1 || cfg.grid > 3)
    throw ConfigError("pool: grid must be 1, 2 or 3");
  if (cfg.grid > grid.rows || cfg.grid > grid.cols)
    throw ConfigError("pool: " + std::to_string(cfg.grid) + "x" +
                      std::to_string(cfg.grid) +
                      " cells need at least that many grid rows and columns, "
                      "got " + std::to_string(grid.rows) + "x" +
                      std::to_string(grid.cols));

  const int g = cfg.grid;
  const Eigen::Index dim = grid.codes.rows();
  Eigen::VectorXd out(dim * g * g);
  for (int cy = 0; cy < g; ++cy) {
    const int y0 = cy * grid.rows / g, y1 = (cy + 1) * grid.rows / g;
    for (int cx = 0; cx < g; ++cx) {
      const int x0 = cx * grid.cols / g, x1 = (cx + 1) * grid.cols / g;
      Eigen::VectorXd cell;
      if (cfg.reducer == PoolingConfig::Reducer::Mean)
        cell = Eigen::VectorXd::Zero(dim);
      else
        cell = Eigen::VectorXd::Constant(
            dim, -std::numeric_limits<double>::infinity());
      int count = 0;
      for (int y = y0; y < y1; ++y)
        for (int x = x0; x < x1; ++x) {
          const auto code = grid.codes.col(y * grid.cols + x);
          if (cfg.reducer == PoolingConfig::Reducer::Mean)
            cell += code;
          else
            cell = cell.cwiseMax(code);
          ++count;
        }
      if (cfg.reducer == PoolingConfig::Reducer::Mean && count > 0)
        cell /= count;
      out.segment((static_cast<Eigen::Index>(cy) * g + cx) * dim, dim) = cell;
    }
  }
  if (cfg.l2_normalize) {
    const double n = out.norm();
    if (n > 1e-12) out /= n;
  }
  return out;
}

Eigen::VectorXd image_feature(const Model& m, const Image& img,
                              const PoolingConfig& cfg,
                              const EncodeOptions& opts) {
  const int stride = cfg.stride > 0 ? cfg.stride
                                    : std::max(1, m.patch_side / 2);
  return pool(encode_image(m, img, stride, opts), cfg);
}

}  // namespace msfl
