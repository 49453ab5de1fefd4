#pragma once

#include <optional>
#include <string>
#include <variant>

#include "msfl/autoencoder.hpp"
#include "msfl/image.hpp"
#include "msfl/kmeans.hpp"
#include "msfl/multiscale.hpp"
#include "msfl/s3c.hpp"
#include "msfl/sparse_coding.hpp"

namespace msfl {

enum class ModelKind { KMeans, SparseCoding, Autoencoder, S3C, S4C, MS4C };

const char* kind_name(ModelKind kind);
ModelKind kind_from_name(const std::string& name);

// A trained coder of any kind plus the patch geometry it expects. The
// optional whitening transform applies after per-patch standardization and
// is only supported for the single-scale kinds.
struct Model {
  ModelKind kind = ModelKind::KMeans;
  int patch_side = 12;
  std::variant<KMeansDict, ScDict, AEParams, S3CParams, S4CModel, MS4CModel>
      value;
  std::optional<ZcaTransform> zca;

  // Dimension of one patch code; with_color adds the MS4C companion block.
  int code_dim(bool with_color = false) const;
};

}  // namespace msfl
