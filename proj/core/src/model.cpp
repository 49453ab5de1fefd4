#include "msfl/model.hpp"

#include "msfl/errors.hpp"

namespace msfl {

const char* kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::KMeans: return "km";
    case ModelKind::SparseCoding: return "sc";
    case ModelKind::Autoencoder: return "ae";
    case ModelKind::S3C: return "s3c";
    case ModelKind::S4C: return "s4c";
    case ModelKind::MS4C: return "ms4c";
  }
  return "?";
}

ModelKind kind_from_name(const std::string& name) {
  if (name == "km") return ModelKind::KMeans;
  if (name == "sc") return ModelKind::SparseCoding;
  if (name == "ae") return ModelKind::Autoencoder;
  if (name == "s3c") return ModelKind::S3C;
  if (name == "s4c") return ModelKind::S4C;
  if (name == "ms4c") return ModelKind::MS4C;
  throw ConfigError("unknown model kind '" + name +
                    "' (expected km, sc, ae, s3c, s4c or ms4c)");
}

int Model::code_dim(bool with_color) const {
  switch (kind) {
    case ModelKind::KMeans:
      return std::get<KMeansDict>(value).n_atoms();
    case ModelKind::SparseCoding:
      return std::get<ScDict>(value).n_atoms();
    case ModelKind::Autoencoder:
      return std::get<AEParams>(value).code_dim();
    case ModelKind::S3C:
      return std::get<S3CParams>(value).dict_size();
    case ModelKind::S4C:
      return std::get<S4CModel>(value).code_dim();
    case ModelKind::MS4C: {
      const MS4CModel& m = std::get<MS4CModel>(value);
      int dim = m.joint.dict_size();
      if (with_color) {
        if (!m.color)
          throw ConfigError("model has no color companion");
        dim += m.color->dict_size();
      }
      return dim;
    }
  }
  throw ConfigError("corrupt model kind");
}

}  // namespace msfl
