#include "msfl/model_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "msfl/errors.hpp"

namespace msfl {

namespace {

constexpr char kMagic[8] = {'M', 'S', 'F', 'L', 'B', 'I', 'N', '\n'};
constexpr std::uint32_t kFeatureKind = 100;
constexpr std::uint32_t kSvmKind = 101;

std::uint64_t fnv1a(const std::vector<char>& buf, std::size_t count) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (std::size_t i = 0; i < count; ++i) {
    h ^= static_cast<unsigned char>(buf[i]);
    h *= 0x100000001b3ull;
  }
  return h;
}

void put_u64(std::vector<char>& buf, std::uint64_t v) {
  for (int i = 0; i < 8; ++i)
    buf.push_back(static_cast<char>(v >> (8 * i) & 0xff));
}

void put_u32(std::vector<char>& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i)
    buf.push_back(static_cast<char>(v >> (8 * i) & 0xff));
}

void put_u16(std::vector<char>& buf, std::uint16_t v) {
  buf.push_back(static_cast<char>(v & 0xff));
  buf.push_back(static_cast<char>(v >> 8 & 0xff));
}

void put_i32(std::vector<char>& buf, std::int32_t v) {
  put_u32(buf, static_cast<std::uint32_t>(v));
}

void put_f64(std::vector<char>& buf, double v) {
  put_u64(buf, std::bit_cast<std::uint64_t>(v));
}

struct Cursor {
  const std::vector<char>& buf;
  std::size_t pos = 0;
  std::string path;

  void need(std::size_t n) const {
    if (pos + n > buf.size())
      throw TruncationError(path + ": file ends " +
                            std::to_string(pos + n - buf.size()) +
                            " byte(s) short");
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
      v |= static_cast<std::uint64_t>(
               static_cast<unsigned char>(buf[pos + i]))
           << (8 * i);
    pos += 8;
    return v;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= static_cast<std::uint32_t>(
               static_cast<unsigned char>(buf[pos + i]))
           << (8 * i);
    pos += 4;
    return v;
  }
  std::uint16_t u16() {
    need(2);
    const std::uint16_t v = static_cast<std::uint16_t>(
        static_cast<unsigned char>(buf[pos]) |
        static_cast<unsigned char>(buf[pos + 1]) << 8);
    pos += 2;
    return v;
  }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str(std::size_t n) {
    need(n);
    std::string s(buf.begin() + static_cast<std::ptrdiff_t>(pos),
                  buf.begin() + static_cast<std::ptrdiff_t>(pos + n));
    pos += n;
    return s;
  }
};

std::vector<double> flatten(const Eigen::MatrixXd& m) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) out.push_back(m(r, c));
  return out;
}

std::vector<double> flatten(const Eigen::VectorXd& v) {
  return {v.data(), v.data() + v.size()};
}

Eigen::MatrixXd unflatten(const std::vector<double>& data, Eigen::Index rows,
                          Eigen::Index cols, const std::string& name) {
  if (static_cast<Eigen::Index>(data.size()) != rows * cols)
    throw IoError("array '" + name + "' holds " +
                  std::to_string(data.size()) + " values, expected " +
                  std::to_string(rows * cols));
  Eigen::MatrixXd m(rows, cols);
  std::size_t i = 0;
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[i++];
  return m;
}

Eigen::VectorXd to_vector(const std::vector<double>& data, Eigen::Index size,
                          const std::string& name) {
  if (static_cast<Eigen::Index>(data.size()) != size)
    throw IoError("array '" + name + "' holds " +
                  std::to_string(data.size()) + " values, expected " +
                  std::to_string(size));
  return Eigen::Map<const Eigen::VectorXd>(data.data(), size);
}

void push_array(ArrayFile& f, const std::string& name,
                std::vector<double> data) {
  f.arrays.emplace_back(name, std::move(data));
}

void push_s3c(ArrayFile& f, const S3CParams& p, const std::string& suffix) {
  push_array(f, "W" + suffix, flatten(p.W));
  push_array(f, "b" + suffix, flatten(p.b));
  push_array(f, "mu" + suffix, flatten(p.mu));
  push_array(f, "alpha" + suffix, flatten(p.alpha));
  push_array(f, "beta" + suffix, flatten(p.beta));
}

S3CParams pull_s3c(const ArrayFile& f, Eigen::Index dim, Eigen::Index n,
                   const std::string& suffix) {
  S3CParams p;
  p.W = unflatten(f.get("W" + suffix), dim, n, "W" + suffix);
  p.b = to_vector(f.get("b" + suffix), n, "b" + suffix);
  p.mu = to_vector(f.get("mu" + suffix), n, "mu" + suffix);
  p.alpha = to_vector(f.get("alpha" + suffix), n, "alpha" + suffix);
  p.beta = to_vector(f.get("beta" + suffix), dim, "beta" + suffix);
  return p;
}

}  // namespace

const std::vector<double>& ArrayFile::get(const std::string& name) const {
  for (const auto& [key, data] : arrays)
    if (key == name) return data;
  throw IoError("model file has no array named '" + name + "'");
}

bool ArrayFile::has(const std::string& name) const {
  for (const auto& [key, data] : arrays)
    if (key == name) return true;
  return false;
}

void write_array_file(const ArrayFile& file, const std::string& path) {
  std::vector<char> buf;
  buf.insert(buf.end(), kMagic, kMagic + 8);
  put_u32(buf, ArrayFile::kVersion);
  put_u32(buf, file.kind);
  for (const std::int32_t g : file.geometry) put_i32(buf, g);
  put_u32(buf, static_cast<std::uint32_t>(file.arrays.size()));
  for (const auto& [name, data] : file.arrays) {
    if (name.size() > 0xffff)
      throw ConfigError("array name too long: " + name);
    put_u16(buf, static_cast<std::uint16_t>(name.size()));
    buf.insert(buf.end(), name.begin(), name.end());
    put_u64(buf, data.size());
    for (const double v : data) put_f64(buf, v);
  }
  put_u64(buf, fnv1a(buf, buf.size()));

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path + ": cannot open for writing");
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError(path + ": write failed");
}

ArrayFile read_array_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path + ": cannot open");
  std::vector<char> buf((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());

  Cursor cur{buf, 0, path};
  const std::string magic = cur.str(8);
  if (std::memcmp(magic.data(), kMagic, 8) != 0)
    throw IoError(path + ": not a model file (bad magic)");
  if (buf.size() < 8 + 8)
    throw TruncationError(path + ": no room for a checksum");

  // The version gates the layout, so it is checked before the structure is
  // walked; the checksum comes last so honest truncation reports as such.
  ArrayFile file;
  const std::uint32_t version = cur.u32();
  if (version != ArrayFile::kVersion)
    throw VersionError(path + ": version " + std::to_string(version) +
                       ", this build reads version " +
                       std::to_string(ArrayFile::kVersion));
  file.kind = cur.u32();
  for (std::int32_t& g : file.geometry) g = cur.i32();
  const std::uint32_t count = cur.u32();
  for (std::uint32_t a = 0; a < count; ++a) {
    const std::uint16_t name_len = cur.u16();
    const std::string name = cur.str(name_len);
    const std::uint64_t len = cur.u64();
    if (len > buf.size() / 8)
      throw TruncationError(path + ": array '" + name + "' declares " +
                            std::to_string(len) + " values past the file end");
    cur.need(len * 8);
    std::vector<double> data(len);
    for (std::uint64_t i = 0; i < len; ++i) data[i] = cur.f64();
    file.arrays.emplace_back(name, std::move(data));
  }
  if (cur.pos != buf.size() - 8)
    throw IoError(path + ": trailing bytes after the last array");
  const std::uint64_t stored = Cursor{buf, buf.size() - 8, path}.u64();
  if (fnv1a(buf, buf.size() - 8) != stored)
    throw ChecksumError(path + ": checksum mismatch");
  return file;
}

void save_model(const Model& model, const std::string& path) {
  ArrayFile f;
  f.kind = static_cast<std::uint32_t>(model.kind);
  std::int32_t dim = 0, n = 0, m = 1, color = 0;
  switch (model.kind) {
    case ModelKind::KMeans: {
      const KMeansDict& d = std::get<KMeansDict>(model.value);
      dim = static_cast<std::int32_t>(d.centers.rows());
      n = d.n_atoms();
      push_array(f, "centers", flatten(d.centers));
      break;
    }
    case ModelKind::SparseCoding: {
      const ScDict& d = std::get<ScDict>(model.value);
      dim = static_cast<std::int32_t>(d.W.rows());
      n = d.n_atoms();
      push_array(f, "W", flatten(d.W));
      push_array(f, "beta", {d.beta});
      break;
    }
    case ModelKind::Autoencoder: {
      const AEParams& p = std::get<AEParams>(model.value);
      dim = p.input_dim();
      n = p.code_dim();
      push_array(f, "W", flatten(p.W));
      push_array(f, "b", flatten(p.b));
      push_array(f, "Wd", flatten(p.Wd));
      push_array(f, "bd", flatten(p.bd));
      break;
    }
    case ModelKind::S3C: {
      const S3CParams& p = std::get<S3CParams>(model.value);
      dim = p.input_dim();
      n = p.dict_size();
      push_s3c(f, p, "");
      break;
    }
    case ModelKind::S4C: {
      const S4CModel& s = std::get<S4CModel>(model.value);
      dim = s.scales[0].input_dim();
      n = s.scales[0].dict_size();
      m = s.scale_count();
      push_array(f, "sigmas", s.config.sigmas);
      push_array(f, "tied", {s.tied ? 1.0 : 0.0});
      for (std::size_t j = 0; j < s.scales.size(); ++j)
        push_s3c(f, s.scales[j], std::to_string(j));
      break;
    }
    case ModelKind::MS4C: {
      const MS4CModel& s = std::get<MS4CModel>(model.value);
      dim = s.joint.input_dim();
      n = s.joint.dict_size();
      m = s.levels();
      color = s.color ? 1 : 0;
      push_s3c(f, s.joint, "");
      if (s.color) push_s3c(f, *s.color, "c");
      break;
    }
  }
  if (model.zca) {
    push_array(f, "zca_mean", flatten(model.zca->mean));
    push_array(f, "zca_transform", flatten(model.zca->transform));
  }
  f.geometry = {dim, n, model.patch_side, m, color};
  write_array_file(f, path);
}

Model load_model(const std::string& path, std::optional<ModelKind> expect) {
  const ArrayFile f = read_array_file(path);
  if (f.kind > static_cast<std::uint32_t>(ModelKind::MS4C))
    throw KindMismatchError(path + ": kind id " + std::to_string(f.kind) +
                            " is not a coder model");
  Model model;
  model.kind = static_cast<ModelKind>(f.kind);
  if (expect && *expect != model.kind)
    throw KindMismatchError(path + ": holds a " + kind_name(model.kind) +
                            " model, expected " + kind_name(*expect));
  const Eigen::Index dim = f.geometry[0];
  const Eigen::Index n = f.geometry[1];
  model.patch_side = f.geometry[2];
  const int m = f.geometry[3];
  const bool color = f.geometry[4] != 0;
  if (dim < 1 || n < 1 || model.patch_side < 1 || m < 1)
    throw IoError(path + ": bad geometry");

  switch (model.kind) {
    case ModelKind::KMeans: {
      KMeansDict d;
      d.centers = unflatten(f.get("centers"), dim, n, "centers");
      model.value = std::move(d);
      break;
    }
    case ModelKind::SparseCoding: {
      ScDict d;
      d.W = unflatten(f.get("W"), dim, n, "W");
      d.beta = to_vector(f.get("beta"), 1, "beta")[0];
      model.value = std::move(d);
      break;
    }
    case ModelKind::Autoencoder: {
      AEParams p;
      p.W = unflatten(f.get("W"), n, dim, "W");
      p.b = to_vector(f.get("b"), n, "b");
      p.Wd = unflatten(f.get("Wd"), dim, n, "Wd");
      p.bd = to_vector(f.get("bd"), dim, "bd");
      model.value = std::move(p);
      break;
    }
    case ModelKind::S3C:
      model.value = pull_s3c(f, dim, n, "");
      break;
    case ModelKind::S4C: {
      S4CModel s;
      s.config.mode = ScaleConfig::Mode::BlurStack;
      s.config.sigmas = f.get("sigmas");
      s.tied = f.get("tied").at(0) != 0.0;
      s.patch_side = model.patch_side;
      const int param_sets = s.tied ? 1 : m;
      for (int j = 0; j < param_sets; ++j)
        s.scales.push_back(pull_s3c(f, dim, n, std::to_string(j)));
      if (static_cast<int>(s.config.sigmas.size()) != m)
        throw IoError(path + ": sigma count disagrees with geometry");
      model.value = std::move(s);
      break;
    }
    case ModelKind::MS4C: {
      MS4CModel s;
      s.config.mode = ScaleConfig::Mode::Pyramid;
      s.config.levels = m;
      s.patch_side = model.patch_side;
      s.joint = pull_s3c(f, dim, n, "");
      if (color) {
        // The color companion sizes itself; only the joint dictionary's
        // shape lives in the geometry header.
        const Eigen::Index color_n =
            static_cast<Eigen::Index>(f.get("bc").size());
        s.color = pull_s3c(f, 3ll * model.patch_side * model.patch_side,
                           color_n, "c");
      }
      model.value = std::move(s);
      break;
    }
  }
  if (f.has("zca_mean")) {
    ZcaTransform z;
    const Eigen::Index zd =
        static_cast<Eigen::Index>(f.get("zca_mean").size());
    z.mean = to_vector(f.get("zca_mean"), zd, "zca_mean");
    z.transform = unflatten(f.get("zca_transform"), zd, zd, "zca_transform");
    model.zca = std::move(z);
  }
  return model;
}

void save_features(const Eigen::MatrixXd& X, const std::vector<int>& labels,
                   const std::string& path) {
  if (static_cast<Eigen::Index>(labels.size()) != X.cols())
    throw ConfigError("save_features: label count mismatch");
  ArrayFile f;
  f.kind = kFeatureKind;
  f.geometry = {static_cast<std::int32_t>(X.rows()),
                static_cast<std::int32_t>(X.cols()), 0, 0, 0};
  push_array(f, "X", flatten(X));
  std::vector<double> lab(labels.begin(), labels.end());
  push_array(f, "labels", std::move(lab));
  write_array_file(f, path);
}

std::pair<Eigen::MatrixXd, std::vector<int>> load_features(
    const std::string& path) {
  const ArrayFile f = read_array_file(path);
  if (f.kind != kFeatureKind)
    throw KindMismatchError(path + ": not a feature file (kind " +
                            std::to_string(f.kind) + ")");
  const Eigen::Index dim = f.geometry[0], n = f.geometry[1];
  Eigen::MatrixXd X = unflatten(f.get("X"), dim, n, "X");
  const std::vector<double>& lab = f.get("labels");
  if (static_cast<Eigen::Index>(lab.size()) != n)
    throw IoError(path + ": label count disagrees with geometry");
  std::vector<int> labels(lab.size());
  for (std::size_t i = 0; i < lab.size(); ++i)
    labels[i] = static_cast<int>(lab[i]);
  return {std::move(X), std::move(labels)};
}

void save_svm(const SVMModel& model, const std::string& path) {
  ArrayFile f;
  f.kind = kSvmKind;
  std::int32_t dim = 0;
  const std::int32_t k = model.n_classes;
  std::int32_t nsup = 0;
  switch (model.kind) {
    case SVMKind::Linear:
      dim = static_cast<std::int32_t>(model.W.rows()) - 1;
      push_array(f, "W", flatten(model.W));
      break;
    case SVMKind::ExpChi2:
      dim = static_cast<std::int32_t>(model.support.rows());
      nsup = static_cast<std::int32_t>(model.support.cols());
      push_array(f, "support", flatten(model.support));
      push_array(f, "dual", flatten(model.dual));
      push_array(f, "bias", flatten(model.bias));
      push_array(f, "gamma", {model.gamma});
      break;
    case SVMKind::Knn3: {
      dim = static_cast<std::int32_t>(model.support.rows());
      nsup = static_cast<std::int32_t>(model.support.cols());
      push_array(f, "support", flatten(model.support));
      std::vector<double> lab(model.support_labels.size());
      for (Eigen::Index i = 0; i < model.support_labels.size(); ++i)
        lab[static_cast<std::size_t>(i)] = model.support_labels[i];
      push_array(f, "labels", std::move(lab));
      break;
    }
  }
  push_array(f, "C", {model.C});
  f.geometry = {dim, k, static_cast<std::int32_t>(model.kind), nsup, 0};
  write_array_file(f, path);
}

SVMModel load_svm(const std::string& path) {
  const ArrayFile f = read_array_file(path);
  if (f.kind != kSvmKind)
    throw KindMismatchError(path + ": not a classifier file (kind " +
                            std::to_string(f.kind) + ")");
  SVMModel m;
  const Eigen::Index dim = f.geometry[0];
  m.n_classes = f.geometry[1];
  if (f.geometry[2] < 0 || f.geometry[2] > 2)
    throw IoError(path + ": bad classifier kind id");
  m.kind = static_cast<SVMKind>(f.geometry[2]);
  const Eigen::Index nsup = f.geometry[3];
  m.C = f.get("C").at(0);
  switch (m.kind) {
    case SVMKind::Linear:
      m.W = unflatten(f.get("W"), dim + 1, m.n_classes, "W");
      break;
    case SVMKind::ExpChi2:
      m.support = unflatten(f.get("support"), dim, nsup, "support");
      m.dual = unflatten(f.get("dual"), nsup, m.n_classes, "dual");
      m.bias = to_vector(f.get("bias"), m.n_classes, "bias");
      m.gamma = f.get("gamma").at(0);
      break;
    case SVMKind::Knn3: {
      m.support = unflatten(f.get("support"), dim, nsup, "support");
      const std::vector<double>& lab = f.get("labels");
      if (static_cast<Eigen::Index>(lab.size()) != nsup)
        throw IoError(path + ": label count disagrees with geometry");
      m.support_labels.resize(nsup);
      for (Eigen::Index i = 0; i < nsup; ++i)
        m.support_labels[i] = static_cast<int>(lab[static_cast<std::size_t>(i)]);
      break;
    }
  }
  return m;
}

}  // namespace msfl
