// Command-line front end: corpus generation, dictionary learning, dense
// encoding and pooling, SVM training and evaluation, representation
// transfer, and filter montages. Every run appends one JSON record with its
// effective config and metrics to the run log.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "msfl/dataset.hpp"
#include "msfl/errors.hpp"
#include "msfl/features.hpp"
#include "msfl/image.hpp"
#include "msfl/lbp.hpp"
#include "msfl/model.hpp"
#include "msfl/model_io.hpp"
#include "msfl/multiscale.hpp"
#include "msfl/pnm.hpp"
#include "msfl/svm.hpp"
#include "msfl/synth.hpp"
#include "msfl/viz.hpp"

using json = nlohmann::json;
using namespace msfl;

namespace {

// CLI11 config-file reader for JSON documents. Top-level keys address main
// options, nested objects address subcommands ({"learn": {"seed": 3}}).
// Command-line flags take precedence over file values, which CLI11
// guarantees by only applying config entries to options not already set.
class JsonConfig : public CLI::Config {
public:
  std::string to_config(const CLI::App*, bool, bool,
                        std::string) const override {
    return "{}\n";
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    json doc;
    try {
      doc = json::parse(input);
    } catch (const json::exception& e) {
      throw CLI::ConfigError(std::string("config is not valid JSON: ") +
                             e.what());
    }
    std::vector<CLI::ConfigItem> items;
    walk(doc, {}, items);
    return items;
  }

private:
  static std::string scalar(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return v.dump();
  }

  static void walk(const json& node, std::vector<std::string> parents,
                   std::vector<CLI::ConfigItem>& out) {
    for (const auto& [key, value] : node.items()) {
      if (value.is_object()) {
        auto deeper = parents;
        deeper.push_back(key);
        walk(value, deeper, out);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (value.is_array())
        for (const auto& v : value) item.inputs.push_back(scalar(v));
      else
        item.inputs.push_back(scalar(value));
      out.push_back(std::move(item));
    }
  }
};

void append_record(const std::string& log_path, const std::string& cmd,
                   const json& config, const json& metrics) {
  std::ofstream out(log_path, std::ios::app);
  if (!out) throw IoError(log_path + ": cannot open run log");
  const json rec = {{"cmd", cmd}, {"config", config}, {"metrics", metrics}};
  out << rec.dump() << "\n";
  if (!out) throw IoError(log_path + ": write failed");
}

// Dataset source shared by the subcommands that read images. A .json path
// is an existing manifest; anything else is a dataset root to scan.
struct DataFlags {
  std::string data;
  std::string layout = "flat";
  std::uint64_t split_seed = 0;
  std::vector<int> train_instances = {1, 2};
  std::vector<int> scale_filter;
};

void add_data_flags(CLI::App* cmd, DataFlags& f, const std::string& suffix,
                    const std::string& what) {
  cmd->add_option("--data" + suffix, f.data,
                  "dataset root or manifest.json (" + what + ")")
      ->required();
  cmd->add_option("--layout" + suffix, f.layout,
                  "directory convention of a dataset root")
      ->check(CLI::IsMember({"kth-tips2", "fmd", "flat"}));
  cmd->add_option("--split-seed" + suffix, f.split_seed,
                  "seed for the random half/half split of per-class trees");
  cmd->add_option("--train-instances" + suffix, f.train_instances,
                  "instance numbers assigned to the training split");
  cmd->add_option("--scale-filter" + suffix, f.scale_filter,
                  "keep only these scale tags in the training split");
}

json data_json(const DataFlags& f) {
  return {{"data", f.data},
          {"layout", f.layout},
          {"split_seed", f.split_seed},
          {"train_instances", f.train_instances},
          {"scale_filter", f.scale_filter}};
}

LabeledDataset open_dataset(const DataFlags& f) {
  if (f.data.size() > 5 &&
      f.data.compare(f.data.size() - 5, 5, ".json") == 0)
    return load_manifest(f.data);
  DatasetOptions opts;
  opts.train_instances = f.train_instances;
  opts.split_seed = f.split_seed;
  opts.scale_filter = f.scale_filter;
  return load_dataset(f.data, layout_from_name(f.layout), opts);
}

std::vector<Image> gray_all(const std::vector<Image>& images) {
  std::vector<Image> out;
  out.reserve(images.size());
  for (const Image& img : images) out.push_back(to_grayscale(img));
  return out;
}

// ---------------------------------------------------------------- synth --

struct SynthFlags {
  std::string out;
  SynthSpec spec;
};

json synth_json(const SynthFlags& f) {
  return {{"out", f.out},
          {"classes", f.spec.classes},
          {"per_class_train", f.spec.per_class_train},
          {"per_class_test", f.spec.per_class_test},
          {"side", f.spec.side},
          {"seed", f.spec.seed},
          {"disjoint_scale", f.spec.disjoint_scale}};
}

void add_synth(CLI::App& app, SynthFlags& f, std::string& log) {
  CLI::App* cmd =
      app.add_subcommand("synth", "generate a synthetic texture corpus");
  cmd->add_option("--out", f.out, "output directory")->required();
  cmd->add_option("--classes", f.spec.classes, "number of classes");
  cmd->add_option("--per-class-train", f.spec.per_class_train,
                  "training images per class");
  cmd->add_option("--per-class-test", f.spec.per_class_test,
                  "test images per class");
  cmd->add_option("--side", f.spec.side, "image side in pixels");
  cmd->add_option("--seed", f.spec.seed, "corpus seed");
  cmd->add_flag("--disjoint-scale", f.spec.disjoint_scale,
                "render test images at scales outside the training range");
  cmd->callback([&f, &log] {
    synth_generate(f.spec, f.out);
    const json metrics = {
        {"classes", f.spec.classes},
        {"train", f.spec.classes * f.spec.per_class_train},
        {"test", f.spec.classes * f.spec.per_class_test}};
    append_record(log, "synth", synth_json(f), metrics);
    std::cout << "wrote " << metrics["train"] << "+" << metrics["test"]
              << " images under " << f.out << "\n";
  });
}

// ---------------------------------------------------------------- learn --

struct LearnFlags {
  DataFlags data;
  std::string model = "s3c";
  int dict_size = 64;
  int patch = 12;
  int n_patches = 10000;
  std::uint64_t seed = 0;
  std::string out = "model.bin";
  int iters = 30;
  double sc_beta = 0.1;
  double ae_lr = 0.5;
  int epochs = 10;
  int batch = 100;
  double damping = 0.9;
  int sweeps = 50;
  double tol = 1e-5;
  bool diagonal_beta = false;
  std::vector<double> sigmas = {0.0, 1.0, 2.0};
  bool tied = false;
  int levels = 3;
  bool color = false;
  bool zca = false;
  double zca_eps = 1e-2;
};

json learn_json(const LearnFlags& f) {
  json j = data_json(f.data);
  j["model"] = f.model;
  j["dict_size"] = f.dict_size;
  j["patch"] = f.patch;
  j["patches"] = f.n_patches;
  j["seed"] = f.seed;
  j["out"] = f.out;
  j["iters"] = f.iters;
  j["sc_beta"] = f.sc_beta;
  j["ae_lr"] = f.ae_lr;
  j["epochs"] = f.epochs;
  j["batch"] = f.batch;
  j["damping"] = f.damping;
  j["sweeps"] = f.sweeps;
  j["tol"] = f.tol;
  j["diagonal_beta"] = f.diagonal_beta;
  j["sigmas"] = f.sigmas;
  j["tied"] = f.tied;
  j["levels"] = f.levels;
  j["color"] = f.color;
  j["zca"] = f.zca;
  j["zca_eps"] = f.zca_eps;
  return j;
}

S3CLearnConfig s3c_config(const LearnFlags& f) {
  S3CLearnConfig cfg;
  cfg.dict_size = f.dict_size;
  cfg.epochs = f.epochs;
  cfg.batch_size = f.batch;
  cfg.damping = f.damping;
  cfg.estep_sweeps = f.sweeps;
  cfg.estep_tol = f.tol;
  cfg.diagonal_beta = f.diagonal_beta;
  cfg.seed = f.seed;
  return cfg;
}

Model run_learn(const LearnFlags& f) {
  const LabeledDataset ds = open_dataset(f.data);
  const auto [images, labels] = load_split(ds, "train");
  (void)labels;  // dictionary learning is unsupervised

  Model m;
  m.kind = kind_from_name(f.model);
  m.patch_side = f.patch;
  const bool single_scale = m.kind == ModelKind::KMeans ||
                            m.kind == ModelKind::SparseCoding ||
                            m.kind == ModelKind::Autoencoder ||
                            m.kind == ModelKind::S3C;
  if (f.zca && !single_scale)
    throw ConfigError("learn: --zca only applies to single-scale models");

  if (single_scale) {
    const auto patches =
        sample_random_patches(gray_all(images), f.patch, f.n_patches, f.seed);
    Eigen::MatrixXd X = normalized_patch_matrix(patches);
    if (f.zca) {
      const ZcaTransform z = zca_fit(X, f.zca_eps);
      for (Eigen::Index c = 0; c < X.cols(); ++c)
        X.col(c) = zca_apply(z, X.col(c));
      m.zca = z;
    }
    switch (m.kind) {
      case ModelKind::KMeans:
        m.value = kmeans_learn(X, f.dict_size, f.iters, f.seed).dict;
        break;
      case ModelKind::SparseCoding:
        m.value = sc_learn(X, f.dict_size, f.sc_beta, f.iters, f.seed).dict;
        break;
      case ModelKind::Autoencoder:
        m.value =
            ae_learn(X, f.dict_size, f.ae_lr, f.epochs, f.seed, f.batch)
                .params;
        break;
      default:
        m.value = s3c_learn(X, s3c_config(f)).params;
        break;
    }
    return m;
  }

  if (m.kind == ModelKind::S4C) {
    S4CLearnConfig cfg;
    cfg.sigmas = f.sigmas;
    cfg.patch_side = f.patch;
    cfg.patches_per_scale = f.n_patches;
    cfg.tied = f.tied;
    cfg.s3c = s3c_config(f);
    m.value = s4c_learn(images, cfg);
    return m;
  }

  MS4CLearnConfig cfg;
  cfg.levels = f.levels;
  cfg.patch_side = f.patch;
  cfg.n_patches = f.n_patches;
  cfg.with_color = f.color;
  cfg.s3c = s3c_config(f);
  m.value = ms4c_learn(images, cfg);
  return m;
}

void add_learn(CLI::App& app, LearnFlags& f, std::string& log) {
  CLI::App* cmd =
      app.add_subcommand("learn", "learn a patch dictionary on a train split");
  add_data_flags(cmd, f.data, "", "training source");
  cmd->add_option("--model", f.model, "coder kind")
      ->check(CLI::IsMember({"km", "sc", "ae", "s3c", "s4c", "ms4c"}));
  cmd->add_option("--dict-size", f.dict_size, "dictionary atoms");
  cmd->add_option("--patch", f.patch, "patch side in pixels");
  cmd->add_option("--patches", f.n_patches,
                  "training patches (per scale for s4c)");
  cmd->add_option("--seed", f.seed, "learning seed");
  cmd->add_option("--out", f.out, "model file to write");
  cmd->add_option("--iters", f.iters, "outer iterations for km and sc");
  cmd->add_option("--sc-beta", f.sc_beta, "lasso weight for sc");
  cmd->add_option("--ae-lr", f.ae_lr, "autoencoder learning rate");
  cmd->add_option("--epochs", f.epochs, "epochs for ae and s3c kinds");
  cmd->add_option("--batch", f.batch, "minibatch size");
  cmd->add_option("--damping", f.damping,
                  "retained fraction of old s3c params per minibatch");
  cmd->add_option("--sweeps", f.sweeps, "mean-field sweeps per E-step");
  cmd->add_option("--tol", f.tol, "mean-field convergence tolerance");
  cmd->add_flag("--diagonal-beta", f.diagonal_beta,
                "per-dimension noise precision for s3c kinds");
  cmd->add_option("--sigmas", f.sigmas, "blur levels for s4c");
  cmd->add_flag("--tied", f.tied, "share one dictionary across s4c scales");
  cmd->add_option("--levels", f.levels, "pyramid levels for ms4c");
  cmd->add_flag("--color", f.color, "train the ms4c color companion");
  cmd->add_flag("--zca", f.zca, "whiten patches before learning");
  cmd->add_option("--zca-eps", f.zca_eps, "whitening regularizer");
  cmd->callback([&f, &log] {
    const Model m = run_learn(f);
    save_model(m, f.out);
    const json metrics = {{"kind", kind_name(m.kind)},
                          {"code_dim", m.code_dim(f.color)},
                          {"patch", m.patch_side}};
    append_record(log, "learn", learn_json(f), metrics);
    std::cout << "wrote " << f.out << " (" << kind_name(m.kind)
              << ", code dim " << m.code_dim(f.color) << ")\n";
  });
}

// --------------------------------------------------------------- encode --

struct EncodeFlags {
  DataFlags data;
  std::string model;
  bool lbp = false;
  std::string lbp_variant = "uniform";
  std::string split = "both";
  std::string out = "features";
  int stride = 0;
  int pool_grid = 2;
  std::string pool = "mean";
  bool no_l2 = false;
  std::string s3c_code = "spike";
  bool with_color = false;
  int sweeps = 50;
  double tol = 1e-4;
};

json encode_json(const EncodeFlags& f) {
  json j = data_json(f.data);
  j["model"] = f.model;
  j["lbp"] = f.lbp;
  j["lbp_variant"] = f.lbp_variant;
  j["split"] = f.split;
  j["out"] = f.out;
  j["stride"] = f.stride;
  j["pool_grid"] = f.pool_grid;
  j["pool"] = f.pool;
  j["no_l2"] = f.no_l2;
  j["s3c_code"] = f.s3c_code;
  j["with_color"] = f.with_color;
  j["sweeps"] = f.sweeps;
  j["tol"] = f.tol;
  return j;
}

LBPVariant lbp_variant_from_name(const std::string& name) {
  if (name == "plain") return LBPVariant::Plain;
  if (name == "uniform") return LBPVariant::Uniform;
  if (name == "ri") return LBPVariant::Ri;
  if (name == "riu") return LBPVariant::RiUniform;
  throw ConfigError("unknown lbp variant '" + name + "'");
}

Eigen::MatrixXd encode_split(const EncodeFlags& f, const Model* m,
                             const std::vector<Image>& images) {
  Eigen::MatrixXd X;
  if (f.lbp) {
    LBPConfig cfg = mlbp_config();
    cfg.variant = lbp_variant_from_name(f.lbp_variant);
    for (std::size_t i = 0; i < images.size(); ++i) {
      const Eigen::VectorXd h = lbp_histogram(images[i], cfg);
      if (i == 0) X.resize(h.size(), images.size());
      X.col(static_cast<Eigen::Index>(i)) = h;
    }
    return X;
  }
  PoolingConfig pool;
  pool.grid = f.pool_grid;
  pool.reducer = f.pool == "max" ? PoolingConfig::Reducer::Max
                                 : PoolingConfig::Reducer::Mean;
  pool.stride = f.stride;
  pool.l2_normalize = !f.no_l2;
  EncodeOptions opts;
  opts.with_color = f.with_color;
  opts.s3c_mode =
      f.s3c_code == "spikeslab" ? S3CCode::SpikeSlab : S3CCode::Spike;
  opts.estep_sweeps = f.sweeps;
  opts.estep_tol = f.tol;
  for (std::size_t i = 0; i < images.size(); ++i) {
    const Eigen::VectorXd v = image_feature(*m, images[i], pool, opts);
    if (i == 0) X.resize(v.size(), images.size());
    X.col(static_cast<Eigen::Index>(i)) = v;
  }
  return X;
}

void add_encode(CLI::App& app, EncodeFlags& f, std::string& log) {
  CLI::App* cmd = app.add_subcommand(
      "encode", "pooled per-image features for one or both splits");
  add_data_flags(cmd, f.data, "", "images to encode");
  cmd->add_option("--model", f.model, "trained model file");
  cmd->add_flag("--lbp", f.lbp,
                "multi-resolution LBP histograms instead of a model");
  cmd->add_option("--lbp-variant", f.lbp_variant, "per-ring code mapping")
      ->check(CLI::IsMember({"plain", "uniform", "ri", "riu"}));
  cmd->add_option("--split", f.split, "which split to encode")
      ->check(CLI::IsMember({"train", "test", "both"}));
  cmd->add_option("--out", f.out,
                  "output prefix; writes <prefix>.<split>.bin");
  cmd->add_option("--stride", f.stride,
                  "patch grid stride in pixels, 0 = half patch");
  cmd->add_option("--pool-grid", f.pool_grid, "pooling cells per axis");
  cmd->add_option("--pool", f.pool, "cell reducer")
      ->check(CLI::IsMember({"mean", "max"}));
  cmd->add_flag("--no-l2", f.no_l2, "skip feature L2 normalization");
  cmd->add_option("--s3c-code", f.s3c_code, "s3c readout")
      ->check(CLI::IsMember({"spike", "spikeslab"}));
  cmd->add_flag("--with-color", f.with_color,
                "append the ms4c color companion block");
  cmd->add_option("--sweeps", f.sweeps, "mean-field sweeps per patch");
  cmd->add_option("--tol", f.tol, "mean-field tolerance per patch");
  cmd->callback([&f, &log] {
    const bool have_model = !f.model.empty();
    if (f.lbp == have_model)
      throw ConfigError("encode: give exactly one of --model and --lbp");
    Model m;
    if (!f.lbp) m = load_model(f.model);
    const LabeledDataset ds = open_dataset(f.data);
    json metrics;
    std::vector<std::string> splits;
    if (f.split == "both")
      splits = {"train", "test"};
    else
      splits = {f.split};
    for (const std::string& split : splits) {
      const auto [images, labels] = load_split(ds, split);
      if (images.empty())
        throw ConfigError("encode: split '" + split + "' has no images");
      const Eigen::MatrixXd X =
          encode_split(f, f.lbp ? nullptr : &m, images);
      const std::string path = f.out + "." + split + ".bin";
      save_features(X, labels, path);
      metrics["dim"] = X.rows();
      metrics["n_" + split] = X.cols();
      std::cout << "wrote " << path << " (" << X.rows() << " x " << X.cols()
                << ")\n";
    }
    append_record(log, "encode", encode_json(f), metrics);
  });
}

// ----------------------------------------------------------- train/eval --

struct TrainFlags {
  std::string features;
  std::string svm = "linear";
  double C = 1.0;
  double gamma = 0.0;
  std::uint64_t seed = 0;
  std::string out = "svm.bin";
};

json train_json(const TrainFlags& f) {
  return {{"features", f.features}, {"svm", f.svm},   {"C", f.C},
          {"gamma", f.gamma},       {"seed", f.seed}, {"out", f.out}};
}

SVMKind svm_kind_from_name(const std::string& name) {
  if (name == "linear") return SVMKind::Linear;
  if (name == "chi2") return SVMKind::ExpChi2;
  if (name == "knn") return SVMKind::Knn3;
  throw ConfigError("unknown classifier kind '" + name + "'");
}

void add_train(CLI::App& app, TrainFlags& f, std::string& log) {
  CLI::App* cmd =
      app.add_subcommand("train", "fit a classifier on a feature file");
  cmd->add_option("--features", f.features, "training feature file")
      ->required();
  cmd->add_option("--svm", f.svm, "classifier kind")
      ->check(CLI::IsMember({"linear", "chi2", "knn"}));
  cmd->add_option("--C", f.C, "hinge-loss penalty");
  cmd->add_option("--gamma", f.gamma,
                  "exp-chi2 bandwidth, 0 = 1 / mean chi2 distance");
  cmd->add_option("--seed", f.seed, "seed for gamma pair subsampling");
  cmd->add_option("--out", f.out, "classifier file to write");
  cmd->callback([&f, &log] {
    const auto [X, labels] = load_features(f.features);
    SVMTrainConfig cfg;
    cfg.kind = svm_kind_from_name(f.svm);
    cfg.C = f.C;
    cfg.gamma = f.gamma;
    cfg.seed = f.seed;
    const SVMModel m = svm_train(X, labels, cfg);
    save_svm(m, f.out);
    const EvalResult res = evaluate(m, X, labels);
    const json metrics = {{"train_accuracy", res.accuracy},
                          {"classes", m.n_classes}};
    append_record(log, "train", train_json(f), metrics);
    std::cout << "wrote " << f.out << " (train accuracy " << res.accuracy
              << ")\n";
  });
}

struct EvalFlags {
  std::string features;
  std::string svm;
};

void add_eval(CLI::App& app, EvalFlags& f, std::string& log) {
  CLI::App* cmd =
      app.add_subcommand("eval", "accuracy and confusion on a feature file");
  cmd->add_option("--features", f.features, "feature file")->required();
  cmd->add_option("--svm", f.svm, "classifier file")->required();
  cmd->callback([&f, &log] {
    const auto [X, labels] = load_features(f.features);
    const SVMModel m = load_svm(f.svm);
    const EvalResult res = evaluate(m, X, labels);
    json confusion = json::array();
    for (int r = 0; r < res.confusion.rows(); ++r) {
      json row = json::array();
      for (int c = 0; c < res.confusion.cols(); ++c)
        row.push_back(res.confusion(r, c));
      confusion.push_back(row);
    }
    const json metrics = {{"accuracy", res.accuracy},
                          {"n", X.cols()},
                          {"confusion", confusion}};
    append_record(log, "eval",
                  {{"features", f.features}, {"svm", f.svm}}, metrics);
    std::cout << "accuracy " << res.accuracy << " on " << X.cols()
              << " samples\n";
  });
}

// ------------------------------------------------------------- transfer --

struct TransferFlags {
  DataFlags source;       // dictionary is learned here
  DataFlags target;       // features, classifier and accuracy live here
  LearnFlags learn;       // model hyperparameters (data part unused)
  EncodeFlags encode;     // pooling hyperparameters (data/model unused)
  TrainFlags train;       // classifier hyperparameters (paths unused)
};

void add_transfer(CLI::App& app, TransferFlags& f, std::string& log) {
  CLI::App* cmd = app.add_subcommand(
      "transfer",
      "learn a dictionary on corpus A, classify corpus B with it");
  add_data_flags(cmd, f.source, "-a", "dictionary corpus");
  add_data_flags(cmd, f.target, "-b", "classification corpus");
  cmd->add_option("--model", f.learn.model, "coder kind")
      ->check(CLI::IsMember({"km", "sc", "ae", "s3c", "s4c", "ms4c"}));
  cmd->add_option("--dict-size", f.learn.dict_size, "dictionary atoms");
  cmd->add_option("--patch", f.learn.patch, "patch side in pixels");
  cmd->add_option("--patches", f.learn.n_patches, "training patches");
  cmd->add_option("--seed", f.learn.seed, "learning seed");
  cmd->add_option("--epochs", f.learn.epochs, "epochs for ae and s3c kinds");
  cmd->add_option("--iters", f.learn.iters, "outer iterations for km and sc");
  cmd->add_option("--levels", f.learn.levels, "pyramid levels for ms4c");
  cmd->add_option("--sigmas", f.learn.sigmas, "blur levels for s4c");
  cmd->add_option("--stride", f.encode.stride, "patch grid stride");
  cmd->add_option("--pool-grid", f.encode.pool_grid, "pooling cells per axis");
  cmd->add_option("--sweeps", f.encode.sweeps, "mean-field sweeps per patch");
  cmd->add_option("--tol", f.encode.tol, "mean-field tolerance per patch");
  cmd->add_option("--svm", f.train.svm, "classifier kind")
      ->check(CLI::IsMember({"linear", "chi2", "knn"}));
  cmd->add_option("--C", f.train.C, "hinge-loss penalty");
  cmd->add_option("--gamma", f.train.gamma, "exp-chi2 bandwidth, 0 = auto");
  cmd->callback([&f, &log] {
    f.learn.data = f.source;
    const Model m = run_learn(f.learn);

    const LabeledDataset target = open_dataset(f.target);
    const auto [train_images, train_labels] = load_split(target, "train");
    const auto [test_images, test_labels] = load_split(target, "test");
    const Eigen::MatrixXd Xtrain = encode_split(f.encode, &m, train_images);
    const Eigen::MatrixXd Xtest = encode_split(f.encode, &m, test_images);

    SVMTrainConfig cfg;
    cfg.kind = svm_kind_from_name(f.train.svm);
    cfg.C = f.train.C;
    cfg.gamma = f.train.gamma;
    cfg.seed = f.train.seed;
    const SVMModel svm = svm_train(Xtrain, train_labels, cfg);
    const EvalResult res = evaluate(svm, Xtest, test_labels);

    json config = learn_json(f.learn);
    for (const char* key :
         {"data", "layout", "split_seed", "train_instances", "scale_filter"})
      config.erase(key);
    config["source"] = data_json(f.source);
    config["target"] = data_json(f.target);
    config["stride"] = f.encode.stride;
    config["pool_grid"] = f.encode.pool_grid;
    config["svm"] = f.train.svm;
    config["C"] = f.train.C;
    config["gamma"] = f.train.gamma;
    const json metrics = {{"accuracy", res.accuracy},
                          {"classes", target.n_classes()},
                          {"n_test", Xtest.cols()}};
    append_record(log, "transfer", config, metrics);
    std::cout << "transfer accuracy " << res.accuracy << " on "
              << Xtest.cols() << " samples\n";
  });
}

// ------------------------------------------------------------------ viz --

struct VizFlags {
  std::string model;
  std::string out = "filters.pgm";
};

void add_viz(CLI::App& app, VizFlags& f, std::string& log) {
  CLI::App* cmd =
      app.add_subcommand("viz", "write the filter montage of a model");
  cmd->add_option("--model", f.model, "model file")->required();
  cmd->add_option("--out", f.out, "montage image path (.pgm)");
  cmd->callback([&f, &log] {
    const Model m = load_model(f.model);
    const Image montage = filter_montage(m);
    write_pnm(montage, f.out);
    const json metrics = {{"width", montage.width},
                          {"height", montage.height}};
    append_record(log, "viz", {{"model", f.model}, {"out", f.out}}, metrics);
    std::cout << "wrote " << f.out << " (" << montage.width << "x"
              << montage.height << ")\n";
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"patch dictionary learning and texture classification"};
  app.require_subcommand(1);
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON config; command-line flags override");
  app.allow_config_extras(CLI::config_extras_mode::ignore_all);

  std::string log = "runs.ndjson";
  app.add_option("--log", log, "run log to append JSON records to");

  SynthFlags synth;
  LearnFlags learn;
  EncodeFlags encode;
  TrainFlags train;
  EvalFlags eval;
  TransferFlags transfer;
  VizFlags viz;
  add_synth(app, synth, log);
  add_learn(app, learn, log);
  add_encode(app, encode, log);
  add_train(app, train, log);
  add_eval(app, eval, log);
  add_transfer(app, transfer, log);
  add_viz(app, viz, log);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "msfl: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
