#include "msfl/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "msfl/errors.hpp"
#include "msfl/pnm.hpp"
#include "msfl/rng.hpp"

namespace fs = std::filesystem;

namespace msfl {

DatasetLayout layout_from_name(const std::string& name) {
  if (name == "kth-tips2") return DatasetLayout::KthTips2;
  if (name == "fmd") return DatasetLayout::Fmd;
  if (name == "flat") return DatasetLayout::Flat;
  throw ConfigError("unknown dataset layout '" + name +
                    "' (expected kth-tips2, fmd or flat)");
}

static bool is_image_file(const fs::path& p) {
  const std::string ext = p.extension().string();
  return ext == ".pgm" || ext == ".ppm";
}

static std::vector<fs::path> sorted_dirs(const fs::path& root) {
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(root))
    if (entry.is_directory()) dirs.push_back(entry.path());
  std::sort(dirs.begin(), dirs.end());
  return dirs;
}

static std::vector<fs::path> sorted_images(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && is_image_file(entry.path()))
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  return files;
}

// The 1..9 tag after "scale_" in KTH-TIPS2 file names, or -1.
static int parse_scale_tag(const std::string& name) {
  const std::size_t at = name.find("scale_");
  if (at == std::string::npos) return -1;
  const std::size_t digit = at + 6;
  if (digit >= name.size() ||
      !std::isdigit(static_cast<unsigned char>(name[digit])))
    return -1;
  const int scale = name[digit] - '0';
  return scale >= 1 && scale <= 9 ? scale : -1;
}

static void apply_scale_filter(LabeledDataset& ds,
                               const std::vector<int>& filter) {
  if (filter.empty()) return;
  std::vector<DatasetItem> kept;
  for (DatasetItem& item : ds.items) {
    const bool listed =
        std::find(filter.begin(), filter.end(), item.scale) != filter.end();
    if (item.split != "train" || listed) kept.push_back(std::move(item));
  }
  ds.items = std::move(kept);
}

LabeledDataset load_dataset(const std::string& root, DatasetLayout layout,
                            const DatasetOptions& opts) {
  const fs::path base(root);
  if (!fs::is_directory(base))
    throw IoError(root + ": dataset root is not a directory");

  LabeledDataset ds;
  ds.root = root;

  const auto rel = [&base](const fs::path& p) {
    return fs::relative(p, base).generic_string();
  };

  switch (layout) {
    case DatasetLayout::KthTips2: {
      const std::vector<fs::path> class_dirs = sorted_dirs(base);
      if (class_dirs.empty())
        throw ConfigError(root + ": no class directories");
      for (const fs::path& cdir : class_dirs) {
        const int class_id = static_cast<int>(ds.class_names.size());
        ds.class_names.push_back(cdir.filename().string());
        const std::vector<fs::path> instances = sorted_dirs(cdir);
        if (instances.empty())
          throw ConfigError(cdir.string() + ": class has no instance "
                            "directories");
        int found = 0;
        for (std::size_t k = 0; k < instances.size(); ++k) {
          const int instance = static_cast<int>(k) + 1;
          const bool train =
              std::find(opts.train_instances.begin(),
                        opts.train_instances.end(),
                        instance) != opts.train_instances.end();
          for (const fs::path& img : sorted_images(instances[k])) {
            DatasetItem item;
            item.path = rel(img);
            item.class_id = class_id;
            item.instance = instance;
            item.scale = parse_scale_tag(img.filename().string());
            item.split = train ? "train" : "test";
            ds.items.push_back(std::move(item));
            ++found;
          }
        }
        if (found == 0)
          throw ConfigError(cdir.string() + ": class has no images");
      }
      break;
    }
    case DatasetLayout::Fmd: {
      const std::vector<fs::path> class_dirs = sorted_dirs(base);
      if (class_dirs.empty())
        throw ConfigError(root + ": no class directories");
      for (const fs::path& cdir : class_dirs) {
        const int class_id = static_cast<int>(ds.class_names.size());
        ds.class_names.push_back(cdir.filename().string());
        const std::vector<fs::path> files = sorted_images(cdir);
        if (files.empty())
          throw ConfigError(cdir.string() + ": class has no images");
        std::vector<std::size_t> order(files.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        Rng rng(mix_seed(opts.split_seed, static_cast<std::uint64_t>(class_id)));
        rng.shuffle(order);
        const std::size_t n_train = files.size() / 2;
        for (std::size_t i = 0; i < order.size(); ++i) {
          DatasetItem item;
          item.path = rel(files[order[i]]);
          item.class_id = class_id;
          item.split = i < n_train ? "train" : "test";
          ds.items.push_back(std::move(item));
        }
      }
      break;
    }
    case DatasetLayout::Flat: {
      bool any_class = false;
      for (const char* split : {"train", "test"}) {
        const fs::path sdir = base / split;
        if (!fs::is_directory(sdir))
          throw ConfigError(sdir.string() + ": missing split directory");
        for (const fs::path& cdir : sorted_dirs(sdir)) {
          const std::string cname = cdir.filename().string();
          int class_id = -1;
          for (std::size_t i = 0; i < ds.class_names.size(); ++i)
            if (ds.class_names[i] == cname) class_id = static_cast<int>(i);
          if (class_id < 0) {
            class_id = static_cast<int>(ds.class_names.size());
            ds.class_names.push_back(cname);
          }
          const std::vector<fs::path> files = sorted_images(cdir);
          if (files.empty())
            throw ConfigError(cdir.string() + ": class has no images");
          any_class = true;
          for (const fs::path& img : files) {
            DatasetItem item;
            item.path = rel(img);
            item.class_id = class_id;
            item.scale = parse_scale_tag(img.filename().string());
            item.split = split;
            ds.items.push_back(std::move(item));
          }
        }
      }
      if (!any_class) throw ConfigError(root + ": no class directories");
      break;
    }
  }
  apply_scale_filter(ds, opts.scale_filter);
  return ds;
}

void save_manifest(const LabeledDataset& ds, const std::string& path) {
  nlohmann::json doc;
  doc["classes"] = ds.class_names;
  nlohmann::json items = nlohmann::json::array();
  for (const DatasetItem& item : ds.items) {
    items.push_back({{"path", item.path},
                     {"class", item.class_id},
                     {"instance", item.instance},
                     {"scale", item.scale},
                     {"split", item.split}});
  }
  doc["items"] = std::move(items);
  std::ofstream out(path);
  if (!out) throw IoError(path + ": cannot open for writing");
  out << doc.dump(2) << "\n";
  if (!out) throw IoError(path + ": write failed");
}

LabeledDataset load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path + ": cannot open");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path + ": bad manifest JSON: " + e.what());
  }
  LabeledDataset ds;
  ds.root = fs::path(path).parent_path().string();
  if (ds.root.empty()) ds.root = ".";
  try {
    ds.class_names = doc.at("classes").get<std::vector<std::string>>();
    for (const auto& j : doc.at("items")) {
      DatasetItem item;
      item.path = j.at("path").get<std::string>();
      item.class_id = j.at("class").get<int>();
      item.instance = j.value("instance", -1);
      item.scale = j.value("scale", -1);
      item.split = j.at("split").get<std::string>();
      if (item.class_id < 0 || item.class_id >= ds.n_classes())
        throw IoError(path + ": item '" + item.path +
                      "' has class id outside the class list");
      if (item.split != "train" && item.split != "test")
        throw IoError(path + ": item '" + item.path + "' has split '" +
                      item.split + "'");
      ds.items.push_back(std::move(item));
    }
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path + ": bad manifest JSON: " + e.what());
  }
  return ds;
}

std::pair<std::vector<Image>, std::vector<int>> load_split(
    const LabeledDataset& ds, const std::string& split) {
  std::vector<Image> images;
  std::vector<int> labels;
  for (const DatasetItem& item : ds.items) {
    if (item.split != split) continue;
    images.push_back(read_pnm((fs::path(ds.root) / item.path).string()));
    labels.push_back(item.class_id);
  }
  return {std::move(images), std::move(labels)};
}

}  // namespace msfl
