#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "msfl/image.hpp"

namespace msfl {

struct DatasetItem {
  std::string path;  // relative to the dataset root
  int class_id = 0;
  int instance = -1;  // 1-based material instance, -1 when absent
  int scale = -1;     // 1..9 scale tag, -1 when absent
  std::string split;  // "train" or "test"
};

struct LabeledDataset {
  std::string root;
  std::vector<std::string> class_names;
  std::vector<DatasetItem> items;

  int n_classes() const { return static_cast<int>(class_names.size()); }
};

// Directory conventions:
//   kth-tips2: root/<class>/<instance dir>/<images>; instances numbered by
//              sorted directory order; scale tag parsed from "scale_<k>" in
//              the file name; instances listed in train_instances go to the
//              training split.
//   fmd:       root/<class>/<images>; a seeded random half of each class
//              trains, the rest tests.
//   flat:      root/train/<class>/<images> and root/test/<class>/<images>.
enum class DatasetLayout { KthTips2, Fmd, Flat };

DatasetLayout layout_from_name(const std::string& name);

struct DatasetOptions {
  std::vector<int> train_instances = {1, 2};
  std::uint64_t split_seed = 0;
  // When nonempty, only training items with these scale tags are kept;
  // the test split is never filtered.
  std::vector<int> scale_filter;
};

LabeledDataset load_dataset(const std::string& root, DatasetLayout layout,
                            const DatasetOptions& opts = {});

// JSON manifest: {"classes": [...], "items": [{path, class, instance,
// scale, split}, ...]}. The root is taken from the manifest's directory.
void save_manifest(const LabeledDataset& ds, const std::string& path);
LabeledDataset load_manifest(const std::string& path);

// Images and labels of one split, in item order.
std::pair<std::vector<Image>, std::vector<int>> load_split(
    const LabeledDataset& ds, const std::string& split);

}  // namespace msfl
