#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "msfl/image.hpp"
#include "msfl/rng.hpp"
#include "msfl/s3c.hpp"

namespace msfl::test {

// Self-deleting temp directory for file round-trip tests.
class TempDir {
public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("msfl_" + tag + "_" + std::to_string(counter_++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::string file(const std::string& name) const {
    return (path_ / name).string();
  }
  const std::filesystem::path& path() const { return path_; }

private:
  static inline int counter_ = 0;
  std::filesystem::path path_;
};

inline std::vector<unsigned char> read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::vector<unsigned char>(std::istreambuf_iterator<char>(in),
                                    std::istreambuf_iterator<char>());
}

inline void write_file_bytes(const std::string& path,
                             const std::vector<unsigned char>& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

// Reference FNV-1a-64, written independently of the library.
inline std::uint64_t fnv1a64(const unsigned char* data, std::size_t n) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= data[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

// Random dictionary with unit columns and pairwise |cos| below the limit,
// grown by rejection.
inline Eigen::MatrixXd low_coherence_dictionary(int dim, int atoms,
                                                double limit, Rng& rng) {
  Eigen::MatrixXd W(dim, atoms);
  int placed = 0;
  int tries = 0;
  while (placed < atoms) {
    if (++tries > 20000) throw std::runtime_error("coherence limit too tight");
    Eigen::VectorXd w(dim);
    for (int d = 0; d < dim; ++d) w[d] = rng.normal();
    w.normalize();
    bool ok = true;
    for (int j = 0; j < placed; ++j)
      if (std::abs(w.dot(W.col(j))) >= limit) {
        ok = false;
        break;
      }
    if (ok) W.col(placed++) = w;
  }
  return W;
}

// Random spike-and-slab parameters with a low-coherence dictionary.
inline S3CParams random_s3c_params(int dim, int atoms, Rng& rng,
                                   double coherence = 0.5) {
  S3CParams p;
  p.W = low_coherence_dictionary(dim, atoms, coherence, rng);
  p.b = Eigen::VectorXd::Zero(atoms);
  p.mu = Eigen::VectorXd::Zero(atoms);
  p.alpha = Eigen::VectorXd::Zero(atoms);
  for (int j = 0; j < atoms; ++j) {
    p.b[j] = rng.uniform(-2.0, 0.5);
    p.mu[j] = rng.uniform(0.5, 2.0) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
    p.alpha[j] = rng.uniform(0.5, 4.0);
  }
  p.beta = Eigen::VectorXd::Constant(dim, rng.uniform(2.0, 12.0));
  return p;
}

// Draws (v, h, s) from the generative model.
inline Eigen::VectorXd sample_visible(const S3CParams& p, Rng& rng) {
  const int n = p.dict_size();
  const int dim = p.input_dim();
  Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
  for (int j = 0; j < n; ++j) {
    const bool on = rng.uniform() < stable_sigmoid(p.b[j]);
    if (!on) continue;
    const double s = rng.normal(p.mu[j], 1.0 / std::sqrt(p.alpha[j]));
    v += s * p.W.col(j);
  }
  for (int d = 0; d < dim; ++d)
    v[d] += rng.normal() / std::sqrt(p.beta[d]);
  return v;
}

inline Eigen::VectorXd random_normal_vector(int dim, Rng& rng) {
  Eigen::VectorXd v(dim);
  for (int d = 0; d < dim; ++d) v[d] = rng.normal();
  return v;
}

// Greedy max-|cos| matching of learned columns onto reference columns.
// Returns per-reference |cos|; asserts nothing itself.
inline std::vector<double> match_atoms(const Eigen::MatrixXd& learned,
                                       const Eigen::MatrixXd& reference) {
  const int n = static_cast<int>(reference.cols());
  std::vector<bool> used(learned.cols(), false);
  std::vector<double> best(n, 0.0);
  for (int round = 0; round < n; ++round) {
    double top = -1.0;
    int top_r = -1, top_l = -1;
    for (int r = 0; r < n; ++r) {
      if (best[r] > 0.0) continue;
      for (int l = 0; l < learned.cols(); ++l) {
        if (used[l]) continue;
        const double c =
            std::abs(learned.col(l).normalized().dot(
                reference.col(r).normalized()));
        if (c > top) {
          top = c;
          top_r = r;
          top_l = l;
        }
      }
    }
    best[top_r] = top;
    used[top_l] = true;
  }
  return best;
}

// Quarter-turn rotation, (x, y) -> (y, w-1-x).
inline Image rot90(const Image& img) {
  Image out = Image::zeros(img.height, img.width, img.channels);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      for (int c = 0; c < img.channels; ++c)
        out.at(y, img.width - 1 - x, c) = img.at(x, y, c);
  return out;
}

// Random image with intensities quantized to 1/255 steps.
inline Image random_quantized_image(int w, int h, Rng& rng, int channels = 1) {
  Image img = Image::zeros(w, h, channels);
  for (double& p : img.pixels)
    p = static_cast<double>(rng.uniform_int(256)) / 255.0;
  return img;
}

}  // namespace msfl::test
