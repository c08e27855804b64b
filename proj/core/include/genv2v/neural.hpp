#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "genv2v/rng.hpp"

namespace genv2v::neural {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Dense layer, weight is (out x in).
struct Layer {
  Matrix weight;
  Vector bias;
};

/// Per-layer gradient with the same shapes as the network's layers.
struct Gradients {
  std::vector<Layer> layers;

  bool all_finite() const;
};

/// Fully connected network: ReLU on hidden layers, identity output.
/// Batches are column-major: one sample per column.
class Mlp {
 public:
  Mlp() = default;
  /// All-zero parameters. Throws std::invalid_argument for fewer than two
  /// dims or a non-positive width.
  explicit Mlp(std::vector<int> dims);

  /// He-normal weights (variance 2 / fan_in), zero biases.
  static Mlp init(std::vector<int> dims, std::uint64_t seed);

  Vector forward(std::span<const double> x) const;
  Matrix forward_batch(const Matrix& x) const;

  /// Gradient of L with respect to every parameter, given dL/d(output) for
  /// each column of `x`. Per-sample contributions are summed.
  Gradients backward(const Matrix& x, const Matrix& d_output) const;

  const std::vector<int>& dims() const { return dims_; }
  int input_dim() const { return dims_.front(); }
  int output_dim() const { return dims_.back(); }
  std::vector<Layer>& layers() { return layers_; }
  const std::vector<Layer>& layers() const { return layers_; }

  std::size_t num_parameters() const;
  /// Per layer: weight row-major, then bias.
  std::vector<double> flatten() const;
  void assign(std::span<const double> flat);

  bool same_architecture(const Mlp& other) const { return dims_ == other.dims_; }
  bool operator==(const Mlp& other) const;

 private:
  std::vector<int> dims_;
  std::vector<Layer> layers_;
};

/// Hard target sync. Throws std::invalid_argument on architecture mismatch.
void copy_parameters(const Mlp& src, Mlp& dst);

struct AdamConfig {
  double learning_rate = 5e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

class NonFiniteGradient : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bias-corrected adaptive-moment update.
class AdamOptimizer {
 public:
  AdamOptimizer() = default;
  AdamOptimizer(const Mlp& net, AdamConfig config);

  /// Throws NonFiniteGradient (leaving `net` and the moments untouched) if
  /// any gradient entry is NaN or infinite.
  void step(Mlp& net, const Gradients& grads);

  std::int64_t steps() const { return steps_; }
  const AdamConfig& config() const { return config_; }

 private:
  AdamConfig config_;
  std::int64_t steps_ = 0;
  std::vector<Layer> first_;
  std::vector<Layer> second_;
};

struct HuberResult {
  double loss = 0.0;  // mean over elements
  Vector gradient;    // d(element loss)/d(pred), clipped to [-delta, delta]
};

HuberResult huber_loss(std::span<const double> pred, std::span<const double> target, double delta = 1.0);

/// Fixed-capacity FIFO ring with uniform sampling without replacement.
template <typename T>
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw std::invalid_argument("ReplayBuffer: capacity must be positive");
    storage_.reserve(std::min<std::size_t>(capacity, 1 << 16));
  }

  void push(T item) {
    if (storage_.size() < capacity_) {
      storage_.push_back(std::move(item));
    } else {
      storage_[head_] = std::move(item);
    }
    head_ = (head_ + 1) % capacity_;
  }

  /// Indices into the ring (Floyd's subset algorithm). Throws
  /// std::length_error when fewer than `batch` items are stored.
  std::vector<std::size_t> sample_indices(std::size_t batch, Rng& rng) const {
    const std::size_t n = storage_.size();
    if (batch > n) {
      throw std::length_error("ReplayBuffer: requested " + std::to_string(batch) + " samples from " +
                              std::to_string(n));
    }
    std::vector<std::size_t> picked;
    picked.reserve(batch);
    for (std::size_t j = n - batch; j < n; ++j) {
      std::uniform_int_distribution<std::size_t> pick(0, j);
      const std::size_t t = pick(rng);
      const bool seen = std::find(picked.begin(), picked.end(), t) != picked.end();
      picked.push_back(seen ? j : t);
    }
    return picked;
  }

  std::vector<const T*> sample(std::size_t batch, Rng& rng) const {
    std::vector<const T*> out;
    for (auto i : sample_indices(batch, rng)) out.push_back(&storage_[i]);
    return out;
  }

  const T& operator[](std::size_t i) const { return storage_[i]; }
  std::size_t size() const { return storage_.size(); }
  std::size_t capacity() const { return capacity_; }
  void clear() {
    storage_.clear();
    head_ = 0;
  }

 private:
  std::size_t capacity_;
  std::size_t head_ = 0;
  std::vector<T> storage_;
};

/// Binary parameter file: "GV2VNN1", u32 dim count, u32 dims, then every
/// parameter (flatten() order) as little-endian f64.
void save_parameters(const Mlp& net, std::ostream& out);
Mlp load_parameters(std::istream& in);
void save_parameters(const Mlp& net, const std::filesystem::path& path);
Mlp load_parameters(const std::filesystem::path& path);

inline constexpr char kParameterMagic[] = "GV2VNN1";

}  // namespace genv2v::neural
