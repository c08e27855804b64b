#include "genv2v/neural.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace genv2v::neural {

bool Gradients::all_finite() const {
  return std::all_of(layers.begin(), layers.end(),
                     [](const Layer& l) { return l.weight.allFinite() && l.bias.allFinite(); });
}

Mlp::Mlp(std::vector<int> dims) : dims_(std::move(dims)) {
  if (dims_.size() < 2) throw std::invalid_argument("Mlp: need at least input and output dims");
  for (int d : dims_) {
    if (d <= 0) throw std::invalid_argument("Mlp: layer widths must be positive");
  }
  for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
    layers_.push_back(Layer{Matrix::Zero(dims_[l + 1], dims_[l]), Vector::Zero(dims_[l + 1])});
  }
}

Mlp Mlp::init(std::vector<int> dims, std::uint64_t seed) {
  Mlp net(std::move(dims));
  Rng rng = make_rng(seed, {stream::kNetworkInit});
  for (auto& layer : net.layers_) {
    std::normal_distribution<double> normal(0.0, std::sqrt(2.0 / static_cast<double>(layer.weight.cols())));
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) layer.weight(r, c) = normal(rng);
    }
  }
  return net;
}

Vector Mlp::forward(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != input_dim()) {
    throw std::invalid_argument("Mlp::forward: input has " + std::to_string(x.size()) + " entries, expected " +
                                std::to_string(input_dim()));
  }
  Matrix in = Eigen::Map<const Vector>(x.data(), static_cast<Eigen::Index>(x.size()));
  return forward_batch(in).col(0);
}

Matrix Mlp::forward_batch(const Matrix& x) const {
  if (x.rows() != input_dim()) throw std::invalid_argument("Mlp::forward_batch: input dimension mismatch");
  Matrix a = x;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Matrix z = layers_[l].weight * a;
    z.colwise() += layers_[l].bias;
    if (l + 1 < layers_.size()) z = z.cwiseMax(0.0);
    a = std::move(z);
  }
  return a;
}

Gradients Mlp::backward(const Matrix& x, const Matrix& d_output) const {
  if (x.rows() != input_dim() || d_output.rows() != output_dim() || x.cols() != d_output.cols()) {
    throw std::invalid_argument("Mlp::backward: shape mismatch");
  }
  // Post-activation of every layer; activations[0] is the input.
  std::vector<Matrix> activations{x};
  activations.reserve(layers_.size() + 1);
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Matrix z = layers_[l].weight * activations.back();
    z.colwise() += layers_[l].bias;
    if (l + 1 < layers_.size()) z = z.cwiseMax(0.0);
    activations.push_back(std::move(z));
  }

  Gradients grads;
  grads.layers.resize(layers_.size());
  Matrix delta = d_output;
  for (std::size_t l = layers_.size(); l-- > 0;) {
    grads.layers[l].weight = delta * activations[l].transpose();
    grads.layers[l].bias = delta.rowwise().sum();
    if (l > 0) {
      Matrix back = layers_[l].weight.transpose() * delta;
      // ReLU derivative taken from the post-activation: zero where it clipped.
      delta = (activations[l].array() > 0.0).select(back, 0.0);
    }
  }
  return grads;
}

std::size_t Mlp::num_parameters() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  return n;
}

std::vector<double> Mlp::flatten() const {
  std::vector<double> out;
  out.reserve(num_parameters());
  for (const auto& l : layers_) {
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) out.push_back(l.weight(r, c));
    }
    for (Eigen::Index i = 0; i < l.bias.size(); ++i) out.push_back(l.bias(i));
  }
  return out;
}

void Mlp::assign(std::span<const double> flat) {
  if (flat.size() != num_parameters()) throw std::invalid_argument("Mlp::assign: parameter count mismatch");
  std::size_t i = 0;
  for (auto& l : layers_) {
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) l.weight(r, c) = flat[i++];
    }
    for (Eigen::Index b = 0; b < l.bias.size(); ++b) l.bias(b) = flat[i++];
  }
}

bool Mlp::operator==(const Mlp& other) const {
  if (dims_ != other.dims_) return false;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    if (layers_[l].weight != other.layers_[l].weight || layers_[l].bias != other.layers_[l].bias) return false;
  }
  return true;
}

void copy_parameters(const Mlp& src, Mlp& dst) {
  if (&src == &dst) return;
  if (!src.same_architecture(dst)) throw std::invalid_argument("copy_parameters: architecture mismatch");
  dst.layers() = src.layers();
}

AdamOptimizer::AdamOptimizer(const Mlp& net, AdamConfig config) : config_(config) {
  for (const auto& l : net.layers()) {
    first_.push_back(Layer{Matrix::Zero(l.weight.rows(), l.weight.cols()), Vector::Zero(l.bias.size())});
  }
  second_ = first_;
}

void AdamOptimizer::step(Mlp& net, const Gradients& grads) {
  if (grads.layers.size() != net.layers().size()) throw std::invalid_argument("AdamOptimizer: shape mismatch");
  if (!grads.all_finite()) throw NonFiniteGradient("AdamOptimizer: non-finite gradient, update skipped");
  ++steps_;
  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  const double correction1 = 1.0 - std::pow(b1, static_cast<double>(steps_));
  const double correction2 = 1.0 - std::pow(b2, static_cast<double>(steps_));
  const double lr = config_.learning_rate;
  const double eps = config_.epsilon;
  auto update = [&](auto& param, const auto& g, auto& m, auto& v) {
    m = b1 * m + (1.0 - b1) * g;
    v = b2 * v + (1.0 - b2) * g.cwiseProduct(g);
    param.array() -= lr * (m.array() / correction1) / ((v.array() / correction2).sqrt() + eps);
  };
  for (std::size_t l = 0; l < grads.layers.size(); ++l) {
    auto& layer = net.layers()[l];
    update(layer.weight, grads.layers[l].weight, first_[l].weight, second_[l].weight);
    update(layer.bias, grads.layers[l].bias, first_[l].bias, second_[l].bias);
  }
}

HuberResult huber_loss(std::span<const double> pred, std::span<const double> target, double delta) {
  if (pred.size() != target.size()) throw std::invalid_argument("huber_loss: length mismatch");
  if (!(delta > 0)) throw std::invalid_argument("huber_loss: delta must be positive");
  HuberResult out;
  out.gradient = Vector::Zero(static_cast<Eigen::Index>(pred.size()));
  double total = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double e = pred[i] - target[i];
    const double a = std::abs(e);
    if (a <= delta) {
      total += 0.5 * e * e;
      out.gradient(static_cast<Eigen::Index>(i)) = e;
    } else {
      total += delta * (a - 0.5 * delta);
      out.gradient(static_cast<Eigen::Index>(i)) = e > 0 ? delta : -delta;
    }
  }
  out.loss = pred.empty() ? 0.0 : total / static_cast<double>(pred.size());
  return out;
}

namespace {

void write_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 4);
}

void write_f64(std::ostream& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t read_le(std::istream& in, int bytes) {
  unsigned char b[8] = {};
  in.read(reinterpret_cast<char*>(b), bytes);
  if (!in) throw std::runtime_error("load_parameters: truncated file");
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

constexpr std::size_t kMagicLen = sizeof(kParameterMagic) - 1;

}  // namespace

void save_parameters(const Mlp& net, std::ostream& out) {
  out.write(kParameterMagic, kMagicLen);
  write_u32(out, static_cast<std::uint32_t>(net.dims().size()));
  for (int d : net.dims()) write_u32(out, static_cast<std::uint32_t>(d));
  for (double p : net.flatten()) write_f64(out, p);
  if (!out) throw std::runtime_error("save_parameters: write failed");
}

Mlp load_parameters(std::istream& in) {
  char magic[kMagicLen];
  in.read(magic, kMagicLen);
  if (!in || std::memcmp(magic, kParameterMagic, kMagicLen) != 0) {
    throw std::runtime_error("load_parameters: bad magic, not a GV2VNN1 file");
  }
  const auto count = static_cast<std::uint32_t>(read_le(in, 4));
  if (count < 2 || count > 64) throw std::runtime_error("load_parameters: implausible layer count");
  std::vector<int> dims;
  for (std::uint32_t i = 0; i < count; ++i) dims.push_back(static_cast<int>(read_le(in, 4)));
  Mlp net(dims);
  std::vector<double> flat(net.num_parameters());
  for (auto& p : flat) p = std::bit_cast<double>(read_le(in, 8));
  net.assign(flat);
  return net;
}

void save_parameters(const Mlp& net, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_parameters: cannot open " + path.string());
  save_parameters(net, out);
}

Mlp load_parameters(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_parameters: cannot open " + path.string());
  return load_parameters(in);
}

}  // namespace genv2v::neural
