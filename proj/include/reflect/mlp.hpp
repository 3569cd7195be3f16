#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "reflect/types.hpp"

namespace reflect {

enum class Activation { kRelu, kIdentity };

std::string activation_name(Activation a);
Activation parse_activation(const std::string& name);

struct DenseLayer {
  Matrix weights;  // out x in
  Vector bias;     // out
  Activation activation = Activation::kIdentity;
};

struct MlpParams {
  std::vector<DenseLayer> layers;

  Index in_dim() const { return layers.front().weights.cols(); }
  Index out_dim() const { return layers.back().weights.rows(); }
  std::vector<Index> dims() const;
  Index param_count() const;
};

// Glorot-uniform weights, zero biases. Hidden layers use ReLU, the output
// layer is linear. dims = {in, hidden..., out}, at least two entries.
MlpParams init_params(std::uint64_t seed, const std::vector<Index>& dims);

struct ForwardTape {
  Vector input;
  std::vector<Vector> pre;   // pre-activation per layer
  std::vector<Vector> post;  // post-activation per layer; post.back() = output
};

Vector mlp_forward(const MlpParams& params, const Vector& x);
Vector mlp_forward(const MlpParams& params, const Vector& x, ForwardTape& tape);

struct MlpGrads {
  std::vector<Matrix> weights;
  std::vector<Vector> bias;
  Vector input;  // gradient with respect to the network input
};

MlpGrads zero_grads(const MlpParams& params);
void accumulate(MlpGrads& acc, const MlpGrads& g);

// Exact gradients of (upstream . output). relu'(0) is taken as 0.
MlpGrads mlp_backward(const MlpParams& params, const ForwardTape& tape,
                      const Vector& upstream);

// Mutable views over every trainable coordinate of a model, in a fixed order.
// Adam and the finite-difference checker both run over this flat space.
class ParamPack {
 public:
  void add(Matrix& m) {
    views_.push_back({m.data(), m.size()});
    total_ += m.size();
  }
  void add(Vector& v) {
    views_.push_back({v.data(), v.size()});
    total_ += v.size();
  }

  Index size() const { return total_; }
  Vector to_flat() const;
  void from_flat(const Vector& flat);

 private:
  struct View {
    double* data;
    Index size;
  };
  std::vector<View> views_;
  Index total_ = 0;
};

ParamPack pack(MlpParams& params);           // W0, b0, W1, b1, ...
void append_pack(ParamPack& pk, MlpParams& params);
Vector flatten_grads(const MlpGrads& g);     // same order as pack()

struct AdamState {
  double alpha = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  long step = 0;
  Vector m;
  Vector v;
};

AdamState make_adam_state(Index n, double alpha = 1e-4);

// Bias-corrected Adam over the flat space. Rejects non-finite gradients.
void adam_step(AdamState& state, ParamPack& params, const Vector& grad);
void adam_step(AdamState& state, MlpParams& params, const MlpGrads& grads);

struct GradCheckOptions {
  double h = 1e-5;
  Index max_coords = 10000;  // subsample above this many coordinates
  std::uint64_t subsample_seed = 0;
};

// Max relative error between `analytic` and central finite differences of
// `loss_at` around `theta`. Coordinates where both gradients are below 1e-5
// are treated as agreeing (that range is finite-differencing noise).
double grad_check(const std::function<double(const Vector&)>& loss_at,
                  const Vector& theta, const Vector& analytic,
                  const GradCheckOptions& opts = {});

}  // namespace reflect
