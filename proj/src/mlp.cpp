#include "reflect/mlp.hpp"

#include <cmath>

#include "reflect/rng.hpp"

namespace reflect {

std::string activation_name(Activation a) {
  return a == Activation::kRelu ? "relu" : "identity";
}

Activation parse_activation(const std::string& name) {
  if (name == "relu") return Activation::kRelu;
  if (name == "identity") return Activation::kIdentity;
  throw DataError("unknown activation: " + name);
}

std::vector<Index> MlpParams::dims() const {
  std::vector<Index> d;
  d.push_back(in_dim());
  for (const auto& l : layers) d.push_back(l.weights.rows());
  return d;
}

Index MlpParams::param_count() const {
  Index n = 0;
  for (const auto& l : layers) n += l.weights.size() + l.bias.size();
  return n;
}

MlpParams init_params(std::uint64_t seed, const std::vector<Index>& dims) {
  if (dims.size() < 2) throw DataError("init_params: need at least two layer sizes");
  for (const Index d : dims)
    if (d < 1) throw DataError("init_params: layer sizes must be positive");

  Rng rng(seed);
  MlpParams params;
  for (std::size_t k = 0; k + 1 < dims.size(); ++k) {
    const Index in = dims[k];
    const Index out = dims[k + 1];
    DenseLayer layer;
    layer.weights.resize(out, in);
    const double bound = std::sqrt(6.0 / static_cast<double>(in + out));
    for (Index i = 0; i < out; ++i)
      for (Index j = 0; j < in; ++j) layer.weights(i, j) = rng.uniform(-bound, bound);
    layer.bias = Vector::Zero(out);
    layer.activation =
        (k + 2 == dims.size()) ? Activation::kIdentity : Activation::kRelu;
    params.layers.push_back(std::move(layer));
  }
  return params;
}

namespace {

Vector apply_activation(Activation act, const Vector& z) {
  if (act == Activation::kRelu) return z.cwiseMax(0.0);
  return z;
}

}  // namespace

Vector mlp_forward(const MlpParams& params, const Vector& x) {
  if (x.size() != params.in_dim())
    throw DimensionError("mlp_forward: input dimension mismatch");
  Vector h = x;
  for (const auto& layer : params.layers)
    h = apply_activation(layer.activation, layer.weights * h + layer.bias);
  return h;
}

Vector mlp_forward(const MlpParams& params, const Vector& x, ForwardTape& tape) {
  if (x.size() != params.in_dim())
    throw DimensionError("mlp_forward: input dimension mismatch");
  tape.input = x;
  tape.pre.clear();
  tape.post.clear();
  tape.pre.reserve(params.layers.size());
  tape.post.reserve(params.layers.size());
  Vector h = x;
  for (const auto& layer : params.layers) {
    Vector z = layer.weights * h + layer.bias;
    h = apply_activation(layer.activation, z);
    tape.pre.push_back(std::move(z));
    tape.post.push_back(h);
  }
  return h;
}

MlpGrads zero_grads(const MlpParams& params) {
  MlpGrads g;
  g.weights.reserve(params.layers.size());
  g.bias.reserve(params.layers.size());
  for (const auto& l : params.layers) {
    g.weights.push_back(Matrix::Zero(l.weights.rows(), l.weights.cols()));
    g.bias.push_back(Vector::Zero(l.bias.size()));
  }
  g.input = Vector::Zero(params.in_dim());
  return g;
}

void accumulate(MlpGrads& acc, const MlpGrads& g) {
  for (std::size_t l = 0; l < acc.weights.size(); ++l) {
    acc.weights[l] += g.weights[l];
    acc.bias[l] += g.bias[l];
  }
  acc.input += g.input;
}

MlpGrads mlp_backward(const MlpParams& params, const ForwardTape& tape,
                      const Vector& upstream) {
  const std::size_t n_layers = params.layers.size();
  if (tape.pre.size() != n_layers || tape.post.size() != n_layers)
    throw DimensionError("mlp_backward: tape does not match network depth");
  if (upstream.size() != params.out_dim())
    throw DimensionError("mlp_backward: upstream gradient dimension mismatch");

  MlpGrads g;
  g.weights.resize(n_layers);
  g.bias.resize(n_layers);

  Vector delta = upstream;
  for (std::size_t li = n_layers; li-- > 0;) {
    const DenseLayer& layer = params.layers[li];
    if (layer.activation == Activation::kRelu)
      delta = (tape.pre[li].array() > 0.0).select(delta, 0.0);
    const Vector& layer_in = (li == 0) ? tape.input : tape.post[li - 1];
    if (layer_in.size() != layer.weights.cols())
      throw DimensionError("mlp_backward: tape activation shape mismatch");
    g.weights[li] = delta * layer_in.transpose();
    g.bias[li] = delta;
    delta = layer.weights.transpose() * delta;
  }
  g.input = delta;
  return g;
}

Vector ParamPack::to_flat() const {
  Vector flat(total_);
  Index at = 0;
  for (const auto& v : views_) {
    flat.segment(at, v.size) = Eigen::Map<const Vector>(v.data, v.size);
    at += v.size;
  }
  return flat;
}

void ParamPack::from_flat(const Vector& flat) {
  if (flat.size() != total_)
    throw DimensionError("ParamPack::from_flat: size mismatch");
  Index at = 0;
  for (const auto& v : views_) {
    Eigen::Map<Vector>(v.data, v.size) = flat.segment(at, v.size);
    at += v.size;
  }
}

void append_pack(ParamPack& pk, MlpParams& params) {
  for (auto& l : params.layers) {
    pk.add(l.weights);
    pk.add(l.bias);
  }
}

ParamPack pack(MlpParams& params) {
  ParamPack pk;
  append_pack(pk, params);
  return pk;
}

Vector flatten_grads(const MlpGrads& g) {
  Index total = 0;
  for (std::size_t l = 0; l < g.weights.size(); ++l)
    total += g.weights[l].size() + g.bias[l].size();
  Vector flat(total);
  Index at = 0;
  for (std::size_t l = 0; l < g.weights.size(); ++l) {
    flat.segment(at, g.weights[l].size()) =
        Eigen::Map<const Vector>(g.weights[l].data(), g.weights[l].size());
    at += g.weights[l].size();
    flat.segment(at, g.bias[l].size()) = g.bias[l];
    at += g.bias[l].size();
  }
  return flat;
}

AdamState make_adam_state(Index n, double alpha) {
  AdamState s;
  s.alpha = alpha;
  s.m = Vector::Zero(n);
  s.v = Vector::Zero(n);
  return s;
}

void adam_step(AdamState& state, ParamPack& params, const Vector& grad) {
  if (grad.size() != params.size() || grad.size() != state.m.size())
    throw DimensionError("adam_step: gradient shape mismatch");
  if (!grad.allFinite()) throw NumericError("adam_step: non-finite gradient");

  ++state.step;
  state.m = state.beta1 * state.m + (1.0 - state.beta1) * grad;
  state.v = state.beta2 * state.v +
            (1.0 - state.beta2) * grad.cwiseProduct(grad);
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  Vector theta = params.to_flat();
  theta.array() -= state.alpha * (state.m.array() / bc1) /
                   ((state.v.array() / bc2).sqrt() + state.eps);
  params.from_flat(theta);
}

void adam_step(AdamState& state, MlpParams& params, const MlpGrads& grads) {
  ParamPack pk = pack(params);
  adam_step(state, pk, flatten_grads(grads));
}

double grad_check(const std::function<double(const Vector&)>& loss_at,
                  const Vector& theta, const Vector& analytic,
                  const GradCheckOptions& opts) {
  if (theta.size() != analytic.size())
    throw DimensionError("grad_check: gradient shape mismatch");
  if (opts.h <= 0.0) throw DataError("grad_check: h must be positive");

  std::vector<Index> coords;
  if (theta.size() > opts.max_coords) {
    std::vector<Index> all(static_cast<std::size_t>(theta.size()));
    for (Index i = 0; i < theta.size(); ++i) all[static_cast<std::size_t>(i)] = i;
    Rng rng(opts.subsample_seed);
    rng.shuffle(all);
    coords.assign(all.begin(), all.begin() + opts.max_coords);
  } else {
    coords.resize(static_cast<std::size_t>(theta.size()));
    for (Index i = 0; i < theta.size(); ++i) coords[static_cast<std::size_t>(i)] = i;
  }

  double max_err = 0.0;
  Vector probe = theta;
  for (const Index i : coords) {
    const double saved = probe[i];
    probe[i] = saved + opts.h;
    const double up = loss_at(probe);
    probe[i] = saved - opts.h;
    const double down = loss_at(probe);
    probe[i] = saved;
    const double numeric = (up - down) / (2.0 * opts.h);
    const double ana = analytic[i];
    if (std::max(std::abs(numeric), std::abs(ana)) < 1e-5) continue;
    const double err = std::abs(ana - numeric) / std::max(std::abs(numeric), 1e-12);
    if (err > max_err) max_err = err;
  }
  return max_err;
}

}  // namespace reflect
