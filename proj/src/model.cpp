#include "reflect/model.hpp"

#include <cmath>

#include "reflect/rng.hpp"

namespace reflect {

AttributeVector make_attribute_vector(const std::string& id, Index dim,
                                      std::uint64_t seed, bool trainable) {
  if (dim < 1) throw DataError("attribute vector dimension must be positive");
  Rng rng(seed ^ hash64(id));
  AttributeVector attr;
  attr.id = id;
  attr.z = rng.normal_vector(dim) / std::sqrt(static_cast<double>(dim));
  attr.trainable = trainable;
  return attr;
}

std::vector<Index> mlp_dims(Index in, Index out, Index hidden, Index n_layers) {
  if (n_layers < 1) throw DataError("mlp_dims: need at least one layer");
  std::vector<Index> dims;
  dims.push_back(in);
  for (Index k = 0; k + 1 < n_layers; ++k) dims.push_back(hidden);
  dims.push_back(out);
  return dims;
}

RefModel make_ref_model(const std::string& attribute_id, Index dim,
                        bool parameterized, Index hidden, Index n_layers,
                        std::uint64_t seed, bool z_trainable) {
  RefModel model;
  model.attribute = make_attribute_vector(attribute_id, dim, seed, z_trainable);
  model.parameterized = parameterized;
  const Index in = parameterized ? 2 * dim : dim;
  model.mlp_a = init_params(seed + 1, mlp_dims(in, dim, hidden, n_layers));
  model.mlp_c = init_params(seed + 2, mlp_dims(in, dim, hidden, n_layers));
  validate(model);
  return model;
}

void validate(const RefModel& model) {
  const Index d = model.dim();
  const Index in = model.parameterized ? 2 * d : d;
  if (model.mlp_a.in_dim() != in || model.mlp_c.in_dim() != in)
    throw DimensionError("ref model: mirror MLP input dimension mismatch");
  if (model.mlp_a.out_dim() != d || model.mlp_c.out_dim() != d)
    throw DimensionError("ref model: mirror MLP output dimension mismatch");
}

Vector model_input(const RefModel& model, const Vector* v_x) {
  if (!model.parameterized) return model.attribute.z;
  if (!v_x)
    throw DataError("parameterized model needs the input word vector");
  if (v_x->size() != model.dim())
    throw DimensionError("model input: word vector dimension mismatch");
  Vector in(2 * model.dim());
  in << model.attribute.z, *v_x;
  return in;
}

Mirror mirror_for(const RefModel& model, const Vector* v_x) {
  const Vector in = model_input(model, v_x);
  Mirror m;
  m.normal = mlp_forward(model.mlp_a, in);
  m.point = mlp_forward(model.mlp_c, in);
  if (m.normal.norm() < kMirrorNormMin)
    throw DegenerateMirrorError("model produced a degenerate mirror normal");
  return m;
}

Vector transfer(const RefModel& model, const Vector& v_x) {
  if (v_x.size() != model.dim())
    throw DimensionError("transfer: word vector dimension mismatch");
  const Mirror m = model.parameterized ? mirror_for(model, &v_x)
                                       : mirror_for(model);
  return reflect(m, v_x);
}

ParamPack pack(RefModel& model) {
  ParamPack pk;
  append_pack(pk, model.mlp_a);
  append_pack(pk, model.mlp_c);
  if (model.attribute.trainable) pk.add(model.attribute.z);
  return pk;
}

}  // namespace reflect
