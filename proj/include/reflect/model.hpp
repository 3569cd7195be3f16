#pragma once

#include <cstdint>
#include <string>

#include "reflect/geometry.hpp"
#include "reflect/mlp.hpp"
#include "reflect/types.hpp"

namespace reflect {

// One attribute id gets one vector; it conditions every mirror the model emits.
struct AttributeVector {
  std::string id;
  Vector z;
  bool trainable = true;
};

// z ~ N(0, 1/D), seeded by both the run seed and the attribute id.
AttributeVector make_attribute_vector(const std::string& id, Index dim,
                                      std::uint64_t seed, bool trainable = true);

// Reflection transfer model. With parameterized = false one mirror is derived
// from z alone; with parameterized = true each input word gets its own mirror
// derived from [z ; v_x].
struct RefModel {
  AttributeVector attribute;
  MlpParams mlp_a;  // emits the mirror normal
  MlpParams mlp_c;  // emits the mirror point
  bool parameterized = false;

  Index dim() const { return attribute.z.size(); }
};

// {in, hidden x (n_layers - 1), out}
std::vector<Index> mlp_dims(Index in, Index out, Index hidden, Index n_layers);

RefModel make_ref_model(const std::string& attribute_id, Index dim,
                        bool parameterized, Index hidden, Index n_layers,
                        std::uint64_t seed, bool z_trainable = true);

void validate(const RefModel& model);

// z for the single mirror, [z ; v_x] for parameterized mirrors.
Vector model_input(const RefModel& model, const Vector* v_x);

// Mirror for an input word. v_x may be null for a single-mirror model (it is
// ignored there); a parameterized model requires it.
Mirror mirror_for(const RefModel& model, const Vector* v_x = nullptr);
inline Mirror mirror_for(const RefModel& model, const Vector& v_x) {
  return mirror_for(model, &v_x);
}

// reflect(mirror_for(model, v_x), v_x)
Vector transfer(const RefModel& model, const Vector& v_x);

// Trainable parameter order: mlp_a, mlp_c, then z when trainable.
ParamPack pack(RefModel& model);

}  // namespace reflect
