#include "reflect/checkpoint.hpp"

#include <fstream>

#include "reflect/io.hpp"

namespace reflect {

namespace {

using nlohmann::json;

json vector_to_json(const Vector& v) {
  json arr = json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Vector vector_from_json(const json& j) {
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v[static_cast<Index>(i)] = j[i].get<double>();
  return v;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j) {
  const Index rows = static_cast<Index>(j.size());
  if (rows == 0) throw DataError("checkpoint: empty weight matrix");
  const Index cols = static_cast<Index>(j[0].size());
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    if (static_cast<Index>(j[static_cast<std::size_t>(i)].size()) != cols)
      throw DataError("checkpoint: ragged weight matrix");
    for (Index c = 0; c < cols; ++c)
      m(i, c) = j[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)]
                    .get<double>();
  }
  return m;
}

json attribute_to_json(const AttributeVector& a) {
  return json{{"id", a.id}, {"z", vector_to_json(a.z)}, {"trainable", a.trainable}};
}

AttributeVector attribute_from_json(const json& j) {
  AttributeVector a;
  a.id = j.at("id").get<std::string>();
  a.z = vector_from_json(j.at("z"));
  a.trainable = j.at("trainable").get<bool>();
  return a;
}

}  // namespace

json to_json(const MlpParams& params) {
  json dims = json::array();
  for (const Index d : params.dims()) dims.push_back(d);
  json layers = json::array();
  json activations = json::array();
  for (const auto& l : params.layers) {
    layers.push_back(json{{"weights", matrix_to_json(l.weights)},
                          {"bias", vector_to_json(l.bias)}});
    activations.push_back(activation_name(l.activation));
  }
  return json{{"dims", std::move(dims)},
              {"activations", std::move(activations)},
              {"layers", std::move(layers)}};
}

MlpParams mlp_params_from_json(const json& j) {
  MlpParams params;
  const auto& layers = j.at("layers");
  const auto& activations = j.at("activations");
  if (layers.size() != activations.size() || layers.empty())
    throw DataError("checkpoint: malformed MLP");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    DenseLayer layer;
    layer.weights = matrix_from_json(layers[l].at("weights"));
    layer.bias = vector_from_json(layers[l].at("bias"));
    if (layer.bias.size() != layer.weights.rows())
      throw DataError("checkpoint: bias shape mismatch");
    layer.activation = parse_activation(activations[l].get<std::string>());
    params.layers.push_back(std::move(layer));
  }
  const auto dims = params.dims();
  const auto& stored = j.at("dims");
  if (stored.size() != dims.size())
    throw DataError("checkpoint: dims do not match weights");
  for (std::size_t i = 0; i < dims.size(); ++i)
    if (stored[i].get<Index>() != dims[i])
      throw DataError("checkpoint: dims do not match weights");
  for (std::size_t l = 0; l + 1 < params.layers.size(); ++l)
    if (params.layers[l].weights.rows() != params.layers[l + 1].weights.cols())
      throw DataError("checkpoint: layer dimensions do not chain");
  return params;
}

json to_json(const Checkpoint& ckpt) {
  json j{{"format", 1},
         {"kind", kind_name(ckpt.kind)},
         {"dim", ckpt.dim},
         {"seed", ckpt.seed},
         {"steps", ckpt.steps},
         {"config", ckpt.config}};
  if (const auto* ref = std::get_if<RefModel>(&ckpt.model)) {
    j["model"] = json{{"attribute", attribute_to_json(ref->attribute)},
                      {"mlp_a", to_json(ref->mlp_a)},
                      {"mlp_c", to_json(ref->mlp_c)},
                      {"parameterized", ref->parameterized}};
  } else if (const auto* mlp = std::get_if<MlpTransferModel>(&ckpt.model)) {
    j["model"] = json{{"attribute", attribute_to_json(mlp->attribute)},
                      {"net", to_json(mlp->net)}};
  } else {
    const auto& d = std::get<DifferenceVector>(ckpt.model);
    json m{{"d", vector_to_json(d.d)}};
    if (d.source_pair)
      m["source_pair"] = json::array({d.source_pair->first, d.source_pair->second});
    else
      m["source_pair"] = nullptr;
    j["model"] = std::move(m);
  }
  return j;
}

Checkpoint checkpoint_from_json(const json& j) {
  if (j.at("format").get<int>() != 1)
    throw DataError("checkpoint: unsupported format version");
  Checkpoint ckpt;
  ckpt.kind = parse_kind(j.at("kind").get<std::string>());
  ckpt.dim = j.at("dim").get<Index>();
  ckpt.seed = j.at("seed").get<std::uint64_t>();
  ckpt.steps = j.at("steps").get<long>();
  ckpt.config = j.value("config", json::object());

  const auto& m = j.at("model");
  if (ckpt.kind == ModelKind::kRef || ckpt.kind == ModelKind::kRefPm) {
    RefModel ref;
    ref.attribute = attribute_from_json(m.at("attribute"));
    ref.mlp_a = mlp_params_from_json(m.at("mlp_a"));
    ref.mlp_c = mlp_params_from_json(m.at("mlp_c"));
    ref.parameterized = m.at("parameterized").get<bool>();
    if (ref.parameterized != (ckpt.kind == ModelKind::kRefPm))
      throw DataError("checkpoint: kind does not match the parameterized flag");
    validate(ref);
    ckpt.model = std::move(ref);
  } else if (ckpt.kind == ModelKind::kMlp) {
    MlpTransferModel mlp;
    mlp.attribute = attribute_from_json(m.at("attribute"));
    mlp.net = mlp_params_from_json(m.at("net"));
    validate(mlp);
    ckpt.model = std::move(mlp);
  } else {
    DifferenceVector d;
    d.d = vector_from_json(m.at("d"));
    if (m.contains("source_pair") && !m.at("source_pair").is_null()) {
      const auto& sp = m.at("source_pair");
      d.source_pair = TokenPair{sp.at(0).get<std::string>(),
                                sp.at(1).get<std::string>()};
    }
    ckpt.model = std::move(d);
  }
  return ckpt;
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  atomic_write_text(path, to_json(ckpt).dump(2) + "\n");
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open checkpoint: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError("checkpoint " + path + ": " + e.what());
  }
  return checkpoint_from_json(j);
}

}  // namespace reflect
