#include "reflect/baselines.hpp"

namespace reflect {

KnowledgeTable KnowledgeTable::from_dataset(const AttributeDataset& dataset) {
  KnowledgeTable k;
  for (const PairList* pairs :
       {&dataset.train_pairs, &dataset.val_pairs, &dataset.test_pairs}) {
    for (const auto& [m, w] : *pairs) {
      k.insert(m, Side::kM);
      k.insert(w, Side::kF);
    }
  }
  return k;
}

void KnowledgeTable::insert(const std::string& token, Side side) {
  const auto [it, fresh] = sides_.emplace(token, side);
  if (!fresh && it->second != side) {
    if (it->second != Side::kNone) ++conflicts_;
    it->second = Side::kNone;
  }
}

Side KnowledgeTable::side(const std::string& token) const {
  const auto it = sides_.find(token);
  return it == sides_.end() ? Side::kNone : it->second;
}

Vector analogy_transfer(const Vector& v_x, const DifferenceVector& d,
                        Side side) {
  if (v_x.size() != d.d.size())
    throw DimensionError("analogy_transfer: dimension mismatch");
  switch (side) {
    case Side::kM:
      return v_x - d.d;
    case Side::kF:
      return v_x + d.d;
    default:
      throw KnowledgeError("analogy_transfer: word side unknown");
  }
}

Vector analogy_transfer_fixed(const Vector& v_x, const DifferenceVector& d,
                              bool add) {
  if (v_x.size() != d.d.size())
    throw DimensionError("analogy_transfer: dimension mismatch");
  return add ? Vector(v_x + d.d) : Vector(v_x - d.d);
}

DifferenceVector mean_diff(const PairList& train_pairs,
                           const EmbeddingTable& table, std::size_t* skipped) {
  Vector sum = Vector::Zero(table.dim());
  std::size_t used = 0, missed = 0;
  for (const auto& [m, w] : train_pairs) {
    const auto mi = table.find(m);
    const auto wi = table.find(w);
    if (!mi || !wi) {
      ++missed;
      continue;
    }
    sum += (table.vectors().row(*mi) - table.vectors().row(*wi)).transpose();
    ++used;
  }
  if (skipped) *skipped = missed;
  if (used == 0) throw DataError("mean_diff: no resolvable training pair");
  DifferenceVector d;
  d.d = sum / static_cast<double>(used);
  return d;
}

DifferenceVector select_diff(const PairList& train_pairs,
                             const PairList& val_pairs,
                             const EmbeddingTable& table,
                             const KnowledgeTable& knowledge) {
  const auto val_triplets = expand_directed(val_pairs);

  DifferenceVector best;
  double best_acc = -1.0;
  for (const auto& pair : train_pairs) {
    const auto mi = table.find(pair.first);
    const auto wi = table.find(pair.second);
    if (!mi || !wi) continue;

    DifferenceVector cand;
    cand.d = (table.vectors().row(*mi) - table.vectors().row(*wi)).transpose();
    cand.source_pair = pair;

    Index correct = 0, total = 0;
    for (const auto& t : val_triplets) {
      const auto xi = table.find(t.source);
      const auto ti = table.find(t.target);
      if (!xi || !ti) continue;
      const Side side = knowledge.side(t.source);
      if (side == Side::kNone) continue;
      ++total;
      const Vector v_y =
          analogy_transfer(table.vectors().row(*xi).transpose(), cand, side);
      if (v_y.norm() == 0.0) continue;
      if (table.nearest_index(v_y) == *ti) ++correct;
    }
    const double acc =
        total > 0 ? static_cast<double>(correct) / static_cast<double>(total)
                  : 0.0;
    if (acc > best_acc) {
      best_acc = acc;
      best = cand;
    }
  }
  if (best_acc < 0.0) throw DataError("select_diff: no resolvable training pair");
  return best;
}

MlpTransferModel make_mlp_model(const std::string& attribute_id, Index dim,
                                Index hidden, Index n_layers,
                                std::uint64_t seed, bool z_trainable) {
  MlpTransferModel model;
  model.attribute = make_attribute_vector(attribute_id, dim, seed, z_trainable);
  model.net = init_params(seed + 3, mlp_dims(2 * dim, dim, hidden, n_layers));
  return model;
}

void validate(const MlpTransferModel& model) {
  if (model.net.in_dim() != 2 * model.dim() ||
      model.net.out_dim() != model.dim())
    throw DimensionError("mlp transfer model: network shape mismatch");
}

Vector transfer(const MlpTransferModel& model, const Vector& v_x) {
  if (v_x.size() != model.dim())
    throw DimensionError("transfer: word vector dimension mismatch");
  Vector in(2 * model.dim());
  in << v_x, model.attribute.z;
  return mlp_forward(model.net, in);
}

ParamPack pack(MlpTransferModel& model) {
  ParamPack pk;
  append_pack(pk, model.net);
  if (model.attribute.trainable) pk.add(model.attribute.z);
  return pk;
}

}  // namespace reflect
