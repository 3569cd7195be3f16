#include "reflect/synthetic.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include "reflect/io.hpp"
#include "reflect/rng.hpp"

namespace reflect {

namespace {

std::string numbered(const char* prefix, Index i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%04lld", prefix,
                static_cast<long long>(i));
  return buf;
}

}  // namespace

SyntheticSpec synthetic_spec_from_json(const nlohmann::json& j) {
  SyntheticSpec s;
  s.dim = j.value("dim", s.dim);
  s.n_pairs = j.value("pairs", s.n_pairs);
  s.clusters = j.value("clusters", s.clusters);
  s.noise = j.value("noise", s.noise);
  s.cluster_offset = j.value("cluster_offset", s.cluster_offset);
  s.n_nonattr_train = j.value("nonattr_train", s.n_nonattr_train);
  s.n_nonattr_test = j.value("nonattr_test", s.n_nonattr_test);
  s.jitter = j.value("jitter", s.jitter);
  s.n_distractors = j.value("distractors", s.n_distractors);
  s.seed = j.value("seed", s.seed);
  s.attribute = j.value("attribute", s.attribute);
  const nlohmann::json split = j.value("split", nlohmann::json::object());
  s.split.train = split.value("train", s.split.train);
  s.split.val = split.value("val", s.split.val);
  s.split.test = split.value("test", s.split.test);
  s.split.seed = split.value("seed", s.split.seed);
  return s;
}

nlohmann::json to_json(const SyntheticSpec& s) {
  return nlohmann::json{
      {"dim", s.dim},
      {"pairs", s.n_pairs},
      {"clusters", s.clusters},
      {"noise", s.noise},
      {"cluster_offset", s.cluster_offset},
      {"nonattr_train", s.n_nonattr_train},
      {"nonattr_test", s.n_nonattr_test},
      {"jitter", s.jitter},
      {"distractors", s.n_distractors},
      {"seed", s.seed},
      {"attribute", s.attribute},
      {"split",
       {{"train", s.split.train},
        {"val", s.split.val},
        {"test", s.split.test},
        {"seed", s.split.seed}}},
  };
}

SyntheticData synth_generate(const SyntheticSpec& spec) {
  if (spec.dim < 2) throw DataError("synth: dim must be at least 2");
  if (spec.n_pairs < 1) throw DataError("synth: need at least one pair");
  if (spec.clusters < 1) throw DataError("synth: need at least one cluster");
  if (spec.noise < 0 || spec.jitter < 0)
    throw DataError("synth: noise and jitter must be non-negative");
  if (!spec.mirrors.empty() &&
      static_cast<Index>(spec.mirrors.size()) != spec.clusters)
    throw DataError("synth: explicit mirrors must match the cluster count");

  Rng rng(spec.seed);
  const Index d = spec.dim;

  // Cluster centers; a single cluster sits at the origin.
  std::vector<Vector> centers;
  for (Index i = 0; i < spec.clusters; ++i) {
    if (spec.clusters == 1) {
      centers.push_back(Vector::Zero(d));
    } else {
      Vector dir = rng.normal_vector(d);
      dir.normalize();
      centers.push_back(spec.cluster_offset * dir);
    }
  }

  std::vector<Mirror> mirrors = spec.mirrors;
  if (mirrors.empty()) {
    for (Index i = 0; i < spec.clusters; ++i) {
      Mirror m;
      m.normal = rng.normal_vector(d);
      m.normal.normalize();
      m.point = centers[static_cast<std::size_t>(i)] + 0.3 * rng.normal_vector(d);
      mirrors.push_back(std::move(m));
    }
  }
  for (const auto& m : mirrors)
    if (m.normal.norm() < kMirrorNormMin)
      throw DataError("synth: degenerate planted mirror");

  std::vector<std::string> tokens;
  std::vector<Vector> rows;
  auto add_row = [&](std::string token, Vector v) {
    tokens.push_back(std::move(token));
    rows.push_back(std::move(v));
  };

  // Pairs: an on-mirror anchor q and the two points q +- t a_hat, so each
  // member sits at distance t from its mirror and 2t from its partner.
  PairList pairs;
  std::vector<int> pair_cluster;
  for (Index p = 0; p < spec.n_pairs; ++p) {
    const Index ci = p % spec.clusters;
    const Mirror& m = mirrors[static_cast<std::size_t>(ci)];
    const Vector a_hat = m.normal.normalized();
    const Vector q = project_onto_mirror(
        m, centers[static_cast<std::size_t>(ci)] + rng.normal_vector(d));
    const double t = rng.uniform(0.5, 2.5);
    Vector v_m = q + t * a_hat;
    Vector v_w = q - t * a_hat;
    if (spec.noise > 0) v_w += spec.noise * rng.normal_vector(d);

    const std::string mt = numbered("a", p);
    const std::string wt = numbered("b", p);
    add_row(mt, std::move(v_m));
    add_row(wt, std::move(v_w));
    pairs.emplace_back(mt, wt);
    pair_cluster.push_back(static_cast<int>(ci));
  }

  // Non-attribute words live on the mirrors (plus jitter when asked for).
  std::vector<std::string> non_train, non_test;
  const Index n_non = spec.n_nonattr_train + spec.n_nonattr_test;
  for (Index j = 0; j < n_non; ++j) {
    const Index ci = j % spec.clusters;
    const Mirror& m = mirrors[static_cast<std::size_t>(ci)];
    Vector u = project_onto_mirror(
        m, centers[static_cast<std::size_t>(ci)] + rng.normal_vector(d));
    if (spec.jitter > 0) u += spec.jitter * rng.normal_vector(d);
    const std::string token = numbered("n", j);
    add_row(token, std::move(u));
    if (j < spec.n_nonattr_train)
      non_train.push_back(token);
    else
      non_test.push_back(token);
  }

  // Distractor vocabulary with the same spread as the data.
  for (Index j = 0; j < spec.n_distractors; ++j) {
    const Index ci = j % spec.clusters;
    add_row(numbered("v", j),
            centers[static_cast<std::size_t>(ci)] + rng.normal_vector(d));
  }

  Matrix mat(static_cast<Index>(rows.size()), d);
  for (std::size_t i = 0; i < rows.size(); ++i)
    mat.row(static_cast<Index>(i)) = rows[i].transpose();

  SyntheticData data{
      EmbeddingTable(std::move(tokens), std::move(mat)),
      make_dataset(spec.attribute, pairs, spec.split),
      NonAttributeSet{spec.attribute, std::move(non_train), std::move(non_test)},
      std::move(mirrors),
      std::move(pair_cluster),
  };
  return data;
}

void write_synthetic(const SyntheticData& data, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);

  save_subset(data.table, (dir / "embeddings.txt").string());

  // One pair file covering all splits; runs re-split it with the recorded
  // manifest. Order is train, val, test.
  PairList all;
  for (const PairList* p : {&data.dataset.train_pairs, &data.dataset.val_pairs,
                            &data.dataset.test_pairs})
    all.insert(all.end(), p->begin(), p->end());
  write_pair_file((dir / "pairs.tsv").string(), all);
  write_pair_file((dir / "pairs_train.tsv").string(), data.dataset.train_pairs);
  write_pair_file((dir / "pairs_val.tsv").string(), data.dataset.val_pairs);
  write_pair_file((dir / "pairs_test.tsv").string(), data.dataset.test_pairs);

  write_token_file((dir / "nonattr_train.txt").string(), data.nonattr.train);
  write_token_file((dir / "nonattr_test.txt").string(), data.nonattr.test);

  std::ostringstream mirrors;
  mirrors << "{\n  \"mirrors\": [\n";
  for (std::size_t i = 0; i < data.mirrors.size(); ++i) {
    const auto& m = data.mirrors[i];
    mirrors << "    {\"normal\": [";
    for (Index j = 0; j < m.normal.size(); ++j)
      mirrors << (j ? "," : "") << format_g17(m.normal[j]);
    mirrors << "], \"point\": [";
    for (Index j = 0; j < m.point.size(); ++j)
      mirrors << (j ? "," : "") << format_g17(m.point[j]);
    mirrors << "]}" << (i + 1 < data.mirrors.size() ? "," : "") << "\n";
  }
  mirrors << "  ]\n}\n";
  atomic_write_text((dir / "mirrors.json").string(), mirrors.str());
}

}  // namespace reflect
