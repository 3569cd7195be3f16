#include "reflect/runconfig.hpp"

#include <algorithm>
#include <fstream>

namespace reflect {

namespace {

using nlohmann::json;

bool looks_like_antonym(const std::string& attribute) {
  std::string low = attribute;
  std::transform(low.begin(), low.end(), low.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return low == "an" || low.find("antonym") != std::string::npos;
}

}  // namespace

RunConfig RunConfig::from_json(const json& j) {
  RunConfig c;

  const json emb = j.value("embedding", json::object());
  c.embedding_path = emb.value("path", std::string());
  c.vocab_limit = emb.value("limit", Index{0});

  const json ds = j.value("dataset", json::object());
  c.attribute = ds.value("attribute", std::string("attr"));
  c.pairs_path = ds.value("pairs", std::string());
  const json split = ds.value("split", json::object());
  c.split.train = split.value("train", Index{0});
  c.split.val = split.value("val", Index{0});
  c.split.test = split.value("test", Index{0});
  c.split.seed = split.value("seed", std::uint64_t{1});
  c.train_pairs_path = ds.value("train_file", std::string());
  c.val_pairs_path = ds.value("val_file", std::string());
  c.test_pairs_path = ds.value("test_file", std::string());

  const json non = j.value("non_attribute", json::object());
  c.nonattr_train = non.value("train", Index{10});
  c.nonattr_test = non.value("test", Index{1000});
  c.nonattr_seed = non.value("seed", std::uint64_t{1});
  c.nonattr_train_path = non.value("train_file", std::string());
  c.nonattr_test_path = non.value("test_file", std::string());

  const json model = j.value("model", json::object());
  c.train.kind = parse_kind(model.value("kind", std::string("refpm")));
  c.train.hidden = model.value("hidden", Index{300});
  c.train.mirror_layers = model.value("mirror_layers", Index{2});
  c.train.baseline_layers = model.value("baseline_layers", Index{3});
  c.train.z_trainable = model.value("z_trainable", true);
  c.init_seed = model.value("init_seed", std::uint64_t{1});

  const json tr = j.value("train", json::object());
  // Default step size follows the paper's per-dataset choice: antonym-style
  // attributes train with 1.5e-3, everything else with 1e-4.
  c.train.alpha =
      tr.value("alpha", looks_like_antonym(c.attribute) ? 1.5e-3 : 1e-4);
  c.train.max_epochs = tr.value("max_epochs", Index{2000});
  c.train.batch_size = tr.value("batch_size", Index{32});
  c.train.patience = tr.value("patience", Index{50});
  c.train.seed = tr.value("seed", std::uint64_t{1});
  c.train.n_train_size = c.nonattr_train;
  c.train.loss_weight_attr = tr.value("loss_weight_attr", 1.0);
  c.train.loss_weight_non = tr.value("loss_weight_non", 1.0);
  c.train.norm_eps = tr.value("norm_eps", 1e-12);

  c.output_dir = j.value("output_dir", std::string("run_out"));
  return c;
}

json RunConfig::to_json() const {
  json j;
  j["embedding"] = {{"path", embedding_path}, {"limit", vocab_limit}};
  json ds = {{"attribute", attribute}};
  if (!pairs_path.empty()) {
    ds["pairs"] = pairs_path;
    ds["split"] = {{"train", split.train},
                   {"val", split.val},
                   {"test", split.test},
                   {"seed", split.seed}};
  } else {
    ds["train_file"] = train_pairs_path;
    ds["val_file"] = val_pairs_path;
    ds["test_file"] = test_pairs_path;
  }
  j["dataset"] = std::move(ds);
  json non = {{"train", nonattr_train},
              {"test", nonattr_test},
              {"seed", nonattr_seed}};
  if (!nonattr_train_path.empty()) non["train_file"] = nonattr_train_path;
  if (!nonattr_test_path.empty()) non["test_file"] = nonattr_test_path;
  j["non_attribute"] = std::move(non);
  j["model"] = {{"kind", kind_name(train.kind)},
                {"hidden", train.hidden},
                {"mirror_layers", train.mirror_layers},
                {"baseline_layers", train.baseline_layers},
                {"z_trainable", train.z_trainable},
                {"init_seed", init_seed}};
  j["train"] = {{"alpha", train.alpha},
                {"max_epochs", train.max_epochs},
                {"batch_size", train.batch_size},
                {"patience", train.patience},
                {"seed", train.seed},
                {"loss_weight_attr", train.loss_weight_attr},
                {"loss_weight_non", train.loss_weight_non},
                {"norm_eps", train.norm_eps}};
  j["output_dir"] = output_dir;
  return j;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError("config " + path + ": " + e.what());
  }
  try {
    return RunConfig::from_json(j);
  } catch (const json::exception& e) {
    throw ParseError("config " + path + ": " + e.what());
  }
}

RunInputs load_run_inputs(const RunConfig& config) {
  if (config.embedding_path.empty())
    throw DataError("config: embedding.path is required");
  std::optional<Index> limit;
  if (config.vocab_limit > 0) limit = config.vocab_limit;
  EmbeddingTable table = load_embeddings(config.embedding_path, limit);

  AttributeDataset dataset;
  if (!config.pairs_path.empty()) {
    dataset = load_pairs(config.pairs_path, config.split, config.attribute);
  } else if (!config.train_pairs_path.empty()) {
    dataset = load_pair_splits(config.train_pairs_path, config.val_pairs_path,
                               config.test_pairs_path, config.attribute);
  } else {
    throw DataError("config: either dataset.pairs or explicit split files are required");
  }

  NonAttributeSet nonattr;
  if (!config.nonattr_train_path.empty() || !config.nonattr_test_path.empty()) {
    nonattr.attribute = config.attribute;
    if (!config.nonattr_train_path.empty())
      nonattr.train = read_token_file(config.nonattr_train_path);
    if (!config.nonattr_test_path.empty())
      nonattr.test = read_token_file(config.nonattr_test_path);
  } else {
    nonattr = sample_non_attribute(table, dataset, config.nonattr_train,
                                   config.nonattr_test, config.nonattr_seed);
  }

  return RunInputs{std::move(table), std::move(dataset), std::move(nonattr)};
}

}  // namespace reflect
