#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "reflect/baselines.hpp"
#include "reflect/checkpoint.hpp"
#include "reflect/dataset.hpp"
#include "reflect/embedding.hpp"
#include "reflect/evaluate.hpp"
#include "reflect/geometry.hpp"
#include "reflect/io.hpp"
#include "reflect/model.hpp"
#include "reflect/rng.hpp"
#include "reflect/runconfig.hpp"
#include "reflect/synthetic.hpp"
#include "reflect/training.hpp"
#include "reflect/types.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace reflect;

namespace {

bool g_json = false;

void emit(const json& doc, const std::string& human) {
  if (g_json) {
    std::cout << doc.dump(2) << "\n";
    if (!human.empty()) std::cerr << human << "\n";
  } else {
    if (!human.empty()) std::cerr << human << "\n";
    std::cout << doc.dump(2) << "\n";
  }
}

struct Overrides {
  std::string model;
  std::string out;
  double alpha = -1.0;
  long long epochs = -1;
  long long seed = -1;
  long long limit = -1;
  long long nonattr_train = -1;

  void apply(RunConfig& cfg) const {
    if (!model.empty()) cfg.train.kind = parse_kind(model);
    if (!out.empty()) cfg.output_dir = out;
    if (alpha >= 0.0) cfg.train.alpha = alpha;
    if (epochs >= 0) cfg.train.max_epochs = static_cast<Index>(epochs);
    if (seed >= 0) {
      cfg.train.seed = static_cast<std::uint64_t>(seed);
      cfg.init_seed = static_cast<std::uint64_t>(seed);
    }
    if (limit >= 0) cfg.vocab_limit = static_cast<Index>(limit);
    if (nonattr_train >= 0) {
      cfg.nonattr_train = static_cast<Index>(nonattr_train);
      cfg.train.n_train_size = static_cast<Index>(nonattr_train);
    }
  }
};

void add_override_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--model", o.model, "override model kind");
  cmd->add_option("--out", o.out, "override output directory");
  cmd->add_option("--alpha", o.alpha, "override Adam step size");
  cmd->add_option("--epochs", o.epochs, "override max epochs");
  cmd->add_option("--seed", o.seed, "override training and init seeds");
  cmd->add_option("--limit", o.limit, "override vocabulary limit");
  cmd->add_option("--nonattr-train", o.nonattr_train,
                  "override |N_train| for sampling");
}

std::uint64_t train_pair_hash(const PairList& pairs) {
  std::string blob;
  for (const auto& [m, w] : pairs) blob += m + "\t" + w + "\n";
  return hash64(blob);
}

std::string write_history(const TrainHistory& history, const fs::path& dir) {
  std::ostringstream out;
  out << "epoch\tloss\tval_accuracy\n";
  for (std::size_t e = 0; e < history.epochs.size(); ++e)
    out << e << '\t' << format_g17(history.epochs[e].loss) << '\t'
        << format_g17(history.epochs[e].val_accuracy) << '\n';
  const std::string path = (dir / "history.tsv").string();
  atomic_write_text(path, out.str());
  return path;
}

json seeds_json(const RunConfig& cfg) {
  return json{{"init", cfg.init_seed},
              {"train", cfg.train.seed},
              {"split", cfg.split.seed},
              {"non_attribute", cfg.nonattr_seed}};
}

int run_train(const RunConfig& cfg) {
  const RunInputs inputs = load_run_inputs(cfg);
  const Index dim = inputs.table.dim();
  fs::create_directories(cfg.output_dir);
  const fs::path dir(cfg.output_dir);

  const std::string config_path = (dir / "resolved_config.json").string();
  atomic_write_text(config_path, cfg.to_json().dump(2) + "\n");

  Checkpoint ckpt;
  ckpt.kind = cfg.train.kind;
  ckpt.dim = dim;
  ckpt.seed = cfg.init_seed;
  ckpt.config = cfg.to_json();

  json out{{"kind", kind_name(cfg.train.kind)}, {"resolved_config", config_path}};
  bool diverged = false;

  if (kind_is_trained(cfg.train.kind)) {
    TrainableModel initial =
        cfg.train.kind == ModelKind::kMlp
            ? TrainableModel(make_mlp_model(cfg.attribute, dim, cfg.train.hidden,
                                            cfg.train.baseline_layers,
                                            cfg.init_seed, cfg.train.z_trainable))
            : TrainableModel(make_ref_model(
                  cfg.attribute, dim, cfg.train.kind == ModelKind::kRefPm,
                  cfg.train.hidden, cfg.train.mirror_layers, cfg.init_seed,
                  cfg.train.z_trainable));

    TrainResult result = train(std::move(initial), inputs.dataset,
                               inputs.nonattr, inputs.table, cfg.train);
    diverged = result.diverged;
    ckpt.steps = result.history.steps;
    if (const auto* ref = std::get_if<RefModel>(&result.model))
      ckpt.model = *ref;
    else
      ckpt.model = std::get<MlpTransferModel>(result.model);

    out["history"] = write_history(result.history, dir);
    out["epochs"] = result.history.epochs.size();
    out["best_epoch"] = result.history.best_epoch;
    out["best_val_accuracy"] = result.history.best_val_accuracy;
    out["skipped_train_tokens"] = result.history.skipped_train;
    out["diverged"] = diverged;
  } else {
    const KnowledgeTable knowledge =
        KnowledgeTable::from_dataset(inputs.dataset);
    DifferenceVector d;
    if (cfg.train.kind == ModelKind::kMeanDiff ||
        cfg.train.kind == ModelKind::kMeanDiffPlus ||
        cfg.train.kind == ModelKind::kMeanDiffMinus) {
      std::size_t skipped = 0;
      d = mean_diff(inputs.dataset.train_pairs, inputs.table, &skipped);
      if (skipped > 0)
        std::cerr << "mean_diff: skipped " << skipped
                  << " unresolvable pairs\n";
    } else {
      d = select_diff(inputs.dataset.train_pairs, inputs.dataset.val_pairs,
                      inputs.table, knowledge);
      if (d.source_pair)
        out["source_pair"] =
            json::array({d.source_pair->first, d.source_pair->second});
    }
    ckpt.model = d;
    ckpt.config["train_pair_hash"] = train_pair_hash(inputs.dataset.train_pairs);
    out["history"] = write_history(TrainHistory{}, dir);
    out["knowledge_conflicts"] = knowledge.conflict_count();
  }

  const std::string ckpt_path = (dir / "checkpoint.json").string();
  save_checkpoint(ckpt, ckpt_path);
  out["checkpoint"] = ckpt_path;

  emit(out, "trained " + kind_name(cfg.train.kind) + " -> " + ckpt_path);
  return diverged ? 3 : 0;
}

json report_to_json(const EvalReport& r) {
  json items = json::array();
  auto push_items = [&items](const std::vector<EvalItem>& v, const char* role) {
    for (const auto& it : v)
      items.push_back(json{{"input", it.input},
                           {"expected", it.expected},
                           {"predicted", it.predicted},
                           {"correct", it.correct},
                           {"role", role}});
  };
  push_items(r.attr_items, "attribute");
  push_items(r.non_items, "non_attribute");

  json j{{"attribute", r.attribute},
         {"model_kind", r.model_kind},
         {"vocab_size", r.vocab_size},
         {"accuracy", r.accuracy ? json(*r.accuracy) : json(nullptr)},
         {"stability", r.stability ? json(*r.stability) : json(nullptr)},
         {"items", std::move(items)},
         {"skipped", {{"attribute", r.skipped_attr}, {"non_attribute", r.skipped_non}}},
         {"zero_norm_outputs", r.zero_norm_outputs},
         {"numeric_failures", r.numeric_failures},
         {"knowledge_missing", r.knowledge_missing}};
  return j;
}

int run_eval(const RunConfig& cfg, const std::string& checkpoint_path) {
  const RunInputs inputs = load_run_inputs(cfg);
  const Checkpoint ckpt = load_checkpoint(checkpoint_path);

  EvalReport report;
  KnowledgeTable knowledge;
  if (kind_is_trained(ckpt.kind)) {
    if (ckpt.kind == ModelKind::kMlp)
      report = evaluate(ckpt.mlp(), inputs.dataset, inputs.nonattr, inputs.table);
    else
      report = evaluate(ckpt.ref(), inputs.dataset, inputs.nonattr, inputs.table);
  } else {
    knowledge = KnowledgeTable::from_dataset(inputs.dataset);
    const bool with_knowledge = kind_needs_knowledge(ckpt.kind);
    const TransferFn fn = make_transfer_fn(
        ckpt.diff(), ckpt.kind, with_knowledge ? &knowledge : nullptr);
    // Knowledge-based transfer is undefined on non-attribute words, so the
    // stability side stays empty and the metric is reported as absent.
    const std::vector<std::string> non =
        with_knowledge ? std::vector<std::string>{} : inputs.nonattr.test;
    report = evaluate(fn, inputs.dataset.attribute, kind_name(ckpt.kind),
                      inputs.dataset.test, non, inputs.table);
  }

  json doc = report_to_json(report);
  doc["config_snapshot"] = cfg.to_json();
  doc["checkpoint"] = checkpoint_path;
  doc["seeds"] = seeds_json(cfg);

  fs::create_directories(cfg.output_dir);
  const fs::path dir(cfg.output_dir);
  atomic_write_text((dir / "report.json").string(), doc.dump(2) + "\n");
  atomic_write_text((dir / "eval_config.json").string(),
                    json{{"config", cfg.to_json()}, {"checkpoint", checkpoint_path}}
                            .dump(2) +
                        "\n");

  std::ostringstream human;
  human << "accuracy="
        << (report.accuracy ? format_g17(*report.accuracy) : "absent")
        << " stability="
        << (report.stability ? format_g17(*report.stability) : "absent");
  std::cout << doc.dump(2) << "\n";
  std::cerr << human.str() << "\n";
  return 0;
}

int run_transfer(const std::string& checkpoint_path, const RunConfig* cfg,
                 const std::string& embedding_path, long long limit,
                 const std::vector<std::string>& words, const std::string& text,
                 bool mark_oov) {
  const Checkpoint ckpt = load_checkpoint(checkpoint_path);

  std::optional<Index> lim;
  std::string emb = embedding_path;
  if (cfg) {
    if (emb.empty()) emb = cfg->embedding_path;
    if (limit < 0 && cfg->vocab_limit > 0) lim = cfg->vocab_limit;
  }
  if (limit > 0) lim = static_cast<Index>(limit);
  if (emb.empty()) throw DataError("transfer: an embedding table is required");
  const EmbeddingTable table = load_embeddings(emb, lim);

  KnowledgeTable knowledge;
  TransferFn fn;
  const RefModel* ref = nullptr;
  if (ckpt.kind == ModelKind::kRef || ckpt.kind == ModelKind::kRefPm) {
    ref = &ckpt.ref();
    fn = make_transfer_fn(*ref);
  } else if (ckpt.kind == ModelKind::kMlp) {
    fn = make_transfer_fn(ckpt.mlp());
  } else {
    if (kind_needs_knowledge(ckpt.kind)) {
      if (!cfg)
        throw DataError("transfer: " + kind_name(ckpt.kind) +
                        " needs --config for the knowledge table");
      AttributeDataset dataset;
      if (!cfg->pairs_path.empty())
        dataset = load_pairs(cfg->pairs_path, cfg->split, cfg->attribute);
      else
        dataset = load_pair_splits(cfg->train_pairs_path, cfg->val_pairs_path,
                                   cfg->test_pairs_path, cfg->attribute);
      knowledge = KnowledgeTable::from_dataset(dataset);
      fn = make_transfer_fn(ckpt.diff(), ckpt.kind, &knowledge);
    } else {
      fn = make_transfer_fn(ckpt.diff(), ckpt.kind, nullptr);
    }
  }

  const bool text_mode = !text.empty();
  const std::vector<std::string> tokens =
      text_mode ? tokenize_whitespace(text) : words;

  json items = json::array();
  std::ostringstream table_out;
  table_out << "input\toutput\tcosine\tmirror_distance\n";
  std::vector<std::string> out_tokens;
  for (const auto& tok : tokens) {
    auto idx = table.find(tok);
    if (!idx) {
      std::string lower = tok;
      for (auto& ch : lower) ch = static_cast<char>(std::tolower(
          static_cast<unsigned char>(ch)));
      idx = table.find(lower);
    }
    json item{{"input", tok}};
    if (!idx) {
      out_tokens.push_back(mark_oov ? "[" + tok + "]" : tok);
      item["output"] = tok;
      item["oov"] = true;
      table_out << tok << '\t' << out_tokens.back() << "\t\t\n";
      items.push_back(std::move(item));
      continue;
    }
    const Vector v_x = table.vectors().row(*idx).transpose();
    std::string output = tok;
    std::string cos_text, dist_text;
    try {
      const Vector v_y = fn(tok, v_x);
      if (v_y.norm() > 0.0) {
        const auto [best, sim] = table.nearest_token(v_y);
        output = best;
        cos_text = format_g17(sim);
        item["cosine"] = sim;
      }
      if (ref) {
        const Mirror m = ref->parameterized ? mirror_for(*ref, v_x)
                                            : mirror_for(*ref);
        const double dist = distance_to_mirror(m, v_x);
        dist_text = format_g17(dist);
        item["mirror_distance"] = dist;
      }
    } catch (const KnowledgeError&) {
      item["knowledge_missing"] = true;
    } catch (const NumericError& e) {
      item["numeric_failure"] = e.what();
    }
    item["output"] = output;
    item["oov"] = false;
    out_tokens.push_back(output);
    table_out << tok << '\t' << output << '\t' << cos_text << '\t' << dist_text
              << '\n';
    items.push_back(std::move(item));
  }

  std::string joined;
  for (std::size_t i = 0; i < out_tokens.size(); ++i)
    joined += (i ? " " : "") + out_tokens[i];

  if (g_json) {
    json doc{{"items", std::move(items)}, {"kind", kind_name(ckpt.kind)}};
    if (text_mode) doc["text"] = joined;
    std::cout << doc.dump(2) << "\n";
    std::cerr << table_out.str();
  } else if (text_mode) {
    std::cout << joined << "\n";
    std::cerr << table_out.str();
  } else {
    std::cout << table_out.str();
  }
  return 0;
}

int run_synth(const std::string& spec_path, const std::string& out_dir,
              long long seed_override) {
  json spec_json;
  {
    std::ifstream in(spec_path);
    if (!in) throw DataError("cannot open spec: " + spec_path);
    try {
      in >> spec_json;
    } catch (const json::exception& e) {
      throw ParseError("spec " + spec_path + ": " + e.what());
    }
  }
  SyntheticSpec spec = synthetic_spec_from_json(spec_json);
  if (seed_override >= 0) spec.seed = static_cast<std::uint64_t>(seed_override);

  const SyntheticData data = synth_generate(spec);
  write_synthetic(data, out_dir);

  const fs::path dir(out_dir);
  atomic_write_text((dir / "spec.json").string(), to_json(spec).dump(2) + "\n");

  // Starter run config wired to the generated files.
  RunConfig cfg;
  cfg.embedding_path = (dir / "embeddings.txt").string();
  cfg.attribute = spec.attribute;
  cfg.train_pairs_path = (dir / "pairs_train.tsv").string();
  cfg.val_pairs_path = (dir / "pairs_val.tsv").string();
  cfg.test_pairs_path = (dir / "pairs_test.tsv").string();
  cfg.nonattr_train_path = (dir / "nonattr_train.txt").string();
  cfg.nonattr_test_path = (dir / "nonattr_test.txt").string();
  cfg.nonattr_train = spec.n_nonattr_train;
  cfg.nonattr_test = spec.n_nonattr_test;
  cfg.train.kind = ModelKind::kRef;
  cfg.train.hidden = 64;
  cfg.train.alpha = 1e-3;
  cfg.train.max_epochs = 500;
  cfg.train.patience = 100;
  cfg.output_dir = (dir / "run").string();
  atomic_write_text((dir / "run_config.json").string(),
                    cfg.to_json().dump(2) + "\n");

  json out{{"out_dir", out_dir},
           {"vocab", data.table.size()},
           {"pairs", data.dataset.train_pairs.size() +
                         data.dataset.val_pairs.size() +
                         data.dataset.test_pairs.size()},
           {"clusters", spec.clusters},
           {"spec", to_json(spec)}};
  emit(out, "synthetic data written to " + out_dir);
  return 0;
}

int run_export(const RunConfig& cfg, const std::string& checkpoint_path,
               const std::string& out_path, bool mirrors) {
  const RunInputs inputs = load_run_inputs(cfg);
  const Checkpoint ckpt = load_checkpoint(checkpoint_path);
  if (ckpt.kind != ModelKind::kRef && ckpt.kind != ModelKind::kRefPm)
    throw DataError("export: checkpoint must be a reflection model");

  fs::create_directories(cfg.output_dir);
  const fs::path dir(cfg.output_dir);
  const std::string path =
      !out_path.empty()
          ? out_path
          : (dir / (mirrors ? "mirror_params.tsv" : "distances.tsv")).string();

  if (mirrors)
    export_mirror_params(ckpt.ref(), inputs.dataset.test_pairs, inputs.table,
                         path);
  else
    export_distances(ckpt.ref(), inputs.dataset, inputs.nonattr, inputs.table,
                     path);

  atomic_write_text((dir / "export_config.json").string(),
                    json{{"config", cfg.to_json()},
                         {"checkpoint", checkpoint_path},
                         {"out", path}}
                            .dump(2) +
                        "\n");
  emit(json{{"out", path}}, "export written to " + path);
  return 0;
}

double gradcheck_kind(ModelKind kind, Index dim, Index hidden,
                      std::uint64_t seed, double h, bool corrupt) {
  TrainableModel model =
      kind == ModelKind::kMlp
          ? TrainableModel(make_mlp_model("check", dim, hidden, 3, seed))
          : TrainableModel(make_ref_model("check", dim,
                                          kind == ModelKind::kRefPm, hidden, 2,
                                          seed));
  Rng rng(seed + 17);
  VectorBatch batch;
  for (int i = 0; i < 3; ++i)
    batch.attr.emplace_back(rng.normal_vector(dim), rng.normal_vector(dim));
  for (int i = 0; i < 2; ++i) batch.non.push_back(rng.normal_vector(dim));

  const LossOptions opts;
  Vector analytic;
  model_loss(model, batch, opts, &analytic);
  if (corrupt) {
    Index imax = 0;
    analytic.cwiseAbs().maxCoeff(&imax);
    analytic[imax] *= 2.0;
  }

  TrainableModel scratch = model;
  ParamPack pk = pack(scratch);
  const Vector theta0 = pk.to_flat();
  const auto loss_at = [&](const Vector& theta) {
    pk.from_flat(theta);
    return model_loss(scratch, batch, opts, nullptr);
  };
  GradCheckOptions gopts;
  gopts.h = h;
  gopts.subsample_seed = seed;
  return grad_check(loss_at, theta0, analytic, gopts);
}

int run_gradcheck(const std::vector<std::string>& kinds, Index dim,
                  Index hidden, std::uint64_t seed, double h, double threshold,
                  bool corrupt) {
  json out{{"threshold", threshold}, {"h", h}};
  double worst = 0.0;
  std::ostringstream human;
  for (const auto& name : kinds) {
    const double err =
        gradcheck_kind(parse_kind(name), dim, hidden, seed, h, corrupt);
    out[name] = err;
    worst = std::max(worst, err);
    human << name << ": max relative error " << format_g17(err) << "\n";
  }
  out["max"] = worst;
  out["pass"] = worst < threshold;
  emit(out, human.str());
  return worst < threshold ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"word attribute transfer in embedding space via learned reflections"};
  app.require_subcommand(1);
  app.add_flag("--json", g_json,
               "exactly one JSON document on stdout, logs on stderr");

  // train
  auto* train_cmd = app.add_subcommand(
      "train", "train a model or select a difference vector");
  std::string train_config;
  Overrides train_over;
  train_cmd->add_option("--config", train_config, "run config (JSON)")
      ->required();
  add_override_flags(train_cmd, train_over);

  // eval
  auto* eval_cmd =
      app.add_subcommand("eval", "accuracy and stability on the test split");
  std::string eval_config, eval_ckpt;
  Overrides eval_over;
  eval_cmd->add_option("--config", eval_config, "run config (JSON)")->required();
  eval_cmd->add_option("--checkpoint", eval_ckpt, "model checkpoint")->required();
  add_override_flags(eval_cmd, eval_over);

  // transfer
  auto* transfer_cmd =
      app.add_subcommand("transfer", "transfer words or a sentence");
  std::string tr_ckpt, tr_config, tr_embedding, tr_text;
  std::vector<std::string> tr_words;
  long long tr_limit = -1;
  bool tr_mark_oov = false;
  transfer_cmd->add_option("--checkpoint", tr_ckpt, "model checkpoint")
      ->required();
  transfer_cmd->add_option("--config", tr_config,
                           "run config (for the embedding and knowledge)");
  transfer_cmd->add_option("--embedding", tr_embedding, "embedding text file");
  transfer_cmd->add_option("--limit", tr_limit, "vocabulary limit");
  transfer_cmd->add_option("--words", tr_words, "words to transfer");
  transfer_cmd->add_option("--text", tr_text, "whitespace-tokenized sentence");
  transfer_cmd->add_flag("--mark-oov", tr_mark_oov,
                         "bracket out-of-vocabulary tokens");

  // synth
  auto* synth_cmd =
      app.add_subcommand("synth", "generate a planted-mirror dataset");
  std::string synth_spec, synth_out;
  long long synth_seed = -1;
  synth_cmd->add_option("--spec", synth_spec, "synthetic spec (JSON)")
      ->required();
  synth_cmd->add_option("--out", synth_out, "output directory")->required();
  synth_cmd->add_option("--seed", synth_seed, "override the spec seed");

  // export-distances / export-mirrors
  auto* dist_cmd = app.add_subcommand(
      "export-distances", "word-to-mirror and pair distances as TSV");
  std::string dist_config, dist_ckpt, dist_out;
  dist_cmd->add_option("--config", dist_config, "run config")->required();
  dist_cmd->add_option("--checkpoint", dist_ckpt, "model checkpoint")
      ->required();
  dist_cmd->add_option("--out", dist_out, "output TSV path");

  auto* mir_cmd = app.add_subcommand(
      "export-mirrors", "per-word mirror normals as TSV");
  std::string mir_config, mir_ckpt, mir_out;
  mir_cmd->add_option("--config", mir_config, "run config")->required();
  mir_cmd->add_option("--checkpoint", mir_ckpt, "model checkpoint")->required();
  mir_cmd->add_option("--out", mir_out, "output TSV path");

  // gradcheck
  auto* grad_cmd = app.add_subcommand(
      "gradcheck", "finite-difference check of the training gradients");
  std::vector<std::string> grad_kinds{"ref", "refpm", "mlp"};
  long long grad_dim = 12, grad_hidden = 16, grad_seed = 7;
  double grad_h = 1e-5, grad_threshold = 1e-4;
  bool grad_corrupt = false;
  grad_cmd->add_option("--kinds", grad_kinds, "model kinds to check");
  grad_cmd->add_option("--dim", grad_dim, "embedding dimension");
  grad_cmd->add_option("--hidden", grad_hidden, "hidden units");
  grad_cmd->add_option("--seed", grad_seed, "instance seed");
  grad_cmd->add_option("--h", grad_h, "finite-difference step");
  grad_cmd->add_option("--threshold", grad_threshold, "max relative error");
  grad_cmd
      ->add_flag("--corrupt-gradient", grad_corrupt,
                 "double one analytic gradient coordinate (self-test)")
      ->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (train_cmd->parsed()) {
      RunConfig cfg = load_run_config(train_config);
      train_over.apply(cfg);
      return run_train(cfg);
    }
    if (eval_cmd->parsed()) {
      RunConfig cfg = load_run_config(eval_config);
      eval_over.apply(cfg);
      return run_eval(cfg, eval_ckpt);
    }
    if (transfer_cmd->parsed()) {
      std::optional<RunConfig> cfg;
      if (!tr_config.empty()) cfg = load_run_config(tr_config);
      if (tr_words.empty() && tr_text.empty())
        throw DataError("transfer: need --words or --text");
      return run_transfer(tr_ckpt, cfg ? &*cfg : nullptr, tr_embedding,
                          tr_limit, tr_words, tr_text, tr_mark_oov);
    }
    if (synth_cmd->parsed()) return run_synth(synth_spec, synth_out, synth_seed);
    if (dist_cmd->parsed())
      return run_export(load_run_config(dist_config), dist_ckpt, dist_out,
                        false);
    if (mir_cmd->parsed())
      return run_export(load_run_config(mir_config), mir_ckpt, mir_out, true);
    if (grad_cmd->parsed())
      return run_gradcheck(grad_kinds, static_cast<Index>(grad_dim),
                           static_cast<Index>(grad_hidden),
                           static_cast<std::uint64_t>(grad_seed), grad_h,
                           grad_threshold, grad_corrupt);
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 3;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
