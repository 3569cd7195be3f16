#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "reflect/baselines.hpp"
#include "reflect/dataset.hpp"
#include "reflect/embedding.hpp"
#include "reflect/model.hpp"
#include "reflect/training.hpp"
#include "reflect/types.hpp"

namespace reflect {

// 1 iff the nearest token to v_y over the whole vocabulary is `target`.
// A zero-norm output counts as a failed transfer (0), with a warning.
int delta(const EmbeddingTable& table, const Vector& v_y,
          const std::string& target);

struct EvalItem {
  std::string input;
  std::string expected;
  std::string predicted;
  bool correct = false;
};

struct EvalReport {
  std::string attribute;
  std::string model_kind;
  Index vocab_size = 0;
  std::optional<double> accuracy;   // absent when there are no attribute items
  std::optional<double> stability;  // absent when there are no non-attribute items
  std::vector<EvalItem> attr_items;
  std::vector<EvalItem> non_items;
  Index skipped_attr = 0;        // unresolvable test tokens
  Index skipped_non = 0;
  Index zero_norm_outputs = 0;   // counted as incorrect
  Index numeric_failures = 0;    // degenerate mirrors etc., counted as incorrect
  Index knowledge_missing = 0;   // knowledge-based transfer with no side label
};

// Transfer as seen by the evaluator: token (for knowledge lookups) plus its
// vector, returning the transferred vector.
using TransferFn = std::function<Vector(const std::string&, const Vector&)>;

TransferFn make_transfer_fn(const RefModel& model);
TransferFn make_transfer_fn(const MlpTransferModel& model);
// Knowledge may be null for the fixed-sign kinds.
TransferFn make_transfer_fn(const DifferenceVector& d, ModelKind kind,
                            const KnowledgeTable* knowledge);

EvalReport evaluate(const TransferFn& fn, const std::string& attribute,
                    const std::string& model_kind,
                    const std::vector<Triplet>& attr_test,
                    const std::vector<std::string>& non_test,
                    const EmbeddingTable& table);

EvalReport evaluate(const RefModel& model, const AttributeDataset& dataset,
                    const NonAttributeSet& nonattr, const EmbeddingTable& table);
EvalReport evaluate(const MlpTransferModel& model,
                    const AttributeDataset& dataset,
                    const NonAttributeSet& nonattr, const EmbeddingTable& table);

// TSV: token, role, pair id, distance to the word's mirror, and for attribute
// words the distance to the paired word. One row per directed test triplet
// plus one per non-attribute test word.
void export_distances(const RefModel& model, const AttributeDataset& dataset,
                      const NonAttributeSet& nonattr,
                      const EmbeddingTable& table, const std::string& path);

// TSV: token, pair id, then the D components of the word's mirror normal.
// A single-mirror model exports its one shared normal for every word.
void export_mirror_params(const RefModel& model, const PairList& pairs,
                          const EmbeddingTable& table, const std::string& path);

// Replaces each token by the nearest token to its transferred vector.
// Lookup tries the token as written, then lowercased. Out-of-vocabulary
// tokens pass through, bracketed when mark_oov is set.
std::vector<std::string> transfer_text(const TransferFn& fn,
                                       const EmbeddingTable& table,
                                       const std::vector<std::string>& tokens,
                                       bool mark_oov = false);

std::vector<std::string> tokenize_whitespace(const std::string& text);

}  // namespace reflect
