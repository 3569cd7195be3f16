#include "reflect/evaluate.hpp"

#include <algorithm>
#include <cctype>
#include <iostream>
#include <sstream>

#include "reflect/geometry.hpp"
#include "reflect/io.hpp"

namespace reflect {

int delta(const EmbeddingTable& table, const Vector& v_y,
          const std::string& target) {
  const auto ti = table.find(target);
  if (!ti) throw UnknownTokenError(target);
  if (v_y.norm() == 0.0) {
    std::cerr << "delta: zero-norm transfer output for target '" << target
              << "' counted as incorrect\n";
    return 0;
  }
  return table.nearest_index(v_y) == *ti ? 1 : 0;
}

TransferFn make_transfer_fn(const RefModel& model) {
  return [&model](const std::string&, const Vector& v_x) {
    return transfer(model, v_x);
  };
}

TransferFn make_transfer_fn(const MlpTransferModel& model) {
  return [&model](const std::string&, const Vector& v_x) {
    return transfer(model, v_x);
  };
}

TransferFn make_transfer_fn(const DifferenceVector& d, ModelKind kind,
                            const KnowledgeTable* knowledge) {
  switch (kind) {
    case ModelKind::kDiff:
    case ModelKind::kMeanDiff:
      if (!knowledge)
        throw KnowledgeError(kind_name(kind) + " requires a knowledge table");
      return [&d, knowledge](const std::string& token, const Vector& v_x) {
        return analogy_transfer(v_x, d, knowledge->side(token));
      };
    case ModelKind::kDiffPlus:
    case ModelKind::kMeanDiffPlus:
      return [&d](const std::string&, const Vector& v_x) {
        return analogy_transfer_fixed(v_x, d, true);
      };
    case ModelKind::kDiffMinus:
    case ModelKind::kMeanDiffMinus:
      return [&d](const std::string&, const Vector& v_x) {
        return analogy_transfer_fixed(v_x, d, false);
      };
    default:
      throw DataError("make_transfer_fn: not a difference-vector kind");
  }
}

namespace {

struct Pending {
  std::string input;
  std::string expected;
};

// Runs the transfers, batches the nearest-token queries, fills item records.
void run_side(const TransferFn& fn, const EmbeddingTable& table,
              const std::vector<Pending>& pending, EvalReport& report,
              std::vector<EvalItem>& items) {
  if (pending.empty()) return;

  Matrix queries(table.dim(), static_cast<Index>(pending.size()));
  std::vector<char> failed(pending.size(), 0);
  for (std::size_t k = 0; k < pending.size(); ++k) {
    const Vector v_x = table.lookup(pending[k].input);
    try {
      queries.col(static_cast<Index>(k)) = fn(pending[k].input, v_x);
    } catch (const KnowledgeError&) {
      ++report.knowledge_missing;
      failed[k] = 1;
      queries.col(static_cast<Index>(k)).setZero();
    } catch (const NumericError&) {
      ++report.numeric_failures;
      failed[k] = 1;
      queries.col(static_cast<Index>(k)).setZero();
    }
  }

  const std::vector<Index> nearest = table.nearest_indices(queries);
  for (std::size_t k = 0; k < pending.size(); ++k) {
    EvalItem item;
    item.input = pending[k].input;
    item.expected = pending[k].expected;
    if (failed[k]) {
      item.correct = false;
    } else if (nearest[k] < 0) {
      ++report.zero_norm_outputs;
      item.correct = false;
    } else {
      item.predicted = table.token(nearest[k]);
      item.correct = item.predicted == item.expected;
    }
    items.push_back(std::move(item));
  }
}

}  // namespace

EvalReport evaluate(const TransferFn& fn, const std::string& attribute,
                    const std::string& model_kind,
                    const std::vector<Triplet>& attr_test,
                    const std::vector<std::string>& non_test,
                    const EmbeddingTable& table) {
  EvalReport report;
  report.attribute = attribute;
  report.model_kind = model_kind;
  report.vocab_size = table.size();

  std::vector<Pending> attr_pending;
  for (const auto& t : attr_test) {
    if (!table.contains(t.source) || !table.contains(t.target)) {
      ++report.skipped_attr;
      continue;
    }
    attr_pending.push_back({t.source, t.target});
  }
  std::vector<Pending> non_pending;
  for (const auto& w : non_test) {
    if (!table.contains(w)) {
      ++report.skipped_non;
      continue;
    }
    non_pending.push_back({w, w});
  }
  if (report.skipped_attr + report.skipped_non > 0)
    std::cerr << "evaluate: skipped " << report.skipped_attr << " attribute and "
              << report.skipped_non << " non-attribute out-of-vocabulary items\n";

  run_side(fn, table, attr_pending, report, report.attr_items);
  run_side(fn, table, non_pending, report, report.non_items);

  auto fraction = [](const std::vector<EvalItem>& items) {
    Index correct = 0;
    for (const auto& it : items) correct += it.correct ? 1 : 0;
    return static_cast<double>(correct) / static_cast<double>(items.size());
  };
  if (!report.attr_items.empty()) report.accuracy = fraction(report.attr_items);
  if (!report.non_items.empty()) report.stability = fraction(report.non_items);
  return report;
}

EvalReport evaluate(const RefModel& model, const AttributeDataset& dataset,
                    const NonAttributeSet& nonattr,
                    const EmbeddingTable& table) {
  return evaluate(make_transfer_fn(model), dataset.attribute,
                  model.parameterized ? "refpm" : "ref", dataset.test,
                  nonattr.test, table);
}

EvalReport evaluate(const MlpTransferModel& model,
                    const AttributeDataset& dataset,
                    const NonAttributeSet& nonattr,
                    const EmbeddingTable& table) {
  return evaluate(make_transfer_fn(model), dataset.attribute, "mlp",
                  dataset.test, nonattr.test, table);
}

void export_distances(const RefModel& model, const AttributeDataset& dataset,
                      const NonAttributeSet& nonattr,
                      const EmbeddingTable& table, const std::string& path) {
  std::ostringstream out;
  out << "token\trole\tpair\tmirror_distance\tpair_distance\n";

  Index skipped = 0;
  for (std::size_t p = 0; p < dataset.test_pairs.size(); ++p) {
    const auto& [m, w] = dataset.test_pairs[p];
    for (const auto& [x, t] : {std::pair{m, w}, std::pair{w, m}}) {
      const auto xi = table.find(x);
      const auto ti = table.find(t);
      if (!xi || !ti) {
        ++skipped;
        continue;
      }
      const Vector v_x = table.vectors().row(*xi).transpose();
      const Vector v_t = table.vectors().row(*ti).transpose();
      const Mirror mir = model.parameterized ? mirror_for(model, v_x)
                                             : mirror_for(model);
      out << x << "\tattribute\t" << p << '\t'
          << format_g17(distance_to_mirror(mir, v_x)) << '\t'
          << format_g17((v_x - v_t).norm()) << '\n';
    }
  }
  for (const auto& wtok : nonattr.test) {
    const auto wi = table.find(wtok);
    if (!wi) {
      ++skipped;
      continue;
    }
    const Vector v_x = table.vectors().row(*wi).transpose();
    const Mirror mir = model.parameterized ? mirror_for(model, v_x)
                                           : mirror_for(model);
    out << wtok << "\tnon_attribute\t\t"
        << format_g17(distance_to_mirror(mir, v_x)) << "\t\n";
  }
  if (skipped > 0)
    std::cerr << "export_distances: skipped " << skipped
              << " out-of-vocabulary tokens\n";
  atomic_write_text(path, out.str());
}

void export_mirror_params(const RefModel& model, const PairList& pairs,
                          const EmbeddingTable& table, const std::string& path) {
  if (!model.parameterized)
    std::cerr << "export_mirror_params: single-mirror model, every row carries "
                 "the one shared normal\n";

  std::ostringstream out;
  out << "token\tpair";
  for (Index j = 0; j < model.dim(); ++j) out << "\ta" << j;
  out << '\n';

  Index skipped = 0;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    for (const std::string& tok : {pairs[p].first, pairs[p].second}) {
      const auto idx = table.find(tok);
      if (!idx) {
        ++skipped;
        continue;
      }
      const Vector v_x = table.vectors().row(*idx).transpose();
      const Mirror mir = model.parameterized ? mirror_for(model, v_x)
                                             : mirror_for(model);
      out << tok << '\t' << p;
      for (Index j = 0; j < mir.normal.size(); ++j)
        out << '\t' << format_g17(mir.normal[j]);
      out << '\n';
    }
  }
  if (skipped > 0)
    std::cerr << "export_mirror_params: skipped " << skipped
              << " out-of-vocabulary tokens\n";
  atomic_write_text(path, out.str());
}

std::vector<std::string> tokenize_whitespace(const std::string& text) {
  std::vector<std::string> tokens;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) tokens.push_back(tok);
  return tokens;
}

std::vector<std::string> transfer_text(const TransferFn& fn,
                                       const EmbeddingTable& table,
                                       const std::vector<std::string>& tokens,
                                       bool mark_oov) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& tok : tokens) {
    auto idx = table.find(tok);
    if (!idx) {
      std::string lower = tok;
      std::transform(lower.begin(), lower.end(), lower.begin(),
                     [](unsigned char c) { return std::tolower(c); });
      idx = table.find(lower);
    }
    if (!idx) {
      out.push_back(mark_oov ? "[" + tok + "]" : tok);
      continue;
    }
    const Vector v_x = table.vectors().row(*idx).transpose();
    try {
      const Vector v_y = fn(tok, v_x);
      if (v_y.norm() == 0.0) {
        out.push_back(tok);
        continue;
      }
      out.push_back(table.nearest_token(v_y).first);
    } catch (const NumericError&) {
      out.push_back(tok);
    }
  }
  return out;
}

}  // namespace reflect
