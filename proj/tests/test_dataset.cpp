#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>

#include "reflect/dataset.hpp"
#include "reflect/rng.hpp"

using namespace reflect;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  const fs::path dir = fs::temp_directory_path() / "reflect_dataset_tests";
  fs::create_directories(dir);
  return dir;
}

std::string write_file(const std::string& name, const std::string& content) {
  const fs::path path = temp_dir() / name;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  return path.string();
}

std::string pairs_53() {
  std::string text = "# male-female style pairs\n";
  for (int i = 0; i < 53; ++i)
    text += "m" + std::to_string(i) + "\tw" + std::to_string(i) + "\n";
  return text;
}

EmbeddingTable random_table(Index n, Index d, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::string> tokens;
  Matrix m(n, d);
  for (Index i = 0; i < n; ++i) {
    tokens.push_back("tok" + std::to_string(i));
    m.row(i) = rng.normal_vector(d).transpose();
  }
  return EmbeddingTable(tokens, m);
}

}  // namespace

TEST_CASE("manifest 29/12/12 over 53 pairs") {
  const auto path = write_file("mf.tsv", pairs_53());
  const AttributeDataset d = load_pairs(path, {29, 12, 12, 7}, "mf");
  CHECK(d.train_pairs.size() == 29);
  CHECK(d.val_pairs.size() == 12);
  CHECK(d.test_pairs.size() == 12);
  CHECK(d.train.size() == 58);
  CHECK(d.val.size() == 24);
  CHECK(d.test.size() == 24);
}

TEST_CASE("one pair expands to both directions") {
  const auto path = write_file("one.tsv", "a\tb\n");
  const AttributeDataset d = load_pairs(path, {1, 0, 0, 1}, "toy");
  REQUIRE(d.train.size() == 2);
  CHECK(d.train[0].source == "a");
  CHECK(d.train[0].target == "b");
  CHECK(d.train[1].source == "b");
  CHECK(d.train[1].target == "a");
  CHECK(d.val.empty());
  CHECK(d.test.empty());
}

TEST_CASE("oversized manifests are rejected") {
  const auto path = write_file("mf2.tsv", pairs_53());
  CHECK_THROWS_AS(load_pairs(path, {60, 0, 0, 1}, "mf"), DataError);
}

TEST_CASE("directed symmetry holds in every split") {
  const auto path = write_file("mf3.tsv", pairs_53());
  const AttributeDataset d = load_pairs(path, {20, 16, 17, 3}, "mf");
  for (const auto* split : {&d.train, &d.val, &d.test}) {
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& t : *split) seen.insert({t.source, t.target});
    for (const auto& t : *split)
      CHECK(seen.count({t.target, t.source}) == 1);
  }
}

TEST_CASE("splits are disjoint and cover distinct pairs") {
  const auto path = write_file("mf4.tsv", pairs_53());
  const AttributeDataset d = load_pairs(path, {29, 12, 12, 9}, "mf");
  std::set<std::string> seen;
  for (const auto* split : {&d.train_pairs, &d.val_pairs, &d.test_pairs})
    for (const auto& [m, w] : *split) CHECK(seen.insert(m + "|" + w).second);
  CHECK(seen.size() == 53);
}

TEST_CASE("split shuffles are seeded") {
  const auto path = write_file("mf5.tsv", pairs_53());
  const AttributeDataset d1 = load_pairs(path, {29, 12, 12, 5}, "mf");
  const AttributeDataset d2 = load_pairs(path, {29, 12, 12, 5}, "mf");
  const AttributeDataset d3 = load_pairs(path, {29, 12, 12, 6}, "mf");
  CHECK(d1.train_pairs == d2.train_pairs);
  CHECK(d1.test_pairs == d2.test_pairs);
  CHECK(d1.train_pairs != d3.train_pairs);
}

TEST_CASE("malformed pair lines name the line") {
  const auto path = write_file("bad.tsv", "a\tb\nc d\n");
  CHECK_THROWS_WITH_AS(read_pair_file(path), doctest::Contains("line 2"),
                       ParseError);
  const auto dup = write_file("dup.tsv", "a\tb\nb\ta\n");
  CHECK_THROWS_WITH_AS(read_pair_file(dup), doctest::Contains("duplicate"),
                       ParseError);
  const auto self = write_file("self.tsv", "a\ta\n");
  CHECK_THROWS_AS(read_pair_file(self), ParseError);
}

TEST_CASE("explicit split files must not overlap") {
  const auto tr = write_file("tr.tsv", "a\tb\nc\td\n");
  const auto va = write_file("va.tsv", "e\tf\n");
  const auto te = write_file("te.tsv", "g\th\n");
  const AttributeDataset d = load_pair_splits(tr, va, te, "toy");
  CHECK(d.train_pairs.size() == 2);
  CHECK(d.val_pairs.size() == 1);
  CHECK(d.test_pairs.size() == 1);

  const auto overlap = write_file("overlap.tsv", "b\ta\n");
  CHECK_THROWS_AS(load_pair_splits(tr, va, overlap, "toy"), DataError);
}

TEST_CASE("non-attribute sampling excludes pair tokens") {
  const EmbeddingTable t = random_table(60, 4, 77);
  AttributeDataset d;
  d.attribute = "toy";
  d.train_pairs = {{"tok0", "tok1"}, {"tok2", "tok3"}};
  d.test_pairs = {{"tok4", "tok5"}};

  const NonAttributeSet s = sample_non_attribute(t, d, 4, 20, 5);
  CHECK(s.train.size() == 4);
  CHECK(s.test.size() == 20);

  std::set<std::string> excluded{"tok0", "tok1", "tok2", "tok3", "tok4", "tok5"};
  std::set<std::string> seen;
  for (const auto* side : {&s.train, &s.test}) {
    for (const auto& w : *side) {
      CHECK(excluded.count(w) == 0);
      CHECK(seen.insert(w).second);  // train and test stay disjoint
    }
  }

  const NonAttributeSet again = sample_non_attribute(t, d, 4, 20, 5);
  CHECK(again.train == s.train);
  CHECK(again.test == s.test);

  const NonAttributeSet empty_train = sample_non_attribute(t, d, 0, 10, 5);
  CHECK(empty_train.train.empty());

  CHECK_THROWS_AS(sample_non_attribute(t, d, 30, 30, 5), DataError);
}

TEST_CASE("token and pair files round-trip") {
  const std::vector<std::string> tokens{"alpha", "beta", "gamma"};
  const auto tok_path = (temp_dir() / "tokens.txt").string();
  write_token_file(tok_path, tokens);
  CHECK(read_token_file(tok_path) == tokens);

  const PairList pairs{{"a", "b"}, {"c", "d"}};
  const auto pair_path = (temp_dir() / "pairs.tsv").string();
  write_pair_file(pair_path, pairs);
  CHECK(read_pair_file(pair_path) == pairs);
}
