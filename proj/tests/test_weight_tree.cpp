// Copyright 2026 The aldfit Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <functional>
#include <numeric>
#include <random>
#include <set>

#include "aldfit/error.hpp"
#include "aldfit/weight_tree.hpp"
#include "oracles.hpp"

using namespace aldfit;

namespace {

using IndexSet = std::set<std::size_t>;

IndexSet as_set(const std::vector<std::size_t>& v) { return {v.begin(), v.end()}; }

void for_each_node(const WeightTreeNode& n, const std::function<void(const WeightTreeNode&)>& fn) {
  fn(n);
  for (const auto& c : n.children) for_each_node(c, fn);
}

}  // namespace

TEST_CASE("root is a sign split") {
  const std::vector<float> theta = {3, 1, -2, -4, 0.5};
  const auto t = build_tree(theta, {1, 4});
  REQUIRE(t.children.size() == 2);
  CHECK(t.plus().member_indices == std::vector<std::size_t>{0, 1, 4});
  CHECK(t.minus().member_indices == std::vector<std::size_t>{2, 3});
  CHECK(t.plus().is_leaf());
  CHECK(t.plus().sign_path == "+");
}

TEST_CASE("median split with ties to plus") {
  const std::vector<float> theta = {3, 1, 0.5};
  const auto t = build_tree(theta, {2, 2});
  const auto& plus = t.plus();
  REQUIRE_FALSE(plus.is_leaf());
  CHECK(*plus.pivot == 1.0);
  CHECK(plus.plus().member_values == std::vector<float>{3, 1});
  CHECK(plus.minus().member_values == std::vector<float>{0.5});
  CHECK(plus.plus().sign_path == "++");
  CHECK(plus.minus().sign_path == "+-");
}

TEST_CASE("select_neurons on small vectors") {
  SUBCASE("depth 1, [3, -4]") {
    const std::vector<float> theta = {3, -4};
    const auto sel = select_neurons(build_tree(theta, {1, 4}), 0);
    CHECK(sel.positive_terminal == std::vector<std::size_t>{0});
    CHECK(sel.negative_terminal == std::vector<std::size_t>{1});
  }
  SUBCASE("one-sided [4, 3, 2, 1], depth 2") {
    const std::vector<float> theta = {4, 3, 2, 1};
    const auto sel = select_neurons(build_tree(theta, {2, 2}), 5);
    CHECK(sel.positive_terminal == std::vector<std::size_t>{0, 1});
    CHECK(sel.negative_terminal.empty());
    CHECK(sel.class_index == 5);
  }
  SUBCASE("stage labels") {
    const std::vector<float> theta = {3, -4, 1};
    const auto sel = select_neurons(build_tree(theta, {1, 4}), 0);
    CHECK(sel.positive_terminal == std::vector<std::size_t>{0, 2});
    REQUIRE(sel.stages.size() == 3);
    CHECK(sel.stages[0].label == "0");
    CHECK(sel.stages[1].label == "+1");
    CHECK(sel.stages[2].label == "-1");
  }
  CHECK(stage_label("+++") == "+3");
  CHECK(stage_label("--") == "-2");
  CHECK(stage_label("+-") == "+-");
}

TEST_CASE("errors and option validation") {
  CHECK_THROWS_AS(build_tree(std::vector<float>{}, {}), Error);
  CHECK_THROWS_AS(build_tree(std::vector<float>{1, 2}, {0, 4}), Error);
  CHECK_THROWS_AS(build_tree(std::vector<float>{1, 2}, {3, 1}), Error);
}

TEST_CASE("fits are attached to non-root nodes") {
  std::mt19937_64 rng(1);
  const auto row = oracle::random_row(rng, 64);
  const auto t = build_tree(row, {});
  CHECK_FALSE(t.fit.has_value());
  for_each_node(t, [](const WeightTreeNode& n) {
    if (n.level() == 0) return;
    if (n.size() >= 2 && !n.fit) CHECK_FALSE(n.fit_error.empty());
    if (n.fit) {
      CHECK(n.fit->count >= 2);
      CHECK(n.fit->sign == (n.sign_path.front() == '+' ? BranchSign::kPositive : BranchSign::kNegative));
    }
  });
}

TEST_CASE("property: partition, index fidelity, monotone terminals, top-values oracle") {
  std::mt19937_64 rng(2026);
  std::uniform_int_distribution<std::size_t> len(8, 4096);
  for (int trial = 0; trial < 200; ++trial) {
    const auto row = oracle::random_row(rng, len(rng));
    const TreeOptions opts{1 + static_cast<int>(rng() % 5), 2 + rng() % 6};
    const auto tree = build_tree(row, opts);

    IndexSet leaves;
    std::size_t leaf_total = 0;
    for_each_node(tree, [&](const WeightTreeNode& n) {
      for (std::size_t i = 0; i < n.size(); ++i) REQUIRE(row[n.member_indices[i]] == n.member_values[i]);
      if (n.is_leaf()) {
        leaves.insert(n.member_indices.begin(), n.member_indices.end());
        leaf_total += n.size();
        CHECK(static_cast<int>(n.level()) <= opts.depth);
        return;
      }
      const auto p = as_set(n.plus().member_indices), m = as_set(n.minus().member_indices);
      IndexSet both = p;
      both.insert(m.begin(), m.end());
      CHECK(both.size() == p.size() + m.size());
      CHECK(both == as_set(n.member_indices));
      for (float v : n.plus().member_values) CHECK(v >= *n.pivot);
      for (float v : n.minus().member_values) CHECK(v < *n.pivot);
    });
    CHECK(leaves.size() == row.size());
    CHECK(leaf_total == row.size());

    const auto sel = select_neurons(tree, 0);
    CHECK(as_set(sel.positive_terminal) == oracle::top_terminal(row, opts.depth, opts.min_leaf));
    if (!sel.negative_terminal.empty()) {
      const float row_min = *std::min_element(row.begin(), row.end());
      CHECK(std::any_of(sel.negative_terminal.begin(), sel.negative_terminal.end(),
                        [&](std::size_t i) { return row[i] == row_min; }));
    }
    for (std::size_t i : sel.positive_terminal) CHECK(std::find(sel.negative_terminal.begin(), sel.negative_terminal.end(), i) == sel.negative_terminal.end());

    CHECK(build_tree(row, opts).member_indices == tree.member_indices);
    CHECK(select_neurons(build_tree(row, opts), 0) == sel);
  }
}

TEST_CASE("depth 3, min_leaf 4 on a 512-wide row") {
  std::mt19937_64 rng(512);
  std::normal_distribution<float> n(0, 1);
  std::vector<float> row(512);
  for (auto& v : row) v = n(rng);
  const auto tree = build_tree(row, {3, 4});
  for_each_node(tree, [](const WeightTreeNode& node) {
    if (!node.is_leaf() && node.level() > 0) CHECK(node.size() >= 4);
  });
  const auto sel = select_neurons(tree, 0);
  std::vector<std::size_t> order(row.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return row[a] > row[b]; });
  const IndexSet top(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(sel.positive_terminal.size()));
  CHECK(as_set(sel.positive_terminal) == top);
}
