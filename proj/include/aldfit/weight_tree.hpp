// Copyright 2026 The aldfit Authors
// SPDX-License-Identifier: Apache-2.0

// Recursive sign-split tree over one class's weight vector.
//
// The root splits at zero (ties to `+`). Every deeper node splits its members
// at the node median: the value at ascending rank floor(n/2), so `+` receives
// ceil(n/2) members when there are no ties. Splits always act on raw values,
// so on the negative side the all-`-` path descends into the most negative
// weights and on the positive side the all-`+` path into the largest ones.

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aldfit/ald.hpp"

namespace aldfit {

struct TreeOptions {
  int depth = 3;
  std::size_t min_leaf = 4;

  void validate() const;
};

struct WeightTreeNode {
  std::string sign_path;  // over {'+', '-'}; empty at the root
  std::vector<std::size_t> member_indices;  // ascending column order
  std::vector<float> member_values;
  std::optional<double> pivot;  // set iff the node was split
  std::optional<BranchFit> fit;  // log-linear fit of |values|; root is never fitted
  std::string fit_error;
  std::vector<WeightTreeNode> children;  // empty, or {plus, minus}

  bool is_leaf() const noexcept { return children.empty(); }
  const WeightTreeNode& plus() const { return children.at(0); }
  const WeightTreeNode& minus() const { return children.at(1); }
  std::size_t level() const noexcept { return sign_path.size(); }
  std::size_t size() const noexcept { return member_indices.size(); }
};

/// A non-root node becomes a leaf when the depth is exhausted, it holds fewer
/// than min_leaf members, or its median split would leave one side empty.
/// The root always splits. Throws EmptyVector for an empty row.
WeightTreeNode build_tree(std::span<const float> theta, const TreeOptions& options = {});

/// "+n" / "-n" for uniform paths of length n, the path itself for mixed ones,
/// "0" for the root.
std::string stage_label(std::string_view sign_path);

struct Stage {
  std::string path;
  std::string label;
  std::vector<std::size_t> indices;

  friend bool operator==(const Stage&, const Stage&) = default;
};

struct NeuronSelection {
  std::size_t class_index = 0;
  int depth = 0;
  std::vector<std::size_t> positive_terminal;
  std::vector<std::size_t> negative_terminal;
  std::vector<Stage> stages;  // pre-order, `+` before `-`

  friend bool operator==(const NeuronSelection&, const NeuronSelection&) = default;
};

NeuronSelection select_neurons(const WeightTreeNode& tree, std::size_t class_index);

/// Height of the tree (root alone = 0).
int tree_height(const WeightTreeNode& tree);

}  // namespace aldfit
