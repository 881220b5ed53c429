// Copyright 2026 The aldfit Authors
// SPDX-License-Identifier: Apache-2.0

#include "aldfit/weight_tree.hpp"

#include <algorithm>
#include <cmath>

#include "aldfit/error.hpp"

namespace aldfit {
namespace {

void attach_fit(WeightTreeNode& node) {
  std::vector<double> mags;
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < node.size(); ++i) {
    const double mag = std::abs(static_cast<double>(node.member_values[i]));
    if (mag < kNearZero) continue;
    mags.push_back(mag);
    idx.push_back(node.member_indices[i]);
  }
  const BranchSign sign = node.sign_path.front() == '+' ? BranchSign::kPositive : BranchSign::kNegative;
  if (mags.size() < 2) {
    node.fit_error = std::string(to_string(ErrorCode::kDegenerateBranch));
    return;
  }
  try {
    node.fit = fit_branch(mags, sign, idx);
  } catch (const Error& e) {
    node.fit_error = std::string(to_string(e.code()));
  }
}

WeightTreeNode make_child(const WeightTreeNode& parent, char sign, double pivot) {
  WeightTreeNode child;
  child.sign_path = parent.sign_path + sign;
  for (std::size_t i = 0; i < parent.size(); ++i) {
    const bool goes_plus = parent.member_values[i] >= pivot;
    if (goes_plus == (sign == '+')) {
      child.member_indices.push_back(parent.member_indices[i]);
      child.member_values.push_back(parent.member_values[i]);
    }
  }
  attach_fit(child);
  return child;
}

void split(WeightTreeNode& node, const TreeOptions& options) {
  if (static_cast<int>(node.level()) >= options.depth || node.size() < options.min_leaf) return;
  std::vector<float> sorted = node.member_values;
  const std::size_t mid = sorted.size() / 2;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(mid), sorted.end());
  const double pivot = sorted[mid];
  const bool minus_empty = std::none_of(node.member_values.begin(), node.member_values.end(),
                                        [pivot](float v) { return v < pivot; });
  if (minus_empty) return;

  node.pivot = pivot;
  node.children.push_back(make_child(node, '+', pivot));
  node.children.push_back(make_child(node, '-', pivot));
  for (auto& child : node.children) split(child, options);
}

void collect_stages(const WeightTreeNode& node, std::vector<Stage>& out) {
  out.push_back({node.sign_path, stage_label(node.sign_path), node.member_indices});
  for (const auto& child : node.children) collect_stages(child, out);
}

}  // namespace

void TreeOptions::validate() const {
  if (depth < 1) throw Error(ErrorCode::kInvalidArgument, "tree depth must be >= 1");
  if (min_leaf < 2) throw Error(ErrorCode::kInvalidArgument, "min_leaf must be >= 2");
}

WeightTreeNode build_tree(std::span<const float> theta, const TreeOptions& options) {
  options.validate();
  if (theta.empty()) throw Error(ErrorCode::kEmptyVector, "cannot build a tree over an empty row");

  WeightTreeNode root;
  root.member_indices.resize(theta.size());
  root.member_values.assign(theta.begin(), theta.end());
  for (std::size_t i = 0; i < theta.size(); ++i) root.member_indices[i] = i;

  root.pivot = 0.0;
  root.children.push_back(make_child(root, '+', 0.0));
  root.children.push_back(make_child(root, '-', 0.0));
  for (auto& child : root.children) split(child, options);
  return root;
}

std::string stage_label(std::string_view sign_path) {
  if (sign_path.empty()) return "0";
  const char first = sign_path.front();
  if (std::all_of(sign_path.begin(), sign_path.end(), [first](char c) { return c == first; })) {
    return std::string(1, first) + std::to_string(sign_path.size());
  }
  return std::string(sign_path);
}

int tree_height(const WeightTreeNode& tree) {
  int h = 0;
  for (const auto& child : tree.children) h = std::max(h, 1 + tree_height(child));
  return h;
}

NeuronSelection select_neurons(const WeightTreeNode& tree, std::size_t class_index) {
  NeuronSelection sel;
  sel.class_index = class_index;
  sel.depth = tree_height(tree);

  const WeightTreeNode* node = &tree;
  while (!node->is_leaf()) node = &node->plus();
  sel.positive_terminal = node->member_indices;

  node = &tree;
  while (!node->is_leaf()) node = &node->minus();
  sel.negative_terminal = node->member_indices;

  collect_stages(tree, sel.stages);
  return sel;
}

}  // namespace aldfit
