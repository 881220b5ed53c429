// Copyright 2026 The aldfit Authors
// SPDX-License-Identifier: Apache-2.0

#include "aldfit/cli.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>
#include <set>
#include <string>

#include <CLI11.hpp>

#include "aldfit/error.hpp"
#include "aldfit/kernels.hpp"
#include "aldfit/report.hpp"

namespace aldfit::cli {
namespace {

// Example classes shown in plots when an input carries ImageNet labels and no
// explicit class filter is given.
const std::vector<std::string> kDefaultPlotLabels = {"tricycle", "web site", "whiptail"};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t");
  const auto e = s.find_last_not_of(" \t");
  return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

// A label matches when it equals NAME or its first comma-separated synonym
// does, ignoring case ("tricycle, trike, velocipede" matches "tricycle").
bool label_matches(const std::string& label, const std::string& name) {
  const std::string want = lower(trim(name));
  return lower(trim(label)) == want || lower(trim(label.substr(0, label.find(',')))) == want;
}

std::optional<std::size_t> find_label(const WeightMatrix& matrix, const std::string& name) {
  for (std::size_t k = 0; k < matrix.class_labels().size(); ++k) {
    if (label_matches(matrix.class_labels()[k], name)) return k;
  }
  return std::nullopt;
}

struct Common {
  std::string input;
  std::string out;
  std::vector<long long> classes;
  std::vector<std::string> labels;

  bool filtered() const { return !classes.empty() || !labels.empty(); }
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--input", c.input, "ALDW or CSV weight matrix")->required();
  cmd->add_option("--out", c.out, "Write JSON here instead of stdout");
  cmd->add_option("--class", c.classes, "Class index to include (repeatable)");
  cmd->add_option("--label", c.labels, "Class label to include (repeatable)");
}

std::vector<std::size_t> resolve_classes(const WeightMatrix& matrix, const Common& c) {
  if (!c.filtered()) return all_classes(matrix);
  std::set<std::size_t> picked;
  for (long long k : c.classes) {
    if (k < 0 || static_cast<std::size_t>(k) >= matrix.num_classes()) {
      throw UsageError("--class " + std::to_string(k) + " out of range for K=" +
                       std::to_string(matrix.num_classes()));
    }
    picked.insert(static_cast<std::size_t>(k));
  }
  for (const auto& name : c.labels) {
    const auto k = find_label(matrix, name);
    if (!k) throw UsageError("--label '" + name + "' not found");
    picked.insert(*k);
  }
  return {picked.begin(), picked.end()};
}

std::vector<std::size_t> plot_classes(const WeightMatrix& matrix, const Common& c,
                                      const std::vector<std::size_t>& selected) {
  if (c.filtered()) return selected;
  std::vector<std::size_t> out;
  if (matrix.has_labels()) {
    for (const auto& name : kDefaultPlotLabels) {
      if (auto k = find_label(matrix, name)) out.push_back(*k);
    }
    if (out.size() == kDefaultPlotLabels.size()) return out;
    out.clear();
  }
  for (std::size_t k = 0; k < std::min<std::size_t>(3, matrix.num_classes()); ++k) out.push_back(k);
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  write_file_bytes(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

void emit_json(const ordered_json& j, const std::string& path, std::ostream& out) {
  const std::string text = j.dump(2) + "\n";
  if (path.empty()) {
    out << text;
  } else {
    write_text(path, text);
  }
}

double parse_threshold(const std::string& text) {
  const std::string t = lower(trim(text));
  if (t == "inf" || t == "+inf" || t == "infinity") return std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    throw UsageError("--threshold '" + text + "' is not a number");
  }
  if (used != t.size() || !(v > 0.0)) throw UsageError("--threshold must be a positive number or inf");
  return v;
}

int cmd_fit(const Common& c, double location, const std::string& plot, const std::string& csv, std::ostream& out) {
  const auto bytes = read_file_bytes(c.input);
  const WeightMatrix matrix = decode_matrix(bytes, std::filesystem::path(c.input).stem().string());
  const auto classes = resolve_classes(matrix, c);
  const auto fits = fit_classes(matrix, classes, FitOptions{location});

  emit_json(fit_report_json(matrix, fits, sha256_hex(bytes)), c.out, out);

  if (!plot.empty() || !csv.empty()) {
    const auto wanted = plot_classes(matrix, c, classes);
    std::vector<ClassFit> plotted;
    for (std::size_t k : wanted) {
      const auto it = std::find_if(fits.begin(), fits.end(), [k](const ClassFit& f) { return f.class_index == k; });
      plotted.push_back(it != fits.end() ? *it : fit_class(matrix.row(k), k, FitOptions{location}));
    }
    if (!plot.empty()) write_text(plot, render_fit_svg(matrix, plotted));
    if (!csv.empty()) write_text(csv, fit_points_csv(matrix, plotted));
  }

  const bool any = std::any_of(fits.begin(), fits.end(), [](const ClassFit& f) { return f.any_branch_fitted(); });
  return any ? kOk : kNoFittableClasses;
}

int cmd_tree(const Common& c, const TreeOptions& options, std::ostream& out) {
  const WeightMatrix matrix = read_matrix(c.input);
  const auto classes = resolve_classes(matrix, c);
  const auto trees = build_trees(matrix, classes, options);
  ordered_json j;
  j["matrix"] = matrix.name();
  j["depth"] = options.depth;
  j["min_leaf"] = options.min_leaf;
  ordered_json arr = ordered_json::array();
  for (std::size_t i = 0; i < trees.size(); ++i) {
    ordered_json t;
    t["class_index"] = classes[i];
    t["label"] = class_label(matrix, classes[i]) ? ordered_json(*class_label(matrix, classes[i])) : ordered_json(nullptr);
    t["root"] = tree_to_json(trees[i]);
    arr.push_back(std::move(t));
  }
  j["trees"] = std::move(arr);
  emit_json(j, c.out, out);
  return kOk;
}

int cmd_select(const Common& c, const TreeOptions& options, std::ostream& out) {
  const WeightMatrix matrix = read_matrix(c.input);
  const auto classes = resolve_classes(matrix, c);
  const auto selections = select_classes(matrix, classes, options);
  ordered_json arr = ordered_json::array();
  for (const auto& s : selections) arr.push_back(selection_to_json(s, class_label(matrix, s.class_index)));
  emit_json(arr, c.out, out);
  return kOk;
}

int cmd_prune(const std::string& input, const std::string& output, const std::string& report,
              const std::string& rule, const std::string& threshold_text, const TreeOptions& tree,
              std::ostream& out) {
  if (output.empty()) throw UsageError("prune needs --out for the pruned matrix");
  PruneRule chosen;
  if (rule == "residual") {
    if (threshold_text.empty()) throw UsageError("--rule residual requires --threshold");
    chosen = ResidualRule{parse_threshold(threshold_text)};
  } else if (rule == "terminal") {
    chosen = TerminalRule{tree.depth, tree.min_leaf};
  } else {
    throw UsageError("--rule must be residual or terminal");
  }

  const WeightMatrix matrix = read_matrix(input);
  std::vector<std::size_t> unfit;
  std::vector<PruneMask> masks;
  if (const auto* r = std::get_if<ResidualRule>(&chosen)) {
    masks = residual_masks(matrix, r->threshold, &unfit);
  } else {
    masks = terminal_masks(matrix, std::get<TerminalRule>(chosen));
  }
  write_matrix(apply_mask(matrix, masks), output);
  emit_json(mask_report_json(matrix, chosen, masks, unfit), report, out);
  const bool residual = std::holds_alternative<ResidualRule>(chosen);
  return residual && unfit.size() == matrix.num_classes() ? kNoFittableClasses : kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Asymmetric Laplace fits, sign-split trees and pruning masks for classifier heads", "aldfit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  Common fit_opts, tree_opts, select_opts;
  double fit_location = 0.0;
  std::string plot_path, csv_path;
  auto* fit = app.add_subcommand("fit", "Fit per-class branch regressions and ALD parameters");
  add_common(fit, fit_opts);
  fit->add_option("--plot", plot_path, "Write an SVG quantile plot");
  fit->add_option("--csv", csv_path, "Write the plotted points as CSV");
  fit->add_option("--m", fit_location, "Location / sign-split pivot")->capture_default_str();

  TreeOptions tree_cfg, select_cfg, prune_cfg;
  auto add_tree_flags = [](CLI::App* cmd, TreeOptions& cfg) {
    cmd->add_option("--depth", cfg.depth, "Tree depth")->capture_default_str();
    cmd->add_option("--min-leaf", cfg.min_leaf, "Smallest node that may still split")->capture_default_str();
  };
  auto* tree = app.add_subcommand("tree", "Build sign-split trees and dump them as JSON");
  add_common(tree, tree_opts);
  add_tree_flags(tree, tree_cfg);
  auto* select = app.add_subcommand("select", "Select terminal-node neurons per class");
  add_common(select, select_opts);
  add_tree_flags(select, select_cfg);

  std::string prune_input, prune_out, prune_report, prune_rule, prune_threshold;
  auto* prune = app.add_subcommand("prune", "Write a pruned matrix and a mask report");
  prune->add_option("--input", prune_input, "ALDW or CSV weight matrix")->required();
  prune->add_option("--out", prune_out, "Pruned ALDW output")->required();
  prune->add_option("--report", prune_report, "Write the mask report here instead of stdout");
  prune->add_option("--rule", prune_rule, "residual | terminal")->required();
  prune->add_option("--threshold", prune_threshold, "Standardized residual cut-off (FLOAT or inf)");
  add_tree_flags(prune, prune_cfg);

  AldParams synth_params{0.0, 1.0, 1.0};
  long long synth_k = 0, synth_d = 0;
  std::uint64_t synth_seed = 0;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "Write a matrix whose rows are ALD draws");
  synth->add_option("--lambda", synth_params.lambda, "Rate")->required();
  synth->add_option("--kappa", synth_params.kappa, "Asymmetry")->required();
  synth->add_option("--m", synth_params.m, "Location")->capture_default_str();
  synth->add_option("--K", synth_k, "Classes")->required();
  synth->add_option("--D", synth_d, "Features per class")->required();
  synth->add_option("--seed", synth_seed, "RNG seed")->capture_default_str();
  synth->add_option("--out", synth_out, "ALDW output")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*fit) return cmd_fit(fit_opts, fit_location, plot_path, csv_path, out);
    if (*tree) {
      tree_cfg.validate();
      return cmd_tree(tree_opts, tree_cfg, out);
    }
    if (*select) {
      select_cfg.validate();
      return cmd_select(select_opts, select_cfg, out);
    }
    if (*prune) {
      prune_cfg.validate();
      return cmd_prune(prune_input, prune_out, prune_report, prune_rule, prune_threshold, prune_cfg, out);
    }
    if (*synth) {
      if (synth_k < 1 || synth_d < 2) throw UsageError("synth needs --K >= 1 and --D >= 2");
      synth_params.validate();
      write_matrix(sample_matrix(synth_params, static_cast<std::size_t>(synth_k), static_cast<std::size_t>(synth_d),
                                 synth_seed),
                   synth_out);
      return kOk;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    switch (e.code()) {
      case ErrorCode::kInvalidArgument:
      case ErrorCode::kInvalidParams:
      case ErrorCode::kInvalidRate:
        return kUsage;
      default:
        return kIoError;
    }
  }
  return kUsage;
}

}  // namespace aldfit::cli
