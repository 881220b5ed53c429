// Copyright 2026 The aldfit Authors
// SPDX-License-Identifier: Apache-2.0

#include "aldfit/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include <openssl/evp.h>

#include "aldfit/error.hpp"

namespace aldfit {
namespace {

std::string fmt(double v, const char* spec = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

ordered_json label_json(const std::optional<std::string>& label) {
  return label ? ordered_json(*label) : ordered_json(nullptr);
}

ordered_json branch_json(const BranchOutcome& b) {
  ordered_json j;
  j["sign"] = to_string(b.sign);
  if (b.fit) {
    const BranchFit& f = *b.fit;
    j["count"] = f.count;
    j["raw_count"] = b.raw_count;
    j["slope"] = f.slope;
    j["intercept"] = f.intercept;
    j["r_squared"] = f.r_squared;
    j["residual_sd"] = f.residual_sd;
    j["rate_ml"] = *b.rate_ml;
    j["excluded_near_zero"] = b.excluded_near_zero;
    j["residual_rms_by_quartile"] = residual_rms_by_band(f, 4);
  } else {
    j["raw_count"] = b.raw_count;
    j["excluded_near_zero"] = b.excluded_near_zero;
    j["error"] = b.error ? std::string(to_string(*b.error)) : std::string("Unknown");
    j["message"] = b.error_message;
  }
  return j;
}

struct Panel {
  const ClassFit* fit;
  std::string title;
};

void draw_branch(std::string& svg, const BranchFit& fit, const char* colour, double x0, double y0, double w,
                 double h, double ymin, double ymax) {
  const auto px = [&](double x) { return x0 + x * w; };
  const auto py = [&](double y) { return y0 + h - (y - ymin) / (ymax - ymin) * h; };
  const std::size_t stride = std::max<std::size_t>(1, (fit.count + kSvgMaxPointsPerBranch - 1) / kSvgMaxPointsPerBranch);
  svg += "<g class=\"points\" fill=\"" + std::string(colour) + "\" fill-opacity=\"0.6\">\n";
  for (std::size_t r = 0; r < fit.count; r += stride) {
    svg += "<circle cx=\"" + fmt(px(fit.regressor(r)), "%.2f") + "\" cy=\"" +
           fmt(py(std::log(fit.sorted_values[r])), "%.2f") + "\" r=\"1.5\"/>\n";
  }
  svg += "</g>\n";
  svg += "<line class=\"fit\" stroke=\"" + std::string(colour) + "\" stroke-width=\"2\" x1=\"" + fmt(px(0), "%.2f") +
         "\" y1=\"" + fmt(py(fit.intercept), "%.2f") + "\" x2=\"" + fmt(px(1), "%.2f") + "\" y2=\"" +
         fmt(py(fit.slope + fit.intercept), "%.2f") + "\"/>\n";
}

}  // namespace

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::kIoFailure, "sha256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

std::optional<std::string> class_label(const WeightMatrix& matrix, std::size_t k) {
  if (!matrix.has_labels()) return std::nullopt;
  return matrix.class_labels().at(k);
}

std::vector<double> residual_rms_by_band(const BranchFit& fit, std::size_t bands) {
  std::vector<double> sum(bands, 0.0);
  std::vector<std::size_t> n(bands, 0);
  for (std::size_t r = 0; r < fit.count; ++r) {
    const auto b = std::min(bands - 1, static_cast<std::size_t>(fit.regressor(r) * static_cast<double>(bands)));
    const double e = fit.residual(r);
    sum[b] += e * e;
    ++n[b];
  }
  std::vector<double> out(bands, 0.0);
  for (std::size_t b = 0; b < bands; ++b) out[b] = n[b] ? std::sqrt(sum[b] / static_cast<double>(n[b])) : 0.0;
  return out;
}

ordered_json fit_report_json(const WeightMatrix& matrix, std::span<const ClassFit> fits,
                             const std::string& input_digest) {
  ordered_json report;
  report["tool"] = kToolName;
  report["version"] = kToolVersion;
  report["matrix"] = {{"name", matrix.name()},
                      {"num_classes", matrix.num_classes()},
                      {"num_features", matrix.num_features()},
                      {"sha256", input_digest}};
  ordered_json classes = ordered_json::array();
  for (const auto& fit : fits) {
    ordered_json c;
    c["class_index"] = fit.class_index;
    c["label"] = label_json(class_label(matrix, fit.class_index));
    c["status"] = fit.params ? "ok" : (fit.any_branch_fitted() ? "partial" : "degenerate");
    ordered_json branches = ordered_json::array();
    ordered_json failed = ordered_json::array();
    for (const auto* b : {&fit.positive, &fit.negative}) (b->fit ? branches : failed).push_back(branch_json(*b));
    c["branches"] = std::move(branches);
    c["failed_branches"] = std::move(failed);
    if (fit.params) {
      c["combined"] = {{"m", fit.params->m}, {"lambda", fit.params->lambda}, {"kappa", fit.params->kappa}};
    } else {
      c["combined"] = nullptr;
    }
    classes.push_back(std::move(c));
  }
  report["classes"] = std::move(classes);
  return report;
}

ordered_json selection_to_json(const NeuronSelection& selection, const std::optional<std::string>& label) {
  ordered_json j;
  j["class_index"] = selection.class_index;
  j["label"] = label_json(label);
  j["depth"] = selection.depth;
  j["positive_terminal"] = selection.positive_terminal;
  j["negative_terminal"] = selection.negative_terminal;
  ordered_json stages = ordered_json::array();
  for (const auto& s : selection.stages) {
    stages.push_back({{"path", s.path}, {"label", s.label}, {"indices", s.indices}});
  }
  j["stages"] = std::move(stages);
  return j;
}

NeuronSelection selection_from_json(const nlohmann::json& j) {
  try {
    NeuronSelection sel;
    sel.class_index = j.at("class_index").get<std::size_t>();
    sel.depth = j.at("depth").get<int>();
    sel.positive_terminal = j.at("positive_terminal").get<std::vector<std::size_t>>();
    sel.negative_terminal = j.at("negative_terminal").get<std::vector<std::size_t>>();
    for (const auto& s : j.at("stages")) {
      sel.stages.push_back({s.at("path").get<std::string>(), s.at("label").get<std::string>(),
                            s.at("indices").get<std::vector<std::size_t>>()});
    }
    return sel;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("malformed selection JSON: ") + e.what());
  }
}

ordered_json tree_to_json(const WeightTreeNode& node) {
  ordered_json j;
  j["path"] = node.sign_path;
  j["label"] = stage_label(node.sign_path);
  j["pivot"] = node.pivot ? ordered_json(*node.pivot) : ordered_json(nullptr);
  j["indices"] = node.member_indices;
  if (node.fit) {
    j["fit"] = {{"count", node.fit->count},
                {"slope", node.fit->slope},
                {"intercept", node.fit->intercept},
                {"r_squared", node.fit->r_squared},
                {"residual_sd", node.fit->residual_sd}};
  } else {
    j["fit"] = nullptr;
  }
  j["fit_error"] = node.fit_error.empty() ? ordered_json(nullptr) : ordered_json(node.fit_error);
  ordered_json children = ordered_json::array();
  for (const auto& c : node.children) children.push_back(tree_to_json(c));
  j["children"] = std::move(children);
  return j;
}

ordered_json mask_report_json(const WeightMatrix& matrix, const PruneRule& rule, std::span<const PruneMask> masks,
                              std::span<const std::size_t> unfit_classes) {
  ordered_json j;
  j["tool"] = kToolName;
  j["version"] = kToolVersion;
  j["matrix"] = matrix.name();
  if (const auto* r = std::get_if<ResidualRule>(&rule)) {
    j["rule"] = {{"kind", "residual"},
                 {"threshold", std::isinf(r->threshold) ? ordered_json("inf") : ordered_json(r->threshold)}};
  } else {
    const auto& t = std::get<TerminalRule>(rule);
    j["rule"] = {{"kind", "terminal"}, {"depth", t.depth}, {"min_leaf", t.min_leaf}};
  }
  std::size_t total_kept = 0;
  ordered_json classes = ordered_json::array();
  for (const auto& m : masks) {
    std::vector<std::size_t> dropped;
    for (std::size_t i = 0; i < m.keep.size(); ++i) {
      if (!m.keep[i]) dropped.push_back(i);
    }
    total_kept += m.kept();
    ordered_json c;
    c["class_index"] = m.class_index;
    c["label"] = label_json(class_label(matrix, m.class_index));
    c["kept"] = m.kept();
    c["dropped"] = m.dropped();
    c["dropped_indices"] = std::move(dropped);
    c["unfit"] = std::find(unfit_classes.begin(), unfit_classes.end(), m.class_index) != unfit_classes.end();
    classes.push_back(std::move(c));
  }
  j["total_kept"] = total_kept;
  j["total"] = matrix.num_classes() * matrix.num_features();
  j["classes"] = std::move(classes);
  return j;
}

std::string render_fit_svg(const WeightMatrix& matrix, std::span<const ClassFit> fits) {
  std::vector<Panel> panels;
  for (const auto& fit : fits) {
    std::string title = "class " + std::to_string(fit.class_index);
    if (auto label = class_label(matrix, fit.class_index)) title += " (" + *label + ")";
    panels.push_back({&fit, title});
  }
  const std::size_t n = std::max<std::size_t>(1, panels.size());
  const std::size_t cols = std::min<std::size_t>(n, 3);
  const std::size_t rows = (n + cols - 1) / cols;
  const double cell_w = static_cast<double>(kSvgWidth) / static_cast<double>(cols);
  const double cell_h = static_cast<double>(kSvgHeight) / static_cast<double>(rows);

  std::string svg = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(kSvgWidth) + "\" height=\"" +
         std::to_string(kSvgHeight) + "\" viewBox=\"0 0 " + std::to_string(kSvgWidth) + " " +
         std::to_string(kSvgHeight) + "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg += "<title>" + xml_escape(matrix.name()) + ": log sorted |weight| vs normalized rank</title>\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  for (std::size_t p = 0; p < panels.size(); ++p) {
    const ClassFit& fit = *panels[p].fit;
    const double cx = static_cast<double>(p % cols) * cell_w;
    const double cy = static_cast<double>(p / cols) * cell_h;
    const double x0 = cx + 50, y0 = cy + 30, w = cell_w - 70, h = cell_h - 80;

    double ymin = std::numeric_limits<double>::infinity();
    double ymax = -ymin;
    for (const auto* b : {&fit.positive, &fit.negative}) {
      if (!b->fit) continue;
      const auto& f = *b->fit;
      for (double y : {std::log(f.sorted_values.front()), std::log(f.sorted_values.back()), f.intercept,
                       f.slope + f.intercept}) {
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
      }
    }
    if (!(ymax > ymin)) {
      ymin = -1;
      ymax = 1;
    }
    const double pad = 0.05 * (ymax - ymin);
    ymin -= pad;
    ymax += pad;

    svg += "<g class=\"panel\" data-class-index=\"" + std::to_string(fit.class_index) + "\">\n";
    svg += "<text x=\"" + fmt(x0 + w / 2, "%.1f") + "\" y=\"" + fmt(cy + 18, "%.1f") +
           "\" text-anchor=\"middle\" font-weight=\"bold\">" + xml_escape(panels[p].title) + "</text>\n";
    svg += "<rect class=\"axes\" x=\"" + fmt(x0, "%.1f") + "\" y=\"" + fmt(y0, "%.1f") + "\" width=\"" +
           fmt(w, "%.1f") + "\" height=\"" + fmt(h, "%.1f") + "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 4; ++t) {
      const double x = x0 + w * t / 4.0;
      svg += "<text x=\"" + fmt(x, "%.1f") + "\" y=\"" + fmt(y0 + h + 14, "%.1f") + "\" text-anchor=\"middle\">" +
             fmt(t / 4.0, "%.2g") + "</text>\n";
      const double yv = ymin + (ymax - ymin) * t / 4.0;
      svg += "<text x=\"" + fmt(x0 - 4, "%.1f") + "\" y=\"" + fmt(y0 + h - h * t / 4.0 + 4, "%.1f") +
             "\" text-anchor=\"end\">" + fmt(yv, "%.2f") + "</text>\n";
    }
    svg += "<text x=\"" + fmt(x0 + w / 2, "%.1f") + "\" y=\"" + fmt(y0 + h + 28, "%.1f") +
           "\" text-anchor=\"middle\">rank x</text>\n";

    int legend_row = 0;
    for (const auto* b : {&fit.positive, &fit.negative}) {
      if (!b->fit) continue;
      const char* colour = b->sign == BranchSign::kPositive ? "#1f77b4" : "#ff7f0e";
      draw_branch(svg, *b->fit, colour, x0, y0, w, h, ymin, ymax);
      svg += "<text x=\"" + fmt(x0 + 6, "%.1f") + "\" y=\"" + fmt(y0 + 14 + 13 * legend_row++, "%.1f") +
             "\" fill=\"" + colour + "\">" + std::string(to_string(b->sign)) + ": a=" + fmt(b->fit->slope, "%.3f") +
             " b=" + fmt(b->fit->intercept, "%.3f") + " r2=" + fmt(b->fit->r_squared, "%.3f") + "</text>\n";
    }
    svg += "</g>\n";
  }
  svg += "</svg>\n";
  return svg;
}

std::string fit_points_csv(const WeightMatrix& matrix, std::span<const ClassFit> fits) {
  std::string out = "class_index,label,sign,rank,column,x,log_value,fitted\n";
  for (const auto& fit : fits) {
    const std::string label = csv_field(class_label(matrix, fit.class_index).value_or(""));
    for (const auto* b : {&fit.positive, &fit.negative}) {
      if (!b->fit) continue;
      const BranchFit& f = *b->fit;
      for (std::size_t r = 0; r < f.count; ++r) {
        out += std::to_string(fit.class_index) + ',' + label + ',' + std::string(to_string(b->sign)) + ',' +
               std::to_string(r) + ',' + std::to_string(f.member_indices[r]) + ',' + fmt(f.regressor(r), "%.9g") +
               ',' + fmt(std::log(f.sorted_values[r]), "%.9g") + ',' + fmt(f.predicted_log(r), "%.9g") + '\n';
      }
    }
  }
  return out;
}

}  // namespace aldfit
