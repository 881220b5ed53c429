// Copyright 2026 The aldfit Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <filesystem>
#include <random>
#include <sstream>

#include <json.hpp>
#include <unistd.h>

#include "aldfit/cli.hpp"
#include "aldfit/kernels.hpp"
#include "aldfit/report.hpp"
#include "aldfit/tensor_io.hpp"

using namespace aldfit;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / ("aldfit_cli_" + std::to_string(::getpid()))) {
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
  const auto b = read_file_bytes(path);
  return {b.begin(), b.end()};
}

// Minimal well-formedness check: every start tag is closed in order.
bool balanced_xml(const std::string& text) {
  std::vector<std::string> stack;
  for (std::size_t pos = text.find('<'); pos != std::string::npos; pos = text.find('<', pos + 1)) {
    const auto end = text.find('>', pos);
    if (end == std::string::npos) return false;
    const std::string tag = text.substr(pos + 1, end - pos - 1);
    if (tag.empty() || tag[0] == '?' || tag[0] == '!') continue;
    if (tag[0] == '/') {
      if (stack.empty() || stack.back() != tag.substr(1)) return false;
      stack.pop_back();
    } else if (tag.back() != '/') {
      stack.push_back(tag.substr(0, tag.find_first_of(" \n")));
    }
  }
  return stack.empty();
}

std::size_t count(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = hay.find(needle); p != std::string::npos; p = hay.find(needle, p + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("synth is deterministic and validates its shape") {
  TempDir dir;
  const std::vector<std::string> base = {"synth", "--lambda", "2", "--kappa", "1.5", "--m", "0",
                                         "--K", "10", "--D", "1000", "--seed", "42", "--out"};
  auto a = base, b = base;
  a.push_back(dir / "a.aldw");
  b.push_back(dir / "b.aldw");
  REQUIRE(run(a).code == 0);
  REQUIRE(run(b).code == 0);
  CHECK(read_file_bytes(dir / "a.aldw") == read_file_bytes(dir / "b.aldw"));
  CHECK(read_matrix(dir / "a.aldw").num_classes() == 10);

  CHECK(run({"synth", "--lambda", "2", "--kappa", "1.5", "--K", "1", "--D", "1", "--out", dir / "x"}).code == 3);
  CHECK(run({"synth", "--lambda", "-2", "--kappa", "1.5", "--K", "1", "--D", "4", "--out", dir / "x"}).code == 3);
  CHECK(run({"synth", "--kappa", "1.5", "--K", "1", "--D", "4", "--out", dir / "x"}).code == 3);
}

TEST_CASE("fit reports recovered parameters and honours class filters") {
  TempDir dir;
  write_matrix(sample_matrix({0, 2, 1.5}, 10, 20000, 5), dir / "s.aldw");
  const auto r = run({"fit", "--input", dir / "s.aldw"});
  REQUIRE(r.code == 0);
  const auto report = json::parse(r.out);
  CHECK(report["matrix"]["sha256"].get<std::string>() == sha256_hex(read_file_bytes(dir / "s.aldw")));
  REQUIRE(report["classes"].size() == 10);
  for (const auto& c : report["classes"]) {
    CHECK(std::abs(c["combined"]["lambda"].get<double>() - 2.0) / 2.0 < 0.05);
    for (const auto& b : c["branches"]) CHECK(b["count"].get<int>() >= 2);
  }

  CHECK(run({"fit", "--input", dir / "s.aldw", "--class", "999"}).code == 3);
  CHECK(run({"fit", "--input", dir / "s.aldw", "--label", "nope"}).code == 3);
  const auto two = run({"fit", "--input", dir / "s.aldw", "--class", "7", "--class", "2"});
  REQUIRE(two.code == 0);
  const auto j = json::parse(two.out);
  REQUIRE(j["classes"].size() == 2);
  CHECK(j["classes"][0]["class_index"] == 2);
  CHECK(j["classes"][1]["class_index"] == 7);

  CHECK(run({"fit", "--input", dir / "s.aldw"}).out == r.out);
}

TEST_CASE("fit exit codes for I/O and degenerate input") {
  TempDir dir;
  CHECK(run({"fit", "--input", dir / "missing.aldw"}).code == 2);
  const std::string junk = "XXXX\x01\x02";
  write_file_bytes(dir / "junk.bin", std::span(reinterpret_cast<const std::uint8_t*>(junk.data()), junk.size()));
  CHECK(run({"fit", "--input", dir / "junk.bin"}).code == 2);

  write_matrix(WeightMatrix("flat", 2, 4, {1, 1, -1, -1, 2, 2, -3, -3}), dir / "flat.aldw");
  const auto r = run({"fit", "--input", dir / "flat.aldw"});
  CHECK(r.code == 4);
  const auto j = json::parse(r.out);
  CHECK(j["classes"][0]["status"] == "degenerate");
  CHECK(j["classes"][0]["failed_branches"][0]["error"] == "ConstantBranch");

  CHECK(run({}).code == 3);
  CHECK(run({"bogus"}).code == 3);
}

TEST_CASE("fit is invariant to column permutation") {
  TempDir dir;
  const auto m = sample_matrix({0.0, 1.5, 0.8}, 3, 500, 9);
  std::vector<std::size_t> perm(500);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), std::mt19937_64(1));
  std::vector<float> shuffled(m.values().size());
  for (std::size_t k = 0; k < 3; ++k) {
    for (std::size_t i = 0; i < 500; ++i) shuffled[k * 500 + i] = m.row(k)[perm[i]];
  }
  write_matrix(m, dir / "a.aldw");
  write_matrix(WeightMatrix(m.name(), 3, 500, shuffled), dir / "b.aldw");
  auto a = json::parse(run({"fit", "--input", dir / "a.aldw"}).out);
  auto b = json::parse(run({"fit", "--input", dir / "b.aldw"}).out);
  CHECK(a["classes"] == b["classes"]);
}

TEST_CASE("plot and CSV output") {
  TempDir dir;
  std::vector<std::string> labels;
  for (int k = 0; k < 6; ++k) labels.push_back("class" + std::to_string(k));
  labels[1] = "tricycle, trike, velocipede";
  labels[3] = "web site, website, internet site, site";
  labels[4] = "whiptail, whiptail lizard";
  const auto synth = sample_matrix({0, 2, 1.5}, 6, 400, 3);
  write_matrix(WeightMatrix("head", 6, 400, {synth.values().begin(), synth.values().end()}, labels), dir / "h.aldw");

  const auto r = run({"fit", "--input", dir / "h.aldw", "--plot", dir / "p.svg", "--csv", dir / "p.csv"});
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["classes"].size() == 6);
  const std::string svg = slurp(dir / "p.svg");
  CHECK(balanced_xml(svg));
  CHECK(svg.find("width=\"800\" height=\"600\"") != std::string::npos);
  CHECK(count(svg, "<g class=\"panel\"") == 3);
  CHECK(count(svg, "<line class=\"fit\"") == 6);
  CHECK(svg.find("data-class-index=\"1\"") != std::string::npos);
  CHECK(svg.find("data-class-index=\"3\"") != std::string::npos);
  CHECK(svg.find("data-class-index=\"4\"") != std::string::npos);

  const std::string csv = slurp(dir / "p.csv");
  CHECK(csv.rfind("class_index,label,sign,rank,column,x,log_value,fitted\n", 0) == 0);
  CHECK(count(csv, "\n") == 1 + 3 * 400);

  const auto one = run({"fit", "--input", dir / "h.aldw", "--label", "whiptail", "--plot", dir / "w.svg"});
  REQUIRE(one.code == 0);
  CHECK(count(slurp(dir / "w.svg"), "<g class=\"panel\"") == 1);
}

TEST_CASE("select and tree JSON") {
  TempDir dir;
  write_matrix(WeightMatrix("t", 1, 3, {3, -4, 1}), dir / "t.aldw");
  const auto r = run({"select", "--input", dir / "t.aldw", "--depth", "1"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  REQUIRE(j.is_array());
  CHECK(j[0]["positive_terminal"] == json::array({0, 2}));
  CHECK(j[0]["negative_terminal"] == json::array({1}));
  CHECK(j[0]["stages"][1]["label"] == "+1");
  CHECK(j[0]["label"].is_null());

  const NeuronSelection sel = selection_from_json(j[0]);
  CHECK(json(selection_to_json(sel, std::nullopt)) == j[0]);

  write_matrix(sample_matrix({0, 1, 1}, 2, 512, 11), dir / "w.aldw");
  const auto t = run({"tree", "--input", dir / "w.aldw", "--depth", "3", "--min-leaf", "4", "--out", dir / "tree.json"});
  REQUIRE(t.code == 0);
  const auto tree = json::parse(slurp(dir / "tree.json"));
  CHECK(tree["trees"].size() == 2);
  CHECK(tree["trees"][0]["root"]["children"].size() == 2);

  CHECK(run({"select", "--input", dir / "w.aldw", "--depth", "0"}).code == 3);
  CHECK(run({"select", "--input", dir / "w.aldw", "--min-leaf", "1"}).code == 3);
}

TEST_CASE("prune") {
  TempDir dir;
  write_matrix(sample_matrix({0, 2, 1.5}, 4, 512, 21), dir / "in.aldw");

  CHECK(run({"prune", "--input", dir / "in.aldw", "--rule", "residual", "--out", dir / "o.aldw"}).code == 3);
  CHECK(run({"prune", "--input", dir / "in.aldw", "--rule", "residual", "--threshold", "-1", "--out", dir / "o.aldw"})
            .code == 3);
  CHECK(run({"prune", "--input", dir / "in.aldw", "--rule", "magic", "--out", dir / "o.aldw"}).code == 3);

  const auto inf = run({"prune", "--input", dir / "in.aldw", "--rule", "residual", "--threshold", "inf", "--out",
                        dir / "inf.aldw"});
  REQUIRE(inf.code == 0);
  CHECK(read_file_bytes(dir / "inf.aldw") == read_file_bytes(dir / "in.aldw"));
  CHECK(json::parse(inf.out)["rule"]["threshold"] == "inf");

  const auto term = run({"prune", "--input", dir / "in.aldw", "--rule", "terminal", "--depth", "3", "--out",
                         dir / "term.aldw", "--report", dir / "mask.json"});
  REQUIRE(term.code == 0);
  const auto masks = json::parse(slurp(dir / "mask.json"));
  const auto sel = json::parse(run({"select", "--input", dir / "in.aldw", "--depth", "3"}).out);
  const auto pruned = read_matrix(dir / "term.aldw");
  for (std::size_t k = 0; k < 4; ++k) {
    const std::size_t expected = sel[k]["positive_terminal"].size() + sel[k]["negative_terminal"].size();
    CHECK(masks["classes"][k]["kept"].get<std::size_t>() == expected);
    const auto nonzero = std::count_if(pruned.row(k).begin(), pruned.row(k).end(), [](float v) { return v != 0; });
    CHECK(static_cast<std::size_t>(nonzero) == expected);
  }
}
