// Copyright (c) 2026, The rectlaw Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "cli.hpp"
#include "rectlaw/curves.hpp"
#include "rectlaw/ratio.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = rectlaw::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string fixture(const std::string& name) { return std::string(RECTLAW_SOURCE_DIR) + "/fixtures/" + name; }

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / "rectlaw-cli-tests";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("fit") {
    const auto r = run({"fit", fixture("flan.csv"), "--law", "rectified", "--model", "GPT-2", "--seed", "7"});
    REQUIRE(r.code == 0);
    const auto j = Json::parse(r.out);
    CHECK(j["law"] == "rectified");
    CHECK(j["rmsd"].get<double>() >= 0.005);
    CHECK(j["rmsd"].get<double>() <= 0.012);
    CHECK(j["params"].contains("d_l"));
    CHECK(j["converged"].is_boolean());
    CHECK(j.contains("objective"));
  }

  TEST_CASE("fit both laws") {
    const auto r = run({"fit", fixture("flan.csv"), "--law", "both", "--model", "GPT-2", "--starts", "10"});
    REQUIRE(r.code == 0);
    const auto j = Json::parse(r.out);
    REQUIRE(j.is_array());
    REQUIRE(j.size() == 2);
    CHECK(j[0]["law"] == "rectified");
    CHECK(j[1]["law"] == "vanilla");
    CHECK(j[1]["params"].contains("alpha"));
  }

  TEST_CASE("fit usage errors") {
    auto r = run({"fit", fixture("flan.csv"), "--model", "GPT-3"});
    CHECK(r.code == 2);
    CHECK(r.err.find("GPT-3") != std::string::npos);

    r = run({"fit", "/nonexistent/curves.csv", "--model", "GPT-2"});
    CHECK(r.code == 2);
    r = run({"fit", fixture("flan.csv"), "--model", "GPT-2", "--law", "cubic"});
    CHECK(r.code == 2);
    r = run({"fit", fixture("flan.csv"), "--model", "GPT-2", "--starts", "0"});
    CHECK(r.code == 2);
    r = run({"fit", fixture("flan.csv"), "--model", "GPT-2", "--dataset", "wmt19"});
    CHECK(r.code == 2);
  }

  TEST_CASE("fit on too few points is a computational failure") {
    const fs::path p = scratch_dir() / "short.csv";
    std::ofstream(p) << "model,dataset,size,loss\nm,d,200,3.0\nm,d,400,2.5\n";
    const auto r = run({"fit", p.string(), "--model", "m"});
    CHECK(r.code == 1);
  }

  TEST_CASE("malformed curves file") {
    const fs::path p = scratch_dir() / "bad.csv";
    std::ofstream(p) << "model,dataset,size,loss\nm,d,200,abc\n";
    const auto r = run({"fit", p.string(), "--model", "m"});
    CHECK(r.code == 2);
    CHECK(r.err.find("line 2") != std::string::npos);
  }

  TEST_CASE("select") {
    auto r = run({"select", fixture("gigaword.csv"), fixture("models.csv"), "--dataset", "gigaword", "--gamma",
                  "1/512", "--method", "ats"});
    REQUIRE(r.code == 0);
    const auto j = Json::parse(r.out);
    CHECK(std::abs(j["pearcorr"].get<double>() - 0.91) <= 0.05);
    CHECK(j["gamma"] == "1/512");

    const auto again = run({"select", fixture("gigaword.csv"), fixture("models.csv"), "--dataset", "gigaword",
                            "--gamma", "1/512", "--method", "ats"});
    CHECK(again.out == r.out);

    const auto a = Json::parse(run({"select", fixture("wmt19.csv"), fixture("models.csv"), "--method", "model_size",
                                    "--gamma", "1/8"})
                                   .out);
    const auto b = Json::parse(run({"select", fixture("wmt19.csv"), fixture("models.csv"), "--method", "model_size",
                                    "--gamma", "0.001953125"})
                                   .out);
    CHECK(a["scores"] == b["scores"]);
    CHECK(b["gamma"] == "1/512");
  }

  TEST_CASE("select usage errors") {
    CHECK(run({"select", fixture("flan.csv"), fixture("models.csv"), "--gamma", "0"}).code == 2);
    CHECK(run({"select", fixture("flan.csv"), fixture("models.csv"), "--gamma", "3/2"}).code == 2);
    CHECK(run({"select", fixture("flan.csv"), fixture("models.csv"), "--gamma", "half"}).code == 2);
    CHECK(run({"select", fixture("flan.csv"), fixture("models.csv"), "--method", "oracle"}).code == 2);
    CHECK(run({"select", fixture("flan.csv"), fixture("models.csv"), "--dataset", "c4"}).code == 2);
  }

  TEST_CASE("select with a table") {
    const fs::path table = scratch_dir() / "table.csv";
    const auto r = run({"select", fixture("flan.csv"), fixture("models.csv"), "--method", "zero_shot", "sub_tuning",
                        "--gamma", "1/8", "1/16", "--table", table.string()});
    REQUIRE(r.code == 0);
    CHECK(Json::parse(r.out).size() == 4);
    const auto rows = csv_rows(slurp(table));
    REQUIRE(rows.size() == 7);
    CHECK(rows[0] == std::vector<std::string>{"dataset", "metric", "gamma", "zero_shot", "sub_tuning"});
    CHECK(rows[1][3] == "-10.7");
    CHECK(rows[1][4] == "60.9");
  }

  TEST_CASE("select on a stratified set") {
    const auto r = run({"select", fixture("flan.csv"), fixture("models.csv"), "--method", "zero_shot",
                        "--max-params", "700000000"});
    REQUIRE(r.code == 0);
    CHECK(Json::parse(r.out)["scores"].size() == 15);
  }

  TEST_CASE("ats") {
    const auto r = run({"ats", fixture("wmt19.csv"), "--gamma", "1/64"});
    REQUIRE(r.code == 0);
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 31);
    CHECK(rows[0] == std::vector<std::string>{"model", "dataset", "gamma", "n_accepted", "stopped_early", "slope",
                                              "intercept", "predicted_log_loss", "score"});
    CHECK(rows[1][0] == "GPT-2");
    CHECK(rows[1][2] == "1/64");
    CHECK(std::stod(rows[1][7]) == -std::stod(rows[1][8]));
    CHECK(run({"ats", fixture("wmt19.csv"), "--gamma", "1/64", "--model", "nobody"}).code == 2);
  }

  TEST_CASE("theorem-check") {
    const auto r = run({"theorem-check", "--law", "rectified", "--draws", "1000", "--seed", "1"});
    CHECK(r.code == 0);
    CHECK(r.out == "1000/1000 pass\n");
    CHECK(run({"theorem-check", "--law", "rectified", "--draws", "1000", "--seed", "1"}).out == r.out);

    const auto v = run({"theorem-check", "--law", "vanilla", "--draws", "1000", "--seed", "1"});
    CHECK(v.code == 0);
    CHECK(v.out == "1000/1000 pass\n");

    CHECK(run({"theorem-check", "--draws", "0"}).code == 2);
    CHECK(run({"theorem-check", "--law", "quadratic"}).code == 2);
  }

  TEST_CASE("pareto") {
    const fs::path out = scratch_dir() / "pareto.csv";
    const auto r = run({"pareto", fixture("flan.csv"), fixture("models.csv"), "--t", "3", "--h", "2", "--out",
                        out.string()});
    REQUIRE(r.code == 0);
    const auto rows = csv_rows(slurp(out));
    REQUIRE(rows.size() == 1 + 2 * 7 + 1);
    CHECK(rows[0] == std::vector<std::string>{"method", "gamma", "pearcorr", "flops"});
    const auto& ref = rows.back();
    CHECK(ref[0] == "sub_tuning");
    CHECK(ref[1] == "1");
    CHECK(std::abs(std::stod(ref[2]) - 1.0) <= 1e-9);
    const double c_full = std::stod(ref[3]);
    int ats_rows = 0;
    for (std::size_t i = 1; i + 1 < rows.size(); ++i) {
      if (rows[i][0] != "ats") continue;
      ++ats_rows;
      const double g = rectlaw::Ratio::parse(rows[i][1]).value();
      CHECK(std::stod(rows[i][3]) <= 2.0 * g * c_full * (1 + 1e-6));
    }
    CHECK(ats_rows == 7);
  }

  TEST_CASE("synth") {
    const auto a = run({"synth", "--law", "rectified", "--b", "50", "--d-l", "30", "--beta", "0.6", "--e", "1.2",
                        "--noise", "0.01", "--seed", "4"});
    REQUIRE(a.code == 0);
    CHECK(run({"synth", "--law", "rectified", "--b", "50", "--d-l", "30", "--beta", "0.6", "--e", "1.2", "--noise",
               "0.01", "--seed", "4"})
              .out == a.out);
    std::istringstream in(a.out);
    const auto store = rectlaw::parse_csv(in);
    CHECK(store.curve("synthetic", "synthetic").size() == 14);

    const auto b = run({"synth", "--law", "vanilla", "--sizes", "100,1000,10000", "--model", "v", "--dataset", "x"});
    REQUIRE(b.code == 0);
    CHECK(csv_rows(b.out).size() == 4);
    CHECK(run({"synth", "--sizes", "10,5"}).code == 2);
    CHECK(run({"synth", "--b", "-1"}).code == 2);
  }

  TEST_CASE("rmsd-report") {
    const fs::path curves = scratch_dir() / "syn.csv";
    std::ofstream(curves) << run({"synth", "--model", "a"}).out;
    const auto r = run({"rmsd-report", curves.string(), "--starts", "5"});
    REQUIRE(r.code == 0);
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == std::vector<std::string>{"model", "dataset", "rmsd_ours", "rmsd_vanilla", "delta"});
    CHECK(std::stod(rows[1][2]) < 1e-3);
  }

  TEST_CASE("top-level usage") {
    CHECK(run({}).code == 2);
    CHECK(run({"bogus"}).code == 2);
    const auto h = run({"--help"});
    CHECK(h.code == 0);
    CHECK(h.out.find("theorem-check") != std::string::npos);
  }
}
