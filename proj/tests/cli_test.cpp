#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "simgym/pipeline.hpp"
#include "testutil.hpp"

namespace fs = std::filesystem;
using namespace simgym;

#ifndef SIMGYM_CLI_PATH
#define SIMGYM_CLI_PATH "simgym"
#endif

namespace {

struct RunResult {
  int exit_code = 0;
  std::string output; // stdout + stderr
};

RunResult run_cli(const std::string& args, const fs::path& dir) {
  const fs::path out_file = dir / "cmd_output.txt";
  const std::string cmd =
      std::string(SIMGYM_CLI_PATH) + " " + args + " > " + out_file.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  RunResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(out_file);
  std::ostringstream buf;
  buf << in.rdbuf();
  result.output = buf.str();
  return result;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// deterministic smoke fixture: one shop, 12 sessions, 4 buyers, 6 products
struct Fixture {
  fs::path dir;
  fs::path clickstream, catalog, store, ground_truth;

  Fixture() {
    dir = fs::temp_directory_path() / ("simgym_cli_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);

    nlohmann::json catalog_doc = nlohmann::json::array();
    for (int i = 0; i < 6; ++i) {
      const bool dragon = i < 3;
      catalog_doc.push_back(
          {{"product_ref", "p" + std::to_string(i)},
           {"name", std::string(dragon ? "Dragon" : "Axolotl") + " Figure " + std::to_string(i)},
           {"price", 8.0 + 7.0 * i},
           {"category", dragon ? "dragons" : "axolotls"},
           {"keywords", i % 2 == 0 ? std::vector<std::string>{"handcrafted"}
                                   : std::vector<std::string>{"durable"}},
           {"quality_score", 0.3 + 0.1 * i}});
    }
    catalog = dir / "catalog.json";
    std::ofstream(catalog) << catalog_doc.dump();

    std::ostringstream clicks;
    auto event = [&](const std::string& sid, const std::string& bid, std::int64_t ts,
                     const std::string& kind, const std::string& ref = "", double value = -1) {
      nlohmann::json e{{"session_id", sid}, {"buyer_id", bid}, {"shop_id", "shopA"},
                       {"ts_ms", ts},       {"kind", kind}};
      if (!ref.empty()) e["product_ref"] = ref;
      if (value >= 0) e["value"] = value;
      clicks << e.dump() << "\n";
    };
    for (int i = 0; i < 12; ++i) {
      const std::string sid = "s" + std::to_string(i);
      const std::string bid = "b" + std::to_string(i % 4);
      event(sid, bid, 0, "page_view");
      event(sid, bid, 10000, "product_view", "p" + std::to_string(i % 6));
      if (i % 3 == 0) {
        event(sid, bid, 20000, "search");
        event(sid, bid, 30000, "product_view", "p" + std::to_string((i + 1) % 6));
      }
      if (i % 4 == 0) event(sid, bid, 40000, "add_to_cart", "p" + std::to_string(i % 6), 20.0);
    }
    clickstream = dir / "clicks.ndjson";
    std::ofstream(clickstream) << clicks.str();

    nlohmann::json spec{{"shop_id", "shopA"},
                        {"products", catalog_doc},
                        {"collections",
                         {{"dragons", {"p0", "p1", "p2"}}, {"axolotls", {"p3", "p4", "p5"}}}},
                        {"control",
                         {{"featured_products", {"p0", "p1", "p2", "p3", "p4", "p5"}},
                          {"layout_density", 0.5},
                          {"trust_cue_level", 0.3},
                          {"image_quality", 0.4}}},
                        {"treatment",
                         {{"featured_products", {"p0", "p1", "p2", "p3", "p4", "p5"}},
                          {"layout_density", 1.0},
                          {"trust_cue_level", 0.8},
                          {"image_quality", 0.9}}}};
    store = dir / "store.json";
    std::ofstream(store) << spec.dump();

    nlohmann::json gt = nlohmann::json::array();
    gt.push_back({{"shop_id", "shopA"},
                  {"human_delta_a2c", 0.03},
                  {"change_summary", "brighter theme"},
                  {"magnitude_stratum", "moderate"}});
    ground_truth = dir / "gt.json";
    std::ofstream(ground_truth) << gt.dump();
  }

  ~Fixture() { fs::remove_all(dir); }
};

TEST(Cli, PersonasBuildSmoke) {
  Fixture f;
  auto result = run_cli("--seed 11 --out " + (f.dir / "p").string() +
                            " personas build --clickstream " + f.clickstream.string() +
                            " --catalog " + f.catalog.string() + " --k 2 --agents 20",
                        f.dir);
  ASSERT_EQ(result.exit_code, 0) << result.output;
  const auto manifest = nlohmann::json::parse(slurp(f.dir / "p" / "manifest.json"));
  std::size_t personas = 0;
  for (const auto& shop : manifest["shops"])
    for (const auto& cluster : shop["clusters"]) personas += cluster["persona_ids"].size();
  EXPECT_GE(personas, 1u);
  EXPECT_TRUE(fs::exists(f.dir / "p" / "features" / "shopA.csv"));
  EXPECT_TRUE(fs::exists(f.dir / "p" / "audit.json"));
}

TEST(Cli, MalformedClickstreamNamesFileAndLine) {
  Fixture f;
  std::ofstream(f.dir / "bad.ndjson") << R"({"session_id":"s1","buyer_id":"b","shop_id":"x","ts_ms":0,"kind":"page_view"})"
                                      << "\n{not json\n";
  auto result = run_cli("--seed 1 --out " + (f.dir / "p").string() +
                            " personas build --clickstream " + (f.dir / "bad.ndjson").string() +
                            " --catalog " + f.catalog.string(),
                        f.dir);
  EXPECT_NE(result.exit_code, 0);
  EXPECT_NE(result.output.find("bad.ndjson"), std::string::npos);
  EXPECT_NE(result.output.find("line 2"), std::string::npos);
}

TEST(Cli, MissingCatalogNamesPath) {
  Fixture f;
  auto result = run_cli("--seed 1 --out " + (f.dir / "p").string() +
                            " personas build --clickstream " + f.clickstream.string() +
                            " --catalog /nonexistent/catalog.json",
                        f.dir);
  EXPECT_NE(result.exit_code, 0);
  EXPECT_NE(result.output.find("/nonexistent/catalog.json"), std::string::npos);
}

TEST(Cli, SimulateSessionCounts) {
  Fixture f;
  ASSERT_EQ(run_cli("--seed 11 --out " + (f.dir / "p").string() +
                        " personas build --clickstream " + f.clickstream.string() +
                        " --catalog " + f.catalog.string() + " --k 2 --agents 20",
                    f.dir)
                .exit_code,
            0);
  auto result = run_cli("--seed 11 --out " + (f.dir / "s").string() +
                            " simulate run --store-spec " + f.store.string() + " --manifest " +
                            (f.dir / "p").string() + " --agents 1 --trials 1",
                        f.dir);
  ASSERT_EQ(result.exit_code, 0) << result.output;
  std::istringstream logs(slurp(f.dir / "s" / "session_logs.ndjson"));
  std::string line;
  int count = 0;
  while (std::getline(logs, line))
    if (!line.empty()) ++count;
  EXPECT_EQ(count, 2); // 1 agent x 2 variants x 1 trial
}

TEST(Cli, PersonaModesStripArchetypeAndGuide) {
  // library-level check of the mode transforms the CLI applies
  auto persona = testutil::make_persona("b1", PriceTier::budget, ExplorationRegime::deep,
                                        "dragons", 0.9);
  auto intent_only = apply_persona_mode(persona, PersonaMode::intent_only);
  EXPECT_EQ(intent_only.archetype.price_tier, PriceTier::mid_range);
  EXPECT_EQ(intent_only.prompt.find("Budget"), std::string::npos);
  EXPECT_NE(intent_only.prompt.find("dragons"), std::string::npos);
  EXPECT_NE(intent_only.prompt.find("Do not purchase by default."), std::string::npos);
  EXPECT_TRUE(intent_only.cluster_preferences.categories.empty());

  auto product_only = apply_persona_mode(persona, PersonaMode::product_only);
  EXPECT_EQ(product_only.prompt.find("Do not purchase by default."), std::string::npos);
  EXPECT_NE(product_only.prompt.find("dragons"), std::string::npos);
  EXPECT_TRUE(product_only.intent.purchase_decision_guide.empty());
}

TEST(Cli, PersonaModeFlagAccepted) {
  Fixture f;
  ASSERT_EQ(run_cli("--seed 11 --out " + (f.dir / "p").string() +
                        " personas build --clickstream " + f.clickstream.string() +
                        " --catalog " + f.catalog.string() + " --k 2 --agents 20",
                    f.dir)
                .exit_code,
            0);
  auto result = run_cli("--seed 11 --out " + (f.dir / "s").string() +
                            " simulate run --store-spec " + f.store.string() + " --manifest " +
                            (f.dir / "p").string() +
                            " --agents 2 --trials 1 --persona-mode product_only",
                        f.dir);
  ASSERT_EQ(result.exit_code, 0) << result.output;
  const auto meta = nlohmann::json::parse(slurp(f.dir / "s" / "run_meta.json"));
  EXPECT_EQ(meta["persona_mode"], "product_only");
}

TEST(Cli, EndToEndPipelineAndReport) {
  Fixture f;
  ASSERT_EQ(run_cli("--seed 11 --out " + (f.dir / "p").string() +
                        " personas build --clickstream " + f.clickstream.string() +
                        " --catalog " + f.catalog.string() + " --k 2 --agents 20",
                    f.dir)
                .exit_code,
            0);
  ASSERT_EQ(run_cli("--seed 11 --out " + (f.dir / "s").string() +
                        " simulate run --store-spec " + f.store.string() + " --manifest " +
                        (f.dir / "p").string() + " --agents 20 --trials 2",
                    f.dir)
                .exit_code,
            0);
  auto result = run_cli("--seed 11 --out " + (f.dir / "e").string() + " eval report --logs " +
                            (f.dir / "s" / "session_logs.ndjson").string() + " --ground-truth " +
                            f.ground_truth.string() + " --bootstrap 500",
                        f.dir);
  ASSERT_EQ(result.exit_code, 0) << result.output;

  const auto report = nlohmann::json::parse(slurp(f.dir / "e" / "report.json"));
  EXPECT_EQ(report["n_shops"], 1);
  // single shop: correlation is undefined and surfaces as null, not a crash
  EXPECT_TRUE(report["pearson_r"].is_null());
  EXPECT_TRUE(fs::exists(f.dir / "e" / "per_shop.csv"));
}

TEST(Cli, EvalReportMissingShopFails) {
  Fixture f;
  ASSERT_EQ(run_cli("--seed 11 --out " + (f.dir / "p").string() +
                        " personas build --clickstream " + f.clickstream.string() +
                        " --catalog " + f.catalog.string() + " --k 2 --agents 20",
                    f.dir)
                .exit_code,
            0);
  ASSERT_EQ(run_cli("--seed 11 --out " + (f.dir / "s").string() +
                        " simulate run --store-spec " + f.store.string() + " --manifest " +
                        (f.dir / "p").string() + " --agents 2 --trials 1",
                    f.dir)
                .exit_code,
            0);
  nlohmann::json gt = nlohmann::json::array();
  gt.push_back({{"shop_id", "ghost-shop"}, {"human_delta_a2c", 0.01}});
  std::ofstream(f.dir / "gt_ghost.json") << gt.dump();
  auto result = run_cli("--seed 11 --out " + (f.dir / "e").string() + " eval report --logs " +
                            (f.dir / "s" / "session_logs.ndjson").string() + " --ground-truth " +
                            (f.dir / "gt_ghost.json").string(),
                        f.dir);
  EXPECT_NE(result.exit_code, 0);
  EXPECT_NE(result.output.find("ghost-shop"), std::string::npos);
}

TEST(Cli, SensitivityRowShape) {
  Fixture f;
  ASSERT_EQ(run_cli("--seed 11 --out " + (f.dir / "p").string() +
                        " personas build --clickstream " + f.clickstream.string() +
                        " --catalog " + f.catalog.string() + " --k 2 --agents 20",
                    f.dir)
                .exit_code,
            0);
  ASSERT_EQ(run_cli("--seed 11 --out " + (f.dir / "s").string() +
                        " simulate run --store-spec " + f.store.string() + " --manifest " +
                        (f.dir / "p").string() + " --agents 20 --trials 2",
                    f.dir)
                .exit_code,
            0);
  auto result = run_cli("--seed 11 --out " + (f.dir / "e").string() +
                            " eval sensitivity --logs " +
                            (f.dir / "s" / "session_logs.ndjson").string() + " --ground-truth " +
                            f.ground_truth.string() + " --budgets 10:20:10 --bootstrap 20",
                        f.dir);
  ASSERT_EQ(result.exit_code, 0) << result.output;
  std::istringstream csv(slurp(f.dir / "e" / "sensitivity.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "budget,metric,mean,p10,p90");
  int rows = 0;
  while (std::getline(csv, line))
    if (!line.empty()) ++rows;
  EXPECT_EQ(rows, 4); // 2 budgets x 2 metrics

  // single-budget variant yields a single pair of rows
  auto single = run_cli("--seed 11 --out " + (f.dir / "e2").string() +
                            " eval sensitivity --logs " +
                            (f.dir / "s" / "session_logs.ndjson").string() + " --ground-truth " +
                            f.ground_truth.string() + " --budgets 10 --bootstrap 20",
                        f.dir);
  ASSERT_EQ(single.exit_code, 0) << single.output;
  std::istringstream csv2(slurp(f.dir / "e2" / "sensitivity.csv"));
  std::getline(csv2, line);
  rows = 0;
  while (std::getline(csv2, line))
    if (!line.empty()) ++rows;
  EXPECT_EQ(rows, 2);
}

TEST(Cli, ClusterFitAndCohorts) {
  Fixture f;
  ASSERT_EQ(run_cli("--seed 7 --out " + (f.dir / "c").string() + " cluster fit --clickstream " +
                        f.clickstream.string() + " --k 2",
                    f.dir)
                .exit_code,
            0);
  EXPECT_TRUE(fs::exists(f.dir / "c" / "cluster_model.json"));
  EXPECT_TRUE(fs::exists(f.dir / "c" / "assignments.csv"));
  EXPECT_TRUE(fs::exists(f.dir / "c" / "features.csv"));

  auto result = run_cli("--seed 7 --out " + (f.dir / "co").string() +
                            " eval cohorts --clickstream " + f.clickstream.string() +
                            " --model " + (f.dir / "c" / "cluster_model.json").string(),
                        f.dir);
  ASSERT_EQ(result.exit_code, 0) << result.output;
  const auto cohorts = nlohmann::json::parse(slurp(f.dir / "co" / "cohorts.json"));
  EXPECT_EQ(cohorts["cohorts"].size(), 2u);
  EXPECT_TRUE(cohorts.contains("skimmers_cluster_id"));
}

TEST(Cli, ConfigFileProvidesDefaults) {
  Fixture f;
  std::ofstream(f.dir / "run.conf") << "seed=11\nout=" << (f.dir / "p").string() << "\n";
  auto result = run_cli("--config " + (f.dir / "run.conf").string() +
                            " personas build --clickstream " + f.clickstream.string() +
                            " --catalog " + f.catalog.string() + " --k 2 --agents 20",
                        f.dir);
  ASSERT_EQ(result.exit_code, 0) << result.output;
  EXPECT_TRUE(fs::exists(f.dir / "p" / "manifest.json"));
}

} // namespace
