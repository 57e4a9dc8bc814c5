// simgym command-line interface: persona building, cohort simulation, and
// evaluation as seeded, reproducible subcommands. All randomness flows from
// --seed; outputs carry a config hash and no timestamps, so identical
// invocations produce byte-identical artifacts.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "simgym/agent.hpp"
#include "simgym/catalog.hpp"
#include "simgym/clickstream.hpp"
#include "simgym/clustering.hpp"
#include "simgym/errors.hpp"
#include "simgym/evaluation.hpp"
#include "simgym/persona.hpp"
#include "simgym/pipeline.hpp"
#include "simgym/rand.hpp"
#include "simgym/remote.hpp"
#include "simgym/storefront.hpp"

namespace fs = std::filesystem;
using namespace simgym;

namespace {

struct GlobalOptions {
  std::uint64_t seed = 0;
  std::string out_dir = "out";
};

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

// hash of the resolved settings, stamped into every artifact
std::string config_hash(const nlohmann::json& settings) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(
                    derive_seed(std::string_view(settings.dump()))));
  return buf;
}

std::vector<Session> read_clickstream_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open clickstream file '" + path + "'");
  try {
    return parse_clickstream(in);
  } catch (const Error& e) {
    throw ConfigError(path + ": " + e.what()); // parse errors carry the line number
  }
}

ProductCatalog read_catalog_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open catalog file '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("catalog file '" + path + "': " + e.what());
  }
  return parse_catalog(doc);
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file '" + path + "'");
  try {
    nlohmann::json doc;
    in >> doc;
    return doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("file '" + path + "': " + e.what());
  }
}

std::vector<SessionLog> read_log_files(const std::vector<std::string>& paths) {
  std::vector<SessionLog> logs;
  for (const auto& path : paths) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open session-log file '" + path + "'");
    try {
      auto batch = read_session_logs(in);
      logs.insert(logs.end(), std::make_move_iterator(batch.begin()),
                  std::make_move_iterator(batch.end()));
    } catch (const Error& e) {
      throw ConfigError(path + ": " + e.what());
    }
  }
  return logs;
}

// "lo:hi" or "lo:hi:step"
std::vector<int> parse_int_range(const std::string& text) {
  std::vector<int> parts;
  std::istringstream in(text);
  std::string token;
  while (std::getline(in, token, ':')) parts.push_back(std::stoi(token));
  if (parts.size() == 1) return {parts[0]};
  if (parts.size() == 2) parts.push_back(1);
  if (parts.size() != 3 || parts[2] <= 0 || parts[0] > parts[1])
    throw ConfigError("bad range '" + text + "', expected lo:hi[:step]");
  std::vector<int> out;
  for (int v = parts[0]; v <= parts[1]; v += parts[2]) out.push_back(v);
  return out;
}

// --- personas build ---

struct PersonasArgs {
  std::string clickstream;
  std::string catalog;
  int k = 0;
  std::string k_range = "2:8";
  int agents = 600;
  std::string industry = "e-commerce";
  double elbow_threshold = 0.10;
  double balance_floor = 0.02;
  std::string keywords_file;
  std::string backend_url;
  std::string backend_model = "simgym-persona";
};

void cmd_personas_build(const GlobalOptions& global, const PersonasArgs& args) {
  const auto sessions = read_clickstream_file(args.clickstream);
  const auto catalog = read_catalog_file(args.catalog);

  PipelineConfig config;
  config.master_seed = global.seed;
  config.agents_per_shop = args.agents;
  config.k = args.k;
  const auto range = parse_int_range(args.k_range);
  config.k_lo = range.front();
  config.k_hi = range.back();
  config.select_opts.elbow_threshold = args.elbow_threshold;
  config.select_opts.balance_floor = args.balance_floor;
  config.shop_industry = args.industry;
  if (!args.keywords_file.empty())
    config.keyword_sets = keyword_sets_from_json(read_json_file(args.keywords_file));

  std::unique_ptr<RemoteTextBackend> backend;
  if (!args.backend_url.empty()) {
    RemoteEndpointConfig endpoint;
    endpoint.base_url = args.backend_url;
    endpoint.model = args.backend_model;
    backend = std::make_unique<RemoteTextBackend>(endpoint);
    config.backend = backend.get();
  }

  const auto builds = build_personas(sessions, catalog, config);

  const nlohmann::json settings{{"seed", global.seed},     {"k", args.k},
                                {"k_range", args.k_range}, {"agents", args.agents},
                                {"industry", args.industry}};
  write_persona_outputs(global.out_dir, builds, config_hash(settings));

  std::map<std::string, std::vector<Session>> by_shop;
  for (const Session& s : sessions) by_shop[s.shop_id].push_back(s);
  for (const auto& [shop_id, shop_sessions] : by_shop) {
    std::ostringstream csv;
    write_features_csv(csv, shop_sessions);
    detail::write_text_file(fs::path(global.out_dir) / "features" / (shop_id + ".csv"),
                            csv.str());
  }

  std::size_t total = 0;
  for (const auto& build : builds) total += build.manifest.personas.size();
  std::cout << "built " << total << " personas across " << builds.size() << " shops into "
            << global.out_dir << "\n";
}

// --- cluster fit ---

struct ClusterArgs {
  std::string clickstream;
  int k = 0;
  std::string k_range = "2:8";
  double tol = 1e-6;
  int max_iter = 300;
  double elbow_threshold = 0.10;
  double balance_floor = 0.02;
};

void cmd_cluster_fit(const GlobalOptions& global, const ClusterArgs& args) {
  const auto sessions = read_clickstream_file(args.clickstream);
  if (sessions.empty()) throw EmptyInput("clickstream has no sessions");
  const FeatureMatrix matrix = build_feature_matrix(sessions);
  const ZScoreResult z = zscore(matrix);

  int k = args.k;
  SelectKResult selection;
  if (k <= 0) {
    const auto range = parse_int_range(args.k_range);
    SelectKOptions opts;
    opts.elbow_threshold = args.elbow_threshold;
    opts.balance_floor = args.balance_floor;
    opts.tol = args.tol;
    opts.max_iter = args.max_iter;
    selection = select_k(z.matrix, range.front(),
                         std::min<int>(range.back(), static_cast<int>(matrix.rows)),
                         global.seed, opts);
    k = selection.chosen_k;
  }
  KmeansResult fit = kmeans_best_of(z.matrix, k, global.seed, 8, args.max_iter, args.tol);
  fit.model.column_means = z.column_means;
  fit.model.column_stds = z.column_stds;

  nlohmann::json model_doc = fit.model;
  if (!selection.ks.empty()) {
    model_doc["selection"] = {{"ks", selection.ks},
                              {"inertias", selection.inertias},
                              {"min_shares", selection.min_shares}};
  }
  model_doc["config_hash"] = config_hash(nlohmann::json{{"seed", global.seed},
                                                        {"k", args.k},
                                                        {"k_range", args.k_range},
                                                        {"tol", args.tol},
                                                        {"max_iter", args.max_iter}});
  detail::write_text_file(fs::path(global.out_dir) / "cluster_model.json",
                          model_doc.dump(2) + "\n");

  std::ostringstream assignments_csv;
  assignments_csv << "session_id,cluster_id,distance\n";
  for (const Assignment& a : fit.assignments)
    assignments_csv << a.session_id << ',' << a.cluster_id << ',' << format_double(a.distance)
                    << '\n';
  detail::write_text_file(fs::path(global.out_dir) / "assignments.csv", assignments_csv.str());

  std::ostringstream features_csv;
  write_features_csv(features_csv, sessions);
  detail::write_text_file(fs::path(global.out_dir) / "features.csv", features_csv.str());

  std::cout << "fitted k=" << k << " on " << sessions.size() << " sessions, inertia "
            << format_double(fit.model.inertia) << "\n";
}

// --- simulate run ---

struct SimulateArgs {
  std::vector<std::string> store_specs;
  std::string manifest_dir;
  int agents = 600;
  int trials = 2;
  std::string policy = "heuristic";
  bool no_memory = false;
  std::string persona_mode = "full_persona";
  int workers = 0;
  int max_steps = 30;
  std::int64_t max_wall_ms = 120000;
  int loop_window = 3;
  int model_retries = 2;
  double buy_threshold = 0.45;
  std::string remote_url;
  std::string remote_model = "simgym-agent";
  std::string remote_path = "/v1/chat/completions";
};

void cmd_simulate_run(const GlobalOptions& global, const SimulateArgs& args) {
  const auto manifests = load_persona_manifests(args.manifest_dir);
  const PersonaMode mode = persona_mode_from_string(args.persona_mode);

  GuardrailConfig guardrails;
  guardrails.max_steps = args.max_steps;
  guardrails.max_wall_ms = args.max_wall_ms;
  guardrails.loop_window = args.loop_window;
  guardrails.max_model_retries = args.model_retries;

  std::unique_ptr<Policy> policy;
  if (args.policy == "heuristic") {
    HeuristicConfig config;
    config.threshold = args.buy_threshold;
    policy = std::make_unique<HeuristicPersonaPolicy>(config);
  } else if (args.policy == "remote") {
    if (args.remote_url.empty()) throw ConfigError("--remote-url is required for --policy remote");
    RemoteEndpointConfig endpoint;
    endpoint.base_url = args.remote_url;
    endpoint.model = args.remote_model;
    endpoint.path = args.remote_path;
    endpoint.max_retries = args.model_retries;
    policy = std::make_unique<RemoteModelPolicy>(endpoint);
  } else {
    throw ConfigError("unknown policy '" + args.policy + "'");
  }

  std::vector<SessionLog> all_logs;
  for (const auto& spec_path : args.store_specs) {
    const StorePair pair = load_store_spec(read_json_file(spec_path));
    const auto it =
        std::find_if(manifests.begin(), manifests.end(), [&](const PersonaManifest& m) {
          return m.shop_id == pair.control.shop_id;
        });
    if (it == manifests.end())
      throw ConfigError("no personas in manifest for shop '" + pair.control.shop_id + "'");
    const PersonaManifest manifest = apply_persona_mode(*it, mode);
    auto logs = run_cohort(manifest, pair, *policy, guardrails, global.seed, args.agents,
                           args.trials, !args.no_memory, args.workers);
    all_logs.insert(all_logs.end(), std::make_move_iterator(logs.begin()),
                    std::make_move_iterator(logs.end()));
  }

  std::ostringstream ndjson;
  write_session_logs(ndjson, all_logs);
  detail::write_text_file(fs::path(global.out_dir) / "session_logs.ndjson", ndjson.str());

  const nlohmann::json settings{{"seed", global.seed},
                                {"agents", args.agents},
                                {"trials", args.trials},
                                {"policy", args.policy},
                                {"memory_enabled", !args.no_memory},
                                {"persona_mode", args.persona_mode},
                                {"max_steps", args.max_steps}};
  nlohmann::json meta = settings;
  meta["config_hash"] = config_hash(settings);
  meta["sessions"] = all_logs.size();
  detail::write_text_file(fs::path(global.out_dir) / "run_meta.json", meta.dump(2) + "\n");

  std::cout << "wrote " << all_logs.size() << " session logs to " << global.out_dir << "\n";
}

// --- eval report ---

struct ReportArgs {
  std::vector<std::string> logs;
  std::string ground_truth;
  std::string alignment_mode = "per_trial";
  std::size_t bootstrap = 10000;
  double level = 0.95;
};

void cmd_eval_report(const GlobalOptions& global, const ReportArgs& args) {
  const auto logs = read_log_files(args.logs);
  const auto gt = read_json_file(args.ground_truth).get<std::vector<ShopGroundTruth>>();

  EvalOptions options;
  options.mode = args.alignment_mode == "sign_of_mean" ? AlignmentMode::sign_of_mean
                                                       : AlignmentMode::per_trial;
  options.bootstrap_B = args.bootstrap;
  options.seed = global.seed;
  options.level = args.level;
  const EvalReport report = evaluate(logs, gt, options);

  const nlohmann::json settings{{"seed", global.seed},
                                {"alignment_mode", args.alignment_mode},
                                {"bootstrap", args.bootstrap},
                                {"level", args.level}};
  nlohmann::json doc = report;
  doc["config_hash"] = config_hash(settings);
  detail::write_text_file(fs::path(global.out_dir) / "report.json", doc.dump(2) + "\n");

  std::ostringstream csv;
  csv << "shop_id,human_delta_a2c,agent_delta_a2c,aligned_share\n";
  for (const auto& pair : report.per_shop)
    csv << pair.shop_id << ',' << format_double(pair.human_delta) << ','
        << format_double(pair.agent_mean()) << ','
        << format_double(shop_alignment(pair, options.mode)) << '\n';
  detail::write_text_file(fs::path(global.out_dir) / "per_shop.csv", csv.str());

  std::cout << "alignment " << format_double(report.alignment_rate) << "% ["
            << format_double(report.alignment_ci[0]) << ", "
            << format_double(report.alignment_ci[1]) << "], pearson "
            << (report.pearson_r ? format_double(*report.pearson_r) : "undefined") << "\n";
}

// --- eval sensitivity ---

struct SensitivityArgs {
  std::vector<std::string> logs;
  std::string ground_truth;
  std::string budgets = "50:700:50";
  std::size_t bootstrap = 1000;
};

void cmd_eval_sensitivity(const GlobalOptions& global, const SensitivityArgs& args) {
  const auto logs = read_log_files(args.logs);
  const auto gt = read_json_file(args.ground_truth).get<std::vector<ShopGroundTruth>>();
  const auto budgets = parse_int_range(args.budgets);

  const auto result = budget_sensitivity(logs, gt, budgets, args.bootstrap, global.seed);
  for (const auto& warning : result.warnings) std::cerr << "warning: " << warning << "\n";

  std::ostringstream csv;
  csv << "budget,metric,mean,p10,p90\n";
  for (const auto& row : result.rows) {
    csv << row.budget << ",alignment," << format_double(row.alignment.mean) << ','
        << format_double(row.alignment.p10) << ',' << format_double(row.alignment.p90) << '\n';
    csv << row.budget << ",correlation," << format_double(row.correlation.mean) << ','
        << format_double(row.correlation.p10) << ',' << format_double(row.correlation.p90)
        << '\n';
  }
  detail::write_text_file(fs::path(global.out_dir) / "sensitivity.csv", csv.str());

  const nlohmann::json settings{{"seed", global.seed},
                                {"budgets", args.budgets},
                                {"bootstrap", args.bootstrap}};
  nlohmann::json meta{{"config_hash", config_hash(settings)},
                      {"budgets", budgets},
                      {"bootstrap", args.bootstrap},
                      {"warnings", result.warnings}};
  detail::write_text_file(fs::path(global.out_dir) / "sensitivity_meta.json",
                          meta.dump(2) + "\n");
  std::cout << "wrote " << result.rows.size() << " budget rows to " << global.out_dir
            << "/sensitivity.csv\n";
}

// --- eval cohorts ---

struct CohortsArgs {
  std::string clickstream;
  std::string model;
  std::string control_clickstream;
  std::string treatment_clickstream;
};

void cmd_eval_cohorts(const GlobalOptions& global, const CohortsArgs& args) {
  const auto sessions = read_clickstream_file(args.clickstream);
  const auto model = read_json_file(args.model).get<ClusterModel>();
  const CohortReport report = cohort_analysis(sessions, model);

  nlohmann::json doc;
  doc["config_hash"] =
      config_hash(nlohmann::json{{"seed", global.seed}, {"subcommand", "eval cohorts"}});
  auto& cohorts = doc["cohorts"] = nlohmann::json::array();
  for (const auto& cohort : report.cohorts)
    cohorts.push_back({{"cluster_id", cohort.cluster_id},
                       {"session_count", cohort.session_count},
                       {"share", cohort.share},
                       {"a2c_rate", cohort.a2c_rate},
                       {"bounce", cohort.bounce}});
  doc["skimmers_cluster_id"] = report.skimmers_cluster_id
                                   ? nlohmann::json(*report.skimmers_cluster_id)
                                   : nlohmann::json(nullptr);

  if (!args.control_clickstream.empty() && !args.treatment_clickstream.empty()) {
    const auto control = read_clickstream_file(args.control_clickstream);
    const auto treatment = read_clickstream_file(args.treatment_clickstream);
    std::map<std::string, ShopHumanLogs> shops;
    for (const Session& s : control) {
      shops[s.shop_id].shop_id = s.shop_id;
      shops[s.shop_id].control.push_back(s);
    }
    for (const Session& s : treatment) {
      shops[s.shop_id].shop_id = s.shop_id;
      shops[s.shop_id].treatment.push_back(s);
    }
    std::vector<ShopHumanLogs> shop_list;
    for (auto& [shop_id, logs] : shops) shop_list.push_back(std::move(logs));
    const CohortCorrelation corr = cohort_correlation(shop_list, model);
    doc["cohort_correlation"] = {{"skimmers_vs_all", corr.skimmers_vs_all},
                                 {"skimmers_vs_engaged", corr.skimmers_vs_engaged},
                                 {"n_shops_used", corr.n_shops_used}};
  }

  detail::write_text_file(fs::path(global.out_dir) / "cohorts.json", doc.dump(2) + "\n");
  std::cout << "cohort report written to " << global.out_dir << "/cohorts.json\n";
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"simgym: traffic-grounded shopper simulation and A/B evaluation"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "read options from a key=value file");

  GlobalOptions global;
  app.add_option("--seed", global.seed, "master seed; all randomness derives from it")
      ->capture_default_str();
  app.add_option("--out", global.out_dir, "output directory")->capture_default_str();

  // personas build
  auto* personas = app.add_subcommand("personas", "persona pipeline");
  auto* build = personas->add_subcommand("build", "run the six-stage persona pipeline");
  PersonasArgs personas_args;
  build->add_option("--clickstream", personas_args.clickstream, "NDJSON clickstream file")
      ->required();
  build->add_option("--catalog", personas_args.catalog, "product catalog JSON")->required();
  build->add_option("--k", personas_args.k, "fixed cluster count (0 = select from --k-range)");
  build->add_option("--k-range", personas_args.k_range, "k selection range lo:hi");
  build->add_option("--agents", personas_args.agents, "agent budget per shop (sizes Stage 4)");
  build->add_option("--industry", personas_args.industry, "shop industry label");
  build->add_option("--elbow-threshold", personas_args.elbow_threshold,
                    "marginal inertia reduction needed to accept a larger k");
  build->add_option("--balance-floor", personas_args.balance_floor,
                    "minimum cluster share needed to accept a larger k");
  build->add_option("--keywords", personas_args.keywords_file,
                    "JSON file overriding the value-axis keyword sets");
  build->add_option("--backend-url", personas_args.backend_url,
                    "chat-completion endpoint for Stage 2/5 text (omit for the deterministic "
                    "fallback; credentials via SIMGYM_API_KEY)");
  build->add_option("--backend-model", personas_args.backend_model, "backend model name");
  build->callback([&] { cmd_personas_build(global, personas_args); });

  // cluster fit
  auto* cluster = app.add_subcommand("cluster", "session clustering");
  auto* fit = cluster->add_subcommand("fit", "fit the Stage-1 session clusters");
  ClusterArgs cluster_args;
  fit->add_option("--clickstream", cluster_args.clickstream, "NDJSON clickstream file")
      ->required();
  fit->add_option("--k", cluster_args.k, "fixed cluster count (0 = select from --k-range)");
  fit->add_option("--k-range", cluster_args.k_range, "k selection range lo:hi");
  fit->add_option("--tol", cluster_args.tol, "centroid-shift convergence tolerance")
      ->capture_default_str();
  fit->add_option("--max-iter", cluster_args.max_iter, "Lloyd iteration cap")
      ->capture_default_str();
  fit->add_option("--elbow-threshold", cluster_args.elbow_threshold, "elbow acceptance ratio");
  fit->add_option("--balance-floor", cluster_args.balance_floor, "minimum cluster share");
  fit->callback([&] { cmd_cluster_fit(global, cluster_args); });

  // simulate run
  auto* simulate = app.add_subcommand("simulate", "agent simulation");
  auto* run = simulate->add_subcommand("run", "run agent cohorts against store variants");
  SimulateArgs simulate_args;
  run->add_option("--store-spec", simulate_args.store_specs,
                  "store-spec JSON file (repeat for multiple shops)")
      ->required();
  run->add_option("--manifest", simulate_args.manifest_dir,
                  "persona output directory from 'personas build'")
      ->required();
  run->add_option("--agents", simulate_args.agents, "agents per shop")->capture_default_str();
  run->add_option("--trials", simulate_args.trials, "trials per shop")->capture_default_str();
  run->add_option("--policy", simulate_args.policy, "heuristic | remote")
      ->capture_default_str();
  run->add_flag("--no-memory", simulate_args.no_memory,
                "disable episodic memory in the planning context");
  run->add_option("--persona-mode", simulate_args.persona_mode,
                  "full_persona | intent_only | product_only")
      ->capture_default_str();
  run->add_option("--workers", simulate_args.workers,
                  "worker threads (0 = available parallelism)");
  run->add_option("--max-steps", simulate_args.max_steps, "per-session step budget")
      ->capture_default_str();
  run->add_option("--max-wall-ms", simulate_args.max_wall_ms, "per-session wall-clock budget");
  run->add_option("--loop-window", simulate_args.loop_window, "identical-action loop window");
  run->add_option("--model-retries", simulate_args.model_retries, "remote decision retries");
  run->add_option("--buy-threshold", simulate_args.buy_threshold,
                  "heuristic add-to-cart utility threshold");
  run->add_option("--remote-url", simulate_args.remote_url, "remote policy base url");
  run->add_option("--remote-model", simulate_args.remote_model, "remote policy model name");
  run->add_option("--remote-path", simulate_args.remote_path, "remote policy endpoint path");
  run->callback([&] { cmd_simulate_run(global, simulate_args); });

  // eval report | sensitivity | cohorts
  auto* eval = app.add_subcommand("eval", "evaluation protocol");
  auto* report = eval->add_subcommand("report", "alignment and correlation vs ground truth");
  ReportArgs report_args;
  report->add_option("--logs", report_args.logs, "session-log NDJSON file(s)")->required();
  report->add_option("--ground-truth", report_args.ground_truth, "ground-truth JSON file")
      ->required();
  report->add_option("--alignment-mode", report_args.alignment_mode,
                     "per_trial | sign_of_mean")
      ->capture_default_str();
  report->add_option("--bootstrap", report_args.bootstrap, "bootstrap resamples for the CI")
      ->capture_default_str();
  report->add_option("--level", report_args.level, "confidence level")->capture_default_str();
  report->callback([&] { cmd_eval_report(global, report_args); });

  auto* sensitivity = eval->add_subcommand("sensitivity", "agent-budget sensitivity curves");
  SensitivityArgs sensitivity_args;
  sensitivity->add_option("--logs", sensitivity_args.logs, "session-log NDJSON file(s)")
      ->required();
  sensitivity->add_option("--ground-truth", sensitivity_args.ground_truth,
                          "ground-truth JSON file")
      ->required();
  sensitivity->add_option("--budgets", sensitivity_args.budgets, "budgets lo:hi[:step]")
      ->capture_default_str();
  sensitivity->add_option("--bootstrap", sensitivity_args.bootstrap, "resamples per budget")
      ->capture_default_str();
  sensitivity->callback([&] { cmd_eval_sensitivity(global, sensitivity_args); });

  auto* cohorts = eval->add_subcommand("cohorts", "cohort coverage analysis");
  CohortsArgs cohorts_args;
  cohorts->add_option("--clickstream", cohorts_args.clickstream, "NDJSON clickstream file")
      ->required();
  cohorts->add_option("--model", cohorts_args.model, "fitted cluster model JSON")->required();
  cohorts->add_option("--control", cohorts_args.control_clickstream,
                      "control-variant clickstream for cohort correlation");
  cohorts->add_option("--treatment", cohorts_args.treatment_clickstream,
                      "treatment-variant clickstream for cohort correlation");
  cohorts->callback([&] { cmd_eval_cohorts(global, cohorts_args); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
