#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "simgym/agent.hpp"
#include "simgym/catalog.hpp"
#include "simgym/clickstream.hpp"
#include "simgym/clustering.hpp"
#include "simgym/errors.hpp"
#include "simgym/persona.hpp"
#include "simgym/rand.hpp"

namespace simgym {

struct PipelineConfig {
  std::uint64_t master_seed = 0;
  int agents_per_shop = 600; // sizes the Stage-4 nearest-session selection
  int k = 0;                 // 0 selects k from k_range
  int k_lo = 2;
  int k_hi = 8;
  SelectKOptions select_opts;
  int kmeans_restarts = 8;
  KeywordSets keyword_sets = default_keyword_sets();
  TextBackend* backend = nullptr; // null runs the deterministic fallback
  std::string shop_industry = "e-commerce";
};

struct ShopPersonaBuild {
  PersonaManifest manifest;
  ClusterModel model;
  std::vector<Assignment> assignments;
  nlohmann::json audit; // stage-by-stage build record
};

// Stages 1-6 for one shop: cluster its sessions, extract per-cluster
// preferences, select centroid-nearest sessions, aggregate buyers, score
// archetypes, and compose personas. With no backend the whole build is a
// pure function of (clickstream, catalog, master_seed).
inline ShopPersonaBuild build_personas_for_shop(const std::string& shop_id,
                                                const std::vector<Session>& sessions,
                                                const ProductCatalog& catalog,
                                                const PipelineConfig& config) {
  if (sessions.empty()) throw EmptyInput("no sessions for shop '" + shop_id + "'");

  ShopPersonaBuild build;
  build.manifest.shop_id = shop_id;
  build.audit["shop_id"] = shop_id;

  // Stage 1: standardize and cluster
  const FeatureMatrix matrix = build_feature_matrix(sessions);
  const ZScoreResult z = zscore(matrix);
  int k = config.k;
  if (k <= 0) {
    const int hi = std::min<int>(config.k_hi, static_cast<int>(matrix.rows));
    const int lo = std::min(config.k_lo, hi);
    const SelectKResult selection =
        select_k(z.matrix, lo, hi, derive_seed(config.master_seed, std::string_view(shop_id),
                                               std::string_view("select_k")),
                 config.select_opts);
    k = selection.chosen_k;
    build.audit["stage1"]["k_range"] = {lo, hi};
    build.audit["stage1"]["inertia_curve"] = selection.inertias;
    build.audit["stage1"]["min_share_curve"] = selection.min_shares;
  }
  KmeansResult fit = kmeans_best_of(
      z.matrix, k, derive_seed(config.master_seed, std::string_view(shop_id), std::string_view("kmeans")),
      config.kmeans_restarts);
  fit.model.column_means = z.column_means;
  fit.model.column_stds = z.column_stds;
  build.model = fit.model;
  build.assignments = fit.assignments;
  build.audit["stage1"]["k"] = k;
  build.audit["stage1"]["inertia"] = fit.model.inertia;

  std::map<int, std::vector<Session>> sessions_by_cluster;
  std::map<std::string, const Session*> session_index;
  for (const Session& s : sessions) session_index[s.id] = &s;
  for (const Assignment& a : fit.assignments)
    sessions_by_cluster[a.cluster_id].push_back(*session_index.at(a.session_id));
  for (const auto& [cluster_id, members] : sessions_by_cluster)
    build.manifest.cluster_session_counts[cluster_id] = members.size();

  const ExplorationNorms norms = compute_exploration_norms(sessions);
  const ShopMeta meta{shop_id, config.shop_industry};

  // Stage 2: per-cluster product preferences (clusters with no product
  // interactions produce no personas and are recorded as skipped)
  std::map<int, ProductPreferences> preferences;
  std::map<int, std::size_t> allocatable_mass;
  auto& stage2 = build.audit["stage2"] = nlohmann::json::array();
  for (const auto& [cluster_id, members] : sessions_by_cluster) {
    const ClusterSummary summary = build_cluster_summary(cluster_id, members, catalog);
    if (summary.items.empty()) {
      stage2.push_back({{"cluster_id", cluster_id}, {"skipped", "no product interactions"}});
      continue;
    }
    ProductPreferences prefs =
        extract_preferences(meta, summary, catalog, config.backend);
    stage2.push_back({{"cluster_id", cluster_id},
                      {"categories", prefs.categories},
                      {"individual_products", prefs.individual_products}});
    allocatable_mass[cluster_id] = members.size();
    preferences[cluster_id] = std::move(prefs);
  }

  // Stages 3-6 per cluster: nearest sessions -> buyer aggregates ->
  // archetypes -> intents -> composed personas
  const auto quotas = allocate_budget(allocatable_mass, config.agents_per_shop);
  auto& stage46 = build.audit["clusters"] = nlohmann::json::array();
  for (const auto& [cluster_id, prefs] : preferences) {
    const int quota = quotas.count(cluster_id) ? quotas.at(cluster_id) : 0;
    const std::size_t n_select = std::max<std::size_t>(quota, 1);
    const auto nearest =
        nearest_sessions(build.model, build.assignments, cluster_id, n_select);
    std::vector<Session> selected;
    selected.reserve(nearest.size());
    for (const auto& id : nearest) selected.push_back(*session_index.at(id));

    const auto aggregates = aggregate_buyers(selected, catalog, cluster_id);
    int personas_built = 0;
    for (const BuyerAggregate& agg : aggregates) {
      if (agg.browsed.empty()) continue; // price scoring needs browsed products
      BuyerArchetype archetype =
          construct_archetype(agg, catalog, norms, config.keyword_sets, config.backend);
      BuyerIntent intent = generate_intent(
          prefs, derive_seed(config.master_seed, std::string_view(shop_id),
                             static_cast<std::uint64_t>(cluster_id),
                             std::string_view(agg.buyer_id)));
      build.manifest.personas.push_back(compose_prompt(intent, archetype, prefs, shop_id));
      ++personas_built;
    }
    stage46.push_back({{"cluster_id", cluster_id},
                       {"sessions_selected", nearest.size()},
                       {"buyers", aggregates.size()},
                       {"personas", personas_built}});
  }

  std::sort(build.manifest.personas.begin(), build.manifest.personas.end(),
            [](const Persona& a, const Persona& b) { return a.persona_id < b.persona_id; });
  build.audit["personas_total"] = build.manifest.personas.size();
  return build;
}

// Groups sessions by shop and builds personas for each shop present.
inline std::vector<ShopPersonaBuild> build_personas(const std::vector<Session>& sessions,
                                                    const ProductCatalog& catalog,
                                                    const PipelineConfig& config) {
  std::map<std::string, std::vector<Session>> by_shop;
  for (const Session& s : sessions) by_shop[s.shop_id].push_back(s);
  std::vector<ShopPersonaBuild> builds;
  for (const auto& [shop_id, shop_sessions] : by_shop)
    builds.push_back(build_personas_for_shop(shop_id, shop_sessions, catalog, config));
  return builds;
}

// --- persona ablation modes (the persona-input ablations live here so one
// manifest serves all three configurations) ---

enum class PersonaMode { full_persona, intent_only, product_only };

inline const char* to_string(PersonaMode mode) {
  switch (mode) {
    case PersonaMode::full_persona: return "full_persona";
    case PersonaMode::intent_only: return "intent_only";
    case PersonaMode::product_only: return "product_only";
  }
  return "?";
}

inline PersonaMode persona_mode_from_string(const std::string& s) {
  if (s == "full_persona") return PersonaMode::full_persona;
  if (s == "intent_only") return PersonaMode::intent_only;
  if (s == "product_only") return PersonaMode::product_only;
  throw ConfigError("unknown persona mode '" + s + "'");
}

// intent_only strips the archetype (neutral profile); product_only also
// strips the purchase-decision guide, leaving just the target.
inline Persona apply_persona_mode(Persona persona, PersonaMode mode) {
  if (mode == PersonaMode::full_persona) return persona;

  BuyerArchetype neutral;
  neutral.buyer_id = persona.archetype.buyer_id;
  neutral.cluster_id = persona.archetype.cluster_id;
  neutral.price_tier = PriceTier::mid_range;
  neutral.price_gap = 0.4;
  neutral.exploration_score = 0.5;
  neutral.exploration_regime = ExplorationRegime::moderate;
  neutral.rationale = "ablation: archetype removed";
  persona.archetype = neutral;
  persona.cluster_preferences.categories.clear();
  persona.cluster_preferences.individual_products.clear();
  persona.cluster_preferences.reasoning.clear();
  if (mode == PersonaMode::product_only) persona.intent.purchase_decision_guide.clear();

  std::string prompt = "# Buyer Persona\n\n## Intent\n";
  prompt += "Product target: " + persona.intent.product_target + "\n";
  if (!persona.intent.purchase_decision_guide.empty())
    prompt += persona.intent.purchase_decision_guide + "\n";
  persona.prompt = std::move(prompt);
  return persona;
}

inline PersonaManifest apply_persona_mode(PersonaManifest manifest, PersonaMode mode) {
  for (Persona& p : manifest.personas) p = apply_persona_mode(std::move(p), mode);
  return manifest;
}

// --- file layout -----------------------------------------------------------
//
//   <out>/personas/<persona_id>.json   one canonical record per persona
//   <out>/manifest.json                persona ids per shop and cluster + masses
//   <out>/models/<shop_id>.json        cluster model (round-trips exactly)
//   <out>/features/<shop_id>.csv       Stage-1 feature export
//   <out>/audit.json                   stage-by-stage build log

namespace detail {

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open '" + path.string() + "' for writing");
  out << content;
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

} // namespace detail

inline void write_persona_outputs(const std::filesystem::path& out_dir,
                                  const std::vector<ShopPersonaBuild>& builds,
                                  const std::string& config_hash) {
  nlohmann::json manifest;
  manifest["config_hash"] = config_hash;
  auto& shops = manifest["shops"] = nlohmann::json::array();
  nlohmann::json audit = nlohmann::json::array();

  for (const ShopPersonaBuild& build : builds) {
    nlohmann::json shop;
    shop["shop_id"] = build.manifest.shop_id;
    auto& clusters = shop["clusters"] = nlohmann::json::array();
    std::map<int, std::vector<std::string>> ids_by_cluster;
    for (const Persona& p : build.manifest.personas)
      ids_by_cluster[p.intent.cluster_id].push_back(p.persona_id);
    for (const auto& [cluster_id, count] : build.manifest.cluster_session_counts) {
      nlohmann::json cluster{{"cluster_id", cluster_id}, {"session_count", count}};
      cluster["persona_ids"] =
          ids_by_cluster.count(cluster_id) ? ids_by_cluster[cluster_id] : std::vector<std::string>{};
      clusters.push_back(std::move(cluster));
    }
    shops.push_back(std::move(shop));

    for (const Persona& p : build.manifest.personas)
      detail::write_text_file(out_dir / "personas" / (p.persona_id + ".json"),
                              nlohmann::json(p).dump(2) + "\n");
    detail::write_text_file(out_dir / "models" / (build.manifest.shop_id + ".json"),
                            nlohmann::json(build.model).dump(2) + "\n");
    audit.push_back(build.audit);
  }

  detail::write_text_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
  detail::write_text_file(out_dir / "audit.json", audit.dump(2) + "\n");
}

inline std::vector<PersonaManifest> load_persona_manifests(const std::filesystem::path& dir) {
  const auto manifest_doc = nlohmann::json::parse(detail::read_text_file(dir / "manifest.json"));
  std::vector<PersonaManifest> manifests;
  for (const auto& shop : manifest_doc.at("shops")) {
    PersonaManifest manifest;
    manifest.shop_id = shop.at("shop_id").get<std::string>();
    for (const auto& cluster : shop.at("clusters")) {
      manifest.cluster_session_counts[cluster.at("cluster_id").get<int>()] =
          cluster.at("session_count").get<std::size_t>();
      for (const auto& id : cluster.at("persona_ids")) {
        const auto path = dir / "personas" / (id.get<std::string>() + ".json");
        manifest.personas.push_back(
            nlohmann::json::parse(detail::read_text_file(path)).get<Persona>());
      }
    }
    std::sort(manifest.personas.begin(), manifest.personas.end(),
              [](const Persona& a, const Persona& b) { return a.persona_id < b.persona_id; });
    manifests.push_back(std::move(manifest));
  }
  return manifests;
}

} // namespace simgym
