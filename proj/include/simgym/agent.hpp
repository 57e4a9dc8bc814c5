#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "simgym/errors.hpp"
#include "simgym/persona.hpp"
#include "simgym/rand.hpp"
#include "simgym/storefront.hpp"

namespace simgym {

struct ObservationRecord {
  std::string url;
  AxNode ax_tree;
  std::optional<std::vector<std::uint8_t>> image_payload; // never set by the simulator
  int step_index = 0;
};

inline ObservationRecord observe(const StoreSpec& spec, const PageState& state, int step_index) {
  return ObservationRecord{state.url, render_ax_tree(spec, state), std::nullopt, step_index};
}

struct MemoryEntry {
  int step_index = 0;
  std::string observed_url;
  std::string observation_digest;
  std::string reasoning;
  Action action;
  TransitionOutcome outcome = TransitionOutcome::ok;
  std::vector<EventKind> emitted_events;
  std::string landed_url;
  std::optional<std::string> error_detail;
};

struct GuardrailConfig {
  int max_steps = 30;
  std::int64_t max_wall_ms = 120000;
  int loop_window = 3;
  int max_model_retries = 2;
};

inline const std::string& guardrail_notice_text() {
  static const std::string text =
      "Permissible operations: browse pages, search the catalog, add products to the cart, and "
      "proceed at most to checkout start. Payment and purchase completion are not permitted.";
  return text;
}

struct PlanningContext {
  std::string goal;
  const Persona& persona;
  std::span<const MemoryEntry> memory_view; // empty when memory is disabled
  const ObservationRecord& observation;
  std::string guardrail_notice;
};

struct Decision {
  std::string reasoning;
  bool terminate = false;
  std::optional<Action> action; // present iff terminate is false
};

// Truncated page summary recorded per step: url, page kind, and the first
// element names in tree order.
inline std::string make_observation_digest(const ObservationRecord& obs,
                                           std::size_t max_elements = 20) {
  std::string digest = "url=" + obs.url;
  digest += " elements=";
  std::size_t count = 0;
  std::function<void(const AxNode&)> walk = [&](const AxNode& n) {
    if (count >= max_elements) return;
    if (!n.name.empty()) {
      if (count > 0) digest += "|";
      digest += n.name;
      ++count;
    }
    for (const auto& c : n.children) walk(c);
  };
  walk(obs.ax_tree);
  return digest;
}

inline PlanningContext assemble_context(const Persona& persona,
                                        const std::vector<MemoryEntry>& memory,
                                        const ObservationRecord& observation,
                                        const GuardrailConfig& /*guardrails*/,
                                        bool memory_enabled) {
  return PlanningContext{persona.intent.product_target, persona,
                         memory_enabled ? std::span<const MemoryEntry>(memory)
                                        : std::span<const MemoryEntry>(),
                         observation, guardrail_notice_text()};
}

// True when the last `window` steps took the identical action on the same
// page; identical actions across different urls are progress, not a loop.
inline bool detect_loop(const std::vector<MemoryEntry>& memory, int window) {
  if (window < 2 || memory.size() < static_cast<std::size_t>(window)) return false;
  const MemoryEntry& last = memory.back();
  for (std::size_t i = memory.size() - window; i < memory.size(); ++i) {
    if (!(memory[i].action == last.action)) return false;
    if (memory[i].observed_url != last.observed_url) return false;
  }
  return true;
}

class Policy {
public:
  virtual ~Policy() = default;
  // Throws PolicyFailure when the policy cannot produce a decision (remote
  // retry exhaustion); deterministic policies are total.
  virtual Decision decide(const PlanningContext& context) = 0;
};

// --- deterministic heuristic shopper -----------------------------------------

struct HeuristicConfig {
  double w_quality = 0.35;
  double w_trust = 0.2;
  double w_image = 0.15;
  double w_price = 0.2;
  double w_values = 0.1;
  double threshold = 0.45;
  // missing purchase guide (product-only ablation) lowers the bar
  double guideless_threshold_scale = 2.0 / 3.0;
  int shallow_pages = 3;
  int moderate_pages = 6;
  int deep_pages = 10;
};

namespace detail {

struct ParsedPage {
  PageKind kind = PageKind::home;
  std::vector<std::pair<std::string, int>> links;   // name -> ref
  std::vector<std::pair<std::string, int>> buttons; // name -> ref
  std::vector<std::string> texts;
  std::string image_desc;
  std::string heading;
};

inline PageKind page_kind_from_url(const std::string& url) {
  if (url.rfind("/products/", 0) == 0) return PageKind::product;
  if (url.rfind("/collections/", 0) == 0) return PageKind::collection;
  if (url.rfind("/search?q=", 0) == 0) return PageKind::search_results;
  if (url == "/cart") return PageKind::cart;
  return PageKind::home;
}

inline ParsedPage parse_observation(const ObservationRecord& obs) {
  ParsedPage page;
  page.kind = page_kind_from_url(obs.url);
  bool first = true;
  std::function<void(const AxNode&)> walk = [&](const AxNode& n) {
    if (first && n.role == AxRole::heading) {
      page.heading = n.name;
      first = false;
    }
    switch (n.role) {
      case AxRole::link: page.links.emplace_back(n.name, n.ref_id); break;
      case AxRole::button: page.buttons.emplace_back(n.name, n.ref_id); break;
      case AxRole::text: page.texts.push_back(n.name); break;
      case AxRole::image_desc: page.image_desc = n.name; break;
      default: break;
    }
    for (const auto& c : n.children) walk(c);
  };
  walk(obs.ax_tree);
  return page;
}

inline bool tokens_overlap(const std::string& a, const std::string& b) {
  std::set<std::string> tokens;
  std::istringstream as(lowercase(a));
  std::string t;
  while (as >> t) tokens.insert(t);
  std::istringstream bs(lowercase(b));
  while (bs >> t)
    if (tokens.count(t)) return true;
  return false;
}

inline std::optional<double> parse_money(const std::string& text) {
  const auto pos = text.find('$');
  if (pos == std::string::npos) return std::nullopt;
  try {
    return std::stod(text.substr(pos + 1));
  } catch (...) {
    return std::nullopt;
  }
}

} // namespace detail

// A deterministic finite-state shopper: navigates toward the product target
// via featured slots, search, and collections; on a product page it scores
//   w_q*quality + w_t*trust + w_i*image - w_p*price_penalty + w_v*values_match
// against a threshold and adds to cart on a clear fit. All signals come from
// the persona and the observed accessibility trees (trust cues via session
// memory), so designed variant changes move the decision with a known sign.
class HeuristicPersonaPolicy : public Policy {
public:
  explicit HeuristicPersonaPolicy(HeuristicConfig config = {},
                                  KeywordSets keyword_sets = default_keyword_sets())
      : config_(config), keywords_(std::move(keyword_sets)) {}

  Decision decide(const PlanningContext& context) override {
    const detail::ParsedPage page = detail::parse_observation(context.observation);
    const Persona& persona = context.persona;

    // trajectory state reconstructed from the memory view
    std::set<std::string> visited{context.observation.url};
    std::set<std::string> visited_names; // product headings + collection names seen
    bool searched = false;
    bool added = false;
    auto note_url = [&](const std::string& url) {
      visited.insert(url);
      if (url.rfind("/collections/", 0) == 0)
        visited_names.insert(detail::url_decode(url.substr(13)));
    };
    note_url(context.observation.url);
    for (const MemoryEntry& entry : context.memory_view) {
      note_url(entry.observed_url);
      note_url(entry.landed_url);
      if (entry.action.kind == ActionKind::search) searched = true;
      for (EventKind kind : entry.emitted_events)
        if (kind == EventKind::add_to_cart) added = true;
      if (detail::page_kind_from_url(entry.observed_url) == PageKind::product) {
        // first element of a product digest is the product name heading
        const auto pos = entry.observation_digest.find("elements=");
        if (pos != std::string::npos) {
          std::string names = entry.observation_digest.substr(pos + 9);
          visited_names.insert(names.substr(0, names.find('|')));
        }
      }
    }
    const int pages_explored = static_cast<int>(visited.size());

    if (added) return Decision{"Item already in cart; shopping goal complete.", true, {}};

    // informed recovery: after an execution failure, change strategy
    if (!context.memory_view.empty() &&
        context.memory_view.back().outcome == TransitionOutcome::execution_error) {
      if (!searched)
        return Decision{"Previous action failed; searching for the target instead.", false,
                        Action{ActionKind::search, {}, context.goal}};
      return Decision{"Previous action failed and options are exhausted.", true, {}};
    }

    const int budget = exploration_budget(persona.archetype.exploration_regime);

    if (page.kind == PageKind::product) {
      const double utility = buy_utility(page, persona, context.memory_view);
      double threshold = config_.threshold;
      if (persona.intent.purchase_decision_guide.empty())
        threshold *= config_.guideless_threshold_scale;
      if (utility >= threshold) {
        for (const auto& [name, ref] : page.buttons)
          if (name == "Add to cart")
            return Decision{"Utility " + detail::format2(utility) + " clears " +
                                detail::format2(threshold) + "; adding to cart.",
                            false, Action{ActionKind::add_to_cart, ref, {}}};
      }
      if (pages_explored >= budget)
        return Decision{"No fitting product within the exploration budget.", true, {}};
      return Decision{"Utility " + detail::format2(utility) + " below " +
                          detail::format2(threshold) + "; continuing to browse.",
                      false, Action{ActionKind::go_back, {}, {}}};
    }

    if (pages_explored >= budget)
      return Decision{"Exploration budget reached without a match.", true, {}};

    auto is_nav_link = [](const std::string& name) {
      return name == "Home" || name == "Cart";
    };
    auto first_unvisited = [&](bool require_match) -> std::optional<int> {
      for (const auto& [name, ref] : page.links) {
        if (is_nav_link(name)) continue;
        if (visited_names.count(name)) continue;
        if (require_match && !detail::tokens_overlap(context.goal, name)) continue;
        if (page.kind == PageKind::home || page.kind == PageKind::search_results ||
            page.kind == PageKind::collection)
          return ref;
      }
      return std::nullopt;
    };

    switch (page.kind) {
      case PageKind::home: {
        if (auto ref = first_unvisited(true))
          return Decision{"Opening a listing that matches the target.", false,
                          Action{ActionKind::click, *ref, {}}};
        if (!searched)
          return Decision{"Searching the catalog for the target.", false,
                          Action{ActionKind::search, {}, context.goal}};
        if (auto ref = first_unvisited(false))
          return Decision{"Exploring a product not seen yet.", false,
                          Action{ActionKind::click, *ref, {}}};
        return Decision{"Nothing left to explore for the target.", true, {}};
      }
      case PageKind::search_results:
      case PageKind::collection: {
        if (auto ref = first_unvisited(false))
          return Decision{"Opening the next unseen result.", false,
                          Action{ActionKind::click, *ref, {}}};
        if (page.kind == PageKind::collection)
          return Decision{"Collection exhausted; going back.", false,
                          Action{ActionKind::go_back, {}, {}}};
        return Decision{"No results left; returning home.", false,
                        Action{ActionKind::navigate, {}, std::string("/")}};
      }
      case PageKind::cart:
        return Decision{"Cart reviewed; nothing more to do.", true, {}};
      default:
        return Decision{"No applicable move.", true, {}};
    }
  }

  int exploration_budget(ExplorationRegime regime) const {
    switch (regime) {
      case ExplorationRegime::shallow: return config_.shallow_pages;
      case ExplorationRegime::moderate: return config_.moderate_pages;
      case ExplorationRegime::deep: return config_.deep_pages;
    }
    return config_.shallow_pages;
  }

  // exposed for white-box tests of the scoring rule
  double buy_utility(const detail::ParsedPage& page, const Persona& persona,
                     std::span<const MemoryEntry> memory) const {
    double price = 0.0, compare_at = 0.0, quality = 0.5;
    for (const auto& text : page.texts) {
      if (text.rfind("Compare at $", 0) == 0) {
        compare_at = detail::parse_money(text).value_or(0.0);
      } else if (!text.empty() && text[0] == '$') {
        if (price == 0.0) price = detail::parse_money(text).value_or(0.0);
      } else if (text.rfind("Rating: ", 0) == 0) {
        try {
          quality = (std::stod(text.substr(8)) - 1.0) / 4.0;
        } catch (...) {
        }
      }
    }

    double image = 0.5;
    if (page.image_desc.rfind("Low", 0) == 0) image = 0.0;
    else if (page.image_desc.rfind("High", 0) == 0) image = 1.0;

    // trust badges render on the home page; the signal arrives via memory
    bool trust = false;
    for (const auto& text : page.texts)
      if (text == "Secure checkout") trust = true;
    for (const MemoryEntry& entry : memory)
      if (entry.observation_digest.find("Secure checkout") != std::string::npos) trust = true;

    const double rel_price = compare_at > 0.0 ? price / compare_at : 1.0;
    double price_penalty = 0.0;
    switch (persona.archetype.price_tier) {
      case PriceTier::budget: price_penalty = std::clamp(rel_price - 1.0, 0.0, 1.0); break;
      case PriceTier::mid_range: price_penalty = std::clamp(std::abs(rel_price - 1.0), 0.0, 1.0); break;
      case PriceTier::premium: price_penalty = std::clamp(1.0 - rel_price, 0.0, 1.0); break;
    }

    auto axis_match = [&](const std::set<std::string>& axis) {
      for (const auto& text : page.texts)
        if (axis.count(detail::lowercase(text))) return 1.0;
      return 0.0;
    };
    const double values_match = (persona.archetype.premium_focus * axis_match(keywords_.premium) +
                                 persona.archetype.performance_focus * axis_match(keywords_.performance) +
                                 persona.archetype.ethics_focus * axis_match(keywords_.ethics)) /
                                3.0;

    return config_.w_quality * quality + config_.w_trust * (trust ? 1.0 : 0.0) +
           config_.w_image * image - config_.w_price * price_penalty +
           config_.w_values * values_match;
  }

private:
  HeuristicConfig config_;
  KeywordSets keywords_;
};

// --- session execution --------------------------------------------------------

enum class TerminationReason {
  policy_terminate,
  step_budget,
  time_budget,
  loop_guardrail,
  retry_exhausted,
};

inline const char* to_string(TerminationReason r) {
  switch (r) {
    case TerminationReason::policy_terminate: return "policy_terminate";
    case TerminationReason::step_budget: return "step_budget";
    case TerminationReason::time_budget: return "time_budget";
    case TerminationReason::loop_guardrail: return "loop_guardrail";
    case TerminationReason::retry_exhausted: return "retry_exhausted";
  }
  return "?";
}

inline TerminationReason termination_reason_from_string(const std::string& s) {
  if (s == "policy_terminate") return TerminationReason::policy_terminate;
  if (s == "step_budget") return TerminationReason::step_budget;
  if (s == "time_budget") return TerminationReason::time_budget;
  if (s == "loop_guardrail") return TerminationReason::loop_guardrail;
  if (s == "retry_exhausted") return TerminationReason::retry_exhausted;
  throw ConfigError("unknown termination reason '" + s + "'");
}

inline constexpr int kSessionLogSchemaVersion = 1;

struct SessionLog {
  std::string persona_id;
  std::string shop_id;
  Variant variant = Variant::control;
  int trial = 1;
  std::uint64_t seed = 0;
  std::vector<MemoryEntry> steps;
  bool a2c = false;
  TerminationReason termination_reason = TerminationReason::policy_terminate;
};

// One observe-plan-act session against a single store variant. The runner
// always records the full trajectory; memory_enabled only gates what the
// policy gets to see. Guardrails make termination total for any policy.
inline SessionLog run_session(const Persona& persona, const StoreSpec& spec, Variant variant,
                              Policy& policy, const GuardrailConfig& guardrails,
                              std::uint64_t seed, bool memory_enabled, int trial = 1) {
  SessionLog log;
  log.persona_id = persona.persona_id;
  log.shop_id = spec.shop_id;
  log.variant = variant;
  log.trial = trial;
  log.seed = seed;
  log.termination_reason = TerminationReason::step_budget;

  PageState state = home_state();
  std::vector<PageState> history;
  const auto start = std::chrono::steady_clock::now();

  for (int step = 0; step < guardrails.max_steps; ++step) {
    const ObservationRecord obs = observe(spec, state, step);
    const PlanningContext context =
        assemble_context(persona, log.steps, obs, guardrails, memory_enabled);

    Decision decision;
    try {
      decision = policy.decide(context);
    } catch (const PolicyFailure&) {
      log.termination_reason = TerminationReason::retry_exhausted;
      break;
    }

    MemoryEntry entry;
    entry.step_index = step;
    entry.observed_url = obs.url;
    entry.observation_digest = make_observation_digest(obs);
    entry.reasoning = decision.reasoning;

    if (decision.terminate || !decision.action) {
      entry.action = Action{ActionKind::terminate, {}, {}};
      entry.landed_url = state.url;
      log.steps.push_back(std::move(entry));
      log.termination_reason = TerminationReason::policy_terminate;
      break;
    }

    const TransitionResult result = execute(spec, state, *decision.action, &history);
    entry.action = *decision.action;
    entry.outcome = result.outcome;
    entry.emitted_events = result.emitted_events;
    entry.landed_url = result.new_state.url;
    entry.error_detail = result.error_detail;
    log.steps.push_back(std::move(entry));
    state = result.new_state;

    if (detect_loop(log.steps, guardrails.loop_window)) {
      log.termination_reason = TerminationReason::loop_guardrail;
      break;
    }
    const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - start)
                             .count();
    if (elapsed > guardrails.max_wall_ms) {
      log.termination_reason = TerminationReason::time_budget;
      break;
    }
  }

  for (const MemoryEntry& entry : log.steps)
    for (EventKind kind : entry.emitted_events)
      if (kind == EventKind::add_to_cart) log.a2c = true;
  return log;
}

// Replays a session log as a clickstream session (one synthetic event per
// emitted kind, one second per step), bridging agent output back into the
// Stage-1 feature space.
inline Session to_clickstream_session(const SessionLog& log, const StoreSpec& spec) {
  Session session;
  session.id = log.persona_id + ":" + to_string(log.variant) + ":t" + std::to_string(log.trial);
  session.shop_id = log.shop_id;
  session.buyer_id = log.persona_id;

  std::vector<std::string> cart;
  for (const MemoryEntry& entry : log.steps) {
    std::int64_t ts = static_cast<std::int64_t>(entry.step_index) * 1000;
    for (EventKind kind : entry.emitted_events) {
      Event e;
      e.session_id = session.id;
      e.buyer_id = session.buyer_id;
      e.shop_id = session.shop_id;
      e.ts_ms = ts++;
      e.kind = kind;
      if (kind == EventKind::product_view && entry.landed_url.rfind("/products/", 0) == 0)
        e.product_ref = detail::url_decode(entry.landed_url.substr(10));
      if (kind == EventKind::add_to_cart && entry.landed_url.rfind("/products/", 0) == 0) {
        e.product_ref = detail::url_decode(entry.landed_url.substr(10));
        cart.push_back(*e.product_ref);
        e.value = cart_total(spec, cart);
      }
      session.events.push_back(std::move(e));
    }
  }
  if (session.events.empty()) {
    // a pure-deliberation session still counts as one page view of the home page
    session.events.push_back(
        Event{session.id, session.buyer_id, session.shop_id, 0, EventKind::page_view, {}, {}});
  }
  return session;
}

// --- cohort execution ---------------------------------------------------------

struct PersonaManifest {
  std::string shop_id;
  std::vector<Persona> personas; // sorted by persona_id
  std::map<int, std::size_t> cluster_session_counts;
};

// Splits the agent budget across clusters proportionally to session mass,
// assigning remainders by largest fraction (ties to the lower cluster id).
inline std::map<int, int> allocate_budget(const std::map<int, std::size_t>& cluster_mass,
                                          int budget) {
  std::map<int, int> quotas;
  double total = 0.0;
  for (const auto& [cluster, mass] : cluster_mass) total += static_cast<double>(mass);
  if (total <= 0.0 || budget <= 0) return quotas;

  std::vector<std::pair<double, int>> fractions; // (fraction, cluster)
  int assigned = 0;
  for (const auto& [cluster, mass] : cluster_mass) {
    const double exact = budget * static_cast<double>(mass) / total;
    const int base = static_cast<int>(std::floor(exact));
    quotas[cluster] = base;
    assigned += base;
    fractions.emplace_back(exact - base, cluster);
  }
  std::sort(fractions.begin(), fractions.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  for (int i = 0; assigned < budget && !fractions.empty(); ++i) {
    quotas[fractions[i % fractions.size()].second] += 1;
    ++assigned;
  }
  return quotas;
}

// The per-agent persona roster for one shop: cluster quotas filled round-robin
// from that cluster's personas in persona_id order.
inline std::vector<const Persona*> build_agent_roster(const PersonaManifest& manifest,
                                                      int agents_per_shop) {
  std::map<int, std::vector<const Persona*>> by_cluster;
  for (const Persona& p : manifest.personas) by_cluster[p.intent.cluster_id].push_back(&p);
  for (auto& [cluster, personas] : by_cluster)
    std::sort(personas.begin(), personas.end(),
              [](const Persona* a, const Persona* b) { return a->persona_id < b->persona_id; });

  std::map<int, std::size_t> effective_mass;
  for (const auto& [cluster, mass] : manifest.cluster_session_counts)
    if (by_cluster.count(cluster) && !by_cluster[cluster].empty()) effective_mass[cluster] = mass;
  // personas without recorded mass still participate with weight 1
  for (const auto& [cluster, personas] : by_cluster)
    if (!effective_mass.count(cluster)) effective_mass[cluster] = 1;

  const auto quotas = allocate_budget(effective_mass, agents_per_shop);
  std::vector<const Persona*> roster;
  roster.reserve(agents_per_shop);
  for (const auto& [cluster, quota] : quotas) {
    const auto& personas = by_cluster[cluster];
    for (int i = 0; i < quota; ++i) roster.push_back(personas[i % personas.size()]);
  }
  return roster;
}

// Runs the full cohort: each rostered agent shops once per variant per trial.
// Per-session seeds derive from (master_seed, persona_id, variant, trial), so
// any parallel schedule reproduces the sequential results bit for bit.
inline std::vector<SessionLog> run_cohort(const PersonaManifest& manifest, const StorePair& pair,
                                          Policy& policy, const GuardrailConfig& guardrails,
                                          std::uint64_t master_seed, int agents_per_shop,
                                          int trials, bool memory_enabled = true,
                                          int workers = 0) {
  if (agents_per_shop < 1) throw ConfigError("agents_per_shop must be >= 1");
  const auto roster = build_agent_roster(manifest, agents_per_shop);

  struct Task {
    const Persona* persona;
    Variant variant;
    int trial;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  tasks.reserve(roster.size() * 2 * trials);
  for (int trial = 1; trial <= trials; ++trial)
    for (Variant variant : {Variant::control, Variant::treatment})
      for (const Persona* persona : roster)
        tasks.push_back(Task{persona, variant, trial,
                             derive_seed(master_seed, std::string_view(persona->persona_id),
                                         std::string_view(to_string(variant)),
                                         static_cast<std::uint64_t>(trial))});

  std::vector<SessionLog> logs(tasks.size());
  auto run_task = [&](std::size_t i) {
    const Task& t = tasks[i];
    logs[i] = run_session(*t.persona, pair.get(t.variant), t.variant, policy, guardrails, t.seed,
                          memory_enabled, t.trial);
  };

  if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
  if (workers <= 1 || tasks.size() < 2) {
    for (std::size_t i = 0; i < tasks.size(); ++i) run_task(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    const int n_threads = std::min<int>(workers, static_cast<int>(tasks.size()));
    pool.reserve(n_threads);
    for (int w = 0; w < n_threads; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < tasks.size(); i = next.fetch_add(1))
          run_task(i);
      });
    for (auto& t : pool) t.join();
  }
  return logs;
}

// --- session-log serialization (newline-delimited JSON, schema versioned) ---

inline void to_json(nlohmann::json& j, const MemoryEntry& e) {
  j = nlohmann::json{{"step_index", e.step_index},
                     {"observed_url", e.observed_url},
                     {"observation_digest", e.observation_digest},
                     {"reasoning", e.reasoning},
                     {"action", e.action},
                     {"outcome", e.outcome == TransitionOutcome::ok ? "ok" : "execution_error"},
                     {"landed_url", e.landed_url}};
  auto& events = j["emitted_events"] = nlohmann::json::array();
  for (EventKind kind : e.emitted_events) events.push_back(to_string(kind));
  if (e.error_detail) j["error_detail"] = *e.error_detail;
}

inline void from_json(const nlohmann::json& j, MemoryEntry& e) {
  j.at("step_index").get_to(e.step_index);
  j.at("observed_url").get_to(e.observed_url);
  j.at("observation_digest").get_to(e.observation_digest);
  j.at("reasoning").get_to(e.reasoning);
  j.at("action").get_to(e.action);
  e.outcome = j.at("outcome").get<std::string>() == "ok" ? TransitionOutcome::ok
                                                         : TransitionOutcome::execution_error;
  j.at("landed_url").get_to(e.landed_url);
  e.emitted_events.clear();
  for (const auto& kind : j.at("emitted_events")) {
    const auto parsed = parse_event_kind(kind.get<std::string>());
    if (!parsed) throw ConfigError("unknown event kind in session log");
    e.emitted_events.push_back(*parsed);
  }
  if (j.contains("error_detail") && !j["error_detail"].is_null())
    e.error_detail = j["error_detail"].get<std::string>();
}

inline void to_json(nlohmann::json& j, const SessionLog& log) {
  j = nlohmann::json{{"schema_version", kSessionLogSchemaVersion},
                     {"persona_id", log.persona_id},
                     {"shop_id", log.shop_id},
                     {"variant", to_string(log.variant)},
                     {"trial", log.trial},
                     {"seed", log.seed},
                     {"a2c", log.a2c},
                     {"termination_reason", to_string(log.termination_reason)},
                     {"steps", log.steps}};
}

inline void from_json(const nlohmann::json& j, SessionLog& log) {
  log.persona_id = j.at("persona_id").get<std::string>();
  log.shop_id = j.at("shop_id").get<std::string>();
  log.variant = variant_from_string(j.at("variant").get<std::string>());
  j.at("trial").get_to(log.trial);
  j.at("seed").get_to(log.seed);
  j.at("a2c").get_to(log.a2c);
  log.termination_reason =
      termination_reason_from_string(j.at("termination_reason").get<std::string>());
  j.at("steps").get_to(log.steps);
}

inline void write_session_logs(std::ostream& out, const std::vector<SessionLog>& logs) {
  for (const SessionLog& log : logs) out << nlohmann::json(log).dump() << '\n';
}

inline std::vector<SessionLog> read_session_logs(std::istream& in) {
  std::vector<SessionLog> logs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      logs.push_back(nlohmann::json::parse(line).get<SessionLog>());
    } catch (const nlohmann::json::exception& e) {
      throw MalformedLine(line_no, e.what());
    }
  }
  return logs;
}

} // namespace simgym
