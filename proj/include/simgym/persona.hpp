#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "simgym/catalog.hpp"
#include "simgym/clickstream.hpp"
#include "simgym/errors.hpp"
#include "simgym/rand.hpp"

namespace simgym {

enum class PriceTier { budget, mid_range, premium };
enum class ExplorationRegime { shallow, moderate, deep };

inline const char* to_string(PriceTier t) {
  switch (t) {
    case PriceTier::budget: return "budget";
    case PriceTier::mid_range: return "mid_range";
    case PriceTier::premium: return "premium";
  }
  return "?";
}

inline const char* to_string(ExplorationRegime r) {
  switch (r) {
    case ExplorationRegime::shallow: return "shallow";
    case ExplorationRegime::moderate: return "moderate";
    case ExplorationRegime::deep: return "deep";
  }
  return "?";
}

inline PriceTier price_tier_from_string(const std::string& s) {
  if (s == "budget") return PriceTier::budget;
  if (s == "mid_range") return PriceTier::mid_range;
  if (s == "premium") return PriceTier::premium;
  throw ConfigError("unknown price tier '" + s + "'");
}

inline ExplorationRegime exploration_regime_from_string(const std::string& s) {
  if (s == "shallow") return ExplorationRegime::shallow;
  if (s == "moderate") return ExplorationRegime::moderate;
  if (s == "deep") return ExplorationRegime::deep;
  throw ConfigError("unknown exploration regime '" + s + "'");
}

// Tier boundaries: budget > 0.50, mid_range [0.30, 0.50], premium < 0.30.
inline PriceTier price_tier_for_gap(double gap) {
  if (gap > 0.50) return PriceTier::budget;
  if (gap >= 0.30) return PriceTier::mid_range;
  return PriceTier::premium;
}

// Regime boundaries: shallow [0, 0.35), moderate [0.35, 0.65), deep [0.65, 1].
inline ExplorationRegime regime_for_score(double score) {
  if (score < 0.35) return ExplorationRegime::shallow;
  if (score < 0.65) return ExplorationRegime::moderate;
  return ExplorationRegime::deep;
}

struct ShopMeta {
  std::string name;
  std::string industry;
};

struct ProductPreferences {
  int cluster_id = 0;
  std::vector<std::string> categories;          // <= 10, generic descriptors
  std::vector<std::string> individual_products; // <= 10
  std::string reasoning;
};

struct BuyerIntent {
  int cluster_id = 0;
  std::string product_target;
  std::string purchase_decision_guide;
};

// Fixed Stage-3 instruction; the middle sentence is the deferral clause.
inline const std::string& purchase_decision_guide_text() {
  static const std::string text =
      "Research the available options. Do not purchase by default. Add a product to your cart "
      "only when it clearly fits your profile and the storefront gives you enough confidence "
      "to buy.";
  return text;
}

struct BrowsedItem {
  std::string product_ref;
  double price = 0.0;
  std::string category;
  std::vector<std::string> keywords;
};

struct BuyerAggregate {
  std::string buyer_id;
  int cluster_id = 0;
  int session_count = 0;
  int a2c_count = 0;
  int checkout_count = 0;
  int purchase_count = 0;
  double avg_cart_value = 0.0;
  double avg_order_value = 0.0;
  // cross-session activity totals feeding the exploration score
  double total_duration_s = 0.0;
  int total_search_count = 0;
  int total_product_views = 0;
  std::vector<BrowsedItem> browsed;
  std::vector<BrowsedItem> purchased;
};

struct BuyerArchetype {
  std::string buyer_id;
  int cluster_id = 0;
  PriceTier price_tier = PriceTier::mid_range;
  double price_gap = 0.0;
  double exploration_score = 0.0;
  ExplorationRegime exploration_regime = ExplorationRegime::shallow;
  double premium_focus = 0.0;
  double performance_focus = 0.0;
  double ethics_focus = 0.0;
  std::string rationale;
};

struct Persona {
  std::string persona_id;
  std::string shop_id;
  BuyerIntent intent;
  BuyerArchetype archetype;
  ProductPreferences cluster_preferences;
  std::string prompt;
};

struct KeywordSets {
  std::set<std::string> premium;
  std::set<std::string> performance;
  std::set<std::string> ethics;
};

inline const KeywordSets& default_keyword_sets() {
  static const KeywordSets sets{
      {"handcrafted", "luxury", "artisan", "prestige", "premium"},
      {"durable", "commercial grade", "professional-grade", "certified", "heavy-duty",
       "specifications"},
      {"organic", "sustainable", "fair trade", "recycled", "ethical"}};
  return sets;
}

inline KeywordSets keyword_sets_from_json(const nlohmann::json& j) {
  KeywordSets sets;
  auto fill = [&](const char* key, std::set<std::string>& target) {
    if (!j.contains(key)) throw ConfigError(std::string("keyword sets: missing axis '") + key + "'");
    for (const auto& kw : j.at(key)) target.insert(kw.get<std::string>());
  };
  fill("premium", sets.premium);
  fill("performance", sets.performance);
  fill("ethics", sets.ethics);
  return sets;
}

struct ExplorationNorms {
  double duration_cap_s = 1.0;
  double search_cap = 1.0;
  double views_cap = 1.0;
};

// Shop-level caps: 95th-percentile per-session values (nearest rank),
// floored at 1 so the caps stay positive on degenerate shops.
inline ExplorationNorms compute_exploration_norms(const std::vector<Session>& sessions) {
  std::vector<double> durations, searches, views;
  for (const Session& s : sessions) {
    const SessionFeatures f = featurize(s);
    durations.push_back(f.duration_s);
    searches.push_back(static_cast<double>(f.search_count));
    views.push_back(static_cast<double>(f.product_views));
  }
  auto p95 = [](std::vector<double>& v) {
    if (v.empty()) return 1.0;
    std::sort(v.begin(), v.end());
    const std::size_t rank = static_cast<std::size_t>(
        std::ceil(0.95 * static_cast<double>(v.size())));
    return std::max(v[std::min(rank == 0 ? 0 : rank - 1, v.size() - 1)], 1.0);
  };
  return ExplorationNorms{p95(durations), p95(searches), p95(views)};
}

// Structured-output text model used for Stage 2 preferences and Stage 5
// rationales. Implementations throw BackendUnavailable on transport failure.
class TextBackend {
public:
  virtual ~TextBackend() = default;
  virtual nlohmann::json complete(const nlohmann::json& request) = 0;
};

struct ClusterSummaryItem {
  std::string product_ref;
  std::string name;
  std::string category;
  int browsed_count = 0;
  int purchased_count = 0;
};

struct ClusterSummary {
  int cluster_id = 0;
  std::vector<ClusterSummaryItem> items;
};

inline ClusterSummary build_cluster_summary(int cluster_id, const std::vector<Session>& sessions,
                                            const ProductCatalog& catalog) {
  std::map<std::string, ClusterSummaryItem> by_ref;
  for (const Session& s : sessions) {
    for (const Event& e : s.events) {
      if (!e.product_ref) continue;
      const Product& p = catalog.at(*e.product_ref);
      auto& item = by_ref[p.product_ref];
      item.product_ref = p.product_ref;
      item.name = p.name;
      item.category = p.category;
      if (e.kind == EventKind::product_view) ++item.browsed_count;
      if (e.kind == EventKind::purchase) ++item.purchased_count;
    }
  }
  ClusterSummary summary;
  summary.cluster_id = cluster_id;
  for (auto& [ref, item] : by_ref)
    if (item.browsed_count > 0 || item.purchased_count > 0) summary.items.push_back(item);
  return summary;
}

namespace detail {

inline std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

inline double purchase_weighted_score(int purchased, int browsed) {
  return 2.0 * purchased + browsed;
}

template <typename Scored>
std::vector<std::string> top_names(std::vector<Scored>& scored, std::size_t cap) {
  std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.name < b.name;
  });
  std::vector<std::string> out;
  for (const auto& s : scored) {
    out.push_back(s.name);
    if (out.size() == cap) break;
  }
  return out;
}

inline ProductPreferences fallback_preferences(const ClusterSummary& summary,
                                               const std::set<std::string>& product_names) {
  struct Scored {
    std::string name;
    double score;
  };
  std::map<std::string, double> category_scores;
  std::vector<Scored> products;
  for (const auto& item : summary.items) {
    const double score = purchase_weighted_score(item.purchased_count, item.browsed_count);
    category_scores[item.category] += score;
    products.push_back({item.name, score});
  }

  std::vector<Scored> categories;
  for (const auto& [name, score] : category_scores)
    if (!product_names.count(lowercase(name))) categories.push_back({name, score});

  ProductPreferences prefs;
  prefs.cluster_id = summary.cluster_id;
  prefs.categories = top_names(categories, 10);
  prefs.individual_products = top_names(products, 10);
  prefs.reasoning = "Ranked by purchase-weighted interaction frequency over " +
                    std::to_string(summary.items.size()) + " products in cluster " +
                    std::to_string(summary.cluster_id) + ".";
  return prefs;
}

inline std::optional<ProductPreferences> validate_preferences_reply(
    const nlohmann::json& reply, int cluster_id, const std::set<std::string>& product_names,
    std::string& error) {
  if (!reply.is_object() || !reply.contains("categories") ||
      !reply.contains("individual_products") || !reply.contains("reasoning")) {
    error = "reply must carry categories, individual_products, reasoning";
    return std::nullopt;
  }
  ProductPreferences prefs;
  prefs.cluster_id = cluster_id;
  try {
    reply.at("categories").get_to(prefs.categories);
    reply.at("individual_products").get_to(prefs.individual_products);
    reply.at("reasoning").get_to(prefs.reasoning);
  } catch (const nlohmann::json::exception& e) {
    error = e.what();
    return std::nullopt;
  }
  if (prefs.categories.size() > 10 || prefs.individual_products.size() > 10) {
    error = "list caps exceeded";
    return std::nullopt;
  }
  for (const auto& c : prefs.categories) {
    if (product_names.count(lowercase(c))) {
      error = "category '" + c + "' is a shop product name";
      return std::nullopt;
    }
  }
  return prefs;
}

} // namespace detail

// Stage 2: product preferences per (shop, cluster). The deterministic fallback
// ranks categories and products by 2*purchased + browsed frequency; a backend,
// when given, must return the same structure and is retried on schema
// violations.
inline ProductPreferences extract_preferences(const ShopMeta& shop_meta,
                                              const ClusterSummary& summary,
                                              const ProductCatalog& catalog,
                                              TextBackend* backend = nullptr,
                                              int max_retries = 2) {
  if (summary.items.empty())
    throw EmptySummary("cluster " + std::to_string(summary.cluster_id) +
                       " has no browsed or purchased products");

  std::set<std::string> product_names;
  for (const Product& p : catalog.products()) product_names.insert(detail::lowercase(p.name));

  if (backend == nullptr) return detail::fallback_preferences(summary, product_names);

  nlohmann::json request{{"task", "extract_preferences"},
                         {"shop", {{"name", shop_meta.name}, {"industry", shop_meta.industry}}},
                         {"cluster_id", summary.cluster_id},
                         {"response_schema",
                          {{"categories", "array of <= 10 generic category strings"},
                           {"individual_products", "array of <= 10 product names"},
                           {"reasoning", "string"}}}};
  auto& items = request["items"] = nlohmann::json::array();
  for (const auto& item : summary.items)
    items.push_back({{"name", item.name},
                     {"category", item.category},
                     {"browsed_count", item.browsed_count},
                     {"purchased_count", item.purchased_count}});

  std::string last_error;
  for (int attempt = 0; attempt <= max_retries; ++attempt) {
    nlohmann::json attempt_request = request;
    if (!last_error.empty()) attempt_request["previous_error"] = last_error;
    nlohmann::json reply;
    try {
      reply = backend->complete(attempt_request);
    } catch (const BackendUnavailable& e) {
      last_error = e.what();
      continue;
    }
    if (auto prefs = detail::validate_preferences_reply(reply, summary.cluster_id, product_names,
                                                        last_error))
      return *prefs;
  }
  throw BackendUnavailable("extract_preferences: retries exhausted: " + last_error);
}

namespace detail {

inline bool is_scrub_token(const std::string& raw) {
  static const std::set<std::string> scrub = {
      "bundle", "bundles", "pack",     "packs",     "size",   "sizes", "xs",    "s",
      "m",      "l",       "xl",       "xxl",       "small",  "medium", "large",
      "discount", "discounts", "sale", "sales",     "off",    "deal",  "deals", "bogo",
      "clearance", "coupon", "promo",  "banner",    "button", "popup", "modal", "checkout"};
  std::string token;
  for (char c : raw)
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '%' || c == '-')
      token += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (token.empty()) return true;
  if (scrub.count(token)) return true;
  // numeric and percent tokens ("20%", "50", "2-for-1")
  bool has_alpha = false;
  for (char c : token)
    if (std::isalpha(static_cast<unsigned char>(c))) has_alpha = true;
  return !has_alpha;
}

// Drops bundle/size/discount/UI tokens so intents stay reusable across
// storefront variants. Falls back to the input when scrubbing empties it.
inline std::string scrub_target(const std::string& target) {
  std::string out;
  std::string word;
  auto flush = [&] {
    if (!word.empty() && !is_scrub_token(word)) {
      if (!out.empty()) out += ' ';
      out += word;
    }
    word.clear();
  };
  for (char c : target) {
    if (std::isspace(static_cast<unsigned char>(c)))
      flush();
    else
      word += c;
  }
  flush();
  return out.empty() ? target : out;
}

} // namespace detail

// Stage 3: one shopping intent per agent; the target is drawn uniformly from
// the cluster's categories with the caller's seed.
inline BuyerIntent generate_intent(const ProductPreferences& preferences, std::uint64_t seed) {
  if (preferences.categories.empty())
    throw NoCategories("cluster " + std::to_string(preferences.cluster_id) +
                       " has no product categories");
  Rng rng(seed);
  const std::string& raw = preferences.categories[rng.next_index(preferences.categories.size())];
  BuyerIntent intent;
  intent.cluster_id = preferences.cluster_id;
  intent.product_target = detail::scrub_target(raw);
  intent.purchase_decision_guide = purchase_decision_guide_text();
  return intent;
}

// Stage 4: buyer-level aggregation of the centroid-nearest sessions.
inline std::vector<BuyerAggregate> aggregate_buyers(const std::vector<Session>& sessions,
                                                    const ProductCatalog& catalog,
                                                    int cluster_id) {
  std::map<std::string, BuyerAggregate> by_buyer;
  std::map<std::string, std::set<std::string>> browsed_seen, purchased_seen;
  std::map<std::string, double> cart_total, order_total;

  for (const Session& s : sessions) {
    auto& agg = by_buyer[s.buyer_id];
    agg.buyer_id = s.buyer_id;
    agg.cluster_id = cluster_id;
    const SessionFeatures f = featurize(s);
    ++agg.session_count;
    agg.a2c_count += f.a2c;
    agg.checkout_count += f.checkout;
    agg.purchase_count += f.purchase;
    agg.total_duration_s += f.duration_s;
    agg.total_search_count += f.search_count;
    agg.total_product_views += f.product_views;
    if (f.a2c) cart_total[s.buyer_id] += f.cart_value;
    if (f.purchase) order_total[s.buyer_id] += f.order_value;

    for (const Event& e : s.events) {
      if (!e.product_ref) continue;
      const Product& p = catalog.at(*e.product_ref);
      const BrowsedItem item{p.product_ref, p.price, p.category, p.keywords};
      if (e.kind == EventKind::product_view && browsed_seen[s.buyer_id].insert(p.product_ref).second)
        agg.browsed.push_back(item);
      if (e.kind == EventKind::purchase && purchased_seen[s.buyer_id].insert(p.product_ref).second)
        agg.purchased.push_back(item);
    }
  }

  std::vector<BuyerAggregate> out;
  out.reserve(by_buyer.size());
  for (auto& [buyer_id, agg] : by_buyer) {
    if (agg.a2c_count > 0) agg.avg_cart_value = cart_total[buyer_id] / agg.a2c_count;
    if (agg.purchase_count > 0) agg.avg_order_value = order_total[buyer_id] / agg.purchase_count;
    out.push_back(std::move(agg));
  }
  return out; // std::map iteration gives stable buyer_id order
}

// Price sensitivity from the gap between the highest browsed price and the
// average purchased price, both normalized by their category's catalog
// median. Buyers with no purchases fall back to the mean browsed price.
inline std::pair<PriceTier, double> score_price_sensitivity(const BuyerAggregate& agg,
                                                            const ProductCatalog& catalog) {
  if (agg.browsed.empty())
    throw NoBrowsedProducts("buyer '" + agg.buyer_id + "' browsed no products");

  auto normalized = [&](const BrowsedItem& item) {
    return item.price / catalog.category_median(item.category);
  };

  double max_browsed = 0.0;
  double browsed_sum = 0.0;
  for (const auto& item : agg.browsed) {
    const double np = normalized(item);
    max_browsed = std::max(max_browsed, np);
    browsed_sum += np;
  }
  double reference;
  if (!agg.purchased.empty()) {
    double purchased_sum = 0.0;
    for (const auto& item : agg.purchased) purchased_sum += normalized(item);
    reference = purchased_sum / static_cast<double>(agg.purchased.size());
  } else {
    reference = browsed_sum / static_cast<double>(agg.browsed.size());
  }

  double gap = 0.0;
  if (max_browsed > 0.0) gap = std::clamp((max_browsed - reference) / max_browsed, 0.0, 1.0);
  return {price_tier_for_gap(gap), gap};
}

// Exploration depth: mean of three capped activity ratios. Summing the
// thirds keeps equal ratios exact, so boundary scores compare cleanly
// against the regime cutoffs.
inline std::pair<double, ExplorationRegime> score_exploration_depth(const BuyerAggregate& agg,
                                                                    const ExplorationNorms& norms) {
  const double d = std::clamp(agg.total_duration_s / norms.duration_cap_s, 0.0, 1.0);
  const double s = std::clamp(agg.total_search_count / norms.search_cap, 0.0, 1.0);
  const double v = std::clamp(agg.total_product_views / norms.views_cap, 0.0, 1.0);
  const double score = d / 3.0 + s / 3.0 + v / 3.0;
  return {score, regime_for_score(score)};
}

struct ValuesFocus {
  double premium = 0.0;
  double performance = 0.0;
  double ethics = 0.0;
};

namespace detail {

inline bool matches_axis(const BrowsedItem& item, const std::set<std::string>& axis) {
  for (const auto& kw : item.keywords)
    if (axis.count(lowercase(kw))) return true;
  return false;
}

inline double axis_score(const BuyerAggregate& agg, const std::set<std::string>& axis,
                         double browsed_weight, double purchased_weight) {
  double b = 0.0;
  for (const auto& item : agg.browsed)
    if (matches_axis(item, axis)) b += 1.0;
  b = agg.browsed.empty() ? 0.0 : b / static_cast<double>(agg.browsed.size());

  double p;
  if (agg.purchased.empty()) {
    p = b; // no purchase signal: browsing stands in for revealed preference
  } else {
    p = 0.0;
    for (const auto& item : agg.purchased)
      if (matches_axis(item, axis)) p += 1.0;
    p /= static_cast<double>(agg.purchased.size());
  }
  return std::clamp(browsed_weight * b + purchased_weight * p, 0.0, 1.0);
}

} // namespace detail

// Values focus per axis: 0.4 * browsed fraction + 0.6 * purchased fraction,
// weighting purchases as revealed preference.
inline ValuesFocus score_values_focus(const BuyerAggregate& agg, const KeywordSets& keyword_sets,
                                      double browsed_weight = 0.4, double purchased_weight = 0.6) {
  ValuesFocus focus;
  focus.premium = detail::axis_score(agg, keyword_sets.premium, browsed_weight, purchased_weight);
  focus.performance =
      detail::axis_score(agg, keyword_sets.performance, browsed_weight, purchased_weight);
  focus.ethics = detail::axis_score(agg, keyword_sets.ethics, browsed_weight, purchased_weight);
  return focus;
}

namespace detail {

inline std::string format2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

inline std::string rationale_template(const BuyerArchetype& a) {
  return std::string("Price tier ") + to_string(a.price_tier) + " (gap " + format2(a.price_gap) +
         "); " + to_string(a.exploration_regime) + " exploration (" +
         format2(a.exploration_score) + "); values focus premium " + format2(a.premium_focus) +
         ", performance " + format2(a.performance_focus) + ", ethics " + format2(a.ethics_focus) +
         ".";
}

} // namespace detail

// Stage 5: the five-dimension archetype. Numeric fields always come from the
// deterministic scoring rules; a backend may only author the rationale text
// and falls back to the template if it misbehaves.
inline BuyerArchetype construct_archetype(const BuyerAggregate& agg, const ProductCatalog& catalog,
                                          const ExplorationNorms& norms,
                                          const KeywordSets& keyword_sets,
                                          TextBackend* backend = nullptr, int max_retries = 2) {
  BuyerArchetype archetype;
  archetype.buyer_id = agg.buyer_id;
  archetype.cluster_id = agg.cluster_id;
  std::tie(archetype.price_tier, archetype.price_gap) = score_price_sensitivity(agg, catalog);
  std::tie(archetype.exploration_score, archetype.exploration_regime) =
      score_exploration_depth(agg, norms);
  const ValuesFocus focus = score_values_focus(agg, keyword_sets);
  archetype.premium_focus = focus.premium;
  archetype.performance_focus = focus.performance;
  archetype.ethics_focus = focus.ethics;
  archetype.rationale = detail::rationale_template(archetype);

  if (backend != nullptr) {
    nlohmann::json request{{"task", "archetype_rationale"},
                           {"buyer_id", agg.buyer_id},
                           {"price_tier", to_string(archetype.price_tier)},
                           {"price_gap", archetype.price_gap},
                           {"exploration_regime", to_string(archetype.exploration_regime)},
                           {"exploration_score", archetype.exploration_score},
                           {"premium_focus", archetype.premium_focus},
                           {"performance_focus", archetype.performance_focus},
                           {"ethics_focus", archetype.ethics_focus}};
    for (int attempt = 0; attempt <= max_retries; ++attempt) {
      try {
        const nlohmann::json reply = backend->complete(request);
        if (reply.is_object() && reply.contains("rationale") && reply["rationale"].is_string() &&
            !reply["rationale"].get<std::string>().empty()) {
          archetype.rationale = reply["rationale"].get<std::string>();
          break;
        }
      } catch (const BackendUnavailable&) {
        // keep the deterministic template
      }
    }
  }
  return archetype;
}

namespace detail {

inline std::string capitalize(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  for (auto& c : s)
    if (c == '_') c = '-';
  return s;
}

inline std::string tier_guidance(PriceTier tier) {
  switch (tier) {
    case PriceTier::budget:
      return "Respond to discount signals, social proof, and urgency cues; compare prices "
             "before committing.";
    case PriceTier::mid_range:
      return "Weigh price against quality; settle on a clear mid-market option with solid "
             "reviews.";
    case PriceTier::premium:
      return "Favor premium presentation, craftsmanship, and refined product pages; ignore "
             "bargain framing.";
  }
  return "";
}

} // namespace detail

// Stage 6: compose the agent prompt from intent, archetype, and cluster
// preferences. The prompt is derived text; the persona record stays canonical.
inline Persona compose_prompt(const BuyerIntent& intent, const BuyerArchetype& archetype,
                              const ProductPreferences& preferences, const std::string& shop_id) {
  if (intent.cluster_id != archetype.cluster_id || intent.cluster_id != preferences.cluster_id)
    throw ClusterMismatch("intent cluster " + std::to_string(intent.cluster_id) +
                          " vs archetype cluster " + std::to_string(archetype.cluster_id) +
                          " vs preferences cluster " + std::to_string(preferences.cluster_id));

  Persona persona;
  persona.persona_id =
      shop_id + "-c" + std::to_string(intent.cluster_id) + "-" + archetype.buyer_id;
  persona.shop_id = shop_id;
  persona.intent = intent;
  persona.archetype = archetype;
  persona.cluster_preferences = preferences;

  std::string p;
  p += "# Buyer Persona\n\n";
  p += "## Intent\n";
  p += "Product target: " + intent.product_target + "\n";
  if (!intent.purchase_decision_guide.empty()) p += intent.purchase_decision_guide + "\n";
  p += "\n## Shopping Profile\n";
  p += "Price Tier: " + detail::capitalize(to_string(archetype.price_tier)) + " (gap " +
       detail::format2(archetype.price_gap) + ")\n";
  p += "Exploration Depth: " + detail::capitalize(to_string(archetype.exploration_regime)) +
       " (" + detail::format2(archetype.exploration_score) + ")\n";
  p += "\n## Values\n";
  p += "Premium focus: " + detail::format2(archetype.premium_focus) + "\n";
  p += "Performance focus: " + detail::format2(archetype.performance_focus) + "\n";
  p += "Ethics focus: " + detail::format2(archetype.ethics_focus) + "\n";
  if (!preferences.categories.empty()) {
    p += "\n## Cluster Preferences\n";
    p += "Categories:";
    for (const auto& c : preferences.categories) p += " " + c + ";";
    p.back() = '\n';
    if (!preferences.individual_products.empty()) {
      p += "Familiar products:";
      for (const auto& name : preferences.individual_products) p += " " + name + ";";
      p.back() = '\n';
    }
  }
  p += "\n## Shopping Experience Preferences\n";
  p += "- " + detail::tier_guidance(archetype.price_tier) + "\n";
  if (archetype.premium_focus >= 0.5)
    p += "- Pay attention to luxury materials, craftsmanship, and prestige cues.\n";
  if (archetype.performance_focus >= 0.5)
    p += "- Pay attention to detailed specifications, customer reviews, and transparency about "
         "materials.\n";
  if (archetype.ethics_focus >= 0.5)
    p += "- Prefer products with sustainability and ethical sourcing signals.\n";

  persona.prompt = std::move(p);
  return persona;
}

// --- JSON (canonical persona record; prompt included but derived) ---

inline void to_json(nlohmann::json& j, const ProductPreferences& p) {
  j = nlohmann::json{{"cluster_id", p.cluster_id},
                     {"categories", p.categories},
                     {"individual_products", p.individual_products},
                     {"reasoning", p.reasoning}};
}

inline void from_json(const nlohmann::json& j, ProductPreferences& p) {
  j.at("cluster_id").get_to(p.cluster_id);
  j.at("categories").get_to(p.categories);
  j.at("individual_products").get_to(p.individual_products);
  j.at("reasoning").get_to(p.reasoning);
}

inline void to_json(nlohmann::json& j, const BuyerIntent& i) {
  j = nlohmann::json{{"cluster_id", i.cluster_id},
                     {"product_target", i.product_target},
                     {"purchase_decision_guide", i.purchase_decision_guide}};
}

inline void from_json(const nlohmann::json& j, BuyerIntent& i) {
  j.at("cluster_id").get_to(i.cluster_id);
  j.at("product_target").get_to(i.product_target);
  j.at("purchase_decision_guide").get_to(i.purchase_decision_guide);
}

inline void to_json(nlohmann::json& j, const BuyerArchetype& a) {
  j = nlohmann::json{{"buyer_id", a.buyer_id},
                     {"cluster_id", a.cluster_id},
                     {"price_tier", to_string(a.price_tier)},
                     {"price_gap", a.price_gap},
                     {"exploration_score", a.exploration_score},
                     {"exploration_regime", to_string(a.exploration_regime)},
                     {"premium_focus", a.premium_focus},
                     {"performance_focus", a.performance_focus},
                     {"ethics_focus", a.ethics_focus},
                     {"rationale", a.rationale}};
}

inline void from_json(const nlohmann::json& j, BuyerArchetype& a) {
  j.at("buyer_id").get_to(a.buyer_id);
  j.at("cluster_id").get_to(a.cluster_id);
  a.price_tier = price_tier_from_string(j.at("price_tier").get<std::string>());
  j.at("price_gap").get_to(a.price_gap);
  j.at("exploration_score").get_to(a.exploration_score);
  a.exploration_regime =
      exploration_regime_from_string(j.at("exploration_regime").get<std::string>());
  j.at("premium_focus").get_to(a.premium_focus);
  j.at("performance_focus").get_to(a.performance_focus);
  j.at("ethics_focus").get_to(a.ethics_focus);
  j.at("rationale").get_to(a.rationale);
}

inline void to_json(nlohmann::json& j, const Persona& p) {
  j = nlohmann::json{{"persona_id", p.persona_id},
                     {"shop_id", p.shop_id},
                     {"intent", p.intent},
                     {"archetype", p.archetype},
                     {"cluster_preferences", p.cluster_preferences},
                     {"prompt", p.prompt}};
}

inline void from_json(const nlohmann::json& j, Persona& p) {
  j.at("persona_id").get_to(p.persona_id);
  j.at("shop_id").get_to(p.shop_id);
  j.at("intent").get_to(p.intent);
  j.at("archetype").get_to(p.archetype);
  j.at("cluster_preferences").get_to(p.cluster_preferences);
  j.at("prompt").get_to(p.prompt);
}

} // namespace simgym
