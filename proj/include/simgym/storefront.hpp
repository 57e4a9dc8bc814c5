#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "simgym/catalog.hpp"
#include "simgym/clickstream.hpp"
#include "simgym/errors.hpp"

namespace simgym {

enum class Variant { control, treatment };

inline const char* to_string(Variant v) {
  return v == Variant::control ? "control" : "treatment";
}

inline Variant variant_from_string(const std::string& s) {
  if (s == "control") return Variant::control;
  if (s == "treatment") return Variant::treatment;
  throw ConfigError("unknown variant '" + s + "'");
}

// The parametric stand-in for theme differences: the two variants of a shop
// share the catalog and differ only in these presentation knobs.
struct VariantParams {
  std::vector<std::string> featured_products; // ordered home-page slots
  double layout_density = 0.5;                // scales how many slots render
  double trust_cue_level = 0.5;               // >= 0.5 shows trust badges
  double image_quality = 0.5;                 // bucketed low/medium/high
  int nav_depth = 1;                          // nav nesting levels

  bool operator==(const VariantParams&) const = default;
};

struct StoreSpec {
  std::string shop_id;
  ProductCatalog catalog;
  std::map<std::string, std::vector<std::string>> collections;
  VariantParams variant_params;

  static constexpr int kFeaturedSlots = 8;

  int featured_count() const {
    const int by_density =
        static_cast<int>(std::ceil(variant_params.layout_density * kFeaturedSlots));
    return std::clamp(by_density, 0, static_cast<int>(variant_params.featured_products.size()));
  }
};

struct StorePair {
  StoreSpec control;
  StoreSpec treatment;

  const StoreSpec& get(Variant v) const { return v == Variant::control ? control : treatment; }
};

enum class PageKind { home, collection, product, search_results, cart };

inline const char* to_string(PageKind k) {
  switch (k) {
    case PageKind::home: return "home";
    case PageKind::collection: return "collection";
    case PageKind::product: return "product";
    case PageKind::search_results: return "search_results";
    case PageKind::cart: return "cart";
  }
  return "?";
}

// The routing context (kind, collection/product/query) is a pure function of
// the url; the cart rides along as session state.
struct PageState {
  std::string url = "/";
  PageKind kind = PageKind::home;
  std::string collection;
  std::string product_ref;
  std::string query;
  std::vector<std::string> cart;

  bool operator==(const PageState&) const = default;
};

enum class AxRole { heading, link, button, text, list, listitem, image_desc };

inline const char* to_string(AxRole r) {
  switch (r) {
    case AxRole::heading: return "heading";
    case AxRole::link: return "link";
    case AxRole::button: return "button";
    case AxRole::text: return "text";
    case AxRole::list: return "list";
    case AxRole::listitem: return "listitem";
    case AxRole::image_desc: return "image_desc";
  }
  return "?";
}

struct AxNode {
  AxRole role = AxRole::text;
  std::string name;
  int ref_id = 0; // unique per page, assigned in depth-first order from 1
  std::vector<AxNode> children;

  bool operator==(const AxNode&) const = default;
};

enum class ActionKind { click, navigate, search, add_to_cart, go_back, terminate };

inline const char* to_string(ActionKind k) {
  switch (k) {
    case ActionKind::click: return "click";
    case ActionKind::navigate: return "navigate";
    case ActionKind::search: return "search";
    case ActionKind::add_to_cart: return "add_to_cart";
    case ActionKind::go_back: return "go_back";
    case ActionKind::terminate: return "terminate";
  }
  return "?";
}

inline ActionKind action_kind_from_string(const std::string& s) {
  if (s == "click") return ActionKind::click;
  if (s == "navigate") return ActionKind::navigate;
  if (s == "search") return ActionKind::search;
  if (s == "add_to_cart") return ActionKind::add_to_cart;
  if (s == "go_back") return ActionKind::go_back;
  if (s == "terminate") return ActionKind::terminate;
  throw ConfigError("unknown action kind '" + s + "'");
}

struct Action {
  ActionKind kind = ActionKind::terminate;
  std::optional<int> target_ref; // required for click / add_to_cart
  std::optional<std::string> args; // search query or navigate path

  bool operator==(const Action&) const = default;
};

enum class TransitionOutcome { ok, execution_error };

struct TransitionResult {
  TransitionOutcome outcome = TransitionOutcome::ok;
  PageState new_state;
  std::optional<std::string> error_detail;
  std::vector<EventKind> emitted_events;
};

// --- url routing: /, /collections/<name>, /products/<ref>, /search?q=<q>, /cart ---

namespace detail {

inline std::string url_encode(const std::string& s) {
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out += static_cast<char>(c);
    } else {
      char buf[4];
      std::snprintf(buf, sizeof(buf), "%%%02X", c);
      out += buf;
    }
  }
  return out;
}

inline std::string url_decode(const std::string& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%' && i + 2 < s.size()) {
      out += static_cast<char>(std::stoi(s.substr(i + 1, 2), nullptr, 16));
      i += 2;
    } else {
      out += s[i];
    }
  }
  return out;
}

} // namespace detail

inline std::string collection_url(const std::string& name) {
  return "/collections/" + detail::url_encode(name);
}

inline std::string product_url(const std::string& ref) {
  return "/products/" + detail::url_encode(ref);
}

inline std::string search_url(const std::string& query) {
  return "/search?q=" + detail::url_encode(query);
}

inline PageState home_state() {
  return PageState{};
}

// Resolves a path to a routing state (cart contents are not part of routing).
// Throws InvalidState for paths that do not exist on this store.
inline PageState parse_url(const StoreSpec& spec, const std::string& url) {
  PageState state;
  state.url = url;
  if (url == "/") {
    state.kind = PageKind::home;
    return state;
  }
  if (url == "/cart") {
    state.kind = PageKind::cart;
    return state;
  }
  if (url.rfind("/collections/", 0) == 0) {
    state.kind = PageKind::collection;
    state.collection = detail::url_decode(url.substr(13));
    if (!spec.collections.count(state.collection))
      throw InvalidState("unknown collection '" + state.collection + "'");
    return state;
  }
  if (url.rfind("/products/", 0) == 0) {
    state.kind = PageKind::product;
    state.product_ref = detail::url_decode(url.substr(10));
    if (!spec.catalog.contains(state.product_ref))
      throw InvalidState("unknown product '" + state.product_ref + "'");
    return state;
  }
  if (url.rfind("/search?q=", 0) == 0) {
    state.kind = PageKind::search_results;
    state.query = detail::url_decode(url.substr(10));
    return state;
  }
  throw InvalidState("unroutable url '" + url + "'");
}

// --- store-spec document ---

namespace detail {

inline VariantParams parse_variant_params(const nlohmann::json& j) {
  VariantParams p;
  if (j.contains("featured_products")) j.at("featured_products").get_to(p.featured_products);
  if (j.contains("layout_density")) j.at("layout_density").get_to(p.layout_density);
  if (j.contains("trust_cue_level")) j.at("trust_cue_level").get_to(p.trust_cue_level);
  if (j.contains("image_quality")) j.at("image_quality").get_to(p.image_quality);
  if (j.contains("nav_depth")) j.at("nav_depth").get_to(p.nav_depth);
  for (double v : {p.layout_density, p.trust_cue_level, p.image_quality})
    if (v < 0.0 || v > 1.0)
      throw SchemaViolation("variant scalar parameters must lie in [0,1]");
  if (p.nav_depth < 1 || p.nav_depth > 8)
    throw SchemaViolation("nav_depth must lie in [1,8]");
  return p;
}

inline void validate_spec(const StoreSpec& spec) {
  if (spec.shop_id.empty()) throw SchemaViolation("store spec needs a shop_id");
  for (const auto& ref : spec.variant_params.featured_products)
    if (!spec.catalog.contains(ref))
      throw SchemaViolation("featured product '" + ref + "' not in catalog");
  for (const auto& [name, refs] : spec.collections) {
    if (refs.empty()) throw SchemaViolation("collection '" + name + "' is empty");
    for (const auto& ref : refs)
      if (!spec.catalog.contains(ref))
        throw SchemaViolation("collection '" + name + "' references unknown product '" + ref + "'");
  }
}

} // namespace detail

// Loads the paired control/treatment store document. Both variants must share
// the catalog and collections bit-for-bit; they may differ only in
// variant_params.
inline StorePair load_store_spec(const nlohmann::json& doc) {
  if (!doc.is_object()) throw SchemaViolation("store spec must be a JSON object");
  if (!doc.contains("shop_id")) throw SchemaViolation("store spec needs a shop_id");
  if (!doc.contains("control") || !doc.contains("treatment"))
    throw SchemaViolation("store spec needs control and treatment blocks");

  auto variant_catalog = [&](const char* key) -> std::vector<Product> {
    if (doc.at(key).contains("products"))
      return doc.at(key).at("products").get<std::vector<Product>>();
    if (doc.contains("products")) return doc.at("products").get<std::vector<Product>>();
    throw SchemaViolation("no products for variant block '" + std::string(key) + "'");
  };
  auto variant_collections = [&](const char* key) {
    std::map<std::string, std::vector<std::string>> out;
    if (doc.at(key).contains("collections"))
      doc.at(key).at("collections").get_to(out);
    else if (doc.contains("collections"))
      doc.at("collections").get_to(out);
    return out;
  };

  const auto control_products = variant_catalog("control");
  const auto treatment_products = variant_catalog("treatment");
  if (control_products != treatment_products)
    throw CatalogMismatch("control and treatment catalogs differ for shop '" +
                          doc.at("shop_id").get<std::string>() + "'");
  const auto control_collections = variant_collections("control");
  if (control_collections != variant_collections("treatment"))
    throw CatalogMismatch("control and treatment collections differ");

  StorePair pair;
  for (auto* side : {&pair.control, &pair.treatment}) {
    side->shop_id = doc.at("shop_id").get<std::string>();
    side->catalog = ProductCatalog(control_products);
    side->collections = control_collections;
  }
  try {
    pair.control.variant_params = detail::parse_variant_params(doc.at("control"));
    pair.treatment.variant_params = detail::parse_variant_params(doc.at("treatment"));
  } catch (const nlohmann::json::exception& e) {
    throw SchemaViolation(std::string("variant params: ") + e.what());
  }
  detail::validate_spec(pair.control);
  detail::validate_spec(pair.treatment);
  return pair;
}

// --- accessibility-tree rendering ---

// Semantic target behind an actionable node; execute() resolves clicks
// through this map rather than re-parsing node names.
struct NodeTarget {
  enum class Kind { navigate, add_to_cart, checkout } kind = Kind::navigate;
  std::string value; // url for navigate, product_ref for add_to_cart
};

struct RenderedPage {
  AxNode root;
  std::map<int, NodeTarget> targets;
};

namespace detail {

inline std::string money(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "$%.2f", v);
  return buf;
}

inline std::string image_descriptor(double image_quality) {
  if (image_quality < 1.0 / 3.0) return "Low-resolution product photo";
  if (image_quality < 2.0 / 3.0) return "Standard product photo";
  return "High-resolution studio product photo";
}

inline std::string rating_text(double quality_score) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "Rating: %.1f out of 5", 1.0 + 4.0 * quality_score);
  return buf;
}

class PageBuilder {
public:
  explicit PageBuilder(RenderedPage& page) : page_(page) {}

  AxNode make(AxRole role, std::string name) {
    return AxNode{role, std::move(name), next_id_++, {}};
  }

  AxNode link(std::string name, const std::string& url) {
    AxNode n = make(AxRole::link, std::move(name));
    page_.targets[n.ref_id] = NodeTarget{NodeTarget::Kind::navigate, url};
    return n;
  }

  AxNode add_to_cart_button(const std::string& product_ref) {
    AxNode n = make(AxRole::button, "Add to cart");
    page_.targets[n.ref_id] = NodeTarget{NodeTarget::Kind::add_to_cart, product_ref};
    return n;
  }

  AxNode checkout_button() {
    AxNode n = make(AxRole::button, "Checkout");
    page_.targets[n.ref_id] = NodeTarget{NodeTarget::Kind::checkout, ""};
    return n;
  }

private:
  RenderedPage& page_;
  int next_id_ = 1;
};

inline AxNode product_listing(PageBuilder& b, const Product& p) {
  AxNode li = b.make(AxRole::listitem, "");
  li.children.push_back(b.link(p.name, product_url(p.product_ref)));
  li.children.push_back(b.make(AxRole::text, money(p.price)));
  return li;
}

// Rewrites ref_ids into depth-first preorder starting at 1 and remaps the
// target annotations; construction order is not guaranteed to be preorder.
inline void renumber_preorder(RenderedPage& page) {
  std::map<int, int> remap;
  int next = 1;
  std::function<void(AxNode&)> walk = [&](AxNode& n) {
    remap[n.ref_id] = next;
    n.ref_id = next++;
    for (auto& c : n.children) walk(c);
  };
  walk(page.root);
  std::map<int, NodeTarget> targets;
  for (const auto& [old_id, target] : page.targets) {
    const auto it = remap.find(old_id);
    if (it != remap.end()) targets[it->second] = target;
  }
  page.targets = std::move(targets);
}

inline bool product_matches_query(const Product& p, const std::string& query_lower) {
  std::string haystack = p.name + " " + p.category;
  for (const auto& kw : p.keywords) haystack += " " + kw;
  std::transform(haystack.begin(), haystack.end(), haystack.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  // token-AND: every query token must appear somewhere
  std::string token;
  std::istringstream qs(query_lower);
  while (qs >> token)
    if (haystack.find(token) == std::string::npos) return false;
  return true;
}

} // namespace detail

inline RenderedPage render_page(const StoreSpec& spec, const PageState& state) {
  RenderedPage page;
  detail::PageBuilder b(page);

  switch (state.kind) {
    case PageKind::home: {
      AxNode root = b.make(AxRole::heading, spec.shop_id);
      if (spec.variant_params.trust_cue_level >= 0.5) {
        AxNode badges = b.make(AxRole::list, "Why shop with us");
        badges.children.push_back(b.make(AxRole::text, "Secure checkout"));
        badges.children.push_back(b.make(AxRole::text, "Free 30-day returns"));
        badges.children.push_back(b.make(AxRole::text, "Rated 4.8 by 10,000+ customers"));
        root.children.push_back(std::move(badges));
      }

      AxNode nav = b.make(AxRole::list, "Collections");
      for (const auto& [name, refs] : spec.collections) {
        // nav_depth - 1 wrapper levels around each collection link
        AxNode leaf = b.link(name, collection_url(name));
        for (int level = 1; level < spec.variant_params.nav_depth; ++level) {
          AxNode wrap = b.make(AxRole::listitem, "");
          wrap.children.push_back(std::move(leaf));
          AxNode inner = b.make(AxRole::list, "");
          inner.children.push_back(std::move(wrap));
          leaf = std::move(inner);
        }
        AxNode item = b.make(AxRole::listitem, "");
        item.children.push_back(std::move(leaf));
        nav.children.push_back(std::move(item));
      }
      root.children.push_back(std::move(nav));

      AxNode featured = b.make(AxRole::list, "Featured products");
      const int count = spec.featured_count();
      for (int i = 0; i < count; ++i)
        featured.children.push_back(
            detail::product_listing(b, spec.catalog.at(spec.variant_params.featured_products[i])));
      root.children.push_back(std::move(featured));
      root.children.push_back(b.link("Cart", "/cart"));
      page.root = std::move(root);
      break;
    }
    case PageKind::collection: {
      auto it = spec.collections.find(state.collection);
      if (it == spec.collections.end())
        throw InvalidState("unknown collection '" + state.collection + "'");
      AxNode root = b.make(AxRole::heading, state.collection);
      root.children.push_back(b.link("Home", "/"));
      AxNode items = b.make(AxRole::list, "Products");
      for (const auto& ref : it->second)
        items.children.push_back(detail::product_listing(b, spec.catalog.at(ref)));
      root.children.push_back(std::move(items));
      page.root = std::move(root);
      break;
    }
    case PageKind::product: {
      const Product& p = spec.catalog.at(state.product_ref); // throws on unknown ref
      AxNode root = b.make(AxRole::heading, p.name);
      root.children.push_back(b.link("Home", "/"));
      root.children.push_back(b.make(AxRole::text, detail::money(p.price)));
      root.children.push_back(b.make(
          AxRole::text, "Compare at " + detail::money(spec.catalog.category_median(p.category))));
      root.children.push_back(
          b.make(AxRole::image_desc, detail::image_descriptor(spec.variant_params.image_quality)));
      root.children.push_back(b.make(AxRole::text, detail::rating_text(p.quality_score)));
      if (!p.keywords.empty()) {
        AxNode kws = b.make(AxRole::list, "Highlights");
        for (const auto& kw : p.keywords) kws.children.push_back(b.make(AxRole::text, kw));
        root.children.push_back(std::move(kws));
      }
      root.children.push_back(b.add_to_cart_button(p.product_ref));
      page.root = std::move(root);
      break;
    }
    case PageKind::search_results: {
      std::string q = state.query;
      std::transform(q.begin(), q.end(), q.begin(),
                     [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
      AxNode root = b.make(AxRole::heading, "Search results for \"" + state.query + "\"");
      root.children.push_back(b.link("Home", "/"));
      AxNode items = b.make(AxRole::list, "Results");
      for (const Product& p : spec.catalog.products())
        if (detail::product_matches_query(p, q)) items.children.push_back(detail::product_listing(b, p));
      if (items.children.empty()) root.children.push_back(b.make(AxRole::text, "No results"));
      root.children.push_back(std::move(items));
      page.root = std::move(root);
      break;
    }
    case PageKind::cart: {
      AxNode root = b.make(AxRole::heading, "Cart");
      root.children.push_back(b.link("Home", "/"));
      if (state.cart.empty()) {
        root.children.push_back(b.make(AxRole::text, "Cart is empty"));
      } else {
        AxNode items = b.make(AxRole::list, "Cart items");
        for (const auto& ref : state.cart) {
          const Product& p = spec.catalog.at(ref);
          AxNode li = b.make(AxRole::listitem, "");
          li.children.push_back(b.make(AxRole::text, p.name));
          li.children.push_back(b.make(AxRole::text, detail::money(p.price)));
          items.children.push_back(std::move(li));
        }
        root.children.push_back(std::move(items));
        root.children.push_back(b.checkout_button());
      }
      page.root = std::move(root);
      break;
    }
  }
  detail::renumber_preorder(page);
  return page;
}

inline AxNode render_ax_tree(const StoreSpec& spec, const PageState& state) {
  return render_page(spec, state).root;
}

// --- transitions ---

inline constexpr std::size_t kHistoryLimit = 50;

namespace detail {

inline TransitionResult error_result(const PageState& state, std::string detail_text) {
  TransitionResult r;
  r.outcome = TransitionOutcome::execution_error;
  r.new_state = state;
  r.error_detail = std::move(detail_text);
  return r;
}

inline EventKind landing_event(const PageState& state) {
  return state.kind == PageKind::product ? EventKind::product_view : EventKind::page_view;
}

inline void push_history(std::vector<PageState>* history, const PageState& state) {
  if (history == nullptr) return;
  history->push_back(state);
  if (history->size() > kHistoryLimit) history->erase(history->begin());
}

} // namespace detail

// Executes one action against the current state. Failures never throw; they
// surface as execution_error results with the state unchanged. `history`
// backs go_back and is pushed on every successful forward navigation.
inline TransitionResult execute(const StoreSpec& spec, const PageState& state,
                                const Action& action,
                                std::vector<PageState>* history = nullptr) {
  TransitionResult result;
  result.new_state = state;

  auto navigate_to = [&](const std::string& url) -> TransitionResult {
    PageState next;
    try {
      next = parse_url(spec, url);
    } catch (const InvalidState& e) {
      return detail::error_result(state, e.what());
    }
    next.cart = state.cart;
    detail::push_history(history, state);
    TransitionResult r;
    r.new_state = std::move(next);
    r.emitted_events.push_back(detail::landing_event(r.new_state));
    return r;
  };

  switch (action.kind) {
    case ActionKind::terminate:
      return result; // no-op; the session runner intercepts terminate decisions

    case ActionKind::navigate:
      if (!action.args) return detail::error_result(state, "navigate requires a path argument");
      return navigate_to(*action.args);

    case ActionKind::search: {
      if (!action.args || action.args->empty())
        return detail::error_result(state, "search requires a query argument");
      PageState next;
      next.kind = PageKind::search_results;
      next.query = *action.args;
      next.url = search_url(*action.args);
      next.cart = state.cart;
      detail::push_history(history, state);
      result.new_state = std::move(next);
      result.emitted_events.push_back(EventKind::search);
      return result;
    }

    case ActionKind::go_back: {
      if (history == nullptr || history->empty())
        return detail::error_result(state, "no history to go back to");
      PageState previous = history->back();
      history->pop_back();
      previous.cart = state.cart; // the cart never rolls back
      result.new_state = std::move(previous);
      result.emitted_events.push_back(detail::landing_event(result.new_state));
      return result;
    }

    case ActionKind::click:
    case ActionKind::add_to_cart: {
      if (!action.target_ref)
        return detail::error_result(state, std::string(to_string(action.kind)) +
                                               " requires a target_ref");
      const RenderedPage page = render_page(spec, state);
      const auto it = page.targets.find(*action.target_ref);
      if (it == page.targets.end())
        return detail::error_result(state, "no actionable element with ref " +
                                               std::to_string(*action.target_ref));
      const NodeTarget& target = it->second;

      if (action.kind == ActionKind::add_to_cart &&
          target.kind != NodeTarget::Kind::add_to_cart)
        return detail::error_result(state, "target ref " + std::to_string(*action.target_ref) +
                                               " is not an add-to-cart button");

      switch (target.kind) {
        case NodeTarget::Kind::navigate:
          return navigate_to(target.value);
        case NodeTarget::Kind::add_to_cart: {
          result.new_state.cart.push_back(target.value);
          result.emitted_events.push_back(EventKind::add_to_cart);
          return result;
        }
        case NodeTarget::Kind::checkout: {
          result.emitted_events.push_back(EventKind::checkout_start);
          return result;
        }
      }
      return detail::error_result(state, "unhandled target kind");
    }
  }
  return detail::error_result(state, "unhandled action kind");
}

inline double cart_total(const StoreSpec& spec, const std::vector<std::string>& cart) {
  double total = 0.0;
  for (const auto& ref : cart) total += spec.catalog.at(ref).price;
  return total;
}

// --- JSON for observation/action records ---

inline void to_json(nlohmann::json& j, const AxNode& n) {
  j = nlohmann::json{{"role", to_string(n.role)}, {"name", n.name}, {"ref_id", n.ref_id}};
  if (!n.children.empty()) j["children"] = n.children;
}

inline void to_json(nlohmann::json& j, const Action& a) {
  j = nlohmann::json{{"kind", to_string(a.kind)}};
  if (a.target_ref) j["target_ref"] = *a.target_ref;
  if (a.args) j["args"] = *a.args;
}

inline void from_json(const nlohmann::json& j, Action& a) {
  a.kind = action_kind_from_string(j.at("kind").get<std::string>());
  if (j.contains("target_ref") && !j["target_ref"].is_null())
    a.target_ref = j["target_ref"].get<int>();
  if (j.contains("args") && !j["args"].is_null()) a.args = j["args"].get<std::string>();
}

} // namespace simgym
