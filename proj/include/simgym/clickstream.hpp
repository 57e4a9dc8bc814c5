#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "simgym/errors.hpp"

namespace simgym {

enum class EventKind {
  page_view,
  product_view,
  search,
  add_to_cart,
  checkout_start,
  purchase,
};

inline const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::page_view: return "page_view";
    case EventKind::product_view: return "product_view";
    case EventKind::search: return "search";
    case EventKind::add_to_cart: return "add_to_cart";
    case EventKind::checkout_start: return "checkout_start";
    case EventKind::purchase: return "purchase";
  }
  return "?";
}

inline std::optional<EventKind> parse_event_kind(const std::string& s) {
  if (s == "page_view") return EventKind::page_view;
  if (s == "product_view") return EventKind::product_view;
  if (s == "search") return EventKind::search;
  if (s == "add_to_cart") return EventKind::add_to_cart;
  if (s == "checkout_start") return EventKind::checkout_start;
  if (s == "purchase") return EventKind::purchase;
  return std::nullopt;
}

inline bool requires_product_ref(EventKind kind) {
  return kind == EventKind::product_view || kind == EventKind::add_to_cart ||
         kind == EventKind::purchase;
}

struct Event {
  std::string session_id;
  std::string buyer_id;
  std::string shop_id;
  std::int64_t ts_ms = 0;
  EventKind kind = EventKind::page_view;
  std::optional<std::string> product_ref;
  std::optional<double> value;

  bool operator==(const Event&) const = default;
};

struct Session {
  std::string id;
  std::string shop_id;
  std::string buyer_id;
  std::vector<Event> events; // non-empty, sorted by ts_ms ascending

  bool operator==(const Session&) const = default;
};

// The ten Stage-1 behavioral features, in canonical column order.
struct SessionFeatures {
  double duration_s = 0.0;
  int event_count = 0;
  int product_views = 0;
  int distinct_products = 0;
  int search_count = 0;
  int a2c = 0;
  int checkout = 0;
  int purchase = 0;
  double cart_value = 0.0;  // max value seen on add_to_cart events
  double order_value = 0.0; // max value seen on purchase events

  static constexpr int kDim = 10;

  static const std::array<const char*, kDim>& column_names() {
    static const std::array<const char*, kDim> names = {
        "duration_s", "event_count", "product_views", "distinct_products", "search_count",
        "a2c",        "checkout",    "purchase",      "cart_value",        "order_value"};
    return names;
  }

  std::array<double, kDim> as_row() const {
    return {duration_s,
            static_cast<double>(event_count),
            static_cast<double>(product_views),
            static_cast<double>(distinct_products),
            static_cast<double>(search_count),
            static_cast<double>(a2c),
            static_cast<double>(checkout),
            static_cast<double>(purchase),
            cart_value,
            order_value};
  }

  bool operator==(const SessionFeatures&) const = default;
};

namespace detail {

inline Event parse_event_line(const std::string& line, std::size_t line_no) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw MalformedLine(line_no, e.what());
  }
  if (!j.is_object()) throw MalformedLine(line_no, "event record must be a JSON object");

  auto require = [&](const char* key) -> const nlohmann::json& {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) throw MissingField(key, line_no);
    return *it;
  };

  Event e;
  try {
    e.session_id = require("session_id").get<std::string>();
    e.buyer_id = require("buyer_id").get<std::string>();
    e.shop_id = require("shop_id").get<std::string>();
    e.ts_ms = require("ts_ms").get<std::int64_t>();
    const std::string kind_str = require("kind").get<std::string>();
    const auto kind = parse_event_kind(kind_str);
    if (!kind) throw MalformedLine(line_no, "unknown event kind '" + kind_str + "'");
    e.kind = *kind;
    if (j.contains("product_ref") && !j["product_ref"].is_null())
      e.product_ref = j["product_ref"].get<std::string>();
    if (j.contains("value") && !j["value"].is_null()) e.value = j["value"].get<double>();
  } catch (const nlohmann::json::exception& ex) {
    throw MalformedLine(line_no, ex.what());
  }

  if (e.ts_ms < 0) throw MalformedLine(line_no, "ts_ms must be >= 0");
  if (e.value && *e.value < 0.0) throw MalformedLine(line_no, "value must be >= 0");
  if (requires_product_ref(e.kind) && !e.product_ref) throw MissingField("product_ref", line_no);
  return e;
}

} // namespace detail

// Parses newline-delimited event records into sessions. Events are grouped by
// session_id and time-ordered within each session; sessions are returned
// ordered by (shop_id, session_id). Fails fast on any malformed record.
inline std::vector<Session> parse_clickstream(std::istream& in) {
  std::map<std::string, Session> by_session;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    Event e = detail::parse_event_line(line, line_no);
    auto [it, inserted] = by_session.try_emplace(e.session_id);
    Session& s = it->second;
    if (inserted) {
      s.id = e.session_id;
      s.shop_id = e.shop_id;
      s.buyer_id = e.buyer_id;
    } else if (s.shop_id != e.shop_id) {
      throw MalformedLine(line_no, "session '" + e.session_id + "' spans multiple shop_ids");
    }
    s.events.push_back(std::move(e));
  }

  std::vector<Session> sessions;
  sessions.reserve(by_session.size());
  for (auto& [id, s] : by_session) {
    std::stable_sort(s.events.begin(), s.events.end(),
                     [](const Event& a, const Event& b) { return a.ts_ms < b.ts_ms; });
    sessions.push_back(std::move(s));
  }
  std::sort(sessions.begin(), sessions.end(), [](const Session& a, const Session& b) {
    return std::tie(a.shop_id, a.id) < std::tie(b.shop_id, b.id);
  });
  return sessions;
}

inline std::vector<Session> parse_clickstream(const std::string& text) {
  std::istringstream in(text);
  return parse_clickstream(in);
}

inline nlohmann::json event_to_json(const Event& e) {
  nlohmann::json j{{"session_id", e.session_id},
                   {"buyer_id", e.buyer_id},
                   {"shop_id", e.shop_id},
                   {"ts_ms", e.ts_ms},
                   {"kind", to_string(e.kind)}};
  if (e.product_ref) j["product_ref"] = *e.product_ref;
  if (e.value) j["value"] = *e.value;
  return j;
}

inline void serialize_clickstream(std::ostream& out, const std::vector<Session>& sessions) {
  for (const Session& s : sessions)
    for (const Event& e : s.events) out << event_to_json(e).dump() << '\n';
}

inline std::string serialize_clickstream(const std::vector<Session>& sessions) {
  std::ostringstream out;
  serialize_clickstream(out, sessions);
  return out.str();
}

inline SessionFeatures featurize(const Session& session) {
  SessionFeatures f;
  f.event_count = static_cast<int>(session.events.size());
  if (!session.events.empty())
    f.duration_s =
        static_cast<double>(session.events.back().ts_ms - session.events.front().ts_ms) / 1000.0;

  std::set<std::string> distinct;
  for (const Event& e : session.events) {
    switch (e.kind) {
      case EventKind::page_view:
        break;
      case EventKind::product_view:
        ++f.product_views;
        if (e.product_ref) distinct.insert(*e.product_ref);
        break;
      case EventKind::search:
        ++f.search_count;
        break;
      case EventKind::add_to_cart:
        f.a2c = 1;
        if (e.value) f.cart_value = std::max(f.cart_value, *e.value);
        break;
      case EventKind::checkout_start:
        f.checkout = 1;
        break;
      case EventKind::purchase:
        f.purchase = 1;
        if (e.value) f.order_value = std::max(f.order_value, *e.value);
        break;
    }
  }
  f.distinct_products = static_cast<int>(distinct.size());
  return f;
}

inline bool session_has_a2c(const Session& s) {
  for (const Event& e : s.events)
    if (e.kind == EventKind::add_to_cart) return true;
  return false;
}

inline double a2c_rate(const std::vector<Session>& sessions) {
  if (sessions.empty()) throw EmptyInput("a2c_rate: no sessions");
  std::size_t hits = 0;
  for (const Session& s : sessions)
    if (session_has_a2c(s)) ++hits;
  return static_cast<double>(hits) / static_cast<double>(sessions.size());
}

namespace detail {
inline std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}
} // namespace detail

// Feature export: one CSV row per session, session_id first, then the ten
// feature columns in canonical order.
inline void write_features_csv(std::ostream& out, const std::vector<Session>& sessions) {
  out << "session_id";
  for (const char* name : SessionFeatures::column_names()) out << ',' << name;
  out << '\n';
  for (const Session& s : sessions) {
    const SessionFeatures f = featurize(s);
    out << s.id;
    for (double v : f.as_row()) out << ',' << detail::format_double(v);
    out << '\n';
  }
}

} // namespace simgym
