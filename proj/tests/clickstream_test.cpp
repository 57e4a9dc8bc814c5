#include "simgym/clickstream.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

using namespace simgym;

namespace {

std::string line(const std::string& sid, const std::string& bid, const std::string& shop,
                 std::int64_t ts, const std::string& kind, const std::string& ref = "",
                 double value = -1.0) {
  nlohmann::json j{{"session_id", sid}, {"buyer_id", bid}, {"shop_id", shop},
                   {"ts_ms", ts},       {"kind", kind}};
  if (!ref.empty()) j["product_ref"] = ref;
  if (value >= 0.0) j["value"] = value;
  return j.dump() + "\n";
}

TEST(ParseClickstream, EmptyStreamYieldsEmptyList) {
  EXPECT_TRUE(parse_clickstream(std::string{}).empty());
}

TEST(ParseClickstream, GroupsAndOrdersOneSession) {
  std::string text = line("s1", "b1", "shop1", 2000, "product_view", "p1") +
                     line("s1", "b1", "shop1", 1000, "page_view") +
                     line("s1", "b1", "shop1", 3000, "add_to_cart", "p1", 19.0);
  auto sessions = parse_clickstream(text);
  ASSERT_EQ(sessions.size(), 1u);
  const Session& s = sessions[0];
  EXPECT_EQ(s.id, "s1");
  EXPECT_EQ(s.shop_id, "shop1");
  ASSERT_EQ(s.events.size(), 3u);
  EXPECT_EQ(s.events[0].kind, EventKind::page_view);
  EXPECT_EQ(s.events[1].kind, EventKind::product_view);
  EXPECT_EQ(s.events[2].kind, EventKind::add_to_cart);
}

TEST(ParseClickstream, MissingKindReportsFieldAndLine) {
  std::string text = line("s1", "b1", "shop1", 0, "page_view");
  text += R"({"session_id":"s1","buyer_id":"b1","shop_id":"shop1","ts_ms":5})"
          "\n";
  try {
    parse_clickstream(text);
    FAIL() << "expected MissingField";
  } catch (const MissingField& e) {
    EXPECT_EQ(e.field, "kind");
    EXPECT_EQ(e.line_no, 2u);
  }
}

TEST(ParseClickstream, UnknownKindIsParseError) {
  EXPECT_THROW(parse_clickstream(line("s1", "b1", "shop1", 0, "hover")), MalformedLine);
}

TEST(ParseClickstream, ProductRefRequiredForProductEvents) {
  EXPECT_THROW(parse_clickstream(line("s1", "b1", "shop1", 0, "product_view")), MissingField);
  EXPECT_THROW(parse_clickstream(line("s1", "b1", "shop1", 0, "purchase")), MissingField);
}

TEST(ParseClickstream, NegativeValueRejected) {
  std::string text =
      R"({"session_id":"s1","buyer_id":"b1","shop_id":"x","ts_ms":0,"kind":"add_to_cart","product_ref":"p","value":-1})"
      "\n";
  EXPECT_THROW(parse_clickstream(text), MalformedLine);
}

TEST(ParseClickstream, UndecodableLineRejected) {
  EXPECT_THROW(parse_clickstream(std::string("{not json\n")), MalformedLine);
}

TEST(ParseClickstream, SessionSpanningTwoShopsRejected) {
  std::string text = line("s1", "b1", "shopA", 0, "page_view") +
                     line("s1", "b1", "shopB", 1, "page_view");
  EXPECT_THROW(parse_clickstream(text), MalformedLine);
}

TEST(ParseClickstream, SessionsOrderedByShopThenId) {
  std::string text = line("s2", "b", "shopB", 0, "page_view") +
                     line("s9", "b", "shopA", 0, "page_view") +
                     line("s1", "b", "shopA", 0, "page_view");
  auto sessions = parse_clickstream(text);
  ASSERT_EQ(sessions.size(), 3u);
  EXPECT_EQ(sessions[0].id, "s1");
  EXPECT_EQ(sessions[1].id, "s9");
  EXPECT_EQ(sessions[2].id, "s2");
}

TEST(ParseClickstream, RoundTripIsIdentity) {
  std::string text = line("s1", "b1", "shop1", 0, "page_view") +
                     line("s1", "b1", "shop1", 500, "search") +
                     line("s2", "b2", "shop1", 100, "product_view", "p1") +
                     line("s2", "b2", "shop1", 900, "purchase", "p1", 55.0);
  auto sessions = parse_clickstream(text);
  auto again = parse_clickstream(serialize_clickstream(sessions));
  EXPECT_EQ(sessions, again);
}

TEST(ParseClickstream, ShuffledLinesYieldIdenticalFeatures) {
  std::vector<std::string> lines;
  for (int i = 0; i < 8; ++i)
    lines.push_back(line("s1", "b1", "shop1", 1000 * i, i % 2 ? "search" : "page_view"));
  lines.push_back(line("s1", "b1", "shop1", 9000, "add_to_cart", "p1", 12.0));
  lines.push_back(line("s2", "b2", "shop1", 0, "product_view", "p2"));

  auto join = [](const std::vector<std::string>& ls) {
    std::string out;
    for (const auto& l : ls) out += l;
    return out;
  };
  auto base = parse_clickstream(join(lines));

  std::mt19937 shuffle_rng(7);
  auto shuffled = lines;
  for (int round = 0; round < 5; ++round) {
    std::shuffle(shuffled.begin(), shuffled.end(), shuffle_rng);
    auto sessions = parse_clickstream(join(shuffled));
    ASSERT_EQ(sessions.size(), base.size());
    for (std::size_t i = 0; i < base.size(); ++i)
      EXPECT_EQ(featurize(sessions[i]), featurize(base[i]));
  }
}

TEST(Featurize, MinimalSessionIsAllZero) {
  Session s{"s1", "shop1", "b1", {Event{"s1", "b1", "shop1", 0, EventKind::page_view, {}, {}}}};
  SessionFeatures f = featurize(s);
  EXPECT_DOUBLE_EQ(f.duration_s, 0.0);
  EXPECT_EQ(f.event_count, 1);
  EXPECT_EQ(f.product_views, 0);
  EXPECT_EQ(f.distinct_products, 0);
  EXPECT_EQ(f.search_count, 0);
  EXPECT_EQ(f.a2c, 0);
  EXPECT_EQ(f.checkout, 0);
  EXPECT_EQ(f.purchase, 0);
  EXPECT_DOUBLE_EQ(f.cart_value, 0.0);
  EXPECT_DOUBLE_EQ(f.order_value, 0.0);
}

TEST(Featurize, HandComputedFixture) {
  // 2 product_views of the same product + 1 search + 1 add_to_cart(40) over 120 s
  auto sessions = parse_clickstream(line("s1", "b1", "shop1", 0, "product_view", "p1") +
                                    line("s1", "b1", "shop1", 40000, "search") +
                                    line("s1", "b1", "shop1", 80000, "product_view", "p1") +
                                    line("s1", "b1", "shop1", 120000, "add_to_cart", "p1", 40.0));
  SessionFeatures f = featurize(sessions[0]);
  EXPECT_DOUBLE_EQ(f.duration_s, 120.0);
  EXPECT_EQ(f.event_count, 4);
  EXPECT_EQ(f.product_views, 2);
  EXPECT_EQ(f.distinct_products, 1);
  EXPECT_EQ(f.search_count, 1);
  EXPECT_EQ(f.a2c, 1);
  EXPECT_EQ(f.checkout, 0);
  EXPECT_EQ(f.purchase, 0);
  EXPECT_DOUBLE_EQ(f.cart_value, 40.0);
  EXPECT_DOUBLE_EQ(f.order_value, 0.0);
}

TEST(Featurize, PurchaseSetsOrderValue) {
  auto sessions = parse_clickstream(line("s1", "b1", "shop1", 0, "purchase", "p1", 55.0));
  SessionFeatures f = featurize(sessions[0]);
  EXPECT_EQ(f.purchase, 1);
  EXPECT_DOUBLE_EQ(f.order_value, 55.0);
}

TEST(Featurize, CartValueTakesMaximum) {
  auto sessions = parse_clickstream(line("s1", "b1", "shop1", 0, "add_to_cart", "p1", 10.0) +
                                    line("s1", "b1", "shop1", 1, "add_to_cart", "p2", 30.0) +
                                    line("s1", "b1", "shop1", 2, "add_to_cart", "p3", 20.0));
  EXPECT_DOUBLE_EQ(featurize(sessions[0]).cart_value, 30.0);
}

Session session_with_a2c(const std::string& id, bool a2c) {
  Session s{id, "shop1", "b", {}};
  s.events.push_back(Event{id, "b", "shop1", 0, EventKind::page_view, {}, {}});
  if (a2c) s.events.push_back(Event{id, "b", "shop1", 1, EventKind::add_to_cart, "p1", 5.0});
  return s;
}

TEST(A2cRate, ZeroWhenNoCarts) {
  std::vector<Session> sessions;
  for (int i = 0; i < 100; ++i) sessions.push_back(session_with_a2c("s" + std::to_string(i), false));
  EXPECT_DOUBLE_EQ(a2c_rate(sessions), 0.0);
}

TEST(A2cRate, SkimmersCohortRate) {
  // 95 of 1000 sessions carry an add_to_cart
  std::vector<Session> sessions;
  for (int i = 0; i < 1000; ++i)
    sessions.push_back(session_with_a2c("s" + std::to_string(i), i < 95));
  EXPECT_DOUBLE_EQ(a2c_rate(sessions), 0.095);
}

TEST(A2cRate, DirectCount) {
  std::vector<Session> sessions{session_with_a2c("a", true), session_with_a2c("b", false),
                                session_with_a2c("c", true), session_with_a2c("d", false)};
  EXPECT_DOUBLE_EQ(a2c_rate(sessions), 0.5);
}

TEST(A2cRate, EmptyInputThrows) {
  EXPECT_THROW(a2c_rate({}), EmptyInput);
}

TEST(A2cRate, ConcatenationIsSessionWeightedMean) {
  std::vector<Session> a, b;
  for (int i = 0; i < 10; ++i) a.push_back(session_with_a2c("a" + std::to_string(i), i < 3));
  for (int i = 0; i < 30; ++i) b.push_back(session_with_a2c("b" + std::to_string(i), i < 6));
  std::vector<Session> both = a;
  both.insert(both.end(), b.begin(), b.end());
  const double expected =
      (a2c_rate(a) * a.size() + a2c_rate(b) * b.size()) / static_cast<double>(both.size());
  EXPECT_DOUBLE_EQ(a2c_rate(both), expected);
}

TEST(FeatureCsv, HeaderAndRowShape) {
  auto sessions = parse_clickstream(line("s1", "b1", "shop1", 0, "page_view") +
                                    line("s1", "b1", "shop1", 120000, "add_to_cart", "p", 40.0));
  std::ostringstream out;
  write_features_csv(out, sessions);
  std::istringstream in(out.str());
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(header,
            "session_id,duration_s,event_count,product_views,distinct_products,search_count,"
            "a2c,checkout,purchase,cart_value,order_value");
  EXPECT_EQ(row, "s1,120,2,0,0,0,1,0,0,40,0");
}

} // namespace
