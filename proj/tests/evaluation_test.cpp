#include "simgym/evaluation.hpp"

#include <gtest/gtest.h>

#include "testutil.hpp"

using namespace simgym;

namespace {

SessionLog quick_log(const std::string& shop, Variant variant, int trial, bool a2c,
                     TerminationReason reason = TerminationReason::policy_terminate) {
  SessionLog log;
  log.persona_id = "p";
  log.shop_id = shop;
  log.variant = variant;
  log.trial = trial;
  log.a2c = a2c;
  log.termination_reason = reason;
  return log;
}

std::vector<SessionLog> variant_logs(const std::string& shop, Variant variant, int trial,
                                     int total, int carts) {
  std::vector<SessionLog> logs;
  for (int i = 0; i < total; ++i) logs.push_back(quick_log(shop, variant, trial, i < carts));
  return logs;
}

// --- delta_a2c ---

TEST(DeltaA2c, NullExperimentIsZero) {
  auto control = variant_logs("s", Variant::control, 1, 100, 10);
  auto treatment = variant_logs("s", Variant::treatment, 1, 100, 10);
  EXPECT_DOUBLE_EQ(delta_a2c(control, treatment), 0.0);
}

TEST(DeltaA2c, DirectArithmetic) {
  auto control = variant_logs("s", Variant::control, 1, 600, 30);
  auto treatment = variant_logs("s", Variant::treatment, 1, 600, 45);
  EXPECT_DOUBLE_EQ(delta_a2c(control, treatment), 0.025);
}

TEST(DeltaA2c, RetryExhaustedExcluded) {
  auto control = variant_logs("s", Variant::control, 1, 10, 5);
  std::vector<SessionLog> treatment;
  for (int i = 0; i < 10; ++i)
    treatment.push_back(
        quick_log("s", Variant::treatment, 1, true, TerminationReason::retry_exhausted));
  EXPECT_THROW(delta_a2c(control, treatment), EmptyVariant);

  // loop/budget terminations stay in as non-converting sessions
  std::vector<SessionLog> mixed = variant_logs("s", Variant::treatment, 1, 5, 5);
  for (int i = 0; i < 5; ++i)
    mixed.push_back(quick_log("s", Variant::treatment, 1, false, TerminationReason::loop_guardrail));
  EXPECT_DOUBLE_EQ(delta_a2c(control, mixed), 0.0);
}

// --- alignment ---

std::vector<ShopPairObservation> alignment_fixture_77() {
  // 38 shops aligned in both trials, 1 in one trial, 11 in none:
  // (38 + 0.5) / 50 = 0.77
  std::vector<ShopPairObservation> pairs;
  for (int i = 0; i < 50; ++i) {
    ShopPairObservation p;
    p.shop_id = "shop" + std::to_string(i);
    p.human_delta = 0.02;
    if (i < 38)
      p.trial_deltas = {0.01, 0.02};
    else if (i < 39)
      p.trial_deltas = {0.01, -0.02};
    else
      p.trial_deltas = {-0.01, -0.02};
    pairs.push_back(std::move(p));
  }
  return pairs;
}

TEST(AlignmentRate, AllAlignedIsHundred) {
  std::vector<ShopPairObservation> pairs(4);
  for (auto& p : pairs) {
    p.human_delta = -0.05;
    p.trial_deltas = {-0.01, -0.03};
  }
  EXPECT_DOUBLE_EQ(alignment_rate(pairs), 100.0);
}

TEST(AlignmentRate, HalfPointTrialAveragingOnMixedFixture) {
  EXPECT_DOUBLE_EQ(alignment_rate(alignment_fixture_77()), 77.0);
}

TEST(AlignmentRate, ZeroMatchesOnlyZero) {
  ShopPairObservation p;
  p.human_delta = 0.01;
  p.trial_deltas = {0.0, 0.0};
  EXPECT_DOUBLE_EQ(alignment_rate({p}), 0.0);

  p.human_delta = 0.0;
  EXPECT_DOUBLE_EQ(alignment_rate({p}), 100.0);
}

TEST(AlignmentRate, InvariantToPositiveRescaling) {
  auto pairs = alignment_fixture_77();
  auto scaled = pairs;
  for (auto& p : scaled)
    for (auto& d : p.trial_deltas) d *= 3.7;
  EXPECT_DOUBLE_EQ(alignment_rate(pairs), alignment_rate(scaled));
}

TEST(AlignmentRate, SignOfMeanModeDiffersOnSplitTrials) {
  ShopPairObservation p;
  p.shop_id = "s";
  p.human_delta = 0.05;
  p.trial_deltas = {0.08, -0.01}; // mean positive, trials split
  EXPECT_DOUBLE_EQ(alignment_rate({p}, AlignmentMode::per_trial), 50.0);
  EXPECT_DOUBLE_EQ(alignment_rate({p}, AlignmentMode::sign_of_mean), 100.0);
}

TEST(AlignmentRate, EmptyInputThrows) {
  EXPECT_THROW(alignment_rate({}), EmptyInput);
}

// --- pearson ---

TEST(Pearson, PerfectLine) {
  EXPECT_NEAR(pearson({1.0, 2.0, 3.0}, {2.0, 4.0, 6.0}), 1.0, 1e-12);
}

TEST(Pearson, HandComputedValue) {
  EXPECT_NEAR(pearson({1.0, 2.0, 3.0}, {2.0, 4.0, 5.0}), 0.981980506061966, 1e-12);
}

TEST(Pearson, AntiLinear) {
  EXPECT_NEAR(pearson({1.0, 2.0, 3.0}, {5.0, 3.0, 1.0}), -1.0, 1e-12);
}

TEST(Pearson, DegenerateVarianceThrows) {
  EXPECT_THROW(pearson({1.0, 1.0, 1.0}, {2.0, 3.0, 4.0}), DegenerateVariance);
  EXPECT_THROW(pearson({1.0}, {2.0}), DegenerateVariance);
}

TEST(Pearson, InvariantToPositiveAffineTransforms) {
  std::vector<double> xs{0.1, -0.3, 0.5, 0.2, -0.1};
  std::vector<double> ys{1.0, 0.2, 1.4, 0.9, 0.6};
  const double base = pearson(xs, ys);
  std::vector<double> xs2, ys2;
  for (double x : xs) xs2.push_back(2.5 * x + 7.0);
  for (double y : ys) ys2.push_back(0.3 * y - 2.0);
  EXPECT_NEAR(pearson(xs2, ys2), base, 1e-12);
}

// --- fisher_ci ---

TEST(FisherCi, MatchesReferenceIntervals) {
  const struct {
    double r;
    double lo, hi;
  } cases[] = {{0.55, 0.32, 0.72},
               {0.49, 0.25, 0.68},
               {0.41, 0.15, 0.62},
               {0.02, -0.26, 0.30},
               {0.00, -0.28, 0.28}};
  for (const auto& c : cases) {
    auto ci = fisher_ci(c.r, 50);
    EXPECT_NEAR(ci[0], c.lo, 0.01) << "r=" << c.r;
    EXPECT_NEAR(ci[1], c.hi, 0.01) << "r=" << c.r;
  }
}

TEST(FisherCi, RejectsOutOfRangeR) {
  EXPECT_THROW(fisher_ci(1.0, 50), ROutOfRange);
  EXPECT_THROW(fisher_ci(-1.2, 50), ROutOfRange);
}

TEST(FisherCi, MonotoneInNAndContainsR) {
  for (double r : {-0.8, -0.2, 0.0, 0.41, 0.9}) {
    double prev_width = 1e9;
    for (std::size_t n : {5u, 10u, 50u, 200u, 1000u}) {
      auto ci = fisher_ci(r, n);
      EXPECT_LE(ci[0], r);
      EXPECT_GE(ci[1], r);
      const double width = ci[1] - ci[0];
      EXPECT_LT(width, prev_width);
      prev_width = width;
    }
  }
}

TEST(NormalQuantile, MatchesKnownValues) {
  EXPECT_NEAR(detail::normal_quantile(0.975), 1.959963984540054, 1e-8);
  EXPECT_NEAR(detail::normal_quantile(0.5), 0.0, 1e-12);
  EXPECT_NEAR(detail::normal_quantile(0.025), -1.959963984540054, 1e-8);
}

// --- bootstrap alignment CI ---

TEST(BootstrapAlignmentCi, DegenerateAllAligned) {
  std::vector<ShopPairObservation> pairs(10);
  for (auto& p : pairs) {
    p.human_delta = 0.02;
    p.trial_deltas = {0.01, 0.03};
  }
  auto ci = bootstrap_alignment_ci(pairs, 10000, 1);
  EXPECT_DOUBLE_EQ(ci[0], 100.0);
  EXPECT_DOUBLE_EQ(ci[1], 100.0);
}

TEST(BootstrapAlignmentCi, SingleReplicateIsDefined) {
  auto pairs = alignment_fixture_77();
  auto ci = bootstrap_alignment_ci(pairs, 1, 7);
  EXPECT_DOUBLE_EQ(ci[0], ci[1]);
}

TEST(BootstrapAlignmentCi, MatchesBinomialOracle) {
  // binomial-approximation oracle: 77 +/- 1.96 * sqrt(77*23/50) ~= [65.3, 88.7]
  auto pairs = alignment_fixture_77();
  auto ci = bootstrap_alignment_ci(pairs, 10000, 42);
  const double se = std::sqrt(77.0 * 23.0 / 50.0);
  EXPECT_NEAR(ci[0], 77.0 - 1.96 * se, 3.0);
  EXPECT_NEAR(ci[1], 77.0 + 1.96 * se, 3.0);
}

TEST(BootstrapAlignmentCi, BracketsPointEstimate) {
  auto pairs = alignment_fixture_77();
  const double point = alignment_rate(pairs);
  auto ci = bootstrap_alignment_ci(pairs, 200, 5);
  EXPECT_GE(ci[0], 0.0);
  EXPECT_LE(ci[1], 100.0);
  EXPECT_LE(ci[0], point);
  EXPECT_GE(ci[1], point);
}

TEST(BootstrapAlignmentCi, DeterministicGivenSeed) {
  auto pairs = alignment_fixture_77();
  auto a = bootstrap_alignment_ci(pairs, 500, 9);
  auto b = bootstrap_alignment_ci(pairs, 500, 9);
  EXPECT_EQ(a, b);
}

// --- budget sensitivity ---

TEST(BudgetSensitivity, DegenerateConstantLogsGiveFlatZeroWidthCurves) {
  std::vector<SessionLog> logs;
  std::vector<ShopGroundTruth> gt;
  for (int shop = 0; shop < 4; ++shop) {
    const std::string id = "shop" + std::to_string(shop);
    gt.push_back(ShopGroundTruth{id, 0.0, "", MagnitudeStratum::minor});
    for (int trial = 1; trial <= 2; ++trial) {
      auto c = variant_logs(id, Variant::control, trial, 30, 30); // every session carts
      auto t = variant_logs(id, Variant::treatment, trial, 30, 30);
      logs.insert(logs.end(), c.begin(), c.end());
      logs.insert(logs.end(), t.begin(), t.end());
    }
  }
  auto result = budget_sensitivity(logs, gt, {10, 20}, 50, 3);
  ASSERT_EQ(result.rows.size(), 2u);
  for (const auto& row : result.rows) {
    EXPECT_DOUBLE_EQ(row.alignment.mean, 100.0); // delta 0 matches human 0
    EXPECT_DOUBLE_EQ(row.alignment.p10, row.alignment.p90);
    EXPECT_DOUBLE_EQ(row.correlation.p10, 0.0); // degenerate resamples -> r := 0
    EXPECT_DOUBLE_EQ(row.correlation.p90, 0.0);
  }
}

TEST(BudgetSensitivity, DeterministicGivenSeed) {
  std::vector<SessionLog> logs;
  std::vector<ShopGroundTruth> gt;
  for (int shop = 0; shop < 3; ++shop) {
    const std::string id = "shop" + std::to_string(shop);
    gt.push_back(ShopGroundTruth{id, shop == 0 ? 0.05 : -0.05, "", MagnitudeStratum::moderate});
    auto c = variant_logs(id, Variant::control, 1, 60, 10 + shop);
    auto t = variant_logs(id, Variant::treatment, 1, 60, 20 - shop * 5);
    logs.insert(logs.end(), c.begin(), c.end());
    logs.insert(logs.end(), t.begin(), t.end());
  }
  auto a = budget_sensitivity(logs, gt, {50}, 2, 11);
  auto b = budget_sensitivity(logs, gt, {50}, 2, 11);
  ASSERT_EQ(a.rows.size(), 1u);
  EXPECT_DOUBLE_EQ(a.rows[0].alignment.mean, b.rows[0].alignment.mean);
  EXPECT_DOUBLE_EQ(a.rows[0].correlation.mean, b.rows[0].correlation.mean);
}

TEST(BudgetSensitivity, CapsBudgetWithWarningAndErrorsOnEmptyVariant) {
  std::vector<SessionLog> logs;
  std::vector<ShopGroundTruth> gt{{"only", 0.01, "", MagnitudeStratum::minor}};
  auto c = variant_logs("only", Variant::control, 1, 20, 5);
  auto t = variant_logs("only", Variant::treatment, 1, 20, 8);
  logs.insert(logs.end(), c.begin(), c.end());
  logs.insert(logs.end(), t.begin(), t.end());

  auto result = budget_sensitivity(logs, gt, {50}, 5, 1);
  EXPECT_FALSE(result.warnings.empty());

  std::vector<ShopGroundTruth> gt2{{"ghost", 0.01, "", MagnitudeStratum::minor}};
  EXPECT_THROW(budget_sensitivity(logs, gt2, {50}, 5, 1), InsufficientSessions);
}

// --- evaluate / report ---

TEST(Evaluate, SingleShopReportsNullPearson) {
  std::vector<SessionLog> logs;
  auto c = variant_logs("solo", Variant::control, 1, 40, 4);
  auto t = variant_logs("solo", Variant::treatment, 1, 40, 8);
  logs.insert(logs.end(), c.begin(), c.end());
  logs.insert(logs.end(), t.begin(), t.end());
  std::vector<ShopGroundTruth> gt{{"solo", 0.05, "", MagnitudeStratum::major}};

  EvalOptions options;
  options.bootstrap_B = 200;
  auto report = evaluate(logs, gt, options);
  EXPECT_EQ(report.n_shops, 1u);
  EXPECT_DOUBLE_EQ(report.alignment_rate, 100.0);
  EXPECT_FALSE(report.pearson_r.has_value());
  nlohmann::json j = report;
  EXPECT_TRUE(j["pearson_r"].is_null()); // surfaced as null, not a crash
}

TEST(Evaluate, MissingShopThrows) {
  auto logs = variant_logs("here", Variant::control, 1, 5, 1);
  auto t = variant_logs("here", Variant::treatment, 1, 5, 2);
  logs.insert(logs.end(), t.begin(), t.end());
  std::vector<ShopGroundTruth> gt{{"absent", 0.01, "", MagnitudeStratum::minor}};
  EXPECT_THROW(evaluate(logs, gt), MissingShop);
}

// --- cohort analysis ---

struct FittedCohorts {
  std::vector<Session> sessions;
  ClusterModel model;
};

FittedCohorts fitted_cohort_population() {
  FittedCohorts f;
  f.sessions = testutil::make_cohort_population(2024);
  auto z = zscore(build_feature_matrix(f.sessions));
  auto fit = kmeans_best_of(z.matrix, 5, 17);
  f.model = fit.model;
  f.model.column_means = z.column_means;
  f.model.column_stds = z.column_stds;
  return f;
}

TEST(CohortAnalysis, RecoversDesignedSharesAndRates) {
  auto f = fitted_cohort_population();
  auto report = cohort_analysis(f.sessions, f.model);

  ASSERT_TRUE(report.skimmers_cluster_id.has_value());
  const auto& skimmers = report.cohorts[*report.skimmers_cluster_id];
  EXPECT_NEAR(skimmers.share, 0.264, 0.005);
  EXPECT_NEAR(skimmers.a2c_rate, 0.095, 0.005);
  EXPECT_FALSE(skimmers.bounce);

  std::vector<double> shares, rates;
  for (const auto& c : report.cohorts) {
    shares.push_back(c.share);
    rates.push_back(c.a2c_rate);
  }
  std::sort(shares.rbegin(), shares.rend());
  EXPECT_NEAR(shares[0], 0.591, 0.005); // bouncers
  EXPECT_NEAR(shares[1], 0.264, 0.005); // skimmers
  EXPECT_NEAR(shares[2], 0.112, 0.005); // engaged browsers
  EXPECT_NEAR(shares[3], 0.024, 0.005); // purchase-ready
  EXPECT_NEAR(shares[4], 0.009, 0.005); // deep researchers

  // the bounce cohort is flagged and carries no carts
  int bounce_count = 0;
  for (const auto& c : report.cohorts) {
    if (c.bounce) {
      ++bounce_count;
      EXPECT_DOUBLE_EQ(c.a2c_rate, 0.0);
      EXPECT_NEAR(c.share, 0.591, 0.005);
    }
  }
  EXPECT_EQ(bounce_count, 1);
}

TEST(CohortAnalysis, AllSingleEventMeansNoSkimmers) {
  std::vector<Session> sessions;
  for (int i = 0; i < 40; ++i) {
    Session s{"s" + std::to_string(i), "shop", "b", {}};
    s.events.push_back(Event{s.id, "b", "shop", 0, EventKind::page_view, {}, {}});
    sessions.push_back(s);
  }
  auto z = zscore(build_feature_matrix(sessions));
  auto fit = kmeans(z.matrix, 2, 3);
  fit.model.column_means = z.column_means;
  fit.model.column_stds = z.column_stds;
  auto report = cohort_analysis(sessions, fit.model);
  EXPECT_FALSE(report.skimmers_cluster_id.has_value());
}

TEST(CohortAnalysis, ModelMismatchOnWrongDimensions) {
  ClusterModel model;
  model.k = 2;
  model.cols = 4;
  model.centroids.assign(8, 0.0);
  model.column_means.assign(4, 0.0);
  model.column_stds.assign(4, 1.0);
  auto sessions = testutil::make_cohort_population(1);
  EXPECT_THROW(cohort_analysis(sessions, model), ModelMismatch);
}

// --- cohort correlation ---

// two separable cohorts (short skimmer sessions vs long searchy engaged
// sessions) plus bouncers whose share varies by shop, diluting the
// whole-shop signal
std::vector<ShopHumanLogs> cohort_shops(int n_shops, std::uint64_t /*seed*/) {
  using namespace simgym;
  // designed per-shop treatment shifts: skimmer cart shift carries the
  // signal; the engaged cohort adds independent noise; bounce share varies.
  // cart rates sit near 40% so clustering keys on behavior, not conversion
  static const int skim_shift[] = {-12, 16, -8, 12, -4, 8, -2, 4, 0, 2};
  static const int eng_noise[] = {4, -4, 2, -2, 0, 4, -4, 2, -2, 0};
  static const int bounce_n[] = {10, 160, 25, 130, 50, 90, 15, 145, 70, 110};

  std::vector<ShopHumanLogs> shops;
  int next = 0;
  auto make_sessions = [&](const std::string& shop, int skim_carts, int eng_carts, int bounce) {
    std::vector<Session> out;
    auto add = [&](bool engaged, bool bounce_session, bool cart) {
      Session s;
      s.id = "s" + std::to_string(next);
      s.buyer_id = "b" + std::to_string(next);
      s.shop_id = shop;
      ++next;
      // skimmers and engaged share duration and event count (bounce sits far
      // from both), separate on searches vs. views, and carry cohort-specific
      // cart values so the funnel columns cannot form their own cluster
      auto push = [&](std::int64_t ts, EventKind kind, const std::string& ref = "",
                      double value = -1.0) {
        Event e{s.id, s.buyer_id, s.shop_id, ts, kind, {}, {}};
        if (!ref.empty()) e.product_ref = ref;
        if (value >= 0.0) e.value = value;
        s.events.push_back(std::move(e));
      };
      if (bounce_session) {
        push(0, EventKind::page_view);
      } else if (engaged) {
        push(0, EventKind::page_view);
        for (int q = 0; q < 5; ++q) push(20000LL * (q + 1), EventKind::search);
        for (int v = 0; v < 4; ++v)
          push(120000LL + 30000LL * v, EventKind::product_view, "p" + std::to_string(v));
        if (cart) push(240000, EventKind::add_to_cart, "p1", 40.0);
      } else {
        push(0, EventKind::page_view);
        for (int v = 0; v < 8; ++v)
          push(25000LL * (v + 1), EventKind::product_view, "p" + std::to_string(v));
        push(235000, EventKind::page_view);
        if (cart) push(240000, EventKind::add_to_cart, "p0", 10.0);
      }
      out.push_back(std::move(s));
    };
    for (int i = 0; i < 50; ++i) add(false, false, i < skim_carts);
    for (int i = 0; i < 30; ++i) add(true, false, i < eng_carts);
    for (int i = 0; i < bounce; ++i) add(false, true, false);
    return out;
  };

  for (int i = 0; i < n_shops; ++i) {
    ShopHumanLogs shop;
    shop.shop_id = "shop" + std::to_string(i);
    shop.control = make_sessions(shop.shop_id, 20, 12, bounce_n[i % 10]);
    shop.treatment = make_sessions(shop.shop_id, 20 + skim_shift[i % 10], 12 + eng_noise[i % 10],
                                   bounce_n[i % 10]);
    shops.push_back(std::move(shop));
  }
  return shops;
}

ClusterModel fit_on_shops(const std::vector<ShopHumanLogs>& shops, int k) {
  std::vector<Session> pooled;
  for (const auto& shop : shops) {
    pooled.insert(pooled.end(), shop.control.begin(), shop.control.end());
    pooled.insert(pooled.end(), shop.treatment.begin(), shop.treatment.end());
  }
  auto z = zscore(build_feature_matrix(pooled));
  auto fit = kmeans_best_of(z.matrix, k, 5);
  fit.model.column_means = z.column_means;
  fit.model.column_stds = z.column_stds;
  return fit.model;
}

TEST(CohortCorrelation, SkimmersAsWholeEngagedPopulationIsPerfect) {
  // no second engaged cohort: skimmers IS the engaged population
  auto shops = cohort_shops(6, 3);
  for (auto& shop : shops) {
    auto strip = [](std::vector<Session>& sessions) {
      sessions.erase(std::remove_if(sessions.begin(), sessions.end(),
                                    [](const Session& s) {
                                      return featurize(s).search_count > 0; // engaged signature
                                    }),
                     sessions.end());
    };
    strip(shop.control);
    strip(shop.treatment);
  }
  auto model = fit_on_shops(shops, 2);
  auto corr = cohort_correlation(shops, model);
  EXPECT_NEAR(corr.skimmers_vs_engaged, 1.0, 1e-9);
}

TEST(CohortCorrelation, EngagedSignalLessDilutedThanWholeShop) {
  auto shops = cohort_shops(10, 12);
  auto model = fit_on_shops(shops, 3);
  auto corr = cohort_correlation(shops, model);
  EXPECT_EQ(corr.n_shops_used, 10u);
  EXPECT_GT(corr.skimmers_vs_engaged, corr.skimmers_vs_all);
}

TEST(CohortCorrelation, TwoShopsIsDefined) {
  auto shops = cohort_shops(2, 21);
  auto model = fit_on_shops(shops, 3);
  auto corr = cohort_correlation(shops, model);
  EXPECT_NEAR(std::abs(corr.skimmers_vs_engaged), 1.0, 1e-9); // n=2 edge: r = +/-1
}

} // namespace
