#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "simgym/agent.hpp"
#include "simgym/clickstream.hpp"
#include "simgym/clustering.hpp"
#include "simgym/errors.hpp"
#include "simgym/rand.hpp"

namespace simgym {

enum class MagnitudeStratum { minor, moderate, major };

inline const char* to_string(MagnitudeStratum m) {
  switch (m) {
    case MagnitudeStratum::minor: return "minor";
    case MagnitudeStratum::moderate: return "moderate";
    case MagnitudeStratum::major: return "major";
  }
  return "?";
}

inline MagnitudeStratum magnitude_stratum_from_string(const std::string& s) {
  if (s == "minor") return MagnitudeStratum::minor;
  if (s == "moderate") return MagnitudeStratum::moderate;
  if (s == "major") return MagnitudeStratum::major;
  throw ConfigError("unknown magnitude stratum '" + s + "'");
}

struct ShopGroundTruth {
  std::string shop_id;
  double human_delta_a2c = 0.0; // treatment - control, percentage-point fraction
  std::string change_summary;
  MagnitudeStratum magnitude_stratum = MagnitudeStratum::minor;
};

inline void to_json(nlohmann::json& j, const ShopGroundTruth& g) {
  j = nlohmann::json{{"shop_id", g.shop_id},
                     {"human_delta_a2c", g.human_delta_a2c},
                     {"change_summary", g.change_summary},
                     {"magnitude_stratum", to_string(g.magnitude_stratum)}};
}

inline void from_json(const nlohmann::json& j, ShopGroundTruth& g) {
  j.at("shop_id").get_to(g.shop_id);
  j.at("human_delta_a2c").get_to(g.human_delta_a2c);
  if (j.contains("change_summary")) j.at("change_summary").get_to(g.change_summary);
  if (j.contains("magnitude_stratum"))
    g.magnitude_stratum = magnitude_stratum_from_string(j.at("magnitude_stratum").get<std::string>());
}

struct ShopResult {
  std::string shop_id;
  std::vector<double> per_trial_agent_delta;
  double agent_delta_a2c = 0.0; // mean over trials
};

// One shop's paired observation for the cross-shop metrics.
struct ShopPairObservation {
  std::string shop_id;
  double human_delta = 0.0;
  std::vector<double> trial_deltas;

  double agent_mean() const {
    double sum = 0.0;
    for (double d : trial_deltas) sum += d;
    return trial_deltas.empty() ? 0.0 : sum / static_cast<double>(trial_deltas.size());
  }
};

// Sessions terminated by infrastructure failure carry no behavioral signal;
// budget and loop terminations stay in as non-converting browse sessions.
inline bool eligible_for_evaluation(const SessionLog& log) {
  return log.termination_reason != TerminationReason::retry_exhausted;
}

namespace detail {

inline double a2c_rate_of_logs(const std::vector<const SessionLog*>& logs) {
  std::size_t hits = 0;
  for (const SessionLog* log : logs)
    if (log->a2c) ++hits;
  return static_cast<double>(hits) / static_cast<double>(logs.size());
}

inline int sign_of(double v) {
  if (v > 0.0) return 1;
  if (v < 0.0) return -1;
  return 0;
}

} // namespace detail

// Agent-predicted A2C shift for one shop: treatment rate minus control rate
// over eligible sessions.
inline double delta_a2c(const std::vector<SessionLog>& control_logs,
                        const std::vector<SessionLog>& treatment_logs) {
  std::vector<const SessionLog*> control, treatment;
  for (const auto& log : control_logs)
    if (eligible_for_evaluation(log)) control.push_back(&log);
  for (const auto& log : treatment_logs)
    if (eligible_for_evaluation(log)) treatment.push_back(&log);
  if (control.empty()) throw EmptyVariant("no eligible control sessions");
  if (treatment.empty()) throw EmptyVariant("no eligible treatment sessions");
  return detail::a2c_rate_of_logs(treatment) - detail::a2c_rate_of_logs(control);
}

// Groups session logs into per-shop, per-trial agent deltas.
inline std::vector<ShopResult> build_shop_results(const std::vector<SessionLog>& logs) {
  std::map<std::string, std::map<int, std::pair<std::vector<SessionLog>, std::vector<SessionLog>>>>
      grouped; // shop -> trial -> (control, treatment)
  for (const SessionLog& log : logs) {
    auto& slot = grouped[log.shop_id][log.trial];
    (log.variant == Variant::control ? slot.first : slot.second).push_back(log);
  }
  std::vector<ShopResult> results;
  for (auto& [shop_id, trials] : grouped) {
    ShopResult r;
    r.shop_id = shop_id;
    double sum = 0.0;
    for (auto& [trial, variants] : trials) {
      const double d = delta_a2c(variants.first, variants.second);
      r.per_trial_agent_delta.push_back(d);
      sum += d;
    }
    r.agent_delta_a2c = sum / static_cast<double>(r.per_trial_agent_delta.size());
    results.push_back(std::move(r));
  }
  return results;
}

enum class AlignmentMode { per_trial, sign_of_mean };

inline const char* to_string(AlignmentMode m) {
  return m == AlignmentMode::per_trial ? "per_trial" : "sign_of_mean";
}

// Per-shop alignment in [0,1]: per-trial sign agreement averaged over
// trials, or the sign of the trial-mean delta. Zero matches only zero.
inline double shop_alignment(const ShopPairObservation& pair, AlignmentMode mode) {
  const int human_sign = detail::sign_of(pair.human_delta);
  if (mode == AlignmentMode::sign_of_mean)
    return detail::sign_of(pair.agent_mean()) == human_sign ? 1.0 : 0.0;
  if (pair.trial_deltas.empty()) return 0.0;
  double agreed = 0.0;
  for (double d : pair.trial_deltas)
    if (detail::sign_of(d) == human_sign) agreed += 1.0;
  return agreed / static_cast<double>(pair.trial_deltas.size());
}

// Alignment rate as a percentage over shops.
inline double alignment_rate(const std::vector<ShopPairObservation>& pairs,
                             AlignmentMode mode = AlignmentMode::per_trial) {
  if (pairs.empty()) throw EmptyInput("alignment_rate: no shop pairs");
  double sum = 0.0;
  for (const auto& pair : pairs) sum += shop_alignment(pair, mode);
  return 100.0 * sum / static_cast<double>(pairs.size());
}

// Product-moment correlation.
inline double pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw DegenerateVariance("pearson: need >= 2 paired observations");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0)
    throw DegenerateVariance("pearson: zero variance on one side");
  return sxy / std::sqrt(sxx * syy);
}

inline double pearson(const std::vector<ShopPairObservation>& pairs) {
  std::vector<double> human, agent;
  for (const auto& pair : pairs) {
    human.push_back(pair.human_delta);
    agent.push_back(pair.agent_mean());
  }
  return pearson(human, agent);
}

namespace detail {

// Acklam's rational approximation to the standard normal quantile,
// |relative error| < 1.15e-9 over (0,1).
inline double normal_quantile(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425;
  if (p <= 0.0 || p >= 1.0) throw Error("normal_quantile: p must lie in (0,1)");
  double q, r;
  if (p < p_low) {
    q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p <= 1.0 - p_low) {
    q = p - 0.5;
    r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  q = std::sqrt(-2.0 * std::log(1.0 - p));
  return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
         ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
}

// Nearest-rank percentile over a sorted sample.
inline double nearest_rank_percentile(const std::vector<double>& sorted, double percentile) {
  const std::size_t n = sorted.size();
  std::size_t rank =
      static_cast<std::size_t>(std::ceil(percentile / 100.0 * static_cast<double>(n)));
  if (rank == 0) rank = 1;
  if (rank > n) rank = n;
  return sorted[rank - 1];
}

} // namespace detail

// Parametric CI for the Pearson coefficient: symmetric on the Fisher-z scale
// with standard error 1/sqrt(n-3), back-transformed through tanh.
inline std::array<double, 2> fisher_ci(double r, std::size_t n, double level = 0.95) {
  if (std::abs(r) >= 1.0) throw ROutOfRange("fisher_ci: |r| must be < 1");
  if (n < 4) throw Error("fisher_ci: n must be >= 4");
  const double z = 0.5 * std::log((1.0 + r) / (1.0 - r));
  const double se = 1.0 / std::sqrt(static_cast<double>(n) - 3.0);
  const double zc = detail::normal_quantile(0.5 + level / 2.0);
  return {std::tanh(z - zc * se), std::tanh(z + zc * se)};
}

// Percentile bootstrap over shops for the alignment rate.
inline std::array<double, 2> bootstrap_alignment_ci(const std::vector<ShopPairObservation>& pairs,
                                                    std::size_t B, std::uint64_t seed,
                                                    double level = 0.95,
                                                    AlignmentMode mode = AlignmentMode::per_trial) {
  if (pairs.empty()) throw EmptyInput("bootstrap_alignment_ci: no shop pairs");
  // per-shop alignment values are fixed; the bootstrap resamples shops
  std::vector<double> values;
  values.reserve(pairs.size());
  for (const auto& pair : pairs) values.push_back(shop_alignment(pair, mode));

  Rng rng(seed);
  std::vector<double> replicates;
  replicates.reserve(B);
  const std::size_t n = values.size();
  for (std::size_t b = 0; b < B; ++b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += values[rng.next_index(n)];
    replicates.push_back(100.0 * sum / static_cast<double>(n));
  }
  std::sort(replicates.begin(), replicates.end());
  const double alpha = (1.0 - level) / 2.0;
  return {detail::nearest_rank_percentile(replicates, 100.0 * alpha),
          detail::nearest_rank_percentile(replicates, 100.0 * (1.0 - alpha))};
}

// --- agent-budget sensitivity -------------------------------------------------

struct MetricBand {
  double mean = 0.0;
  double p10 = 0.0;
  double p90 = 0.0;
};

struct BudgetSensitivityRow {
  int budget = 0;
  MetricBand alignment;   // percentage
  MetricBand correlation; // Pearson r
};

struct BudgetSensitivityResult {
  std::vector<BudgetSensitivityRow> rows;
  std::vector<std::string> warnings;
};

inline std::vector<int> default_budgets() {
  std::vector<int> budgets;
  for (int b = 50; b <= 700; b += 50) budgets.push_back(b);
  return budgets;
}

// Bootstrap over sessions within each shop: for each budget, draw that many
// sessions with replacement per (shop, variant), recompute per-shop deltas,
// then recompute cross-shop alignment and correlation against ground truth.
inline BudgetSensitivityResult budget_sensitivity(const std::vector<SessionLog>& logs,
                                                  const std::vector<ShopGroundTruth>& ground_truth,
                                                  std::vector<int> budgets = default_budgets(),
                                                  std::size_t B = 1000, std::uint64_t seed = 0) {
  if (budgets.empty()) throw ConfigError("budget_sensitivity: no budgets");

  struct ShopFlags {
    std::vector<char> control;
    std::vector<char> treatment;
    double human_delta = 0.0;
  };
  std::map<std::string, ShopFlags> shops;
  for (const auto& gt : ground_truth) shops[gt.shop_id].human_delta = gt.human_delta_a2c;
  for (const SessionLog& log : logs) {
    auto it = shops.find(log.shop_id);
    if (it == shops.end() || !eligible_for_evaluation(log)) continue;
    auto& flags = log.variant == Variant::control ? it->second.control : it->second.treatment;
    flags.push_back(log.a2c ? 1 : 0);
  }
  for (const auto& [shop_id, flags] : shops) {
    if (flags.control.empty() || flags.treatment.empty())
      throw InsufficientSessions("shop '" + shop_id + "' has no eligible sessions for a variant");
  }

  BudgetSensitivityResult result;
  const std::size_t n_shops = shops.size();
  for (std::size_t bi = 0; bi < budgets.size(); ++bi) {
    const int budget = budgets[bi];
    for (const auto& [shop_id, flags] : shops) {
      const std::size_t avail =
          std::min(flags.control.size(), flags.treatment.size());
      if (static_cast<std::size_t>(budget) > avail) {
        result.warnings.push_back("budget " + std::to_string(budget) + " capped at " +
                                  std::to_string(avail) + " sessions for shop '" + shop_id + "'");
      }
    }

    std::vector<double> align_reps, corr_reps;
    align_reps.reserve(B);
    corr_reps.reserve(B);
    std::vector<double> human, agent;
    human.reserve(n_shops);
    agent.reserve(n_shops);

    for (std::size_t rep = 0; rep < B; ++rep) {
      Rng rng(derive_seed(seed, static_cast<std::uint64_t>(bi),
                          static_cast<std::uint64_t>(rep)));
      human.clear();
      agent.clear();
      double aligned = 0.0;
      for (const auto& [shop_id, flags] : shops) {
        auto resampled_rate = [&](const std::vector<char>& arr) {
          const std::size_t draw =
              std::min<std::size_t>(static_cast<std::size_t>(budget), arr.size());
          std::size_t hits = 0;
          for (std::size_t i = 0; i < draw; ++i) hits += arr[rng.next_index(arr.size())];
          return static_cast<double>(hits) / static_cast<double>(draw);
        };
        const double delta = resampled_rate(flags.treatment) - resampled_rate(flags.control);
        human.push_back(flags.human_delta);
        agent.push_back(delta);
        if (detail::sign_of(delta) == detail::sign_of(flags.human_delta)) aligned += 1.0;
      }
      align_reps.push_back(100.0 * aligned / static_cast<double>(n_shops));
      double r = 0.0;
      try {
        r = pearson(human, agent);
      } catch (const DegenerateVariance&) {
        r = 0.0; // a constant resample carries no correlation signal
      }
      corr_reps.push_back(r);
    }

    auto band = [](std::vector<double>& reps) {
      MetricBand band;
      double sum = 0.0;
      for (double v : reps) sum += v;
      band.mean = sum / static_cast<double>(reps.size());
      std::sort(reps.begin(), reps.end());
      band.p10 = detail::nearest_rank_percentile(reps, 10.0);
      band.p90 = detail::nearest_rank_percentile(reps, 90.0);
      return band;
    };
    BudgetSensitivityRow row;
    row.budget = budget;
    row.alignment = band(align_reps);
    row.correlation = band(corr_reps);
    result.rows.push_back(row);
  }
  return result;
}

// --- evaluation report ---------------------------------------------------------

struct EvalReport {
  std::size_t n_shops = 0;
  AlignmentMode alignment_mode = AlignmentMode::per_trial;
  double alignment_rate = 0.0;
  std::array<double, 2> alignment_ci{0.0, 0.0};
  std::optional<double> pearson_r;
  std::optional<std::array<double, 2>> pearson_ci;
  std::vector<ShopPairObservation> per_shop;
};

struct EvalOptions {
  AlignmentMode mode = AlignmentMode::per_trial;
  std::size_t bootstrap_B = 10000;
  std::uint64_t seed = 0;
  double level = 0.95;
};

// Builds the full report: per-shop paired deltas, alignment with its
// percentile-bootstrap CI, and Pearson r with its Fisher-z CI. An undefined
// correlation (single shop, zero variance, |r| = 1) surfaces as a null field.
inline EvalReport evaluate(const std::vector<SessionLog>& logs,
                           const std::vector<ShopGroundTruth>& ground_truth,
                           const EvalOptions& options = {}) {
  auto results = build_shop_results(logs);
  std::map<std::string, const ShopResult*> by_shop;
  for (const auto& r : results) by_shop[r.shop_id] = &r;

  EvalReport report;
  report.alignment_mode = options.mode;
  for (const auto& gt : ground_truth) {
    auto it = by_shop.find(gt.shop_id);
    if (it == by_shop.end()) throw MissingShop(gt.shop_id);
    ShopPairObservation pair;
    pair.shop_id = gt.shop_id;
    pair.human_delta = gt.human_delta_a2c;
    pair.trial_deltas = it->second->per_trial_agent_delta;
    report.per_shop.push_back(std::move(pair));
  }
  report.n_shops = report.per_shop.size();
  report.alignment_rate = alignment_rate(report.per_shop, options.mode);
  report.alignment_ci = bootstrap_alignment_ci(report.per_shop, options.bootstrap_B, options.seed,
                                               options.level, options.mode);
  try {
    report.pearson_r = pearson(report.per_shop);
    if (report.n_shops >= 4 && std::abs(*report.pearson_r) < 1.0)
      report.pearson_ci = fisher_ci(*report.pearson_r, report.n_shops, options.level);
  } catch (const DegenerateVariance&) {
    report.pearson_r = std::nullopt;
  }
  return report;
}

inline void to_json(nlohmann::json& j, const EvalReport& r) {
  j = nlohmann::json{{"n_shops", r.n_shops},
                     {"alignment_mode", to_string(r.alignment_mode)},
                     {"alignment_rate", r.alignment_rate},
                     {"alignment_ci", r.alignment_ci},
                     {"pearson_r", r.pearson_r ? nlohmann::json(*r.pearson_r) : nlohmann::json(nullptr)},
                     {"pearson_ci",
                      r.pearson_ci ? nlohmann::json(*r.pearson_ci) : nlohmann::json(nullptr)}};
  auto& shops = j["per_shop"] = nlohmann::json::array();
  for (const auto& pair : r.per_shop)
    shops.push_back({{"shop_id", pair.shop_id},
                     {"human_delta_a2c", pair.human_delta},
                     {"agent_delta_a2c", pair.agent_mean()},
                     {"per_trial_agent_delta", pair.trial_deltas}});
}

// --- cohort analysis (clustered human traffic) ---------------------------------

struct CohortInfo {
  int cluster_id = 0;
  std::size_t session_count = 0;
  double share = 0.0;
  double a2c_rate = 0.0;
  bool bounce = false; // every session in the cohort is single-event
};

struct CohortReport {
  std::vector<CohortInfo> cohorts;
  std::optional<int> skimmers_cluster_id; // largest non-bounce cohort
};

inline CohortReport cohort_analysis(const std::vector<Session>& sessions,
                                    const ClusterModel& model) {
  const FeatureMatrix matrix = build_feature_matrix(sessions);
  const auto assignments = assign_with_model(model, matrix); // throws ModelMismatch

  CohortReport report;
  report.cohorts.resize(model.k);
  std::vector<std::size_t> a2c_hits(model.k, 0);
  std::vector<bool> all_single_event(model.k, true);
  for (int c = 0; c < model.k; ++c) report.cohorts[c].cluster_id = c;

  for (std::size_t i = 0; i < sessions.size(); ++i) {
    const int c = assignments[i].cluster_id;
    ++report.cohorts[c].session_count;
    if (session_has_a2c(sessions[i])) ++a2c_hits[c];
    if (sessions[i].events.size() != 1) all_single_event[c] = false;
  }

  for (int c = 0; c < model.k; ++c) {
    auto& cohort = report.cohorts[c];
    if (sessions.empty()) continue;
    cohort.share = static_cast<double>(cohort.session_count) / static_cast<double>(sessions.size());
    if (cohort.session_count > 0) {
      cohort.a2c_rate = static_cast<double>(a2c_hits[c]) / static_cast<double>(cohort.session_count);
      cohort.bounce = all_single_event[c];
    }
  }

  for (const auto& cohort : report.cohorts) {
    if (cohort.session_count == 0 || cohort.bounce) continue;
    if (!report.skimmers_cluster_id ||
        cohort.share > report.cohorts[*report.skimmers_cluster_id].share)
      report.skimmers_cluster_id = cohort.cluster_id;
  }
  return report;
}

struct ShopHumanLogs {
  std::string shop_id;
  std::vector<Session> control;
  std::vector<Session> treatment;
};

struct CohortCorrelation {
  double skimmers_vs_all = 0.0;
  double skimmers_vs_engaged = 0.0;
  std::size_t n_shops_used = 0;
};

// Per-shop human deltas computed inside the skimmers cohort, across all
// sessions, and across all-minus-bounce, then correlated across shops.
inline CohortCorrelation cohort_correlation(const std::vector<ShopHumanLogs>& shops,
                                            const ClusterModel& model) {
  std::vector<Session> pooled;
  for (const auto& shop : shops) {
    pooled.insert(pooled.end(), shop.control.begin(), shop.control.end());
    pooled.insert(pooled.end(), shop.treatment.begin(), shop.treatment.end());
  }
  const CohortReport pooled_report = cohort_analysis(pooled, model);
  if (!pooled_report.skimmers_cluster_id)
    throw EmptyInput("cohort_correlation: no non-bounce cohort in the pooled sessions");
  const int skimmers = *pooled_report.skimmers_cluster_id;
  std::set<int> bounce_cohorts;
  for (const auto& cohort : pooled_report.cohorts)
    if (cohort.bounce) bounce_cohorts.insert(cohort.cluster_id);

  auto rate_subset = [&](const std::vector<Session>& sessions,
                         auto&& keep) -> std::optional<double> {
    const FeatureMatrix matrix = build_feature_matrix(sessions);
    const auto assignments = assign_with_model(model, matrix);
    std::size_t kept = 0, hits = 0;
    for (std::size_t i = 0; i < sessions.size(); ++i) {
      if (!keep(assignments[i].cluster_id)) continue;
      ++kept;
      if (session_has_a2c(sessions[i])) ++hits;
    }
    if (kept == 0) return std::nullopt;
    return static_cast<double>(hits) / static_cast<double>(kept);
  };

  std::vector<double> skim_deltas, all_deltas, engaged_deltas;
  for (const auto& shop : shops) {
    auto in_skimmers = [&](int c) { return c == skimmers; };
    auto everyone = [](int) { return true; };
    auto engaged = [&](int c) { return !bounce_cohorts.count(c); };
    const auto skim_c = rate_subset(shop.control, in_skimmers);
    const auto skim_t = rate_subset(shop.treatment, in_skimmers);
    const auto all_c = rate_subset(shop.control, everyone);
    const auto all_t = rate_subset(shop.treatment, everyone);
    const auto eng_c = rate_subset(shop.control, engaged);
    const auto eng_t = rate_subset(shop.treatment, engaged);
    if (!skim_c || !skim_t || !all_c || !all_t || !eng_c || !eng_t) continue;
    skim_deltas.push_back(*skim_t - *skim_c);
    all_deltas.push_back(*all_t - *all_c);
    engaged_deltas.push_back(*eng_t - *eng_c);
  }

  CohortCorrelation out;
  out.n_shops_used = skim_deltas.size();
  out.skimmers_vs_all = pearson(skim_deltas, all_deltas);
  out.skimmers_vs_engaged = pearson(skim_deltas, engaged_deltas);
  return out;
}

} // namespace simgym
