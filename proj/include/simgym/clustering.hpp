#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "simgym/clickstream.hpp"
#include "simgym/errors.hpp"
#include "simgym/rand.hpp"

namespace simgym {

struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values; // row-major
  std::vector<std::string> row_ids;

  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
  double& at(std::size_t r, std::size_t c) { return values[r * cols + c]; }
  const double* row(std::size_t r) const { return values.data() + r * cols; }
};

inline FeatureMatrix build_feature_matrix(const std::vector<Session>& sessions) {
  FeatureMatrix m;
  m.rows = sessions.size();
  m.cols = SessionFeatures::kDim;
  m.values.reserve(m.rows * m.cols);
  m.row_ids.reserve(m.rows);
  for (const Session& s : sessions) {
    const auto row = featurize(s).as_row();
    m.values.insert(m.values.end(), row.begin(), row.end());
    m.row_ids.push_back(s.id);
  }
  return m;
}

struct ZScoreResult {
  FeatureMatrix matrix;
  std::vector<double> column_means;
  std::vector<double> column_stds;
};

// Standardizes each column to mean 0 and population std 1. Zero-variance
// columns become all-zeros with a recorded std of 1, so projecting the
// training data back through (x - mean) / std stays exact.
inline ZScoreResult zscore(const FeatureMatrix& m) {
  ZScoreResult r;
  r.matrix = m;
  r.column_means.assign(m.cols, 0.0);
  r.column_stds.assign(m.cols, 1.0);
  if (m.rows == 0) return r;

  for (std::size_t c = 0; c < m.cols; ++c) {
    double mean = 0.0;
    for (std::size_t i = 0; i < m.rows; ++i) mean += m.at(i, c);
    mean /= static_cast<double>(m.rows);
    double var = 0.0;
    for (std::size_t i = 0; i < m.rows; ++i) {
      const double d = m.at(i, c) - mean;
      var += d * d;
    }
    var /= static_cast<double>(m.rows);
    const double std_dev = std::sqrt(var);
    r.column_means[c] = mean;
    r.column_stds[c] = std_dev > 0.0 ? std_dev : 1.0;
    for (std::size_t i = 0; i < m.rows; ++i)
      r.matrix.at(i, c) = (m.at(i, c) - mean) / r.column_stds[c];
  }
  return r;
}

struct ClusterModel {
  int k = 0;
  std::size_t cols = 0;
  std::vector<double> centroids; // k x cols, standardized space
  std::vector<double> column_means;
  std::vector<double> column_stds;
  double inertia = 0.0;
  std::uint64_t seed = 0;

  const double* centroid(int c) const { return centroids.data() + static_cast<std::size_t>(c) * cols; }
};

struct Assignment {
  std::string session_id;
  int cluster_id = 0;
  double distance = 0.0; // Euclidean, standardized space, to the nearest centroid
};

struct KmeansResult {
  ClusterModel model;
  std::vector<Assignment> assignments;
  std::vector<double> iteration_inertias; // one entry per assignment pass
};

namespace detail {

inline double sq_dist(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

// k-means++ seeding: first centroid uniform over rows, then D^2-weighted
// draws. Every centroid starts at a data point.
inline std::vector<std::size_t> kmeanspp_init(const FeatureMatrix& m, int k, Rng& rng) {
  std::vector<std::size_t> chosen;
  chosen.push_back(rng.next_index(m.rows));

  std::vector<double> d2(m.rows, std::numeric_limits<double>::infinity());
  while (chosen.size() < static_cast<std::size_t>(k)) {
    const double* latest = m.row(chosen.back());
    double total = 0.0;
    for (std::size_t i = 0; i < m.rows; ++i) {
      d2[i] = std::min(d2[i], sq_dist(m.row(i), latest, m.cols));
      total += d2[i];
    }
    std::size_t pick;
    if (total <= 0.0) {
      pick = rng.next_index(m.rows);
    } else {
      const double target = rng.next_unit() * total;
      double cum = 0.0;
      pick = m.rows - 1;
      for (std::size_t i = 0; i < m.rows; ++i) {
        cum += d2[i];
        if (cum >= target) {
          pick = i;
          break;
        }
      }
    }
    chosen.push_back(pick);
  }
  return chosen;
}

struct AssignPass {
  std::vector<int> labels;
  std::vector<double> distances; // squared
  double inertia = 0.0;
  std::vector<std::size_t> counts;
};

inline AssignPass assign_to_nearest(const FeatureMatrix& m, const std::vector<double>& centroids,
                                    int k) {
  AssignPass pass;
  pass.labels.resize(m.rows);
  pass.distances.resize(m.rows);
  pass.counts.assign(k, 0);
  for (std::size_t i = 0; i < m.rows; ++i) {
    int best = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (int c = 0; c < k; ++c) {
      const double d2 = sq_dist(m.row(i), centroids.data() + static_cast<std::size_t>(c) * m.cols,
                                m.cols);
      if (d2 < best_d2) {
        best_d2 = d2;
        best = c;
      }
    }
    pass.labels[i] = best;
    pass.distances[i] = best_d2;
    pass.inertia += best_d2;
    ++pass.counts[best];
  }
  return pass;
}

} // namespace detail

// Lloyd iterations from k-means++ seeds until the max centroid shift drops
// below tol or max_iter is reached. Empty clusters are reseeded to the point
// farthest from its currently assigned centroid, keeping k stable.
inline KmeansResult kmeans(const FeatureMatrix& m, int k, std::uint64_t seed, int max_iter = 300,
                           double tol = 1e-6) {
  if (k < 1) throw TooFewRows("kmeans: k must be >= 1");
  if (m.rows < static_cast<std::size_t>(k))
    throw TooFewRows("kmeans: " + std::to_string(m.rows) + " rows < k=" + std::to_string(k));

  Rng rng(seed);
  std::vector<double> centroids(static_cast<std::size_t>(k) * m.cols);
  {
    const auto seeds = detail::kmeanspp_init(m, k, rng);
    for (int c = 0; c < k; ++c)
      std::copy_n(m.row(seeds[c]), m.cols, centroids.begin() + static_cast<std::size_t>(c) * m.cols);
  }

  KmeansResult result;
  detail::AssignPass pass;
  for (int iter = 0; iter < max_iter; ++iter) {
    pass = detail::assign_to_nearest(m, centroids, k);

    for (int c = 0; c < k; ++c) {
      if (pass.counts[c] > 0) continue;
      // farthest point from its assigned centroid takes over the empty slot
      std::size_t farthest = 0;
      for (std::size_t i = 1; i < m.rows; ++i)
        if (pass.distances[i] > pass.distances[farthest]) farthest = i;
      std::copy_n(m.row(farthest), m.cols, centroids.begin() + static_cast<std::size_t>(c) * m.cols);
      pass = detail::assign_to_nearest(m, centroids, k);
    }
    result.iteration_inertias.push_back(pass.inertia);

    std::vector<double> next(static_cast<std::size_t>(k) * m.cols, 0.0);
    for (std::size_t i = 0; i < m.rows; ++i) {
      double* target = next.data() + static_cast<std::size_t>(pass.labels[i]) * m.cols;
      const double* row = m.row(i);
      for (std::size_t c = 0; c < m.cols; ++c) target[c] += row[c];
    }
    double shift = 0.0;
    for (int c = 0; c < k; ++c) {
      double* target = next.data() + static_cast<std::size_t>(c) * m.cols;
      for (std::size_t j = 0; j < m.cols; ++j) target[j] /= static_cast<double>(pass.counts[c]);
      shift = std::max(shift, std::sqrt(detail::sq_dist(
                                  target, centroids.data() + static_cast<std::size_t>(c) * m.cols,
                                  m.cols)));
    }
    centroids = std::move(next);
    if (shift < tol) break;
  }

  // final pass so assignments and inertia are consistent with the final centroids
  pass = detail::assign_to_nearest(m, centroids, k);
  result.iteration_inertias.push_back(pass.inertia);

  result.model.k = k;
  result.model.cols = m.cols;
  result.model.centroids = std::move(centroids);
  result.model.inertia = pass.inertia;
  result.model.seed = seed;

  result.assignments.reserve(m.rows);
  for (std::size_t i = 0; i < m.rows; ++i)
    result.assignments.push_back(
        Assignment{m.row_ids[i], pass.labels[i], std::sqrt(pass.distances[i])});
  return result;
}

// Best-of-restarts wrapper: Lloyd's converges to local optima, so production
// fits run a few independently seeded attempts and keep the lowest inertia.
// Restart seeds derive from (seed, attempt); the result is deterministic.
inline KmeansResult kmeans_best_of(const FeatureMatrix& m, int k, std::uint64_t seed,
                                   int restarts = 8, int max_iter = 300, double tol = 1e-6) {
  KmeansResult best;
  for (int attempt = 0; attempt < std::max(restarts, 1); ++attempt) {
    KmeansResult fit =
        kmeans(m, k, derive_seed(seed, static_cast<std::uint64_t>(attempt)), max_iter, tol);
    if (attempt == 0 || fit.model.inertia < best.model.inertia) best = std::move(fit);
  }
  return best;
}

// Projects rows through the model's stored standardization and assigns each
// to its nearest centroid. Rows are raw (unstandardized) feature rows.
inline std::vector<Assignment> assign_with_model(const ClusterModel& model,
                                                 const FeatureMatrix& raw) {
  if (raw.cols != model.cols)
    throw ModelMismatch("feature dimension " + std::to_string(raw.cols) +
                        " does not match model dimension " + std::to_string(model.cols));
  if (model.column_means.size() != model.cols || model.column_stds.size() != model.cols)
    throw ModelMismatch("model is missing its standardization stats");
  std::vector<Assignment> out;
  out.reserve(raw.rows);
  std::vector<double> z(model.cols);
  for (std::size_t i = 0; i < raw.rows; ++i) {
    for (std::size_t c = 0; c < model.cols; ++c)
      z[c] = (raw.at(i, c) - model.column_means[c]) / model.column_stds[c];
    int best = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (int c = 0; c < model.k; ++c) {
      const double d2 = detail::sq_dist(z.data(), model.centroid(c), model.cols);
      if (d2 < best_d2) {
        best_d2 = d2;
        best = c;
      }
    }
    out.push_back(Assignment{raw.row_ids[i], best, std::sqrt(best_d2)});
  }
  return out;
}

struct SelectKOptions {
  double elbow_threshold = 0.10;
  double balance_floor = 0.02;
  int max_iter = 300;
  double tol = 1e-6;
};

struct SelectKResult {
  int chosen_k = 1;
  std::vector<int> ks;
  std::vector<double> inertias;
  std::vector<double> min_shares;
};

// Elbow-style selection: the chosen k is the largest one whose marginal
// inertia reduction over k-1 clears elbow_threshold while keeping every
// cluster above balance_floor of the sessions. Falls back to the smallest
// k in range when nothing clears.
inline SelectKResult select_k(const FeatureMatrix& m, int k_lo, int k_hi, std::uint64_t seed,
                              const SelectKOptions& opts = {}) {
  if (k_lo < 1 || k_lo > k_hi) throw TooFewRows("select_k: invalid k range");
  SelectKResult r;
  r.chosen_k = k_lo;
  for (int k = k_lo; k <= k_hi; ++k) {
    const KmeansResult fit = kmeans(m, k, seed, opts.max_iter, opts.tol);
    std::vector<std::size_t> counts(k, 0);
    for (const Assignment& a : fit.assignments) ++counts[a.cluster_id];
    const std::size_t min_count = *std::min_element(counts.begin(), counts.end());
    r.ks.push_back(k);
    r.inertias.push_back(fit.model.inertia);
    r.min_shares.push_back(static_cast<double>(min_count) / static_cast<double>(m.rows));
  }
  for (std::size_t i = 1; i < r.ks.size(); ++i) {
    const double prev = r.inertias[i - 1];
    if (prev <= 0.0) continue;
    const double reduction = (prev - r.inertias[i]) / prev;
    if (reduction >= opts.elbow_threshold && r.min_shares[i] >= opts.balance_floor)
      r.chosen_k = r.ks[i];
  }
  return r;
}

// The n members of a cluster closest to its centroid, ties broken by
// session_id. Returns the whole cluster when it has fewer than n members.
inline std::vector<std::string> nearest_sessions(const ClusterModel& model,
                                                 const std::vector<Assignment>& assignments,
                                                 int cluster_id, std::size_t n) {
  if (cluster_id < 0 || cluster_id >= model.k)
    throw UnknownCluster("cluster " + std::to_string(cluster_id) + " not in [0, " +
                         std::to_string(model.k) + ")");
  std::vector<const Assignment*> members;
  for (const Assignment& a : assignments)
    if (a.cluster_id == cluster_id) members.push_back(&a);
  std::sort(members.begin(), members.end(), [](const Assignment* a, const Assignment* b) {
    return std::tie(a->distance, a->session_id) < std::tie(b->distance, b->session_id);
  });
  if (members.size() > n) members.resize(n);
  std::vector<std::string> ids;
  ids.reserve(members.size());
  for (const Assignment* a : members) ids.push_back(a->session_id);
  return ids;
}

inline void to_json(nlohmann::json& j, const ClusterModel& m) {
  j = nlohmann::json{{"k", m.k},
                     {"cols", m.cols},
                     {"centroids", m.centroids},
                     {"column_means", m.column_means},
                     {"column_stds", m.column_stds},
                     {"inertia", m.inertia},
                     {"seed", m.seed}};
}

inline void from_json(const nlohmann::json& j, ClusterModel& m) {
  j.at("k").get_to(m.k);
  j.at("cols").get_to(m.cols);
  j.at("centroids").get_to(m.centroids);
  j.at("column_means").get_to(m.column_means);
  j.at("column_stds").get_to(m.column_stds);
  j.at("inertia").get_to(m.inertia);
  j.at("seed").get_to(m.seed);
}

} // namespace simgym
