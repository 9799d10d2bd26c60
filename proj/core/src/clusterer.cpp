#include "codesign/clusterer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "codesign/util.hpp"

namespace codesign {

double point_distance(const std::vector<double>& a, const std::vector<double>& b,
                      ClusterMetric metric) {
  double acc = 0.0;
  if (metric == ClusterMetric::kEuclidean) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double d = a[i] - b[i];
      acc += d * d;
    }
    return std::sqrt(acc);
  }
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::fabs(a[i] - b[i]);
  return acc;
}

namespace {

class DistanceMatrix {
 public:
  DistanceMatrix(const std::vector<std::vector<double>>& points, ClusterMetric metric)
      : m_(points.size()), d_(m_ * m_, 0.0) {
    for (std::size_t i = 0; i < m_; ++i) {
      for (std::size_t j = i + 1; j < m_; ++j) {
        const double d = point_distance(points[i], points[j], metric);
        d_[i * m_ + j] = d;
        d_[j * m_ + i] = d;
      }
    }
  }
  double operator()(std::size_t i, std::size_t j) const { return d_[i * m_ + j]; }
  std::size_t size() const { return m_; }

 private:
  std::size_t m_;
  std::vector<double> d_;
};

// k-means++ style seeding restricted to dataset members: first medoid uniform,
// the rest sampled proportionally to the squared distance to the nearest
// chosen medoid. Falls back to the lowest unchosen index when all remaining
// weights vanish (duplicates, or k close to m).
std::vector<std::size_t> seed_medoids(const DistanceMatrix& dist, std::size_t k,
                                      std::uint64_t seed) {
  const std::size_t m = dist.size();
  const SeededRng rng(seed);
  std::vector<bool> chosen(m, false);
  std::vector<double> nearest(m, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> medoids;
  medoids.reserve(k);

  std::size_t first = rng.below(0, m);
  medoids.push_back(first);
  chosen[first] = true;
  for (std::size_t i = 0; i < m; ++i) nearest[i] = dist(i, first);

  for (std::size_t pick = 1; pick < k; ++pick) {
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (!chosen[i]) total += nearest[i] * nearest[i];
    }
    std::size_t next = m;
    if (total > 0.0) {
      const double r = rng.uniform(pick) * total;
      double acc = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        if (chosen[i]) continue;
        acc += nearest[i] * nearest[i];
        if (acc >= r) {
          next = i;
          break;
        }
      }
    }
    if (next == m) {
      for (std::size_t i = 0; i < m; ++i) {
        if (!chosen[i]) {
          next = i;
          break;
        }
      }
    }
    medoids.push_back(next);
    chosen[next] = true;
    for (std::size_t i = 0; i < m; ++i) nearest[i] = std::min(nearest[i], dist(i, next));
  }
  std::sort(medoids.begin(), medoids.end());
  return medoids;
}

struct Nearest {
  std::vector<int> label;        // index into medoids
  std::vector<double> d1;        // distance to nearest medoid
  std::vector<double> d2;        // distance to second-nearest medoid
};

Nearest assign(const DistanceMatrix& dist, const std::vector<std::size_t>& medoids) {
  const std::size_t m = dist.size();
  Nearest near;
  near.label.assign(m, 0);
  near.d1.assign(m, std::numeric_limits<double>::infinity());
  near.d2.assign(m, std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t c = 0; c < medoids.size(); ++c) {
      const double d = dist(i, medoids[c]);
      if (d < near.d1[i]) {
        near.d2[i] = near.d1[i];
        near.d1[i] = d;
        near.label[i] = static_cast<int>(c);
      } else if (d < near.d2[i]) {
        near.d2[i] = d;
      }
    }
  }
  return near;
}

// Change in total cost when medoid at position `pos` is replaced by point o.
double swap_delta(const DistanceMatrix& dist, const std::vector<std::size_t>& medoids,
                  const Nearest& near, std::size_t pos, std::size_t o) {
  double delta = 0.0;
  const std::size_t removed = medoids[pos];
  for (std::size_t i = 0; i < dist.size(); ++i) {
    const double d_new = dist(i, o);
    if (medoids[static_cast<std::size_t>(near.label[i])] == removed) {
      // Point loses its medoid: reassigns to min(second nearest, new medoid).
      delta += std::min(d_new, near.d2[i]) - near.d1[i];
    } else if (d_new < near.d1[i]) {
      delta += d_new - near.d1[i];
    }
  }
  return delta;
}

}  // namespace

ClusterAssignment kmedoids(const std::vector<std::vector<double>>& points, std::size_t k,
                           std::uint64_t seed, ClusterMetric metric) {
  const std::size_t m = points.size();
  if (k < 1 || k > m) throw std::invalid_argument("kmedoids: k must be in [1, m]");
  for (const auto& p : points) {
    if (p.size() != points.front().size())
      throw std::invalid_argument("kmedoids: inconsistent point dimensions");
  }

  const DistanceMatrix dist(points, metric);
  auto medoids = seed_medoids(dist, k, seed);
  auto near = assign(dist, medoids);

  // First-improvement swap scan in fixed index order; restart after a swap.
  bool improved = true;
  std::vector<bool> is_medoid(m, false);
  while (improved) {
    improved = false;
    is_medoid.assign(m, false);
    for (auto mi : medoids) is_medoid[mi] = true;
    for (std::size_t pos = 0; pos < medoids.size() && !improved; ++pos) {
      for (std::size_t o = 0; o < m && !improved; ++o) {
        if (is_medoid[o]) continue;
        if (swap_delta(dist, medoids, near, pos, o) < -1e-12) {
          medoids[pos] = o;
          std::sort(medoids.begin(), medoids.end());
          near = assign(dist, medoids);
          improved = true;
        }
      }
    }
  }

  ClusterAssignment out;
  out.k = k;
  out.medoids = medoids;
  out.labels = near.label;
  out.within_sums.assign(k, 0.0);
  out.within_max.assign(k, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const auto c = static_cast<std::size_t>(near.label[i]);
    out.within_sums[c] += near.d1[i];
    out.within_max[c] = std::max(out.within_max[c], near.d1[i]);
  }
  for (double s : out.within_sums) out.total += s;
  return out;
}

double mean_silhouette(const std::vector<std::vector<double>>& points,
                       const ClusterAssignment& assignment, ClusterMetric metric) {
  const std::size_t m = points.size();
  const std::size_t k = assignment.k;
  if (k < 2) throw std::invalid_argument("silhouette: requires k >= 2");
  std::vector<std::size_t> cluster_size(k, 0);
  for (int label : assignment.labels) ++cluster_size[static_cast<std::size_t>(label)];

  double acc = 0.0;
  std::vector<double> mean_to_cluster(k);
  for (std::size_t i = 0; i < m; ++i) {
    const auto own = static_cast<std::size_t>(assignment.labels[i]);
    if (cluster_size[own] <= 1) {
      acc += 1.0;  // singleton convention
      continue;
    }
    std::fill(mean_to_cluster.begin(), mean_to_cluster.end(), 0.0);
    for (std::size_t j = 0; j < m; ++j) {
      if (j == i) continue;
      mean_to_cluster[static_cast<std::size_t>(assignment.labels[j])] +=
          point_distance(points[i], points[j], metric);
    }
    double a = 0.0;
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c) {
      if (c == own) {
        a = mean_to_cluster[c] / static_cast<double>(cluster_size[c] - 1);
      } else if (cluster_size[c] > 0) {
        b = std::min(b, mean_to_cluster[c] / static_cast<double>(cluster_size[c]));
      }
    }
    acc += (b - a) / std::max(a, b);
  }
  return acc / static_cast<double>(m);
}

std::vector<ClusterDiagnosticsRow> cluster_diagnostics(
    const std::vector<std::vector<double>>& points, std::size_t k_lo, std::size_t k_hi,
    const std::vector<std::uint64_t>& seeds, ClusterMetric metric) {
  if (k_lo < 2 || k_hi > points.size() || k_lo > k_hi)
    throw std::invalid_argument("cluster_diagnostics: k range must lie within [2, m]");
  std::vector<ClusterDiagnosticsRow> rows;
  for (std::size_t k = k_lo; k <= k_hi; ++k) {
    for (auto seed : seeds) {
      const auto assignment = kmedoids(points, k, seed, metric);
      ClusterDiagnosticsRow row;
      row.k = k;
      row.seed = seed;
      row.total = assignment.total;
      for (double v : assignment.within_max) row.max_dist = std::max(row.max_dist, v);
      row.mean_silhouette = mean_silhouette(points, assignment, metric);
      rows.push_back(row);
    }
  }
  return rows;
}

void write_diagnostics_csv(const std::vector<ClusterDiagnosticsRow>& rows, std::ostream& out) {
  out << "k,seed,total,max_dist,silhouette\n";
  for (const auto& row : rows) {
    out << row.k << ',' << row.seed << ',' << row.total << ',' << row.max_dist << ','
        << row.mean_silhouette << '\n';
  }
}

}  // namespace codesign
