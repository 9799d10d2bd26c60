#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace codesign {

enum class ClusterMetric { kEuclidean, kManhattan };

struct ClusterAssignment {
  std::size_t k = 0;
  std::vector<std::size_t> medoids;  // point indices, ascending
  std::vector<int> labels;           // per point: position in `medoids`
  std::vector<double> within_sums;   // per cluster: sum of d(point, medoid)
  std::vector<double> within_max;    // per cluster: max d(point, medoid)
  double total = 0.0;
};

// PAM-style k-medoids: k-means++ seeded initialisation, then first-improvement
// swap scans in fixed index order until no single swap helps. Deterministic
// for a fixed seed.
ClusterAssignment kmedoids(const std::vector<std::vector<double>>& points, std::size_t k,
                           std::uint64_t seed, ClusterMetric metric = ClusterMetric::kEuclidean);

struct ClusterDiagnosticsRow {
  std::size_t k = 0;
  std::uint64_t seed = 0;
  double total = 0.0;
  double max_dist = 0.0;
  double mean_silhouette = 0.0;
};

// Sweeps k over [k_lo, k_hi] for each seed; silhouette of singleton clusters
// is reported as 1.0 by convention (so k = m rows read 0 / 1.0).
std::vector<ClusterDiagnosticsRow> cluster_diagnostics(
    const std::vector<std::vector<double>>& points, std::size_t k_lo, std::size_t k_hi,
    const std::vector<std::uint64_t>& seeds, ClusterMetric metric = ClusterMetric::kEuclidean);

double mean_silhouette(const std::vector<std::vector<double>>& points,
                       const ClusterAssignment& assignment,
                       ClusterMetric metric = ClusterMetric::kEuclidean);

void write_diagnostics_csv(const std::vector<ClusterDiagnosticsRow>& rows, std::ostream& out);

double point_distance(const std::vector<double>& a, const std::vector<double>& b,
                      ClusterMetric metric);

}  // namespace codesign
