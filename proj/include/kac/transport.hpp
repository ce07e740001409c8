#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "kac/vec3.hpp"

namespace kac {

/// Equally weighted point cloud (1/n) sum delta_{x_i}.
struct EmpiricalMeasure {
  std::vector<Vec3> points;

  EmpiricalMeasure() = default;
  explicit EmpiricalMeasure(std::vector<Vec3> pts) : points(std::move(pts)) {}

  std::size_t size() const { return points.size(); }
  double second_moment() const;
};

/// Minimum-cost perfect matching for the n x n squared-distance cost between
/// two clouds (shortest augmenting path, O(n^3) worst case). Returns
/// assignment[i] = column matched to row i.
std::vector<std::size_t> optimal_assignment(std::span<const Vec3> a, std::span<const Vec3> b);

/// Exact W2^2 between equal-size uniform empirical measures:
/// min over permutations of (1/n) sum |a_i - b_perm(i)|^2.
/// Throws DomainError on size mismatch or empty input.
double w2_squared_exact(const EmpiricalMeasure& a, const EmpiricalMeasure& b);
double w2_squared_exact(std::span<const Vec3> a, std::span<const Vec3> b);

/// Squared 1D W2 between the projections of a and b on direction u
/// (sorted pairing).
double projected_w2_squared(std::span<const Vec3> a, std::span<const Vec3> b, const Vec3& u);

/// Sliced estimator: mean projected W2^2 over n_projections random unit
/// directions drawn from `seed`.
double w2_squared_sliced(const EmpiricalMeasure& a, const EmpiricalMeasure& b, std::size_t n_projections,
                         std::uint64_t seed);

/// Sliced estimator over caller-supplied directions (normalized internally).
double w2_squared_sliced(const EmpiricalMeasure& a, const EmpiricalMeasure& b, std::span<const Vec3> directions);

/// Both sides of
///   W2^2(l f + (1-l) g, l f' + (1-l) g') <= l W2^2(f, f') + (1-l) W2^2(g, g')
/// with l = |f| / (|f| + |g|); mixtures are realized by concatenation.
struct ConvexityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double lambda = 0.0;
  bool holds = false;
};
ConvexityCheck mixture_convexity_check(const EmpiricalMeasure& f, const EmpiricalMeasure& f_prime,
                                       const EmpiricalMeasure& g, const EmpiricalMeasure& g_prime);

/// Block-subsampled comparison of a large cloud against a reference of size
/// block_k: mean exact W2^2 over the floor(m / block_k) disjoint consecutive
/// blocks of `big`. The l = m mod block_k leftover points are dropped and
/// bias_bound = (l/m)(2 m2(reference) + 2 m2(big)) is reported.
struct SubsampleResult {
  double mean_w2_squared = 0.0;
  double bias_bound = 0.0;
  std::size_t blocks = 0;
  std::size_t leftover = 0;
  std::vector<double> per_block;
};
SubsampleResult subsample_compare(const EmpiricalMeasure& big, const EmpiricalMeasure& reference,
                                  std::size_t block_k);

}  // namespace kac
