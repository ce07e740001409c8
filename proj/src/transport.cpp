#include "kac/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "kac/errors.hpp"
#include "kac/rng.hpp"

namespace kac {

double EmpiricalMeasure::second_moment() const {
  if (points.empty()) return 0.0;
  double s = 0.0;
  for (const Vec3& p : points) s += norm2(p);
  return s / static_cast<double>(points.size());
}

std::vector<std::size_t> optimal_assignment(std::span<const Vec3> a, std::span<const Vec3> b) {
  const std::size_t n = a.size();
  if (b.size() != n) throw DomainError("optimal_assignment: size mismatch");
  constexpr double kInf = std::numeric_limits<double>::infinity();
  constexpr std::ptrdiff_t kNone = -1;

  // Structure-of-arrays copy of the columns for the inner scan.
  std::vector<double> bx(n), by(n), bz(n);
  for (std::size_t j = 0; j < n; ++j) {
    bx[j] = b[j].x;
    by[j] = b[j].y;
    bz[j] = b[j].z;
  }

  std::vector<double> u(n, 0.0), v(n, 0.0), spc(n);
  std::vector<std::ptrdiff_t> path(n, kNone), col4row(n, kNone), row4col(n, kNone);
  std::vector<std::size_t> remaining(n);
  std::vector<char> sr(n), sc(n);

  for (std::size_t cur = 0; cur < n; ++cur) {
    // Dijkstra-style search for the shortest augmenting path from row `cur`
    // in the reduced costs c(i, j) - u_i - v_j >= 0.
    double min_val = 0.0;
    std::size_t i = cur;
    std::size_t num_remaining = n;
    for (std::size_t k = 0; k < n; ++k) remaining[k] = n - k - 1;
    std::fill(sr.begin(), sr.end(), 0);
    std::fill(sc.begin(), sc.end(), 0);
    std::fill(spc.begin(), spc.end(), kInf);

    std::ptrdiff_t sink = kNone;
    while (sink == kNone) {
      std::size_t index = 0;
      double lowest = kInf;
      sr[i] = 1;
      const double ax = a[i].x, ay = a[i].y, az = a[i].z;
      const double base = min_val - u[i];
      for (std::size_t it = 0; it < num_remaining; ++it) {
        const std::size_t j = remaining[it];
        const double dx = ax - bx[j], dy = ay - by[j], dz = az - bz[j];
        const double r = base + (dx * dx + dy * dy + dz * dz) - v[j];
        if (r < spc[j]) {
          path[j] = static_cast<std::ptrdiff_t>(i);
          spc[j] = r;
        }
        if (spc[j] < lowest || (spc[j] == lowest && row4col[j] == kNone)) {
          lowest = spc[j];
          index = it;
        }
      }
      min_val = lowest;
      const std::size_t j = remaining[index];
      if (row4col[j] == kNone) {
        sink = static_cast<std::ptrdiff_t>(j);
      } else {
        i = static_cast<std::size_t>(row4col[j]);
      }
      sc[j] = 1;
      remaining[index] = remaining[--num_remaining];
    }

    u[cur] += min_val;
    for (std::size_t r = 0; r < n; ++r)
      if (sr[r] && r != cur) u[r] += min_val - spc[static_cast<std::size_t>(col4row[r])];
    for (std::size_t c = 0; c < n; ++c)
      if (sc[c]) v[c] -= min_val - spc[c];

    std::ptrdiff_t j = sink;
    for (;;) {
      const std::ptrdiff_t r = path[static_cast<std::size_t>(j)];
      row4col[static_cast<std::size_t>(j)] = r;
      std::swap(col4row[static_cast<std::size_t>(r)], j);
      if (static_cast<std::size_t>(r) == cur) break;
    }
  }

  std::vector<std::size_t> out(n);
  for (std::size_t r = 0; r < n; ++r) out[r] = static_cast<std::size_t>(col4row[r]);
  return out;
}

double w2_squared_exact(std::span<const Vec3> a, std::span<const Vec3> b) {
  if (a.size() != b.size()) throw DomainError("w2_squared_exact: measures must have equal size");
  if (a.empty()) throw DomainError("w2_squared_exact: empty measure");
  const auto assignment = optimal_assignment(a, b);
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) total += norm2(a[i] - b[assignment[i]]);
  return total / static_cast<double>(a.size());
}

double w2_squared_exact(const EmpiricalMeasure& a, const EmpiricalMeasure& b) {
  return w2_squared_exact(std::span<const Vec3>(a.points), std::span<const Vec3>(b.points));
}

double projected_w2_squared(std::span<const Vec3> a, std::span<const Vec3> b, const Vec3& u) {
  if (a.size() != b.size() || a.empty()) throw DomainError("projected_w2_squared: need equal nonempty sizes");
  std::vector<double> pa(a.size()), pb(b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    pa[i] = dot(a[i], u);
    pb[i] = dot(b[i], u);
  }
  std::sort(pa.begin(), pa.end());
  std::sort(pb.begin(), pb.end());
  double s = 0.0;
  for (std::size_t i = 0; i < pa.size(); ++i) s += (pa[i] - pb[i]) * (pa[i] - pb[i]);
  return s / static_cast<double>(pa.size());
}

double w2_squared_sliced(const EmpiricalMeasure& a, const EmpiricalMeasure& b, std::span<const Vec3> directions) {
  if (directions.empty()) throw DomainError("w2_squared_sliced: need at least one direction");
  double s = 0.0;
  for (const Vec3& d : directions) {
    const double len = norm(d);
    if (!(len > 0.0)) throw DomainError("w2_squared_sliced: zero direction");
    s += projected_w2_squared(a.points, b.points, (1.0 / len) * d);
  }
  return s / static_cast<double>(directions.size());
}

double w2_squared_sliced(const EmpiricalMeasure& a, const EmpiricalMeasure& b, std::size_t n_projections,
                         std::uint64_t seed) {
  if (n_projections == 0) throw DomainError("w2_squared_sliced: need at least one projection");
  Rng rng(seed);
  std::vector<Vec3> dirs;
  dirs.reserve(n_projections);
  while (dirs.size() < n_projections) {
    const double x = rng.normal();
    const double y = rng.normal();
    const double z = rng.normal();
    const Vec3 d{x, y, z};
    if (norm2(d) > 0.0) dirs.push_back(d);
  }
  return w2_squared_sliced(a, b, dirs);
}

ConvexityCheck mixture_convexity_check(const EmpiricalMeasure& f, const EmpiricalMeasure& f_prime,
                                       const EmpiricalMeasure& g, const EmpiricalMeasure& g_prime) {
  if (f.size() != f_prime.size() || g.size() != g_prime.size() || f.size() == 0 || g.size() == 0)
    throw DomainError("mixture_convexity_check: need |f| = |f'| > 0 and |g| = |g'| > 0");
  ConvexityCheck out;
  out.lambda = static_cast<double>(f.size()) / static_cast<double>(f.size() + g.size());
  std::vector<Vec3> mix = f.points;
  mix.insert(mix.end(), g.points.begin(), g.points.end());
  std::vector<Vec3> mix_prime = f_prime.points;
  mix_prime.insert(mix_prime.end(), g_prime.points.begin(), g_prime.points.end());
  out.lhs = w2_squared_exact(mix, mix_prime);
  out.rhs = out.lambda * w2_squared_exact(f, f_prime) + (1.0 - out.lambda) * w2_squared_exact(g, g_prime);
  out.holds = out.lhs <= out.rhs + 1e-12 * std::max(1.0, out.rhs);
  return out;
}

SubsampleResult subsample_compare(const EmpiricalMeasure& big, const EmpiricalMeasure& reference,
                                  std::size_t block_k) {
  const std::size_t m = big.size();
  if (block_k == 0) throw DomainError("subsample_compare: block size must be positive");
  if (block_k > m) throw DomainError("subsample_compare: block size exceeds the large measure");
  if (reference.size() != block_k) throw DomainError("subsample_compare: reference size must equal block size");
  SubsampleResult out;
  out.blocks = m / block_k;
  out.leftover = m % block_k;
  const std::span<const Vec3> all(big.points);
  for (std::size_t r = 0; r < out.blocks; ++r)
    out.per_block.push_back(w2_squared_exact(all.subspan(r * block_k, block_k), reference.points));
  out.mean_w2_squared =
      std::accumulate(out.per_block.begin(), out.per_block.end(), 0.0) / static_cast<double>(out.blocks);
  out.bias_bound = static_cast<double>(out.leftover) / static_cast<double>(m) *
                   (2.0 * reference.second_moment() + 2.0 * big.second_moment());
  return out;
}

}  // namespace kac
