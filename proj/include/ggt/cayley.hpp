#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "ggt/errors.hpp"
#include "ggt/free_by_cyclic.hpp"

namespace ggt {

// How distances are computed: exact tree formulas when the group is free
// on its generating set (or is Z on the stable letter), BFS otherwise.
enum class Metric { tree_fiber, tree_z, bfs };

// A group together with a concrete generating set, closed under inversion.
struct GroupContext {
  FcGroup group;
  std::vector<Element> generators;  // declared order first, missing inverses appended
  Metric metric = Metric::bfs;
  Budget budget;

  GroupContext() = default;
  GroupContext(FcGroup g, std::vector<Element> gens, Budget b = {})
      : group(std::move(g)), budget(b) {
    for (const Element& e : gens) {
      if (e.is_identity()) throw ConfigError("generating set contains the identity");
      generators.push_back(e);
    }
    // close under inversion, preserving declared order
    std::vector<Element> inverses;
    for (const Element& e : gens) {
      Element inv = fc_invert(group, e, budget);
      bool present = false;
      for (const Element& f : generators)
        if (f == inv) { present = true; break; }
      for (const Element& f : inverses)
        if (f == inv) { present = true; break; }
      if (!present) inverses.push_back(inv);
    }
    for (Element& e : inverses) generators.push_back(std::move(e));
    metric = detect_metric();
  }

  Element identity() const { return fc_identity(group); }
  Element mul(const Element& a, const Element& b) const { return fc_multiply(group, a, b, budget); }
  Element inv(const Element& a) const { return fc_invert(group, a, budget); }

 private:
  Metric detect_metric() const {
    if (!group.theta.is_identity()) return Metric::bfs;
    if (generators.size() == 2 && generators[0].fiber.empty() &&
        std::abs(generators[0].exponent) == 1)
      return Metric::tree_z;  // <t> = Z
    std::vector<bool> used(group.fiber_alphabet->size(), false);
    for (const Element& e : generators) {
      if (e.exponent != 0 || e.fiber.length() != 1) return Metric::bfs;
      std::uint32_t g = e.fiber.at(0).gen;
      if (e.fiber.at(0).sign > 0) {
        if (used[g]) return Metric::bfs;
        used[g] = true;
      }
    }
    return Metric::tree_fiber;  // free group on distinct fiber letters
  }
};

// Lazily grown BFS ball around the identity; all distance queries reduce
// to it via d(x, y) = d(e, x^-1 y).  Deterministic expansion order.
class DistCache {
 public:
  explicit DistCache(const GroupContext& ctx) : ctx_(&ctx) {
    Element e = ctx.identity();
    dist_.emplace(e.str(), 0);
    frontier_.push_back(std::move(e));
  }

  // Distance from the identity, expanding the ball up to max_radius if
  // needed.  nullopt when the element is farther than max_radius.
  std::optional<std::uint32_t> to_identity(const Element& g, std::uint32_t max_radius) {
    if (ctx_->metric == Metric::tree_fiber)
      return within(static_cast<std::uint32_t>(g.fiber.length()), max_radius);
    if (ctx_->metric == Metric::tree_z)
      return within(static_cast<std::uint32_t>(std::abs(g.exponent)), max_radius);
    std::string key = g.str();
    auto it = dist_.find(key);
    if (it != dist_.end() && (it->second <= max_radius)) return it->second;
    while (radius_done_ < max_radius && !frontier_.empty()) {
      expand_layer();
      it = dist_.find(key);
      if (it != dist_.end()) return it->second;
    }
    it = dist_.find(key);
    if (it != dist_.end() && it->second <= max_radius) return it->second;
    return std::nullopt;
  }

  std::optional<std::uint32_t> between(const Element& x, const Element& y,
                                       std::uint32_t max_radius) {
    return to_identity(ctx_->mul(ctx_->inv(x), y), max_radius);
  }

  std::uint32_t radius_done() const { return radius_done_; }
  std::size_t size() const { return dist_.size(); }

 private:
  std::optional<std::uint32_t> within(std::uint32_t d, std::uint32_t max_radius) const {
    if (d > max_radius) return std::nullopt;
    return d;
  }

  void expand_layer() {
    std::vector<Element> next;
    for (const Element& u : frontier_) {
      for (const Element& s : ctx_->generators) {
        Element w = ctx_->mul(u, s);
        std::string key = w.str();
        if (dist_.emplace(std::move(key), radius_done_ + 1).second) {
          next.push_back(std::move(w));
          ctx_->budget.check_elements(dist_.size(), "distance cache");
        }
      }
    }
    frontier_ = std::move(next);
    ++radius_done_;
  }

  const GroupContext* ctx_;
  std::unordered_map<std::string, std::uint32_t> dist_;
  std::vector<Element> frontier_;
  std::uint32_t radius_done_ = 0;
};

// Distance-indexed enumeration of a closed ball with parent links.
struct BallIndex {
  Element center;
  std::uint32_t radius = 0;
  std::vector<Element> elements;           // BFS order: by distance, then discovery
  std::vector<std::uint32_t> dist;         // parallel to elements
  std::unordered_map<std::string, std::uint32_t> index;  // serialization -> position
  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> parents;
  std::vector<std::size_t> sphere_sizes;   // sphere_sizes[d]

  std::optional<std::uint32_t> distance_of(const Element& g) const {
    auto it = index.find(g.str());
    if (it == index.end()) return std::nullopt;
    return dist[it->second];
  }
  bool contains(const Element& g) const { return index.count(g.str()) != 0; }

  // One line per element: `<distance> <serialization>`, sorted for
  // bit-exact diffs.
  std::vector<std::string> dump() const {
    std::vector<std::pair<std::uint32_t, std::string>> rows;
    rows.reserve(elements.size());
    for (std::size_t i = 0; i < elements.size(); ++i)
      rows.emplace_back(dist[i], elements[i].str());
    std::sort(rows.begin(), rows.end());
    std::vector<std::string> out;
    out.reserve(rows.size());
    for (auto& [d, s] : rows) out.push_back(std::to_string(d) + " " + s);
    return out;
  }
};

inline BallIndex enumerate_ball(const GroupContext& ctx, const Element& center,
                                std::uint32_t radius) {
  BallIndex ball;
  ball.center = center;
  ball.radius = radius;
  ball.index.emplace(center.str(), 0);
  ball.elements.push_back(center);
  ball.dist.push_back(0);
  ball.sphere_sizes.assign(radius + 1, 0);
  ball.sphere_sizes[0] = 1;
  std::size_t layer_begin = 0;
  for (std::uint32_t d = 0; d < radius; ++d) {
    std::size_t layer_end = ball.elements.size();
    for (std::size_t i = layer_begin; i < layer_end; ++i) {
      Element u = ball.elements[i];  // copy: vector may reallocate below
      for (const Element& s : ctx.generators) {
        Element w = ctx.mul(u, s);
        std::string key = w.str();
        if (ball.index.emplace(std::move(key), ball.elements.size()).second) {
          ball.elements.push_back(std::move(w));
          ball.dist.push_back(d + 1);
          ++ball.sphere_sizes[d + 1];
          ctx.budget.check_elements(ball.elements.size(), "enumerate_ball");
        }
      }
    }
    layer_begin = layer_end;
  }
  // parent links: predecessors at distance d-1 only
  ball.parents.assign(ball.elements.size(), {});
  for (std::uint32_t i = 0; i < ball.elements.size(); ++i) {
    for (std::uint32_t s = 0; s < ctx.generators.size(); ++s) {
      Element w = ctx.mul(ball.elements[i], ctx.generators[s]);
      auto it = ball.index.find(w.str());
      if (it != ball.index.end() && ball.dist[it->second] == ball.dist[i] + 1)
        ball.parents[it->second].emplace_back(i, s);
    }
  }
  return ball;
}

// All vertices lying on some geodesic from x to y, layered by distance
// from x.  Built from a forward walk pruned by distances to y.
struct GeodesicDag {
  Element x, y;
  std::uint32_t length = 0;                 // d(x, y)
  std::vector<std::vector<Element>> layers; // layers[i]: DAG vertices at d(x, .) = i
};

inline GeodesicDag build_geodesic_dag(const GroupContext& ctx, DistCache& cache,
                                      const Element& x, const Element& y,
                                      std::uint32_t max_distance) {
  auto D = cache.between(x, y, max_distance);
  if (!D) throw CoverageError("geodesic dag: endpoints farther apart than " +
                              std::to_string(max_distance));
  GeodesicDag dag;
  dag.x = x;
  dag.y = y;
  dag.length = *D;
  dag.layers.assign(*D + 1, {});
  dag.layers[0].push_back(x);
  std::unordered_map<std::string, bool> seen;
  seen.emplace(x.str(), true);
  for (std::uint32_t i = 0; i < *D; ++i) {
    for (const Element& u : dag.layers[i]) {
      for (const Element& s : ctx.generators) {
        Element w = ctx.mul(u, s);
        std::string key = w.str();
        if (seen.count(key)) continue;
        auto dy = cache.between(w, y, *D - i - 1);
        if (dy && *dy == *D - i - 1) {
          seen.emplace(std::move(key), true);
          dag.layers[i + 1].push_back(std::move(w));
        }
      }
    }
  }
  return dag;
}

// Gromov products carry halves; keep them doubled.
struct Half {
  std::int64_t twice = 0;
  double value() const { return static_cast<double>(twice) / 2.0; }
  std::string str() const {
    if (twice % 2 == 0) return std::to_string(twice / 2);
    return std::to_string(twice) + "/2";
  }
  bool operator==(const Half& o) const { return twice == o.twice; }
  bool operator<(const Half& o) const { return twice < o.twice; }
};

// (x . y)_base = (d(x,base) + d(y,base) - d(x,y)) / 2, exact.
inline Half gromov_product(const GroupContext& ctx, DistCache& cache, const Element& x,
                           const Element& y, const Element& base, std::uint32_t max_radius) {
  auto dx = cache.between(base, x, max_radius);
  auto dy = cache.between(base, y, max_radius);
  auto dxy = cache.between(x, y, 2 * max_radius);
  if (!dx || !dy || !dxy)
    throw CoverageError("gromov_product: a distance exceeds the enumerated radius");
  return Half{static_cast<std::int64_t>(*dx) + *dy - *dxy};
}

// Minimum over all geodesics [x,y] of d(base, .), exact on the DAG.
// Distances from base use the supplied identity-centered ball when
// base is its center; vertices outside the ball cannot beat an in-ball
// minimum, so the result is exact whenever any DAG vertex is indexed.
inline std::uint32_t geodesics_min_distance_to(const GroupContext& ctx, DistCache& cache,
                                               const BallIndex& base_ball, const Element& x,
                                               const Element& y, std::uint32_t max_distance) {
  GeodesicDag dag = build_geodesic_dag(ctx, cache, x, y, max_distance);
  std::optional<std::uint32_t> best;
  for (const auto& layer : dag.layers)
    for (const Element& v : layer)
      if (auto d = base_ball.distance_of(v); d && (!best || *d < *best)) best = *d;
  if (!best)
    throw CoverageError("geodesics_min_distance_to: every geodesic vertex is outside the ball");
  return *best;
}

// Four-point defect estimate.  value2 = 2 * delta-hat; the witness is a
// quadruple of ball positions reproducing the maximum.
struct DeltaEstimate {
  std::int64_t value2 = 0;
  std::array<std::uint32_t, 4> witness{0, 0, 0, 0};
  bool exhaustive = true;
  std::size_t quadruples_scanned = 0;
  Half value() const { return Half{value2}; }
};

namespace detail {

// Pairwise distance matrix over the ball, via the identity-centered cache
// (pair distances reach 2 * radius).
inline std::vector<std::int16_t> distance_matrix(const GroupContext& ctx, DistCache& cache,
                                                 const BallIndex& ball) {
  const std::size_t n = ball.elements.size();
  std::vector<std::int16_t> D(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    Element xi_inv = ctx.inv(ball.elements[i]);
    for (std::size_t j = i + 1; j < n; ++j) {
      auto d = cache.to_identity(ctx.mul(xi_inv, ball.elements[j]), 2 * ball.radius);
      if (!d) throw CoverageError("delta scan: pair distance not covered");
      D[i * n + j] = static_cast<std::int16_t>(*d);
      D[j * n + i] = static_cast<std::int16_t>(*d);
    }
  }
  return D;
}

// Defect of one unordered quadruple from its three pair-sums: the gap
// between the largest and the middle sum (doubled delta).
inline std::int64_t quad_defect2(std::int64_t s1, std::int64_t s2, std::int64_t s3) {
  std::int64_t mx = std::max(s1, std::max(s2, s3));
  std::int64_t mn = std::min(s1, std::min(s2, s3));
  return 2 * mx + mn - (s1 + s2 + s3);  // = max - middle
}

}  // namespace detail

// Exhaustive mode scans every unordered quadruple of ball elements; the
// quadruple defect equals the worst four-point defect over every choice of
// basepoint inside the quadruple, so value2/2 is a certified lower bound
// for the true delta of the whole space.  Exhaustive mode is capped;
// larger balls fall back to seeded sampling.
inline DeltaEstimate estimate_delta(const GroupContext& ctx, DistCache& cache,
                                    const BallIndex& ball, bool exhaustive,
                                    std::size_t sample_size = 1'000'000,
                                    std::uint64_t seed = 0,
                                    std::size_t exhaustive_cap = 3000) {
  const std::size_t n = ball.elements.size();
  DeltaEstimate est;
  if (exhaustive && n > exhaustive_cap)
    throw BudgetError("estimate_delta: ball too large for the exhaustive quartic scan", n);

  if (exhaustive) {
    est.exhaustive = true;
    std::vector<std::int16_t> D = detail::distance_matrix(ctx, cache, ball);
    // Hot loop: for fixed i<j<k the three sums over l read contiguous rows.
    for (std::size_t i = 0; n >= 4 && i + 3 < n; ++i) {
      const std::int16_t* Di = &D[i * n];
      for (std::size_t j = i + 1; j + 2 < n; ++j) {
        const std::int16_t* Dj = &D[j * n];
        const std::int16_t c_ij = Di[j];
        for (std::size_t k = j + 1; k + 1 < n; ++k) {
          const std::int16_t* Dk = &D[k * n];
          const std::int16_t c_ik = Di[k];
          const std::int16_t c_jk = Dj[k];
          // Max-only reduction keeps the loop branch-free so it vectorizes;
          // the witness index is recovered by a rescan only on improvement.
          std::int16_t best = static_cast<std::int16_t>(est.value2);
          for (std::size_t l = k + 1; l < n; ++l) {
            std::int16_t s1 = static_cast<std::int16_t>(c_ij + Dk[l]);
            std::int16_t s2 = static_cast<std::int16_t>(c_ik + Dj[l]);
            std::int16_t s3 = static_cast<std::int16_t>(c_jk + Di[l]);
            std::int16_t mx = std::max(s1, std::max(s2, s3));
            std::int16_t mn = std::min(s1, std::min(s2, s3));
            std::int16_t d2 = static_cast<std::int16_t>(2 * mx + mn - (s1 + s2 + s3));
            best = std::max(best, d2);
          }
          if (best > est.value2) {
            est.value2 = best;
            for (std::size_t l = k + 1; l < n; ++l) {
              std::int32_t s1 = c_ij + Dk[l], s2 = c_ik + Dj[l], s3 = c_jk + Di[l];
              if (detail::quad_defect2(s1, s2, s3) == best) {
                est.witness = {static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j),
                               static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(l)};
                break;
              }
            }
          }
          est.quadruples_scanned += n - k - 1;
        }
      }
    }
  } else {
    est.exhaustive = false;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    auto dist_of = [&](std::size_t p, std::size_t q) -> std::int64_t {
      auto d = cache.between(ball.elements[p], ball.elements[q], 2 * ball.radius);
      if (!d) throw CoverageError("delta scan: pair distance not covered");
      return *d;
    };
    for (std::size_t s = 0; s < sample_size; ++s) {
      std::size_t i = pick(rng), j = pick(rng), k = pick(rng), l = pick(rng);
      std::int64_t s1 = dist_of(i, j) + dist_of(k, l);
      std::int64_t s2 = dist_of(i, k) + dist_of(j, l);
      std::int64_t s3 = dist_of(i, l) + dist_of(j, k);
      std::int64_t d2 = detail::quad_defect2(s1, s2, s3);
      if (d2 > est.value2) {
        est.value2 = d2;
        est.witness = {static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j),
                       static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(l)};
      }
      ++est.quadruples_scanned;
    }
  }
  return est;
}

// Audit of |d(e, [a,b]) - (a.b)_e| <= 6 delta-hat + slack over the given
// pairs.  Pairs whose geodesic DAG leaves the ball are skipped and
// counted; a violation means delta-hat must be raised (re-run with a
// larger ball), never silently passed.
struct AuditReport {
  struct Row {
    std::string a, b;
    Half product;
    std::uint32_t min_dist = 0;
    bool pass = true;
  };
  std::size_t pairs_checked = 0;
  std::size_t pairs_skipped = 0;  // DAG exits the enumerated ball
  std::vector<Row> violations;
  std::vector<Row> rows;  // populated when keep_rows
};

inline AuditReport lemma21_audit(const GroupContext& ctx, DistCache& cache,
                                 const BallIndex& ball, std::int64_t delta2,
                                 const std::vector<std::pair<Element, Element>>& pairs,
                                 std::int64_t slack2 = 0, bool keep_rows = false) {
  AuditReport report;
  for (const auto& [a, b] : pairs) {
    Half gp = gromov_product(ctx, cache, a, b, ball.center, ball.radius);
    std::uint32_t min_dist;
    try {
      GeodesicDag dag = build_geodesic_dag(ctx, cache, a, b, 2 * ball.radius);
      bool in_ball = true;
      std::optional<std::uint32_t> best;
      for (const auto& layer : dag.layers)
        for (const Element& v : layer) {
          auto d = ball.distance_of(v);
          if (!d) { in_ball = false; continue; }
          if (!best || *d < *best) best = *d;
        }
      if (!in_ball || !best) {
        ++report.pairs_skipped;
        continue;
      }
      min_dist = *best;
    } catch (const CoverageError&) {
      ++report.pairs_skipped;
      continue;
    }
    ++report.pairs_checked;
    std::int64_t defect2 = std::abs(2 * static_cast<std::int64_t>(min_dist) - gp.twice);
    AuditReport::Row row{a.str(), b.str(), gp, min_dist, defect2 <= 6 * delta2 + slack2};
    if (!row.pass) report.violations.push_back(row);
    if (keep_rows) report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace ggt
