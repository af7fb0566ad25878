#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ggt/cayley.hpp"
#include "ggt/distortion.hpp"
#include "ggt/free_by_cyclic.hpp"

namespace ggt {

// --- boundary-map criterion profiles ---
//
// For an inclusion f of the free subgroup (exact tree metric over the
// basis) into the ambient group (word metric via breadth-first search),
// three divergence profiles are measured:
//   M(N)   = min ambient Gromov product (f(x).f(y))_{f(e)} over pairs
//            whose tree product (x.y)_e is at least N,
//   M'(N)  = min distance from e to any ambient geodesic [f(x),f(y)]
//            over pairs whose tree geodesic [x,y] stays N away from e
//            (in a tree that is again the condition (x.y)_e >= N),
//   M''(N) = min distance from e to any ambient geodesic [f(z),f(y)]
//            over z on the tree geodesic [e,y] with |z| >= N.
// Every value is a minimum over the enumerated candidate set only, hence
// an upper bound on the true infimum restricted to that range.

struct MitraProfileRow {
  std::uint32_t N = 0;
  std::optional<Half> M;                 // empty: no qualifying pair enumerated
  std::optional<std::uint32_t> M_prime;
  std::optional<std::uint32_t> M_dprime;
};

struct MitraProfile {
  std::vector<MitraProfileRow> rows;
  std::uint32_t lambda_radius = 0;   // basis-word enumeration radius
  std::uint32_t gamma_radius = 0;    // ambient ball radius backing distances
  std::size_t pairs_scanned = 0;
  std::size_t pairs_sampled = 0;     // pairs actually evaluated for M'/M''

  // header: N,M,M_prime,M_dprime ("inf" when no candidate qualified)
  std::vector<std::string> csv() const {
    std::vector<std::string> out{"N,M,M_prime,M_dprime"};
    for (const MitraProfileRow& r : rows)
      out.push_back(std::to_string(r.N) + "," + (r.M ? r.M->str() : "inf") + "," +
                    (r.M_prime ? std::to_string(*r.M_prime) : "inf") + "," +
                    (r.M_dprime ? std::to_string(*r.M_dprime) : "inf"));
    return out;
  }
};

struct MitraOptions {
  std::uint32_t n_max = 4;          // rows are N = 0 .. n_max
  std::uint32_t lambda_radius = 4;  // basis words enumerated to this length
  std::uint32_t gamma_radius = 8;   // horizon for ambient distances
  std::size_t pair_budget = 50'000; // cap on geodesic-scanned pairs, stride-sampled beyond
};

namespace detail {

struct LambdaPoint {
  Word word;        // reduced basis word (tree coordinates)
  Element image;    // embedded ambient element
};

inline std::vector<LambdaPoint> enumerate_lambda_points(const FcGroup& G,
                                                        const SubgroupBasis& basis,
                                                        std::uint32_t radius,
                                                        const Budget& budget) {
  std::vector<LambdaPoint> pts;
  walk_reduced_basis_words(G, basis, radius, budget, [&](const Word& w, const Element& e) {
    pts.push_back({w, e});
    budget.check_elements(pts.size(), "enumerate_lambda_points");
  });
  // deterministic order: by length, then serialization
  std::sort(pts.begin(), pts.end(), [](const LambdaPoint& a, const LambdaPoint& b) {
    if (a.word.length() != b.word.length()) return a.word.length() < b.word.length();
    return a.word.str() < b.word.str();
  });
  return pts;
}

}  // namespace detail

inline MitraProfile mitra_profiles(const GroupContext& ctx, DistCache& cache,
                                   const SubgroupBasis& basis, const MitraOptions& opt,
                                   const Budget& budget = {}) {
  std::vector<detail::LambdaPoint> pts =
      detail::enumerate_lambda_points(ctx.group, basis, opt.lambda_radius, budget);
  BallIndex base_ball = enumerate_ball(ctx, ctx.identity(), opt.gamma_radius);

  MitraProfile profile;
  profile.lambda_radius = opt.lambda_radius;
  profile.gamma_radius = opt.gamma_radius;

  const std::size_t n = pts.size();
  const std::size_t total_pairs = n * (n + 1) / 2;  // unordered pairs, diagonal included
  // deterministic stride sampling once the pair count exceeds the budget
  const std::size_t stride =
      total_pairs > opt.pair_budget ? (total_pairs + opt.pair_budget - 1) / opt.pair_budget : 1;

  std::vector<std::optional<Half>> m(opt.n_max + 1);
  std::vector<std::optional<std::uint32_t>> mp(opt.n_max + 1), mpp(opt.n_max + 1);
  auto keep_min = [](auto& slot, auto candidate) {
    if (!slot || candidate < *slot) slot = candidate;
  };

  std::size_t pair_index = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j, ++pair_index) {
      auto tree2 = static_cast<std::int64_t>(
          2 * gromov_product_tree(pts[i].word, pts[j].word, Word(basis.basis_alphabet)));
      auto bucket = static_cast<std::uint32_t>(
          std::min<std::int64_t>(tree2 / 2, opt.n_max));
      ++profile.pairs_scanned;
      // M: ambient product, cheap enough for every pair
      Half prod = gromov_product(ctx, cache, pts[i].image, pts[j].image, ctx.identity(),
                                 opt.gamma_radius);
      keep_min(m[bucket], prod);
      // M': geodesic scan, stride-sampled
      if (pair_index % stride == 0) {
        ++profile.pairs_sampled;
        std::uint32_t d = geodesics_min_distance_to(ctx, cache, base_ball, pts[i].image,
                                                    pts[j].image, 2 * opt.gamma_radius);
        keep_min(mp[bucket], d);
      }
    }
  }

  // M'': z on the tree geodesic [e,y], i.e. z a prefix of the reduced word y
  for (const detail::LambdaPoint& y : pts) {
    for (std::size_t depth = 0; depth <= y.word.length(); ++depth) {
      Word z(basis.basis_alphabet);
      std::size_t k = 0;
      for (Letter l : y.word.letters()) {
        if (k++ == depth) break;
        z.push(l);
      }
      ++profile.pairs_sampled;
      Element fz = lambda_embed(ctx.group, basis, z, budget);
      std::uint32_t d = geodesics_min_distance_to(ctx, cache, base_ball, fz, y.image,
                                                  2 * opt.gamma_radius);
      auto bucket = static_cast<std::uint32_t>(std::min<std::size_t>(depth, opt.n_max));
      keep_min(mpp[bucket], d);
    }
  }

  // each profile is an inf over a candidate set that shrinks as N grows:
  // fold suffix minima so row N covers all pairs qualifying at level >= N,
  // then emit rows
  for (std::uint32_t N = opt.n_max; N-- > 0;) {
    if (m[N + 1] && (!m[N] || *m[N + 1] < *m[N])) m[N] = m[N + 1];
    if (mp[N + 1] && (!mp[N] || *mp[N + 1] < *mp[N])) mp[N] = mp[N + 1];
    if (mpp[N + 1] && (!mpp[N] || *mpp[N + 1] < *mpp[N])) mpp[N] = mpp[N + 1];
  }
  for (std::uint32_t N = 0; N <= opt.n_max; ++N)
    profile.rows.push_back({N, m[N], mp[N], mpp[N]});
  return profile;
}

// --- geodesic-avoidance check ---
//
// For samples (alpha, beta) of reduced basis words, measures how close any
// ambient geodesic from f(alpha) to f(alpha beta) comes to the identity
// and flags values below the target.

struct CorollaryCheckRow {
  std::string alpha;
  std::string beta;
  std::uint32_t min_dist = 0;
  bool pass = false;
};

struct CorollaryReport {
  std::vector<CorollaryCheckRow> rows;
  std::uint32_t m_target = 0;
  std::uint32_t n_floor = 0;  // required |alpha|

  // line format: word, min_dist, pass|fail
  std::vector<std::string> lines() const {
    std::vector<std::string> out;
    for (const CorollaryCheckRow& r : rows)
      out.push_back(r.alpha + (r.beta.empty() ? "" : " . " + r.beta) + ", " +
                    std::to_string(r.min_dist) + ", " + (r.pass ? "pass" : "fail"));
    return out;
  }
};

inline CorollaryReport corollary_check(const GroupContext& ctx, DistCache& cache,
                                       const SubgroupBasis& basis, std::uint32_t n_floor,
                                       std::uint32_t m_target,
                                       const std::vector<std::pair<std::string, std::string>>& samples,
                                       std::uint32_t gamma_radius, const Budget& budget = {}) {
  BallIndex base_ball = enumerate_ball(ctx, ctx.identity(), gamma_radius);
  CorollaryReport report;
  report.m_target = m_target;
  report.n_floor = n_floor;
  for (const auto& [alpha_text, beta_text] : samples) {
    Word alpha = parse_word(basis.basis_alphabet, alpha_text);
    Word beta = parse_word(basis.basis_alphabet, beta_text);
    if (alpha.length() < n_floor)
      throw ConfigError("corollary_check: |alpha| is below the required floor");
    Word ab = multiply(alpha, beta);
    if (ab.length() != alpha.length() + beta.length())
      throw ConfigError("corollary_check: alpha beta is not reduced");
    Element fa = lambda_embed(ctx.group, basis, alpha, budget);
    Element fab = lambda_embed(ctx.group, basis, ab, budget);
    std::uint32_t d =
        geodesics_min_distance_to(ctx, cache, base_ball, fa, fab, 2 * gamma_radius);
    report.rows.push_back({alpha.str(), beta.str(), d, d >= m_target});
  }
  return report;
}

// --- shadows ---
//
// The shadow of the suffix beta of a reduced basis word alpha.beta is the
// chain of fiber-tree geodesic segments between the fiber parts of the
// embeddings of consecutive prefixes alpha.beta_i and alpha.beta_{i+1}.

struct Shadow {
  // segment i joins the fiber of embed(alpha beta_i) to that of
  // embed(alpha beta_{i+1}); each segment lists its tree vertices
  std::vector<std::vector<Word>> segments;

  // closest approach of any segment vertex to the tree identity
  std::optional<std::size_t> min_distance_to_identity() const {
    std::optional<std::size_t> best;
    for (const auto& seg : segments)
      for (const Word& v : seg)
        if (!best || v.length() < *best) best = v.length();
    return best;
  }
};

inline Shadow shadow(const FcGroup& G, const SubgroupBasis& basis, const Word& alpha,
                     const Word& beta, const Budget& budget = {}) {
  if (multiply(alpha, beta).length() != alpha.length() + beta.length())
    throw ConfigError("shadow: alpha beta is not reduced");
  Shadow out;
  Element prev = lambda_embed(G, basis, alpha, budget);
  Word prefix = alpha;
  for (Letter l : beta.letters()) {
    prefix.push(l);
    Element next = lambda_embed(G, basis, prefix, budget);
    out.segments.push_back(tree_geodesic(prev.fiber, next.fiber));
    prev = next;
  }
  return out;
}

// --- final-letter position ---
//
// For a reduced basis word w ending in (a_r t)^{+-1} over a basis of that
// shape, locates the fiber letter of theta^n(what(w)) that corresponds to
// w's final basis letter: the last letter of theta^n(what(w)) when w ends
// in (a_r t)^{-1}, and position |theta^n(what(u))| + 1 (u = w without its
// final letter) when w ends in (a_r t).  Positions are 1-based.

inline std::size_t final_generator_position(const FcGroup& G, const SubgroupBasis& basis,
                                            const Word& w, std::int64_t n,
                                            const Budget& budget = {}) {
  if (w.length() == 0)
    throw ConfigError("final_generator_position: word is empty");
  Letter last{};
  for (Letter l : w.letters()) last = l;
  // the final basis letter must embed as (single fiber letter) * t
  const Element& gen = basis.generators[last.gen];
  if (gen.fiber.length() != 1 || gen.exponent != 1)
    throw ConfigError("final_generator_position: word does not end in an (a t) letter");
  if (last.sign > 0) {
    Word u(w.alphabet());
    std::size_t k = 0;
    for (Letter l : w.letters())
      if (++k < w.length()) u.push(l);
    Element eu = lambda_embed(G, basis, u, budget);
    return G.theta.power_apply(n, eu.fiber, budget).length() + 1;
  }
  Element ew = lambda_embed(G, basis, w, budget);
  std::size_t len = G.theta.power_apply(n, ew.fiber, budget).length();
  if (len == 0)
    throw ConfigError("final_generator_position: the normal form has an empty fiber");
  return len;
}

// Least N <= search_bound such that every enumerated reduced basis word
// w = u (a_r t)^{+-1} with |u| in [N, search_bound - 1] keeps its final
// letter at least `a_min` symbols into theta^n(what(w)) for all |n| <=
// b_bound.  Validated on the enumerated range only.
inline std::optional<std::uint32_t> empirical_N(const FcGroup& G, const SubgroupBasis& basis,
                                                std::uint32_t r_index, std::size_t a_min,
                                                std::uint32_t b_bound,
                                                std::uint32_t search_bound,
                                                const Budget& budget = {}) {
  if (r_index >= basis.generators.size())
    throw ConfigError("empirical_N: basis letter index out of range");
  // min position per prefix length |u|
  std::vector<std::size_t> min_pos(search_bound, SIZE_MAX);
  detail::walk_reduced_basis_words(G, basis, search_bound, budget,
                                   [&](const Word& w, const Element&) {
    if (w.length() == 0) return;
    Letter last{};
    for (Letter l : w.letters()) last = l;
    if (last.gen != r_index) return;
    for (std::int64_t n = -static_cast<std::int64_t>(b_bound);
         n <= static_cast<std::int64_t>(b_bound); ++n) {
      std::size_t pos = final_generator_position(G, basis, w, n, budget);
      std::size_t u_len = w.length() - 1;
      min_pos[u_len] = std::min(min_pos[u_len], pos);
    }
  });
  // suffix minimum: N qualifies when all longer prefixes do too
  std::size_t suffix_min = SIZE_MAX;
  std::optional<std::uint32_t> best;
  for (std::uint32_t len = search_bound; len-- > 0;) {
    suffix_min = std::min(suffix_min, min_pos[len]);
    if (suffix_min >= a_min)
      best = len;
    else
      break;
  }
  return best;
}

}  // namespace ggt
