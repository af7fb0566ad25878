#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "ggt/cayley.hpp"
#include "ggt/distortion.hpp"

namespace ggt {

// --- boundary proxies ---
//
// Directions at infinity of the subgroup tree are represented by deep
// finite words: powers of distinct basis generators diverge along distinct
// branches, and every Gromov product against a deep enough proxy equals
// the product against the genuine boundary point.

struct BoundaryProxy {
  Word word;
  std::uint32_t depth = 0;
};

inline std::array<BoundaryProxy, 3> make_proxies(const SubgroupBasis& basis,
                                                 std::uint32_t depth) {
  if (depth < 1) throw ConfigError("make_proxies: depth must be at least 1");
  if (basis.generators.size() < 2)
    throw ConfigError(
        "make_proxies: the subgroup must be non-elementary; at least two basis "
        "generators are required to get three distinct directions at infinity");
  auto power = [&](const Word& base) {
    Word w(basis.basis_alphabet);
    for (std::uint32_t i = 0; i < depth; ++i) w = multiply(w, base);
    return BoundaryProxy{w, depth};
  };
  Word g1 = Word::single(basis.basis_alphabet, 0);
  Word g2 = Word::single(basis.basis_alphabet, 1);
  if (basis.generators.size() >= 3)
    return {power(g1), power(g2), power(Word::single(basis.basis_alphabet, 2))};
  return {power(g1), power(g2), power(multiply(g1, g2))};
}

// --- visual metric bounds ---

struct VisualParams {
  double r = 2.0;   // subgroup-side visual base, > 1
  double s = 2.0;   // ambient-side visual base, > 1
  double k1 = 1.0;  // comparability constants, 0 < k1 <= k2
  double k2 = 1.0;

  void validate() const {
    if (!(r > 1.0) || !(s > 1.0)) throw ConfigError("visual params: r and s must exceed 1");
    if (!(k1 > 0.0) || !(k1 <= k2)) throw ConfigError("visual params: need 0 < k1 <= k2");
  }
};

// Bounds k1 * r^-product <= d <= k2 * r^-product.  The logarithmic fields
// (base r) stay exact when the plain doubles underflow to zero.
struct VisualBounds {
  double lower = 0.0;
  double upper = 0.0;
  double lower_log_r = 0.0;  // log_r(k1) - product
  double upper_log_r = 0.0;  // log_r(k2) - product
  bool underflow = false;
};

inline VisualBounds visual_bounds(Half product, const VisualParams& params) {
  params.validate();
  VisualBounds out;
  double p = product.value();
  out.lower_log_r = std::log(params.k1) / std::log(params.r) - p;
  out.upper_log_r = std::log(params.k2) / std::log(params.r) - p;
  out.lower = params.k1 * std::pow(params.r, -p);
  out.upper = params.k2 * std::pow(params.r, -p);
  out.underflow = out.lower == 0.0 || out.upper == 0.0;
  return out;
}

// --- the wildness experiment ---
//
// For each distortion row n with witness h_n, translate the three proxies
// by h_n, pick the two whose products (e . h_n p_k)_{h_n} are smallest
// (at most one can exceed C by the pigeonhole on tree branches), and
// record the subgroup-side product (h_n p_i . h_n p_j)_e, which is at
// least dist_lb(n) - C exactly (the subgroup tree has zero hyperbolicity
// defect).  The ambient-side upper bound n + d(e,[p_i,p_j]) + 8*delta-hat
// is recorded where the enumerated ball covers it.  In visual metrics the
// two sides say: inputs shrink like r^-dist_lb(n) while outputs only
// shrink like s^-n.

struct WildnessRow {
  std::uint32_t n = 0;
  std::uint32_t dist_lb = 0;
  std::size_t i = 0;
  std::size_t j = 1;
  std::int64_t lambda_product = 0;                 // (h_n p_i . h_n p_j)_e, exact
  std::optional<Half> gamma_product_ub;            // n + d(e,[p_i,p_j]) + 8*delta-hat
  std::int64_t delta_in_log = 0;                   // log_r of the input scale, = -dist_lb
  std::int64_t eps_lb_log = 0;                     // log_s of the output scale, = -n
};

struct WildnessResult {
  std::vector<WildnessRow> rows;
  std::int64_t C = 0;              // max pairwise proxy product (tree defect is 0)
  VisualParams params;

  // header: n,dist_lb,i,j,lambda_product,gamma_product_ub,delta_in_log,eps_lb_log
  std::vector<std::string> csv() const {
    std::vector<std::string> out{
        "n,dist_lb,i,j,lambda_product,gamma_product_ub,delta_in_log,eps_lb_log"};
    for (const WildnessRow& r : rows)
      out.push_back(std::to_string(r.n) + "," + std::to_string(r.dist_lb) + "," +
                    std::to_string(r.i) + "," + std::to_string(r.j) + "," +
                    std::to_string(r.lambda_product) + "," +
                    (r.gamma_product_ub ? r.gamma_product_ub->str() : "na") + "," +
                    std::to_string(r.delta_in_log) + "," + std::to_string(r.eps_lb_log));
    return out;
  }
};

inline WildnessResult wildness_experiment(const GroupContext& ctx, DistCache& cache,
                                          const SubgroupBasis& basis,
                                          const DistortionTable& table,
                                          const std::array<BoundaryProxy, 3>& proxies,
                                          const VisualParams& params, Half delta_hat,
                                          std::uint32_t gamma_radius = 0,
                                          std::uint32_t gamma_distance_cap = 0,
                                          const Budget& budget = {}) {
  params.validate();
  Word origin(basis.basis_alphabet);
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = a + 1; b < 3; ++b)
      if (proxies[a].word == proxies[b].word)
        throw ConfigError("wildness_experiment: proxies must be three distinct words");

  WildnessResult out;
  out.params = params;
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = a + 1; b < 3; ++b)
      out.C = std::max(out.C, static_cast<std::int64_t>(gromov_product_tree(
                                  proxies[a].word, proxies[b].word, origin)));

  std::uint32_t max_dist = table.rows.empty() ? 0 : table.rows.back().dist_lb;
  for (const BoundaryProxy& p : proxies)
    if (p.depth <= max_dist + static_cast<std::uint64_t>(out.C))
      throw ConfigError(
          "wildness_experiment: proxy depth does not dominate dist_lb(n_max) + C, "
          "translated products may not have stabilized");

  // ambient-side distances d(e, [p_a, p_b]) per proxy pair, shared by every row
  auto pair_slot = [](std::size_t a, std::size_t b) { return a + b - 1; };  // (0,1)(0,2)(1,2)
  std::array<std::optional<Half>, 3> gamma_base;
  if (gamma_radius > 0) {
    std::uint32_t max_depth = 0;
    for (const BoundaryProxy& p : proxies) max_depth = std::max(max_depth, p.depth);
    if (gamma_distance_cap == 0) gamma_distance_cap = 4 * max_depth;
    BallIndex base_ball = enumerate_ball(ctx, ctx.identity(), gamma_radius);
    std::array<Element, 3> image;
    for (std::size_t k = 0; k < 3; ++k)
      image[k] = lambda_embed(ctx.group, basis, proxies[k].word, budget);
    for (std::size_t a = 0; a < 3; ++a)
      for (std::size_t b = a + 1; b < 3; ++b) {
        try {
          std::uint32_t d = geodesics_min_distance_to(ctx, cache, base_ball, image[a],
                                                      image[b], gamma_distance_cap);
          gamma_base[pair_slot(a, b)] = Half{2 * static_cast<std::int64_t>(d)};
        } catch (const CoverageError&) {
          // recorded as uncovered, not an error
        }
      }
  }

  for (const DistortionRow& row : table.rows) {
    const Word& h = row.lambda_word;
    std::array<Word, 3> translated;
    std::array<std::int64_t, 3> back_product;
    for (std::size_t k = 0; k < 3; ++k) {
      translated[k] = multiply(h, proxies[k].word);
      back_product[k] =
          static_cast<std::int64_t>(gromov_product_tree(origin, translated[k], h));
    }
    // the two smallest back-products; deterministic tie-break by index
    std::array<std::size_t, 3> order{0, 1, 2};
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (back_product[a] != back_product[b]) return back_product[a] < back_product[b];
      return a < b;
    });
    WildnessRow r;
    r.n = row.n;
    r.dist_lb = row.dist_lb;
    r.i = std::min(order[0], order[1]);
    r.j = std::max(order[0], order[1]);
    r.lambda_product = static_cast<std::int64_t>(
        gromov_product_tree(translated[r.i], translated[r.j], origin));
    if (const auto& gb = gamma_base[pair_slot(r.i, r.j)])
      r.gamma_product_ub =
          Half{2 * static_cast<std::int64_t>(row.n) + gb->twice + 8 * delta_hat.twice};
    r.delta_in_log = -static_cast<std::int64_t>(row.dist_lb);
    r.eps_lb_log = -static_cast<std::int64_t>(row.n);
    out.rows.push_back(std::move(r));
  }
  return out;
}

// --- the modulus-of-continuity profile ---
//
// Rows (eta, delta) with delta = 1 / C2^{A_k(floor(C1 * log(1/eta)))}:
// the output tolerance eta forces an input tolerance delta that shrinks
// with Ackermann speed.  Exponents are exact big integers; when they blow
// past the budget the row keeps the symbolic exponent expression.

struct ModulusRow {
  double eta = 0.0;
  std::uint64_t arg = 0;               // floor(C1 * log(1/eta))
  std::optional<BigInt> exponent;      // A_k(arg) when within budget
  std::string delta;                   // "1/C2^e" or the symbolic fallback
};

struct ModulusProfile {
  std::vector<ModulusRow> rows;
  unsigned k = 2;
  double C0 = 0.5, C1 = 1.0, C2 = 2.0;

  // header: eta,arg,delta
  std::vector<std::string> csv() const {
    std::vector<std::string> out{"eta,arg,delta"};
    char buf[64];
    for (const ModulusRow& r : rows) {
      std::snprintf(buf, sizeof buf, "%.12g", r.eta);
      out.push_back(std::string(buf) + "," + std::to_string(r.arg) + "," + r.delta);
    }
    return out;
  }
};

inline ModulusProfile modulus_profile(unsigned k, double C0, double C1, double C2,
                                      const std::vector<double>& eta_grid,
                                      const AckermannBudget& budget = {}) {
  if (k < 2) throw ConfigError("modulus_profile: level must be at least 2");
  if (!(C0 > 0.0 && C0 < 1.0)) throw ConfigError("modulus_profile: C0 must lie in (0,1)");
  if (!(C1 > 0.0)) throw ConfigError("modulus_profile: C1 must be positive");
  if (!(C2 > 1.0)) throw ConfigError("modulus_profile: C2 must exceed 1");

  ModulusProfile profile;
  profile.k = k;
  profile.C0 = C0;
  profile.C1 = C1;
  profile.C2 = C2;

  std::vector<double> grid = eta_grid;
  std::sort(grid.begin(), grid.end(), std::greater<>());  // deterministic, eta descending
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", C2);
  std::string base(buf);
  for (double eta : grid) {
    if (!(eta > 0.0 && eta < C0))
      throw ConfigError("modulus_profile: every eta must lie in (0, C0)");
    ModulusRow row;
    row.eta = eta;
    row.arg = static_cast<std::uint64_t>(std::floor(C1 * std::log(1.0 / eta)));
    try {
      row.exponent = ackermann(k, row.arg, budget);
      row.delta = "1/" + base + "^" + row.exponent->str();
    } catch (const BudgetError&) {
      row.delta = "1/" + base + "^A_" + std::to_string(k) + "(" + std::to_string(row.arg) + ")";
    }
    profile.rows.push_back(std::move(row));
  }
  return profile;
}

}  // namespace ggt
