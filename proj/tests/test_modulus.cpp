#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ggt/modulus.hpp"

using namespace ggt;

namespace {

GroupContext g2_context() {
  Automorphism phi = hydra_phi(2);
  FcGroup G(phi.alphabet(), phi);
  return GroupContext(G, {{parse_word(G.fiber_alphabet, "a1"), 0},
                          {parse_word(G.fiber_alphabet, "a2"), 0},
                          {Word(G.fiber_alphabet), 1}});
}

GroupContext free_rank2() {
  auto alphabet = std::make_shared<const Alphabet>(std::vector<std::string>{"a", "b"});
  FcGroup G = FcGroup::free_group(alphabet);
  return GroupContext(G, {{parse_word(alphabet, "a"), 0}, {parse_word(alphabet, "b"), 0}});
}

// Undistorted table for the whole free group with witnesses a^n: the
// canonical chain of nested witnesses used by the wildness experiment.
DistortionTable power_table(const FcGroup& G, const SubgroupBasis& basis, std::uint32_t n_max) {
  DistortionTable table;
  table.n_max = n_max;
  table.r_lambda = n_max;
  table.saturated = true;
  for (std::uint32_t n = 0; n <= n_max; ++n) {
    DistortionRow row;
    row.n = n;
    row.dist_lb = n;
    row.lambda_word = Word(basis.basis_alphabet);
    for (std::uint32_t i = 0; i < n; ++i)
      row.lambda_word = multiply(row.lambda_word, Word::single(basis.basis_alphabet, 0));
    row.witness = lambda_embed(G, basis, row.lambda_word);
    row.saturated = true;
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace

TEST_CASE("boundary proxies are deep powers in distinct directions") {
  GroupContext ctx = free_rank2();
  SubgroupBasis basis(ctx.group, {"a", "b"});

  auto proxies = make_proxies(basis, 5);
  CHECK(proxies[0].word.length() == 5);
  CHECK(proxies[1].word.length() == 5);
  CHECK(proxies[2].word.length() == 10);  // (g1 g2)^5 when only two generators
  CHECK(proxies[0].depth == 5);
  Word origin(basis.basis_alphabet);
  CHECK(gromov_product_tree(proxies[0].word, proxies[1].word, origin) == 0);
  CHECK(gromov_product_tree(proxies[0].word, proxies[2].word, origin) == 1);
  CHECK(gromov_product_tree(proxies[1].word, proxies[2].word, origin) == 0);

  SubgroupBasis rank3(ctx.group, {"a", "b", "a b"});
  auto three = make_proxies(rank3, 4);
  CHECK(three[2].word.length() == 4);  // third generator exists, use its power
  for (std::size_t i = 0; i < 4; ++i) CHECK(three[2].word.letters()[i].gen == 2);

  SubgroupBasis elementary(ctx.group, {"a"});
  CHECK_THROWS_AS(make_proxies(elementary, 5), ConfigError);
  CHECK_THROWS_AS(make_proxies(basis, 0), ConfigError);
}

TEST_CASE("visual bounds shrink exponentially and survive underflow") {
  VisualParams p;
  p.r = 2.0;
  p.s = 2.0;
  p.k1 = 0.5;
  p.k2 = 1.0;

  VisualBounds b = visual_bounds(Half{2 * 3}, p);
  CHECK(b.lower == doctest::Approx(0.0625));
  CHECK(b.upper == doctest::Approx(0.125));
  CHECK(b.lower_log_r == doctest::Approx(-4.0));
  CHECK(b.upper_log_r == doctest::Approx(-3.0));
  CHECK_FALSE(b.underflow);

  VisualBounds deeper = visual_bounds(Half{2 * 4}, p);
  CHECK(deeper.upper < b.upper);  // larger product, strictly smaller scale
  CHECK(deeper.lower < b.lower);

  VisualBounds tiny = visual_bounds(Half{2 * 10000}, p);
  CHECK(tiny.underflow);
  CHECK(tiny.lower == 0.0);
  CHECK(tiny.lower_log_r == doctest::Approx(-10001.0));  // logs stay exact

  VisualParams bad = p;
  bad.r = 1.0;
  CHECK_THROWS_AS(visual_bounds(Half{2}, bad), ConfigError);
  bad = p;
  bad.k1 = 2.0;  // k1 > k2
  CHECK_THROWS_AS(visual_bounds(Half{2}, bad), ConfigError);
  bad = p;
  bad.k1 = 0.0;
  CHECK_THROWS_AS(visual_bounds(Half{2}, bad), ConfigError);
}

TEST_CASE("wildness experiment on the undistorted free group") {
  GroupContext ctx = free_rank2();
  DistCache cache(ctx);
  SubgroupBasis basis(ctx.group, {"a", "b"});
  DistortionTable table = power_table(ctx.group, basis, 8);
  auto proxies = make_proxies(basis, 20);
  VisualParams params;

  WildnessResult result =
      wildness_experiment(ctx, cache, basis, table, proxies, params, Half{0}, 2);
  CHECK(result.C == 1);
  REQUIRE(result.rows.size() == 9);
  for (const WildnessRow& r : result.rows) {
    CHECK(r.i < r.j);
    // defect-free tree side: the product reproduces the distortion bound
    CHECK(r.lambda_product >= static_cast<std::int64_t>(r.dist_lb) - result.C);
    CHECK(r.lambda_product == static_cast<std::int64_t>(r.dist_lb));
    // identity inclusion: ambient distance is covered and undistorted
    REQUIRE(r.gamma_product_ub.has_value());
    CHECK(r.gamma_product_ub->twice <= 2 * static_cast<std::int64_t>(r.n) + 2);
    CHECK(r.delta_in_log == -static_cast<std::int64_t>(r.dist_lb));
    CHECK(r.eps_lb_log == -static_cast<std::int64_t>(r.n));
  }

  auto csv = result.csv();
  CHECK(csv[0] == "n,dist_lb,i,j,lambda_product,gamma_product_ub,delta_in_log,eps_lb_log");
  CHECK(csv[4] == "3,3,0,1,3,3,-3,-3");

  // shallow proxies cannot have stabilized past dist_lb(n_max) + C
  CHECK_THROWS_AS(wildness_experiment(ctx, cache, basis, table, make_proxies(basis, 5),
                                      params, Half{0}),
                  ConfigError);
  auto dup = proxies;
  dup[1] = dup[0];
  CHECK_THROWS_AS(wildness_experiment(ctx, cache, basis, table, dup, params, Half{0}),
                  ConfigError);
}

TEST_CASE("wildness experiment across the distorted inclusion") {
  GroupContext ctx = g2_context();
  DistCache cache(ctx);
  SubgroupBasis basis(ctx.group, {"a1 t", "a2 t"});
  DistortionTable table = distortion_table(ctx, basis, 6, 0);
  REQUIRE(table.saturated);  // exact values, not just lower bounds
  auto proxies = make_proxies(basis, 20);
  VisualParams params;

  WildnessResult result =
      wildness_experiment(ctx, cache, basis, table, proxies, params, Half{9});
  REQUIRE(result.rows.size() == 7);
  for (const WildnessRow& r : result.rows) {
    CHECK(r.lambda_product >= static_cast<std::int64_t>(r.dist_lb) - result.C);
    CHECK_FALSE(r.gamma_product_ub.has_value());  // ambient side not requested
  }

  // input/output scale ratio (base 2 here: r = s = 2) never drops across
  // rows where the distortion bound jumps by at least log_r(s) + 1 = 2
  for (std::size_t k = 1; k < result.rows.size(); ++k) {
    const WildnessRow& prev = result.rows[k - 1];
    const WildnessRow& cur = result.rows[k];
    if (cur.dist_lb - prev.dist_lb >= 2) {
      auto ratio = [](const WildnessRow& r) {
        return static_cast<std::int64_t>(r.dist_lb) - static_cast<std::int64_t>(r.n);
      };
      CHECK(ratio(cur) >= ratio(prev));
    }
  }
}

TEST_CASE("modulus profile rows and budget fallback") {
  ModulusProfile p = modulus_profile(2, 0.5, 1.0, 2.0, {std::exp(-3.0)});
  REQUIRE(p.rows.size() == 1);
  CHECK(p.rows[0].arg == 3);
  REQUIRE(p.rows[0].exponent.has_value());
  CHECK(*p.rows[0].exponent == 8);
  CHECK(p.rows[0].delta == "1/2^8");
  CHECK(p.csv()[0] == "eta,arg,delta");

  // eta just inside the admissible interval floors to argument zero
  ModulusProfile near = modulus_profile(2, 0.5, 1.0, 2.0, {0.4});
  CHECK(near.rows[0].arg == 0);
  CHECK(near.rows[0].delta == "1/2^1");

  // rows come out in descending eta regardless of grid order
  ModulusProfile sorted =
      modulus_profile(2, 0.5, 1.0, 2.0, {std::exp(-3.0), 0.4, std::exp(-2.0)});
  REQUIRE(sorted.rows.size() == 3);
  CHECK(sorted.rows[0].eta > sorted.rows[1].eta);
  CHECK(sorted.rows[1].eta > sorted.rows[2].eta);
  // smaller eta never yields a larger exponent argument
  CHECK(sorted.rows[0].arg <= sorted.rows[2].arg);

  // tower-level growth blows the budget; the exponent stays symbolic
  AckermannBudget tight;
  tight.max_bits = 1 << 20;
  ModulusProfile fallback = modulus_profile(3, 0.5, 1.0, 2.0, {std::exp(-6.0)}, tight);
  CHECK_FALSE(fallback.rows[0].exponent.has_value());
  CHECK(fallback.rows[0].delta == "1/2^A_3(6)");

  CHECK_THROWS_AS(modulus_profile(1, 0.5, 1.0, 2.0, {0.1}), ConfigError);
  CHECK_THROWS_AS(modulus_profile(2, 1.0, 1.0, 2.0, {0.1}), ConfigError);
  CHECK_THROWS_AS(modulus_profile(2, 0.5, 0.0, 2.0, {0.1}), ConfigError);
  CHECK_THROWS_AS(modulus_profile(2, 0.5, 1.0, 1.0, {0.1}), ConfigError);
  CHECK_THROWS_AS(modulus_profile(2, 0.5, 1.0, 2.0, {0.6}), ConfigError);
  CHECK_THROWS_AS(modulus_profile(2, 0.5, 1.0, 2.0, {0.0}), ConfigError);
}
