#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <deque>
#include <unordered_map>

#include "ggt/distortion.hpp"

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

// Plain breadth-first search over basis-generator multiplication: an
// independent oracle for minimal basis-word lengths.
std::unordered_map<std::string, std::uint32_t> bfs_length_oracle(const FcGroup& G,
                                                                 const SubgroupBasis& basis,
                                                                 std::uint32_t radius) {
  std::unordered_map<std::string, std::uint32_t> dist;
  std::deque<Element> frontier{fc_identity(G)};
  dist.emplace(fc_identity(G).str(), 0);
  for (std::uint32_t layer = 0; layer < radius; ++layer) {
    std::deque<Element> next;
    for (const Element& g : frontier) {
      for (std::size_t i = 0; i < basis.generators.size(); ++i) {
        for (const Element& step : {basis.generators[i], basis.generator_inverses[i]}) {
          Element h = fc_multiply(G, g, step);
          if (dist.emplace(h.str(), layer + 1).second) next.push_back(h);
        }
      }
    }
    frontier = std::move(next);
  }
  return dist;
}

}  // namespace

TEST_CASE("reference growth function small values") {
  CHECK(ackermann(1, 5) == 10);
  CHECK(ackermann(2, 4) == 16);
  CHECK(ackermann(3, 3) == 16);
  CHECK(ackermann(1, 0) == 0);
  CHECK(ackermann(2, 0) == 1);
  CHECK(ackermann(3, 0) == 1);
}

TEST_CASE("level 2 doubles repeatedly and level 3 towers") {
  BigInt p = 1;
  for (unsigned n = 0; n <= 20; ++n) {
    CHECK(ackermann(2, n) == p);
    p *= 2;
  }
  CHECK(ackermann(3, 4) == 65536);
}

TEST_CASE("growth function budgets and bad levels") {
  CHECK_THROWS_AS(ackermann(0, 1), ConfigError);
  CHECK_THROWS_AS(ackermann(2, BigInt(-1)), ConfigError);
  AckermannBudget tight;
  tight.max_bits = 1 << 20;
  CHECK_THROWS_AS(ackermann(3, 6, tight), BudgetError);
  AckermannBudget few_iterations;
  few_iterations.max_iterations = 3;
  CHECK_THROWS_AS(ackermann(2, 10, few_iterations), BudgetError);
}

TEST_CASE("growth functions are strictly monotone where computed") {
  for (unsigned k = 1; k <= 3; ++k)
    for (unsigned n = 1; n <= 4; ++n)
      CHECK(ackermann(k, n) < ackermann(k, n + 1));
  for (unsigned n = 2; n <= 4; ++n) CHECK(ackermann(2, n) < ackermann(3, n + 1));
}

TEST_CASE("length index matches a breadth-first oracle") {
  GroupContext ctx = g2_context();
  SubgroupBasis basis(ctx.group, {"a1 t", "a2 t"});
  auto index = subgroup_length_index(ctx.group, basis, 6);
  auto oracle = bfs_length_oracle(ctx.group, basis, 6);
  CHECK(index.size() == oracle.size());
  for (const auto& [key, len] : oracle) {
    auto it = index.find(key);
    REQUIRE(it != index.end());
    CHECK(it->second == len);
  }
}

TEST_CASE("length index basics") {
  GroupContext ctx = g2_context();
  SubgroupBasis basis(ctx.group, {"a1 t", "a2 t"});

  SUBCASE("radius zero keeps only the identity") {
    auto index = subgroup_length_index(ctx.group, basis, 0);
    CHECK(index.size() == 1);
    CHECK(index.at(fc_identity(ctx.group).str()) == 0);
  }
  SUBCASE("specific members") {
    auto index = subgroup_length_index(ctx.group, basis, 4);
    CHECK(index.at(parse_element(ctx.group, "a2 a1 | 2").str()) == 2);   // (a2 t)(a1 t)
    CHECK(index.at(parse_element(ctx.group, "a1^3 | 3").str()) == 3);    // (a1 t)^3
    CHECK(index.at(parse_element(ctx.group, "a1 a2^-1 | 0").str()) == 2);
    CHECK(index.find(parse_element(ctx.group, "e | 1").str()) == index.end());
  }
}

TEST_CASE("cyclic subgroup of a free group indexes powers") {
  GroupContext ctx = free_rank2();
  SubgroupBasis basis(ctx.group, {"a"});
  auto index = subgroup_length_index(ctx.group, basis, 5);
  CHECK(index.size() == 11);
  for (int j = -5; j <= 5; ++j) {
    Word w(ctx.group.fiber_alphabet);
    for (int i = 0; i < (j < 0 ? -j : j); ++i) w.push({0, static_cast<std::int8_t>(j < 0 ? -1 : 1)});
    CHECK(index.at(Element{w, 0}.str()) == static_cast<std::uint32_t>(j < 0 ? -j : j));
  }
}

TEST_CASE("shear basis solver detection") {
  GroupContext g2 = g2_context();
  SubgroupBasis hydra2(g2.group, {"a1 t", "a2 t"});
  CHECK(ShearBasisSolver::detect(g2.group, hydra2).has_value());

  SubgroupBasis swapped(g2.group, {"a2 t", "a1 t"});
  CHECK_FALSE(ShearBasisSolver::detect(g2.group, swapped).has_value());
  SubgroupBasis partial(g2.group, {"a1 t"});
  CHECK_FALSE(ShearBasisSolver::detect(g2.group, partial).has_value());

  GroupContext f2 = free_rank2();
  SubgroupBasis free_basis(f2.group, {"a t", "b t"});
  CHECK_FALSE(ShearBasisSolver::detect(f2.group, free_basis).has_value());

  Automorphism phi3 = hydra_phi(3);
  FcGroup G3(phi3.alphabet(), phi3);
  SubgroupBasis hydra3(G3, {"a1 t", "a2 t", "a3 t"});
  CHECK_FALSE(ShearBasisSolver::detect(G3, hydra3).has_value());
}

TEST_CASE("shear basis solver recovers unique reduced words") {
  GroupContext ctx = g2_context();
  SubgroupBasis basis(ctx.group, {"a1 t", "a2 t"});
  auto solver = ShearBasisSolver::detect(ctx.group, basis);
  REQUIRE(solver.has_value());

  auto word_of = [&](const char* text) {
    auto w = solver->reduced_word(parse_element(ctx.group, text));
    REQUIRE(w.has_value());
    return w->str();
  };
  CHECK(word_of("e | 0") == "");
  CHECK(word_of("a1 | 1") == "a1t");
  CHECK(word_of("a2 | 1") == "a2t");
  CHECK(word_of("a1^4 | 4") == "a1t^4");
  CHECK(word_of("a1 a2^-1 | 0") == "a1t a2t^-1");
  CHECK(word_of("a1 a2^-1 a1 | 1") == "a1t a2t^-1 a1t");

  SUBCASE("non-members are rejected") {
    for (const char* text : {"e | 1", "a1 | 0", "a2 | -1", "a2^2 | 2", "a1 a2 | 1"})
      CHECK_FALSE(solver->reduced_word(parse_element(ctx.group, text)).has_value());
  }
}

TEST_CASE("solver agrees with the walk index on a whole ball") {
  GroupContext ctx = g2_context();
  SubgroupBasis basis(ctx.group, {"a1 t", "a2 t"});
  auto solver = ShearBasisSolver::detect(ctx.group, basis);
  REQUIRE(solver.has_value());
  auto index = subgroup_length_index(ctx.group, basis, 9);
  BallIndex ball = enumerate_ball(ctx, fc_identity(ctx.group), 5);
  std::size_t members = 0;
  for (const Element& g : ball.elements) {
    auto w = solver->reduced_word(g);
    auto it = index.find(g.str());
    if (w) {
      ++members;
      REQUIRE(it != index.end());
      CHECK(w->length() == it->second);
      CHECK(lambda_embed(ctx.group, basis, *w) == g);
    } else {
      CHECK(it == index.end());
    }
  }
  CHECK(members > 10);  // the ball genuinely meets the subgroup
}

TEST_CASE("whole-group basis is undistorted") {
  GroupContext ctx = free_rank2();
  SubgroupBasis basis(ctx.group, {"a", "b"});
  DistortionTable table = distortion_table(ctx, basis, 6, 6);
  CHECK(table.saturated);
  for (std::uint32_t n = 0; n <= 6; ++n) {
    CHECK(table.rows[n].n == n);
    CHECK(table.rows[n].dist_lb == n);
    CHECK(table.rows[n].saturated);
  }
}

TEST_CASE("free factor subgroup is undistorted") {
  GroupContext ctx = free_rank2();
  SubgroupBasis basis(ctx.group, {"a"});
  DistortionTable table = distortion_table(ctx, basis, 6, 6);
  CHECK(table.saturated);
  for (std::uint32_t n = 0; n <= 6; ++n) CHECK(table.rows[n].dist_lb == n);
}

TEST_CASE("shear subgroup table is exact and super-linear in onset") {
  GroupContext ctx = g2_context();
  SubgroupBasis basis(ctx.group, {"a1 t", "a2 t"});
  DistortionTable table = distortion_table(ctx, basis, 8, 0);  // solver ignores r_lambda
  CHECK(table.saturated);
  REQUIRE(table.rows.size() == 9);

  std::vector<std::uint32_t> expected{0, 0, 2, 3, 5, 7, 9, 11, 13};
  DistCache cache(ctx);
  for (std::uint32_t n = 0; n <= 8; ++n) {
    const DistortionRow& row = table.rows[n];
    CHECK(row.dist_lb == expected[n]);
    if (n > 0) CHECK(row.dist_lb >= table.rows[n - 1].dist_lb);
    // re-verify the witness lengths independently of the table
    CHECK(lambda_embed(ctx.group, basis, row.lambda_word) == row.witness);
    CHECK(row.lambda_word.length() == row.dist_lb);
    auto d = cache.to_identity(row.witness, n);
    REQUIRE(d.has_value());
    CHECK(*d <= n);
  }
}

TEST_CASE("walk table matches the exact table on a swapped basis") {
  GroupContext ctx = g2_context();
  SubgroupBasis exact_basis(ctx.group, {"a1 t", "a2 t"});
  SubgroupBasis swapped(ctx.group, {"a2 t", "a1 t"});  // same subgroup, no solver
  DistortionTable exact = distortion_table(ctx, exact_basis, 5, 0);
  DistortionTable walked = distortion_table(ctx, swapped, 5, 9);
  CHECK(exact.saturated);
  CHECK_FALSE(walked.saturated);
  for (std::uint32_t n = 0; n <= 5; ++n) {
    CHECK(walked.rows[n].dist_lb == exact.rows[n].dist_lb);
    CHECK_FALSE(walked.rows[n].saturated);
  }
}

TEST_CASE("table serialization and witness accessor") {
  GroupContext ctx = g2_context();
  SubgroupBasis basis(ctx.group, {"a1 t", "a2 t"});
  DistortionTable table = distortion_table(ctx, basis, 4, 0);
  auto csv = table.csv();
  REQUIRE(csv.size() == 6);
  CHECK(csv[0] == "n,dist_lb,saturated,witness");
  CHECK(csv[3] == "2,2,true,a1 a2^-1 | 0");

  auto [witness, lw] = max_distortion_witness(table, 4);
  CHECK(witness == parse_element(ctx.group, "a1 a2^-1 a1 a2^-1 a1 | 1"));
  CHECK(lw.length() == 5);
  CHECK_THROWS_AS(max_distortion_witness(table, 5), ConfigError);
}
