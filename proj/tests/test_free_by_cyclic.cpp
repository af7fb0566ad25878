#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "ggt/free_by_cyclic.hpp"

using namespace ggt;

namespace {

FcGroup g2() {
  auto phi = hydra_phi(2);
  return FcGroup(phi.alphabet(), phi);
}

FcGroup gamma2() {
  HydraConfig cfg;
  cfg.k = 2;
  cfg.l = 1;
  cfg.u = "b1";
  cfg.v = "b1^-1";
  cfg.theta_b = {"b1"};
  cfg.theta_b_inverse = {"b1"};
  auto theta = hydra_theta(cfg);
  return FcGroup(theta.alphabet(), theta);
}

// Independent brute-force rewriter: tokens over fiber + t; repeatedly
// rewrites the leftmost  t^s x  into  theta^-s(x) t^s  until every t is a
// trailing block, then reduces.  Never calls fc_multiply.
struct RewriteOracle {
  const FcGroup& G;

  Element run(const std::string& mixed) const {
    std::vector<std::string> names = G.fiber_alphabet->names();
    names.push_back(G.stable_letter);
    auto extended = std::make_shared<const Alphabet>(names);
    const auto t_index = static_cast<std::uint32_t>(G.fiber_alphabet->size());
    // hold letters as a raw list; cancellation is deferred entirely
    Word parsed = parse_word(extended, mixed);
    std::vector<Letter> letters(parsed.letters().begin(), parsed.letters().end());
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t i = 0; i + 1 < letters.size(); ++i) {
        if (letters[i].gen == t_index && letters[i + 1].gen != t_index) {
          // t^s x -> theta^{-s}(x) t^s
          Letter t = letters[i];
          Word x = Word::single(G.fiber_alphabet, letters[i + 1].gen, letters[i + 1].sign);
          Word image = t.sign > 0 ? G.theta.apply_inverse(x) : G.theta.apply(x);
          std::vector<Letter> replacement(image.letters().begin(), image.letters().end());
          replacement.push_back(t);
          letters.erase(letters.begin() + static_cast<long>(i),
                        letters.begin() + static_cast<long>(i) + 2);
          letters.insert(letters.begin() + static_cast<long>(i), replacement.begin(),
                         replacement.end());
          changed = true;
          break;
        }
      }
    }
    Element out{Word(G.fiber_alphabet), 0};
    Word fiber(G.fiber_alphabet);
    for (const Letter& l : letters) {
      if (l.gen == t_index)
        out.exponent += l.sign;
      else
        fiber.push(l);
    }
    out.fiber = fiber;
    return out;
  }
};

}  // namespace

TEST_CASE("multiply in G_2") {
  FcGroup G = g2();
  auto a = G.fiber_alphabet;
  Element x{parse_word(a, "a1"), 1};
  CHECK(fc_multiply(G, x, x) == Element{parse_word(a, "a1 a1"), 2});
  CHECK(fc_multiply(G, x, fc_identity(G)) == x);
  Element y{parse_word(a, "a2"), 1};
  // phi^-1(a2) = a2 a1^-1, so (a1,1)(a2,1) = (a1 a2 a1^-1, 2)
  CHECK(fc_multiply(G, x, y) == Element{parse_word(a, "a1 a2 a1^-1"), 2});
}

TEST_CASE("invert") {
  FcGroup G = g2();
  auto a = G.fiber_alphabet;
  CHECK(fc_invert(G, Element{Word(a), 5}) == Element{Word(a), -5});
  CHECK(fc_invert(G, Element{parse_word(a, "a1"), 0}) == Element{parse_word(a, "a1^-1"), 0});
  Element g{parse_word(a, "a2"), 1};
  CHECK(fc_invert(G, g) == Element{parse_word(a, "a1^-1 a2^-1"), -1});
  CHECK(fc_multiply(G, g, fc_invert(G, g)).is_identity());
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    Word w(a);
    for (int i = 0; i < 4; ++i)
      w.push({static_cast<std::uint32_t>(rng() % 2), static_cast<std::int8_t>(rng() % 2 ? 1 : -1)});
    Element g2{w, static_cast<std::int64_t>(rng() % 7) - 3};
    CHECK(fc_multiply(G, g2, fc_invert(G, g2)).is_identity());
    CHECK(fc_multiply(G, fc_invert(G, g2), g2).is_identity());
  }
}

TEST_CASE("normal form basics") {
  FcGroup G = g2();
  auto a = G.fiber_alphabet;
  CHECK(normal_form(G, "t") == Element{Word(a), 1});
  CHECK(normal_form(G, "t^-1 a2 t") == Element{parse_word(a, "a2 a1"), 0});
  CHECK(normal_form(G, "a1 t a1 t") == Element{parse_word(a, "a1 a1"), 2});
  CHECK(normal_form(G, "") == fc_identity(G));
}

TEST_CASE("normal form agrees with the brute-force rewriting oracle") {
  FcGroup G = g2();
  RewriteOracle oracle{G};
  // every mixed word of length <= 4 over {a1, a2, t} and inverses
  std::vector<std::string> tokens{"a1", "a1^-1", "a2", "a2^-1", "t", "t^-1"};
  std::vector<std::string> frontier{""};
  for (int len = 1; len <= 4; ++len) {
    std::vector<std::string> next;
    for (const std::string& w : frontier)
      for (const std::string& tk : tokens) next.push_back(w.empty() ? tk : w + " " + tk);
    for (const std::string& w : next) CHECK(normal_form(G, w) == oracle.run(w));
    frontier = std::move(next);
  }
}

TEST_CASE("normal form is a homomorphism over random token splits") {
  FcGroup G = gamma2();
  std::vector<std::string> tokens{"a0", "a1", "a2", "b1", "t", "a0^-1", "a2^-1", "t^-1"};
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t n = rng() % 8;
    std::vector<std::string> seq;
    for (std::size_t i = 0; i < n; ++i) seq.push_back(tokens[rng() % tokens.size()]);
    std::size_t cut = n == 0 ? 0 : rng() % (n + 1);
    auto join = [&](std::size_t from, std::size_t to) {
      std::string s;
      for (std::size_t i = from; i < to; ++i) s += (s.empty() ? "" : " ") + seq[i];
      return s;
    };
    Element whole = normal_form(G, join(0, n));
    Element left = normal_form(G, join(0, cut));
    Element right = normal_form(G, join(cut, n));
    CHECK(whole == fc_multiply(G, left, right));
  }
}

TEST_CASE("round trip through element serialization") {
  FcGroup G = gamma2();
  auto a = G.fiber_alphabet;
  Element g{parse_word(a, "a1 a2^-1"), 3};
  CHECK(g.str() == "a1 a2^-1 | 3");
  CHECK(parse_element(G, g.str()) == g);
  CHECK(fc_identity(G).str() == "e | 0");
  CHECK(parse_element(G, "e | -2") == Element{Word(a), -2});
  // canonical spelling "serialize(fiber) t^m" folds back to (fiber, m)
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    Word w(a);
    for (int i = 0; i < 5; ++i)
      w.push({static_cast<std::uint32_t>(rng() % a->size()),
              static_cast<std::int8_t>(rng() % 2 ? 1 : -1)});
    auto m = static_cast<std::int64_t>(rng() % 9) - 4;
    std::string spelling = w.str();
    if (m != 0) spelling += (spelling.empty() ? "" : " ") + std::string("t^") + std::to_string(m);
    CHECK(normal_form(G, spelling) == Element{w, m});
  }
}

TEST_CASE("lambda embedding of H_2 in G_2") {
  FcGroup G = g2();
  auto a = G.fiber_alphabet;
  SubgroupBasis B(G, {"a1 t", "a2 t"});
  CHECK(lambda_embed(G, B, Word(B.basis_alphabet)) == fc_identity(G));
  Word single = Word::single(B.basis_alphabet, 1);  // a2t
  CHECK(lambda_embed(G, B, single) == Element{parse_word(a, "a2"), 1});
  // (a2t)(a1t) = (a2 a1, 2)
  Word prod = parse_word(B.basis_alphabet, "a2t a1t");
  CHECK(lambda_embed(G, B, prod) == Element{parse_word(a, "a2 a1"), 2});
}

TEST_CASE("lambda embedding is injective on H_2 words up to length 7") {
  FcGroup G = g2();
  SubgroupBasis B(G, {"a1 t", "a2 t"});
  std::map<std::string, std::string> seen;
  std::size_t count = 0;
  for_each_reduced_word(B.basis_alphabet, 7, [&](const Word& w) {
    ++count;
    Element img = lambda_embed(G, B, w);
    auto [it, inserted] = seen.emplace(img.str(), w.str());
    CHECK_MESSAGE(inserted, "collision: ", w.str(), " vs ", it->second);
  });
  // 1 + sum_{n=1..7} 4 * 3^(n-1)
  CHECK(count == 4373);
}

TEST_CASE("check_unique_exponent") {
  FcGroup G = g2();
  SubgroupBasis B(G, {"a1 t", "a2 t"});
  auto r0 = check_unique_exponent(G, B, 0);
  CHECK(r0.violations.empty());
  auto r6 = check_unique_exponent(G, B, 6);
  CHECK(r6.violations.empty());
  CHECK(r6.injective);

  // basis {t}: fiber e carries every exponent
  SubgroupBasis T(G, {"t"});
  auto rt = check_unique_exponent(G, T, 3);
  REQUIRE(rt.violations.size() == 1);
  CHECK(rt.violations[0].fiber == "");
  CHECK(rt.violations[0].exponents.size() >= 3);
}

TEST_CASE("phi projection") {
  FcGroup Gamma = gamma2();
  FcGroup G = g2();
  auto ga = Gamma.fiber_alphabet;
  auto aa = G.fiber_alphabet;
  CHECK(phi_projection(Gamma, G, Element{parse_word(ga, "a0"), 0}) ==
        Element{parse_word(aa, "a1"), 0});
  CHECK(phi_projection(Gamma, G, Element{parse_word(ga, "b1"), 3}) == Element{Word(aa), 3});
  CHECK(phi_projection(Gamma, G, Element{parse_word(ga, "a0 b1 a2"), 0}) ==
        Element{parse_word(aa, "a1 a2"), 0});
}

TEST_CASE("phi projection intertwines theta and phi on generators") {
  FcGroup Gamma = gamma2();
  FcGroup G = g2();
  for (std::size_t g = 0; g < Gamma.fiber_alphabet->size(); ++g) {
    Word x = Word::single(Gamma.fiber_alphabet, static_cast<std::uint32_t>(g));
    Element lhs = phi_projection(Gamma, G, Element{Gamma.theta.apply(x), 0});
    Element proj = phi_projection(Gamma, G, Element{x, 0});
    Element rhs{G.theta.apply(proj.fiber), 0};
    CHECK(lhs == rhs);
  }
}

TEST_CASE("phi projection is a homomorphism on random pairs") {
  FcGroup Gamma = gamma2();
  FcGroup G = g2();
  auto ga = Gamma.fiber_alphabet;
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 300; ++trial) {
    auto rand_elt = [&] {
      Word w(ga);
      for (int i = 0; i < 4; ++i)
        w.push({static_cast<std::uint32_t>(rng() % ga->size()),
                static_cast<std::int8_t>(rng() % 2 ? 1 : -1)});
      return Element{w, static_cast<std::int64_t>(rng() % 5) - 2};
    };
    Element g = rand_elt(), h = rand_elt();
    CHECK(phi_projection(Gamma, G, fc_multiply(Gamma, g, h)) ==
          fc_multiply(G, phi_projection(Gamma, G, g), phi_projection(Gamma, G, h)));
  }
}
