#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ggt/automorphism.hpp"
#include "ggt/errors.hpp"
#include "ggt/word.hpp"

namespace ggt {

// F x|_theta Z with stable letter t acting by t^-1 x t = theta(x).
struct FcGroup {
  AlphabetPtr fiber_alphabet;
  Automorphism theta;
  std::string stable_letter = "t";

  FcGroup() = default;
  FcGroup(AlphabetPtr fiber, Automorphism th, std::string stable = "t")
      : fiber_alphabet(std::move(fiber)), theta(std::move(th)), stable_letter(std::move(stable)) {
    if (fiber_alphabet->has(stable_letter))
      throw ConfigError("stable letter '" + stable_letter + "' collides with the fiber alphabet");
    if (!(*theta.alphabet() == *fiber_alphabet))
      throw ConfigError("theta is not an automorphism of the fiber alphabet");
  }

  static FcGroup free_group(AlphabetPtr alphabet, std::string stable = "t") {
    auto id = Automorphism::identity(alphabet);
    return FcGroup(std::move(alphabet), std::move(id), std::move(stable));
  }
};

// Normal form (w-hat, m), meaning w-hat t^m.  Equality is componentwise.
struct Element {
  Word fiber;
  std::int64_t exponent = 0;

  bool operator==(const Element& o) const {
    return exponent == o.exponent && fiber == o.fiber;
  }
  bool operator!=(const Element& o) const { return !(*this == o); }

  bool is_identity() const { return exponent == 0 && fiber.empty(); }

  // `<fiber> | <exponent>`, with the empty fiber written as "e".
  std::string str() const {
    std::string f = fiber.str();
    if (f.empty()) f = "e";
    return f + " | " + std::to_string(exponent);
  }
};

inline Element fc_identity(const FcGroup& G) { return Element{Word(G.fiber_alphabet), 0}; }

// (u, m) (v, n) = (u theta^-m(v), m + n); the t^m shuffles past v.
inline Element fc_multiply(const FcGroup& G, const Element& g, const Element& h,
                           const Budget& budget = {}) {
  Word shifted = G.theta.power_apply(-g.exponent, h.fiber, budget);
  return Element{multiply(g.fiber, shifted), g.exponent + h.exponent};
}

// (w, m)^-1 = (theta^m(w^-1), -m).
inline Element fc_invert(const FcGroup& G, const Element& g, const Budget& budget = {}) {
  return Element{G.theta.power_apply(g.exponent, g.fiber.inverse(), budget), -g.exponent};
}

inline Element parse_element(const FcGroup& G, const std::string& text) {
  auto bar = text.find('|');
  if (bar == std::string::npos) throw ParseError("element: missing '|' separator");
  std::string fiber_text = text.substr(0, bar);
  std::string exp_text = text.substr(bar + 1);
  // strip and accept the "e" spelling of the empty fiber
  auto trim = [](std::string s) {
    auto a = s.find_first_not_of(" \t");
    auto b = s.find_last_not_of(" \t");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
  };
  fiber_text = trim(fiber_text);
  if (fiber_text == "e") fiber_text.clear();
  Element out{parse_word(G.fiber_alphabet, fiber_text), 0};
  try {
    out.exponent = std::stoll(trim(exp_text));
  } catch (const std::exception&) {
    throw ParseError("element: bad exponent '" + exp_text + "'");
  }
  return out;
}

// Normal form of a mixed word over fiber + {t}: left fold of letter
// elements under fc_multiply.  The t token takes exponents (t^-3).
inline Element normal_form(const FcGroup& G, const std::string& mixed,
                           const Budget& budget = {}) {
  std::vector<std::string> names = G.fiber_alphabet->names();
  names.push_back(G.stable_letter);
  auto extended = std::make_shared<const Alphabet>(names);
  // Parse over the extended alphabet without reducing across t; the fold
  // handles all interaction.
  Word raw = parse_word(extended, mixed);
  const std::uint32_t t_index = static_cast<std::uint32_t>(G.fiber_alphabet->size());
  Element acc = fc_identity(G);
  for (const Letter& l : raw.letters()) {
    Element step;
    if (l.gen == t_index) {
      step = Element{Word(G.fiber_alphabet), l.sign};
    } else {
      step = Element{Word::single(G.fiber_alphabet, l.gen, l.sign), 0};
    }
    acc = fc_multiply(G, acc, step, budget);
  }
  return acc;
}

// Generating words for a subgroup, parsed as mixed words (a0 t etc).
struct SubgroupBasis {
  std::vector<std::string> generator_words;
  std::vector<Element> generators;         // embedded images
  std::vector<Element> generator_inverses;
  AlphabetPtr basis_alphabet;              // abstract rank-|B| free group

  SubgroupBasis() = default;
  SubgroupBasis(const FcGroup& G, std::vector<std::string> words, const Budget& budget = {})
      : generator_words(std::move(words)) {
    if (generator_words.empty()) throw ConfigError("subgroup basis: empty");
    std::vector<std::string> names;
    std::set<std::string> seen;
    bool unique = true;
    for (const std::string& w : generator_words) {
      Element g = normal_form(G, w, budget);
      generators.push_back(g);
      generator_inverses.push_back(fc_invert(G, g, budget));
      // Name the abstract basis letter by the spelling with whitespace dropped.
      std::string name;
      for (char c : w)
        if (!std::isspace(static_cast<unsigned char>(c))) name.push_back(c);
      if (name.empty() || !seen.insert(name).second) unique = false;
      names.push_back(name);
    }
    if (!unique) {
      names.clear();
      for (std::size_t i = 0; i < generator_words.size(); ++i)
        names.push_back("g" + std::to_string(i));
    }
    basis_alphabet = std::make_shared<const Alphabet>(names);
  }

  std::size_t rank() const { return generators.size(); }
};

// Image in G of a reduced word over the abstract free group on the basis.
inline Element lambda_embed(const FcGroup& G, const SubgroupBasis& B, const Word& lambda_word,
                            const Budget& budget = {}) {
  Element acc = fc_identity(G);
  for (const Letter& l : lambda_word.letters()) {
    const Element& step = l.sign > 0 ? B.generators[l.gen] : B.generator_inverses[l.gen];
    acc = fc_multiply(G, acc, step, budget);
  }
  return acc;
}

// --- the projection Gamma_k ->> G_k ---

// Recognizes alphabets of the two hydra shapes by name.
inline bool is_gamma_shape(const Alphabet& a, std::size_t& k_out, std::size_t& l_out) {
  std::size_t k = 0, l = 0;
  for (const std::string& n : a.names()) {
    if (n.size() > 1 && n[0] == 'a')
      ++k;
    else if (n.size() > 1 && n[0] == 'b')
      ++l;
    else
      return false;
  }
  if (k < 2 || l < 1) return false;  // needs a_0..a_k with k >= 1 and b_1..b_l
  for (std::size_t i = 0; i < k; ++i)
    if (a.name(i) != "a" + std::to_string(i)) return false;
  for (std::size_t j = 0; j < l; ++j)
    if (a.name(k + j) != "b" + std::to_string(j + 1)) return false;
  k_out = k - 1;
  l_out = l;
  return true;
}

// a_i -> a_max(1,i), b_j -> 1, t -> t.  Exponent is preserved.
inline Element phi_projection(const FcGroup& gamma, const FcGroup& g_group, const Element& g) {
  std::size_t k = 0, l = 0;
  if (!is_gamma_shape(*gamma.fiber_alphabet, k, l))
    throw ConfigError("phi_projection: source group is not Gamma-shaped (a0..ak, b1..bl)");
  if (g_group.fiber_alphabet->size() != k)
    throw ConfigError("phi_projection: target group rank does not match");
  Word out(g_group.fiber_alphabet);
  for (const Letter& let : g.fiber.letters()) {
    if (let.gen > k) continue;  // b letters die
    std::uint32_t i = let.gen == 0 ? 0 : let.gen - 1;  // a_i -> a_max(1,i), 0-based target
    out.push({i, let.sign});
  }
  return Element{std::move(out), g.exponent};
}

// --- enumeration of reduced words over a basis ---

// Calls visit(word) for every reduced word over the basis alphabet with
// length <= radius, in deterministic order (shorter first, letters in
// declared order, positive before negative).
template <typename Visit>
void for_each_reduced_word(const AlphabetPtr& basis_alphabet, std::size_t radius, Visit&& visit) {
  std::vector<Letter> stack;
  auto rec = [&](auto&& self, std::size_t remaining) -> void {
    if (remaining == 0) return;
    for (std::uint32_t g = 0; g < basis_alphabet->size(); ++g) {
      for (std::int8_t s : {static_cast<std::int8_t>(1), static_cast<std::int8_t>(-1)}) {
        if (!stack.empty() && cancels(stack.back(), Letter{g, s})) continue;
        stack.push_back({g, s});
        visit(Word(basis_alphabet, stack));
        self(self, remaining - 1);
        stack.pop_back();
      }
    }
  };
  visit(Word(basis_alphabet));
  rec(rec, radius);
}

// Report of the Lemma-4.2-style exponent uniqueness scan.
struct UniqueExponentReport {
  struct Violation {
    std::string fiber;
    std::vector<std::int64_t> exponents;
  };
  std::size_t words_checked = 0;
  std::vector<Violation> violations;
  bool injective = true;  // no two distinct basis words map to the same Element
};

// Enumerates all reduced basis words of length <= radius and groups images
// by fiber word.  A fiber with two distinct exponents violates uniqueness
// of the exponent (expected empty for hydra configs); two distinct words
// with the same Element break injectivity.
inline UniqueExponentReport check_unique_exponent(const FcGroup& G, const SubgroupBasis& B,
                                                  std::size_t radius, const Budget& budget = {}) {
  UniqueExponentReport report;
  std::map<std::string, std::set<std::int64_t>> by_fiber;
  std::map<std::string, std::size_t> element_count;
  for_each_reduced_word(B.basis_alphabet, radius, [&](const Word& w) {
    Element img = lambda_embed(G, B, w, budget);
    ++report.words_checked;
    budget.check_elements(report.words_checked, "check_unique_exponent");
    by_fiber[img.fiber.str()].insert(img.exponent);
    if (++element_count[img.str()] > 1) report.injective = false;
  });
  for (const auto& [fiber, exps] : by_fiber) {
    if (exps.size() > 1)
      report.violations.push_back({fiber, {exps.begin(), exps.end()}});
  }
  return report;
}

}  // namespace ggt
