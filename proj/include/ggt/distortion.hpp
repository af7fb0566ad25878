#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ggt/cayley.hpp"
#include "ggt/free_by_cyclic.hpp"

namespace ggt {

using BigInt = boost::multiprecision::cpp_int;

// --- reference growth functions ---

struct AckermannBudget {
  std::uint64_t max_iterations = 1'000'000;   // iterate count per level
  std::uint64_t max_bits = 1'000'000;         // result magnitude cap
};

// Level 1 doubles; level k+1 iterates level k, n times, starting at 1.
// Level 2 is n -> 2^n and level 3 is a height-n tower of 2s.
inline BigInt ackermann(unsigned k, const BigInt& n, const AckermannBudget& budget = {}) {
  if (k == 0) throw ConfigError("ackermann: level must be >= 1");
  if (n < 0) throw ConfigError("ackermann: argument must be >= 0");
  if (k == 1) {
    BigInt r = 2 * n;
    if (msb(r == 0 ? BigInt(1) : r) >= budget.max_bits)
      throw BudgetError("ackermann: result exceeds the bit budget", 0);
    return r;
  }
  if (n > budget.max_iterations)
    throw BudgetError("ackermann: iteration count exceeds the budget", 0);
  std::uint64_t count = n.convert_to<std::uint64_t>();
  BigInt x = 1;
  for (std::uint64_t i = 0; i < count; ++i) {
    x = ackermann(k - 1, x, budget);
    if (msb(x) >= budget.max_bits)
      throw BudgetError("ackermann: result exceeds the bit budget", 0);
  }
  return x;
}

inline BigInt ackermann(unsigned k, std::uint64_t n, const AckermannBudget& budget = {}) {
  return ackermann(k, BigInt(n), budget);
}

// --- subgroup length enumeration ---
//
// Subgroup words are read over the basis: every element reachable by a
// basis word of length <= R is reachable by a REDUCED one of no greater
// length (free cancellation only shortens), so a depth-first walk of
// reduced basis words visits every such element.  The walk keeps only a
// stack of embedded elements, so deep radii stay cheap in memory; the
// per-element minimum is taken across revisits.

namespace detail {

// Depth-first over reduced basis words; visit(word, element) is called
// once per reduced word, in canonical generator order.
template <typename Visit>
void walk_reduced_basis_words(const FcGroup& G, const SubgroupBasis& basis,
                              std::uint32_t max_length, const Budget& budget, Visit&& visit) {
  const std::size_t rank = basis.generators.size();
  const std::vector<Element>& gens = basis.generators;
  const std::vector<Element>& gen_invs = basis.generator_inverses;
  Word word(basis.basis_alphabet);
  std::vector<Element> stack{fc_identity(G)};
  visit(word, stack.back());

  // explicit DFS: frames of (generator index 0..2*rank, direction)
  struct Frame { std::size_t next = 0; };
  std::vector<Frame> frames{{}};
  while (!frames.empty()) {
    Frame& f = frames.back();
    if (f.next == 2 * rank || frames.size() > max_length) {
      frames.pop_back();
      if (!word.empty()) {
        Word shorter(basis.basis_alphabet);
        for (std::size_t i = 0; i + 1 < word.length(); ++i) shorter.push(word.at(i));
        word = std::move(shorter);
        stack.pop_back();
      }
      continue;
    }
    std::size_t pick = f.next++;
    std::uint32_t g = static_cast<std::uint32_t>(pick / 2);
    std::int8_t sign = pick % 2 == 0 ? 1 : -1;
    Letter l{g, sign};
    if (!word.empty() && cancels(word.at(word.length() - 1), l)) continue;  // stay reduced
    word.push(l);
    Element child = fc_multiply(G, stack.back(), sign > 0 ? gens[g] : gen_invs[g], budget);
    stack.push_back(std::move(child));
    visit(word, stack.back());
    frames.push_back({});
  }
}

}  // namespace detail

// Minimal basis-word length for every element reachable within R; exact
// whenever the recorded length is <= R.
inline std::unordered_map<std::string, std::uint32_t> subgroup_length_index(
    const FcGroup& G, const SubgroupBasis& basis, std::uint32_t r_lambda,
    const Budget& budget = {}) {
  std::unordered_map<std::string, std::uint32_t> index;
  detail::walk_reduced_basis_words(G, basis, r_lambda, budget,
                                   [&](const Word& w, const Element& e) {
    auto len = static_cast<std::uint32_t>(w.length());
    auto [it, fresh] = index.emplace(e.str(), len);
    if (!fresh && len < it->second) it->second = len;
    budget.check_elements(index.size(), "subgroup_length_index");
  });
  return index;
}

// --- exact reduced words over a rank-2 shear basis ---
//
// Specialization for the rank-2 fiber with the shear automorphism
// (theta(a1) = a1, theta(a2) = a2 a1) and the basis {a1 t, a2 t}.  Writing
// t past a fiber letter turns a2 into theta^{+-1}(a2) = a2 a1^{+-1}; this
// never creates, destroys, or cancels an a2.  Hence the a2-letters of the
// fiber normal form of a subgroup element correspond one-to-one and in
// order with the (a2 t)-letters of its reduced basis word, and since the
// subgroup is free on the basis, that reduced word is unique.  Splitting
// the fiber into a1-runs separated by a2-letters therefore pins the whole
// word shape x^{e_0} y^{s_1} x^{e_1} ... y^{s_c} x^{e_c} (x = a1 t,
// y = a2 t) up to the run exponents e_j, and those solve a forward
// substitution: appending x^e adds a1^e to the fiber, appending y at
// exponent m adds a2 a1^{-m}, appending y^-1 adds a1^{m-1} a2^-1.
// Membership, the reduced word, and the exact subgroup length all come
// out in time linear in the fiber plus the output.
class ShearBasisSolver {
 public:
  // Applies only to the exact shape above; anything else gets nullopt.
  static std::optional<ShearBasisSolver> detect(const FcGroup& G, const SubgroupBasis& basis) {
    if (G.fiber_alphabet->size() != 2 || basis.generators.size() != 2) return std::nullopt;
    Word a1 = Word::single(G.fiber_alphabet, 0);
    Word a2 = Word::single(G.fiber_alphabet, 1);
    if (G.theta.apply(a1) != a1) return std::nullopt;
    if (G.theta.apply(a2) != multiply(a2, a1)) return std::nullopt;
    if (basis.generators[0] != Element{a1, 1}) return std::nullopt;
    if (basis.generators[1] != Element{a2, 1}) return std::nullopt;
    return ShearBasisSolver(G, basis);
  }

  // Unique reduced basis word of g, or nullopt when g is not in the
  // subgroup.  The result is certified by re-embedding before returning.
  std::optional<Word> reduced_word(const Element& g, const Budget& budget = {}) const {
    // fiber = a1^{f_0} a2^{s_1} a1^{f_1} ... a2^{s_c} a1^{f_c}
    std::vector<std::int64_t> f{0};
    std::vector<int> s;
    for (Letter l : g.fiber.letters()) {
      if (l.gen == 0) {
        f.back() += l.sign;
      } else {
        s.push_back(l.sign);
        f.push_back(0);
      }
    }
    std::size_t c = s.size();
    std::vector<std::int64_t> e(c + 1);
    std::int64_t mu = 0;         // running exponent before the next y-letter
    std::size_t total = c;       // output length, checked against the budget
    for (std::size_t j = 0; j <= c; ++j) {
      // run f_j = (tail of the previous y) + e_j + (head of the next y)
      std::int64_t head = (j > 0 && s[j - 1] > 0) ? -(mu - 1) : 0;
      if (j < c && s[j] < 0) {
        // head + e_j + ((mu + e_j) - 1) = f_j, so e_j has coefficient 2
        std::int64_t num = f[j] - head - mu + 1;
        if (num % 2 != 0) return std::nullopt;
        e[j] = num / 2;
      } else {
        e[j] = f[j] - head;
      }
      mu += e[j];
      if (j < c) mu += s[j];
      total += static_cast<std::size_t>(e[j] < 0 ? -e[j] : e[j]);
      budget.check_letters(total, "ShearBasisSolver::reduced_word");
    }
    if (mu != g.exponent) return std::nullopt;
    Word out(basis_->basis_alphabet);
    for (std::size_t j = 0; j <= c; ++j) {
      for (std::int64_t i = e[j] < 0 ? -e[j] : e[j]; i > 0; --i)
        out.push({0, static_cast<std::int8_t>(e[j] > 0 ? 1 : -1)});
      if (j < c) out.push({1, static_cast<std::int8_t>(s[j] > 0 ? 1 : -1)});
    }
    if (lambda_embed(*group_, *basis_, out, budget) != g) return std::nullopt;
    return out;
  }

 private:
  ShearBasisSolver(const FcGroup& G, const SubgroupBasis& basis)
      : group_(&G), basis_(&basis) {}
  const FcGroup* group_;
  const SubgroupBasis* basis_;
};

// --- distortion tables ---

struct DistortionRow {
  std::uint32_t n = 0;
  std::uint32_t dist_lb = 0;     // max subgroup length seen in the ambient n-ball
  Element witness;               // achieves dist_lb, canonical tie-break
  Word lambda_word;              // basis word of length dist_lb mapping to witness
  bool saturated = false;
};

struct DistortionTable {
  std::vector<DistortionRow> rows;
  std::uint32_t n_max = 0;
  std::uint32_t r_lambda = 0;  // enumeration radius the bound is relative to
  bool saturated = false;

  // header: n,dist_lb,saturated,witness
  std::vector<std::string> csv() const {
    std::vector<std::string> out{"n,dist_lb,saturated,witness"};
    for (const DistortionRow& r : rows)
      out.push_back(std::to_string(r.n) + "," + std::to_string(r.dist_lb) + "," +
                    (r.saturated ? "true" : "false") + "," + r.witness.str());
    return out;
  }
};

namespace detail {

// The enumeration is certifiably complete only when subgroup lengths
// cannot exceed ambient ones: the basis embeds onto (a subset of) the
// generating set, or onto distinct free-factor letters of an untwisted
// fiber.  Everything else is reported as a lower bound.
inline bool distortion_saturated(const GroupContext& ctx, const SubgroupBasis& basis,
                                 std::uint32_t n_max, std::uint32_t r_lambda) {
  if (r_lambda < n_max) return false;
  auto is_generator = [&](const Element& e) {
    for (const Element& g : ctx.generators)
      if (g == e) return true;
    return false;
  };
  for (const Element& e : basis.generators)
    if (!is_generator(e)) return false;
  // distinct free-factor letters of an untwisted fiber: subgroup length
  // equals ambient length on the subgroup, so the n-ball is fully covered
  if (ctx.metric == Metric::tree_fiber || ctx.metric == Metric::tree_z) return true;
  // whole generating set: the subgroup is the group itself
  std::size_t covered = 0;
  for (const Element& g : ctx.generators) {
    bool hit = false;
    for (const Element& e : basis.generators)
      if (g == e || g == fc_invert(ctx.group, e)) { hit = true; break; }
    if (hit) ++covered;
  }
  return covered == ctx.generators.size();
}

}  // namespace detail

// Distortion table: row n is the largest minimal basis-word length among
// elements of the ambient n-ball.  With a detectable shear basis the
// subgroup lengths are exact for every ball element and the table is
// saturated regardless of r_lambda; otherwise candidates come from basis
// words of length <= r_lambda and the rows are lower bounds.  Witnesses
// are deterministic (serialization order breaks ties).
inline DistortionTable distortion_table(const GroupContext& ctx, const SubgroupBasis& basis,
                                        std::uint32_t n_max, std::uint32_t r_lambda,
                                        const Budget& budget = {}) {
  BallIndex ball = enumerate_ball(ctx, ctx.identity(), n_max);

  struct Entry {
    std::uint32_t lambda_len;
    std::uint32_t gamma_dist;
    Word lambda_word;
    Element element;
  };
  std::unordered_map<std::string, Entry> in_ball;  // only ball members are kept
  std::optional<ShearBasisSolver> solver = ShearBasisSolver::detect(ctx.group, basis);
  if (solver) {
    for (std::size_t i = 0; i < ball.elements.size(); ++i) {
      std::optional<Word> w = solver->reduced_word(ball.elements[i], budget);
      if (!w) continue;
      Entry entry{static_cast<std::uint32_t>(w->length()), ball.dist[i], *w, ball.elements[i]};
      in_ball.emplace(ball.elements[i].str(), std::move(entry));
    }
  } else {
    detail::walk_reduced_basis_words(ctx.group, basis, r_lambda, budget,
                                     [&](const Word& w, const Element& e) {
      auto d = ball.distance_of(e);
      if (!d) return;
      auto len = static_cast<std::uint32_t>(w.length());
      std::string key = e.str();
      auto it = in_ball.find(key);
      if (it == in_ball.end())
        in_ball.emplace(std::move(key), Entry{len, *d, w, e});
      else if (len < it->second.lambda_len)
        it->second = Entry{len, *d, w, e};
      budget.check_elements(in_ball.size(), "distortion_table");
    });
  }

  DistortionTable table;
  table.n_max = n_max;
  table.r_lambda = r_lambda;
  table.saturated =
      solver.has_value() || detail::distortion_saturated(ctx, basis, n_max, r_lambda);
  // best candidate per exact ambient distance, then cumulative max over n
  std::vector<const Entry*> best_at(n_max + 1, nullptr);
  for (const auto& [key, entry] : in_ball) {
    const Entry*& slot = best_at[entry.gamma_dist];
    if (!slot || entry.lambda_len > slot->lambda_len ||
        (entry.lambda_len == slot->lambda_len && key < slot->element.str()))
      slot = &entry;
  }
  const Entry* best = nullptr;
  for (std::uint32_t n = 0; n <= n_max; ++n) {
    const Entry* cand = best_at[n];
    if (cand && (!best || cand->lambda_len > best->lambda_len ||
                 (cand->lambda_len == best->lambda_len &&
                  cand->element.str() < best->element.str())))
      best = cand;
    DistortionRow row;
    row.n = n;
    row.saturated = table.saturated;
    if (best) {
      row.dist_lb = best->lambda_len;
      row.witness = best->element;
      row.lambda_word = best->lambda_word;
    } else {
      row.witness = ctx.identity();
      row.lambda_word = Word(basis.basis_alphabet);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

// Witness for row n: the element achieving dist_lb together with its
// basis word.
inline std::pair<Element, Word> max_distortion_witness(const DistortionTable& table,
                                                       std::uint32_t n) {
  if (n >= table.rows.size()) throw ConfigError("distortion witness: row out of range");
  return {table.rows[n].witness, table.rows[n].lambda_word};
}

}  // namespace ggt
