#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "ggt/errors.hpp"
#include "ggt/word.hpp"

namespace ggt {

// Endomorphism given by one image word per generator.
struct GeneratorMap {
  AlphabetPtr alphabet;
  std::vector<Word> images;  // images[i] is the image of generator i

  GeneratorMap() = default;
  GeneratorMap(AlphabetPtr a, std::vector<Word> imgs)
      : alphabet(std::move(a)), images(std::move(imgs)) {
    if (images.size() != alphabet->size())
      throw ConfigError("generator map: image count does not match alphabet");
    for (const Word& w : images)
      if (w.alphabet() != alphabet && !(*w.alphabet() == *alphabet))
        throw ConfigError("generator map: image over a different alphabet");
  }

  static GeneratorMap identity(const AlphabetPtr& a) {
    std::vector<Word> imgs;
    imgs.reserve(a->size());
    for (std::size_t i = 0; i < a->size(); ++i)
      imgs.push_back(Word::single(a, static_cast<std::uint32_t>(i)));
    return GeneratorMap(a, std::move(imgs));
  }

  Word apply(const Word& w, const Budget& budget) const {
    Word out(alphabet);
    for (const Letter& l : w.letters()) {
      const Word& img = images[l.gen];
      if (l.sign > 0) {
        for (const Letter& m : img.letters()) out.push(m);
      } else {
        const auto& ls = img.letters();
        for (auto it = ls.rbegin(); it != ls.rend(); ++it) out.push(it->inverse());
      }
      budget.check_letters(out.length(), "apply");
    }
    return out;
  }
};

// True iff both compositions fix every generator.
inline bool verify_automorphism(const GeneratorMap& fwd, const GeneratorMap& inv,
                                const Budget& budget = {}) {
  if (!(*fwd.alphabet == *inv.alphabet)) throw ConfigError("verify: alphabet mismatch");
  for (std::size_t i = 0; i < fwd.alphabet->size(); ++i) {
    Word g = Word::single(fwd.alphabet, static_cast<std::uint32_t>(i));
    if (fwd.apply(inv.images[i], budget) != g) return false;
    if (inv.apply(fwd.images[i], budget) != g) return false;
  }
  return true;
}

// Automorphism with a verified inverse and a per-letter power cache:
// theta^n(generator) is memoized keyed by (generator, n).  Word images
// assemble from letter images and reduce.
class Automorphism {
 public:
  Automorphism() = default;
  Automorphism(GeneratorMap forward, GeneratorMap inverse, const Budget& budget = {})
      : state_(std::make_shared<State>()) {
    if (!verify_automorphism(forward, inverse, budget))
      throw ConfigError("not an automorphism: compositions do not fix the generators");
    state_->fwd = std::move(forward);
    state_->inv = std::move(inverse);
  }

  static Automorphism identity(const AlphabetPtr& a) {
    return Automorphism(GeneratorMap::identity(a), GeneratorMap::identity(a));
  }

  const AlphabetPtr& alphabet() const { return state_->fwd.alphabet; }
  const GeneratorMap& forward() const { return state_->fwd; }
  const GeneratorMap& inverse_map() const { return state_->inv; }

  bool is_identity() const {
    for (std::size_t i = 0; i < alphabet()->size(); ++i) {
      const Word& img = state_->fwd.images[i];
      if (img.length() != 1 || img.at(0).gen != i || img.at(0).sign != 1) return false;
    }
    return true;
  }

  Word apply(const Word& w, const Budget& budget = {}) const {
    return state_->fwd.apply(w, budget);
  }
  Word apply_inverse(const Word& w, const Budget& budget = {}) const {
    return state_->inv.apply(w, budget);
  }

  // n-fold composition; negative n uses the inverse images.
  Word power_apply(std::int64_t n, const Word& w, const Budget& budget = {}) const {
    if (n == 0) return w;
    Word out(alphabet());
    for (const Letter& l : w.letters()) {
      const Word& img = letter_power(l.gen, n, budget);
      if (l.sign > 0) {
        for (const Letter& m : img.letters()) out.push(m);
      } else {
        const auto& ls = img.letters();
        for (auto it = ls.rbegin(); it != ls.rend(); ++it) out.push(it->inverse());
      }
      budget.check_letters(out.length(), "power_apply");
    }
    return out;
  }

  // Drops all memoized letter powers.  Results never change.
  void clear_cache() const {
    std::lock_guard<std::mutex> lock(state_->mutex);
    state_->cache.clear();
  }

 private:
  struct State {
    GeneratorMap fwd;
    GeneratorMap inv;
    mutable std::unordered_map<std::uint64_t, Word> cache;
    mutable std::mutex mutex;
  };

  static std::uint64_t cache_key(std::uint32_t gen, std::int64_t n) {
    return (static_cast<std::uint64_t>(gen) << 32) ^
           (static_cast<std::uint64_t>(static_cast<std::uint32_t>(n)));
  }

  const Word& letter_power(std::uint32_t gen, std::int64_t n, const Budget& budget) const {
    std::uint64_t key = cache_key(gen, n);
    {
      std::lock_guard<std::mutex> lock(state_->mutex);
      auto it = state_->cache.find(key);
      if (it != state_->cache.end()) return it->second;
    }
    Word result;
    if (n == 1) {
      result = state_->fwd.images[gen];
    } else if (n == -1) {
      result = state_->inv.images[gen];
    } else {
      std::int64_t step = n > 0 ? 1 : -1;
      const Word& prev = letter_power(gen, n - step, budget);
      result = step > 0 ? state_->fwd.apply(prev, budget) : state_->inv.apply(prev, budget);
    }
    std::lock_guard<std::mutex> lock(state_->mutex);
    auto [it, inserted] = state_->cache.emplace(key, std::move(result));
    (void)inserted;  // a racing thread may have filled it; values are identical
    return it->second;
  }

  std::shared_ptr<State> state_;
};

// phi of the hydra group G_k: phi(a_1) = a_1, phi(a_i) = a_i a_{i-1}.
// Alphabet a1..ak.  The inverse is recursive (a_i a_{i-1}^-1 alone is
// only right for i <= 2).
inline Automorphism hydra_phi(std::size_t k) {
  if (k < 1) throw ConfigError("hydra_phi: k must be >= 1");
  std::vector<std::string> names;
  for (std::size_t i = 1; i <= k; ++i) names.push_back("a" + std::to_string(i));
  auto alphabet = std::make_shared<const Alphabet>(names);
  std::vector<Word> fwd, inv;
  for (std::size_t i = 0; i < k; ++i) {
    Word f = Word::single(alphabet, static_cast<std::uint32_t>(i));
    if (i > 0) f.push({static_cast<std::uint32_t>(i - 1), 1});
    fwd.push_back(std::move(f));
    // phi^-1(a_i) = a_i phi^-1(a_{i-1})^-1, unwinding the appended letter
    Word g = Word::single(alphabet, static_cast<std::uint32_t>(i));
    if (i > 0) g = multiply(g, inv[i - 1].inverse());
    inv.push_back(std::move(g));
  }
  return Automorphism(GeneratorMap(alphabet, std::move(fwd)),
                      GeneratorMap(alphabet, std::move(inv)));
}

// Configuration for the hyperbolic-hydra automorphism theta on
// F(a_0..a_k, b_1..b_l).  The exact u, v, l of the construction are not
// pinned down here; they are supplied, and the b-restriction must verify
// as an automorphism of F(b_1..b_l).
struct HydraConfig {
  std::size_t k = 1;
  std::size_t l = 1;
  std::string u;  // word on b's
  std::string v;  // word on b's
  std::vector<std::string> theta_b;          // image of b_j, j = 1..l
  std::vector<std::string> theta_b_inverse;  // preimage of b_j
};

inline AlphabetPtr hydra_gamma_alphabet(std::size_t k, std::size_t l) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i <= k; ++i) names.push_back("a" + std::to_string(i));
  for (std::size_t j = 1; j <= l; ++j) names.push_back("b" + std::to_string(j));
  return std::make_shared<const Alphabet>(names);
}

// theta(a_0) = u a_1 v, theta(a_1) = a_0, theta(a_i) = a_i a_{i-1} (i > 1),
// theta(b_j) from the config.  The inverse on the a's follows by solving:
//   theta^-1(a_0) = a_1
//   theta^-1(a_1) = theta^-1(u)^-1 a_0 theta^-1(v)^-1
//   theta^-1(a_i) = a_i theta^-1(a_{i-1})^-1        (i > 1)
inline Automorphism hydra_theta(const HydraConfig& cfg, const Budget& budget = {}) {
  if (cfg.k < 1) throw ConfigError("hydra_theta: k must be >= 1");
  if (cfg.l < 1) throw ConfigError("hydra_theta: l must be >= 1");
  if (cfg.theta_b.size() != cfg.l || cfg.theta_b_inverse.size() != cfg.l)
    throw ConfigError("hydra_theta: need one theta_b and theta_b_inverse entry per b generator");

  auto alphabet = hydra_gamma_alphabet(cfg.k, cfg.l);
  const std::size_t b0 = cfg.k + 1;  // index of b_1

  auto require_b_only = [&](const Word& w, const std::string& what) {
    for (const Letter& l : w.letters())
      if (l.gen < b0) throw ConfigError("hydra_theta: " + what + " must use only b letters");
  };

  Word u = parse_word(alphabet, cfg.u);
  Word v = parse_word(alphabet, cfg.v);
  require_b_only(u, "u");
  require_b_only(v, "v");

  std::vector<Word> fwd(alphabet->size(), Word(alphabet));
  std::vector<Word> inv(alphabet->size(), Word(alphabet));

  for (std::size_t j = 0; j < cfg.l; ++j) {
    Word img = parse_word(alphabet, cfg.theta_b[j]);
    Word pre = parse_word(alphabet, cfg.theta_b_inverse[j]);
    require_b_only(img, "theta_b");
    require_b_only(pre, "theta_b_inverse");
    fwd[b0 + j] = std::move(img);
    inv[b0 + j] = std::move(pre);
  }

  // Check the b-restriction is an automorphism of F(b_1..b_l) before
  // deriving the a-inverses (which substitute through it).
  {
    GeneratorMap bf(alphabet, [&] {
      std::vector<Word> imgs(alphabet->size(), Word(alphabet));
      for (std::size_t i = 0; i < alphabet->size(); ++i)
        imgs[i] = i < b0 ? Word::single(alphabet, static_cast<std::uint32_t>(i)) : fwd[i];
      return imgs;
    }());
    GeneratorMap bi(alphabet, [&] {
      std::vector<Word> imgs(alphabet->size(), Word(alphabet));
      for (std::size_t i = 0; i < alphabet->size(); ++i)
        imgs[i] = i < b0 ? Word::single(alphabet, static_cast<std::uint32_t>(i)) : inv[i];
      return imgs;
    }());
    for (std::size_t j = 0; j < cfg.l; ++j) {
      Word g = Word::single(alphabet, static_cast<std::uint32_t>(b0 + j));
      if (bf.apply(inv[b0 + j], budget) != g || bi.apply(fwd[b0 + j], budget) != g)
        throw ConfigError("hydra_theta: theta_b / theta_b_inverse is not an automorphism of F(b)");
    }
  }

  // Forward images of the a's.
  fwd[0] = multiply(multiply(u, Word::single(alphabet, 1)), v);  // a_0 -> u a_1 v
  fwd[1] = Word::single(alphabet, 0);                            // a_1 -> a_0
  for (std::size_t i = 2; i <= cfg.k; ++i) {
    Word w = Word::single(alphabet, static_cast<std::uint32_t>(i));
    w.push({static_cast<std::uint32_t>(i - 1), 1});
    fwd[i] = std::move(w);
  }

  // Inverse images of the a's.
  GeneratorMap inv_b_only(alphabet, [&] {
    std::vector<Word> imgs(alphabet->size(), Word(alphabet));
    for (std::size_t i = 0; i < alphabet->size(); ++i)
      imgs[i] = i < b0 ? Word::single(alphabet, static_cast<std::uint32_t>(i)) : inv[i];
    return imgs;
  }());
  inv[0] = Word::single(alphabet, 1);
  inv[1] = multiply(multiply(inv_b_only.apply(u, budget).inverse(), Word::single(alphabet, 0)),
                    inv_b_only.apply(v, budget).inverse());
  for (std::size_t i = 2; i <= cfg.k; ++i) {
    Word w = Word::single(alphabet, static_cast<std::uint32_t>(i));
    inv[i] = multiply(w, inv[i - 1].inverse());
  }

  return Automorphism(GeneratorMap(alphabet, std::move(fwd)),
                      GeneratorMap(alphabet, std::move(inv)), budget);
}

}  // namespace ggt
