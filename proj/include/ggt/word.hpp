#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "ggt/errors.hpp"

namespace ggt {

// Ordered set of free-group generator names.  Words index into it.
class Alphabet {
 public:
  explicit Alphabet(std::vector<std::string> names) : names_(std::move(names)) {
    for (std::size_t i = 0; i < names_.size(); ++i) {
      const std::string& n = names_[i];
      if (n.empty()) throw ConfigError("alphabet: empty generator name");
      if (n == "^") throw ConfigError("alphabet: generator name '^' is reserved");
      if (!index_.emplace(n, i).second)
        throw ConfigError("alphabet: duplicate generator name '" + n + "'");
    }
  }

  std::size_t size() const { return names_.size(); }
  const std::string& name(std::size_t i) const { return names_[i]; }
  const std::vector<std::string>& names() const { return names_; }

  bool has(const std::string& n) const { return index_.count(n) != 0; }
  std::size_t index_of(const std::string& n) const {
    auto it = index_.find(n);
    if (it == index_.end()) throw ParseError("unknown generator token '" + n + "'");
    return it->second;
  }

  bool operator==(const Alphabet& o) const { return names_ == o.names_; }

 private:
  std::vector<std::string> names_;
  std::map<std::string, std::size_t> index_;
};

using AlphabetPtr = std::shared_ptr<const Alphabet>;

struct Letter {
  std::uint32_t gen;
  std::int8_t sign;  // +1 or -1

  Letter inverse() const { return {gen, static_cast<std::int8_t>(-sign)}; }
  bool operator==(const Letter& o) const { return gen == o.gen && sign == o.sign; }
  bool operator!=(const Letter& o) const { return !(*this == o); }
};

inline bool cancels(const Letter& a, const Letter& b) {
  return a.gen == b.gen && a.sign == -b.sign;
}

// Freely reduced word over a shared alphabet.  Canonical by construction:
// every constructor and operation reduces, so equality is componentwise.
class Word {
 public:
  Word() = default;
  explicit Word(AlphabetPtr alphabet) : alphabet_(std::move(alphabet)) {}

  // Reduces the raw letter sequence with a stack.
  Word(AlphabetPtr alphabet, const std::vector<Letter>& raw)
      : alphabet_(std::move(alphabet)) {
    for (const Letter& l : raw) push(l);
  }

  static Word single(AlphabetPtr alphabet, std::uint32_t gen, std::int8_t sign = 1) {
    Word w(std::move(alphabet));
    w.push({gen, sign});
    return w;
  }

  const AlphabetPtr& alphabet() const { return alphabet_; }
  std::size_t length() const { return letters_.size(); }
  bool empty() const { return letters_.empty(); }
  const std::vector<Letter>& letters() const { return letters_; }
  const Letter& at(std::size_t i) const { return letters_[i]; }

  bool operator==(const Word& o) const { return letters_ == o.letters_; }
  bool operator!=(const Word& o) const { return !(*this == o); }

  // Canonical grammar: whitespace separated tokens, maximal runs of one
  // generator merged as name^e (e != 0, e != 1).  The empty word is "".
  std::string str() const {
    std::ostringstream out;
    std::size_t i = 0;
    bool first = true;
    while (i < letters_.size()) {
      std::size_t j = i;
      while (j < letters_.size() && letters_[j] == letters_[i]) ++j;
      long long e = static_cast<long long>(j - i) * letters_[i].sign;
      if (!first) out << ' ';
      first = false;
      out << alphabet_->name(letters_[i].gen);
      if (e != 1) out << '^' << e;
      i = j;
    }
    return out.str();
  }

  Word inverse() const {
    Word w(alphabet_);
    w.letters_.reserve(letters_.size());
    for (auto it = letters_.rbegin(); it != letters_.rend(); ++it)
      w.letters_.push_back(it->inverse());
    return w;
  }

  friend Word multiply(const Word& u, const Word& v) {
    require_same_alphabet(u, v);
    Word w = u;
    for (const Letter& l : v.letters_) w.push(l);
    return w;
  }

  // Appends one letter, cancelling against the tail.
  void push(const Letter& l) {
    if (alphabet_ && l.gen >= alphabet_->size())
      throw ParseError("letter generator index out of range");
    if (!letters_.empty() && cancels(letters_.back(), l))
      letters_.pop_back();
    else
      letters_.push_back(l);
  }

  Word prefix(std::size_t n) const {
    Word w(alphabet_);
    w.letters_.assign(letters_.begin(), letters_.begin() + std::min(n, letters_.size()));
    return w;
  }

  static void require_same_alphabet(const Word& u, const Word& v) {
    if (u.alphabet_ == v.alphabet_) return;
    if (u.alphabet_ && v.alphabet_ && *u.alphabet_ == *v.alphabet_) return;
    throw ConfigError("alphabet mismatch between words");
  }

 private:
  AlphabetPtr alphabet_;
  std::vector<Letter> letters_;
};

// Parses the canonical word grammar.  Parsing reduces.
inline Word parse_word(const AlphabetPtr& alphabet, const std::string& text) {
  Word w(alphabet);
  std::size_t pos = 0;
  const std::size_t n = text.size();
  while (pos < n) {
    while (pos < n && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos >= n) break;
    std::size_t start = pos;
    while (pos < n && !std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    std::string token = text.substr(start, pos - start);
    std::string name = token;
    long long exponent = 1;
    if (auto caret = token.find('^'); caret != std::string::npos) {
      name = token.substr(0, caret);
      std::string etext = token.substr(caret + 1);
      try {
        std::size_t used = 0;
        exponent = std::stoll(etext, &used);
        if (used != etext.size()) throw std::invalid_argument(etext);
      } catch (const std::exception&) {
        throw ParseError("bad exponent in token '" + token + "'", start);
      }
      if (exponent == 0) throw ParseError("zero exponent in token '" + token + "'", start);
    }
    if (!alphabet->has(name))
      throw ParseError("unknown generator token '" + name + "'", start);
    auto gen = static_cast<std::uint32_t>(alphabet->index_of(name));
    std::int8_t sign = exponent > 0 ? 1 : -1;
    long long count = exponent > 0 ? exponent : -exponent;
    for (long long i = 0; i < count; ++i) w.push({gen, sign});
  }
  return w;
}

// --- tree geometry of the free group Cayley graph ---

inline std::size_t common_prefix_length(const Word& u, const Word& v) {
  std::size_t n = std::min(u.length(), v.length());
  std::size_t i = 0;
  while (i < n && u.at(i) == v.at(i)) ++i;
  return i;
}

// (u . v)_base in the tree: length of the longest common prefix of
// base^-1 u and base^-1 v, which is d(base, [u,v]).
inline std::size_t gromov_product_tree(const Word& u, const Word& v, const Word& base) {
  Word bi = base.inverse();
  return common_prefix_length(multiply(bi, u), multiply(bi, v));
}

// The unique reduced path u -> (u ^ v) -> v; consecutive vertices differ
// by one letter.
inline std::vector<Word> tree_geodesic(const Word& u, const Word& v) {
  Word::require_same_alphabet(u, v);
  Word diff = multiply(u.inverse(), v);
  std::vector<Word> path;
  path.reserve(diff.length() + 1);
  Word cur = u;
  path.push_back(cur);
  for (const Letter& l : diff.letters()) {
    cur.push(l);
    path.push_back(cur);
  }
  return path;
}

}  // namespace ggt
