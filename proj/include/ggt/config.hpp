#pragma once

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ggt/automorphism.hpp"
#include "ggt/cayley.hpp"
#include "ggt/free_by_cyclic.hpp"

namespace ggt {

// A group description loaded from JSON plus an optional subgroup basis.
//
//   {"type": "free",        "generators": ["a", "b"], "basis": [...]}
//   {"type": "hydra_g",     "k": 2,                   "basis": [...]}
//   {"type": "hydra_gamma", "k": 2, "l": 1, "u": "b1", "v": "b1^-1",
//    "theta_b": ["b1"], "theta_b_inverse": ["b1"],     "basis": [...]}
//
// Free groups carry only the fiber letters as generators (the stable
// letter is trivial); the twisted types add t.  The automorphism and its
// inverse are verified on construction, before any enumeration starts.
struct LoadedConfig {
  std::string type;
  FcGroup group;
  GroupContext context;
  std::optional<SubgroupBasis> basis;
};

inline LoadedConfig parse_config(const nlohmann::json& j, const Budget& budget = {}) {
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  if (!j.contains("type") || !j.at("type").is_string())
    throw ConfigError("config: missing string field \"type\"");

  LoadedConfig out;
  out.type = j.at("type").get<std::string>();

  auto string_list = [&](const char* field) {
    if (!j.contains(field) || !j.at(field).is_array())
      throw ConfigError(std::string("config: missing array field \"") + field + "\"");
    std::vector<std::string> v;
    for (const auto& e : j.at(field)) {
      if (!e.is_string())
        throw ConfigError(std::string("config: \"") + field + "\" entries must be strings");
      v.push_back(e.get<std::string>());
    }
    return v;
  };
  auto positive_int = [&](const char* field) {
    if (!j.contains(field) || !j.at(field).is_number_unsigned() || j.at(field) == 0)
      throw ConfigError(std::string("config: \"") + field + "\" must be a positive integer");
    return j.at(field).get<std::size_t>();
  };

  if (out.type == "free") {
    auto names = string_list("generators");
    if (names.empty()) throw ConfigError("config: free group needs at least one generator");
    auto alphabet = std::make_shared<const Alphabet>(names);
    out.group = FcGroup::free_group(alphabet);
    std::vector<Element> gens;
    for (std::uint32_t i = 0; i < names.size(); ++i)
      gens.push_back({Word::single(alphabet, i), 0});
    out.context = GroupContext(out.group, gens, budget);
  } else if (out.type == "hydra_g") {
    Automorphism phi = hydra_phi(positive_int("k"));
    out.group = FcGroup(phi.alphabet(), phi);
    std::vector<Element> gens;
    for (std::uint32_t i = 0; i < out.group.fiber_alphabet->size(); ++i)
      gens.push_back({Word::single(out.group.fiber_alphabet, i), 0});
    gens.push_back({Word(out.group.fiber_alphabet), 1});
    out.context = GroupContext(out.group, gens, budget);
  } else if (out.type == "hydra_gamma") {
    HydraConfig cfg;
    cfg.k = positive_int("k");
    cfg.l = positive_int("l");
    if (!j.contains("u") || !j.at("u").is_string() || !j.contains("v") || !j.at("v").is_string())
      throw ConfigError("config: hydra_gamma needs string fields \"u\" and \"v\"");
    cfg.u = j.at("u").get<std::string>();
    cfg.v = j.at("v").get<std::string>();
    cfg.theta_b = string_list("theta_b");
    cfg.theta_b_inverse = string_list("theta_b_inverse");
    Automorphism theta = hydra_theta(cfg, budget);
    out.group = FcGroup(theta.alphabet(), theta);
    std::vector<Element> gens;
    for (std::uint32_t i = 0; i < out.group.fiber_alphabet->size(); ++i)
      gens.push_back({Word::single(out.group.fiber_alphabet, i), 0});
    gens.push_back({Word(out.group.fiber_alphabet), 1});
    out.context = GroupContext(out.group, gens, budget);
  } else {
    throw ConfigError("config: unknown type \"" + out.type +
                      "\" (expected free, hydra_g or hydra_gamma)");
  }

  if (j.contains("basis")) {
    auto words = string_list("basis");
    out.basis = SubgroupBasis(out.group, words, budget);
  }
  return out;
}

inline LoadedConfig load_config(const std::string& path, const Budget& budget = {}) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  return parse_config(j, budget);
}

}  // namespace ggt
