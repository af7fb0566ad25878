// Command-line front door: loads a JSON group config, runs one experiment,
// and emits deterministic CSV (or a JSON mirror with --json).  Exit codes:
// 0 ok, 2 parse/config, 3 budget, 4 coverage; errors print one line
// `error:<code>:<message>` on stderr.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ggt/config.hpp"
#include "ggt/ct_criterion.hpp"
#include "ggt/distortion.hpp"
#include "ggt/modulus.hpp"

namespace {

using namespace ggt;

// Uniform output: one primary table plus key/value summary lines, with an
// optional secondary table.  CSV mode prints the tables with `#` summary
// comments; JSON mode mirrors the same cells under schema 1.
struct Emitter {
  std::string command;
  bool json = false;
  std::string output_path;  // empty: stdout

  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::pair<std::string, std::string>> summary;

  std::string extra_name;  // secondary table, e.g. the modulus profile
  std::vector<std::string> extra_header;
  std::vector<std::vector<std::string>> extra_rows;

  void note(const std::string& key, const std::string& value) {
    summary.emplace_back(key, value);
  }

  static std::string join(const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) line += ",";
      line += cells[i];
    }
    return line;
  }

  int write() const {
    std::ostringstream out;
    if (json) {
      nlohmann::json j;
      j["schema"] = 1;
      j["command"] = command;
      j["header"] = header;
      j["rows"] = rows;
      nlohmann::json s = nlohmann::json::object();
      for (const auto& [k, v] : summary) s[k] = v;
      j["summary"] = s;
      if (!extra_name.empty()) {
        j[extra_name] = {{"header", extra_header}, {"rows", extra_rows}};
      }
      out << j.dump(2) << "\n";
    } else {
      out << join(header) << "\n";
      for (const auto& r : rows) out << join(r) << "\n";
      for (const auto& [k, v] : summary) out << "# " << k << " = " << v << "\n";
      if (!extra_name.empty()) {
        out << "# " << extra_name << "\n" << join(extra_header) << "\n";
        for (const auto& r : extra_rows) out << join(r) << "\n";
      }
    }
    if (output_path.empty()) {
      std::cout << out.str();
    } else {
      std::ofstream f(output_path, std::ios::binary);
      if (!f) throw ConfigError("cannot open output file " + output_path);
      f << out.str();
    }
    return 0;
  }
};

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  cells.push_back(cur);
  return cells;
}

void adopt_csv(Emitter& em, const std::vector<std::string>& lines) {
  em.header = split_csv_line(lines.at(0));
  for (std::size_t i = 1; i < lines.size(); ++i) em.rows.push_back(split_csv_line(lines[i]));
}

std::string join_args(const std::vector<std::string>& parts) {
  std::string s;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) s += " ";
    s += parts[i];
  }
  return s;
}

const SubgroupBasis& require_basis(const LoadedConfig& cfg) {
  if (!cfg.basis) throw ConfigError("this command needs a \"basis\" entry in the config");
  return *cfg.basis;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"geometric group theory workbench"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may appear after the subcommand

  std::string config_path;
  std::string output_path;
  bool json = false;
  unsigned threads = 1;
  std::uint64_t seed = 0;
  Budget budget;
  app.add_option("-c,--config", config_path, "group config (JSON)");
  app.add_option("-o,--output", output_path, "write output here instead of stdout");
  app.add_flag("--json", json, "emit the JSON mirror of the CSV (schema 1)");
  app.add_option("--threads", threads, "worker parallelism cap")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "seed for sampled scans (output is deterministic)");
  app.add_option("--max-letters", budget.max_letters, "letter budget for rewriting");
  app.add_option("--max-elements", budget.max_elements, "element budget for enumeration");

  // normal-form
  auto* cmd_nf = app.add_subcommand("normal-form", "canonical form of a mixed word");
  std::vector<std::string> nf_word;
  cmd_nf->add_option("word", nf_word, "mixed word over the fiber letters and t")->required();

  // ball
  auto* cmd_ball = app.add_subcommand("ball", "enumerate a metric ball");
  std::uint32_t ball_radius = 3;
  std::string ball_center;
  cmd_ball->add_option("--radius", ball_radius, "ball radius")->required();
  cmd_ball->add_option("--center", ball_center, "center element (mixed word), default identity");

  // delta
  auto* cmd_delta = app.add_subcommand("delta", "four-point hyperbolicity defect on a ball");
  std::uint32_t delta_radius = 3;
  bool delta_sampled = false;
  std::size_t delta_samples = 1'000'000;
  bool delta_audit = false;
  std::int64_t audit_slack2 = 0;
  cmd_delta->add_option("--radius", delta_radius, "ball radius")->required();
  cmd_delta->add_flag("--sampled", delta_sampled, "sample quadruples instead of the full scan");
  cmd_delta->add_option("--samples", delta_samples, "sample count for --sampled");
  cmd_delta->add_flag("--audit", delta_audit,
                      "also audit |d(e,[a,b]) - (a.b)_e| <= 6*delta against every in-ball pair");
  cmd_delta->add_option("--slack2", audit_slack2, "doubled audit slack");

  // distortion
  auto* cmd_dist = app.add_subcommand("distortion", "subgroup distortion table");
  std::uint32_t dist_n_max = 4;
  std::uint32_t dist_r_lambda = 6;
  cmd_dist->add_option("--n-max", dist_n_max, "largest ambient radius")->required();
  cmd_dist->add_option("--r-lambda", dist_r_lambda, "basis-word enumeration radius");

  // ackermann
  auto* cmd_ack = app.add_subcommand("ackermann", "reference growth function values");
  unsigned ack_level = 2;
  std::uint64_t ack_n = 0;
  AckermannBudget ack_budget;
  cmd_ack->add_option("level", ack_level, "family level k")->required();
  cmd_ack->add_option("n", ack_n, "argument")->required();
  cmd_ack->add_option("--max-bits", ack_budget.max_bits, "result size cap");
  cmd_ack->add_option("--max-iterations", ack_budget.max_iterations, "iteration cap");

  // mitra
  auto* cmd_mitra = app.add_subcommand("mitra", "boundary-map criterion profiles");
  MitraOptions mitra_opt;
  cmd_mitra->add_option("--n-max", mitra_opt.n_max, "largest N row");
  cmd_mitra->add_option("--lambda-radius", mitra_opt.lambda_radius, "basis enumeration radius");
  cmd_mitra->add_option("--gamma-radius", mitra_opt.gamma_radius, "ambient ball radius");
  cmd_mitra->add_option("--pair-budget", mitra_opt.pair_budget, "geodesic-scanned pair cap");

  // shadow
  auto* cmd_shadow = app.add_subcommand("shadow", "fiber-tree trace of a suffix");
  std::string shadow_alpha, shadow_beta;
  cmd_shadow->add_option("--alpha", shadow_alpha, "prefix (basis word)");
  cmd_shadow->add_option("--beta", shadow_beta, "suffix (basis word)")->required();

  // corollary-check
  auto* cmd_cor = app.add_subcommand("corollary-check", "geodesic avoidance of sampled pairs");
  std::uint32_t cor_floor = 0, cor_target = 0, cor_gamma_radius = 8;
  std::vector<std::string> cor_samples;
  cmd_cor->add_option("--floor", cor_floor, "required minimum |alpha|");
  cmd_cor->add_option("--target", cor_target, "distance every pair must reach")->required();
  cmd_cor->add_option("--gamma-radius", cor_gamma_radius, "ambient ball radius");
  cmd_cor->add_option("--sample", cor_samples, "sample pair \"alpha,beta\" (repeatable)")
      ->required();

  // wildness
  auto* cmd_wild = app.add_subcommand("wildness", "boundary wildness experiment");
  std::uint32_t wild_n_max = 4, wild_r_lambda = 0, wild_depth = 20, wild_gamma_radius = 0;
  double wild_delta_hat = 0.0;
  VisualParams wild_params;
  std::vector<double> profile_args;  // k C0 C1 C2
  std::vector<double> profile_etas;
  cmd_wild->add_option("--n-max", wild_n_max, "largest distortion row");
  cmd_wild->add_option("--r-lambda", wild_r_lambda,
                       "basis enumeration radius for distortion (0: use n-max)");
  cmd_wild->add_option("--depth", wild_depth, "proxy depth");
  cmd_wild->add_option("--delta-hat", wild_delta_hat, "empirical ambient hyperbolicity defect");
  cmd_wild->add_option("--gamma-radius", wild_gamma_radius,
                       "ambient ball radius for the upper-bound column (0: skip)");
  cmd_wild->add_option("--visual-r", wild_params.r, "subgroup-side visual base");
  cmd_wild->add_option("--visual-s", wild_params.s, "ambient-side visual base");
  cmd_wild->add_option("--k1", wild_params.k1, "lower comparability constant");
  cmd_wild->add_option("--k2", wild_params.k2, "upper comparability constant");
  cmd_wild->add_option("--profile", profile_args, "modulus profile: k C0 C1 C2")
      ->expected(4);
  cmd_wild->add_option("--eta", profile_etas, "profile grid point (repeatable)");

  try {
    app.parse(argc, argv);

    Emitter em;
    em.json = json;
    em.output_path = output_path;
    if (threads < 1) throw ConfigError("--threads must be at least 1");

    auto load = [&]() {
      if (config_path.empty()) throw ConfigError("this command needs --config");
      return load_config(config_path, budget);
    };

    if (*cmd_ack) {
      em.command = "ackermann";
      BigInt value = ackermann(ack_level, ack_n, ack_budget);
      em.header = {"level", "n", "value"};
      em.rows.push_back({std::to_string(ack_level), std::to_string(ack_n), value.str()});
      return em.write();
    }

    LoadedConfig cfg = load();

    if (*cmd_nf) {
      em.command = "normal-form";
      Element e = normal_form(cfg.group, join_args(nf_word), budget);
      em.header = {"element"};
      em.rows.push_back({e.str()});
    } else if (*cmd_ball) {
      em.command = "ball";
      Element center = ball_center.empty() ? cfg.context.identity()
                                           : normal_form(cfg.group, ball_center, budget);
      BallIndex ball = enumerate_ball(cfg.context, center, ball_radius);
      em.header = {"dist", "element"};
      for (const std::string& line : ball.dump()) {
        auto sp = line.find(' ');
        em.rows.push_back({line.substr(0, sp), line.substr(sp + 1)});
      }
      em.note("radius", std::to_string(ball.radius));
      em.note("elements", std::to_string(ball.elements.size()));
    } else if (*cmd_delta) {
      em.command = "delta";
      BallIndex ball = enumerate_ball(cfg.context, cfg.context.identity(), delta_radius);
      DistCache cache(cfg.context);
      DeltaEstimate est =
          estimate_delta(cfg.context, cache, ball, !delta_sampled, delta_samples, seed);
      em.header = {"delta_hat", "exhaustive", "quadruples", "w0", "w1", "w2", "w3"};
      em.rows.push_back({est.value().str(), est.exhaustive ? "true" : "false",
                         std::to_string(est.quadruples_scanned),
                         ball.elements[est.witness[0]].str(), ball.elements[est.witness[1]].str(),
                         ball.elements[est.witness[2]].str(),
                         ball.elements[est.witness[3]].str()});
      if (delta_audit) {
        std::vector<std::pair<Element, Element>> pairs;
        for (std::size_t i = 0; i < ball.elements.size(); ++i)
          for (std::size_t j = i + 1; j < ball.elements.size(); ++j)
            pairs.emplace_back(ball.elements[i], ball.elements[j]);
        AuditReport audit =
            lemma21_audit(cfg.context, cache, ball, est.value2, pairs, audit_slack2);
        em.note("audit_pairs_checked", std::to_string(audit.pairs_checked));
        em.note("audit_pairs_skipped", std::to_string(audit.pairs_skipped));
        em.note("audit_violations", std::to_string(audit.violations.size()));
      }
    } else if (*cmd_dist) {
      em.command = "distortion";
      DistortionTable table =
          distortion_table(cfg.context, require_basis(cfg), dist_n_max, dist_r_lambda, budget);
      adopt_csv(em, table.csv());
      em.note("saturated", table.saturated ? "true" : "false");
      em.note("r_lambda", std::to_string(table.r_lambda));
    } else if (*cmd_mitra) {
      em.command = "mitra";
      DistCache cache(cfg.context);
      MitraProfile profile =
          mitra_profiles(cfg.context, cache, require_basis(cfg), mitra_opt, budget);
      adopt_csv(em, profile.csv());
      em.note("pairs_scanned", std::to_string(profile.pairs_scanned));
      em.note("pairs_sampled", std::to_string(profile.pairs_sampled));
    } else if (*cmd_shadow) {
      em.command = "shadow";
      const SubgroupBasis& basis = require_basis(cfg);
      Word alpha = parse_word(basis.basis_alphabet, shadow_alpha);
      Word beta = parse_word(basis.basis_alphabet, shadow_beta);
      Shadow sh = shadow(cfg.group, basis, alpha, beta, budget);
      em.header = {"segment", "vertex"};
      for (std::size_t s = 0; s < sh.segments.size(); ++s)
        for (const Word& v : sh.segments[s])
          em.rows.push_back({std::to_string(s), v.empty() ? "e" : v.str()});
      auto d = sh.min_distance_to_identity();
      em.note("min_distance_to_identity", d ? std::to_string(*d) : "inf");
    } else if (*cmd_cor) {
      em.command = "corollary-check";
      std::vector<std::pair<std::string, std::string>> samples;
      for (const std::string& s : cor_samples) {
        auto comma = s.find(',');
        if (comma == std::string::npos)
          throw ConfigError("--sample wants \"alpha,beta\": " + s);
        samples.emplace_back(s.substr(0, comma), s.substr(comma + 1));
      }
      DistCache cache(cfg.context);
      CorollaryReport report = corollary_check(cfg.context, cache, require_basis(cfg), cor_floor,
                                               cor_target, samples, cor_gamma_radius, budget);
      em.header = {"alpha", "beta", "min_dist", "result"};
      for (const CorollaryCheckRow& r : report.rows)
        em.rows.push_back({r.alpha.empty() ? "e" : r.alpha, r.beta.empty() ? "e" : r.beta,
                           std::to_string(r.min_dist), r.pass ? "pass" : "fail"});
      em.note("target", std::to_string(report.m_target));
      em.note("floor", std::to_string(report.n_floor));
    } else if (*cmd_wild) {
      em.command = "wildness";
      const SubgroupBasis& basis = require_basis(cfg);
      if (wild_r_lambda == 0) wild_r_lambda = wild_n_max;  // undistorted default
      DistortionTable table =
          distortion_table(cfg.context, basis, wild_n_max, wild_r_lambda, budget);
      auto proxies = make_proxies(basis, wild_depth);
      DistCache cache(cfg.context);
      Half delta_hat{static_cast<std::int64_t>(2.0 * wild_delta_hat)};
      WildnessResult result = wildness_experiment(cfg.context, cache, basis, table, proxies,
                                                  wild_params, delta_hat, wild_gamma_radius,
                                                  0, budget);
      adopt_csv(em, result.csv());
      em.note("C", std::to_string(result.C));
      em.note("saturated", table.saturated ? "true" : "false");
      if (!profile_args.empty()) {
        auto k = static_cast<unsigned>(profile_args[0]);
        if (profile_etas.empty())
          throw ConfigError("--profile needs at least one --eta grid point");
        ModulusProfile profile = modulus_profile(k, profile_args[1], profile_args[2],
                                                 profile_args[3], profile_etas, ack_budget);
        auto lines = profile.csv();
        em.extra_name = "profile";
        em.extra_header = split_csv_line(lines.at(0));
        for (std::size_t i = 1; i < lines.size(); ++i)
          em.extra_rows.push_back(split_csv_line(lines[i]));
      }
    } else {
      throw ConfigError("unknown subcommand");
    }
    return em.write();
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    std::cerr << "error:2:" << e.what() << "\n";
    return 2;
  } catch (const ggt::Error& e) {
    std::cerr << "error:" << static_cast<int>(e.code()) << ":" << e.what() << "\n";
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error:2:" << e.what() << "\n";
    return 2;
  }
}
