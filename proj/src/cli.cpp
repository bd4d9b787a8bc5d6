#include "camal/cli.hpp"

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "camal/character.hpp"
#include "camal/error.hpp"
#include "camal/report.hpp"
#include "camal/words.hpp"

namespace camal {

namespace {

using nlohmann::json;

struct CliOptions {
  std::string group = "heisenberg";
  long long p = 2;
  std::string range;
  double epsilon = 0.1;
  std::string theta = "1/3";
  long long seed = 0;
  uint64_t cap = kDefaultEnumCap;
  int levels = 1;
  uint32_t max_modulus = 16;
  int max_seeds = 8;
  int trials = 50;
  int max_size = 12;
  uint32_t modulus = 3;
  std::string word;
  std::string element;
  std::string out;
  std::string config_path;
};

double elapsed_ms_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
      .count();
}

long long config_int(const json& v, const std::string& key) {
  if (!v.is_number_integer())
    throw Error(Err::Config, "config key '" + key + "' must be an integer");
  return v.get<long long>();
}

// The config file overrides flags; unknown keys are rejected so typos cannot
// silently fall back to defaults.
void apply_config_file(CliOptions& opt) {
  if (opt.config_path.empty()) return;
  std::ifstream f(opt.config_path);
  if (!f) throw Error(Err::Config, "cannot open config file " + opt.config_path);
  json doc;
  try {
    f >> doc;
  } catch (const json::exception& e) {
    throw Error(Err::Config, std::string("config parse error: ") + e.what());
  }
  if (!doc.is_object()) throw Error(Err::Config, "config root must be an object");
  for (const auto& [key, value] : doc.items()) {
    if (key == "group") {
      if (!value.is_string()) throw Error(Err::Config, "config key 'group' must be a string");
      opt.group = value.get<std::string>();
    } else if (key == "p") {
      opt.p = config_int(value, key);
    } else if (key == "modulus_range") {
      if (!value.is_string())
        throw Error(Err::Config, "config key 'modulus_range' must be a string a..b");
      opt.range = value.get<std::string>();
    } else if (key == "epsilon") {
      if (!value.is_number()) throw Error(Err::Config, "config key 'epsilon' must be a number");
      opt.epsilon = value.get<double>();
    } else if (key == "theta") {
      if (!value.is_string()) throw Error(Err::Config, "config key 'theta' must be a string");
      opt.theta = value.get<std::string>();
    } else if (key == "seed") {
      opt.seed = config_int(value, key);
    } else if (key == "cap") {
      opt.cap = static_cast<uint64_t>(config_int(value, key));
    } else if (key == "levels") {
      opt.levels = static_cast<int>(config_int(value, key));
    } else if (key == "max_modulus") {
      opt.max_modulus = static_cast<uint32_t>(config_int(value, key));
    } else if (key == "max_seeds") {
      opt.max_seeds = static_cast<int>(config_int(value, key));
    } else if (key == "trials") {
      opt.trials = static_cast<int>(config_int(value, key));
    } else if (key == "max_size") {
      opt.max_size = static_cast<int>(config_int(value, key));
    } else if (key == "modulus") {
      opt.modulus = static_cast<uint32_t>(config_int(value, key));
    } else if (key == "word") {
      if (!value.is_string()) throw Error(Err::Config, "config key 'word' must be a string");
      opt.word = value.get<std::string>();
    } else if (key == "element") {
      if (!value.is_string()) throw Error(Err::Config, "config key 'element' must be a string");
      opt.element = value.get<std::string>();
    } else if (key == "out") {
      if (!value.is_string()) throw Error(Err::Config, "config key 'out' must be a string");
      opt.out = value.get<std::string>();
    } else {
      throw Error(Err::Config, "unknown config key '" + key + "'");
    }
  }
}

void validate_numeric(const CliOptions& opt) {
  if (opt.epsilon <= 0) throw Error(Err::Config, "epsilon must be positive");
  if (opt.cap == 0) throw Error(Err::Config, "cap must be positive");
  if (opt.levels < 1) throw Error(Err::Config, "levels must be at least 1");
  if (opt.max_modulus < 1) throw Error(Err::Config, "max_modulus must be at least 1");
  if (opt.max_seeds < 1) throw Error(Err::Config, "max_seeds must be at least 1");
  if (opt.trials < 1) throw Error(Err::Config, "trials must be at least 1");
  if (opt.max_size < 1) throw Error(Err::Config, "max_size must be at least 1");
  if (opt.modulus < 1) throw Error(Err::Config, "modulus must be at least 1");
  if (opt.p < 2) throw Error(Err::Config, "p must be a prime");
}

GroupSpec resolve_group(const CliOptions& opt) {
  if (opt.group == "heisenberg") return heisenberg();
  if (opt.group == "abels") return abels(opt.p);
  // Anything else is a path to a group description file.
  return load_group_config(opt.group);
}

std::pair<uint32_t, uint32_t> parse_range(const std::string& text) {
  const auto pos = text.find("..");
  if (pos == std::string::npos)
    throw Error(Err::Config, "modulus range must have the form a..b");
  try {
    size_t used = 0;
    const long long lo = std::stoll(text.substr(0, pos), &used);
    if (used != pos) throw Error(Err::Config, "bad modulus range '" + text + "'");
    const std::string hi_text = text.substr(pos + 2);
    const long long hi = std::stoll(hi_text, &used);
    if (used != hi_text.size()) throw Error(Err::Config, "bad modulus range '" + text + "'");
    if (lo < 2 || hi < lo) throw Error(Err::Config, "modulus range must satisfy 2 <= a <= b");
    return {static_cast<uint32_t>(lo), static_cast<uint32_t>(hi)};
  } catch (const std::invalid_argument&) {
    throw Error(Err::Config, "bad modulus range '" + text + "'");
  } catch (const std::out_of_range&) {
    throw Error(Err::Config, "modulus range out of range");
  }
}

// "a/b" is an exact fraction of a turn, "sqrt2-1" the usual irrational test
// angle, anything else a decimal fraction of a turn.
Angle parse_theta(const std::string& text) {
  if (text == "sqrt2-1") return Angle::real(std::sqrt(2.0) - 1.0);
  const auto slash = text.find('/');
  try {
    if (slash != std::string::npos) {
      size_t used = 0;
      const long long num = std::stoll(text.substr(0, slash), &used);
      if (used != slash) throw Error(Err::Config, "bad theta '" + text + "'");
      const std::string den_text = text.substr(slash + 1);
      const long long den = std::stoll(den_text, &used);
      if (used != den_text.size() || den == 0)
        throw Error(Err::Config, "bad theta '" + text + "'");
      return Angle::rational(Rational(num, den));
    }
    size_t used = 0;
    const double turns = std::stod(text, &used);
    if (used != text.size()) throw Error(Err::Config, "bad theta '" + text + "'");
    return Angle::real(turns);
  } catch (const std::invalid_argument&) {
    throw Error(Err::Config, "bad theta '" + text + "'");
  } catch (const std::out_of_range&) {
    throw Error(Err::Config, "theta out of range");
  }
}

Character line_character(const GroupSpec& g, const Angle& a) {
  const AbelianStructure& st = g.c_structure();
  if (st.free_rank != 1 || !st.torsion.empty())
    throw Error(Err::Config, "group's central line is not infinite cyclic; pass a config file");
  return Character(st, {a}, {});
}

json resolved_config(const std::string& command, const CliOptions& opt) {
  json j;
  j["command"] = command;
  j["group"] = opt.group;
  j["p"] = opt.p;
  j["modulus_range"] = opt.range;
  j["epsilon"] = opt.epsilon;
  j["theta"] = opt.theta;
  j["seed"] = opt.seed;
  j["cap"] = opt.cap;
  j["levels"] = opt.levels;
  j["max_modulus"] = opt.max_modulus;
  j["max_seeds"] = opt.max_seeds;
  j["trials"] = opt.trials;
  j["max_size"] = opt.max_size;
  j["modulus"] = opt.modulus;
  j["word"] = opt.word;
  j["element"] = opt.element;
  return j;
}

// Summary document to --out, stream lines to --out.jsonl, prose to stdout.
void emit(const CliOptions& opt, const json& summary, const std::vector<json>& lines,
          const std::string& human) {
  std::cout << human;
  if (opt.out.empty()) return;
  std::ofstream doc(opt.out);
  if (!doc) throw Error(Err::Config, "cannot write " + opt.out);
  doc << summary.dump(2) << "\n";
  std::ofstream stream(opt.out + ".jsonl");
  if (!stream) throw Error(Err::Config, "cannot write " + opt.out + ".jsonl");
  for (const auto& l : lines) stream << l.dump() << "\n";
}

SearchBudget budget_from(const CliOptions& opt) {
  SearchBudget b;
  b.max_modulus = opt.max_modulus;
  b.max_levels = opt.levels;
  b.max_seeds = opt.max_seeds;
  b.cap = opt.cap;
  return b;
}

// Deterministic generator words for the seeded sweeps: short words over the
// full generator list with exponents in [-2, 2].
ExactMatrix random_word(const GroupSpec& g, std::mt19937_64& rng, int max_len) {
  const auto& gens = g.generators();
  ExactMatrix acc = ExactMatrix::identity(g.dim(), g.ring());
  const int len = 1 + static_cast<int>(rng() % static_cast<uint64_t>(max_len));
  for (int i = 0; i < len; ++i) {
    const auto& [name, mat] = gens[rng() % gens.size()];
    const long long e = static_cast<long long>(rng() % 5) - 2;
    acc = acc.mul(mat.pow(e));
  }
  return acc;
}

int cmd_quotient(const CliOptions& opt) {
  const GroupSpec g = resolve_group(opt);
  const auto [lo, hi] = parse_range(opt.range.empty() ? "2..16" : opt.range);
  std::vector<json> lines;
  json results = json::array();
  int successes = 0;
  std::ostringstream human;
  for (uint32_t m = lo; m <= hi; ++m) {
    json e;
    e["modulus"] = m;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      auto q = FiniteQuotient::enumerate(g, m, opt.cap);
      e["order"] = q->order();
      e["c_image_order"] = q->c_image().size();
      e["cosets"] = q->transversal().size();
      e["verdict"] = "ok";
      ++successes;
      human << "m=" << m << " order=" << q->order() << " cosets=" << q->transversal().size()
            << "\n";
    } catch (const Error& err) {
      e["verdict"] = "error";
      e["error"] = err.what();
      human << "m=" << m << " error: " << err.what() << "\n";
    }
    e["elapsed_ms"] = elapsed_ms_since(t0);
    lines.push_back(e);
    results.push_back(e);
  }
  json summary;
  summary["config"] = resolved_config("quotient", opt);
  summary["result"] = {{"results", results}, {"successes", successes}};
  emit(opt, summary, lines, human.str());
  return successes > 0 ? 0 : 1;
}

int cmd_filtration(const CliOptions& opt) {
  const GroupSpec g = resolve_group(opt);
  const auto [lo, hi] = parse_range(opt.range.empty() ? "2..16" : opt.range);
  // Default witness data: every non-central generator must stay outside the
  // C-image, and short distinct C-powers must stay distinct.
  std::vector<ExactMatrix> outside;
  for (const auto& [name, mat] : g.generators())
    if (!g.in_c(mat)) outside.push_back(mat);
  std::vector<std::pair<ExactMatrix, ExactMatrix>> pairs;
  for (const auto& [name, c] : g.c_generators()) {
    pairs.emplace_back(ExactMatrix::identity(g.dim(), g.ring()), c);
    pairs.emplace_back(c, c.mul(c));
  }
  const WitnessResult w = filtration_witness(g, outside, pairs, lo, hi, opt.cap);
  std::vector<json> lines;
  for (const auto& a : w.attempts)
    lines.push_back({{"modulus", a.modulus}, {"ok", a.ok}, {"detail", a.detail}});
  json summary;
  summary["config"] = resolved_config("filtration", opt);
  summary["result"] = to_json(w);
  std::ostringstream human;
  if (w.modulus)
    human << "witness modulus " << *w.modulus << " (order " << w.quotient->order() << ")\n";
  else
    human << "no witness modulus in [" << lo << ", " << hi << "]: inconclusive\n";
  emit(opt, summary, lines, human.str());
  return w.modulus ? 0 : 2;
}

int cmd_probe(const CliOptions& opt) {
  const GroupSpec g = resolve_group(opt);
  const auto [lo, hi] = parse_range(opt.range.empty() ? "2..16" : opt.range);
  if (opt.element.empty()) throw Error(Err::Config, "probe requires --element");
  const ExactMatrix x = evaluate_word(g, GroupWord::parse(opt.element));
  std::vector<uint32_t> moduli;
  for (uint32_t m = lo; m <= hi; ++m) moduli.push_back(m);
  const ProbeReport rep = profinite_probe(g, x, moduli, opt.cap);
  std::vector<json> lines;
  for (const auto& e : rep.entries) {
    json je;
    je["modulus"] = e.modulus;
    je["verdict"] = e.verdict;
    if (!e.error.empty()) je["error"] = e.error;
    je["elapsed_ms"] = e.elapsed_ms;
    lines.push_back(je);
  }
  json summary;
  summary["config"] = resolved_config("probe", opt);
  summary["result"] = to_json(rep);
  std::ostringstream human;
  human << "probe: inside=" << rep.inside << " outside=" << rep.outside
        << " errors=" << rep.errors << "\n";
  emit(opt, summary, lines, human.str());
  return rep.errors == 0 ? 0 : 1;
}

int cmd_char_approx(const CliOptions& opt) {
  const GroupSpec g = resolve_group(opt);
  const Character lambda = line_character(g, parse_theta(opt.theta));
  std::vector<ExactMatrix> outside;
  for (const auto& [name, mat] : g.generators())
    if (!g.in_c(mat)) outside.push_back(mat);
  std::vector<ExactMatrix> central;
  for (const auto& [name, c] : g.c_generators()) central.push_back(c);
  const ApproxSequence seq =
      character_approx_sequence(g, lambda, opt.epsilon, outside, central, budget_from(opt));
  std::vector<json> lines;
  for (const auto& l : seq.levels) {
    json jl;
    jl["level"] = l.level;
    jl["eps_level"] = l.eps_level;
    jl["modulus"] = l.modulus;
    jl["dim"] = l.rep.dim();
    jl["max_central_error"] = l.max_central_error;
    lines.push_back(jl);
  }
  json summary;
  summary["config"] = resolved_config("char-approx", opt);
  summary["result"] = to_json(seq);
  std::ostringstream human;
  for (const auto& l : seq.levels)
    human << "level " << l.level << ": eps=" << l.eps_level << " m=" << l.modulus
          << " dim=" << l.rep.dim() << " central_error=" << l.max_central_error << "\n";
  if (seq.exhausted) human << "exhausted: " << seq.detail << "\n";
  emit(opt, summary, lines, human.str());
  return seq.exhausted ? 2 : 0;
}

int cmd_psd(const CliOptions& opt) {
  const GroupSpec g = resolve_group(opt);
  const Character lambda = line_character(g, parse_theta(opt.theta));
  std::mt19937_64 rng(static_cast<uint64_t>(opt.seed));
  std::vector<json> lines;
  bool all_pass = true;
  double worst = 0.0;
  for (int trial = 0; trial < opt.trials; ++trial) {
    const int size = 1 + static_cast<int>(rng() % static_cast<uint64_t>(opt.max_size));
    std::vector<ExactMatrix> f;
    f.reserve(static_cast<size_t>(size));
    for (int i = 0; i < size; ++i) f.push_back(random_word(g, rng, 4));
    const PsdReport rep = psd_check(g, lambda, f, 1e-9);
    all_pass = all_pass && rep.pass;
    worst = std::min(worst, rep.min_eigenvalue);
    json jl = to_json(rep);
    jl["trial"] = trial;
    lines.push_back(jl);
  }
  json summary;
  summary["config"] = resolved_config("psd", opt);
  summary["result"] = {{"trials", opt.trials}, {"all_pass", all_pass},
                       {"worst_min_eigenvalue", worst}};
  std::ostringstream human;
  human << "psd: " << opt.trials << " trials, worst min eigenvalue " << worst << ", "
        << (all_pass ? "all pass" : "FAILURES PRESENT") << "\n";
  emit(opt, summary, lines, human.str());
  return all_pass ? 0 : 1;
}

int cmd_gns(const CliOptions& opt) {
  const GroupSpec g = resolve_group(opt);
  const Angle a = parse_theta(opt.theta);
  if (!a.exact) throw Error(Err::Config, "gns requires an exact rational theta");
  auto q = FiniteQuotient::enumerate(g, opt.modulus, opt.cap);
  std::vector<Rational> exps(g.c_generators().size(), a.q);
  const QuotientCharacter chi = QuotientCharacter::from_generator_exponents(q, exps);
  const FinDimRep rho = induce(q, chi);
  const GnsResult res = gns_from_state(rho, StateVector::normalized_trace_state(), q);

  // The represented C-generators must be the same scalars as in the source.
  double scalar_defect = 0.0;
  for (const auto& [name, c] : g.c_generators()) {
    const std::complex<double> chi_c = chi.value_at(q->index_of(c));
    const Eigen::MatrixXcd img = res.rep.at_word(GroupWord::parse(name)).dense();
    const Eigen::MatrixXcd target =
        chi_c * Eigen::MatrixXcd::Identity(res.dim, res.dim);
    scalar_defect = std::max(scalar_defect, (img - target).cwiseAbs().maxCoeff());
  }
  const bool ok = res.reproduction_error <= 1e-9 && scalar_defect <= 1e-12;

  json summary;
  summary["config"] = resolved_config("gns", opt);
  json result = to_json(res);
  result["base_dim"] = rho.dim();
  result["central_scalar_defect"] = scalar_defect;
  result["pass"] = ok;
  summary["result"] = result;
  std::ostringstream human;
  human << "gns: dim=" << res.dim << " reproduction_error=" << res.reproduction_error
        << " central_scalar_defect=" << scalar_defect << (ok ? " pass" : " FAIL") << "\n";
  emit(opt, summary, {summary["result"]}, human.str());
  return ok ? 0 : 1;
}

int cmd_kernel(const CliOptions& opt) {
  const GroupSpec g = resolve_group(opt);
  const Angle a = parse_theta(opt.theta);
  const Character lambda = line_character(g, a);
  // One representation from the level-0 certificate; every trial checks the
  // kernel statement against it.
  const ApproxSequence seq =
      character_approx_sequence(g, lambda, opt.epsilon, {}, {}, budget_from(opt));
  if (seq.levels.empty()) throw Error(Err::SearchExhausted, "no level-0 representation found");
  const FinDimRep& rho = seq.levels.front().rep;

  std::mt19937_64 rng(static_cast<uint64_t>(opt.seed));
  const auto& [cname, cgen] = g.c_generators().front();
  std::vector<json> lines;
  int pass = 0, fail = 0, skipped = 0;
  for (int trial = 0; trial < opt.trials; ++trial) {
    const ExactMatrix gm = random_word(g, rng, 4);
    const long long j = 1 + static_cast<long long>(rng() % 3);
    const ExactMatrix c = cgen.pow(j);
    const std::complex<double> lam_c = lambda.value(g.c_coordinates(c));
    std::vector<std::pair<ExactMatrix, std::complex<double>>> f;
    f.emplace_back(gm, std::complex<double>(1.0, 0.0));
    f.emplace_back(gm.mul(c), -std::conj(lam_c));
    const KernelReport rep = kernel_consistency_check(g, lambda, f, rho);
    if (rep.verdict == KernelVerdict::Pass)
      ++pass;
    else if (rep.verdict == KernelVerdict::Fail)
      ++fail;
    else
      ++skipped;
    json jl = to_json(rep);
    jl["trial"] = trial;
    lines.push_back(jl);
  }
  json summary;
  summary["config"] = resolved_config("kernel", opt);
  summary["result"] = {{"modulus", seq.levels.front().modulus},
                       {"pass", pass},
                       {"fail", fail},
                       {"skipped", skipped}};
  std::ostringstream human;
  human << "kernel: pass=" << pass << " fail=" << fail << " skipped=" << skipped << "\n";
  emit(opt, summary, lines, human.str());
  if (fail > 0) return 1;
  return skipped > 0 ? 2 : 0;
}

int exit_for(const SeparationReport& rep) {
  if (rep.identity_in_group || rep.separated) return 0;
  return 2;
}

json separation_summary(const char* command, const CliOptions& opt,
                        const SeparationReport& rep) {
  json summary;
  summary["config"] = resolved_config(command, opt);
  summary["result"] = to_json(rep);
  return summary;
}

std::string separation_human(const SeparationReport& rep) {
  std::ostringstream human;
  human << "reduced: " << rep.reduced_word << "\n";
  if (!rep.classification.empty()) human << "form: " << rep.classification << "\n";
  if (rep.identity_in_group)
    human << "identity in the group; nothing to separate\n";
  else if (rep.separated)
    human << "separated at m=" << rep.winner->modulus << " (norm " << rep.winner->norm
          << ")\n";
  else
    human << "not separated within budget: inconclusive"
          << (rep.identity_at_every_level ? " (identity at every level, flagged for review)"
                                          : "")
          << "\n";
  return human.str();
}

int cmd_separate_amalgam(const CliOptions& opt) {
  const GroupSpec g = resolve_group(opt);
  if (opt.word.empty()) throw Error(Err::Config, "separate-amalgam requires --word");
  const AmalgamWord w = parse_amalgam_word(g, g, opt.word);
  const Character lambda = line_character(g, parse_theta(opt.theta));
  const SeparationReport rep = separate_amalgam(g, g, w, lambda, budget_from(opt));
  std::vector<json> lines;
  for (const auto& a : rep.attempts) lines.push_back(to_json(a));
  emit(opt, separation_summary("separate-amalgam", opt, rep), lines, separation_human(rep));
  return exit_for(rep);
}

int cmd_separate_hnn(const CliOptions& opt) {
  const GroupSpec g = resolve_group(opt);
  if (opt.word.empty()) throw Error(Err::Config, "separate-hnn requires --word");
  const HNNWord w = parse_hnn_word(g, opt.word);
  const Character lambda = line_character(g, parse_theta(opt.theta));
  const SeparationReport rep = separate_hnn(g, w, lambda, opt.seed, budget_from(opt));
  std::vector<json> lines;
  for (const auto& a : rep.attempts) lines.push_back(to_json(a));
  emit(opt, separation_summary("separate-hnn", opt, rep), lines, separation_human(rep));
  return exit_for(rep);
}

int cmd_abels(const CliOptions& opt) {
  const auto [lo, hi] = parse_range(opt.range.empty() ? "3..99" : opt.range);
  std::vector<uint32_t> m_list;
  for (uint32_t m = lo; m <= hi; ++m)
    if (cpp_int(m) % cpp_int(opt.p) != 0) m_list.push_back(m);
  if (m_list.empty()) throw Error(Err::Config, "no modulus in range is coprime to p");
  const AbelsReport rep = abels_experiment(opt.p, m_list, budget_from(opt));

  std::vector<json> lines;
  for (const auto& e : rep.probe.entries) {
    json je;
    je["kind"] = "probe";
    je["modulus"] = e.modulus;
    je["verdict"] = e.verdict;
    if (!e.error.empty()) je["error"] = e.error;
    je["elapsed_ms"] = e.elapsed_ms;
    lines.push_back(je);
  }
  for (const auto& a : rep.separation.attempts) {
    json ja = to_json(a);
    ja["kind"] = "separation";
    lines.push_back(ja);
  }
  json summary;
  summary["config"] = resolved_config("abels", opt);
  summary["result"] = to_json(rep);
  std::ostringstream human;
  human << "probe: inside=" << rep.probe.inside << "/" << rep.probe.entries.size()
        << " errors=" << rep.probe.errors << "\n";
  human << "witness: " << rep.witness_hnn << " -> length " << rep.witness_length
        << (rep.witness_reduced_nontrivial ? " (reduced, nontrivial)" : " (NOT certified)")
        << "\n";
  human << separation_human(rep.separation);
  if (!rep.separation.separated)
    human << "one-sided evidence: probe inside everywhere, no separation found\n";
  emit(opt, summary, lines, human.str());

  if (rep.probe.errors > 0 || !rep.witness_reduced_nontrivial) return 1;
  return rep.separation.separated ? 0 : 2;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"finite-dimensional representation experiments on matrix groups"};
  app.require_subcommand(1);

  CliOptions opt;
  const auto add_common = [&opt](CLI::App* cmd) {
    cmd->add_option("--group", opt.group, "built-in group name or group config file");
    cmd->add_option("--p", opt.p, "prime parameter for the abels group");
    cmd->add_option("--modulus-range", opt.range, "modulus range a..b");
    cmd->add_option("--epsilon", opt.epsilon, "accuracy target");
    cmd->add_option("--theta", opt.theta, "character angle: a/b, decimal, or sqrt2-1");
    cmd->add_option("--cap", opt.cap, "enumeration cap");
    cmd->add_option("--levels", opt.levels, "number of accuracy levels");
    cmd->add_option("--max-modulus", opt.max_modulus, "largest modulus to scan");
    cmd->add_option("--max-seeds", opt.max_seeds, "unitary draws per modulus");
    cmd->add_option("--trials", opt.trials, "number of seeded trials");
    cmd->add_option("--max-size", opt.max_size, "largest seeded subset size");
    cmd->add_option("--modulus", opt.modulus, "single modulus");
    cmd->add_option("--word", opt.word, "word in the CLI letter syntax");
    cmd->add_option("--element", opt.element, "group word, e.g. 'x^2 y'");
    cmd->add_option("--out", opt.out, "report path (summary; stream goes to .jsonl)");
    cmd->add_option("--config", opt.config_path, "JSON config file overriding flags");
  };
  const auto add_seed = [&opt](CLI::App* cmd, bool required) {
    auto* o = cmd->add_option("--seed", opt.seed, "master seed for randomized paths");
    if (required) o->required();
  };

  struct Sub {
    const char* name;
    const char* help;
    int (*fn)(const CliOptions&);
    bool seed_required;
  };
  const Sub subs[] = {
      {"quotient", "enumerate congruence quotients and report statistics", cmd_quotient, false},
      {"filtration", "search a modulus witnessing separation data", cmd_filtration, false},
      {"probe", "test an element against the central line across moduli", cmd_probe, false},
      {"char-approx", "certified character approximation sequence", cmd_char_approx, false},
      {"psd", "positive-definiteness sweep of zero-extended characters", cmd_psd, true},
      {"gns", "finite GNS construction from the normalized trace", cmd_gns, false},
      {"kernel", "kernel consistency sweep against a certified rep", cmd_kernel, true},
      {"separate-amalgam", "separation search in a doubled amalgam", cmd_separate_amalgam,
       false},
      {"separate-hnn", "separation search in the central HNN-extension", cmd_separate_hnn,
       true},
      {"abels", "probe + embedded witness separation protocol", cmd_abels, false},
  };
  for (const auto& s : subs) {
    CLI::App* cmd = app.add_subcommand(s.name, s.help);
    add_common(cmd);
    add_seed(cmd, s.seed_required);
  }

  std::vector<const char*> argv;
  argv.push_back("camal");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 64;
  }

  try {
    apply_config_file(opt);
    validate_numeric(opt);
    for (const auto& s : subs)
      if (app.got_subcommand(s.name)) return s.fn(opt);
    return 64;
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return e.code() == Err::Config ? 64 : 1;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
}

}  // namespace camal
