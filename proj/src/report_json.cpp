#include "camal/report.hpp"

namespace camal {

using nlohmann::json;

json to_json(const WitnessResult& w) {
  json j;
  j["found"] = w.modulus.has_value();
  if (w.modulus) j["modulus"] = *w.modulus;
  if (w.quotient) j["order"] = w.quotient->order();
  json attempts = json::array();
  for (const auto& a : w.attempts)
    attempts.push_back({{"modulus", a.modulus}, {"ok", a.ok}, {"detail", a.detail}});
  j["attempts"] = attempts;
  return j;
}

json to_json(const ProbeReport& p) {
  json j;
  j["inside"] = p.inside;
  j["outside"] = p.outside;
  j["errors"] = p.errors;
  json entries = json::array();
  for (const auto& e : p.entries) {
    json je;
    je["modulus"] = e.modulus;
    je["c_image_order"] = e.c_image_order;
    je["verdict"] = e.verdict;
    if (!e.error.empty()) je["error"] = e.error;
    je["elapsed_ms"] = e.elapsed_ms;
    entries.push_back(je);
  }
  j["entries"] = entries;
  return j;
}

json to_json(const DirectionData& d) {
  return json{{"k", d.k}, {"l", d.l}, {"error", d.error}};
}

json to_json(const ApproxSequence& s) {
  json j;
  j["exhausted"] = s.exhausted;
  if (!s.detail.empty()) j["detail"] = s.detail;
  json levels = json::array();
  for (const auto& l : s.levels) {
    json jl;
    jl["level"] = l.level;
    jl["eps_level"] = l.eps_level;
    jl["modulus"] = l.modulus;
    jl["dim"] = l.rep.dim();
    jl["max_central_error"] = l.max_central_error;
    jl["outside_trace_exactly_zero"] = l.outside_trace_exactly_zero;
    json dirs = json::array();
    for (const auto& d : l.directions) dirs.push_back(to_json(d));
    jl["directions"] = dirs;
    levels.push_back(jl);
  }
  j["levels"] = levels;
  return j;
}

json to_json(const PsdReport& p) {
  return json{{"size", p.size}, {"min_eigenvalue", p.min_eigenvalue}, {"pass", p.pass}};
}

json to_json(const GnsResult& g) {
  return json{{"dim", g.dim}, {"reproduction_error", g.reproduction_error}};
}

json to_json(const KernelReport& k) {
  const char* verdict = k.verdict == KernelVerdict::Pass
                            ? "pass"
                            : (k.verdict == KernelVerdict::Fail ? "fail" : "skipped");
  json j;
  j["verdict"] = verdict;
  j["precondition_value"] = k.precondition_value;
  j["scalar_defect"] = k.scalar_defect;
  j["norm"] = k.norm;
  if (!k.detail.empty()) j["detail"] = k.detail;
  return j;
}

json to_json(const SeparationAttempt& a) {
  json j;
  j["modulus"] = a.modulus;
  j["level"] = a.level;
  j["seed"] = a.seed;
  j["success"] = a.success;
  j["norm"] = a.norm;
  j["detail"] = a.detail;
  return j;
}

json to_json(const SeparationReport& r) {
  json j;
  j["identity_in_group"] = r.identity_in_group;
  j["separated"] = r.separated;
  j["reduced_word"] = r.reduced_word;
  if (!r.classification.empty()) j["classification"] = r.classification;
  j["identity_at_every_level"] = r.identity_at_every_level;
  if (r.winner) j["winner"] = to_json(*r.winner);
  json attempts = json::array();
  for (const auto& a : r.attempts) attempts.push_back(to_json(a));
  j["attempts"] = attempts;
  return j;
}

json to_json(const AbelsReport& r) {
  json j;
  j["p"] = r.p.str();
  j["probe"] = to_json(r.probe);
  j["witness_hnn"] = r.witness_hnn;
  j["witness_amalgam"] = r.witness_amalgam;
  j["witness_length"] = r.witness_length;
  j["witness_reduced_nontrivial"] = r.witness_reduced_nontrivial;
  j["separation"] = to_json(r.separation);
  j["one_sided_evidence"] = r.one_sided_evidence;
  return j;
}

json strip_metadata(json j) {
  if (j.is_object()) {
    j.erase("meta");
    j.erase("elapsed_ms");
    j.erase("timestamp");
    for (auto& [key, value] : j.items()) value = strip_metadata(value);
  } else if (j.is_array()) {
    for (auto& value : j) value = strip_metadata(value);
  }
  return j;
}

}  // namespace camal
