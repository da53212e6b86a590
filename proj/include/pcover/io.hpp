#pragma once

// JSON interchange and CSV tables. Rationals travel as "num/den" strings; JSON
// is the source of truth and every CSV table is derived from a report.

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pcover/bridge.hpp"
#include "pcover/family.hpp"
#include "pcover/fragment.hpp"
#include "pcover/ledger.hpp"
#include "pcover/multiset.hpp"
#include "pcover/selector.hpp"

namespace pcover::io {

using Json = nlohmann::json;

inline constexpr const char* kFormatVersion = "pcover/1";

// ---------------------------------------------------------------------------
// reading

inline Json parse_json_text(const std::string& text, const std::string& source = "<input>") {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InputError("malformed JSON in " + source + " at byte " + std::to_string(e.byte) + ": " + e.what());
  }
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_json_text(buffer.str(), path);
}

inline const Json& field(const Json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) throw InputError("expected an object at " + where);
  auto it = obj.find(key);
  if (it == obj.end()) throw InputError("missing field '" + std::string(key) + "' at " + where);
  return *it;
}

/// Accepts "a/b" or decimal strings, integers, and floats (converted exactly).
inline Rational read_rational(const Json& v, const std::string& where) {
  try {
    if (v.is_string()) return parse_rational(v.get<std::string>());
    if (v.is_number_integer()) return Rational(v.get<long>());
    if (v.is_number_float()) return rational_from_double(v.get<double>());
  } catch (const InputError& e) {
    throw InputError(std::string(e.what()) + " at " + where);
  }
  throw InputError("expected a number or rational string at " + where);
}

inline std::size_t read_size(const Json& v, const std::string& where) {
  if (!v.is_number_integer() || v.get<long long>() < 0) throw InputError("expected a nonnegative integer at " + where);
  return v.get<std::size_t>();
}

inline Element read_element(const std::string& key, std::size_t n, const std::string& where) {
  std::size_t pos = 0;
  unsigned long e = 0;
  try {
    e = std::stoul(key, &pos);
  } catch (...) {
    pos = 0;
  }
  if (pos == 0 || pos != key.size()) throw InputError("element key '" + key + "' is not an integer at " + where);
  if (e >= n) throw InputError("element " + key + " outside ground set of size " + std::to_string(n) + " at " + where);
  return static_cast<Element>(e);
}

/// {"n": int, "p": rational, "sets": [{"elems": [int], "weights": {"elem": value}}]}
/// Missing weights default to 1 on every element. `p_override` replaces the file's p.
inline WeightedFamily family_from_json(const Json& j, const std::optional<Rational>& p_override = std::nullopt) {
  const std::size_t n = read_size(field(j, "n", "/"), "/n");
  Rational p = p_override ? *p_override
               : j.contains("p") ? read_rational(j["p"], "/p")
                                 : throw InputError("missing field 'p' at / and no --p given");
  const Json& sets = field(j, "sets", "/");
  if (!sets.is_array()) throw InputError("expected an array at /sets");
  std::vector<Member> members;
  for (std::size_t k = 0; k < sets.size(); ++k) {
    const std::string where = "/sets/" + std::to_string(k);
    const Json& elems = field(sets[k], "elems", where);
    if (!elems.is_array()) throw InputError("expected an array at " + where + "/elems");
    Member m{SubsetBits(n), {}};
    for (std::size_t i = 0; i < elems.size(); ++i) {
      const auto e = read_size(elems[i], where + "/elems/" + std::to_string(i));
      if (e >= n) throw InputError("element " + std::to_string(e) + " outside ground set at " + where);
      m.set.set(static_cast<Element>(e));
    }
    if (sets[k].contains("weights")) {
      const Json& w = sets[k]["weights"];
      if (!w.is_object()) throw InputError("expected an object at " + where + "/weights");
      for (const auto& [key, value] : w.items()) {
        m.weights[read_element(key, n, where + "/weights")] = read_rational(value, where + "/weights/" + key);
      }
    } else {
      m.set.for_each([&](Element e) { m.weights[e] = 1; });
    }
    members.push_back(std::move(m));
  }
  try {
    return WeightedFamily(GroundSet(n), std::move(members), std::move(p));
  } catch (const InputError& e) {
    throw InputError(std::string(e.what()) + " (family at /)");
  }
}

/// {"n": int, "sequences": [[value, ...], ...]}
inline LambdaCollection lambda_from_json(const Json& j) {
  LambdaCollection lam;
  lam.n = read_size(field(j, "n", "/"), "/n");
  const Json& seqs = field(j, "sequences", "/");
  if (!seqs.is_array()) throw InputError("expected an array at /sequences");
  for (std::size_t k = 0; k < seqs.size(); ++k) {
    const std::string where = "/sequences/" + std::to_string(k);
    if (!seqs[k].is_array()) throw InputError("expected an array at " + where);
    std::vector<Rational> v;
    for (std::size_t i = 0; i < seqs[k].size(); ++i) v.push_back(read_rational(seqs[k][i], where + "/" + std::to_string(i)));
    lam.seqs.push_back(std::move(v));
  }
  lam.validate();
  return lam;
}

inline Multiset multiset_from_json(const Json& j, std::size_t n, const std::string& where) {
  if (!j.is_object()) throw InputError("expected an object of counts at " + where);
  Multiset m(n);
  for (const auto& [key, value] : j.items()) {
    m.set_count(read_element(key, n, where), static_cast<Multiset::Count>(read_size(value, where + "/" + key)));
  }
  return m;
}

/// Per-element rationals either as an array or as {"elem": value}.
inline std::vector<Rational> vector_from_json(const Json& j, std::size_t n, const std::string& where) {
  std::vector<Rational> out(n, Rational(0));
  if (j.is_array()) {
    if (j.size() != n) throw InputError("expected " + std::to_string(n) + " entries at " + where);
    for (std::size_t i = 0; i < n; ++i) out[i] = read_rational(j[i], where + "/" + std::to_string(i));
  } else if (j.is_object()) {
    for (const auto& [key, value] : j.items()) out[read_element(key, n, where)] = read_rational(value, where + "/" + key);
  } else {
    throw InputError("expected an array or object at " + where);
  }
  return out;
}

struct MultisetInput {
  MultisetFamily family;
  std::optional<MultisetDistribution> distribution;
};

/// {"n": int, "sets": [{"counts": {"elem": count}, "weights": {"elem": value}}],
///  "distribution": {"mu": {...}, "N": int, "K": int}}
inline MultisetInput multiset_family_from_json(const Json& j) {
  MultisetInput out;
  out.family.n = read_size(field(j, "n", "/"), "/n");
  const std::size_t n = out.family.n;
  const Json& sets = field(j, "sets", "/");
  if (!sets.is_array()) throw InputError("expected an array at /sets");
  for (std::size_t k = 0; k < sets.size(); ++k) {
    const std::string where = "/sets/" + std::to_string(k);
    MultisetMember m{multiset_from_json(field(sets[k], "counts", where), n, where + "/counts"), {}};
    if (sets[k].contains("weights")) {
      const Json& w = sets[k]["weights"];
      if (!w.is_object()) throw InputError("expected an object at " + where + "/weights");
      for (const auto& [key, value] : w.items()) {
        m.weights[read_element(key, n, where + "/weights")] = read_rational(value, where + "/weights/" + key);
      }
    } else {
      for (auto e : m.set.support()) m.weights[e] = 1;
    }
    out.family.members.push_back(std::move(m));
  }
  out.family.validate();
  if (j.contains("distribution")) {
    const Json& d = j["distribution"];
    MultisetDistribution dist;
    dist.mu = vector_from_json(field(d, "mu", "/distribution"), n, "/distribution/mu");
    dist.N = read_size(field(d, "N", "/distribution"), "/distribution/N");
    dist.K = d.contains("K") ? read_size(d["K"], "/distribution/K") : 1;
    dist.validate();
    out.distribution = std::move(dist);
  }
  return out;
}

/// {"points": [...], "nu": [...], "functions": [[...], ...], "N": int}
inline FiniteEmpiricalInstance instance_from_json(const Json& j) {
  FiniteEmpiricalInstance inst;
  const Json& nu = field(j, "nu", "/");
  if (!nu.is_array()) throw InputError("expected an array at /nu");
  for (std::size_t i = 0; i < nu.size(); ++i) inst.nu.push_back(read_rational(nu[i], "/nu/" + std::to_string(i)));
  if (j.contains("points")) {
    const Json& pts = j["points"];
    if (!pts.is_array()) throw InputError("expected an array at /points");
    for (const auto& v : pts) inst.points.push_back(v.is_string() ? v.get<std::string>() : v.dump());
  }
  const Json& fs = field(j, "functions", "/");
  if (!fs.is_array()) throw InputError("expected an array at /functions");
  for (std::size_t k = 0; k < fs.size(); ++k) {
    inst.functions.push_back(vector_from_json(fs[k], inst.nu.size(), "/functions/" + std::to_string(k)));
  }
  inst.N = read_size(field(j, "N", "/"), "/N");
  inst.validate();
  return inst;
}

// ---------------------------------------------------------------------------
// writing

inline Json rat(const Rational& r) {
  Rational c = r;
  c.canonicalize();
  return c.get_str();
}
inline Json integer(const Integer& z) { return z.get_str(); }
inline Json real(long double v) { return static_cast<double>(v); }

inline Json to_json(const EPoly& e) {
  Json terms = Json::object();
  for (const auto& [k, c] : e.terms()) terms[std::to_string(k)] = rat(c);
  return {{"terms", terms}, {"text", e.to_string()}, {"approx", real(e.approx())}};
}

inline Json elements_json(const SubsetBits& s) {
  Json out = Json::array();
  for (auto e : s.elements()) out.push_back(e);
  return out;
}

inline Json to_json(const Multiset& m) {
  Json out = Json::object();
  for (const auto& [e, c] : m.counts()) out[std::to_string(e)] = c;
  return out;
}

inline Json counts_json(const Counts& c) {
  Json out = Json::object();
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c[i] > 0) out[std::to_string(i)] = c[i];
  }
  return out;
}

inline Json to_json(const WeightedFamily& f) {
  Json sets = Json::array();
  for (const auto& m : f.members()) {
    Json w = Json::object();
    for (const auto& [e, v] : m.weights) w[std::to_string(e)] = rat(v);
    sets.push_back({{"elems", elements_json(m.set)}, {"weights", w}});
  }
  return {{"n", f.n()}, {"p", rat(f.p())}, {"sets", sets}};
}

inline Json to_json(const MultisetFamily& f, const std::optional<MultisetDistribution>& d = std::nullopt) {
  Json sets = Json::array();
  for (const auto& m : f.members) {
    Json w = Json::object();
    for (const auto& [e, v] : m.weights) w[std::to_string(e)] = rat(v);
    sets.push_back({{"counts", to_json(m.set)}, {"weights", w}});
  }
  Json out = {{"n", f.n}, {"sets", sets}};
  if (d) {
    Json mu = Json::array();
    for (const auto& v : d->mu) mu.push_back(rat(v));
    out["distribution"] = {{"mu", mu}, {"N", d->N}, {"K", d->K}};
  }
  return out;
}

inline Json to_json(const LambdaCollection& lam) {
  Json seqs = Json::array();
  for (const auto& s : lam.seqs) {
    Json v = Json::array();
    for (const auto& x : s) v.push_back(rat(x));
    seqs.push_back(v);
  }
  return {{"n", lam.n}, {"sequences", seqs}};
}

inline Json to_json(const FiniteEmpiricalInstance& inst) {
  Json nu = Json::array(), fs = Json::array(), pts = Json::array();
  for (const auto& v : inst.nu) nu.push_back(rat(v));
  for (const auto& f : inst.functions) {
    Json row = Json::array();
    for (const auto& v : f) row.push_back(rat(v));
    fs.push_back(row);
  }
  for (std::size_t i = 0; i < inst.size(); ++i) pts.push_back(inst.points.empty() ? std::to_string(i) : inst.points[i]);
  return {{"points", pts}, {"nu", nu}, {"functions", fs}, {"N", inst.N}};
}

inline Json to_json(const SmallnessCertificate& c) {
  Json cover = Json::array();
  if (c.witness_cover) {
    for (const auto& t : c.witness_cover->elements) cover.push_back(elements_json(t));
  }
  return {{"verdict", to_string(c.verdict)}, {"cost", rat(c.min_cost)}, {"cover", cover}, {"exhaustive", c.exhaustive}};
}

inline Json profile_json(const Profile& s) {
  Json out = Json::array();
  for (auto v : s) out.push_back(v);
  return out;
}

inline Json to_json(const FragmentResult& r) {
  return {{"T", counts_json(r.T)}, {"b", r.b}, {"t", r.t}, {"witness", r.witness}};
}

inline Json to_json(const FragmentPropertyCheck& c) {
  return {{"feasible", c.feasible},   {"exact_cover", c.exact_cover}, {"mass", c.mass},
          {"multiplicity", c.multiplicity}, {"bad_index", c.bad_index}, {"ok", c.ok()}};
}

inline Json to_json(const AjSeries& s) {
  Json a = Json::array();
  for (auto v : s.a) a.push_back(real(v));
  Json out = {{"ratio", real(s.ratio)},         {"tau", s.tau},
              {"a", a},                         {"sum_a", real(s.sum_a)},
              {"product_bound", real(s.product_bound)}, {"exp_bound", real(s.exp_bound)},
              {"chain_holds", s.chain_holds}};
  out["exact_sum"] = s.exact_sum ? real(*s.exact_sum) : Json(nullptr);
  return out;
}

inline Json to_json(const CostLedger& l) {
  Json buckets = Json::array();
  for (const auto& b : l.buckets) {
    buckets.push_back({{"b", b.b},
                       {"s_b", profile_json(b.s_b)},
                       {"t", b.t},
                       {"fragments", b.fragments},
                       {"cost", rat(b.cost)},
                       {"bound", rat(b.bound)},
                       {"within", b.within}});
  }
  Json steps = Json::array();
  for (const auto& s : l.steps) {
    steps.push_back({{"b", s.b},
                     {"s_b", profile_json(s.s_b)},
                     {"bound_sum", real(s.bound_sum)},
                     {"step_bound", real(s.step_bound)},
                     {"holds", s.holds}});
  }
  Json out = {{"n", l.n},
              {"p", rat(l.p)},
              {"J", rat(l.J)},
              {"w", l.w},
              {"J_eff", rat(l.J_eff)},
              {"binom_nw", integer(l.binom_nw)},
              {"total_W", l.total_W},
              {"bad_W", l.bad_W},
              {"lhs", rat(l.lhs)},
              {"bucket_total", rat(l.bucket_total)},
              {"bound_total", rat(l.bound_total)},
              {"buckets", buckets},
              {"steps", steps},
              {"range_violations", l.range_violations},
              {"profiles_legal", l.profiles_legal},
              {"ok", l.ok()}};
  out["empirical_c"] = l.empirical_c ? real(*l.empirical_c) : Json(nullptr);
  return out;
}

/// Inverse of to_json(CostLedger) for the exact fields.
inline CostLedger ledger_from_json(const Json& j) {
  CostLedger l;
  l.n = read_size(field(j, "n", "/"), "/n");
  l.p = read_rational(field(j, "p", "/"), "/p");
  l.J = read_rational(field(j, "J", "/"), "/J");
  l.w = read_size(field(j, "w", "/"), "/w");
  l.J_eff = read_rational(field(j, "J_eff", "/"), "/J_eff");
  l.binom_nw = Integer(field(j, "binom_nw", "/").get<std::string>());
  l.total_W = field(j, "total_W", "/").get<std::uint64_t>();
  l.bad_W = field(j, "bad_W", "/").get<std::uint64_t>();
  l.lhs = read_rational(field(j, "lhs", "/"), "/lhs");
  l.bucket_total = read_rational(field(j, "bucket_total", "/"), "/bucket_total");
  l.bound_total = read_rational(field(j, "bound_total", "/"), "/bound_total");
  const Json& buckets = field(j, "buckets", "/");
  for (std::size_t k = 0; k < buckets.size(); ++k) {
    const std::string where = "/buckets/" + std::to_string(k);
    LedgerBucket b;
    b.b = field(buckets[k], "b", where).get<int>();
    b.s_b = field(buckets[k], "s_b", where).get<Profile>();
    b.t = field(buckets[k], "t", where).get<std::uint64_t>();
    b.fragments = field(buckets[k], "fragments", where).get<std::uint64_t>();
    b.cost = read_rational(field(buckets[k], "cost", where), where + "/cost");
    b.bound = read_rational(field(buckets[k], "bound", where), where + "/bound");
    b.within = field(buckets[k], "within", where).get<bool>();
    l.buckets.push_back(std::move(b));
  }
  for (const auto& s : field(j, "steps", "/")) {
    l.steps.push_back(ProfileStep{s["b"].get<int>(), s["s_b"].get<Profile>(), s["bound_sum"].get<long double>(),
                                  s["step_bound"].get<long double>(), s["holds"].get<bool>()});
  }
  l.range_violations = field(j, "range_violations", "/").get<std::uint64_t>();
  l.profiles_legal = field(j, "profiles_legal", "/").get<bool>();
  if (j.contains("empirical_c") && !j["empirical_c"].is_null()) l.empirical_c = j["empirical_c"].get<long double>();
  return l;
}

inline Json to_json(const MultiCostLedger& l) {
  Json buckets = Json::array();
  for (const auto& b : l.buckets) {
    buckets.push_back({{"b", b.b},
                       {"s_b", profile_json(b.s_b)},
                       {"t", b.t},
                       {"fragments", b.fragments},
                       {"cost", to_json(EPoly::term(b.coefficient, static_cast<int>(b.t)))},
                       {"bound", to_json(EPoly::term(b.bound_coefficient, static_cast<int>(b.t)))},
                       {"within", b.within}});
  }
  Json out = {{"M", l.M},
              {"N", l.N},
              {"K", l.K},
              {"total_W", l.total_W},
              {"bad_W", l.bad_W},
              {"p_bad", rat(l.p_bad)},
              {"lhs", to_json(l.lhs)},
              {"bucket_total", to_json(l.bucket_total)},
              {"bound_total", to_json(l.bound_total)},
              {"buckets", buckets},
              {"range_violations", l.range_violations},
              {"J0", real(l.J0)},
              {"c", real(l.c)},
              {"tail_condition", l.tail_condition},
              {"ok", l.ok()}};
  out["series"] = l.series ? to_json(*l.series) : Json(nullptr);
  return out;
}

inline Json to_json(const MultisetConclusionReport& r) {
  return {{"premise", r.premise},
          {"min_cover_cost", to_json(r.min_cover_cost)},
          {"normalized", r.normalized},
          {"expected_sup_M", rat(r.expected_sup_M)},
          {"expected_sup_N", rat(r.expected_sup_N)},
          {"p_bad", rat(r.p_bad)},
          {"good_floor", rat(r.good_floor)},
          {"sup_above_good_floor", r.sup_above_good_floor},
          {"scaling_holds", r.scaling_holds},
          {"bad_bound", real(r.bad_bound)},
          {"chain_value", real(r.chain_value)},
          {"meets_target", r.meets_target}};
}

inline Json to_json(const Estimate& e) {
  return {{"mean", real(e.mean)},           {"sd", real(e.sd)},           {"std_error", real(e.std_error)},
          {"half_width", real(e.half_width)}, {"ci_low", real(e.mean - e.half_width)},
          {"ci_high", real(e.mean + e.half_width)}, {"trials", e.trials}};
}

inline Json to_json(const ConclusionReport& r) {
  Json exp = {{"exact", r.expectation.exact}, {"approx", real(r.expectation.approx())}};
  if (r.expectation.exact) {
    exp["value"] = rat(r.expectation.value);
  } else {
    exp["estimate"] = to_json(r.expectation.estimate);
  }
  return {{"vacuous", r.vacuous},
          {"certificate", to_json(r.certificate)},
          {"w", r.w},
          {"expectation", exp},
          {"threshold", real(r.threshold)},
          {"meets_threshold", r.meets_threshold}};
}

inline Json to_json(const ReductionReport& r) {
  return {{"n", r.n},
          {"p", rat(r.p)},
          {"K", r.K},
          {"np", rat(r.np)},
          {"N", r.N},
          {"w", r.w},
          {"zeta", rat(r.zeta)},
          {"L_prime", integer(r.L_prime)},
          {"regime", r.regime},
          {"tail", rat(r.tail)},
          {"tail_ok", r.tail_ok},
          {"e_fact", r.e_fact},
          {"zeta_floor_ok", r.zeta_floor_ok},
          {"E_Xp", rat(r.E_Xp)},
          {"E_Wprime", rat(r.E_Wprime)},
          {"E_W", rat(r.E_W)},
          {"factor", rat(r.factor)},
          {"step_b", r.step_b},
          {"step_c", r.step_c},
          {"chain", r.chain},
          {"coupled", to_json(r.coupled)},
          {"coupled_ok", r.coupled_ok},
          {"ok", r.ok()}};
}

inline Json to_json(const MarkovChainReport& r) {
  return {{"prob", rat(r.prob)},
          {"markov", rat(r.markov)},
          {"exponential", to_json(r.exponential)},
          {"poissonized", to_json(r.poissonized)},
          {"steps", {r.step1, r.step2, r.step3}},
          {"ok", r.ok()}};
}

inline Json to_json(const DiscretizationCheck& c) {
  return {{"max_error", rat(c.max_error)},
          {"tuples", c.tuples},
          {"violations", c.violations},
          {"measure_preserved", c.measure_preserved}};
}

inline Json to_json(const CellPartition& cells) {
  Json keys = Json::array(), mu = Json::array();
  for (const auto& k : cells.keys) {
    Json row = Json::array();
    for (const auto& z : k) row.push_back(integer(z));
    keys.push_back(row);
  }
  for (const auto& m : cells.mu) mu.push_back(rat(m));
  return {{"eps", rat(cells.eps)}, {"keys", keys}, {"cell_of", cells.cell_of}, {"mu", mu}};
}

inline Json to_json(const WitnessEvent& ev, const CellPartition& cells) {
  Json g = Json::array(), ratio = Json::array();
  for (auto v : ev.g) g.push_back(real(v));
  for (const auto& r : ev.ratio) ratio.push_back(rat(r));
  Json h = Json::array();
  for (auto v : ev.exported_h(cells)) h.push_back(real(v));
  return {{"G", to_json(ev.G)},       {"ratio", ratio}, {"g_tilde", g},
          {"t_tilde", real(ev.t)},    {"threshold", rat(ev.threshold)},
          {"h", h},                   {"s", real(ev.exported_s())}};
}

inline Json to_json(const SymmetricWitnessLevel& l) {
  return {{"k", l.k},           {"tuples", l.tuples},     {"prob", rat(l.prob)},
          {"bound", real(l.bound)}, {"within", l.within}, {"symmetric", l.symmetric}};
}

inline Json to_json(const TailCoverageReport& r) {
  Json family = Json::array(), cover = Json::array(), probs = Json::array(), escapes = Json::array();
  for (const auto& s : r.family) family.push_back(to_json(s));
  for (const auto& g : r.cover) cover.push_back(to_json(g));
  for (const auto& p : r.event_probs) probs.push_back(rat(p));
  for (const auto& e : r.escapes) escapes.push_back({{"tuple", e.tuple}, {"sup", rat(e.sup)}});
  return {{"normalization", rat(r.normalization)},
          {"eps", rat(r.eps)},
          {"L", rat(r.L)},
          {"tail_factor", rat(r.tail_factor)},
          {"cells", r.cells},
          {"expected_discrete", rat(r.expected_discrete)},
          {"family", family},
          {"cover", cover},
          {"cover_cost", to_json(r.cover_cost)},
          {"certified", r.certified},
          {"event_probs", probs},
          {"budget", rat(r.budget)},
          {"budget_ok", r.budget_ok},
          {"tuples", r.tuples},
          {"tail_tuples", r.tail_tuples},
          {"escapes", escapes},
          {"ok", r.ok()}};
}

/// Wraps a result with the format version and the configuration that produced it.
inline Json envelope(const std::string& command, const Json& config, const Json& result) {
  return {{"format_version", kFormatVersion}, {"command", command}, {"config", config}, {"result", result}};
}

// ---------------------------------------------------------------------------
// CSV

inline std::string profile_cell(const Profile& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? ";" : "") + std::to_string(s[i]);
  return out;
}

inline std::string ledger_csv(const CostLedger& l) {
  std::string out = "b,s_b,t,bucket_cost,bound\n";
  for (const auto& b : l.buckets) {
    out += std::to_string(b.b) + "," + profile_cell(b.s_b) + "," + std::to_string(b.t) + "," + rat(b.cost).get<std::string>() +
           "," + rat(b.bound).get<std::string>() + "\n";
  }
  return out;
}

inline std::string ledger_csv(const MultiCostLedger& l) {
  std::string out = "b,s_b,t,bucket_cost,bound\n";
  for (const auto& b : l.buckets) {
    const int t = static_cast<int>(b.t);
    out += std::to_string(b.b) + "," + profile_cell(b.s_b) + "," + std::to_string(b.t) + "," +
           EPoly::term(b.coefficient, t).to_string() + "," + EPoly::term(b.bound_coefficient, t).to_string() + "\n";
  }
  return out;
}

inline std::string trace_csv(const Estimate& e) {
  std::string out = "chunk,trials,running_mean\n";
  for (std::size_t c = 0; c < e.trace.size(); ++c) {
    std::ostringstream row;
    row.precision(17);
    row << c << "," << std::min<std::uint64_t>(e.trials, (c + 1) * kTrialChunk) << ","
        << static_cast<double>(e.trace[c]) << "\n";
    out += row.str();
  }
  return out;
}

inline std::string escapes_csv(const TailCoverageReport& r) {
  std::string out = "tuple,sup\n";
  for (const auto& e : r.escapes) {
    std::string t;
    for (std::size_t i = 0; i < e.tuple.size(); ++i) t += (i ? ";" : "") + std::to_string(e.tuple[i]);
    out += t + "," + rat(e.sup).get<std::string>() + "\n";
  }
  return out;
}

}  // namespace pcover::io
