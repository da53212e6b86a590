#pragma once

// Command-line harness: every subcommand reads JSON, runs one module and
// writes a JSON report that embeds the configuration and the format version.
// Exit codes: 0 success, 1 property violation, 2 usage, guard or input error.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pcover/pcover.hpp"

namespace pcover::cli {

using io::Json;

enum ExitCode : int { kOk = 0, kViolation = 1, kUsage = 2 };

struct Options {
  std::string family, lambda, instance, out, csv;
  std::string p, J = "100", L = "1", eps = "1/100", tail_factor = "2", W;
  std::string trials = "100000";
  std::string capture = "1/100", good_threshold = "1/10000000000";
  std::string mode = "exact";
  std::uint64_t seed = 7;
  std::size_t N = 0, K = 0, n = 4, members = 4, points = 3, functions = 2;
  long double J0 = 400, c = 0.5L;
  std::string kind;
  bool exhaustive = false, regularize = false, greedy = false, quick = false;
};

namespace detail {

inline std::uint64_t parse_count(const std::string& text, const char* what) {
  std::size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(text, &pos);
  } catch (...) {
    pos = 0;
  }
  if (pos != text.size() || pos == 0 || v < 0 || v != std::floor(v) || v > 1e15) {
    throw InputError(std::string(what) + " must be a nonnegative integer, got '" + text + "'");
  }
  return static_cast<std::uint64_t>(v);
}

inline std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur, sep)) {
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

/// "0,3,5" for a set; "0:2,3:1" for a multiset.
inline Counts parse_W(const std::string& text, std::size_t n) {
  Counts c(n, 0);
  for (const auto& item : split(text, ',')) {
    const auto parts = split(item, ':');
    if (parts.empty() || parts.size() > 2) throw InputError("cannot parse W entry '" + item + "'");
    const auto e = parse_count(parts[0], "W element");
    if (e >= n) throw InputError("W element " + parts[0] + " outside ground set of size " + std::to_string(n));
    c[e] += parts.size() == 2 ? static_cast<std::uint32_t>(parse_count(parts[1], "W count")) : 1U;
  }
  return c;
}

inline bool is_multiset_file(const Json& j) {
  return j.contains("sets") && j["sets"].is_array() && !j["sets"].empty() && j["sets"][0].contains("counts");
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw InputError("cannot write " + path);
  f << text;
}

inline Json limits_json() {
  return {{"max_cover_candidates", ExactCoverLimits{}.max_candidates},
          {"max_cover_states", CoverSearchLimits{}.max_states},
          {"max_multiset_candidates", MultisetCoverLimits{}.max_candidates},
          {"max_w_subsets", LedgerLimits{}.max_w_subsets},
          {"max_exact_n", SelectorLimits{}.max_exact_n},
          {"max_tuples", BridgeLimits{}.max_tuples},
          {"fragment_search_limit", FragmentConfig{}.search_limit}};
}

}  // namespace detail

/// Full configuration of one run; embedded verbatim in every report.
inline Json config_json(const std::string& command, const Options& o) {
  return {{"subcommand", command}, {"family", o.family},     {"lambda", o.lambda},   {"instance", o.instance},
          {"p", o.p},              {"J", o.J},               {"L", o.L},             {"eps", o.eps},
          {"tail_factor", o.tail_factor}, {"W", o.W},        {"N", o.N},             {"K", o.K},
          {"J0", io::real(o.J0)},  {"c", io::real(o.c)},     {"seed", o.seed},       {"trials", o.trials},
          {"mode", o.mode},        {"exhaustive", o.exhaustive}, {"regularize", o.regularize},
          {"greedy", o.greedy},    {"kind", o.kind},         {"n", o.n},             {"members", o.members},
          {"points", o.points},    {"functions", o.functions}, {"quick", o.quick},   {"out", o.out},
          {"csv", o.csv},          {"capture", o.capture},   {"good_threshold", o.good_threshold},          {"threads", thread_count()}, {"guards", detail::limits_json()}};
}

struct Outcome {
  Json result;
  bool ok = true;
  std::optional<std::string> csv;  // derived table, written to --csv when given
};

inline FragmentConfig fragment_config(const Options& o) {
  FragmentConfig cfg;
  cfg.capture = parse_rational(o.capture);
  cfg.good_threshold = parse_rational(o.good_threshold);
  return cfg;
}

inline std::optional<Rational> optional_p(const Options& o) {
  if (o.p.empty()) return std::nullopt;
  return parse_rational(o.p);
}

inline DyadicFamily processed_family(const Json& j, const Options& o, Json& report) {
  ProcessedFamily pf;
  if (detail::is_multiset_file(j)) {
    pf = preprocess(io::multiset_family_from_json(j).family);
  } else {
    pf = preprocess(io::family_from_json(j, optional_p(o)));
  }
  if (o.regularize) pf = regularize(pf.family);
  Json before = Json::array(), after = Json::array();
  for (const auto& w : pf.weight_before) before.push_back(io::rat(w));
  for (const auto& w : pf.weight_after) after.push_back(io::rat(w));
  report["preprocessing"] = {{"tau", pf.family.tau}, {"weight_before", before}, {"weight_after", after}};
  return pf.family;
}

// ---------------------------------------------------------------------------

inline Outcome cmd_certify(const Options& o) {
  const auto f = io::family_from_json(io::read_json_file(o.family), optional_p(o));
  const Rational p = f.p();
  Outcome out;
  if (o.mode == "float") {
    const auto best = min_cover_cost_float(f, to_long_double(p));
    Json cover = Json::array();
    for (const auto& t : best.cover) cover.push_back(io::elements_json(t));
    out.result = {{"verdict", best.cost <= 0.5L ? "p-small" : "not-p-small"},
                  {"cost", io::real(best.cost)},
                  {"cover", cover},
                  {"mode", "float"}};
  } else {
    out.result = io::to_json(is_p_small(f, p));
    out.result["mode"] = "exact";
  }
  if (o.greedy) {
    const auto g = greedy_cover(f, p);
    Json cover = Json::array();
    for (const auto& t : g.cover) cover.push_back(io::elements_json(t));
    out.result["greedy"] = {{"cost", io::rat(g.cost)}, {"cover", cover}};
  }
  return out;
}

inline Outcome cmd_fragment(const Options& o) {
  Outcome out;
  const Json j = io::read_json_file(o.family);
  const auto fam = processed_family(j, o, out.result);
  FragmentEngine e(fam, fragment_config(o));
  const Counts W = detail::parse_W(o.W, fam.n);
  Json rows = Json::array();
  for (std::size_t s = 0; s < e.size(); ++s) {
    const auto r = e.minimum_fragment(s, W);
    const auto c = e.check_properties(s, W, r);
    out.ok = out.ok && c.ok();
    rows.push_back({{"member", s}, {"fragment", io::to_json(r)}, {"checks", io::to_json(c)}});
  }
  Json cover = Json::array();
  for (const auto& T : e.build_cover(W)) cover.push_back(io::counts_json(T));
  out.result["W"] = io::counts_json(W);
  out.result["class"] = to_string(classify(e, W));
  out.result["captured_weight"] = io::rat(e.captured_weight(W));
  out.result["fragments"] = rows;
  out.result["cover"] = cover;
  return out;
}

inline Outcome cmd_ledger(const Options& o) {
  Outcome out;
  const Json j = io::read_json_file(o.family);
  if (detail::is_multiset_file(j)) throw InputError("ledger needs a set family; use mledger for multisets");
  const auto f = io::family_from_json(j, optional_p(o));
  const auto fam = processed_family(j, o, out.result);
  FragmentEngine e(fam, fragment_config(o));
  const auto l = aggregate_bad_cost(e, f.p(), parse_rational(o.J));
  out.result["ledger"] = io::to_json(l);
  const long double J = to_long_double(l.J_eff);
  if (J > 4) out.result["aj_series"] = io::to_json(aj_series(J, fam.tau));
  out.ok = l.ok();
  out.csv = io::ledger_csv(l);
  return out;
}

inline Outcome cmd_estimate(const Options& o) {
  Outcome out;
  const auto lam = io::lambda_from_json(io::read_json_file(o.lambda));
  if (o.p.empty()) throw InputError("--p is required");
  const Rational p = parse_rational(o.p);
  require_probability(p);
  const auto trials = detail::parse_count(o.trials, "--trials");
  const auto est = expected_sup_mc(lam, to_long_double(p), trials, o.seed);
  out.result["estimate"] = io::to_json(est);
  out.result["threshold"] = 1e-11;
  out.result["meets_threshold"] = est.mean >= 1e-11L;
  if (o.mode == "exact") {
    const Rational exact = expected_sup_exact(lam, p);
    const long double z = est.std_error > 0 ? std::fabs(est.mean - to_long_double(exact)) / est.std_error : 0.0L;
    out.result["exact"] = io::rat(exact);
    out.result["exact_approx"] = io::real(to_long_double(exact));
    out.result["z"] = io::real(z);
    out.result["within_4_sigma"] = z <= 4;
  }
  out.csv = io::trace_csv(est);
  return out;
}

inline Outcome cmd_reduce(const Options& o) {
  Outcome out;
  const auto f = io::family_from_json(io::read_json_file(o.family), optional_p(o));
  if (o.K == 0) throw InputError("--K is required and must be at least 1");
  const auto trials = detail::parse_count(o.trials, "--trials");
  const auto red = verify_subsampling_chain(f, f.p(), o.K, trials, o.seed);
  out.result["reduction"] = io::to_json(red);
  out.result["conclusion"] = io::to_json(verify_selector_conclusion(f, f.p(), o.K, trials, o.seed));
  out.ok = red.ok();
  out.csv = io::trace_csv(red.coupled);
  return out;
}

inline MultisetDistribution distribution_of(const io::MultisetInput& in, const Options& o) {
  if (!in.distribution) throw InputError("multiset family file needs a distribution block");
  MultisetDistribution d = *in.distribution;
  if (o.N > 0) d.N = o.N;
  if (o.K > 0) d.K = o.K;
  d.validate();
  return d;
}

inline Outcome cmd_mcertify(const Options& o) {
  Outcome out;
  const auto in = io::multiset_family_from_json(io::read_json_file(o.family));
  const auto d = distribution_of(in, o);
  const auto best = min_multiset_cover_cost_exact(in.family.sets(), d.mu, d.N);
  Json cover = Json::array();
  for (const auto& g : best.cover) cover.push_back(io::to_json(g));
  const bool small = compare(best.cost, EPoly(Rational(1, 2))) <= 0;
  out.result = {{"verdict", small ? "small" : "not-small"}, {"cost", io::to_json(best.cost)}, {"cover", cover}};
  return out;
}

inline Outcome cmd_mledger(const Options& o) {
  Outcome out;
  const Json j = io::read_json_file(o.family);
  const auto in = io::multiset_family_from_json(j);
  const auto d = distribution_of(in, o);
  const auto fam = processed_family(j, o, out.result);
  FragmentEngine e(fam, fragment_config(o));
  const auto l = aggregate_bad_cost_multi(e, d, o.J0, o.c);
  out.result["ledger"] = io::to_json(l);
  out.result["conclusion"] = io::to_json(verify_multiset_conclusion(in.family, d, o.J0, o.c, Rational(1, 10000000000UL)));
  out.ok = l.ok();
  out.csv = io::ledger_csv(l);
  return out;
}

inline Outcome cmd_bridge(const Options& o) {
  Outcome out;
  auto inst = io::instance_from_json(io::read_json_file(o.instance));
  const Rational factor = normalize(inst);
  const Rational eps = parse_rational(o.eps);
  const auto cells = discretize(inst, eps);
  const auto check = check_discretization(inst, cells);
  const auto tail = tail_coverage_check(inst, eps, parse_rational(o.L), parse_rational(o.tail_factor));
  Json events = Json::array();
  bool ok = check.violations == 0 && check.measure_preserved;
  for (const auto& g : tail.cover) {
    const auto ev = witness_from_cover_element(g, cells.mu, inst.N);
    const auto chain = markov_chain_check(g, cells.mu, inst.N);
    const auto failures = containment_failures(ev, cells.cells());
    ok = ok && chain.ok() && failures == 0;
    events.push_back({{"event", io::to_json(ev, cells)}, {"markov", io::to_json(chain)}, {"containment_failures", failures}});
  }
  Json levels = Json::array();
  for (const auto& l : symmetric_witness_sets(tail.cover, cells.mu, inst.N)) {
    levels.push_back(io::to_json(l));
    if (tail.certified) ok = ok && l.within && l.symmetric;
  }
  out.result = {{"normalization", io::rat(factor)},
                {"cells", io::to_json(cells)},
                {"discretization", io::to_json(check)},
                {"witness_events", events},
                {"symmetric_witness_sets", levels}};
  out.ok = ok;
  return out;
}

inline Outcome cmd_coverage(const Options& o) {
  Outcome out;
  const auto inst = io::instance_from_json(io::read_json_file(o.instance));
  const auto r = tail_coverage_check(inst, parse_rational(o.eps), parse_rational(o.L), parse_rational(o.tail_factor));
  out.result = io::to_json(r);
  out.ok = r.ok();
  out.csv = io::escapes_csv(r);
  return out;
}

inline Outcome cmd_gen(const Options& o) {
  Outcome out;
  const Rational p = o.p.empty() ? Rational(1, 8) : parse_rational(o.p);
  if (o.kind == "disjoint-singletons") {
    out.result = io::to_json(gen::disjoint_singletons(o.n, p));
  } else if (o.kind == "random-family") {
    gen::RandomFamilyParams params;
    params.n = o.n;
    params.members = o.members;
    params.max_size = std::min<std::size_t>(o.n, 3);
    params.p = p;
    out.result = io::to_json(gen::random_family(params, o.seed));
  } else if (o.kind == "threshold-from-lambda") {
    out.result = io::to_json(gen::threshold_from_lambda(o.n, o.members, o.seed, p));
  } else if (o.kind == "random-multiset-family") {
    gen::RandomMultisetParams params;
    params.n = o.n;
    params.members = o.members;
    params.N = o.N > 0 ? o.N : 2;
    params.K = o.K > 0 ? o.K : 2;
    auto inst = gen::random_multiset_family(params, o.seed);
    out.result = io::to_json(inst.family, inst.distribution);
  } else if (o.kind == "random-empirical") {
    gen::RandomEmpiricalParams params;
    params.points = o.points;
    params.N = o.N > 0 ? o.N : 3;
    params.functions = o.functions;
    out.result = io::to_json(gen::random_empirical(params, o.seed));
  } else {
    throw InputError("unknown generator kind '" + o.kind + "'");
  }
  return out;
}

inline Outcome cmd_suite(const Options& o, std::ostream& err) {
  acceptance::Config cfg{o.seed, o.quick};
  const auto results =
      acceptance::run_all(cfg, [&](const acceptance::CriterionResult& r) { err << acceptance::summary_line(r) << "\n"; });
  Outcome out;
  out.result = acceptance::report(cfg, results)["result"];
  out.ok = out.result["all_passed"].get<bool>();
  return out;
}

// ---------------------------------------------------------------------------

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  Options o;
  CLI::App app{"Exact and statistical checks for p-small families, fragments and selector processes", "pcover"};
  app.require_subcommand(1);

  auto add_family = [&](CLI::App* s, bool required = true) {
    auto* opt = s->add_option("--family", o.family, "family JSON file");
    if (required) opt->required();
  };
  auto add_engine = [&](CLI::App* s) {
    s->add_option("--capture", o.capture, "share of weight a fragment must capture");
    s->add_option("--good-threshold", o.good_threshold, "captured weight at which W counts as good");
  };
  auto add_out = [&](CLI::App* s) {
    s->add_option("--out", o.out, "write the JSON report here instead of stdout");
    s->add_option("--csv", o.csv, "write the derived CSV table here");
  };

  auto* certify = app.add_subcommand("certify", "decide p-smallness with the exact cover oracle");
  add_family(certify);
  certify->add_option("--p", o.p, "override p from the file");
  certify->add_option("--mode", o.mode, "exact or float")->check(CLI::IsMember({"exact", "float"}));
  certify->add_flag("--greedy", o.greedy, "also report the greedy upper bound");
  add_out(certify);

  auto* fragment = app.add_subcommand("fragment", "minimum fragments of every member for one W");
  add_family(fragment);
  fragment->add_option("--W", o.W, "W as 0,3,5 or, for multisets, 0:2,3:1")->required();
  fragment->add_option("--p", o.p, "override p from the file");
  fragment->add_flag("--regularize", o.regularize, "regularize after preprocessing");
  add_engine(fragment);
  add_out(fragment);

  auto* ledger = app.add_subcommand("ledger", "exhaustive bad-W cost ledger");
  add_family(ledger);
  ledger->add_option("--J", o.J, "J, with w = floor(J n p)");
  ledger->add_option("--p", o.p, "override p from the file");
  ledger->add_flag("--exhaustive", o.exhaustive, "enumerate every W (the only mode)");
  ledger->add_flag("--regularize", o.regularize, "regularize after preprocessing");
  add_engine(ledger);
  add_out(ledger);

  auto* estimate = app.add_subcommand("estimate", "E sup over X_p, exact and Monte Carlo");
  estimate->add_option("--lambda", o.lambda, "sequence collection JSON file")->required();
  estimate->add_option("--p", o.p, "selection probability")->required();
  estimate->add_option("--trials", o.trials, "Monte Carlo trials (1e6 accepted)");
  estimate->add_option("--seed", o.seed, "seed");
  estimate->add_option("--mode", o.mode, "exact adds the exact value")->check(CLI::IsMember({"exact", "float"}));
  add_out(estimate);

  auto* reduce = app.add_subcommand("reduce", "reduction from uniform w-subsets to X_p");
  add_family(reduce);
  reduce->add_option("--K", o.K, "K, with w = floor(K n p)")->required();
  reduce->add_option("--p", o.p, "override p from the file");
  reduce->add_option("--trials", o.trials, "coupled Monte Carlo trials");
  reduce->add_option("--seed", o.seed, "seed");
  add_out(reduce);

  auto* mcertify = app.add_subcommand("mcertify", "minimum Poissonized multiset cover");
  add_family(mcertify);
  mcertify->add_option("--N", o.N, "override N");
  add_out(mcertify);

  auto* mledger = app.add_subcommand("mledger", "exhaustive multiset ledger and conclusion report");
  add_family(mledger);
  mledger->add_option("--N", o.N, "override N");
  mledger->add_option("--K", o.K, "override K");
  mledger->add_option("--J0", o.J0, "J0 of the tail condition");
  mledger->add_option("--c", o.c, "exponent c of the tail condition");
  mledger->add_flag("--regularize", o.regularize, "regularize after preprocessing");
  add_engine(mledger);
  add_out(mledger);

  auto* bridge = app.add_subcommand("bridge", "discretization, witness events and their bounds");
  bridge->add_option("--instance", o.instance, "empirical instance JSON file")->required();
  bridge->add_option("--eps", o.eps, "cell width after normalization");
  bridge->add_option("--L", o.L, "family threshold L");
  bridge->add_option("--tail-factor", o.tail_factor, "tail threshold is tail-factor * L");
  add_out(bridge);

  auto* coverage = app.add_subcommand("coverage", "exhaustive tail coverage by witness events");
  coverage->add_option("--instance", o.instance, "empirical instance JSON file")->required();
  coverage->add_option("--eps", o.eps, "cell width after normalization");
  coverage->add_option("--L", o.L, "family threshold L");
  coverage->add_option("--tail-factor", o.tail_factor, "tail threshold is tail-factor * L");
  add_out(coverage);

  auto* gen = app.add_subcommand("gen", "generate an instance");
  gen->add_option("--kind", o.kind, "generator kind")
      ->required()
      ->check(CLI::IsMember({"random-family", "disjoint-singletons", "threshold-from-lambda", "random-multiset-family",
                             "random-empirical"}));
  gen->add_option("--n", o.n, "ground set size");
  gen->add_option("--members", o.members, "members or sequences");
  gen->add_option("--points", o.points, "points of an empirical instance");
  gen->add_option("--functions", o.functions, "functions of an empirical instance");
  gen->add_option("--N", o.N, "N");
  gen->add_option("--K", o.K, "K");
  gen->add_option("--p", o.p, "p written into set families");
  gen->add_option("--seed", o.seed, "seed");
  gen->add_option("--out", o.out, "write here instead of stdout");

  auto* suite = app.add_subcommand("suite", "run the full acceptance battery");
  suite->add_option("--seed", o.seed, "seed");
  suite->add_flag("--quick", o.quick, "reduced sweep sizes");
  add_out(suite);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    Outcome result;
    if (command == "certify") result = cmd_certify(o);
    else if (command == "fragment") result = cmd_fragment(o);
    else if (command == "ledger") result = cmd_ledger(o);
    else if (command == "estimate") result = cmd_estimate(o);
    else if (command == "reduce") result = cmd_reduce(o);
    else if (command == "mcertify") result = cmd_mcertify(o);
    else if (command == "mledger") result = cmd_mledger(o);
    else if (command == "bridge") result = cmd_bridge(o);
    else if (command == "coverage") result = cmd_coverage(o);
    else if (command == "gen") result = cmd_gen(o);
    else result = cmd_suite(o, err);

    Json doc;
    if (command == "gen") {
      // Stays readable as an input file: unknown top-level keys are ignored.
      doc = result.result;
      doc["format_version"] = io::kFormatVersion;
      doc["config"] = config_json(command, o);
    } else {
      doc = io::envelope(command, config_json(command, o), result.result);
    }
    const std::string text = doc.dump(2) + "\n";
    if (o.out.empty()) {
      out << text;
    } else {
      detail::write_text(o.out, text);
    }
    if (!o.csv.empty()) detail::write_text(o.csv, result.csv.value_or(""));
    if (!result.ok) {
      err << command << ": property violation (see report)\n";
      return kViolation;
    }
    return kOk;
  } catch (const GuardError& e) {
    err << e.what() << "\n";
    return kUsage;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << "\n";
    return kUsage;
  } catch (const PropertyViolation& e) {
    err << "property violation: " << e.what() << "\n";
    return kViolation;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
}

}  // namespace pcover::cli
