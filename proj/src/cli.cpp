#include "adelic/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "adelic/envelope.hpp"
#include "adelic/json_io.hpp"

namespace adelic {

namespace {

const std::vector<std::string> kFlags = {"curve", "map",    "alpha", "point", "target", "N",    "places", "grid", "budget",
                                         "seed",  "tol",    "out",   "value", "family", "test", "case",   "step"};

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", x == 0 ? 0.0 : x);
  return buf;
}

struct Params {
  Json cfg = Json::object();
  std::map<std::string, std::string> flags;

  bool has(const std::string& k) const { return flags.count(k) || cfg.contains(k); }

  std::string str(const std::string& k, const std::string& def = "") const {
    if (auto it = flags.find(k); it != flags.end()) return it->second;
    if (!cfg.contains(k)) return def;
    const Json& v = cfg.at(k);
    return v.is_string() ? v.get<std::string>() : v.dump();
  }

  /// JSON value of k; strings starting with '@' name a file, other strings
  /// holding JSON are parsed.
  Json json(const std::string& k) const {
    Json v;
    if (auto it = flags.find(k); it != flags.end()) v = it->second;
    else if (cfg.contains(k)) v = cfg.at(k);
    else throw Error("missing --" + k);
    if (!v.is_string()) return v;
    std::string s = v.get<std::string>();
    if (!s.empty() && s.front() == '@') {
      std::ifstream in(s.substr(1));
      if (!in) throw Error("cannot open " + s.substr(1));
      return Json::parse(in);
    }
    if (!s.empty() && (s.front() == '{' || s.front() == '[')) return Json::parse(s);
    return v;
  }

  double num(const std::string& k, double def) const {
    if (!has(k)) return def;
    try {
      return parse_rational(str(k)).get_d();
    } catch (const Error&) {
      return std::stod(str(k));
    }
  }

  long integer(const std::string& k, long def) const {
    if (!has(k)) return def;
    std::string s = str(k);
    std::size_t used = 0;
    long v = std::stol(s, &used);
    if (used != s.size()) throw Error("--" + k + " must be an integer");
    return v;
  }

  std::vector<std::string> list(const std::string& k) const {
    std::vector<std::string> out;
    if (!has(k)) return out;
    if (cfg.contains(k) && !flags.count(k) && cfg.at(k).is_array()) {
      for (const auto& e : cfg.at(k)) out.push_back(e.is_string() ? e.get<std::string>() : e.dump());
      return out;
    }
    std::stringstream ss(str(k));
    std::string tok;
    while (std::getline(ss, tok, ','))
      if (!tok.empty()) out.push_back(tok);
    return out;
  }
};

struct Output {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  Json summary = Json::object();
  /// Printed instead of the CSV when set.
  std::string headline;

  std::string csv() const {
    std::ostringstream o;
    for (std::size_t i = 0; i < header.size(); ++i) o << (i ? "," : "") << header[i];
    o << "\n";
    for (const auto& r : rows) {
      for (std::size_t i = 0; i < r.size(); ++i) o << (i ? "," : "") << r[i];
      o << "\n";
    }
    return o.str();
  }
};

Endomorphism map_of(const Params& P) {
  if (!P.has("map")) throw Error("missing --map");
  Rational alpha = P.has("alpha") ? parse_rational(P.str("alpha")) : Rational(1);
  Json m = P.json("map");
  if (m.is_object()) {
    Endomorphism f = endomorphism_from_json(m);
    return P.has("alpha") ? f.with_alpha(alpha) : f;
  }
  return Endomorphism::parse(m.get<std::string>(), alpha);
}

// Toric family from --family, or the canonical family of --map.
MetricFamily family_of(const Params& P, bool allow_non_toric = false) {
  if (P.has("family")) return family_from_json(P.json("family"));
  if (P.has("map")) {
    MetricFamily phi = canonical_metric_family(map_of(P), P.num("tol", 1e-12));
    if (!allow_non_toric && !phi.toric()) throw Error("the canonical family of this map is not toric; pass --family");
    return phi;
  }
  throw Error("missing --family or --map");
}

MeasureOptions measure_options(const Params& P) {
  MeasureOptions o;
  o.budget = P.integer("budget", o.budget);
  o.seed = static_cast<std::uint64_t>(P.integer("seed", static_cast<long>(o.seed)));
  if (o.budget <= 0) throw Error("budget must be positive");
  return o;
}

Output cmd_product_formula(const Params& P) {
  AdelicCurve C = parse_curve(P.str("curve", "Q"));
  auto values = P.list("value");
  if (values.empty()) throw Error("missing --value");
  double tol = P.num("tol", 1e-12);
  Output O;
  O.header = {"value", "defect", "support"};
  Json rows = Json::array();
  for (const auto& v : values) {
    FieldElement a = C.parse(v);
    double d = C.product_formula_defect(a);
    std::string support;
    for (const auto& w : C.place_support(a)) support += (support.empty() ? "" : " ") + w.id;
    O.rows.push_back({C.format(a), fmt(d), support});
    rows.push_back({{"value", C.format(a)}, {"defect", d}, {"within_tol", std::fabs(d) <= tol}});
    if (O.headline.empty()) O.headline = std::fabs(d) <= tol ? "0" : fmt(d);
  }
  O.summary = {{"curve", to_json(C)}, {"tol", tol}, {"rows", rows}};
  if (values.size() > 1) O.headline.clear();
  return O;
}

Output cmd_canonical_height(const Params& P) {
  Endomorphism f = map_of(P);
  if (!P.has("point")) throw Error("missing --point");
  ClosedPoint Y = ClosedPoint::parse(P.str("point"));
  HeightOptions opt;
  opt.depth = static_cast<int>(P.integer("N", opt.depth));
  if (P.has("budget")) opt.bit_budget = static_cast<std::size_t>(P.integer("budget", 0));
  opt.tol = P.num("tol", opt.tol);
  HeightResult H = canonical_height(f, Y, opt);
  Output O;
  O.header = {"n", "term"};
  for (std::size_t n = 0; n < H.trace.size(); ++n) O.rows.push_back({std::to_string(n), fmt(H.trace[n])});
  O.summary = {{"map", to_json(f)},       {"point", Y.describe()},        {"height", H.value},
               {"depth", H.depth},        {"preperiodic", H.preperiodic}, {"error_bound", H.error_bound},
               {"constant", H.constant}};
  if (H.local) O.summary["local"] = *H.local;
  O.headline = fmt(H.value);
  return O;
}

Output cmd_tate_iterate(const Params& P) {
  Endomorphism f = map_of(P);
  auto places = P.list("places");
  std::string place = places.empty() ? "inf" : places.front();
  int depth = static_cast<int>(P.integer("N", 20));
  TateApprox T = tate_local_potential(f, place, depth, parse_grid(P.str("grid")));
  Output O;
  O.header = {"n", "increment", "bound"};
  double scale = 1;
  for (std::size_t n = 0; n < T.increments.size(); ++n) {
    scale /= T.degree;
    O.rows.push_back({std::to_string(n), fmt(T.increments[n]), fmt(T.lambda_sup * scale)});
  }
  O.summary = {{"map", to_json(f)},         {"place", T.place},
               {"depth", T.depth},          {"lambda_sup", T.lambda_sup},
               {"error_bound", T.error_bound()}, {"increments", T.increments}};
  if (T.roof) O.summary["roof"] = to_json(*T.roof);
  return O;
}

Output cmd_chi_volume(const Params& P) {
  MetricFamily phi = family_of(P, true);
  int N = static_cast<int>(P.integer("N", 50));
  if (N < 1) throw Error("--N must be positive");
  VerificationGrid g = parse_grid(P.str("grid"));
  Output O;
  O.header = {"n", "estimate", "closed_form", "abs_error"};
  Json errs = Json::array();
  std::optional<double> closed;
  double last = 0;
  for (int n = 1; n <= N; ++n) {
    LatticeEstimate E = chi_volume_lattice_estimate(phi, n, g);
    closed = E.closed_form;
    last = E.estimate;
    double err = closed ? std::fabs(E.estimate - *closed) : NAN;
    O.rows.push_back({std::to_string(n), fmt(E.estimate), closed ? fmt(*closed) : "", closed ? fmt(err) : ""});
    if (closed) errs.push_back(err);
  }
  O.summary = {{"estimate", last}, {"errors", errs}};
  if (closed) O.summary["closed_form"] = *closed;
  if (phi.toric()) O.summary["family"] = to_json(phi);
  return O;
}

Output cmd_concave_transform(const Params& P) {
  MetricFamily phi = family_of(P);
  int N = static_cast<int>(P.integer("N", 8));
  ConcaveTransform T = concave_transform(phi, N);
  Output O;
  O.header = {"k", "y", "threshold", "G"};
  const int K = N * T.level;
  for (int k = 0; k <= K; ++k) {
    double y = static_cast<double>(k) / N;
    O.rows.push_back({std::to_string(k), fmt(y), fmt(T.staircase[static_cast<std::size_t>(k)]), fmt(T(y))});
  }
  O.summary = {{"level", T.level}, {"n", T.n}, {"normalized_roof", to_json(T.normalized)},
               {"mu_min", T.mu_min}, {"mu_max", T.mu_max}, {"chi_volume", chi_volume_closed_form(phi)}};
  return O;
}

TestFunctionFamily test_of(const Params& P) {
  if (P.has("test")) return test_family_from_json(P.json("test"));
  return lipschitz_test_bank().back().f;
}

Output cmd_gateaux_check(const Params& P) {
  MetricFamily phi = family_of(P, true);
  TestFunctionFamily f = test_of(P);
  double h = P.num("step", 1e-3);
  GateauxResult G = gateaux_derivative(phi, f, h, measure_options(P));
  Output O;
  O.header = {"derivative", "measure_route", "finite_difference", "fd_error", "measure_error"};
  O.rows.push_back({fmt(G.derivative), fmt(G.measure_route), fmt(G.finite_difference),
                    fmt(std::fabs(G.finite_difference - G.derivative)), fmt(std::fabs(G.measure_route - G.derivative))});
  O.summary = {{"derivative", G.derivative}, {"measure_route", G.measure_route}, {"measure_stderr", G.measure_stderr},
               {"h", G.h}, {"chi_plus", G.chi_plus}, {"chi_minus", G.chi_minus}, {"finite_difference", G.finite_difference}};
  O.headline = fmt(G.derivative);
  return O;
}

Output cmd_fs_envelope(const Params& P) {
  LocalMetric phi = LocalMetric::fs_hermitian({{1, 0}, {0, 1}});
  LocalTestFunction f;
  if (P.has("test")) {
    auto fam = test_family_from_json(P.json("test"));
    auto it = fam.local.find("inf");
    if (it == fam.local.end()) throw Error("fs-envelope needs a test function at inf");
    f = it->second;
  } else {
    f = LocalTestFunction::callable([](CPoint z) { double t = std::log(std::abs(z)); return 0.5 * std::exp(-t * t); }, 0.0, 0.5);
  }
  int N = static_cast<int>(P.integer("N", 16));
  VerificationGrid g = P.has("grid") ? parse_grid(P.str("grid")) : VerificationGrid{64, 17, 2.0};
  auto pts = fs_envelope(phi, f, g.log_radii(), N);
  Output O;
  O.header = {"t", "n", "f", "f_n"};
  double violation = 0, gap = 0;
  for (const auto& p : pts) {
    for (std::size_t n = 0; n < p.fn.size(); ++n) {
      O.rows.push_back({fmt(p.t), std::to_string(n), fmt(p.f), fmt(p.fn[n])});
      if (n > 0) violation = std::max(violation, p.fn[n - 1] - p.fn[n]);
      violation = std::max(violation, p.fn[n] - p.f);
    }
    gap = std::max(gap, p.f - p.fn.back());
  }
  O.summary = {{"n_max", N}, {"points", pts.size()}, {"max_violation", violation}, {"final_gap", gap}};
  return O;
}

PlacePredicate omega_of(const Params& P) {
  auto ids = P.list("places");
  return ids.empty() ? PlacePredicate{} : places_in(ids);
}

Output cmd_equidistribute(const Params& P) {
  Endomorphism f = map_of(P);
  if (!P.has("target")) throw Error("missing --target");
  Rational target = parse_rational(P.str("target"));
  int N = static_cast<int>(P.integer("N", 10));
  GenericSequence S = small_sequence_generate(f, target, N);
  MetricFamily phi = canonical_metric_family(f, P.num("tol", 1e-12));
  std::vector<NamedTest> bank;
  if (P.has("test")) bank.push_back({"custom", test_family_from_json(P.json("test"))});
  else bank = lipschitz_test_bank();
  ConvergenceReport R = convergence_report(S, phi, bank, omega_of(P), measure_options(P));
  Output O;
  O.header = {"n", "f_id", "delta_n", "delta_x", "gap", "height"};
  for (const auto& r : R.rows)
    O.rows.push_back({std::to_string(r.n), r.f_id, fmt(r.delta_n), fmt(r.delta_x), fmt(r.gap), fmt(r.height)});
  Json pts = Json::array();
  for (const auto& Y : S.points) pts.push_back(Y.degree());
  O.summary = {{"report", to_json(R)}, {"degrees", pts}, {"generic", S.generic}, {"descriptor", S.descriptor}};
  return O;
}

Output cmd_ess_min(const Params& P) {
  EssMinOptions opt;
  opt.degree_bound = static_cast<int>(P.integer("N", opt.degree_bound));
  opt.height_budget = static_cast<int>(P.integer("budget", opt.height_budget));
  MetricFamily phi = P.has("family") ? family_of(P) : family_of(P, true);
  opt.nonnegative = !P.has("family");
  if (P.has("family") && P.has("curve")) throw Error("give the curve inside --family");
  EssentialMinimum E = essential_minimum_estimate(phi, opt);
  Output O;
  O.header = {"lower", "upper", "witness", "candidates"};
  O.rows.push_back({fmt(E.lower), fmt(E.upper), E.witness, std::to_string(E.candidates)});
  O.summary = {{"lower", E.lower}, {"upper", E.upper}, {"witness", E.witness}, {"candidates", E.candidates}};
  O.headline = "[" + fmt(E.lower) + ", " + fmt(E.upper) + "]";
  return O;
}

Output cmd_rn_check(const Params& P) {
  std::string which = P.str("case", "all");
  double tol = P.num("tol", 1e-12);
  struct Case {
    std::string name;
    std::function<RadonNikodymReport()> run;
  };
  std::vector<Case> cases = {
      {"one",
       [&] {
         TestFunctionFamily p;
         p.local["inf"] = LocalTestFunction::constant(1);
         p.local["2"] = LocalTestFunction::constant(1);
         return radon_nikodym_check(p, MeasureFamily(), {}, tol);
       }},
      {"bump",
       [&] {
         MeasureFamily eta(AdelicCurve::rationals(), LocalMeasure(), {{"inf", LocalMeasure::circles({{1.0, 1.0}})}});
         TestFunctionFamily p;
         p.local["inf"] = LocalTestFunction::toric(Profile({-0.5, 0, 0.5}, {1, 1.5, 1}));
         return radon_nikodym_check(p, eta, {}, tol);
       }},
      {"null",
       [&] {
         MeasureFamily eta(AdelicCurve::weighted_copies({1.0, 0.0}), LocalMeasure::circles({{1.0, 1.0}}));
         TestFunctionFamily p;
         p.local["c1"] = LocalTestFunction::constant(3);
         return radon_nikodym_check(p, eta, {}, tol);
       }},
  };
  Output O;
  O.header = {"case", "integral", "pass", "failing_places"};
  Json rows = Json::array();
  bool found = false;
  for (const auto& c : cases) {
    if (which != "all" && which != c.name) continue;
    found = true;
    RadonNikodymReport R = c.run();
    std::string fail;
    for (const auto& id : R.failing_places) fail += (fail.empty() ? "" : " ") + id;
    O.rows.push_back({c.name, fmt(R.integral), R.pass ? "true" : "false", fail});
    rows.push_back({{"case", c.name}, {"integral", R.integral}, {"pass", R.pass}, {"failing_places", R.failing_places}});
  }
  if (!found) throw Error("unknown case: " + which + " (one, bump, null, all)");
  O.summary = {{"cases", rows}};
  return O;
}

const std::map<std::string, std::function<Output(const Params&)>>& commands() {
  static const std::map<std::string, std::function<Output(const Params&)>> m = {
      {"product-formula", cmd_product_formula}, {"canonical-height", cmd_canonical_height},
      {"tate-iterate", cmd_tate_iterate},       {"chi-volume", cmd_chi_volume},
      {"concave-transform", cmd_concave_transform}, {"gateaux-check", cmd_gateaux_check},
      {"fs-envelope", cmd_fs_envelope},         {"equidistribute", cmd_equidistribute},
      {"ess-min", cmd_ess_min},                 {"rn-check", cmd_rn_check},
  };
  return m;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream o(path);
  if (!o) throw Error("cannot write " + path);
  o << text;
}

}  // namespace

std::vector<std::string> cli_commands() {
  std::vector<std::string> out;
  for (const auto& [k, v] : commands()) out.push_back(k);
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::string command = args.empty() ? "" : args.front();
  auto fail = [&](const std::string& msg) {
    err << Json{{"error", msg}, {"command", command}}.dump() << "\n";
    return 2;
  };
  if (command.empty() || command == "--help" || command == "-h") {
    std::string list;
    for (const auto& c : cli_commands()) list += (list.empty() ? "" : ", ") + c;
    if (command.empty()) return fail("missing command; one of " + list);
    out << "usage: adelic <command> [--flag value ...] [--config file.json] [--json]\ncommands: " << list << "\n";
    return 0;
  }
  auto it = commands().find(command);
  if (it == commands().end()) return fail("unknown command: " + command);

  CLI::App app{"adelic " + command};
  std::map<std::string, std::string> values;
  for (const auto& k : kFlags) app.add_option("--" + k, values[k]);
  std::string config;
  bool as_json = false;
  app.add_option("--config", config);
  app.add_flag("--json", as_json);
  std::vector<std::string> rest(args.begin() + 1, args.end());
  std::reverse(rest.begin(), rest.end());
  try {
    app.parse(rest);
  } catch (const CLI::ParseError& e) {
    return fail(e.what());
  }

  try {
    Params P;
    if (!config.empty()) {
      std::ifstream in(config);
      if (!in) throw Error("cannot open " + config);
      P.cfg = Json::parse(in);
      if (!P.cfg.is_object()) throw Error("config must be a JSON object");
      for (const auto& [k, v] : P.cfg.items())
        if (std::find(kFlags.begin(), kFlags.end(), k) == kFlags.end() && k != "command")
          throw Error("unknown config key: " + k);
      if (P.cfg.contains("command") && P.cfg.at("command") != command)
        throw Error("config is for command " + P.cfg.at("command").dump());
    }
    for (const auto& k : kFlags)
      if (app.count("--" + k)) P.flags[k] = values[k];
    if (!(P.num("tol", 1) > 0)) throw Error("--tol must be positive");
    if (P.integer("N", 1) < 1) throw Error("--N must be positive");
    if (P.integer("budget", 1) < 1) throw Error("--budget must be positive");

    Output O = it->second(P);
    O.summary["command"] = command;
    if (P.has("out")) {
      std::string base = P.str("out");
      write_file(base + ".csv", O.csv());
      write_file(base + ".json", O.summary.dump(2) + "\n");
    }
    if (as_json) out << O.summary.dump(2) << "\n";
    else if (!O.headline.empty()) out << O.headline << "\n";
    else out << O.csv();
    return 0;
  } catch (const Json::exception& e) {
    return fail(std::string("invalid JSON: ") + e.what());
  } catch (const std::exception& e) {
    return fail(e.what());
  }
}

}  // namespace adelic
