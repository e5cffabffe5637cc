#include "adelic/json_io.hpp"

#include <sstream>

namespace adelic {

namespace {

double number_from_json(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return parse_rational(j.get<std::string>()).get_d();
  throw Error("expected a number");
}

std::vector<Rational> coeffs_from_json(const Json& j) {
  if (!j.is_array()) throw Error("coefficients must be a JSON array");
  std::vector<Rational> c;
  for (const auto& e : j) c.push_back(rational_from_json(e));
  return c;
}

Json coeffs_to_json(const QPoly& p) {
  Json a = Json::array();
  for (const auto& c : p.coeffs()) a.push_back(to_json(c));
  if (a.empty()) a.push_back("0");
  return a;
}

}  // namespace

Json to_json(const Rational& q) { return to_string(q); }

Rational rational_from_json(const Json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(Integer(std::to_string(j.get<long long>())));
  if (j.is_number()) return parse_rational(j.dump());
  throw Error("expected a rational \"num/den\"");
}

Json to_json(const AdelicCurve& C) {
  switch (C.base()) {
    case BaseKind::Q: return {{"base", "Q"}};
    case BaseKind::FqT: return {{"base", "FqT"}, {"q", C.q()}};
    case BaseKind::Copies: return {{"base", "copies"}, {"weights", C.copy_weights()}};
  }
  return {};
}

AdelicCurve curve_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("base")) throw Error("curve needs a \"base\" field");
  std::string b = j.at("base").get<std::string>();
  if (b == "Q") return AdelicCurve::rationals();
  if (b == "FqT") {
    if (!j.contains("q")) throw Error("FqT curve needs \"q\"");
    return AdelicCurve::function_field(j.at("q").get<std::uint32_t>());
  }
  if (b == "copies") {
    if (!j.contains("weights")) throw Error("copies curve needs \"weights\"");
    std::vector<double> w;
    for (const auto& e : j.at("weights")) w.push_back(number_from_json(e));
    return AdelicCurve::weighted_copies(w);
  }
  throw Error("unknown curve base: " + b);
}

AdelicCurve parse_curve(const std::string& text) {
  if (text.empty() || text == "Q") return AdelicCurve::rationals();
  if (text.front() == '{') return curve_from_json(Json::parse(text));
  auto colon = text.find(':');
  std::string head = text.substr(0, colon), rest = colon == std::string::npos ? "" : text.substr(colon + 1);
  if (head == "FqT") return AdelicCurve::function_field(static_cast<std::uint32_t>(std::stoul(rest)));
  if (head == "copies") {
    std::vector<double> w;
    std::stringstream ss(rest);
    std::string tok;
    while (std::getline(ss, tok, ',')) w.push_back(parse_rational(tok).get_d());
    return AdelicCurve::weighted_copies(w);
  }
  throw Error("unknown curve: " + text);
}

Json to_json(const Roof& r) {
  Json a = Json::array();
  for (std::size_t i = 0; i < r.breakpoints().size(); ++i) a.push_back({to_json(r.breakpoints()[i]), r.values()[i]});
  return a;
}

Roof roof_from_json(const Json& j) {
  if (j.is_number() || j.is_string()) return Roof::constant(number_from_json(j));
  if (!j.is_array()) throw Error("roof must be a list of [breakpoint, value] pairs");
  std::vector<Rational> x;
  std::vector<double> y;
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 2) throw Error("roof entries are [\"num/den\", value]");
    x.push_back(rational_from_json(e[0]));
    y.push_back(number_from_json(e[1]));
  }
  return Roof(x, y);
}

Json to_json(const Endomorphism& f) {
  return {{"num", coeffs_to_json(f.numerator())}, {"den", coeffs_to_json(f.denominator())}, {"alpha", to_json(f.alpha())}};
}

Endomorphism endomorphism_from_json(const Json& j) {
  if (j.is_string()) return Endomorphism::parse(j.get<std::string>());
  if (!j.is_object() || !j.contains("num")) throw Error("endomorphism needs \"num\"");
  QPoly num(coeffs_from_json(j.at("num")));
  QPoly den = j.contains("den") ? QPoly(coeffs_from_json(j.at("den"))) : QPoly::constant(1);
  Rational alpha = j.contains("alpha") ? rational_from_json(j.at("alpha")) : Rational(1);
  return Endomorphism(num, den, alpha);
}

Json to_json(const MetricFamily& phi) {
  if (!phi.toric()) throw Error("only toric families serialize");
  Json roofs = Json::object();
  for (const auto& w : phi.listed_places()) roofs[w.id] = to_json(phi.at(w.id).roof());
  return {{"curve", to_json(phi.curve())}, {"level", phi.level()}, {"roofs", roofs}};
}

MetricFamily family_from_json(const Json& j) {
  if (!j.is_object()) throw Error("family must be a JSON object");
  AdelicCurve C = j.contains("curve") ? curve_from_json(j.at("curve")) : AdelicCurve::rationals();
  int level = j.value("level", 1);
  std::map<std::string, Roof> roofs;
  if (j.contains("roofs"))
    for (const auto& [id, r] : j.at("roofs").items()) roofs.emplace(C.place(id).id, roof_from_json(r));
  return toric_family(C, level, roofs);
}

TestFunctionFamily test_family_from_json(const Json& j) {
  if (!j.is_object()) throw Error("test function family must be a JSON object");
  TestFunctionFamily f;
  for (const auto& [id, v] : j.items()) {
    if (v.is_number() || v.is_string()) {
      f.local[id] = LocalTestFunction::constant(number_from_json(v));
      continue;
    }
    if (!v.contains("t") || !v.contains("h")) throw Error("toric profiles need \"t\" and \"h\"");
    f.local[id] = LocalTestFunction::toric(Profile(v.at("t").get<std::vector<double>>(), v.at("h").get<std::vector<double>>()));
  }
  return f;
}

Json to_json(const MonteCarlo& m) {
  return {{"mean", m.mean}, {"stderr", m.stderr_}, {"budget", m.budget}, {"seed", m.seed}};
}

Json to_json(const LocalMeasure& mu) {
  Json atoms = Json::array();
  switch (mu.kind()) {
    case LocalMeasure::Kind::Circles:
      for (const auto& a : mu.circle_atoms()) atoms.push_back({{"radius", a.radius}, {"mass", a.mass}});
      return {{"kind", "circles"}, {"angles", mu.angles()}, {"atoms", atoms}};
    case LocalMeasure::Kind::Segments:
      for (const auto& a : mu.segment_atoms()) atoms.push_back({{"t", a.t}, {"mass", a.mass}});
      return {{"kind", "segments"}, {"atoms", atoms}};
    case LocalMeasure::Kind::Points:
      for (const auto& a : mu.point_atoms()) atoms.push_back({{"re", a.z.real()}, {"im", a.z.imag()}, {"mass", a.mass}});
      return {{"kind", "points"}, {"atoms", atoms}};
    case LocalMeasure::Kind::Sampler:
      return {{"kind", "sampler"}, {"mass", mu.total_mass()}, {"budget", mu.julia().budget()}, {"seed", mu.julia().seed()}};
  }
  return {};
}

Json to_json(const ConvergenceReport& r) {
  Json out = Json::array();
  for (std::size_t j = 0; j < r.f_ids.size(); ++j)
    out.push_back({{"seq", r.seq},
                   {"f_id", r.f_ids[j]},
                   {"gaps", r.gaps[j]},
                   {"heights", r.heights},
                   {"rate_constant", r.rate_constant[j]},
                   {"nonincreasing", static_cast<bool>(r.nonincreasing[j])}});
  return out;
}

VerificationGrid parse_grid(const std::string& text) {
  VerificationGrid g;
  if (text.empty()) return g;
  if (text.front() == '{') {
    Json j = Json::parse(text);
    g.n_angle = j.value("n_angle", g.n_angle);
    g.n_radius = j.value("n_radius", g.n_radius);
    g.log_radius = j.value("log_radius", g.log_radius);
  } else {
    std::stringstream ss(text);
    std::string a, b, c;
    std::getline(ss, a, ',');
    std::getline(ss, b, ',');
    std::getline(ss, c, ',');
    try {
      if (!a.empty()) g.n_angle = std::stoi(a);
      if (!b.empty()) g.n_radius = std::stoi(b);
      if (!c.empty()) g.log_radius = std::stod(c);
    } catch (const std::exception&) {
      throw Error("grid must look like \"64,64,4\"");
    }
  }
  g.validate();
  return g;
}

}  // namespace adelic
