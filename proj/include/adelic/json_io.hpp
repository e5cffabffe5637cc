#pragma once

// JSON encodings of curves, rationals, roofs, endomorphisms, metric and
// test-function families, Monte-Carlo reports and convergence reports.
//
//   curve        {"base":"Q"} | {"base":"FqT","q":3} | {"base":"copies","weights":[...]}
//   rational     "num/den"
//   roof         [["num/den", value], ...]
//   endomorphism {"num":[coeffs], "den":[coeffs], "alpha":"num/den"}, low degree first
//   family       {"curve":..., "level":m, "roofs":{"inf":roof, "2":roof}}
//   test family  {"inf":{"t":[...],"h":[...]}, "2":0.5}

#include <json.hpp>

#include "adelic/equidistribution.hpp"

namespace adelic {

using Json = nlohmann::json;

Json to_json(const Rational& q);
Rational rational_from_json(const Json& j);

Json to_json(const AdelicCurve& C);
AdelicCurve curve_from_json(const Json& j);
/// "Q", "FqT:3", "copies:0.5,1" or a JSON object.
AdelicCurve parse_curve(const std::string& text);

Json to_json(const Roof& r);
Roof roof_from_json(const Json& j);

Json to_json(const Endomorphism& f);
Endomorphism endomorphism_from_json(const Json& j);

/// Toric families only (every listed place carries a roof).
Json to_json(const MetricFamily& phi);
MetricFamily family_from_json(const Json& j);

TestFunctionFamily test_family_from_json(const Json& j);

Json to_json(const MonteCarlo& m);
Json to_json(const LocalMeasure& mu);

/// {"seq", "f_id", "gaps", "heights"} for every test function.
Json to_json(const ConvergenceReport& r);

/// "64,64,4" (angles, radii, log radius) or a JSON object with those keys.
VerificationGrid parse_grid(const std::string& text);

}  // namespace adelic
