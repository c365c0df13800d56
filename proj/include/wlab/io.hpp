#pragma once

#include "wlab/approx.hpp"
#include "wlab/decompose.hpp"
#include "wlab/whitney.hpp"

#include <json.hpp>

#include <string>

namespace wlab {

using Json = nlohmann::json;

// Parses text; syntax errors become InputError("<source>:<line>:<column>: ...").
Json parse_json(const std::string& text, const std::string& source = "<input>");
Json read_json_file(const std::string& path);

// Non-finite numbers are written as the strings "inf", "-inf", "nan".
Json number(double x);
double to_number(const Json& j, const std::string& where);

Json to_json(const Point& x);
Json to_json(const Vec& v);
Vec vec_from_json(const Json& j, const std::string& where);
Point point_from_json(const Json& j, const std::string& where);
Json to_json(const Mat& M);
Mat matrix_from_json(const Json& j, const std::string& where);

Json to_json(const Domain& dom);
// Accepts polytope, box, polygon, ball, cone_body, affine_image, union, intersection, sweep.
Domain domain_from_json(const Json& j, const std::string& where = "domain");

Json to_json(const DirectionSet& E);
// {"dirs": [[...], ...]} or {"axes": d}
DirectionSet dirset_from_json(const Json& j, const std::string& where = "dirs");

Json to_json(const PolySpaceBasis& basis);

Json to_json(const SampledFunction& f);
// dim is used when a random_poly spec omits "dim"
SampledFunction function_from_json(const Json& j, int dim = 0, const std::string& where = "function");

Json to_json(const ApproxResult& a);
Json to_json(const ModulusResult& m);

Json to_json(const DecompositionChain& ch);
DecompositionChain chain_from_json(const Json& j, const std::string& where = "chain");
Json to_json(const ChainReport& rep);

Json to_json(const ChainBound& b);
Json to_json(const WhitneyEstimate& est);
Json to_json(const Certificate& cert);

// printf %.17g, with inf / -inf / nan spelled out
std::string format_double(double x);

}  // namespace wlab
