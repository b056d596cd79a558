#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "idemkit/canonical.hpp"
#include "idemkit/distance.hpp"
#include "idemkit/gridop.hpp"
#include "idemkit/idempotent.hpp"
#include "idemkit/nrange.hpp"

namespace idemkit::io {

using nlohmann::json;

/// Round to 15 significant digits so serialized reports are byte-stable
/// across runs and platforms.
double jnum(double x);

json matrix_to_json(const Matrix& M);
Matrix matrix_from_json(const json& j);

json to_json(const idem::Idempotent& Q);
idem::Idempotent idempotent_from_json(const json& j, double idem_tol = -1.0);

json to_json(const grid::GridOperator& F);
grid::GridOperator grid_from_json(const json& j);

json to_json(const canon::CanonicalForm& cf);
canon::CanonicalForm canonical_from_json(const json& j);

json to_json(const dist::DistanceReport& r);
json to_json(const nr::EllipseParams& e);
json to_json(const nr::SupportProfile& p);
json to_json(const grid::UniversalReport& r);
json to_json(const nr::SrDiagnostics& d);

/// alpha,h,re,im rows, 15 significant digits.
void write_csv_profile(std::ostream& os, const nr::SupportProfile& p);

json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const json& j);

} // namespace idemkit::io
