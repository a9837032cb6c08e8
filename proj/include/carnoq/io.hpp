#pragma once

#include <json.hpp>
#include <iosfwd>
#include <string>
#include <vector>

#include "carnoq/carnot.hpp"
#include "carnoq/geodesic.hpp"
#include "carnoq/helical.hpp"

namespace carnoq {

using Json = nlohmann::json;

// Matrices serialize as {"rows": r, "cols": c, "data": [row-major]}.
Json to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);

Json to_json(const Vector& v);
Vector vector_from_json(const Json& j);

// {"m": m, "p": p, "C": [matrix, ...]}
Json to_json(const StratifiedAlgebra2& g);
StratifiedAlgebra2 algebra_from_json(const Json& j, const Tolerances& tol = default_tolerances());

// {"x": [...], "t": [...]}
Json to_json(const CarnotPoint& point);
CarnotPoint carnot_point_from_json(const Json& j);

// {"x0": [...], "t0": [...], "xi0": [...], "tau0": [...]}
Json to_json(const GeodesicIVP& ivp);
GeodesicIVP ivp_from_json(const Json& j);

// {"A": matrix, "w": [...]}
Json to_json(const HelicalCR& h);
HelicalCR helical_from_json(const Json& j, const Tolerances& tol = default_tolerances());

// {"A": matrix, "w": [...], "v": [...], "u0": [...]}
Json to_json(const MarkedHelicalCR& mh);
MarkedHelicalCR marked_from_json(const Json& j, const Tolerances& tol = default_tolerances());

// {"A": matrix, "v": [...]} plus "w"; Q1 adds "v0"/"w0". Vertical fields are
// absent when p = 0.
Json to_json(const Q0Curve& c);
Q0Curve q0_from_json(const Json& j, const Tolerances& tol = default_tolerances());
Json to_json(const Q1Curve& c);
Q1Curve q1_from_json(const Json& j, const Tolerances& tol = default_tolerances());

Json to_json(const CanonicalDecomposition& cd);

// Numbers print with 17 significant digits, '.' decimal, no locale.
std::string format_double(double value);

struct CsvTable {
  std::vector<std::string> header;
  Matrix data;

  Eigen::Index column(const std::string& name) const;  // -1 when absent
};

void write_csv(std::ostream& os, const std::vector<std::string>& header, const Matrix& data);
CsvTable read_csv(std::istream& is);

Json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const Json& j);
void save_text_file(const std::string& path, const std::string& text);

}  // namespace carnoq
