#include "carnoq/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace carnoq {

namespace {

const Json& require(const Json& j, const char* field) {
  if (!j.is_object() || !j.contains(field)) {
    throw Error(Errc::schema, std::string("missing field \"") + field + "\"");
  }
  return j.at(field);
}

Vector number_array(const Json& j, const char* field) {
  const Json& arr = require(j, field);
  if (!arr.is_array()) throw Error(Errc::schema, std::string(field) + " must be an array");
  Vector out(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number()) throw Error(Errc::schema, std::string(field) + " must hold numbers");
    out[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
  }
  return out;
}

Json vector_json(const Vector& v) {
  Json arr = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

}  // namespace

Json to_json(const Matrix& m) {
  Json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  Json data = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  }
  j["data"] = std::move(data);
  return j;
}

Matrix matrix_from_json(const Json& j) {
  const auto rows = require(j, "rows").get<Eigen::Index>();
  const auto cols = require(j, "cols").get<Eigen::Index>();
  const Json& data = require(j, "data");
  if (rows < 0 || cols < 0 || !data.is_array() ||
      static_cast<Eigen::Index>(data.size()) != rows * cols) {
    throw Error(Errc::schema, "matrix data length does not match rows*cols");
  }
  Matrix m(rows, cols);
  std::size_t k = 0;
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      if (!data[k].is_number()) throw Error(Errc::schema, "matrix data must hold numbers");
      m(r, c) = data[k++].get<double>();
    }
  }
  return m;
}

Json to_json(const Vector& v) { return vector_json(v); }

Vector vector_from_json(const Json& j) {
  if (!j.is_array()) throw Error(Errc::schema, "expected an array of numbers");
  Vector out(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw Error(Errc::schema, "expected an array of numbers");
    out[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return out;
}

Json to_json(const StratifiedAlgebra2& g) {
  Json j;
  j["m"] = g.m;
  j["p"] = g.p;
  Json cs = Json::array();
  for (const SkewMatrix& c : g.C) cs.push_back(to_json(c.matrix()));
  j["C"] = std::move(cs);
  return j;
}

StratifiedAlgebra2 algebra_from_json(const Json& j, const Tolerances& tol) {
  const Json& cs = require(j, "C");
  if (!cs.is_array() || cs.empty()) throw Error(Errc::schema, "C must be a nonempty array");
  std::vector<Matrix> structure;
  for (const Json& c : cs) structure.push_back(matrix_from_json(c));
  StratifiedAlgebra2 g = new_algebra(structure, tol);
  if (j.contains("m") && j.at("m").get<Eigen::Index>() != g.m) {
    throw Error(Errc::schema, "declared m does not match the structure matrices");
  }
  if (j.contains("p") && j.at("p").get<Eigen::Index>() != g.p) {
    throw Error(Errc::schema, "declared p does not match the structure matrices");
  }
  return g;
}

Json to_json(const CarnotPoint& point) {
  Json j;
  j["x"] = vector_json(point.x);
  j["t"] = vector_json(point.t);
  return j;
}

CarnotPoint carnot_point_from_json(const Json& j) {
  return CarnotPoint{number_array(j, "x"), number_array(j, "t")};
}

Json to_json(const GeodesicIVP& ivp) {
  Json j;
  j["x0"] = vector_json(ivp.x0);
  j["t0"] = vector_json(ivp.t0);
  j["xi0"] = vector_json(ivp.xi0);
  j["tau0"] = vector_json(ivp.tau0);
  return j;
}

GeodesicIVP ivp_from_json(const Json& j) {
  return GeodesicIVP{number_array(j, "x0"), number_array(j, "t0"), number_array(j, "xi0"),
                     number_array(j, "tau0")};
}

Json to_json(const HelicalCR& h) {
  Json j;
  j["A"] = to_json(h.A.matrix());
  j["w"] = vector_json(h.w);
  return j;
}

HelicalCR helical_from_json(const Json& j, const Tolerances& tol) {
  return HelicalCR::create(SkewMatrix(matrix_from_json(require(j, "A")), tol),
                           number_array(j, "w"), tol);
}

Json to_json(const MarkedHelicalCR& mh) {
  Json j = to_json(mh.base);
  j["v"] = vector_json(mh.v);
  j["u0"] = vector_json(mh.u0);
  return j;
}

MarkedHelicalCR marked_from_json(const Json& j, const Tolerances& tol) {
  MarkedHelicalCR mh;
  mh.base = helical_from_json(j, tol);
  mh.v = number_array(j, "v");
  mh.u0 = number_array(j, "u0");
  if (mh.v.size() != 2 * mh.base.n || mh.u0.size() != mh.base.ambient_dim()) {
    throw Error(Errc::schema, "marking dimensions do not match the structure");
  }
  return mh;
}

Json to_json(const Q0Curve& c) {
  Json j;
  j["A"] = to_json(c.structure.A.matrix());
  j["v"] = vector_json(c.v);
  if (c.structure.p > 0) j["w"] = vector_json(c.structure.w);
  return j;
}

Q0Curve q0_from_json(const Json& j, const Tolerances& tol) {
  Vector w(0);
  if (j.contains("w")) w = number_array(j, "w");
  HelicalCR structure =
      HelicalCR::create(SkewMatrix(matrix_from_json(require(j, "A")), tol), std::move(w), tol);
  Q0Curve c{std::move(structure), number_array(j, "v")};
  if (c.v.size() != 2 * c.structure.n) {
    throw Error(Errc::schema, "v must match the horizontal dimension");
  }
  return c;
}

Json to_json(const Q1Curve& c) {
  Json j;
  j["A"] = to_json(c.structure.A.matrix());
  j["v"] = vector_json(c.v);
  j["v0"] = vector_json(c.v0);
  if (c.structure.p > 0) {
    j["w"] = vector_json(c.structure.w);
    j["w0"] = vector_json(c.w0);
  }
  return j;
}

Q1Curve q1_from_json(const Json& j, const Tolerances& tol) {
  Vector w(0), w0(0);
  if (j.contains("w")) w = number_array(j, "w");
  if (j.contains("w0")) w0 = number_array(j, "w0");
  if (w.size() != w0.size()) throw Error(Errc::schema, "w and w0 must have equal length");
  HelicalCR structure =
      HelicalCR::create(SkewMatrix(matrix_from_json(require(j, "A")), tol), std::move(w), tol);
  Q1Curve c{std::move(structure), number_array(j, "v"), number_array(j, "v0"), std::move(w0)};
  if (c.v.size() != 2 * c.structure.n || c.v0.size() != 2 * c.structure.n) {
    throw Error(Errc::schema, "v and v0 must match the horizontal dimension");
  }
  return c;
}

Json to_json(const CanonicalDecomposition& cd) {
  Json j;
  j["horizontal_dim"] = cd.horizontal_dim;
  j["vertical_dim"] = cd.vertical_dim;
  j["frequencies"] = cd.frequencies;
  j["amplitudes"] = cd.amplitudes;
  j["v"] = vector_json(cd.v);
  j["w"] = vector_json(cd.w);
  j["Q"] = to_json(cd.change_of_basis);
  j["degenerate_horizontal"] = cd.degenerate_horizontal;
  return j;
}

std::string format_double(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

Eigen::Index CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<Eigen::Index>(i);
  }
  return -1;
}

void write_csv(std::ostream& os, const std::vector<std::string>& header, const Matrix& data) {
  if (static_cast<Eigen::Index>(header.size()) != data.cols()) {
    throw Error(Errc::invalid_argument, "header length does not match column count");
  }
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) os << ',';
    os << header[i];
  }
  os << '\n';
  for (Eigen::Index r = 0; r < data.rows(); ++r) {
    for (Eigen::Index c = 0; c < data.cols(); ++c) {
      if (c) os << ',';
      os << format_double(data(r, c));
    }
    os << '\n';
  }
}

CsvTable read_csv(std::istream& is) {
  CsvTable table;
  std::string line;
  if (!std::getline(is, line)) throw Error(Errc::schema, "empty CSV input");
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) table.header.push_back(cell);
  }
  std::vector<std::vector<double>> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw Error(Errc::schema, "CSV cell is not a number: " + cell);
      }
    }
    if (row.size() != table.header.size()) {
      throw Error(Errc::schema, "CSV row length does not match the header");
    }
    rows.push_back(std::move(row));
  }
  table.data.resize(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(table.header.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      table.data(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  }
  return table;
}

Json load_json_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(Errc::io, "cannot open " + path);
  try {
    return Json::parse(is);
  } catch (const Json::parse_error& e) {
    throw Error(Errc::schema, std::string("invalid JSON in ") + path + ": " + e.what());
  }
}

void save_json_file(const std::string& path, const Json& j) {
  std::ofstream os(path);
  if (!os) throw Error(Errc::io, "cannot open " + path + " for writing");
  os << j.dump(2) << '\n';
}

void save_text_file(const std::string& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw Error(Errc::io, "cannot open " + path + " for writing");
  os << text;
}

}  // namespace carnoq
