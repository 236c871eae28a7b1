#pragma once

// JSON file formats.
//
//   family:      {"domain_size": N, "functions": ["++-", ...]}
//   algorithm:   {"picture": "phase"|"bitflip", "domain_size": N,
//                 "workspace": W, "k": k, "initial": [[re,im],...],
//                 "unitaries": [[[re,im],...] row-major, one per V_i]}
//   measurement: {"outcomes": [[vector, ...], ...]}, vector = [[re,im],...]
//   polynomial:  {"domain_size": N, "degree_cap": k,
//                 "coefficients": [{"subset": [x,...], "re": a, "im": b}]}
//
// Loaders validate through the same constructors the library uses, so
// unitarity and orthonormality are checked at the library tolerances.

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "qql/errors.hpp"
#include "qql/oracle.hpp"
#include "qql/polynomial.hpp"
#include "qql/simulator.hpp"

namespace qql::io {

using Json = nlohmann::json;

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw ValidationError("'" + path + "' is not valid JSON: " + e.what());
  }
}

inline void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

namespace detail {

template <class T>
T required(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw ValidationError(std::string("missing field '") + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("field '") + key + "' has the wrong type: " + e.what());
  }
}

inline Complex complex_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ValidationError("complex numbers are [re, im] pairs");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

inline Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

inline Vector vector_from_json(const Json& j) {
  if (!j.is_array()) throw ValidationError("vectors are arrays of [re, im] pairs");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = complex_from_json(j[i]);
  return v;
}

inline Json vector_to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v(i)));
  return out;
}

}  // namespace detail

inline Json to_json(const FunctionFamily& fam) {
  Json fs = Json::array();
  for (const auto& f : fam) fs.push_back(f.to_signs());
  return {{"domain_size", fam.domain_size()}, {"functions", fs}};
}

inline FunctionFamily family_from_json(const Json& j) {
  const int n = detail::required<int>(j, "domain_size");
  const auto strings = detail::required<std::vector<std::string>>(j, "functions");
  std::vector<BooleanFunction> fs;
  fs.reserve(strings.size());
  for (const auto& s : strings) {
    if (static_cast<int>(s.size()) != n) {
      throw ValidationError("function '" + s + "' has length " + std::to_string(s.size()) +
                            ", domain size is " + std::to_string(n));
    }
    fs.push_back(BooleanFunction::from_signs(s));
  }
  return FunctionFamily(n, std::move(fs));
}

inline FunctionFamily load_family(const std::string& path) { return family_from_json(read_json_file(path)); }

inline Json to_json(const Algorithm& alg) {
  Json us = Json::array();
  for (const auto& u : alg.unitaries()) {
    const Matrix m = u.to_dense();
    Json flat = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) flat.push_back(detail::complex_to_json(m(r, c)));
    }
    us.push_back(std::move(flat));
  }
  return {{"picture", to_string(alg.basis().picture)},
          {"domain_size", alg.basis().domain_size},
          {"workspace", alg.basis().workspace},
          {"k", alg.k()},
          {"initial", detail::vector_to_json(alg.initial())},
          {"unitaries", us}};
}

inline Algorithm algorithm_from_json(const Json& j) {
  const Basis basis(picture_from_string(detail::required<std::string>(j, "picture")),
                    detail::required<int>(j, "domain_size"), detail::required<int>(j, "workspace"));
  const int k = detail::required<int>(j, "k");
  if (!j.contains("initial")) throw ValidationError("missing field 'initial'");
  if (!j.contains("unitaries") || !j["unitaries"].is_array()) throw ValidationError("missing field 'unitaries'");
  const Json& us = j["unitaries"];
  if (static_cast<int>(us.size()) != k) {
    throw ValidationError("k = " + std::to_string(k) + " but " + std::to_string(us.size()) + " unitaries given");
  }
  const auto d = static_cast<Eigen::Index>(basis.dim());
  std::vector<Unitary> unitaries;
  for (const auto& flat : us) {
    if (!flat.is_array() || static_cast<Eigen::Index>(flat.size()) != d * d) {
      throw ValidationError("each unitary needs dim^2 = " + std::to_string(d * d) + " row-major entries");
    }
    Matrix m(d, d);
    for (Eigen::Index r = 0; r < d; ++r) {
      for (Eigen::Index c = 0; c < d; ++c) {
        m(r, c) = detail::complex_from_json(flat[static_cast<std::size_t>(r * d + c)]);
      }
    }
    unitaries.push_back(Unitary::dense(std::move(m)));
  }
  return Algorithm(basis, detail::vector_from_json(j["initial"]), std::move(unitaries));
}

inline Algorithm load_algorithm(const std::string& path) { return algorithm_from_json(read_json_file(path)); }

inline Json to_json(const Measurement& m) {
  Json outcomes = Json::array();
  for (std::size_t l = 0; l < m.outcome_count(); ++l) {
    Json vs = Json::array();
    for (auto i : m.members(l)) vs.push_back(detail::vector_to_json(m.basis_vector(i)));
    outcomes.push_back(std::move(vs));
  }
  return {{"outcomes", outcomes}};
}

inline Measurement measurement_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("outcomes") || !j["outcomes"].is_array()) {
    throw ValidationError("missing field 'outcomes'");
  }
  std::vector<std::vector<Vector>> outcomes;
  std::size_t dim = 0;
  bool have_dim = false;
  for (const auto& o : j["outcomes"]) {
    if (!o.is_array()) throw ValidationError("each outcome is a list of vectors");
    std::vector<Vector> vs;
    for (const auto& v : o) {
      vs.push_back(detail::vector_from_json(v));
      if (!have_dim) {
        dim = static_cast<std::size_t>(vs.back().size());
        have_dim = true;
      }
    }
    outcomes.push_back(std::move(vs));
  }
  if (!have_dim) throw ValidationError("measurement has no vectors");
  return Measurement(dim, outcomes);
}

inline Measurement load_measurement(const std::string& path) {
  return measurement_from_json(read_json_file(path));
}

inline Json to_json(const MultilinearPolynomial& q) {
  Json cs = Json::array();
  for (std::size_t r = 0; r < q.term_count(); ++r) {
    const Complex a = q.coefficients()[r];
    cs.push_back({{"subset", q.subset_at(r).elements()}, {"re", a.real()}, {"im", a.imag()}});
  }
  return {{"domain_size", q.domain_size()}, {"degree_cap", q.degree_cap()}, {"coefficients", cs}};
}

inline MultilinearPolynomial polynomial_from_json(const Json& j) {
  const int n = detail::required<int>(j, "domain_size");
  if (!j.contains("coefficients") || !j["coefficients"].is_array()) {
    throw ValidationError("missing field 'coefficients'");
  }
  int cap = 0;
  std::vector<std::pair<SubsetMask, Complex>> terms;
  for (const auto& c : j["coefficients"]) {
    const auto elems = detail::required<std::vector<int>>(c, "subset");
    for (int x : elems) {
      if (x < 1 || x > n) throw ValidationError("subset element " + std::to_string(x) + " outside 1..N");
    }
    const SubsetMask s = SubsetMask::from_elements(elems);
    const double re = c.contains("re") ? detail::required<double>(c, "re") : 0.0;
    const double im = c.contains("im") ? detail::required<double>(c, "im") : 0.0;
    cap = std::max(cap, s.size());
    terms.emplace_back(s, Complex(re, im));
  }
  if (j.contains("degree_cap")) {
    const int declared = detail::required<int>(j, "degree_cap");
    if (declared < cap) throw ValidationError("coefficient exceeds declared degree cap");
    cap = declared;
  }
  MultilinearPolynomial q(n, cap);
  for (const auto& [s, a] : terms) q.set_coefficient(s, a);
  return q;
}

}  // namespace qql::io
