#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "curvlab/checks.hpp"

namespace curvlab {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Scalars
// ---------------------------------------------------------------------------

// Monomial keys: "" is the constant term, otherwise ring-ordered factors
// joined with "*", each "name" or "name^exp". Example: "l1^2*w13".
inline std::string monomial_key(const PolyRing& ring, const ExponentVec& e) {
  std::string key;
  for (size_t i = 0; i < e.size(); ++i) {
    if (e[i] == 0) continue;
    if (!key.empty()) key += "*";
    key += ring.name(i);
    if (e[i] > 1) key += "^" + std::to_string(e[i]);
  }
  return key;
}

inline ExponentVec parse_monomial_key(const RingPtr& ring, const std::string& key) {
  ExponentVec e(ring->size(), 0);
  if (key.empty()) return e;
  std::stringstream ss(key);
  std::string factor;
  while (std::getline(ss, factor, '*')) {
    std::string name = factor;
    uint32_t exp = 1;
    const auto caret = factor.find('^');
    if (caret != std::string::npos) {
      name = factor.substr(0, caret);
      try {
        exp = static_cast<uint32_t>(std::stoul(factor.substr(caret + 1)));
      } catch (const std::exception&) {
        throw UsageError("bad exponent in monomial '" + key + "'");
      }
    }
    const int idx = ring->index_of(name);
    if (idx < 0) throw UsageError("unknown variable '" + name + "' in monomial '" + key + "'");
    e[static_cast<size_t>(idx)] += exp;
  }
  return e;
}

inline Json scalar_to_json(const Scalar& s) {
  switch (s.kind()) {
    case ScalarKind::rational:
      return Json(s.rat().str());
    case ScalarKind::float64:
      return Json(s.flt());
    case ScalarKind::polynomial: {
      Json obj = Json::object();
      const Polynomial& p = s.poly();
      for (const auto& [e, c] : p.terms()) obj[monomial_key(*p.ring(), e)] = c.str();
      return obj;
    }
  }
  return {};
}

inline Scalar scalar_from_json(const Json& j, ScalarKind kind, const RingPtr& ring,
                               const std::string& where) {
  switch (kind) {
    case ScalarKind::float64:
      if (!j.is_number()) throw UsageError(where + ": expected a number");
      return Scalar(j.get<double>());
    case ScalarKind::rational:
      if (j.is_number_integer()) return Scalar(Rational(j.get<long>()));
      if (j.is_string()) return Scalar(Rational::parse(j.get<std::string>()));
      throw UsageError(where + ": expected a rational string such as \"2/3\"");
    case ScalarKind::polynomial: {
      if (!ring) throw UsageError(where + ": polynomial entries need a variable list");
      if (j.is_number_integer())
        return Scalar(Polynomial::constant(ring, Rational(j.get<long>())));
      if (j.is_string())
        return Scalar(Polynomial::constant(ring, Rational::parse(j.get<std::string>())));
      if (j.is_object()) {
        Polynomial p(ring);
        for (const auto& [key, coeff] : j.items()) {
          Rational c = coeff.is_number_integer()
                           ? Rational(coeff.template get<long>())
                           : Rational::parse(coeff.template get<std::string>());
          p += Polynomial::monomial(ring, parse_monomial_key(ring, key), c);
        }
        return Scalar(p);
      }
      throw UsageError(where + ": expected a {monomial: coefficient} object");
    }
  }
  throw UsageError(where + ": unsupported scalar");
}

// ---------------------------------------------------------------------------
// Point models: {"dim": n, "scalars": "rational"|"poly"|"float",
//                "variables": [...], "h": [[..]], "S": [[..]], "omega": [[..]]}
// ---------------------------------------------------------------------------

inline Matrix matrix_from_json(const Json& j, size_t dim, ScalarKind kind,
                               const RingPtr& ring, const std::string& field) {
  if (!j.is_array() || j.size() != dim)
    throw UsageError(field + ": expected " + std::to_string(dim) + " rows");
  Matrix m(dim, dim,
           kind == ScalarKind::float64 ? Scalar(0.0) : Scalar(Rational(0)));
  for (size_t i = 0; i < dim; ++i) {
    const Json& row = j[i];
    if (!row.is_array() || row.size() != dim)
      throw UsageError(field + "[" + std::to_string(i) + "]: expected " +
                       std::to_string(dim) + " entries");
    for (size_t col = 0; col < dim; ++col)
      m.at(i, col) = scalar_from_json(
          row[col], kind, ring,
          field + "[" + std::to_string(i) + "][" + std::to_string(col) + "]");
  }
  return m;
}

inline Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (size_t i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (size_t j = 0; j < m.cols(); ++j) row.push_back(scalar_to_json(m.at(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline PointModel model_from_json(const Json& j, double tol = kDefaultTol) {
  if (!j.is_object()) throw UsageError("model: expected a JSON object");
  for (const char* field : {"dim", "scalars", "h", "S", "omega"})
    if (!j.contains(field)) throw UsageError(std::string("model: missing '") + field + "'");
  const size_t dim = j.at("dim").get<size_t>();
  const std::string kind_name = j.at("scalars").get<std::string>();
  ScalarKind kind;
  if (kind_name == "rational")
    kind = ScalarKind::rational;
  else if (kind_name == "poly")
    kind = ScalarKind::polynomial;
  else if (kind_name == "float")
    kind = ScalarKind::float64;
  else
    throw UsageError("model.scalars: expected rational|poly|float");
  RingPtr ring;
  if (j.contains("variables")) {
    std::vector<std::string> names;
    for (const auto& v : j.at("variables")) names.push_back(v.get<std::string>());
    ring = make_ring(std::move(names));
  }
  if (kind == ScalarKind::polynomial && !ring)
    throw UsageError("model.variables: required when scalars = poly");
  return make_point_model(dim, matrix_from_json(j.at("h"), dim, kind, ring, "model.h"),
                          matrix_from_json(j.at("S"), dim, kind, ring, "model.S"),
                          matrix_from_json(j.at("omega"), dim, kind, ring, "model.omega"),
                          tol);
}

inline Json model_to_json(const PointModel& m) {
  Json j = Json::object();
  j["dim"] = m.dim;
  j["scalars"] = m.kind == ScalarKind::float64
                     ? "float"
                     : (m.kind == ScalarKind::polynomial ? "poly" : "rational");
  if (m.ring) {
    Json vars = Json::array();
    for (const auto& name : m.ring->names()) vars.push_back(name);
    j["variables"] = std::move(vars);
  }
  j["h"] = matrix_to_json(m.h);
  j["S"] = matrix_to_json(m.S);
  j["omega"] = matrix_to_json(m.omega);
  return j;
}

// ---------------------------------------------------------------------------
// Jet specs: {"dim": n, "order": d, "seed": s,
//             "gamma": {"k,i,j": poly}, "field": {"c1,...,cp": poly}}
// Indices are 1-based. A gamma entry whose mirrored key is absent is
// symmetrized automatically; giving both keys different values is the way to
// (deliberately) inject torsion.
// ---------------------------------------------------------------------------

inline std::vector<size_t> parse_index_key(const std::string& key, size_t dim,
                                           const std::string& where) {
  std::vector<size_t> idx;
  std::stringstream ss(key);
  std::string part;
  while (std::getline(ss, part, ',')) {
    size_t v = 0;
    try {
      v = std::stoul(part);
    } catch (const std::exception&) {
      throw UsageError(where + ": bad index '" + key + "'");
    }
    if (v < 1 || v > dim) throw UsageError(where + ": index out of range in '" + key + "'");
    idx.push_back(v - 1);
  }
  if (idx.empty()) throw UsageError(where + ": empty index key");
  return idx;
}

inline JetModel jet_from_json(const Json& j) {
  if (!j.is_object()) throw UsageError("jet: expected a JSON object");
  for (const char* field : {"dim", "order"})
    if (!j.contains(field)) throw UsageError(std::string("jet: missing '") + field + "'");
  const size_t dim = j.at("dim").get<size_t>();
  const unsigned order = j.at("order").get<unsigned>();
  const uint64_t seed = j.value("seed", uint64_t{0});
  const RingPtr ring = JetModel::coordinate_ring(dim);

  std::vector<Polynomial> gamma(dim * dim * dim, Polynomial(ring));
  std::vector<bool> given(dim * dim * dim, false);
  if (j.contains("gamma")) {
    for (const auto& [key, val] : j.at("gamma").items()) {
      const auto idx = parse_index_key(key, dim, "jet.gamma");
      if (idx.size() != 3) throw UsageError("jet.gamma: keys must be 'k,i,j'");
      const size_t flat = (idx[0] * dim + idx[1]) * dim + idx[2];
      gamma[flat] =
          scalar_from_json(val, ScalarKind::polynomial, ring, "jet.gamma[" + key + "]")
              .poly();
      given[flat] = true;
    }
    // symmetric completion for entries given in one order only
    for (size_t k = 0; k < dim; ++k)
      for (size_t a = 0; a < dim; ++a)
        for (size_t b = 0; b < dim; ++b) {
          const size_t fwd = (k * dim + a) * dim + b, rev = (k * dim + b) * dim + a;
          if (given[fwd] && !given[rev]) gamma[rev] = gamma[fwd];
        }
  }

  size_t arity = 0;
  std::map<std::string, Json> field_entries;
  if (j.contains("field")) {
    for (const auto& [key, val] : j.at("field").items()) {
      const auto idx = parse_index_key(key, dim, "jet.field");
      if (arity == 0) arity = idx.size();
      if (idx.size() != arity)
        throw UsageError("jet.field: inconsistent index arity in '" + key + "'");
      field_entries[key] = val;
    }
  }
  if (arity == 0) throw UsageError("jet.field: at least one component required");
  std::vector<Polynomial> field(JetModel::pow_size(dim, arity), Polynomial(ring));
  for (const auto& [key, val] : field_entries) {
    const auto idx = parse_index_key(key, dim, "jet.field");
    size_t flat = 0;
    for (size_t v : idx) flat = flat * dim + v;
    field[flat] =
        scalar_from_json(val, ScalarKind::polynomial, ring, "jet.field[" + key + "]")
            .poly();
  }
  return JetModel(dim, order, std::move(gamma), arity, std::move(field), seed);
}

// ---------------------------------------------------------------------------
// Sweep specs
// ---------------------------------------------------------------------------

inline GridRange grid_from_json(const Json& j, const std::string& where) {
  GridRange g;
  if (j.is_array() && j.size() == 3) {
    g.lo = j[0].get<double>();
    g.hi = j[1].get<double>();
    g.step = j[2].get<double>();
    return g;
  }
  if (j.is_object()) {
    g.lo = j.value("min", 0.0);
    g.hi = j.value("max", 0.0);
    g.step = j.value("step", 1.0);
    return g;
  }
  throw UsageError(where + ": expected [min, max, step] or {min, max, step}");
}

inline SweepSpec sweep_from_json(const Json& j) {
  if (!j.is_object()) throw UsageError("sweep: expected a JSON object");
  SweepSpec spec;
  if (j.contains("lambda1")) spec.lambda1 = grid_from_json(j.at("lambda1"), "sweep.lambda1");
  if (j.contains("lambda2")) spec.lambda2 = grid_from_json(j.at("lambda2"), "sweep.lambda2");
  if (j.contains("gamma")) spec.gamma = grid_from_json(j.at("gamma"), "sweep.gamma");
  if (j.contains("lambda34"))
    spec.lambda34 = grid_from_json(j.at("lambda34"), "sweep.lambda34");
  if (j.contains("signs")) {
    spec.signs.clear();
    for (const auto& s : j.at("signs")) spec.signs.push_back(s.get<int>());
    for (int s : spec.signs)
      if (s != 1 && s != -1) throw UsageError("sweep.signs: entries must be 1 or -1");
  }
  spec.k_max = j.value("k_max", spec.k_max);
  spec.tolerance = j.value("tolerance", spec.tolerance);
  spec.seed = j.value("seed", spec.seed);
  spec.random_tuples = j.value("random_tuples", spec.random_tuples);
  if (j.contains("omega")) {
    const Json& w = j.at("omega");
    spec.omega_samples = w.value("samples", spec.omega_samples);
    spec.omega_lo = w.value("min", spec.omega_lo);
    spec.omega_hi = w.value("max", spec.omega_hi);
  }
  if (j.contains("forms")) {
    spec.block_form = false;
    spec.diagonal_form = false;
    for (const auto& f : j.at("forms")) {
      const std::string name = f.get<std::string>();
      if (name == "block")
        spec.block_form = true;
      else if (name == "diagonal")
        spec.diagonal_form = true;
      else
        throw UsageError("sweep.forms: expected 'block' or 'diagonal'");
    }
  }
  return spec;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

inline Json report_to_json(const LemmaReport& rep, bool with_timing) {
  Json j = Json::object();
  j["lemma"] = rep.lemma;
  Json params = Json::object();
  for (const auto& [k, v] : rep.params) params[k] = v;
  j["params"] = std::move(params);
  j["mode"] = rep.mode;
  j["verdict"] = rep.pass ? "pass" : "fail";
  Json rs = Json::array();
  for (const auto& r : rep.residuals) {
    Json one = Json::object();
    one["desc"] = r.desc;
    one["value"] = r.value;
    one["zero"] = r.zero;
    rs.push_back(std::move(one));
  }
  j["residuals"] = std::move(rs);
  if (!rep.notes.empty()) j["notes"] = rep.notes;
  j["ms"] = with_timing ? rep.ms : 0;
  return j;
}

inline Json reports_to_json(const std::vector<LemmaReport>& reports, bool with_timing) {
  Json arr = Json::array();
  for (const auto& r : reports) arr.push_back(report_to_json(r, with_timing));
  return arr;
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const std::exception& e) {
    throw UsageError("malformed JSON in '" + path + "': " + e.what());
  }
}

inline void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write '" + path + "'");
  out << j.dump(2) << "\n";
}

}  // namespace curvlab
