#pragma once

#include <json.hpp>
#include <string>

#include "riplab/groups.hpp"
#include "riplab/measurement.hpp"
#include "riplab/nets.hpp"
#include "riplab/rip.hpp"
#include "riplab/signal.hpp"
#include "riplab/sparsity.hpp"

namespace riplab {

using json = nlohmann::json;

// Complex vectors serialize as arrays of [re, im] pairs.

inline json toJson(const Eigen::VectorXcd& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back({v[i].real(), v[i].imag()});
  return out;
}

inline Eigen::VectorXcd complexVectorFromJson(const json& j) {
  Eigen::VectorXcd v(j.size());
  Index i = 0;
  for (const auto& p : j) {
    if (!p.is_array() || p.size() != 2)
      throw std::invalid_argument("complex vector: expected [re, im] pairs");
    v[i++] = cplx(p[0].get<double>(), p[1].get<double>());
  }
  return v;
}

inline json toJson(const SparsityModel& m) {
  switch (m.kind()) {
    case ModelKind::CanonicalL1:
      return {{"kind", "canonical_l1"}, {"n", m.baseDim()}};
    case ModelKind::AtomicPolytope: {
      json atoms = json::array();
      for (const auto& a : m.atoms()) atoms.push_back(toJson(a));
      return {{"kind", "atomic_polytope"}, {"atoms", atoms}};
    }
    case ModelKind::SchattenBall:
      return {{"kind", "schatten"}, {"n", m.baseDim()}, {"q", m.schattenQ()}};
    case ModelKind::TensorHull:
      return {{"kind", "tensor_hull"}, {"n", m.baseDim()}, {"d", m.order()}};
  }
  throw std::logic_error("toJson(model): unreachable");
}

inline SparsityModel modelFromJson(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "canonical_l1") return SparsityModel::canonicalL1(j.at("n").get<Index>());
  if (kind == "atomic_polytope") {
    std::vector<Eigen::VectorXcd> atoms;
    for (const auto& a : j.at("atoms")) atoms.push_back(complexVectorFromJson(a));
    return SparsityModel::atomicPolytope(std::move(atoms));
  }
  if (kind == "schatten")
    return SparsityModel::schattenBall(j.at("n").get<Index>(), j.at("q").get<double>());
  if (kind == "tensor_hull")
    return SparsityModel::tensorHull(j.at("n").get<Index>(), j.at("d").get<int>());
  throw std::invalid_argument("model: unknown kind '" + kind + "'");
}

inline json toJson(const GroupDescriptor& g) {
  switch (g.kind()) {
    case GroupKind::HeisenbergWeyl:
      return {{"kind", "heisenberg_weyl"}, {"n", g.param()}};
    case GroupKind::SignShift:
      return {{"kind", "sign_shift"}, {"n", g.param()}};
    case GroupKind::PauliTensor:
      return {{"kind", "pauli"}, {"qubits", g.qubits()}};
    case GroupKind::Product: {
      json factors = json::array();
      for (const auto& f : g.factors()) factors.push_back(toJson(f));
      return {{"kind", "product"}, {"factors", factors}};
    }
    case GroupKind::TwoSided:
      return {{"kind", "two_sided"}, {"base", toJson(g.base())}};
  }
  throw std::logic_error("toJson(group): unreachable");
}

inline GroupDescriptor groupFromJson(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "heisenberg_weyl") return GroupDescriptor::heisenbergWeyl(j.at("n").get<Index>());
  if (kind == "sign_shift") return GroupDescriptor::signShift(j.at("n").get<Index>());
  if (kind == "pauli") return GroupDescriptor::pauliTensor(j.at("qubits").get<int>());
  if (kind == "product") {
    std::vector<GroupDescriptor> factors;
    for (const auto& f : j.at("factors")) factors.push_back(groupFromJson(f));
    return GroupDescriptor::product(std::move(factors));
  }
  if (kind == "two_sided") return GroupDescriptor::twoSided(groupFromJson(j.at("base")));
  throw std::invalid_argument("group: unknown kind '" + kind + "'");
}

inline json toJson(const GroupElement& e) {
  json out = json::object();
  if (e.a != 0) out["a"] = e.a;
  if (e.b != 0) out["b"] = e.b;
  if (!e.signs.empty()) {
    json s = json::array();
    for (auto v : e.signs) s.push_back(static_cast<int>(v));
    out["signs"] = s;
  }
  if (!e.parts.empty()) {
    json p = json::array();
    for (const auto& part : e.parts) p.push_back(toJson(part));
    out["parts"] = p;
  }
  return out;
}

inline GroupElement elementFromJson(const json& j) {
  GroupElement e;
  e.a = j.value("a", std::int64_t(0));
  e.b = j.value("b", std::int64_t(0));
  if (j.contains("signs"))
    for (const auto& s : j.at("signs")) e.signs.push_back(static_cast<std::int8_t>(s.get<int>()));
  if (j.contains("parts"))
    for (const auto& p : j.at("parts")) e.parts.push_back(elementFromJson(p));
  return e;
}

inline json toJson(const Instrument& u) {
  json out;
  switch (u.kind()) {
    case InstrumentKind::FunctionalRow:
      out["kind"] = "functional_row";
      out["eta"] = toJson(u.eta());
      break;
    case InstrumentKind::GaussianRow:
      out["kind"] = "gaussian_row";
      out["eta"] = toJson(u.eta());  // recorded draw, replayed verbatim
      break;
    case InstrumentKind::BlockMap: {
      out["kind"] = "block_map";
      const Eigen::MatrixXcd m = u.denseMap();
      json rows = json::array();
      for (Index r = 0; r < m.rows(); ++r) rows.push_back(toJson(m.row(r).transpose()));
      out["matrix"] = rows;
      break;
    }
  }
  out["rescaled"] = u.wasRescaled();
  return out;
}

inline Instrument instrumentFromJson(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "functional_row" || kind == "gaussian_row")
    return Instrument::functionalRow(complexVectorFromJson(j.at("eta")), false);
  if (kind == "block_map") {
    const auto& rows = j.at("matrix");
    const Index r = static_cast<Index>(rows.size());
    if (r == 0) throw std::invalid_argument("block_map: empty matrix");
    Eigen::MatrixXcd m(r, complexVectorFromJson(rows[0]).size());
    for (Index i = 0; i < r; ++i) m.row(i) = complexVectorFromJson(rows[i]).transpose();
    return Instrument::blockMap(std::move(m), false);
  }
  throw std::invalid_argument("instrument: unknown kind '" + kind + "'");
}

inline json toJson(const MeasurementOperator& op) {
  json elements = json::array();
  for (const auto& e : op.elements) elements.push_back(toJson(e));
  return {{"group", toJson(op.group)},
          {"instrument", toJson(op.instrument)},
          {"elements", elements}};
}

inline MeasurementOperator operatorFromJson(const json& j) {
  std::vector<GroupElement> elements;
  for (const auto& e : j.at("elements")) elements.push_back(elementFromJson(e));
  return operatorFromElements(groupFromJson(j.at("group")),
                              instrumentFromJson(j.at("instrument")), std::move(elements));
}

inline json toJson(const SphereNet& net) {
  json pts = json::array();
  for (Index c = 0; c < net.size(); ++c) {
    json p = json::array();
    for (Index r = 0; r < net.dimension(); ++r) p.push_back(net.points(r, c));
    pts.push_back(p);
  }
  return {{"n", net.dimension()},
          {"epsilon", net.epsilon},
          {"seed", net.seed},
          {"points", pts}};
}

inline SphereNet netFromJson(const json& j) {
  SphereNet net;
  net.epsilon = j.at("epsilon").get<double>();
  net.seed = j.value("seed", std::uint64_t(0));
  const auto& pts = j.at("points");
  const Index n = j.at("n").get<Index>();
  net.points.resize(n, static_cast<Index>(pts.size()));
  Index c = 0;
  for (const auto& p : pts) {
    for (Index r = 0; r < n; ++r) net.points(r, c) = p[r].get<double>();
    ++c;
  }
  return net;
}

inline json toJson(const RipEstimate& est) {
  const char* method = est.method == RipEstimate::Method::Enumeration ? "enumeration"
                       : est.method == RipEstimate::Method::MonteCarlo ? "monte_carlo"
                                                                       : "ascent";
  return {{"delta", est.delta},
          {"kind", est.kind == RipEstimate::Kind::Exact ? "exact" : "lower_bound"},
          {"method", method},
          {"samples", est.samples},
          {"seed", est.seed},
          {"degenerate", est.degenerate},
          {"rip_threshold", ripThreshold(est.delta)}};
}

}  // namespace riplab
