#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "riplab/bounds.hpp"
#include "riplab/csv.hpp"
#include "riplab/serialize.hpp"

namespace riplab {

inline constexpr const char* kVersion = "0.1.0";

struct ConfigError : std::runtime_error {
  ConfigError(const std::string& path, const std::string& message)
      : std::runtime_error(path + ": " + message) {}
};

// ---------------------------------------------------------------------------
// Compact spec strings for CLI flags: groups "hw:4", "sign:8", "pauli:2",
// products "hw:2*hw:2", two-sided "lr:<base>"; models "l1:64",
// "schatten:8:1", "tensor:2:3"; instruments "ones", "gaussian", "pauli-id".
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<std::string> splitString(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      parts.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return parts;
}

inline long parseLong(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(what, "expected an integer, got '" + s + "'");
  }
}

}  // namespace detail

inline GroupDescriptor parseGroupSpec(const std::string& spec) {
  if (spec.rfind("lr:", 0) == 0)
    return GroupDescriptor::twoSided(parseGroupSpec(spec.substr(3)));
  const auto factors = detail::splitString(spec, '*');
  if (factors.size() > 1) {
    std::vector<GroupDescriptor> fs;
    for (const auto& f : factors) fs.push_back(parseGroupSpec(f));
    return GroupDescriptor::product(std::move(fs));
  }
  const auto parts = detail::splitString(spec, ':');
  if (parts.size() != 2) throw ConfigError("group", "cannot parse '" + spec + "'");
  const long n = detail::parseLong(parts[1], "group");
  if (parts[0] == "hw") return GroupDescriptor::heisenbergWeyl(n);
  if (parts[0] == "sign") return GroupDescriptor::signShift(n);
  if (parts[0] == "pauli") return GroupDescriptor::pauliTensor(static_cast<int>(n));
  throw ConfigError("group", "unknown group family '" + parts[0] + "'");
}

inline SparsityModel parseModelSpec(const std::string& spec) {
  const auto parts = detail::splitString(spec, ':');
  if (parts[0] == "l1" && parts.size() == 2)
    return SparsityModel::canonicalL1(detail::parseLong(parts[1], "model"));
  if (parts[0] == "schatten" && parts.size() == 3) {
    const long n = detail::parseLong(parts[1], "model");
    return SparsityModel::schattenBall(n, std::stod(parts[2]));
  }
  if (parts[0] == "tensor" && parts.size() == 3)
    return SparsityModel::tensorHull(detail::parseLong(parts[1], "model"),
                                     static_cast<int>(detail::parseLong(parts[2], "model")));
  throw ConfigError("model", "cannot parse '" + spec + "'");
}

/// Builds a named instrument for the given ambient shape. Gaussian rows are
/// drawn from a stream derived from the master seed so replays are exact.
inline Instrument makeNamedInstrument(const std::string& name, const Shape& shape,
                                      std::uint64_t masterSeed) {
  const Index dim = shape.size();
  if (name == "ones") return Instrument::functionalRow(Eigen::VectorXcd::Ones(dim));
  if (name == "gaussian") {
    Rng rng = Rng::stream(masterSeed, {0x6a55u});
    return Instrument::gaussianRow(dim, rng);
  }
  if (name == "pauli-id") {
    if (shape.kind != Shape::Kind::Matrix)
      throw ConfigError("instrument", "'pauli-id' needs a matrix-shaped model/group");
    Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(shape.n, shape.n);
    return Instrument::functionalRow(
        Eigen::Map<const Eigen::VectorXcd>(id.data(), id.size()));
  }
  throw ConfigError("instrument", "unknown instrument '" + name + "'");
}

inline Instrument parseInstrument(const json& j, const Shape& shape, std::uint64_t seed) {
  if (j.is_string()) return makeNamedInstrument(j.get<std::string>(), shape, seed);
  return instrumentFromJson(j);
}

inline std::string groupName(const GroupDescriptor& g) {
  switch (g.kind()) {
    case GroupKind::HeisenbergWeyl:
      return "hw:" + std::to_string(g.param());
    case GroupKind::SignShift:
      return "sign:" + std::to_string(g.param());
    case GroupKind::PauliTensor:
      return "pauli:" + std::to_string(g.qubits());
    case GroupKind::Product: {
      std::string s;
      for (std::size_t i = 0; i < g.factors().size(); ++i) {
        if (i) s += "*";
        s += groupName(g.factors()[i]);
      }
      return s;
    }
    case GroupKind::TwoSided:
      return "lr:" + groupName(g.base());
  }
  return "?";
}

inline std::string modelName(const SparsityModel& m) {
  switch (m.kind()) {
    case ModelKind::CanonicalL1:
      return "l1:" + std::to_string(m.baseDim());
    case ModelKind::AtomicPolytope:
      return "polytope:" + std::to_string(m.atoms().size());
    case ModelKind::SchattenBall:
      return "schatten:" + std::to_string(m.baseDim()) + ":" + formatDouble(m.schattenQ());
    case ModelKind::TensorHull:
      return "tensor:" + std::to_string(m.baseDim()) + ":" + std::to_string(m.order());
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Scaling experiment harness
// ---------------------------------------------------------------------------

struct ScalingJob {
  ScalingConfig core;
  json configEcho;
  std::string manifestHash;
  std::string csvPath;
  std::string manifestPath;
};

/// Fingerprint of the experiment identity: execution details (thread count,
/// output paths) are excluded so reruns at different parallelism hash alike.
inline std::string configHash(const json& config) {
  json canonical = config;
  canonical.erase("threads");
  canonical.erase("output_csv");
  canonical.erase("output_manifest");
  return hex64(fnv1a64(canonical.dump()));
}

inline ScalingJob parseScalingConfig(const json& cfg) {
  ScalingJob job;
  job.configEcho = cfg;
  if (!cfg.contains("seed")) throw ConfigError("seed", "required (no wall-clock default)");
  job.core.seed = cfg.at("seed").get<std::uint64_t>();
  // threads = 0 defers to RIP_LAB_THREADS (then 1); explicit values win.
  job.core.threads = cfg.value("threads", 0);

  if (!cfg.contains("model")) throw ConfigError("model", "required");
  job.core.model = cfg.at("model").is_string()
                       ? parseModelSpec(cfg.at("model").get<std::string>())
                       : modelFromJson(cfg.at("model"));

  const std::string opKind = cfg.value("operator", "group");
  if (opKind == "gaussian") {
    job.core.operatorKind = ScalingConfig::OperatorKind::GaussianDense;
  } else if (opKind == "group") {
    job.core.operatorKind = ScalingConfig::OperatorKind::GroupStructured;
    if (!cfg.contains("group")) throw ConfigError("group", "required for operator 'group'");
    job.core.group = cfg.at("group").is_string()
                         ? parseGroupSpec(cfg.at("group").get<std::string>())
                         : groupFromJson(cfg.at("group"));
    if (job.core.group.dimension() != job.core.model.dimension())
      throw ConfigError("group", "dimension does not match the model");
    job.core.instrumentPerRedraw = cfg.value("instrument_redraw", false);
    job.core.instrumentNormalize = cfg.value("instrument_normalize", true);
    if (!job.core.instrumentPerRedraw)
      job.core.instrument = parseInstrument(cfg.value("instrument", json("ones")),
                                            job.core.group.naturalShape(), job.core.seed);
  } else {
    throw ConfigError("operator", "expected 'group' or 'gaussian'");
  }

  if (!cfg.contains("s_list") || cfg.at("s_list").empty())
    throw ConfigError("s_list", "required non-empty array");
  for (const auto& v : cfg.at("s_list")) job.core.sList.push_back(v.get<double>());
  if (!cfg.contains("m_list") || cfg.at("m_list").empty())
    throw ConfigError("m_list", "required non-empty array");
  for (const auto& v : cfg.at("m_list")) {
    const Index m = v.get<Index>();
    if (m < 1) throw ConfigError("m_list", "entries must be >= 1");
    job.core.mList.push_back(m);
  }
  job.core.redraws = cfg.value("redraws", Index(20));
  job.core.trials = cfg.value("trials", Index(200));
  job.core.ascentSteps = cfg.value("ascent_steps", 25);

  const std::string method = cfg.value("method", "exact");
  if (method == "exact")
    job.core.method = ScalingConfig::Method::ExactCanonical;
  else if (method == "monte_carlo")
    job.core.method = ScalingConfig::Method::MonteCarlo;
  else if (method == "ascent")
    job.core.method = ScalingConfig::Method::Ascent;
  else
    throw ConfigError("method", "expected exact | monte_carlo | ascent");

  if (job.core.method == ScalingConfig::Method::ExactCanonical &&
      job.core.model.kind() != ModelKind::CanonicalL1)
    throw ConfigError("method", "exact enumeration is restricted to the canonical model");

  job.manifestHash = configHash(cfg);
  job.csvPath = cfg.value("output_csv", "");
  job.manifestPath = cfg.value("output_manifest", "");
  return job;
}

struct ScalingOutput {
  std::vector<ScalingRow> rows;
  std::string csvText;
  json manifest;
};

inline std::string renderScalingCsv(const ScalingJob& job, const std::vector<ScalingRow>& rows) {
  std::ostringstream out;
  CsvWriter csv(out);
  csv.writeRow({"model", "group", "s", "m", "trials", "delta_median", "delta_q25", "delta_q75",
                "seed", "manifest_hash"});
  const std::string model = modelName(job.core.model);
  const std::string group =
      job.core.operatorKind == ScalingConfig::OperatorKind::GaussianDense
          ? "gaussian"
          : groupName(job.core.group);
  for (const auto& r : rows) {
    csv.writeRow({model, group, formatDouble(r.s), std::to_string(r.m),
                  std::to_string(r.trials), formatDouble(r.median), formatDouble(r.q25),
                  formatDouble(r.q75), std::to_string(job.core.seed), job.manifestHash});
  }
  return out.str();
}

inline json buildManifest(const ScalingJob& job) {
  return {{"config", job.configEcho},
          {"manifest_hash", job.manifestHash},
          {"library_version", kVersion},
          {"master_seed", job.core.seed}};
}

/// Runs a scaling config end to end; writes CSV/manifest files when paths are
/// configured. The CSV text depends only on (config minus execution fields).
inline ScalingOutput runScaling(const json& cfg) {
  const ScalingJob job = parseScalingConfig(cfg);
  ScalingOutput out;
  out.rows = scalingExperiment(job.core);
  out.csvText = renderScalingCsv(job, out.rows);
  out.manifest = buildManifest(job);
  if (!job.csvPath.empty()) {
    std::ofstream f(job.csvPath, std::ios::binary);
    if (!f) throw std::runtime_error("runScaling: cannot write " + job.csvPath);
    f << out.csvText;
  }
  if (!job.manifestPath.empty()) {
    std::ofstream f(job.manifestPath, std::ios::binary);
    if (!f) throw std::runtime_error("runScaling: cannot write " + job.manifestPath);
    f << out.manifest.dump(2) << "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Operator export: column-major complex binary + JSON sidecar
// ---------------------------------------------------------------------------

/// Densifies A and writes interleaved re/im doubles in column-major order,
/// with a JSON sidecar describing layout and provenance.
inline json exportOperator(const MeasurementOperator& op, const std::string& binPath,
                           const std::string& sidecarPath) {
  const Eigen::MatrixXcd a = densifyOperator(op);
  json sidecar = {{"rows", a.rows()},
                  {"cols", a.cols()},
                  {"layout", "column-major"},
                  {"scalar", "complex128-interleaved"},
                  {"library_version", kVersion},
                  {"operator", toJson(op)}};
  sidecar["manifest_hash"] = hex64(fnv1a64(sidecar.dump()));
  {
    std::ofstream f(binPath, std::ios::binary);
    if (!f) throw std::runtime_error("exportOperator: cannot write " + binPath);
    for (Index c = 0; c < a.cols(); ++c)
      for (Index r = 0; r < a.rows(); ++r) {
        const double re = a(r, c).real(), im = a(r, c).imag();
        f.write(reinterpret_cast<const char*>(&re), sizeof(double));
        f.write(reinterpret_cast<const char*>(&im), sizeof(double));
      }
  }
  if (!sidecarPath.empty()) {
    std::ofstream f(sidecarPath, std::ios::binary);
    if (!f) throw std::runtime_error("exportOperator: cannot write " + sidecarPath);
    f << sidecar.dump(2) << "\n";
  }
  return sidecar;
}

}  // namespace riplab
