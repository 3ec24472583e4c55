// rip-lab: group-structured measurement operators, empirical RIP estimation,
// sample-complexity bound evaluation, and rank-1 tensor net experiments.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>

#include "riplab/experiment.hpp"
#include "riplab/serialize.hpp"

namespace {

using namespace riplab;

json loadConfig(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config " + path);
  json cfg;
  f >> cfg;
  return cfg;
}

int cmdGroupVerify(const std::string& groupSpec, int probes, std::uint64_t seed) {
  const GroupDescriptor group = parseGroupSpec(groupSpec);
  const Index n = group.dimension();
  Rng rng = Rng::stream(seed, {0x9a0fu});
  double worst = 0.0;
  for (int p = 0; p < probes; ++p) {
    Eigen::MatrixXcd t(n, n);
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < n; ++i) t(i, j) = rng.complexGaussian();
    worst = std::max(worst, verifyIsotropy(group, t));
  }
  json report = {{"group", groupName(group)},
                 {"dimension", n},
                 {"group_order", group.order()},
                 {"probes", probes},
                 {"max_isotropy_deviation", worst},
                 {"commutant_dimension",
                  n <= 16 ? json(commutantDimension(group)) : json(nullptr)},
                 {"seed", seed}};
  std::cout << report.dump(2) << "\n";
  return worst <= 1e-10 ? 0 : 1;
}

int cmdRipEstimate(const json& cfg) {
  const std::uint64_t seed = cfg.at("seed").get<std::uint64_t>();
  const SparsityModel model = cfg.at("model").is_string()
                                  ? parseModelSpec(cfg.at("model").get<std::string>())
                                  : modelFromJson(cfg.at("model"));
  const double s = cfg.at("s").get<double>();
  const Index m = cfg.at("m").get<Index>();
  const std::string method = cfg.value("method", "monte_carlo");
  const std::string opKind = cfg.value("operator", "group");

  RipEstimate est;
  Rng drawRng = Rng::stream(seed, {0xd7a3u});
  Rng estRng = Rng::stream(seed, {0xe571u});
  if (opKind == "gaussian") {
    const Eigen::MatrixXcd a = drawGaussianDense(model.dimension(), m, drawRng);
    if (method == "exact")
      est = exactCanonicalRip(a, static_cast<Index>(s));
    else if (method == "ascent")
      est = ascentRipDense(a, model, s, cfg.value("restarts", Index(64)),
                           cfg.value("ascent_steps", 25), estRng);
    else
      est = monteCarloRipDense(a, model, s, cfg.value("trials", Index(200)), estRng);
  } else {
    const GroupDescriptor group = cfg.at("group").is_string()
                                      ? parseGroupSpec(cfg.at("group").get<std::string>())
                                      : groupFromJson(cfg.at("group"));
    const Instrument instrument = parseInstrument(cfg.value("instrument", json("ones")),
                                                  group.naturalShape(), seed);
    const MeasurementOperator op = drawOperator(group, instrument, m, drawRng);
    if (method == "exact")
      est = exactCanonicalRip(densifyOperator(op), static_cast<Index>(s));
    else if (method == "ascent")
      est = ascentRip(op, model, s, cfg.value("restarts", Index(64)),
                      cfg.value("ascent_steps", 25), estRng);
    else
      est = monteCarloRip(op, model, s, cfg.value("trials", Index(200)), estRng);
  }
  json out = toJson(est);
  out["model"] = modelName(model);
  out["m"] = m;
  out["s"] = s;
  out["master_seed"] = seed;
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmdNetBuild(Index n, double eps, std::uint64_t seed, const std::string& outPath) {
  const SphereNet net = sphereNet(n, eps, Rng::stream(seed, {0x0e75u}));
  json report = {{"n", n},
                 {"epsilon", eps},
                 {"cardinality", net.size()},
                 {"cardinality_bound", net.volumetricCardinalityBound()},
                 {"validation_rounds", net.validationRounds},
                 {"seed", seed}};
  report["manifest_hash"] = hex64(fnv1a64(report.dump()));
  if (!outPath.empty()) {
    json payload = toJson(net);
    payload["manifest_hash"] = report["manifest_hash"];
    payload["library_version"] = kVersion;
    std::ofstream f(outPath, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + outPath);
    f << payload.dump(2) << "\n";
    report["output"] = outPath;
  }
  std::cout << report.dump(2) << "\n";
  return 0;
}

int cmdNetTail(Index n, int d, Index draws, double zeta, std::uint64_t seed) {
  const double eps = 1.0 / (3.0 * d);
  const TensorAtomSet atoms = tensorAtoms(sphereNet(n, eps, Rng::stream(seed, {0x0e75u})), d);
  const TailExperimentResult r =
      gaussianDualTailExperiment(atoms, draws, zeta, Rng::stream(seed, {0x7a11u}));
  json report = {{"n", n},
                 {"d", d},
                 {"epsilon", eps},
                 {"net_cardinality", atoms.base.size()},
                 {"log_product_cardinality", atoms.logCardinality()},
                 {"log_cardinality_bound", atoms.logCardinalityBound()},
                 {"zeta", zeta},
                 {"threshold", r.threshold},
                 {"raw_exceedance", r.rawRate},
                 {"deflated_exceedance", r.deflatedRate},
                 {"draws", draws},
                 {"seed", seed}};
  std::cout << report.dump(2) << "\n";
  return r.deflatedRate <= zeta + 3.0 * std::sqrt(zeta * (1 - zeta) / double(draws)) ? 0 : 1;
}

int cmdBoundPredict(const std::string& theorem, const json& p) {
  json out = {{"formula_id", theorem}, {"inputs", p}};
  const double c = p.value("c", 1.0);
  out["constants"] = {{"c", c}};
  if (theorem == "maurey") {
    out["value"] = maureyBound(p.at("N").get<double>(), p.at("m").get<double>(),
                               p.at("l").get<double>(), p.value("norm", 1.0), c);
  } else if (theorem == "e21") {
    out["value"] = e21Bound(p.at("N").get<double>(), p.at("m").get<double>(),
                            p.value("d", 1.0), p.value("norm", 1.0), c);
  } else if (theorem == "gordon") {
    out["value"] = gordonGaussianM(p.at("n").get<double>(), p.at("d").get<int>(),
                                   p.at("delta").get<double>(), p.at("zeta").get<double>(), c);
  } else if (theorem == "gaussian-dual") {
    out["value"] = gaussianDualNormBound(p.at("n").get<double>(), p.at("d").get<int>(),
                                         p.at("zeta").get<double>());
  } else if (theorem == "tensor") {
    const FixedPointResult r =
        tensorM(p.at("n").get<double>(), p.at("d").get<int>(), p.at("s").get<double>(),
                p.at("delta").get<double>(), p.at("zeta").get<double>(), c);
    out["value"] = r.m;
    out["iterations"] = r.iterations;
    out["satisfied"] = r.satisfied;
  } else if (theorem == "polytope" || theorem == "canonical" || theorem == "schatten" ||
             theorem == "dual-type-p") {
    ComplexityInputs model;
    if (theorem == "polytope") {
      model.family = ComplexityInputs::Family::Polytope;
      model.M = p.at("M").get<double>();
    } else if (theorem == "canonical") {
      model.family = ComplexityInputs::Family::CanonicalL1;
      model.N = p.at("N").get<double>();
    } else if (theorem == "schatten") {
      model.family = ComplexityInputs::Family::SchattenQ;
      model.n = p.at("n").get<double>();
      model.q = p.value("q", 1.0);
    } else {
      model.family = ComplexityInputs::Family::DualTypeP;
      model.typeConstant = p.value("T", 1.0);
    }
    SampleComplexityInputs in;
    in.s = p.at("s").get<double>();
    in.delta = p.at("delta").get<double>();
    in.zeta = p.at("zeta").get<double>();
    in.p = p.value("p", 2.0);
    in.blockDim = p.value("block_dim", 1.0);
    in.alphaMoment = p.value("incoherence", 1.0);
    in.opNormMoment = p.value("op_norm", in.alphaMoment);
    in.c = c;
    const FixedPointResult r = predictM(model, in, p.value("C", 1.0));
    out["value"] = r.m;
    out["iterations"] = r.iterations;
    out["satisfied"] = r.satisfied;
    out["constants"]["C"] = p.value("C", 1.0);
  } else {
    throw ConfigError("theorem", "unknown formula '" + theorem + "'");
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmdOpExport(const json& cfg, const std::string& binPath, const std::string& sidecarPath) {
  const std::uint64_t seed = cfg.at("seed").get<std::uint64_t>();
  const GroupDescriptor group = cfg.at("group").is_string()
                                    ? parseGroupSpec(cfg.at("group").get<std::string>())
                                    : groupFromJson(cfg.at("group"));
  const Instrument instrument =
      parseInstrument(cfg.value("instrument", json("ones")), group.naturalShape(), seed);
  MeasurementOperator op{group, instrument, {}};
  if (cfg.contains("elements")) {
    std::vector<GroupElement> elements;
    for (const auto& e : cfg.at("elements")) elements.push_back(elementFromJson(e));
    op = operatorFromElements(group, instrument, std::move(elements));
  } else {
    Rng rng = Rng::stream(seed, {0xd7a3u});
    op = drawOperator(group, instrument, cfg.at("m").get<Index>(), rng);
  }
  const json sidecar = exportOperator(op, binPath, sidecarPath);
  std::cout << json{{"output", binPath},
                    {"sidecar", sidecarPath},
                    {"rows", sidecar.at("rows")},
                    {"cols", sidecar.at("cols")},
                    {"manifest_hash", sidecar.at("manifest_hash")}}
                   .dump(2)
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"group-structured RIP laboratory"};
  app.require_subcommand(1);

  // group verify
  auto* group = app.add_subcommand("group", "group action utilities");
  group->require_subcommand(1);
  auto* verify = group->add_subcommand("verify", "exact isotropy check");
  std::string groupSpec = "hw:4";
  int probes = 20;
  std::uint64_t seed = 1;
  verify->add_option("--group", groupSpec, "group spec, e.g. hw:4, sign:8, pauli:2, lr:pauli:1");
  verify->add_option("--probes", probes, "number of random probe operators");
  verify->add_option("--seed", seed, "master seed");

  // rip estimate / scaling
  auto* rip = app.add_subcommand("rip", "restricted isometry estimation");
  rip->require_subcommand(1);
  auto* estimate = rip->add_subcommand("estimate", "single-operator estimate");
  std::string estimateConfig;
  estimate->add_option("--config", estimateConfig, "JSON config")->required();
  auto* scaling = rip->add_subcommand("scaling", "redraw sweep over (s, m)");
  std::string scalingConfig;
  int scalingThreads = 0;
  scaling->add_option("--config", scalingConfig, "JSON config")->required();
  scaling->add_option("--threads", scalingThreads, "override thread count");

  // net build / tail
  auto* net = app.add_subcommand("net", "sphere nets and tensor atoms");
  net->require_subcommand(1);
  auto* build = net->add_subcommand("build", "greedy farthest-point net");
  Eigen::Index netN = 2;
  double netEps = 1.0 / 6.0;
  std::string netOut;
  std::uint64_t netSeed = 1;
  build->add_option("--n", netN, "sphere dimension");
  build->add_option("--eps", netEps, "covering radius");
  build->add_option("--out", netOut, "output net JSON");
  build->add_option("--seed", netSeed, "master seed");
  auto* tail = net->add_subcommand("tail", "Gaussian dual-norm tail experiment");
  Eigen::Index tailN = 2, tailDraws = 400;
  int tailD = 2;
  double tailZeta = 0.5;
  std::uint64_t tailSeed = 1;
  tail->add_option("--n", tailN, "mode dimension");
  tail->add_option("--d", tailD, "tensor order");
  tail->add_option("--draws", tailDraws, "Gaussian draws");
  tail->add_option("--zeta", tailZeta, "failure probability");
  tail->add_option("--seed", tailSeed, "master seed");

  // bound predict
  auto* bound = app.add_subcommand("bound", "closed-form bound formulas");
  bound->require_subcommand(1);
  auto* predict = bound->add_subcommand("predict", "evaluate a bound formula");
  std::string theorem;
  std::vector<std::string> params;
  predict->add_option("--theorem", theorem,
                      "maurey | e21 | canonical | polytope | schatten | dual-type-p | "
                      "tensor | gordon | gaussian-dual")
      ->required();
  predict->add_option("--param", params, "extra key=value numeric parameters");
  // Common parameters as first-class flags.
  std::map<std::string, std::optional<double>> flagParams;
  for (const char* key : {"n", "d", "s", "delta", "zeta", "N", "M", "m", "l", "q", "p", "c",
                          "C", "T", "norm", "block_dim", "incoherence", "op_norm"}) {
    flagParams[key] = std::nullopt;
    predict->add_option_function<double>(
        "--" + std::string(key),
        [&flagParams, key](double v) { flagParams[key] = v; },
        "formula parameter " + std::string(key));
  }

  // op export
  auto* opCmd = app.add_subcommand("op", "measurement operator utilities");
  opCmd->require_subcommand(1);
  auto* exportCmd = opCmd->add_subcommand("export", "densify to a binary matrix file");
  std::string exportConfig, exportOut = "operator.bin", exportSidecar = "operator.json";
  exportCmd->add_option("--config", exportConfig, "JSON config")->required();
  exportCmd->add_option("--out", exportOut, "binary output path");
  exportCmd->add_option("--sidecar", exportSidecar, "JSON sidecar path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (verify->parsed()) return cmdGroupVerify(groupSpec, probes, seed);
    if (estimate->parsed()) return cmdRipEstimate(loadConfig(estimateConfig));
    if (scaling->parsed()) {
      riplab::json cfg = loadConfig(scalingConfig);
      if (scalingThreads > 0) cfg["threads"] = scalingThreads;
      const riplab::ScalingOutput out = riplab::runScaling(cfg);
      std::cout << out.manifest.dump(2) << "\n";
      return 0;
    }
    if (build->parsed()) return cmdNetBuild(netN, netEps, netSeed, netOut);
    if (tail->parsed()) return cmdNetTail(tailN, tailD, tailDraws, tailZeta, tailSeed);
    if (predict->parsed()) {
      riplab::json p = riplab::json::object();
      for (const auto& [key, value] : flagParams)
        if (value) p[key] = *value;
      for (const auto& kv : params) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
          throw riplab::ConfigError("param", "expected key=value, got '" + kv + "'");
        p[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
      }
      return cmdBoundPredict(theorem, p);
    }
    if (exportCmd->parsed()) return cmdOpExport(loadConfig(exportConfig), exportOut, exportSidecar);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
