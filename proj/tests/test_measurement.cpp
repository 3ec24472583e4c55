#include <catch2/catch.hpp>

#include "oracles.hpp"
#include "riplab/measurement.hpp"

using namespace riplab;

TEST_CASE("instrument trace normalization") {
  Eigen::VectorXcd eta = Eigen::VectorXcd::Ones(8);
  SECTION("all-ones row is already normalized") {
    const Instrument u = Instrument::functionalRow(eta);
    REQUIRE_FALSE(u.wasRescaled());
    REQUIRE(u.traceGram() == Approx(8.0));
  }
  SECTION("off-normalized rows are rescaled with a flag") {
    const Instrument u = Instrument::functionalRow(2.0 * eta);
    REQUIRE(u.wasRescaled());
    REQUIRE(u.traceGram() == Approx(8.0));
  }
  SECTION("normalize=false preserves the input") {
    const Instrument u = Instrument::functionalRow(2.0 * eta, false);
    REQUIRE(u.traceGram() == Approx(32.0));
  }
  SECTION("block maps normalize the Frobenius mass") {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Random(3, 9);
    const Instrument u = Instrument::blockMap(m);
    REQUIRE(u.traceGram() == Approx(9.0));
    REQUIRE(u.blockDim() == 3);
  }
}

TEST_CASE("single identity measurement reproduces the instrument") {
  const auto g = GroupDescriptor::heisenbergWeyl(6);
  Rng rng(5);
  const Instrument u = Instrument::gaussianRow(6, rng);
  const MeasurementOperator op = operatorFromElements(g, u, {identityElement(g)});
  const SignalVector x{oracle::randomComplexVector(6, rng)};
  const Eigen::MatrixXcd out = applyOperator(op, x);
  REQUIRE(out.rows() == 1);
  REQUIRE(out.cols() == 1);
  REQUIRE(std::abs(out(0, 0) - u.apply(x.data)[0]) < 1e-12);
}

TEST_CASE("heisenberg-weyl all-ones rows are characters") {
  const Index n = 16;
  const auto g = GroupDescriptor::heisenbergWeyl(n);
  const Instrument ones = Instrument::functionalRow(Eigen::VectorXcd::Ones(n));
  Rng rng(7);
  const SignalVector x{oracle::randomComplexVector(n, rng)};
  const Eigen::VectorXcd spectrum = oracle::characterTransform(x.data);
  for (int t = 0; t < 25; ++t) {
    const GroupElement e = sampleHaar(g, rng);
    const cplx v = ones.apply(apply(g, e, x).data)[0];
    REQUIRE(std::abs(v) == Approx(std::abs(spectrum[e.a])).margin(1e-10));
  }
}

TEST_CASE("full modulation sampling forms a tight frame") {
  const Index n = 16;
  const auto g = GroupDescriptor::heisenbergWeyl(n);
  const Instrument ones = Instrument::functionalRow(Eigen::VectorXcd::Ones(n));
  std::vector<GroupElement> elements(n);
  for (Index l = 0; l < n; ++l) elements[l].a = l;
  const MeasurementOperator op = operatorFromElements(g, ones, elements);
  Rng rng(11);
  for (int t = 0; t < 10; ++t) {
    const SignalVector x{oracle::randomComplexVector(n, rng)};
    REQUIRE(std::sqrt(measuredEnergy(op, x)) == Approx(x.norm()).epsilon(1e-10));
  }
  SECTION("densified operator is unitary up to 1e-10") {
    const Eigen::MatrixXcd a = densifyOperator(op);
    REQUIRE((a.adjoint() * a - Eigen::MatrixXcd::Identity(n, n)).norm() < 1e-10);
  }
}

TEST_CASE("zero signal gives all-zero blocks") {
  const auto g = GroupDescriptor::heisenbergWeyl(5);
  Rng rng(2);
  const Instrument u = Instrument::gaussianRow(5, rng);
  const MeasurementOperator op = drawOperator(g, u, 4, rng);
  const Eigen::MatrixXcd out = applyOperator(op, SignalVector::zero(Shape::flat(5)));
  REQUIRE(out.norm() == 0.0);
}

TEST_CASE("redraws reproduce identically under the same seed") {
  const auto g = GroupDescriptor::signShift(8);
  Rng rng1(99), rng2(99);
  const Instrument u = Instrument::functionalRow(Eigen::VectorXcd::Ones(8));
  const MeasurementOperator a = drawOperator(g, u, 5, rng1);
  const MeasurementOperator b = drawOperator(g, u, 5, rng2);
  Rng xr(1);
  const SignalVector x{oracle::randomComplexVector(8, xr)};
  REQUIRE((applyOperator(a, x) - applyOperator(b, x)).norm() == 0.0);
}

TEST_CASE("operator energy matches the densified matrix") {
  Rng rng(13);
  const auto g = GroupDescriptor::twoSided(GroupDescriptor::pauliTensor(1));
  Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(2, 2);
  const Instrument pauliId = Instrument::functionalRow(
      Eigen::Map<const Eigen::VectorXcd>(id.data(), 4));
  const MeasurementOperator op = drawOperator(g, pauliId, 7, rng);
  const Eigen::MatrixXcd dense = densifyOperator(op);
  for (int t = 0; t < 10; ++t) {
    const SignalVector x{oracle::randomComplexVector(4, rng), Shape::matrix(2)};
    REQUIRE(measuredEnergy(op, x) == Approx((dense * x.data).squaredNorm()).epsilon(1e-12));
  }
  SECTION("adjoint agrees with the dense adjoint") {
    const Eigen::MatrixXcd blocks = Eigen::MatrixXcd::Random(1, 7);
    const SignalVector lhs = applyOperatorAdjoint(op, blocks);
    const Eigen::VectorXcd rhs =
        dense.adjoint() * Eigen::Map<const Eigen::VectorXcd>(blocks.data(), 7);
    REQUIRE((lhs.data - rhs).norm() < 1e-12);
  }
}

TEST_CASE("sampled energy is isotropic in expectation") {
  const Index n = 8;
  const auto g = GroupDescriptor::heisenbergWeyl(n);
  const Instrument ones = Instrument::functionalRow(Eigen::VectorXcd::Ones(n));
  Rng xr(3);
  Eigen::VectorXcd xv = oracle::randomComplexVector(n, xr);
  xv /= xv.norm();
  const SignalVector x{xv};
  const Index redraws = 1000;
  double mean = 0, m2 = 0;
  Rng rng(2027);
  for (Index t = 0; t < redraws; ++t) {
    const MeasurementOperator op = drawOperator(g, ones, 4, rng);
    const double e = measuredEnergy(op, x);
    mean += e;
    m2 += e * e;
  }
  mean /= double(redraws);
  const double var = m2 / double(redraws) - mean * mean;
  const double stderrMean = std::sqrt(var / double(redraws));
  REQUIRE(std::abs(mean - 1.0) <= 4.0 * stderrMean + 1e-3);
}

TEST_CASE("scale halves squared block contributions when m doubles") {
  const Index n = 6;
  const auto g = GroupDescriptor::heisenbergWeyl(n);
  const Instrument ones = Instrument::functionalRow(Eigen::VectorXcd::Ones(n));
  Rng rng(17);
  std::vector<GroupElement> base;
  for (int j = 0; j < 3; ++j) base.push_back(sampleHaar(g, rng));
  std::vector<GroupElement> doubled = base;
  doubled.insert(doubled.end(), base.begin(), base.end());
  const MeasurementOperator small = operatorFromElements(g, ones, base);
  const MeasurementOperator big = operatorFromElements(g, ones, doubled);
  const SignalVector x{oracle::randomComplexVector(n, rng)};
  const Eigen::MatrixXcd bs = applyOperator(small, x);
  const Eigen::MatrixXcd bb = applyOperator(big, x);
  for (Index j = 0; j < 3; ++j)
    REQUIRE(bb.col(j).squaredNorm() == Approx(0.5 * bs.col(j).squaredNorm()).epsilon(1e-12));
  REQUIRE(measuredEnergy(big, x) == Approx(measuredEnergy(small, x)).epsilon(1e-12));
}

TEST_CASE("incoherence") {
  SECTION("canonical all-ones row has norm 1") {
    const Index n = 12;
    const auto model = SparsityModel::canonicalL1(n);
    const auto g = GroupDescriptor::heisenbergWeyl(n);
    const Instrument ones = Instrument::functionalRow(Eigen::VectorXcd::Ones(n));
    REQUIRE(incoherence(model, ones, g).value() == Approx(1.0));
  }
  SECTION("polytope incoherence is the max atom response") {
    const Index n = 6;
    std::vector<Eigen::VectorXcd> atoms;
    for (Index j = 0; j < n; ++j) atoms.push_back(Eigen::VectorXcd::Unit(n, j));
    const auto model = SparsityModel::atomicPolytope(atoms);
    const auto g = GroupDescriptor::signShift(n);
    Eigen::MatrixXcd map = Eigen::MatrixXcd::Random(2, n);
    const Instrument u = Instrument::blockMap(map);
    double expected = 0;
    for (Index j = 0; j < n; ++j)
      expected = std::max(expected, u.apply(atoms[j]).norm());
    REQUIRE(incoherence(model, u, g).value() == Approx(expected).epsilon(1e-12));
  }
  SECTION("pauli instrument at q' = ln n stays below e sqrt(n)") {
    const Index n = 16;  // k = 4
    const double qPrime = std::log(double(n));
    const auto model = SparsityModel::schattenBall(n, qPrime / (qPrime - 1.0));
    const auto g = GroupDescriptor::twoSided(GroupDescriptor::pauliTensor(4));
    Eigen::MatrixXcd id = std::sqrt(double(n)) * Eigen::MatrixXcd::Identity(n, n);
    const Instrument u =
        Instrument::functionalRow(Eigen::Map<const Eigen::VectorXcd>(id.data(), n * n));
    REQUIRE_FALSE(u.wasRescaled());  // sqrt(n) Id has squared norm n^2 = N
    const double v = incoherence(model, u, g).value();
    const double e = 2.718281828459045235;
    REQUIRE(v <= e * std::sqrt(double(n)) + 1e-9);
    REQUIRE(v >= std::sqrt(double(n)) - 1e-9);
  }
  SECTION("incoherence is invariant along the group orbit") {
    const Index n = 10;
    const auto model = SparsityModel::canonicalL1(n);
    const auto g = GroupDescriptor::heisenbergWeyl(n);
    Rng rng(23);
    const Instrument u = Instrument::gaussianRow(n, rng);
    const double base = incoherence(model, u, g).value();
    for (int t = 0; t < 20; ++t) {
      const GroupElement e = sampleHaar(g, rng);
      // u sigma(g) has rows sigma(g)^* eta.
      const Instrument moved =
          Instrument::functionalRow(adjointApply(g, e, SignalVector{u.eta()}).data, false);
      REQUIRE(incoherence(model, moved, g).value() == Approx(base).epsilon(1e-9));
    }
  }
}

TEST_CASE("square-function incoherence for functional rows") {
  const Index n = 16;
  const double qPrime = std::log(double(n));
  Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
  const Instrument u =
      Instrument::functionalRow(Eigen::Map<const Eigen::VectorXcd>(id.data(), n * n));
  const double v = schattenSquareIncoherence(u, n, qPrime);
  // Both square functions equal sqrt(n) n^{1/q'} = e sqrt(n).
  const double e = 2.718281828459045235;
  REQUIRE(v == Approx(2.0 * e * std::sqrt(double(n))).epsilon(1e-12));
}

TEST_CASE("covariance") {
  SECTION("trace-normalized instrument on an isotropic group gives Id") {
    const Index n = 8;
    const auto g = GroupDescriptor::heisenbergWeyl(n);
    Rng rng(29);
    const Instrument u = Instrument::gaussianRow(n, rng);
    const CovarianceResult r = covariance(g, u);
    REQUIRE(r.deviationFromIdentity < 1e-10);
    REQUIRE(r.operatorNorm == Approx(1.0).margin(1e-10));
  }
  SECTION("identity block map gives Id exactly") {
    const Index n = 6;
    const auto g = GroupDescriptor::signShift(n);
    const Instrument u = Instrument::blockMap(Eigen::MatrixXcd::Identity(n, n));
    const CovarianceResult r = covariance(g, u);
    REQUIRE(r.deviationFromIdentity < 1e-13);
  }
  SECTION("half-mass instrument gives Id/2 by linearity") {
    const Index n = 8;
    const auto g = GroupDescriptor::heisenbergWeyl(n);
    Eigen::VectorXcd eta = Eigen::VectorXcd::Zero(n);
    for (Index i = 0; i < n / 2; ++i) eta[i] = 1.0;  // squared norm N/2
    const Instrument u = Instrument::functionalRow(eta, false);
    const CovarianceResult r = covariance(g, u);
    REQUIRE((r.phi - 0.5 * Eigen::MatrixXcd::Identity(n, n)).norm() < 1e-12);
    REQUIRE(r.operatorNorm == Approx(0.5).margin(1e-12));
  }
  SECTION("monte carlo covariance approaches Id") {
    const Index n = 4;
    const auto g = GroupDescriptor::heisenbergWeyl(n);
    const Instrument ones = Instrument::functionalRow(Eigen::VectorXcd::Ones(n));
    Rng rng(31);
    const CovarianceResult r = covarianceMC(g, ones, 20000, rng);
    REQUIRE(r.deviationFromIdentity < 0.2);
  }
}

TEST_CASE("measurement dimension mismatches are rejected") {
  const auto g = GroupDescriptor::heisenbergWeyl(4);
  const Instrument u = Instrument::functionalRow(Eigen::VectorXcd::Ones(5));
  REQUIRE_THROWS_AS(operatorFromElements(g, u, {identityElement(g)}), std::invalid_argument);
  Rng rng(1);
  REQUIRE_THROWS_AS(drawOperator(g, u, 3, rng), std::invalid_argument);
}
