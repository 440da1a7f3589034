#include "svet/tomography.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "svet/inequalities.hpp"
#include "test_support.hpp"

namespace svet {
namespace {

using T = Token;

const CountsTable& table1() {
  static const CountsTable t = load_counts(testing::data_path("lavoie_table1.csv")).table;
  return t;
}

const TomographyResult& table1_fit() {
  static const TomographyResult r = reconstruct(table1(), build_projectors(table1().phases()));
  return r;
}

void expect_valid_density_matrix(const DensityMatrix& rho) {
  const CMatrix& m = rho.entries();
  EXPECT_LE((m - m.adjoint()).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_NEAR(m.trace().real(), 1.0, 1e-9);
  EXPECT_GE(rho.eigenvalues()(0), -1e-9);
}

TEST(BuildProjectors, FullSchemeShape) {
  const auto p = build_projectors(AngleSet::optimal());
  ASSERT_EQ(p.size(), 216u);
  for (std::size_t i = 0; i < p.size(); ++i) {
    EXPECT_NEAR(p.items[i].ket.norm(), 1.0, 1e-14);
    EXPECT_EQ(triple_index(p.items[i].setting), i);
  }
  const auto& hhv = p.items[triple_index({T::H, T::H, T::V})].ket;
  EXPECT_NEAR(std::abs(hhv(1)), 1.0, 1e-15);
  EXPECT_NEAR(hhv.norm() - std::abs(hhv(1)), 0.0, 1e-15);

  EXPECT_EQ(svetlichny_projectors(AngleSet::optimal()).size(), 64u);
  EXPECT_EQ(complete_subset(AngleSet::optimal()).size(), 64u);
}

TEST(BuildProjectors, FirstCellOverlapWithGhz) {
  // <U+ U+ U+| ghz> from explicit kets: (e^{-i phi_c} + e^{-i(phi_a + phi_b)}) / 4
  const auto ang = AngleSet::optimal();
  const std::complex<double> amp =
      (std::polar(1.0, -ang.phi_c()) + std::polar(1.0, -(ang.phi_a() + ang.phi_b()))) / 4.0;
  const double oracle = std::norm(amp);
  EXPECT_NEAR(oracle, 0.0366, 1e-4);

  const auto p = build_projectors(ang);
  const auto& ket = p.items[triple_index({T::UPlus, T::UPlus, T::UPlus})].ket;
  EXPECT_NEAR(std::norm(ket.dot(ghz_state().amps())), oracle, 1e-15);
}

TEST(CompleteSubset, SpansOperatorSpace) {
  const auto p = complete_subset(AngleSet::optimal());
  Eigen::MatrixXcd frame(64, 64);
  for (std::size_t i = 0; i < 64; ++i) {
    const CMatrix proj = p.items[i].ket * p.items[i].ket.adjoint();
    frame.row(static_cast<Eigen::Index>(i)) = Eigen::Map<const Eigen::RowVectorXcd>(proj.data(), 64);
  }
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(frame);
  EXPECT_EQ(lu.rank(), 64);
}

TEST(LikelihoodModel, GradientMatchesFiniteDifferences) {
  const auto p = build_projectors(AngleSet::optimal());
  std::vector<double> counts;
  std::vector<CVector> kets;
  for (const auto& item : p.items) {
    counts.push_back(static_cast<double>(table1().at(item.setting)));
    kets.push_back(item.ket);
  }
  const LikelihoodModel model(counts, kets);

  std::mt19937_64 rng(12);
  std::normal_distribution<double> g(0.0, 0.5);
  std::vector<double> x(LikelihoodModel::kParameters);
  for (auto& v : x) v = g(rng);
  x.back() = std::log(250.0);

  std::vector<double> grad(x.size());
  model.negative_log_likelihood(x, grad);
  const double h = 1e-6;
  for (std::size_t k = 0; k < x.size(); ++k) {
    auto up = x, down = x;
    up[k] += h;
    down[k] -= h;
    const double fd = (model.negative_log_likelihood(up) - model.negative_log_likelihood(down)) / (2 * h);
    EXPECT_NEAR(grad[k], fd, 1e-4 * std::max(1.0, std::abs(fd))) << "parameter " << k;
  }
}

TEST(LikelihoodModel, DensityIsValidForArbitraryParameters) {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> x(LikelihoodModel::kParameters);
    for (auto& v : x) v = g(rng);
    expect_valid_density_matrix(DensityMatrix(LikelihoodModel::density(x)));
  }
  const auto start = LikelihoodModel::maximally_mixed_start(100.0);
  EXPECT_LE((LikelihoodModel::density(start) - CMatrix::Identity(8, 8) / 8.0).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Reconstruct, TableOneFidelity) {
  const auto& r = table1_fit();
  expect_valid_density_matrix(r.rho);
  EXPECT_TRUE(r.converged);
  EXPECT_GT(r.intensity, 0.0);
  const auto d = derived_quantities(r, table1().phases());
  EXPECT_NEAR(d.fidelity, 0.84, 0.02);
  EXPECT_NEAR(d.svetlichny, 4.48, 0.15);
}

TEST(Reconstruct, LikelihoodTraceIsMonotone) {
  const auto& trace = table1_fit().likelihood_trace;
  ASSERT_GT(trace.size(), 2u);
  for (std::size_t k = 1; k < trace.size(); ++k) EXPECT_GE(trace[k], trace[k - 1]);
  EXPECT_DOUBLE_EQ(trace.back(), table1_fit().log_likelihood);
}

TEST(Reconstruct, NoiselessGhzCounts) {
  const auto p = build_projectors(AngleSet::optimal());
  const auto counts = expected_counts(DensityMatrix::pure(ghz_state()), p, 1e4);
  const auto r = reconstruct(counts, p);
  EXPECT_GE(fidelity(r.rho, ghz_state()), 0.999);
  EXPECT_NEAR(r.intensity, 1e4, 50.0);
}

TEST(Reconstruct, MaximallyMixedCounts) {
  const auto p = build_projectors(AngleSet::optimal());
  const auto mixed = DensityMatrix::maximally_mixed(8);
  const auto r = reconstruct(expected_counts(mixed, p, 1e4), p);
  EXPECT_LE(trace_distance(r.rho, mixed), 0.05);
}

TEST(Reconstruct, RandomStatesRoundTrip) {
  std::mt19937_64 rng(31);
  const auto p = build_projectors(AngleSet::optimal());
  TomographyOptions opts;
  opts.restarts = 1;
  for (int trial = 0; trial < 4; ++trial) {
    const auto rho = trial % 2 ? testing::random_mixed_state(rng) : testing::random_pure_state(rng);
    const auto r = reconstruct(sample_counts(rho, p, 1e5, 100 + static_cast<std::uint64_t>(trial)), p, opts);
    EXPECT_LE(trace_distance(r.rho, rho), 0.02) << "trial " << trial;
  }
}

TEST(Reconstruct, MissingCountIsAnError) {
  CountsTable t = table1();
  CountsTable partial(t.phases());
  t.for_each([&](const SettingTriple& s, std::int64_t n) {
    if (triple_index(s) != 5) partial.set(s, n);
  });
  EXPECT_THROW(reconstruct(partial, build_projectors(t.phases())), ValidationError);
}

TEST(Reconstruct, DeterministicGivenOptions) {
  const auto p = svetlichny_projectors(AngleSet::optimal());
  TomographyOptions opts;
  opts.restarts = 2;
  const auto a = reconstruct(table1(), p, opts);
  const auto b = reconstruct(table1(), p, opts);
  EXPECT_EQ(a.log_likelihood, b.log_likelihood);
  EXPECT_EQ(a.rho.entries(), b.rho.entries());
}

TEST(DerivedQuantities, ReferenceStates) {
  const auto ghz = derived_quantities(DensityMatrix::pure(ghz_state()), AngleSet::optimal());
  EXPECT_NEAR(ghz.fidelity, 1.0, 1e-15);
  EXPECT_NEAR(ghz.svetlichny, 5.657, 1e-3);
  EXPECT_NEAR(ghz.eigenvalues(7), 1.0, 1e-12);
  EXPECT_NEAR(ghz.real_part(1, 6), 0.5, 1e-15);

  const auto mixed = derived_quantities(DensityMatrix::maximally_mixed(8), AngleSet::optimal());
  EXPECT_NEAR(mixed.svetlichny, 0.0, 1e-15);
  EXPECT_NEAR(mixed.fidelity, 0.125, 1e-15);
}

TEST(DensityMatrixText, WriteThenRead) {
  std::ostringstream out;
  write_density_matrix(out, table1_fit());
  const std::string text = out.str();
  EXPECT_NE(text.find("converged=true"), std::string::npos);
  EXPECT_NE(text.find("[real]"), std::string::npos);

  std::istringstream in(text);
  const auto back = read_density_matrix(in);
  EXPECT_LE((back.entries() - table1_fit().rho.entries()).cwiseAbs().maxCoeff(), 1e-11);

  std::istringstream truncated("[real]\n1 0 0\n");
  EXPECT_THROW(read_density_matrix(truncated), ParseError);
}

}  // namespace
}  // namespace svet
