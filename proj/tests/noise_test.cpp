#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "spinmem/errors.hpp"
#include "spinmem/noise/dephasing.hpp"
#include "spinmem/parallel.hpp"
#include "spinmem/protocol/session.hpp"
#include "test_support.hpp"

namespace spinmem {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kMHz = 1e6;

const QubitState kPlus{{1.0 / std::numbers::sqrt2, 0.0},
                       {1.0 / std::numbers::sqrt2, 0.0}};

QubitRegister probe_and_chain(int n) {
  std::vector<QubitLabel> labels{flying(2)};
  for (int k = 1; k <= n; ++k) labels.push_back(chain(k));
  return QubitRegister(labels);
}

RestrictedState random_restricted(const QubitRegister& reg, PortableRng& rng) {
  std::vector<Complex> amps(reg.size() + 1);
  double norm2 = 0.0;
  for (auto& a : amps) {
    a = testing::complex_normal(rng);
    norm2 += std::norm(a);
  }
  for (auto& a : amps) a /= std::sqrt(norm2);
  return RestrictedState(reg, std::move(amps));
}

// Mixture of two random sector states.
DensityMatrix random_restricted_density(int n, std::uint64_t seed) {
  PortableRng rng(seed);
  const auto reg = probe_and_chain(n);
  const auto a = density_from_state(random_restricted(reg, rng));
  const auto b = density_from_state(random_restricted(reg, rng));
  return DensityMatrix(reg, 0.6 * a.matrix() + 0.4 * b.matrix(),
                       Subspace::RestrictedOneExcitation);
}

// Closed-form Lindblad solution in the full basis: with L_k = sqrt(G_k/2) Z_k
// each element decays at the summed rate of the chain sites whose bits differ.
Eigen::MatrixXcd full_basis_dephasing(const DensityMatrix& full,
                                      const std::vector<double>& rates,
                                      double tau) {
  const auto& reg = full.qubits();
  Eigen::MatrixXcd m = full.matrix();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      double rate = 0.0;
      for (const auto& q : reg.labels()) {
        if (q.role != QubitRole::Chain) continue;
        const auto mask = static_cast<Eigen::Index>(reg.bit_mask(q));
        if ((i & mask) != (j & mask)) rate += rates[static_cast<std::size_t>(q.index - 1)];
      }
      m(i, j) *= std::exp(-rate * tau);
    }
  }
  return m;
}

double max_diff(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

TEST(DephasingProfile, Factories) {
  const auto h = DephasingProfile::homogeneous(5, 2.0);
  EXPECT_EQ(h.kind(), DephasingProfile::Kind::Homogeneous);
  EXPECT_EQ(h.chain_length(), 5);
  EXPECT_DOUBLE_EQ(h.rate(3), 2.0);

  const auto s = DephasingProfile::single_site(5, 2, kMHz);
  EXPECT_EQ(s.site(), 2);
  EXPECT_DOUBLE_EQ(s.rate(2), kMHz);
  EXPECT_DOUBLE_EQ(s.rate(1), 0.0);
  EXPECT_DOUBLE_EQ(s.max_rate(), kMHz);

  EXPECT_THROW(DephasingProfile::single_site(5, 6, 1.0), ValidationError);
  EXPECT_THROW(DephasingProfile::arbitrary({1.0, -0.5}), ValidationError);
  EXPECT_THROW(DephasingProfile::arbitrary({}), ValidationError);
  EXPECT_THROW(h.rate(0), ValidationError);
}

TEST(Dephase, ZeroTimeAndZeroRatesAreIdentity) {
  const auto rho = random_restricted_density(4, 11);
  const auto prof = DephasingProfile::homogeneous(4, kMHz);
  for (auto method : {DephasingMethod::Exact, DephasingMethod::RK4}) {
    EXPECT_EQ(dephase(rho, prof, 0.0, method).matrix(), rho.matrix());
    EXPECT_EQ(dephase(rho, DephasingProfile::homogeneous(4, 0.0), 3e-6, method)
                  .matrix(),
              rho.matrix());
  }
  EXPECT_EQ(dephase(rho, DephasingProfile::homogeneous(4, 0.0),
                    std::numeric_limits<double>::infinity())
                .matrix(),
            rho.matrix());
}

TEST(Dephase, Refusals) {
  const auto rho = random_restricted_density(3, 12);
  const auto prof = DephasingProfile::homogeneous(3, kMHz);
  EXPECT_THROW(dephase(rho, prof, -1e-9), ValidationError);
  EXPECT_THROW(dephase(to_full(rho), prof, 1e-6), ValidationError);
  EXPECT_THROW(dephase(rho, prof, std::numeric_limits<double>::infinity(),
                       DephasingMethod::RK4),
               ValidationError);
}

TEST(Dephase, ExactMatchesFullBasisLindbladSolution) {
  const std::vector<double> rates{0.3e6, 1.0e6, 0.0, 2.5e6};
  const auto prof = DephasingProfile::arbitrary(rates);
  const auto rho = random_restricted_density(4, 13);
  for (double tau : {1e-7, 1e-6, 4e-6}) {
    const auto got = to_full(dephase(rho, prof, tau));
    const auto want = full_basis_dephasing(to_full(rho), rates, tau);
    EXPECT_LT(max_diff(got.matrix(), want), 1e-14) << "tau=" << tau;
  }
}

TEST(Dephase, TraceAndDiagonalPreserved) {
  const auto rho = random_restricted_density(6, 14);
  const auto prof = DephasingProfile::arbitrary({1e6, 0.0, 3e6, 0.5e6, 2e6, 1e6});
  for (auto method : {DephasingMethod::Exact, DephasingMethod::RK4}) {
    for (double tau : {1e-7, 2e-6, 3e-6}) {
      const auto out = dephase(rho, prof, tau, method);
      EXPECT_LT(std::abs(out.trace() - rho.trace()), 1e-10);
      EXPECT_LT((out.matrix().diagonal() - rho.matrix().diagonal())
                    .cwiseAbs()
                    .maxCoeff(),
                1e-10);
      EXPECT_LT(out.hermiticity_defect(), 1e-12);
    }
  }
}

TEST(Dephase, RK4AgreesWithExact) {
  const auto rho = random_restricted_density(5, 15);
  const auto prof = DephasingProfile::arbitrary({1e6, 2e6, 0.0, 0.7e6, 1e6});
  // Gamma_max tau up to 10.
  for (double tau : {1e-7, 1e-6, 2.5e-6, 5e-6}) {
    const auto exact = dephase(rho, prof, tau, DephasingMethod::Exact);
    const auto rk4 = dephase(rho, prof, tau, DephasingMethod::RK4);
    EXPECT_LT(max_diff(exact.matrix(), rk4.matrix()), 1e-8) << "tau=" << tau;
  }
}

TEST(Dephase, InfiniteTimeKillsAffectedCoherencesOnly) {
  const auto rho = random_restricted_density(3, 16);
  const auto out = dephase(rho, DephasingProfile::single_site(3, 2, kMHz),
                           std::numeric_limits<double>::infinity());
  // Sector index 3 is s2 down (register f2 s1 s2 s3).
  for (Eigen::Index j = 0; j < 5; ++j) {
    if (j == 3) continue;
    EXPECT_EQ(out.matrix()(3, j), Complex{});
    EXPECT_EQ(out.matrix()(j, 3), Complex{});
  }
  EXPECT_EQ(out.matrix()(1, 2), rho.matrix()(1, 2));
  EXPECT_EQ(out.matrix()(0, 4), rho.matrix()(0, 4));
  EXPECT_EQ(out.matrix()(3, 3), rho.matrix()(3, 3));
}

TEST(FidelityCurve, MatchesDenseDensityPipeline) {
  constexpr int n = 4;
  const double theta = 1.0;
  const auto sched = ThetaSchedule::uniform(theta);
  const std::vector<double> rates{1e6, 0.4e6, 0.0, 2e6};
  const auto prof = DephasingProfile::arbitrary(rates);
  const std::vector<double> taus{0.0, 3e-7, 1e-6, 5e-6};
  const QubitState input{{0.6, 0.0}, {0.0, 0.8}};
  const auto curve = fidelity_curve(input, n, sched, prof, taus);

  // Dense reference: full-space encode, full-basis dephasing, full read.
  const std::array<QubitState, 1> in{input};
  const auto inputs = product_state(QubitRegister({flying(1)}), in);
  const std::array<ThetaSchedule, 1> scheds{sched};
  const auto session = encode_sequence(inputs, n, scheds, ExchangeModel::XY);
  const std::array<QubitLabel, n> sites{chain(1), chain(2), chain(3), chain(4)};
  const auto stored = with_polarised_qubit(
      partial_trace(session.state(), sites), flying(2), Placement::Front);
  const std::array<QubitLabel, 1> probe{flying(2)};
  const QubitRegister f1({flying(1)});
  const auto target = product_state(f1, in);

  ASSERT_EQ(curve.size(), taus.size());
  for (std::size_t i = 0; i < taus.size(); ++i) {
    DensityMatrix rho(stored.qubits(),
                      full_basis_dephasing(stored, rates, taus[i]));
    apply_pass(rho, flying(2), n, sched, ExchangeModel::XY, PassDirection::Read);
    const auto out = relabeled(partial_trace(rho, probe), f1);
    EXPECT_NEAR(curve[i].tau, taus[i], 0.0);
    EXPECT_NEAR(curve[i].fidelity_raw, fidelity_pure(out, target), 1e-12);
    EXPECT_NEAR(curve[i].fidelity_corrected,
                fidelity_pure(phase_corrected(out), target), 1e-12);
  }
}

TEST(FidelityCurve, LocalStorageSaturatesAtOneHalfOnFirstSite) {
  constexpr int n = 100;
  const auto sched = ThetaSchedule::uniform(kPi / 2);
  const std::vector<double> taus{0.0, 1e-6, 5e-6,
                                 std::numeric_limits<double>::infinity()};
  const auto curve = fidelity_curve(
      kPlus, n, sched, DephasingProfile::single_site(n, 1, kMHz), taus);
  EXPECT_NEAR(curve.front().fidelity_corrected, 1.0, 1e-12);
  EXPECT_NEAR(curve.back().fidelity_corrected, 0.5, 1e-12);
  // Single coherence decaying as exp(-Gamma tau): F = (1 + e^{-Gamma tau}) / 2.
  EXPECT_NEAR(curve[1].fidelity_corrected, 0.5 * (1 + std::exp(-1.0)), 1e-12);
}

TEST(FidelityCurve, LocalStorageIgnoresOtherSites) {
  constexpr int n = 100;
  const auto sched = ThetaSchedule::uniform(kPi / 2);
  const std::vector<double> taus{0.0, 1e-6,
                                 std::numeric_limits<double>::infinity()};
  for (int site : {2, 3, 50, 100}) {
    const auto curve = fidelity_curve(
        kPlus, n, sched, DephasingProfile::single_site(n, site, kMHz), taus);
    for (const auto& pt : curve) {
      EXPECT_NEAR(pt.fidelity_corrected, 1.0, 1e-12) << "site " << site;
    }
  }
}

TEST(FidelityCurve, PhaseCorrectionOnlyFlipsTheCoherence) {
  constexpr int n = 6;
  const auto curve = fidelity_curve(
      kPlus, n, ThetaSchedule::uniform(1.0),
      DephasingProfile::homogeneous(n, kMHz), std::vector<double>{0.0, 1e-6});
  for (const auto& pt : curve) {
    EXPECT_LT(pt.fidelity_raw, 0.5);
    EXPECT_GT(pt.fidelity_corrected, 0.5);
  }
}

TEST(FidelityCurve, SingleSiteCurvesAreMonotone) {
  constexpr int n = 30;
  std::vector<double> taus;
  for (int i = 0; i <= 40; ++i) taus.push_back(i * 2.5e-7);
  taus.push_back(std::numeric_limits<double>::infinity());
  for (int site : {1, 5, 17, 30}) {
    const auto curve =
        fidelity_curve(kPlus, n, ThetaSchedule::uniform(0.6),
                       DephasingProfile::single_site(n, site, kMHz), taus);
    for (std::size_t i = 1; i < curve.size(); ++i) {
      EXPECT_LE(curve[i].fidelity_corrected,
                curve[i - 1].fidelity_corrected + 1e-15)
          << "site " << site << " tau " << taus[i];
    }
  }
}

TEST(FidelityCurve, RK4PipelineAgreesWithExact) {
  constexpr int n = 12;
  const auto prof = DephasingProfile::homogeneous(n, kMHz);
  const std::vector<double> taus{2e-7, 1e-6, 4e-6};
  FidelityCurveOptions rk4;
  rk4.method = DephasingMethod::RK4;
  const auto a = fidelity_curve(kPlus, n, ThetaSchedule::uniform(0.9), prof, taus);
  const auto b =
      fidelity_curve(kPlus, n, ThetaSchedule::uniform(0.9), prof, taus, rk4);
  for (std::size_t i = 0; i < taus.size(); ++i) {
    EXPECT_NEAR(a[i].fidelity_corrected, b[i].fidelity_corrected, 1e-8);
  }
}

TEST(FidelityCurve, WorkerCountDoesNotChangeResults) {
  constexpr int n = 20;
  std::vector<double> taus;
  for (int i = 0; i < 17; ++i) taus.push_back(i * 3e-7);
  const auto prof = DephasingProfile::homogeneous(n, kMHz);
  FidelityCurveOptions one;
  one.workers = 1;
  FidelityCurveOptions many;
  many.workers = 5;
  const auto a = fidelity_curve(kPlus, n, ThetaSchedule::uniform(0.7), prof, taus, one);
  const auto b = fidelity_curve(kPlus, n, ThetaSchedule::uniform(0.7), prof, taus, many);
  for (std::size_t i = 0; i < taus.size(); ++i) {
    EXPECT_EQ(a[i].fidelity_raw, b[i].fidelity_raw);
    EXPECT_EQ(a[i].fidelity_corrected, b[i].fidelity_corrected);
  }
}

TEST(FidelityCurve, RejectsBadInputs) {
  const auto prof = DephasingProfile::homogeneous(4, kMHz);
  EXPECT_THROW(fidelity_curve(QubitState{{1.0, 0.0}, {1.0, 0.0}}, 4,
                              ThetaSchedule::uniform(1.0), prof,
                              std::vector<double>{0.0}),
               ValidationError);
  EXPECT_THROW(fidelity_curve(kPlus, 4, ThetaSchedule::uniform(1.0), prof,
                              std::vector<double>{-1.0}),
               ValidationError);
}

TEST(ParallelMap, PreservesOrderAndPropagatesErrors) {
  const auto out = parallel_map(
      100, [](std::size_t i) { return static_cast<int>(i * i); }, 7);
  for (std::size_t i = 0; i < out.size(); ++i) EXPECT_EQ(out[i], int(i * i));
  EXPECT_THROW(parallel_map(
                   10,
                   [](std::size_t i) -> int {
                     if (i == 6) throw ToleranceError("boom");
                     return 0;
                   },
                   3),
               ToleranceError);
  EXPECT_TRUE(parallel_map(0, [](std::size_t) { return 1; }).empty());
}

}  // namespace
}  // namespace spinmem
