#include <bit>
#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "spinmem/errors.hpp"
#include "spinmem/protocol/chain_sizing.hpp"
#include "spinmem/protocol/gate.hpp"
#include "spinmem/protocol/session.hpp"
#include "test_support.hpp"

namespace spinmem {
namespace {

constexpr double kHalfPi = std::numbers::pi / 2;
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

StateVector single(const QubitState& q) {
  return StateVector(QubitRegister({flying(1)}), {q.up, q.down});
}

StateVector product(std::initializer_list<QubitState> qs) {
  std::vector<QubitLabel> labels;
  for (std::size_t i = 1; i <= qs.size(); ++i)
    labels.push_back(flying(static_cast<int>(i)));
  return product_state(QubitRegister(labels),
                       std::span<const QubitState>(qs.begin(), qs.size()));
}

QubitState random_qubit(PortableRng& rng) {
  Complex a = testing::complex_normal(rng);
  Complex b = testing::complex_normal(rng);
  const double n = std::sqrt(std::norm(a) + std::norm(b));
  return {a / n, b / n};
}

DensityMatrix pure_density(const QubitState& q) {
  return density_from_state(single(q));
}

double fidelity(const DensityMatrix& rho, const QubitState& q) {
  return fidelity_pure(relabeled(rho, QubitRegister({flying(1)})), single(q));
}

TEST(InteractionUnitary, XYAtSwapPoint) {
  const Gate4 u = interaction_unitary({kHalfPi, ExchangeModel::XY});
  EXPECT_EQ(u(1, 1), Complex(0.0));
  EXPECT_EQ(u(2, 2), Complex(0.0));
  EXPECT_EQ(u(1, 2), Complex(0.0, -1.0));
  EXPECT_EQ(u(2, 1), Complex(0.0, -1.0));
  EXPECT_EQ(u(0, 0), Complex(1.0));
  EXPECT_EQ(u(3, 3), Complex(1.0));
}

TEST(InteractionUnitary, ZeroAngleIsIdentity) {
  EXPECT_EQ(interaction_unitary({0.0, ExchangeModel::XY}), Gate4::Identity());
}

TEST(InteractionUnitary, HeisenbergAtSwapPointIsExactSwap) {
  const Gate4 u = interaction_unitary({kHalfPi, ExchangeModel::Heisenberg});
  Gate4 swap = Gate4::Zero();
  swap(0, 0) = swap(3, 3) = swap(1, 2) = swap(2, 1) = 1.0;
  EXPECT_LT(testing::max_abs_diff(u, swap), 1e-15);
}

TEST(InteractionUnitary, HeisenbergIsXYWithPhaseOnTrigTerms) {
  for (double theta : {0.1, 0.7, 1.3}) {
    const Gate4 xy = interaction_unitary({theta, ExchangeModel::XY});
    const Gate4 h = interaction_unitary({theta, ExchangeModel::Heisenberg});
    const Complex p = std::polar(1.0, theta);
    EXPECT_LT(std::abs(h(1, 1) - xy(1, 1) * p), 1e-15);
    EXPECT_LT(std::abs(h(1, 2) - xy(1, 2) * p), 1e-15);
    EXPECT_EQ(h(0, 0), Complex(1.0));
    EXPECT_LT(unitarity_defect(h), 1e-14);
    EXPECT_LT(unitarity_defect(xy), 1e-14);
  }
}

TEST(WritePass, SpinUpLeavesEverythingUnchanged) {
  MemorySession s = encode_sequence(
      single(kSpinUp), 6, std::array{ThetaSchedule::uniform(0.9)},
      ExchangeModel::XY);
  EXPECT_EQ(s.state()[0], Complex(1.0));
  EXPECT_NEAR(s.state().norm(), 1.0, 1e-15);
  EXPECT_EQ(std::abs(s.state()[0]), 1.0);
}

TEST(WritePass, DownSpinSpreadsGeometrically) {
  for (auto model : {ExchangeModel::XY}) {
    const int n = 7;
    const double theta = 0.83;
    MemorySession s = encode_sequence(
        single(kSpinDown), n, std::array{ThetaSchedule::uniform(theta)}, model);
    const auto& st = s.state();
    EXPECT_NEAR(std::abs(st[std::size_t{1} << n] - std::pow(std::cos(theta), n)),
                0.0, 1e-14);
    for (int k = 1; k <= n; ++k) {
      const Complex expected{0.0, -std::sin(theta) *
                                      std::pow(std::cos(theta), k - 1)};
      EXPECT_NEAR(std::abs(st[std::size_t{1} << (n - k)] - expected), 0.0,
                  1e-14)
          << "site " << k;
    }
    EXPECT_NEAR(st.probability_down(flying(1)), std::pow(std::cos(theta), 2 * n),
                1e-15);
  }
}

TEST(WritePass, SingleSiteSwapIsExact) {
  MemorySession s = encode_sequence(single(kSpinDown), 1,
                                    std::array{ThetaSchedule::uniform(kHalfPi)},
                                    ExchangeModel::XY);
  EXPECT_EQ(s.state()[1], Complex(0.0, -1.0));
  EXPECT_EQ(s.state()[0], Complex(0.0));
  EXPECT_EQ(s.state()[2], Complex(0.0));
  EXPECT_EQ(s.state()[3], Complex(0.0));
}

TEST(WritePass, LogsPassAndRejectsUnknownFlying) {
  MemorySession s = open_session(single(kSpinDown), 3);
  write_pass(s, 1, ThetaSchedule::uniform(0.5), ExchangeModel::XY);
  ASSERT_EQ(s.log().size(), 1u);
  EXPECT_EQ(s.log()[0].direction, PassDirection::Write);
  EXPECT_THROW(write_pass(s, 2, ThetaSchedule::uniform(0.5), ExchangeModel::XY),
               ValidationError);
}

TEST(WritePass, OutOfRangeAngleWarnsButRuns) {
  MemorySession s = open_session(single(kSpinDown), 3);
  write_pass(s, 1, ThetaSchedule::uniform(2.0), ExchangeModel::XY);
  EXPECT_EQ(s.warnings().size(), 1u);
  EXPECT_NEAR(s.state().norm(), 1.0, 1e-14);
}

TEST(WritePass, GateOrderIsSiteOneFirst) {
  // With per-site angles the amplitude on site k must be
  // -i sin(t_k) prod_{j<k} cos(t_j).
  const std::vector<double> angles = {0.3, 0.9, 1.2, 0.5};
  MemorySession s = encode_sequence(
      single(kSpinDown), 4, std::array{ThetaSchedule::per_site(angles)},
      ExchangeModel::XY);
  double carry = 1.0;
  for (int k = 1; k <= 4; ++k) {
    const Complex expected{0.0, -std::sin(angles[k - 1]) * carry};
    EXPECT_NEAR(std::abs(s.state()[std::size_t{1} << (4 - k)] - expected), 0.0,
                1e-15);
    carry *= std::cos(angles[k - 1]);
  }
}

TEST(ReadPass, UntouchedChainIsInvariant) {
  MemorySession s = open_session(single(kSpinUp), 5);
  std::array sched{ThetaSchedule::uniform(0.8)};
  DecodeResult r = decode_sequence(s, 1, sched, ExchangeModel::XY, false);
  EXPECT_EQ(std::abs(s.state()[0]), 1.0);
  EXPECT_NEAR(fidelity(r.retrieved[0], kSpinUp), 1.0, 1e-15);
}

TEST(ReadPass, WarnsWhenProbeIsNotUp) {
  MemorySession s = open_session(product({kSpinDown, kSpinDown}), 2);
  read_pass(s, 2, ThetaSchedule::uniform(0.8), ExchangeModel::XY);
  ASSERT_FALSE(s.warnings().empty());
}

TEST(RoundTrip, XYReturnsPhaseFlippedInput) {
  PortableRng rng(101);
  const double theta = 1.0;
  const int n = min_chain_length(theta, 1e-4, EpsilonConvention::ProbabilityCos2N);
  for (int trial = 0; trial < 10; ++trial) {
    const QubitState q = random_qubit(rng);
    std::array sched{ThetaSchedule::uniform(theta)};
    MemorySession s = encode_sequence(single(q), n, sched, ExchangeModel::XY);
    DecodeResult r = decode_sequence(s, 1, sched, ExchangeModel::XY, false);
    const QubitState flipped{q.up, -q.down};
    // Leakage cos^2N on the write plus the same amount left behind by the
    // read: the worst case (a down input) loses 2 cos^2N - cos^4N.
    const double bound = 2.0 * std::pow(std::cos(theta), 2 * n);
    EXPECT_LE(1.0 - fidelity(r.retrieved[0], flipped), bound);
    EXPECT_LE(1.0 - fidelity(r.retrieved_corrected[0], q), bound);
  }
}

TEST(RoundTrip, DownInputLossIsTwiceTheLeakage) {
  for (double theta : {0.6, 1.0, 1.3}) {
    for (int n : {3, 6, 9}) {
      std::array sched{ThetaSchedule::uniform(theta)};
      MemorySession s =
          encode_sequence(single(kSpinDown), n, sched, ExchangeModel::XY);
      DecodeResult r = decode_sequence(s, 1, sched, ExchangeModel::XY, false);
      const double c2n = std::pow(std::cos(theta), 2 * n);
      EXPECT_NEAR(1.0 - fidelity(r.retrieved[0], kSpinDown),
                  2.0 * c2n - c2n * c2n, 1e-14);
    }
  }
}

TEST(RoundTrip, HeisenbergAtSwapPointHasNoPhaseFlip) {
  const QubitState q{{0.6, 0.0}, {0.0, 0.8}};
  std::array sched{ThetaSchedule::uniform(kHalfPi)};
  MemorySession s =
      encode_sequence(single(q), 3, sched, ExchangeModel::Heisenberg);
  DecodeResult r =
      decode_sequence(s, 1, sched, ExchangeModel::Heisenberg, false);
  EXPECT_NEAR(fidelity(r.retrieved[0], q), 1.0, 1e-14);
  EXPECT_LT(testing::max_abs_diff(r.retrieved[0].matrix(),
                                  pure_density(q).matrix()),
            1e-14);
}

TEST(RoundTrip, RestrictedSessionMatchesDense) {
  const QubitState q{{0.6, 0.0}, {0.48, 0.64}};
  for (auto model : {ExchangeModel::XY, ExchangeModel::Heisenberg}) {
    std::array sched{ThetaSchedule::uniform(0.9)};
    MemorySession d = encode_sequence(single(q), 6, sched, model);
    RestrictedSession r = encode_single_restricted(q, 6, sched[0], model);
    DecodeResult rd = decode_sequence(d, 1, sched, model, false);
    DecodeResult rr = decode_sequence(r, 1, sched, model, false);
    EXPECT_LT(testing::max_abs_diff(rd.retrieved[0].matrix(),
                                    rr.retrieved[0].matrix()),
              1e-14);
  }
}

TEST(Encode, AllUpInputsLeaveChainFerromagnetic) {
  std::array sched{ThetaSchedule::uniform(0.7)};
  MemorySession s = encode_sequence(product({kSpinUp, kSpinUp, kSpinUp}), 5,
                                    sched, ExchangeModel::XY);
  EXPECT_EQ(s.state()[0], Complex(1.0));
}

TEST(Encode, SwapPointStoresQubitsInReverseOrder) {
  PortableRng rng(7);
  const QubitState q1 = random_qubit(rng);
  const QubitState q2 = random_qubit(rng);
  const QubitState q3 = random_qubit(rng);
  std::array sched{ThetaSchedule::uniform(kHalfPi)};
  MemorySession s = encode_sequence(product({q1, q2, q3}), 5, sched,
                                    ExchangeModel::XY);
  // Last-written qubit on s1, first-written on s3, the rest up.
  EXPECT_NEAR(s.state().probability_down(chain(1)), std::norm(q3.down), 1e-14);
  EXPECT_NEAR(s.state().probability_down(chain(2)), std::norm(q2.down), 1e-14);
  EXPECT_NEAR(s.state().probability_down(chain(3)), std::norm(q1.down), 1e-14);
  EXPECT_NEAR(s.state().probability_down(chain(4)), 0.0, 1e-14);
  EXPECT_NEAR(s.state().probability_down(chain(5)), 0.0, 1e-14);
  for (int i = 1; i <= 3; ++i)
    EXPECT_NEAR(s.state().probability_down(flying(i)), 0.0, 1e-14);
}

TEST(Encode, ScheduleCountMustMatch) {
  std::vector<ThetaSchedule> two = {ThetaSchedule::uniform(1.0),
                                    ThetaSchedule::uniform(1.1)};
  EXPECT_THROW(encode_sequence(product({kSpinUp, kSpinUp, kSpinUp}), 3, two,
                               ExchangeModel::XY),
               ValidationError);
}

TEST(Encode, RegisterCapIsEnforced) {
  std::array sched{ThetaSchedule::uniform(1.0)};
  EXPECT_THROW(encode_sequence(product({kSpinUp, kSpinUp}), 23, sched,
                               ExchangeModel::XY),
               ValidationError);
}

TEST(Invariants, ExcitationNumberIsConserved) {
  PortableRng rng(99);
  for (auto model : {ExchangeModel::XY, ExchangeModel::Heisenberg}) {
    // f1 down, f2 up, f3 down: two excitations throughout.
    StateVector in = product({kSpinDown, kSpinUp, kSpinDown});
    std::vector<ThetaSchedule> sched;
    for (int i = 0; i < 3; ++i)
      sched.push_back(ThetaSchedule::random_band(1.0, 0.3, 5, rng.next_u64()));
    MemorySession s = encode_sequence(in, 5, sched, model);
    DecodeResult r = decode_sequence(s, 2, std::span(sched).first(2), model,
                                     false);
    (void)r;
    double outside = 0.0;
    for (std::size_t i = 0; i < s.state().dimension(); ++i) {
      if (std::popcount(i) != 2) outside += std::norm(s.state()[i]);
    }
    EXPECT_LT(outside, 1e-28);
  }
}

TEST(Invariants, SwapPointDoublePassReturnsQubitsUpToPhases) {
  PortableRng rng(17);
  const QubitState q1 = random_qubit(rng);
  const QubitState q2 = random_qubit(rng);
  const QubitState q3 = random_qubit(rng);
  std::array sched{ThetaSchedule::uniform(kHalfPi)};
  MemorySession s = encode_sequence(product({q1, q2, q3}), 4, sched,
                                    ExchangeModel::XY);
  DecodeResult r = decode_sequence(s, 3, sched, ExchangeModel::XY, false);
  // Retrieval order reverses: probe 1 carries q3.
  const QubitState expected[] = {q3, q2, q1};
  for (int i = 0; i < 3; ++i) {
    const auto& m = r.retrieved[static_cast<std::size_t>(i)].matrix();
    EXPECT_NEAR(m(0, 0).real(), std::norm(expected[i].up), 1e-14);
    EXPECT_NEAR(m(1, 1).real(), std::norm(expected[i].down), 1e-14);
    EXPECT_NEAR(std::abs(m(0, 1)), std::abs(expected[i].up * expected[i].down),
                1e-14);
  }
}

TEST(Invariants, DecodeReversesEncodeOrder) {
  std::array sched{ThetaSchedule::uniform(1.1)};
  MemorySession s = encode_sequence(product({kSpinDown, kSpinUp}), 10, sched,
                                    ExchangeModel::XY);
  DecodeResult r = decode_sequence(s, 2, sched, ExchangeModel::XY, true);
  EXPECT_GT(fidelity(r.retrieved[0], kSpinUp), 0.999);
  EXPECT_GT(fidelity(r.retrieved[1], kSpinDown), 0.999);
  // Joint state is ordered like the inputs.
  EXPECT_GT(fidelity_pure(r.joint, product({kSpinDown, kSpinUp})), 0.999);
}

TEST(Decode, WarnsWhenDecodingMoreThanStored) {
  std::array sched{ThetaSchedule::uniform(1.0)};
  MemorySession s =
      encode_sequence(single(kSpinDown), 6, sched, ExchangeModel::XY);
  decode_sequence(s, 2, sched, ExchangeModel::XY, false);
  bool found = false;
  for (const auto& w : s.warnings())
    found = found || w.find("only 1") != std::string::npos;
  EXPECT_TRUE(found);
}

TEST(Decode, PhaseCorrectionFlagActsOnSessionState) {
  const QubitState q{{kInvSqrt2, 0.0}, {kInvSqrt2, 0.0}};
  std::array sched{ThetaSchedule::uniform(kHalfPi)};
  MemorySession s = encode_sequence(single(q), 2, sched, ExchangeModel::XY);
  decode_sequence(s, 1, sched, ExchangeModel::XY, true);
  const QubitLabel keep[] = {flying(2)};
  EXPECT_NEAR(fidelity(partial_trace(s.state(), keep), q), 1.0, 1e-14);
}

TEST(BellStates, RoundTripInfidelities) {
  std::array sched{ThetaSchedule::uniform(1.1)};
  const QubitRegister reg({flying(1), flying(2)});
  const StateVector phi(reg, {kInvSqrt2, 0.0, 0.0, -kInvSqrt2});
  const StateVector psi(reg, {0.0, kInvSqrt2, -kInvSqrt2, 0.0});
  MemorySession a = encode_sequence(phi, 8, sched, ExchangeModel::XY);
  MemorySession b = encode_sequence(psi, 8, sched, ExchangeModel::XY);
  const double fa =
      fidelity_pure(decode_sequence(a, 2, sched, ExchangeModel::XY, false).joint,
                    phi);
  const double fb =
      fidelity_pure(decode_sequence(b, 2, sched, ExchangeModel::XY, false).joint,
                    psi);
  EXPECT_NEAR(1.0 - fa, 3e-4, 0.5e-4);
  EXPECT_NEAR(1.0 - fb, 7e-4, 0.5e-4);
}

TEST(ChainSizing, ProbabilityConvention) {
  const auto p = EpsilonConvention::ProbabilityCos2N;
  EXPECT_EQ(min_chain_length(1.0, 1e-4, p), 8);
  EXPECT_NEAR(min_chain_length(0.1, 1e-4, p), 920, 1);
  EXPECT_EQ(min_chain_length(1.1, 1e-4, p), 6);
  EXPECT_EQ(min_chain_length(kHalfPi, 1e-4, p), 1);
}

TEST(ChainSizing, ResultIsTheSmallestSatisfyingLength) {
  for (double theta : {0.2, 0.5, 0.9, 1.3}) {
    for (auto c : {EpsilonConvention::ProbabilityCos2N,
                   EpsilonConvention::AmplitudeCosN}) {
      const int n = min_chain_length(theta, 1e-3, c);
      const double e = c == EpsilonConvention::ProbabilityCos2N ? 2.0 : 1.0;
      EXPECT_LT(std::pow(std::cos(theta), e * n), 1e-3);
      if (n > 1) {
        EXPECT_GE(std::pow(std::cos(theta), e * (n - 1)), 1e-3);
      }
    }
  }
}

TEST(ChainSizing, AmplitudeConventionStorageAngle) {
  const double theta =
      storage_angle(100, 1e-2, EpsilonConvention::AmplitudeCosN);
  EXPECT_NEAR(theta, 0.30, 0.005);
  EXPECT_NEAR(std::pow(std::cos(theta), 100), 1e-2, 1e-12);
}

TEST(ChainSizing, Errors) {
  const auto p = EpsilonConvention::ProbabilityCos2N;
  EXPECT_THROW(min_chain_length(1.0, 1.0, p), ValidationError);
  EXPECT_THROW(min_chain_length(1.0, 0.0, p), ValidationError);
  EXPECT_THROW(min_chain_length(1.7, 1e-4, p), ValidationError);
  EXPECT_THROW(min_chain_length(0.0, 1e-4, p), ValidationError);
}

TEST(ThetaSchedule, RandomBandIsSeededAndBounded) {
  const auto a = ThetaSchedule::random_band(1.0, 0.1, 9, 42);
  const auto b = ThetaSchedule::random_band(1.0, 0.1, 9, 42);
  ASSERT_EQ(a.angles().size(), 9u);
  for (int k = 1; k <= 9; ++k) {
    EXPECT_EQ(a.angle(k), b.angle(k));
    EXPECT_GE(a.angle(k), 0.9);
    EXPECT_LT(a.angle(k), 1.1);
  }
  EXPECT_EQ(a.seed(), 42u);
  EXPECT_FALSE(a.covers(10));
  EXPECT_THROW(a.angle(10), ValidationError);
  EXPECT_DOUBLE_EQ(ThetaSchedule::uniform(1.0).scaled(1.05).angle(3), 1.05);
}

}  // namespace
}  // namespace spinmem
