#pragma once

#include <span>
#include <vector>

#include "spinmem/density_matrix.hpp"
#include "spinmem/linalg.hpp"
#include "spinmem/protocol/theta_schedule.hpp"

namespace spinmem {

/// Per-site pure-dephasing rates Gamma_k (s^-1) on chain sites s1..sN. A rate
/// Gamma_k corresponds to the Lindblad operator sqrt(Gamma_k / 2) sigma_z on
/// site k, so a lone coherence on that site decays as exp(-Gamma_k t).
class DephasingProfile {
 public:
  enum class Kind { Homogeneous, SingleSite, Arbitrary };

  static DephasingProfile homogeneous(int chain_length, double gamma);
  /// Rate `gamma` on site `site` only.
  static DephasingProfile single_site(int chain_length, int site, double gamma);
  static DephasingProfile arbitrary(std::vector<double> rates);

  Kind kind() const { return kind_; }
  int chain_length() const { return static_cast<int>(rates_.size()); }
  /// Rate on 1-based site k.
  double rate(int k) const;
  std::span<const double> rates() const { return rates_; }
  double max_rate() const;
  /// Decohering site of a SingleSite profile, 0 otherwise.
  int site() const { return site_; }

 private:
  DephasingProfile(Kind kind, std::vector<double> rates, int site);

  Kind kind_ = Kind::Arbitrary;
  std::vector<double> rates_;
  int site_ = 0;
};

enum class DephasingMethod { Exact, RK4 };

/// Evolves a restricted density matrix for a storage time `tau` (seconds)
/// under the profile. Exact: coherence between two sector states decays by
/// exp(-(G_i + G_j) tau), G_i being the rate of the chain site flipped in
/// state i (zero for the all-up state and for a flipped flying qubit).
/// Populations are untouched. tau may be +infinity for Exact.
///
/// RK4 integrates the master equation with fixed step
/// h = min(0.01 / Gamma_max, tau / 100).
///
/// Chain sites of the register beyond the profile length are treated as
/// noiseless. Throws ValidationError for tau < 0, a full-basis rho, or RK4
/// with an infinite tau.
DensityMatrix dephase(const DensityMatrix& rho, const DephasingProfile& profile,
                      double tau, DephasingMethod method = DephasingMethod::Exact);

struct FidelityPoint {
  double tau = 0.0;
  double fidelity_raw = 0.0;
  double fidelity_corrected = 0.0;
};

struct FidelityCurveOptions {
  ExchangeModel model = ExchangeModel::XY;
  DephasingMethod method = DephasingMethod::Exact;
  /// 0 picks the hardware concurrency.
  std::size_t workers = 0;
};

/// Stores `input` in a chain of length N with the given schedule, dephases
/// for each tau of the grid, reads it back with a fresh spin-up probe and
/// compares the probe with the input, both as retrieved and after a sigma_z
/// correction. The read pass reuses the write schedule.
std::vector<FidelityPoint> fidelity_curve(const QubitState& input,
                                          int chain_length,
                                          const ThetaSchedule& schedule,
                                          const DephasingProfile& profile,
                                          std::span<const double> tau_grid,
                                          const FidelityCurveOptions& options = {});

}  // namespace spinmem
