#include "spinmem/noise/dephasing.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "spinmem/errors.hpp"
#include "spinmem/parallel.hpp"
#include "spinmem/protocol/session.hpp"
#include "spinmem/state_vector.hpp"

namespace spinmem {

DephasingProfile::DephasingProfile(Kind kind, std::vector<double> rates,
                                   int site)
    : kind_(kind), rates_(std::move(rates)), site_(site) {
  if (rates_.empty()) throw ValidationError("dephasing profile needs N >= 1");
  for (std::size_t k = 0; k < rates_.size(); ++k) {
    if (!(rates_[k] >= 0.0) || !std::isfinite(rates_[k])) {
      throw ValidationError("dephasing rate at site " + std::to_string(k + 1) +
                            " must be finite and >= 0");
    }
  }
}

DephasingProfile DephasingProfile::homogeneous(int chain_length, double gamma) {
  if (chain_length < 1) throw ValidationError("dephasing profile needs N >= 1");
  return {Kind::Homogeneous,
          std::vector<double>(static_cast<std::size_t>(chain_length), gamma), 0};
}

DephasingProfile DephasingProfile::single_site(int chain_length, int site,
                                               double gamma) {
  if (chain_length < 1) throw ValidationError("dephasing profile needs N >= 1");
  if (site < 1 || site > chain_length) {
    throw ValidationError("decohering site " + std::to_string(site) +
                          " outside 1.." + std::to_string(chain_length));
  }
  std::vector<double> rates(static_cast<std::size_t>(chain_length), 0.0);
  rates[static_cast<std::size_t>(site - 1)] = gamma;
  return {Kind::SingleSite, std::move(rates), site};
}

DephasingProfile DephasingProfile::arbitrary(std::vector<double> rates) {
  return {Kind::Arbitrary, std::move(rates), 0};
}

double DephasingProfile::rate(int k) const {
  if (k < 1 || k > chain_length()) {
    throw ValidationError("site " + std::to_string(k) +
                          " outside the dephasing profile");
  }
  return rates_[static_cast<std::size_t>(k - 1)];
}

double DephasingProfile::max_rate() const {
  return *std::max_element(rates_.begin(), rates_.end());
}

namespace {

// Rate attached to each sector index of the register.
std::vector<double> sector_rates(const QubitRegister& reg,
                                 const DephasingProfile& profile) {
  std::vector<double> g(reg.size() + 1, 0.0);
  for (std::size_t p = 0; p < reg.size(); ++p) {
    const QubitLabel& q = reg[p];
    if (q.role == QubitRole::Chain && q.index <= profile.chain_length()) {
      g[p + 1] = profile.rate(q.index);
    }
  }
  return g;
}

DensityMatrix dephase_exact(const DensityMatrix& rho,
                            const std::vector<double>& g, double tau) {
  DensityMatrix out = rho;
  auto& m = out.matrix();
  const Eigen::Index dim = m.rows();
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) {
      if (i == j) continue;
      const double rate = g[static_cast<std::size_t>(i)] + g[static_cast<std::size_t>(j)];
      if (rate == 0.0) continue;
      m(i, j) *= std::isinf(tau) ? 0.0 : std::exp(-rate * tau);
    }
  }
  return out;
}

// sum_k Gamma_k / 2 (Z_k rho Z_k - rho). In the sector Z_k only flips the sign
// of the state with site k down, so each term touches one row and column.
Eigen::MatrixXcd lindblad_rhs(const Eigen::MatrixXcd& r,
                              const std::vector<double>& g) {
  const Eigen::Index dim = r.rows();
  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(dim, dim);
  for (Eigen::Index p = 0; p < dim; ++p) {
    const double gk = g[static_cast<std::size_t>(p)];
    if (gk == 0.0) continue;
    for (Eigen::Index j = 0; j < dim; ++j) {
      if (j == p) continue;
      d(p, j) -= gk * r(p, j);
      d(j, p) -= gk * r(j, p);
    }
  }
  return d;
}

DensityMatrix dephase_rk4(const DensityMatrix& rho, const std::vector<double>& g,
                          double gamma_max, double tau) {
  const double h_target = std::min(0.01 / gamma_max, tau / 100.0);
  const auto steps = static_cast<long>(std::ceil(tau / h_target - 1e-9));
  const double h = tau / static_cast<double>(steps);
  Eigen::MatrixXcd r = rho.matrix();
  for (long n = 0; n < steps; ++n) {
    const Eigen::MatrixXcd k1 = lindblad_rhs(r, g);
    const Eigen::MatrixXcd k2 = lindblad_rhs(r + 0.5 * h * k1, g);
    const Eigen::MatrixXcd k3 = lindblad_rhs(r + 0.5 * h * k2, g);
    const Eigen::MatrixXcd k4 = lindblad_rhs(r + h * k3, g);
    r += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return DensityMatrix(rho.qubits(), std::move(r), rho.subspace());
}

}  // namespace

DensityMatrix dephase(const DensityMatrix& rho, const DephasingProfile& profile,
                      double tau, DephasingMethod method) {
  if (!rho.restricted()) {
    throw ValidationError("dephase needs a restricted density matrix");
  }
  if (std::isnan(tau) || tau < 0.0) {
    throw ValidationError("storage time must be >= 0, got " + std::to_string(tau));
  }
  const auto g = sector_rates(rho.qubits(), profile);
  const double gamma_max = *std::max_element(g.begin(), g.end());
  if (tau == 0.0 || gamma_max == 0.0) return rho;
  if (method == DephasingMethod::Exact) return dephase_exact(rho, g, tau);
  if (std::isinf(tau)) {
    throw ValidationError("RK4 dephasing needs a finite storage time");
  }
  return dephase_rk4(rho, g, gamma_max, tau);
}

std::vector<FidelityPoint> fidelity_curve(const QubitState& input,
                                          int chain_length,
                                          const ThetaSchedule& schedule,
                                          const DephasingProfile& profile,
                                          std::span<const double> tau_grid,
                                          const FidelityCurveOptions& options) {
  if (std::abs(input.norm_squared() - 1.0) > 1e-12) {
    throw ValidationError("input qubit must be normalized");
  }
  for (double tau : tau_grid) {
    if (std::isnan(tau) || tau < 0.0) {
      throw ValidationError("storage times must be >= 0");
    }
  }

  const auto session = encode_single_restricted(input, chain_length, schedule,
                                                options.model);
  std::vector<QubitLabel> chain_sites;
  for (int k = 1; k <= chain_length; ++k) chain_sites.push_back(chain(k));
  const auto stored = with_polarised_qubit(
      partial_trace(density_from_state(session.state()), chain_sites),
      flying(2), Placement::Front);

  const QubitRegister f1({flying(1)});
  const std::array<QubitState, 1> target_amps{input};
  const auto target = product_state(f1, target_amps);
  const std::array<QubitLabel, 1> probe{flying(2)};

  return parallel_map(
      tau_grid.size(),
      [&](std::size_t i) {
        auto rho = dephase(stored, profile, tau_grid[i], options.method);
        apply_pass(rho, flying(2), chain_length, schedule, options.model,
                   PassDirection::Read);
        const auto retrieved =
            relabeled(to_full(partial_trace(rho, probe)), f1);
        FidelityPoint pt;
        pt.tau = tau_grid[i];
        pt.fidelity_raw = fidelity_pure(retrieved, target);
        pt.fidelity_corrected = fidelity_pure(phase_corrected(retrieved), target);
        return pt;
      },
      options.workers);
}

}  // namespace spinmem
