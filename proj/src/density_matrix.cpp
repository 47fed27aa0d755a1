#include "spinmem/density_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "spinmem/errors.hpp"

namespace spinmem {
namespace {

std::uint64_t position_mask(std::size_t n, std::size_t pos) {
  return std::uint64_t{1} << (n - 1 - pos);
}

std::vector<std::size_t> keep_positions(const QubitRegister& reg,
                                        std::span<const QubitLabel> keep) {
  if (keep.empty()) throw ValidationError("partial trace needs a non-empty keep set");
  std::vector<std::size_t> pos;
  pos.reserve(keep.size());
  for (const auto& label : keep) {
    const auto p = reg.find(label);
    if (!p) {
      throw ValidationError("keep label " + label.to_string() +
                            " is not in register [" + describe(reg) + "]");
    }
    if (std::find(pos.begin(), pos.end(), *p) != pos.end()) {
      throw ValidationError("keep label " + label.to_string() + " repeated");
    }
    pos.push_back(*p);
  }
  return pos;
}

QubitRegister kept_register(std::span<const QubitLabel> keep, std::size_t cap) {
  return QubitRegister(std::vector<QubitLabel>(keep.begin(), keep.end()), cap);
}

// groups[t][x] = dense index whose kept bits spell x and traced bits spell t.
std::vector<std::vector<std::uint64_t>> trace_groups(
    std::size_t n, const std::vector<std::size_t>& kept) {
  const std::size_t k = kept.size();
  std::vector<std::size_t> traced;
  for (std::size_t p = 0; p < n; ++p) {
    if (std::find(kept.begin(), kept.end(), p) == kept.end()) traced.push_back(p);
  }
  const std::size_t dim_x = std::size_t{1} << k;
  const std::size_t dim_t = std::size_t{1} << traced.size();
  std::vector<std::vector<std::uint64_t>> groups(
      dim_t, std::vector<std::uint64_t>(dim_x));
  for (std::size_t t = 0; t < dim_t; ++t) {
    std::uint64_t base = 0;
    for (std::size_t j = 0; j < traced.size(); ++j) {
      if (t & (std::size_t{1} << (traced.size() - 1 - j))) {
        base |= position_mask(n, traced[j]);
      }
    }
    for (std::size_t x = 0; x < dim_x; ++x) {
      std::uint64_t idx = base;
      for (std::size_t j = 0; j < k; ++j) {
        if (x & (std::size_t{1} << (k - 1 - j))) idx |= position_mask(n, kept[j]);
      }
      groups[t][x] = idx;
    }
  }
  return groups;
}

template <class At>
void apply4(At&& at, std::uint64_t ma, std::uint64_t mb, std::size_t dim,
            const Gate4& g) {
  for (std::size_t i = 0; i < dim; ++i) {
    if (i & (ma | mb)) continue;
    const std::size_t idx[4] = {i, i | mb, i | ma, i | ma | mb};
    const Complex in[4] = {at(idx[0]), at(idx[1]), at(idx[2]), at(idx[3])};
    for (int r = 0; r < 4; ++r) {
      at(idx[r]) = g(r, 0) * in[0] + g(r, 1) * in[1] + g(r, 2) * in[2] +
                   g(r, 3) * in[3];
    }
  }
}

template <class At>
void apply4_sector(At&& at, std::size_t ia, std::size_t ib, std::size_t dim,
                   const Gate4& g) {
  const Complex down_b = at(ib);
  const Complex down_a = at(ia);
  at(ib) = g(1, 1) * down_b + g(1, 2) * down_a;
  at(ia) = g(2, 1) * down_b + g(2, 2) * down_a;
  if (g(0, 0) != Complex{1.0, 0.0}) {
    for (std::size_t s = 0; s < dim; ++s) {
      if (s != ia && s != ib) at(s) *= g(0, 0);
    }
  }
}

}  // namespace

DensityMatrix::DensityMatrix(QubitRegister reg, Eigen::MatrixXcd matrix,
                             Subspace subspace)
    : register_(std::move(reg)), matrix_(std::move(matrix)), subspace_(subspace) {
  const auto expected = restricted()
                            ? static_cast<Eigen::Index>(register_.size() + 1)
                            : (Eigen::Index{1} << register_.size());
  if (matrix_.rows() != expected || matrix_.cols() != expected) {
    throw ValidationError("density matrix of size " +
                          std::to_string(matrix_.rows()) + "x" +
                          std::to_string(matrix_.cols()) +
                          " does not match register [" + describe(register_) +
                          "]");
  }
}

double DensityMatrix::hermiticity_defect() const {
  return (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::min_eigenvalue() const {
  const Eigen::MatrixXcd h = 0.5 * (matrix_ + matrix_.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(
      h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

void DensityMatrix::validate_physical(double tol, double psd_tol) const {
  std::ostringstream msg;
  if (const double h = hermiticity_defect(); h > tol) {
    msg << "density matrix is not Hermitian (defect " << h << ")";
    throw ToleranceError(msg.str());
  }
  if (const double t = std::abs(trace() - 1.0); t > tol) {
    msg << "density matrix trace deviates from 1 by " << t;
    throw ToleranceError(msg.str());
  }
  if (const double e = min_eigenvalue(); e < -psd_tol) {
    msg << "density matrix has negative eigenvalue " << e;
    throw ToleranceError(msg.str());
  }
}

DensityMatrix density_from_state(const StateVector& state) {
  if (state.qubits().size() > kMaxFullDensityQubits) {
    throw ValidationError(
        "refusing to materialize a full density matrix on " +
        std::to_string(state.qubits().size()) +
        " qubits; use partial_trace on the state vector instead");
  }
  const Eigen::Map<const Eigen::VectorXcd> psi(state.amplitudes().data(),
                                               static_cast<Eigen::Index>(state.dimension()));
  return DensityMatrix(state.qubits(), psi * psi.adjoint(), Subspace::Full);
}

DensityMatrix density_from_state(const RestrictedState& state) {
  const Eigen::Map<const Eigen::VectorXcd> psi(state.amplitudes().data(),
                                               static_cast<Eigen::Index>(state.dimension()));
  return DensityMatrix(state.qubits(), psi * psi.adjoint(),
                       Subspace::RestrictedOneExcitation);
}

DensityMatrix partial_trace(const DensityMatrix& rho,
                            std::span<const QubitLabel> keep) {
  const auto& reg = rho.qubits();
  const auto kept = keep_positions(reg, keep);
  const auto& m = rho.matrix();

  if (rho.restricted()) {
    // Sector index s -> (kept sector index, traced excitation position or -1).
    const auto dim = static_cast<std::size_t>(rho.dimension());
    std::vector<std::size_t> x(dim, 0);
    std::vector<long> t(dim, -1);
    for (std::size_t p = 0; p < reg.size(); ++p) {
      auto it = std::find(kept.begin(), kept.end(), p);
      if (it != kept.end()) {
        x[p + 1] = static_cast<std::size_t>(it - kept.begin()) + 1;
      } else {
        t[p + 1] = static_cast<long>(p);
      }
    }
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(
        static_cast<Eigen::Index>(kept.size() + 1),
        static_cast<Eigen::Index>(kept.size() + 1));
    for (std::size_t i = 0; i < dim; ++i) {
      for (std::size_t j = 0; j < dim; ++j) {
        if (t[i] == t[j]) {
          out(static_cast<Eigen::Index>(x[i]), static_cast<Eigen::Index>(x[j])) +=
              m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
      }
    }
    return DensityMatrix(kept_register(keep, reg.max_qubits()), std::move(out),
                         Subspace::RestrictedOneExcitation);
  }

  const auto groups = trace_groups(reg.size(), kept);
  const auto dim_x = static_cast<Eigen::Index>(groups.front().size());
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim_x, dim_x);
  for (const auto& g : groups) {
    for (Eigen::Index a = 0; a < dim_x; ++a) {
      for (Eigen::Index b = 0; b < dim_x; ++b) {
        out(a, b) += m(static_cast<Eigen::Index>(g[a]),
                       static_cast<Eigen::Index>(g[b]));
      }
    }
  }
  return DensityMatrix(kept_register(keep, QubitRegister::kDenseCap),
                       std::move(out), Subspace::Full);
}

DensityMatrix partial_trace(const StateVector& state,
                            std::span<const QubitLabel> keep) {
  const auto& reg = state.qubits();
  const auto kept = keep_positions(reg, keep);
  if (kept.size() > kMaxFullDensityQubits) {
    throw ValidationError("too many kept qubits for a full density matrix");
  }
  const auto groups = trace_groups(reg.size(), kept);
  const auto dim_x = static_cast<Eigen::Index>(groups.front().size());
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim_x, dim_x);
  for (const auto& g : groups) {
    for (Eigen::Index a = 0; a < dim_x; ++a) {
      const Complex pa = state[g[a]];
      if (pa == Complex{}) continue;
      for (Eigen::Index b = 0; b < dim_x; ++b) {
        out(a, b) += pa * std::conj(state[g[b]]);
      }
    }
  }
  return DensityMatrix(kept_register(keep, QubitRegister::kDenseCap),
                       std::move(out), Subspace::Full);
}

DensityMatrix to_full(const DensityMatrix& rho) {
  if (!rho.restricted()) return rho;
  const auto n = rho.qubits().size();
  if (n > kMaxFullDensityQubits) {
    throw ValidationError("register too large for a full density matrix");
  }
  const SectorBasis basis(n);
  const auto dim = Eigen::Index{1} << n;
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
  for (std::size_t i = 0; i < basis.dimension(); ++i) {
    for (std::size_t j = 0; j < basis.dimension(); ++j) {
      out(static_cast<Eigen::Index>(basis.dense_index(i)),
          static_cast<Eigen::Index>(basis.dense_index(j))) =
          rho.matrix()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }
  return DensityMatrix(rho.qubits().with_cap(QubitRegister::kDenseCap),
                       std::move(out), Subspace::Full);
}

DensityMatrix project_restricted(const DensityMatrix& rho, double threshold) {
  if (rho.restricted()) return rho;
  const auto n = rho.qubits().size();
  const SectorBasis basis(n);
  double outside = 0.0;
  for (Eigen::Index i = 0; i < rho.dimension(); ++i) {
    if (!basis.sector_index(static_cast<std::uint64_t>(i))) {
      outside += std::abs(rho.matrix()(i, i));
    }
  }
  if (outside > threshold) {
    std::ostringstream msg;
    msg << "density matrix has weight " << outside
        << " outside the zero-or-one-excitation sector";
    throw ToleranceError(msg.str());
  }
  const auto dim = static_cast<Eigen::Index>(basis.dimension());
  Eigen::MatrixXcd out(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) {
      out(i, j) = rho.matrix()(
          static_cast<Eigen::Index>(basis.dense_index(static_cast<std::size_t>(i))),
          static_cast<Eigen::Index>(basis.dense_index(static_cast<std::size_t>(j))));
    }
  }
  return DensityMatrix(rho.qubits().with_cap(QubitRegister::kRestrictedCap),
                       std::move(out), Subspace::RestrictedOneExcitation);
}

DensityMatrix relabeled(const DensityMatrix& rho, QubitRegister reg) {
  if (reg.size() != rho.qubits().size()) {
    throw ValidationError("cannot relabel [" + describe(rho.qubits()) +
                          "] as [" + describe(reg) + "]");
  }
  return DensityMatrix(std::move(reg), rho.matrix(), rho.subspace());
}

double fidelity_pure(const DensityMatrix& rho, const StateVector& target) {
  if (!(rho.qubits() == target.qubits())) {
    throw ValidationError("fidelity target register [" +
                          describe(target.qubits()) +
                          "] does not match density register [" +
                          describe(rho.qubits()) + "]");
  }
  if (std::abs(target.norm() - 1.0) > 1e-12) {
    throw ValidationError("fidelity target is not normalized");
  }
  Eigen::VectorXcd v(rho.dimension());
  if (rho.restricted()) {
    const SectorBasis basis(rho.qubits().size());
    for (Eigen::Index s = 0; s < v.size(); ++s) {
      v(s) = target[basis.dense_index(static_cast<std::size_t>(s))];
    }
  } else {
    for (Eigen::Index s = 0; s < v.size(); ++s) {
      v(s) = target[static_cast<std::size_t>(s)];
    }
  }
  const double f = (v.adjoint() * rho.matrix() * v)(0, 0).real();
  return std::clamp(f, 0.0, 1.0);
}

void apply_two_qubit_gate(DensityMatrix& rho, const Gate4& gate, QubitLabel a,
                          QubitLabel b) {
  if (a == b) throw ValidationError("two-qubit gate needs distinct qubits");
  auto& m = rho.matrix();
  const auto dim = static_cast<std::size_t>(rho.dimension());
  const Gate4 gate_conj = gate.conjugate();
  if (rho.restricted()) {
    require_excitation_conserving(gate);
    const std::size_t ia = rho.qubits().position(a) + 1;
    const std::size_t ib = rho.qubits().position(b) + 1;
    for (std::size_t j = 0; j < dim; ++j) {
      apply4_sector([&](std::size_t i) -> Complex& {
        return m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      }, ia, ib, dim, gate);
    }
    for (std::size_t i = 0; i < dim; ++i) {
      apply4_sector([&](std::size_t j) -> Complex& {
        return m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      }, ia, ib, dim, gate_conj);
    }
    return;
  }
  require_unitary(gate);
  const auto ma = rho.qubits().bit_mask(a);
  const auto mb = rho.qubits().bit_mask(b);
  for (std::size_t j = 0; j < dim; ++j) {
    apply4([&](std::size_t i) -> Complex& {
      return m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }, ma, mb, dim, gate);
  }
  for (std::size_t i = 0; i < dim; ++i) {
    apply4([&](std::size_t j) -> Complex& {
      return m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }, ma, mb, dim, gate_conj);
  }
}

void apply_single_qubit_gate(DensityMatrix& rho, const Gate2& gate,
                             QubitLabel q) {
  require_unitary(gate);
  auto& m = rho.matrix();
  if (rho.restricted()) {
    if (std::abs(gate(0, 1)) > 1e-12 || std::abs(gate(1, 0)) > 1e-12) {
      throw ValidationError(
          "only diagonal single-qubit gates keep the restricted sector");
    }
    const auto iq = static_cast<Eigen::Index>(rho.qubits().position(q) + 1);
    Eigen::VectorXcd d = Eigen::VectorXcd::Constant(rho.dimension(), gate(0, 0));
    d(iq) = gate(1, 1);
    m = d.asDiagonal() * m * d.conjugate().asDiagonal();
    return;
  }
  const auto mask = rho.qubits().bit_mask(q);
  const auto dim = rho.dimension();
  const Gate2 gc = gate.conjugate();
  for (Eigen::Index j = 0; j < dim; ++j) {
    for (Eigen::Index i = 0; i < dim; ++i) {
      if (static_cast<std::uint64_t>(i) & mask) continue;
      const auto i1 = static_cast<Eigen::Index>(static_cast<std::uint64_t>(i) | mask);
      const Complex up = m(i, j), down = m(i1, j);
      m(i, j) = gate(0, 0) * up + gate(0, 1) * down;
      m(i1, j) = gate(1, 0) * up + gate(1, 1) * down;
    }
  }
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) {
      if (static_cast<std::uint64_t>(j) & mask) continue;
      const auto j1 = static_cast<Eigen::Index>(static_cast<std::uint64_t>(j) | mask);
      const Complex up = m(i, j), down = m(i, j1);
      m(i, j) = gc(0, 0) * up + gc(0, 1) * down;
      m(i, j1) = gc(1, 0) * up + gc(1, 1) * down;
    }
  }
}

DensityMatrix with_polarised_qubit(const DensityMatrix& rho, QubitLabel label,
                                   Placement where) {
  const auto reg = where == Placement::Front
                       ? rho.qubits().with_prepended(label)
                       : rho.qubits().with_appended(label);
  const auto old_dim = rho.dimension();
  if (rho.restricted()) {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(old_dim + 1, old_dim + 1);
    if (where == Placement::Back) {
      out.topLeftCorner(old_dim, old_dim) = rho.matrix();
    } else {
      // Sector index 1 is the new qubit; old index s >= 1 moves to s + 1.
      std::vector<Eigen::Index> map(static_cast<std::size_t>(old_dim));
      for (Eigen::Index s = 0; s < old_dim; ++s) map[static_cast<std::size_t>(s)] = s == 0 ? 0 : s + 1;
      for (Eigen::Index i = 0; i < old_dim; ++i) {
        for (Eigen::Index j = 0; j < old_dim; ++j) {
          out(map[static_cast<std::size_t>(i)], map[static_cast<std::size_t>(j)]) = rho.matrix()(i, j);
        }
      }
    }
    return DensityMatrix(reg, std::move(out), Subspace::RestrictedOneExcitation);
  }
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(old_dim * 2, old_dim * 2);
  if (where == Placement::Front) {
    out.topLeftCorner(old_dim, old_dim) = rho.matrix();
  } else {
    for (Eigen::Index i = 0; i < old_dim; ++i) {
      for (Eigen::Index j = 0; j < old_dim; ++j) {
        out(2 * i, 2 * j) = rho.matrix()(i, j);
      }
    }
  }
  return DensityMatrix(reg, std::move(out), Subspace::Full);
}

DensityMatrix phase_corrected(const DensityMatrix& rho) {
  DensityMatrix out = rho;
  const Gate2 z = pauli_z();
  for (const auto& label : rho.qubits().labels()) {
    apply_single_qubit_gate(out, z, label);
  }
  return out;
}

Tomogram tomogram(const DensityMatrix& rho) {
  const DensityMatrix full = to_full(rho);
  Tomogram t;
  t.dim = static_cast<int>(full.dimension());
  t.real_part = full.matrix().real();
  t.imag_part = full.matrix().imag();
  const auto n = full.qubits().size();
  t.basis_labels.reserve(static_cast<std::size_t>(t.dim));
  for (int i = 0; i < t.dim; ++i) {
    std::string bits(n, '0');
    for (std::size_t p = 0; p < n; ++p) {
      if (static_cast<std::uint64_t>(i) & position_mask(n, p)) bits[p] = '1';
    }
    t.basis_labels.push_back(std::move(bits));
  }
  return t;
}

}  // namespace spinmem
