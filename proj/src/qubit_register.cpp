#include "spinmem/qubit_register.hpp"

#include <algorithm>
#include <set>

#include "spinmem/errors.hpp"

namespace spinmem {

std::string QubitLabel::to_string() const {
  return (role == QubitRole::Flying ? "f" : "s") + std::to_string(index);
}

QubitRegister::QubitRegister(std::vector<QubitLabel> labels,
                             std::size_t max_qubits)
    : labels_(std::move(labels)), max_qubits_(max_qubits) {
  if (labels_.size() > max_qubits_) {
    throw ValidationError("register of " + std::to_string(labels_.size()) +
                          " qubits exceeds the cap of " +
                          std::to_string(max_qubits_));
  }
  std::set<QubitLabel> seen;
  for (const auto& label : labels_) {
    if (label.index < 1) {
      throw ValidationError("qubit indices are 1-based, got " +
                            label.to_string());
    }
    if (!seen.insert(label).second) {
      throw ValidationError("duplicate qubit label " + label.to_string());
    }
  }
}

bool QubitRegister::has_full_chain() const {
  std::vector<int> sites;
  for (const auto& label : labels_) {
    if (label.role == QubitRole::Chain) sites.push_back(label.index);
  }
  std::sort(sites.begin(), sites.end());
  for (std::size_t i = 0; i < sites.size(); ++i) {
    if (sites[i] != static_cast<int>(i) + 1) return false;
  }
  return true;
}

QubitRegister QubitRegister::memory(int n_flying, int chain_length,
                                    std::size_t max_qubits) {
  if (n_flying < 0 || chain_length < 0) {
    throw ValidationError("negative qubit count");
  }
  std::vector<QubitLabel> labels;
  labels.reserve(static_cast<std::size_t>(n_flying + chain_length));
  for (int i = 1; i <= n_flying; ++i) labels.push_back(flying(i));
  for (int k = 1; k <= chain_length; ++k) labels.push_back(chain(k));
  return QubitRegister(std::move(labels), max_qubits);
}

bool QubitRegister::contains(QubitLabel label) const {
  return find(label).has_value();
}

std::optional<std::size_t> QubitRegister::find(QubitLabel label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - labels_.begin());
}

std::size_t QubitRegister::position(QubitLabel label) const {
  auto pos = find(label);
  if (!pos) {
    throw ValidationError("qubit " + label.to_string() +
                          " is not in register [" + describe(*this) + "]");
  }
  return *pos;
}

std::uint64_t QubitRegister::bit_mask(QubitLabel label) const {
  return std::uint64_t{1} << (size() - 1 - position(label));
}

int QubitRegister::chain_length() const {
  return static_cast<int>(
      std::count_if(labels_.begin(), labels_.end(), [](const QubitLabel& l) {
        return l.role == QubitRole::Chain;
      }));
}

int QubitRegister::flying_count() const {
  return static_cast<int>(size()) - chain_length();
}

int QubitRegister::max_flying_index() const {
  int best = 0;
  for (const auto& l : labels_) {
    if (l.role == QubitRole::Flying) best = std::max(best, l.index);
  }
  return best;
}

QubitRegister QubitRegister::with_appended(QubitLabel label) const {
  auto labels = labels_;
  labels.push_back(label);
  return QubitRegister(std::move(labels), max_qubits_);
}

QubitRegister QubitRegister::with_prepended(QubitLabel label) const {
  std::vector<QubitLabel> labels;
  labels.reserve(labels_.size() + 1);
  labels.push_back(label);
  labels.insert(labels.end(), labels_.begin(), labels_.end());
  return QubitRegister(std::move(labels), max_qubits_);
}

QubitRegister QubitRegister::with_cap(std::size_t max_qubits) const {
  return QubitRegister(labels_, max_qubits);
}

std::string describe(const QubitRegister& reg) {
  std::string out;
  for (std::size_t i = 0; i < reg.size(); ++i) {
    if (i) out += ' ';
    out += reg[i].to_string();
  }
  return out;
}

}  // namespace spinmem
