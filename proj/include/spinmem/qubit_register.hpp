#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace spinmem {

enum class QubitRole { Flying, Chain };

/// Identifies one qubit slot: a flying qubit f_i or a static chain spin s_k.
/// Both indices are 1-based.
struct QubitLabel {
  QubitRole role = QubitRole::Flying;
  int index = 1;

  auto operator<=>(const QubitLabel&) const = default;
  std::string to_string() const;
};

constexpr QubitLabel flying(int i) { return {QubitRole::Flying, i}; }
constexpr QubitLabel chain(int k) { return {QubitRole::Chain, k}; }

/// Ordered set of qubit labels. The first label is the most significant bit of
/// a dense basis index; bit 0 is spin-up, bit 1 is spin-down.
///
/// A memory register holds the whole chain s_1..s_N (see has_full_chain);
/// reduced registers may keep any subset of sites. `max_qubits` bounds the register size; dense state vectors need the
/// default cap, the one-excitation representation can go far higher.
class QubitRegister {
 public:
  static constexpr std::size_t kDenseCap = 24;
  static constexpr std::size_t kRestrictedCap = 1 << 16;

  QubitRegister() = default;
  explicit QubitRegister(std::vector<QubitLabel> labels,
                         std::size_t max_qubits = kDenseCap);

  /// Flying(1..n_flying) followed by Chain(1..chain_length).
  static QubitRegister memory(int n_flying, int chain_length,
                              std::size_t max_qubits = kDenseCap);

  std::size_t size() const { return labels_.size(); }
  std::size_t max_qubits() const { return max_qubits_; }
  std::span<const QubitLabel> labels() const { return labels_; }
  const QubitLabel& operator[](std::size_t pos) const { return labels_[pos]; }

  bool contains(QubitLabel label) const;
  std::optional<std::size_t> find(QubitLabel label) const;
  /// Position of `label`; throws ValidationError if absent.
  std::size_t position(QubitLabel label) const;
  /// Single-bit mask of `label` in a dense basis index.
  std::uint64_t bit_mask(QubitLabel label) const;

  /// Number of chain labels.
  int chain_length() const;
  /// Chain labels are exactly s_1..s_N, in any order.
  bool has_full_chain() const;
  int flying_count() const;
  /// Largest flying index in use, 0 if none.
  int max_flying_index() const;

  QubitRegister with_appended(QubitLabel label) const;
  QubitRegister with_prepended(QubitLabel label) const;
  QubitRegister with_cap(std::size_t max_qubits) const;

  bool operator==(const QubitRegister& other) const {
    return labels_ == other.labels_;
  }

 private:
  std::vector<QubitLabel> labels_;
  std::size_t max_qubits_ = kDenseCap;
};

/// "f1 s1 s2 ..." style rendering, used in diagnostics.
std::string describe(const QubitRegister& reg);

}  // namespace spinmem
