#ifndef ROTOMETRY_FOCK_BASIS_HPP
#define ROTOMETRY_FOCK_BASIS_HPP

#include <algorithm>
#include <cstdint>
#include <limits>
#include <memory>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "rotometry/errors.hpp"

namespace rotometry {

// Occupation-number vector, one entry per mode, in ModeSet order.
using Occupation = std::vector<int>;

inline std::string occupation_to_string(const Occupation& occ) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < occ.size(); ++i) {
    if (i) os << ',';
    os << occ[i];
  }
  os << ')';
  return os.str();
}

// Binomial coefficient with saturation; never overflows.
inline std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  constexpr std::uint64_t kSat = std::numeric_limits<std::uint64_t>::max() / 2;
  std::uint64_t result = 1;
  for (int i = 1; i <= k; ++i) {
    // result * (n - k + i) / i is exact at every step
    std::uint64_t num = static_cast<std::uint64_t>(n - k + i);
    if (result > kSat / num) return kSat;
    result = result * num / static_cast<std::uint64_t>(i);
  }
  return result;
}

struct OccupationHash {
  std::size_t operator()(const Occupation& v) const noexcept {
    std::size_t h = 1469598103934665603ull;
    for (int x : v) {
      h ^= static_cast<std::size_t>(x) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
  }
};

// Ordered set of integer mode labels. Site index, Landau level index, or
// angular momentum quantum number depending on the model. The order is
// canonical for the lifetime of every basis built on top of it.
class ModeSet {
 public:
  ModeSet() = default;
  explicit ModeSet(std::vector<int> labels) : labels_(std::move(labels)) {
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      if (!position_.emplace(labels_[i], static_cast<int>(i)).second) {
        throw ConfigError("ModeSet: duplicate mode label " + std::to_string(labels_[i]));
      }
    }
  }

  // Labels 0..count-1 (lattice sites, quasi-momentum modes).
  static ModeSet consecutive(int count) {
    std::vector<int> labels(count);
    std::iota(labels.begin(), labels.end(), 0);
    return ModeSet(std::move(labels));
  }

  // Labels lo..hi inclusive (angular momentum window).
  static ModeSet range(int lo, int hi) {
    if (hi < lo) throw ConfigError("ModeSet::range: empty range");
    std::vector<int> labels(static_cast<std::size_t>(hi - lo + 1));
    std::iota(labels.begin(), labels.end(), lo);
    return ModeSet(std::move(labels));
  }

  int size() const { return static_cast<int>(labels_.size()); }
  int label(int position) const { return labels_[static_cast<std::size_t>(position)]; }
  const std::vector<int>& labels() const { return labels_; }

  int position_of(int label) const {
    auto it = position_.find(label);
    if (it == position_.end()) {
      throw ConfigError("ModeSet: unknown mode label " + std::to_string(label));
    }
    return it->second;
  }

  bool contains(int label) const { return position_.count(label) != 0; }

  bool operator==(const ModeSet& other) const { return labels_ == other.labels_; }
  bool operator!=(const ModeSet& other) const { return !(*this == other); }

 private:
  std::vector<int> labels_;
  std::unordered_map<int, int> position_;
};

struct BasisOptions {
  // Error out instead of building a basis larger than this.
  std::uint64_t dimension_cap = 2'000'000;
  // Keep only occupations with sum_i label_i * n_i <= this value.
  // Used to cap total angular momentum in the Landau-level basis.
  std::optional<long> max_total_label_weight;
};

// All occupation-number states of `num_particles` bosons in the given modes,
// in lexicographically descending order, with a bijective rank map.
class FockBasis {
 public:
  using Index = std::ptrdiff_t;

  static std::shared_ptr<const FockBasis> build(int num_particles, ModeSet modes,
                                                const BasisOptions& opt = {}) {
    return std::shared_ptr<const FockBasis>(new FockBasis(num_particles, std::move(modes), opt));
  }

  const ModeSet& modes() const { return modes_; }
  int num_particles() const { return num_particles_; }
  Index dim() const { return static_cast<Index>(states_.size()); }
  const Occupation& state(Index i) const { return states_[static_cast<std::size_t>(i)]; }
  const std::vector<Occupation>& states() const { return states_; }
  bool truncated() const { return max_weight_.has_value(); }

  Index rank(const Occupation& occ) const {
    auto it = rank_.find(occ);
    if (it == rank_.end()) return -1;
    return it->second;
  }

  // Total label-weighted occupation, sum_i label_i * n_i. This is the total
  // angular momentum when labels are momentum quantum numbers.
  long label_weight(Index i) const {
    const Occupation& occ = state(i);
    long w = 0;
    for (int p = 0; p < modes_.size(); ++p) w += static_cast<long>(modes_.label(p)) * occ[p];
    return w;
  }

  bool same_basis(const FockBasis& other) const {
    return num_particles_ == other.num_particles_ && modes_ == other.modes_ &&
           max_weight_ == other.max_weight_;
  }

 private:
  FockBasis(int num_particles, ModeSet modes, const BasisOptions& opt)
      : modes_(std::move(modes)), num_particles_(num_particles), max_weight_(opt.max_total_label_weight) {
    if (num_particles_ < 0) throw ConfigError("FockBasis: negative particle number");
    if (modes_.size() == 0) throw ConfigError("FockBasis: empty mode set");

    const std::uint64_t full_dim =
        binomial(num_particles_ + modes_.size() - 1, modes_.size() - 1);
    if (!max_weight_ && full_dim > opt.dimension_cap) {
      throw DimensionCapError("FockBasis: dimension " + std::to_string(full_dim) +
                              " exceeds cap " + std::to_string(opt.dimension_cap));
    }

    // Filter pruning is only monotone when no label is negative.
    const bool can_prune =
        max_weight_ &&
        std::all_of(modes_.labels().begin(), modes_.labels().end(), [](int l) { return l >= 0; });

    Occupation occ(static_cast<std::size_t>(modes_.size()), 0);
    enumerate(0, num_particles_, 0, occ, opt.dimension_cap, can_prune);

    rank_.reserve(states_.size());
    for (std::size_t i = 0; i < states_.size(); ++i) {
      rank_.emplace(states_[i], static_cast<Index>(i));
    }
  }

  void enumerate(int position, int remaining, long weight, Occupation& occ,
                 std::uint64_t cap, bool can_prune) {
    const int num_modes = modes_.size();
    if (position == num_modes - 1) {
      occ[static_cast<std::size_t>(position)] = remaining;
      const long w = weight + static_cast<long>(modes_.label(position)) * remaining;
      if (!max_weight_ || w <= *max_weight_) {
        if (states_.size() >= cap) {
          throw DimensionCapError("FockBasis: dimension exceeds cap " + std::to_string(cap));
        }
        states_.push_back(occ);
      }
      occ[static_cast<std::size_t>(position)] = 0;
      return;
    }
    // Descending occupation at each position gives lex-descending global order.
    for (int n = remaining; n >= 0; --n) {
      const long w = weight + static_cast<long>(modes_.label(position)) * n;
      if (can_prune && w > *max_weight_) continue;
      occ[static_cast<std::size_t>(position)] = n;
      enumerate(position + 1, remaining - n, w, occ, cap, can_prune);
    }
    occ[static_cast<std::size_t>(position)] = 0;
  }

  ModeSet modes_;
  int num_particles_;
  std::optional<long> max_weight_;
  std::vector<Occupation> states_;
  std::unordered_map<Occupation, Index, OccupationHash> rank_;
};

// Combinatorial inverse of the rank map for an unconstrained basis: walks the
// stars-and-bars counts instead of the stored table. Used to verify that the
// stored ordering really is the canonical one.
inline Occupation unrank_occupation(int num_particles, int num_modes, std::uint64_t r) {
  Occupation occ(static_cast<std::size_t>(num_modes), 0);
  int remaining = num_particles;
  for (int pos = 0; pos < num_modes - 1; ++pos) {
    for (int n = remaining; n >= 0; --n) {
      const std::uint64_t block = binomial(remaining - n + num_modes - pos - 2, num_modes - pos - 2);
      if (r < block) {
        occ[static_cast<std::size_t>(pos)] = n;
        remaining -= n;
        break;
      }
      r -= block;
    }
  }
  occ[static_cast<std::size_t>(num_modes - 1)] = remaining;
  return occ;
}

}  // namespace rotometry

#endif  // ROTOMETRY_FOCK_BASIS_HPP
