#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace qcert {

enum class Spin : int { Up = 0, Down = 1 };

// Occupation-number state of spinful fermions on up to 32 sites.
// Bit k of `up` (`down`) is the spin-up (spin-down) occupancy of site k.
//
// Fermionic mode ordering is fixed once and for all: all spin-up modes by
// ascending site index, then all spin-down modes by ascending site index.
// Every sign in this module is computed relative to that ordering.
struct FockState {
    uint32_t up = 0;
    uint32_t down = 0;

    friend bool operator==(const FockState& a, const FockState& b) {
        return a.up == b.up && a.down == b.down;
    }
    friend bool operator<(const FockState& a, const FockState& b) {
        return a.up != b.up ? a.up < b.up : a.down < b.down;
    }

    uint64_t key() const { return (uint64_t(up) << 32) | uint64_t(down); }
};

inline int popcount32(uint32_t x) { return __builtin_popcount(x); }

// n_k = up_k + down_k, in {0,1,2}
inline int occupancy(const FockState& s, int site) {
    return int((s.up >> site) & 1u) + int((s.down >> site) & 1u);
}

struct SignedState {
    FockState state;
    int sign = 1;  // +1 or -1
};

// c_{site,spin} |s>. Empty when the mode is unoccupied.
std::optional<SignedState> apply_annihilate(const FockState& s, int site, Spin spin);

// c^dag_{site,spin} |s>. Empty when the mode is occupied.
std::optional<SignedState> apply_create(const FockState& s, int site, Spin spin);

// c^dag_{to,spin} c_{from,spin} |s>. Empty when the term annihilates the state.
std::optional<SignedState> apply_hop(const FockState& s, int from, int to, Spin spin);

// All Fock states with fixed particle numbers (n_up, n_down) on `sites` sites,
// ordered ascending lexicographically on (up, down) bit patterns. The order is
// deterministic and index_of is the inverse of states()[i].
class BasisSector {
  public:
    BasisSector() = default;

    int sites() const { return sites_; }
    int n_up() const { return n_up_; }
    int n_down() const { return n_down_; }
    int dimension() const { return int(states_.size()); }

    const std::vector<FockState>& states() const { return states_; }
    const FockState& state(int i) const { return states_[i]; }

    // Ordinal of a state in this sector; throws if the state is not a member.
    int index_of(const FockState& s) const;

    friend BasisSector enumerate_sector(int sites, int n_up, int n_down);

  private:
    int sites_ = 0;
    int n_up_ = 0;
    int n_down_ = 0;
    std::vector<FockState> states_;
    std::vector<uint64_t> keys_;  // sorted, parallel to states_
};

// Complete (n_up, n_down) sector on `sites` sites. Requires
// 0 <= n_up, n_down <= sites <= 32.
BasisSector enumerate_sector(int sites, int n_up, int n_down);

}  // namespace qcert
