#include "qcert/fock.hpp"

#include <algorithm>

namespace qcert {

namespace {

// Number of occupied modes strictly below flattened mode position `pos`.
// Up modes occupy positions [0, sites); down modes [sites, 2*sites).
inline int parity_count(const FockState& s, int site, Spin spin) {
    if (spin == Spin::Up) {
        return popcount32(s.up & ((1u << site) - 1u));
    }
    return popcount32(s.up) + popcount32(s.down & ((1u << site) - 1u));
}

inline int parity_sign(int crossings) { return (crossings & 1) ? -1 : +1; }

}  // namespace

std::optional<SignedState> apply_annihilate(const FockState& s, int site, Spin spin) {
    uint32_t mask = 1u << site;
    if (spin == Spin::Up) {
        if (!(s.up & mask)) return std::nullopt;
        return SignedState{FockState{s.up & ~mask, s.down}, parity_sign(parity_count(s, site, spin))};
    }
    if (!(s.down & mask)) return std::nullopt;
    return SignedState{FockState{s.up, s.down & ~mask}, parity_sign(parity_count(s, site, spin))};
}

std::optional<SignedState> apply_create(const FockState& s, int site, Spin spin) {
    uint32_t mask = 1u << site;
    if (spin == Spin::Up) {
        if (s.up & mask) return std::nullopt;
        return SignedState{FockState{s.up | mask, s.down}, parity_sign(parity_count(s, site, spin))};
    }
    if (s.down & mask) return std::nullopt;
    return SignedState{FockState{s.up, s.down | mask}, parity_sign(parity_count(s, site, spin))};
}

std::optional<SignedState> apply_hop(const FockState& s, int from, int to, Spin spin) {
    auto a = apply_annihilate(s, from, spin);
    if (!a) return std::nullopt;
    auto c = apply_create(a->state, to, spin);
    if (!c) return std::nullopt;
    return SignedState{c->state, a->sign * c->sign};
}

int BasisSector::index_of(const FockState& s) const {
    uint64_t k = s.key();
    auto it = std::lower_bound(keys_.begin(), keys_.end(), k);
    if (it == keys_.end() || *it != k) {
        throw std::out_of_range("FockState not in sector");
    }
    return int(it - keys_.begin());
}

namespace {

// All `sites`-bit masks with exactly `count` bits set, ascending.
std::vector<uint32_t> bit_combinations(int sites, int count) {
    std::vector<uint32_t> out;
    if (count == 0) {
        out.push_back(0u);
        return out;
    }
    uint32_t v = (1u << count) - 1u;
    uint32_t limit = 1u << sites;
    while (v < limit) {
        out.push_back(v);
        // next lexicographic permutation of the bit pattern
        uint32_t t = v | (v - 1);
        v = (t + 1) | (((~t & (t + 1)) - 1) >> (__builtin_ctz(v) + 1));
        if (v == 0) break;
    }
    return out;
}

}  // namespace

BasisSector enumerate_sector(int sites, int n_up, int n_down) {
    if (sites < 1 || sites > 32) {
        throw std::invalid_argument("enumerate_sector: sites must be in [1, 32]");
    }
    if (n_up < 0 || n_down < 0 || n_up > sites || n_down > sites) {
        throw std::invalid_argument("enumerate_sector: particle counts out of range");
    }
    BasisSector sector;
    sector.sites_ = sites;
    sector.n_up_ = n_up;
    sector.n_down_ = n_down;
    auto ups = bit_combinations(sites, n_up);
    auto downs = bit_combinations(sites, n_down);
    sector.states_.reserve(ups.size() * downs.size());
    for (uint32_t u : ups) {
        for (uint32_t d : downs) {
            sector.states_.push_back(FockState{u, d});
        }
    }
    std::sort(sector.states_.begin(), sector.states_.end());
    sector.keys_.reserve(sector.states_.size());
    for (const auto& s : sector.states_) sector.keys_.push_back(s.key());
    return sector;
}

}  // namespace qcert
