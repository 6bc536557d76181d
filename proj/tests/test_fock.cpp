#include <doctest.h>

#include <algorithm>
#include <random>

#include "qcert/fock.hpp"

using namespace qcert;

namespace {

// Independent sign oracle: explicit antisymmetrized wavefunction bookkeeping.
// A state is a sorted list of occupied modes (up modes are site, down modes
// are sites + site). Applying c^dag_m c_n tracks the permutation sign of
// restoring sorted order, which is the textbook definition of the fermionic
// sign and shares no code with apply_hop.
struct ModeListOracle {
    int sites;

    std::vector<int> modes(const FockState& s) const {
        std::vector<int> m;
        for (int k = 0; k < sites; ++k) {
            if ((s.up >> k) & 1) m.push_back(k);
        }
        for (int k = 0; k < sites; ++k) {
            if ((s.down >> k) & 1) m.push_back(sites + k);
        }
        return m;  // already sorted by construction
    }

    // sign of removing mode m from the ordered list (moves past earlier modes)
    std::optional<std::pair<std::vector<int>, int>> annihilate(std::vector<int> list, int m) const {
        auto it = std::find(list.begin(), list.end(), m);
        if (it == list.end()) return std::nullopt;
        int pos = int(it - list.begin());
        list.erase(it);
        return std::make_pair(list, pos % 2 == 0 ? 1 : -1);
    }

    std::optional<std::pair<std::vector<int>, int>> create(std::vector<int> list, int m) const {
        auto it = std::lower_bound(list.begin(), list.end(), m);
        if (it != list.end() && *it == m) return std::nullopt;
        int pos = int(it - list.begin());
        list.insert(it, m);
        return std::make_pair(list, pos % 2 == 0 ? 1 : -1);
    }

    std::optional<std::pair<std::vector<int>, int>> hop(const FockState& s, int from, int to,
                                                        Spin spin) const {
        int off = spin == Spin::Up ? 0 : sites;
        auto a = annihilate(modes(s), off + from);
        if (!a) return std::nullopt;
        auto c = create(a->first, off + to);
        if (!c) return std::nullopt;
        return std::make_pair(c->first, a->second * c->second);
    }
};

}  // namespace

TEST_CASE("sector sizes follow binomial counting") {
    CHECK(enumerate_sector(2, 1, 1).dimension() == 4);
    CHECK(enumerate_sector(4, 2, 2).dimension() == 36);
    CHECK(enumerate_sector(10, 5, 5).dimension() == 63504);
}

TEST_CASE("sector enumeration is ordered and bijective") {
    auto sector = enumerate_sector(4, 2, 2);
    for (int i = 0; i < sector.dimension(); ++i) {
        CHECK(sector.index_of(sector.state(i)) == i);
        if (i > 0) CHECK(sector.state(i - 1) < sector.state(i));
    }
    CHECK_THROWS_AS(sector.index_of(FockState{1u, 1u}), std::out_of_range);
}

TEST_CASE("sector preconditions") {
    CHECK_THROWS_AS(enumerate_sector(33, 1, 1), std::invalid_argument);
    CHECK_THROWS_AS(enumerate_sector(4, -1, 2), std::invalid_argument);
    CHECK_THROWS_AS(enumerate_sector(4, 5, 2), std::invalid_argument);
}

TEST_CASE("occupancy counts both spin species") {
    FockState both{1u, 1u};  // up and down on site 0
    CHECK(occupancy(both, 0) == 2);
    FockState split{1u, 2u};  // up on site 0, down on site 1
    CHECK(occupancy(split, 2) == 0);
    auto sector = enumerate_sector(6, 3, 3);
    for (int i = 0; i < sector.dimension(); i += 37) {
        int total = 0;
        for (int k = 0; k < 6; ++k) total += occupancy(sector.state(i), k);
        CHECK(total == 6);
    }
}

TEST_CASE("adjacent hop on an otherwise empty chain has sign +1") {
    FockState s{1u, 0u};  // up on site 0
    auto h = apply_hop(s, 0, 1, Spin::Up);
    REQUIRE(h.has_value());
    CHECK(h->state.up == 2u);
    CHECK(h->sign == 1);
}

TEST_CASE("hop onto an occupied mode annihilates") {
    FockState s{3u, 0u};  // up on sites 0 and 1
    CHECK(!apply_hop(s, 0, 1, Spin::Up).has_value());
    CHECK(!apply_hop(s, 2, 0, Spin::Up).has_value());  // empty source
}

TEST_CASE("hop signs match the antisymmetrized-wavefunction oracle") {
    // every hop in every 3-site 2-or-3 electron sector, both спin species
    ModeListOracle oracle{3};
    for (auto [nu, nd] : {std::pair{1, 1}, {2, 1}, {1, 2}, {2, 2}}) {
        auto sector = enumerate_sector(3, nu, nd);
        for (int i = 0; i < sector.dimension(); ++i) {
            const FockState& s = sector.state(i);
            for (int from = 0; from < 3; ++from) {
                for (int to = 0; to < 3; ++to) {
                    if (from == to) continue;
                    for (Spin spin : {Spin::Up, Spin::Down}) {
                        auto ours = apply_hop(s, from, to, spin);
                        auto ref = oracle.hop(s, from, to, spin);
                        REQUIRE(ours.has_value() == ref.has_value());
                        if (ours) {
                            CHECK(oracle.modes(ours->state) == ref->first);
                            CHECK(ours->sign == ref->second);
                        }
                    }
                }
            }
        }
    }
}

TEST_CASE("sign equals parity of occupied modes strictly between endpoints") {
    // up hop over an occupied down mode does not cross it (different block of
    // the flattened ordering); down hops cross every up mode in between.
    auto sector = enumerate_sector(5, 2, 2);
    for (int i = 0; i < sector.dimension(); ++i) {
        const FockState& s = sector.state(i);
        for (int from = 0; from < 5; ++from) {
            for (int to = 0; to < 5; ++to) {
                if (from == to) continue;
                auto h = apply_hop(s, from, to, Spin::Up);
                if (!h) continue;
                int lo = std::min(from, to), hi = std::max(from, to);
                uint32_t between = ((1u << hi) - 1u) & ~((1u << (lo + 1)) - 1u);
                int crossings = popcount32(s.up & between);
                CHECK(h->sign == (crossings % 2 == 0 ? 1 : -1));
            }
        }
    }
}

TEST_CASE("hopping back and forth returns the original state with sign +1") {
    std::mt19937 rng(7);
    auto sector = enumerate_sector(6, 3, 3);
    std::uniform_int_distribution<int> pick(0, sector.dimension() - 1);
    std::uniform_int_distribution<int> site(0, 5);
    for (int trial = 0; trial < 500; ++trial) {
        FockState s = sector.state(pick(rng));
        int a = site(rng), b = site(rng);
        if (a == b) continue;
        Spin spin = trial % 2 == 0 ? Spin::Up : Spin::Down;
        auto fwd = apply_hop(s, a, b, spin);
        if (!fwd) continue;
        // image stays in the sector
        CHECK_NOTHROW(sector.index_of(fwd->state));
        auto back = apply_hop(fwd->state, b, a, spin);
        REQUIRE(back.has_value());
        CHECK(back->state == s);
        CHECK(back->sign * fwd->sign == 1);
    }
}
