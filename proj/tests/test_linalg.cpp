#include "doctest.h"

#include "normbench/linalg.hpp"
#include "normbench/rng.hpp"

#include <set>

using namespace normbench;

namespace {

// brute-force subgroup of (Z/m_0) x ... generated by rows
std::set<std::vector<std::int64_t>> span_bruteforce(
    const std::vector<std::vector<std::int64_t>>& rows,
    const std::vector<std::int64_t>& mods) {
    std::set<std::vector<std::int64_t>> seen;
    std::vector<std::vector<std::int64_t>> frontier;
    std::vector<std::int64_t> zero(mods.size(), 0);
    seen.insert(zero);
    frontier.push_back(zero);
    while (!frontier.empty()) {
        auto cur = frontier.back();
        frontier.pop_back();
        for (const auto& g : rows) {
            auto nxt = cur;
            for (std::size_t k = 0; k < mods.size(); ++k)
                nxt[k] = (nxt[k] + g[k] % mods[k] + mods[k]) % mods[k];
            if (seen.insert(nxt).second) frontier.push_back(nxt);
        }
    }
    return seen;
}

std::vector<std::uint64_t> mat_vec(const PMatrix& m, const std::vector<std::uint64_t>& x,
                                   std::uint64_t mod) {
    std::vector<std::uint64_t> y(m.rows, 0);
    for (std::size_t i = 0; i < m.rows; ++i)
        for (std::size_t j = 0; j < m.cols; ++j)
            y[i] = (y[i] + (unsigned __int128)m.at(i, j) * x[j]) % mod;
    return y;
}

} // namespace

TEST_CASE("PLu solves invertible systems mod p^N") {
    PadicContext ctx(3, 4);
    Rng rng(21);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t n = 1 + rng.below(6);
        PMatrix m(n, n);
        for (auto& v : m.a) v = rng.below(ctx.modulus());
        if (fp_rank(m, ctx) < n) continue;
        PLu lu(m, ctx);
        std::vector<std::uint64_t> x(n);
        for (auto& v : x) v = rng.below(ctx.modulus());
        auto b = mat_vec(m, x, ctx.modulus());
        CHECK(lu.solve(b) == x);
    }
}

TEST_CASE("pdet matches cofactor expansion and is multiplicative") {
    PadicContext ctx(3, 3);
    Rng rng(22);
    for (int rep = 0; rep < 50; ++rep) {
        PMatrix m(3, 3);
        for (auto& v : m.a) v = rng.below(ctx.modulus());
        std::uint64_t mod = ctx.modulus();
        auto a = [&](int i, int j) { return (unsigned __int128)m.at(i, j); };
        unsigned __int128 pos = a(0,0)*a(1,1)%mod*a(2,2) + a(0,1)*a(1,2)%mod*a(2,0) + a(0,2)*a(1,0)%mod*a(2,1);
        unsigned __int128 neg = a(0,2)*a(1,1)%mod*a(2,0) + a(0,0)*a(1,2)%mod*a(2,1) + a(0,1)*a(1,0)%mod*a(2,2);
        std::uint64_t expect = (std::uint64_t)((pos % mod + mod - neg % mod) % mod);
        CHECK(pdet(m, ctx) == expect);
    }
    for (int rep = 0; rep < 20; ++rep) {
        PMatrix x(3, 3), y(3, 3);
        for (auto& v : x.a) v = rng.below(ctx.modulus());
        for (auto& v : y.a) v = rng.below(ctx.modulus());
        PMatrix xy(3, 3);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                unsigned __int128 s = 0;
                for (int k = 0; k < 3; ++k) s += (unsigned __int128)x.at(i, k) * y.at(k, j) % ctx.modulus();
                xy.at(i, j) = (std::uint64_t)(s % ctx.modulus());
            }
        CHECK(pdet(xy, ctx) == (unsigned __int128)pdet(x, ctx) * pdet(y, ctx) % ctx.modulus());
    }
}

TEST_CASE("pkernel finds the full solution set") {
    PadicContext ctx(3, 2); // work mod 9 so brute force stays cheap
    Rng rng(23);
    for (int rep = 0; rep < 25; ++rep) {
        const std::size_t rows = 1 + rng.below(2), cols = 2;
        PMatrix m(rows, cols);
        for (auto& v : m.a) v = rng.below(ctx.modulus());
        auto gens = pkernel(m, ctx);
        // every generator solves
        for (const auto& g : gens) {
            auto y = mat_vec(m, g, ctx.modulus());
            for (auto v : y) CHECK(v == 0);
        }
        // generated subgroup equals brute-force solution set
        std::vector<std::vector<std::int64_t>> igens;
        for (const auto& g : gens) igens.push_back({(std::int64_t)g[0], (std::int64_t)g[1]});
        auto spanned = span_bruteforce(igens, {9, 9});
        std::size_t count = 0;
        for (std::int64_t x0 = 0; x0 < 9; ++x0)
            for (std::int64_t x1 = 0; x1 < 9; ++x1) {
                auto y = mat_vec(m, {(std::uint64_t)x0, (std::uint64_t)x1}, 9);
                bool solves = true;
                for (auto v : y) solves = solves && v == 0;
                if (solves) {
                    ++count;
                    CHECK(spanned.count({x0, x1}) == 1);
                }
            }
        CHECK(spanned.size() == count);
    }
}

TEST_CASE("RowLattice membership equals brute-force span") {
    Rng rng(24);
    for (int rep = 0; rep < 30; ++rep) {
        std::vector<std::int64_t> mods = {
            static_cast<std::int64_t>(2 + rng.below(7)),
            static_cast<std::int64_t>(2 + rng.below(7)),
            static_cast<std::int64_t>(2 + rng.below(7))};
        std::vector<std::vector<std::int64_t>> gens;
        const int ngens = 1 + static_cast<int>(rng.below(3));
        for (int g = 0; g < ngens; ++g)
            gens.push_back({rng.range(-10, 10), rng.range(-10, 10), rng.range(-10, 10)});
        RowLattice lat(mods);
        for (const auto& g : gens) lat.add_row(g);
        auto truth = span_bruteforce(gens, mods);
        for (std::int64_t a = 0; a < mods[0]; ++a)
            for (std::int64_t b = 0; b < mods[1]; ++b)
                for (std::int64_t c = 0; c < mods[2]; ++c)
                    CHECK(lat.contains({a, b, c}) == (truth.count({a, b, c}) == 1));
        // canonical residues constant on cosets
        for (int t = 0; t < 10; ++t) {
            std::vector<std::int64_t> v = {rng.range(0, mods[0] - 1), rng.range(0, mods[1] - 1),
                                           rng.range(0, mods[2] - 1)};
            auto r1 = lat.reduce(v);
            auto shift = gens[rng.below(gens.size())];
            std::vector<std::int64_t> w(3);
            for (int k = 0; k < 3; ++k) w[k] = v[k] + shift[k];
            CHECK(lat.reduce(w) == r1);
        }
    }
}

TEST_CASE("snf invariants") {
    CHECK(snf_invariants({{2, 0}, {0, 3}}, 2) == std::vector<std::int64_t>{6});
    CHECK(snf_invariants({{2, 4}, {6, 8}}, 2) == std::vector<std::int64_t>{2, 4});
    CHECK(snf_invariants({{1, 0}, {0, 1}}, 2).empty());
    CHECK(snf_invariants({{4, 0, 0}, {0, 6, 0}, {0, 0, 10}}, 3) ==
          std::vector<std::int64_t>{2, 2, 60});
}

TEST_CASE("kernel_mod matches brute force") {
    Rng rng(25);
    for (int rep = 0; rep < 30; ++rep) {
        const std::int64_t L = 2 + static_cast<std::int64_t>(rng.below(11));
        const std::size_t n = 2 + rng.below(2);
        std::vector<std::vector<std::int64_t>> rows;
        const int nr = 1 + static_cast<int>(rng.below(2));
        for (int r = 0; r < nr; ++r) {
            std::vector<std::int64_t> row(n);
            for (auto& v : row) v = rng.range(-6, 6);
            rows.push_back(row);
        }
        auto gens = kernel_mod(rows, n, L);
        std::vector<std::int64_t> mods(n, L);
        auto spanned = span_bruteforce(gens, mods);
        // enumerate all vectors, compare membership
        std::vector<std::int64_t> x(n, 0);
        std::size_t matches = 0, total_solutions = 0;
        for (;;) {
            bool solves = true;
            for (const auto& row : rows) {
                std::int64_t acc = 0;
                for (std::size_t k = 0; k < n; ++k) acc += row[k] * x[k];
                if (((acc % L) + L) % L != 0) { solves = false; break; }
            }
            if (solves) {
                ++total_solutions;
                if (spanned.count(x)) ++matches;
            }
            std::size_t d = 0;
            while (d < n && ++x[d] == L) x[d++] = 0;
            if (d == n) break;
        }
        CHECK(matches == total_solutions);
        CHECK(spanned.size() == total_solutions);
    }
}

TEST_CASE("quotient groups") {
    // (Z/4 + Z/6) / <(2,0)> has invariants 2, 6
    QuotientGroup q = make_quotient({4, 6}, {{1, 0}, {0, 1}}, {{2, 0}});
    CHECK(q.invariants == std::vector<std::int64_t>{2, 6});
    CHECK(q.order == 12);
    CHECK(q.classes().size() == 12);
    CHECK(q.same_class({3, 1}, {1, 1}));
    CHECK(!q.same_class({1, 1}, {0, 1}));

    // trivial quotient
    QuotientGroup t = make_quotient({5, 5}, {{1, 0}, {0, 1}}, {{1, 0}, {0, 1}});
    CHECK(t.invariants.empty());
    CHECK(t.order == 1);
}
