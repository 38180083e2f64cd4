#include "normbench/linalg.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <set>

namespace normbench {

namespace {

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

std::uint64_t pow_mod(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
    std::uint64_t r = 1 % m;
    a %= m;
    while (e) {
        if (e & 1) r = mul_mod(r, a, m);
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    return r;
}

std::uint64_t inv_unit_mod(std::uint64_t a, const PadicContext& ctx) {
    std::uint64_t order = (ctx.modulus() / ctx.p()) * (ctx.p() - 1);
    return pow_mod(a, order - 1, ctx.modulus());
}

unsigned val_p(std::uint64_t a, std::uint64_t p, unsigned cap) {
    if (a == 0) return cap;
    unsigned v = 0;
    while (a % p == 0 && v < cap) { a /= p; ++v; }
    return v;
}

std::int64_t chk(__int128 v) {
    if (v > static_cast<__int128>(INT64_MAX) || v < static_cast<__int128>(INT64_MIN))
        throw CheckError("integer overflow in lattice arithmetic");
    return static_cast<std::int64_t>(v);
}

std::int64_t chk_mul(std::int64_t a, std::int64_t b) {
    return chk(static_cast<__int128>(a) * b);
}

std::int64_t chk_add(std::int64_t a, std::int64_t b) {
    return chk(static_cast<__int128>(a) + b);
}

// g = gcd(a,b) = x*a + y*b with g >= 0
std::int64_t ext_gcd(std::int64_t a, std::int64_t b, std::int64_t& x, std::int64_t& y) {
    std::int64_t old_r = a, r = b, old_x = 1, xx = 0, old_y = 0, yy = 1;
    while (r != 0) {
        std::int64_t q = old_r / r;
        std::int64_t t = old_r - q * r; old_r = r; r = t;
        t = old_x - chk_mul(q, xx); old_x = xx; xx = t;
        t = old_y - chk_mul(q, yy); old_y = yy; yy = t;
    }
    if (old_r < 0) { old_r = -old_r; old_x = -old_x; old_y = -old_y; }
    x = old_x; y = old_y;
    return old_r;
}

} // namespace

// --------------------------------------------------------------------------
// Z/p^N dense elimination
// --------------------------------------------------------------------------

PLu::PLu(PMatrix m, const PadicContext& ctx) : lu_(std::move(m)), ctx_(ctx) {
    if (lu_.rows != lu_.cols) throw DomainError("PLu: matrix not square");
    const std::size_t n = lu_.rows;
    const std::uint64_t mod = ctx.modulus(), p = ctx.p();
    perm_.resize(n);
    for (std::size_t i = 0; i < n; ++i) perm_[i] = i;
    for (std::size_t t = 0; t < n; ++t) {
        std::size_t piv = n;
        for (std::size_t i = t; i < n; ++i)
            if (lu_.at(i, t) % p != 0) { piv = i; break; }
        if (piv == n) throw DomainError("PLu: matrix not invertible mod p");
        if (piv != t) {
            for (std::size_t j = 0; j < n; ++j) std::swap(lu_.at(piv, j), lu_.at(t, j));
            std::swap(perm_[piv], perm_[t]);
        }
        std::uint64_t dinv = inv_unit_mod(lu_.at(t, t), ctx);
        for (std::size_t i = t + 1; i < n; ++i) {
            std::uint64_t f = mul_mod(lu_.at(i, t), dinv, mod);
            if (f == 0) continue;
            lu_.at(i, t) = f; // store multiplier
            for (std::size_t j = t + 1; j < n; ++j) {
                std::uint64_t sub = mul_mod(f, lu_.at(t, j), mod);
                lu_.at(i, j) = (lu_.at(i, j) + mod - sub) % mod;
            }
        }
    }
}

std::vector<std::uint64_t> PLu::solve(std::vector<std::uint64_t> rhs) const {
    const std::size_t n = lu_.rows;
    const std::uint64_t mod = ctx_.modulus();
    if (rhs.size() != n) throw DomainError("PLu: rhs size mismatch");
    std::vector<std::uint64_t> b(n);
    for (std::size_t i = 0; i < n; ++i) b[i] = rhs[perm_[i]] % mod;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j)
            b[i] = (b[i] + mod - mul_mod(lu_.at(i, j), b[j], mod)) % mod;
    for (std::size_t i = n; i-- > 0;) {
        for (std::size_t j = i + 1; j < n; ++j)
            b[i] = (b[i] + mod - mul_mod(lu_.at(i, j), b[j], mod)) % mod;
        b[i] = mul_mod(b[i], inv_unit_mod(lu_.at(i, i), ctx_), mod);
    }
    return b;
}

std::uint64_t pdet(PMatrix m, const PadicContext& ctx) {
    if (m.rows != m.cols) throw DomainError("pdet: matrix not square");
    const std::size_t n = m.rows;
    const std::uint64_t mod = ctx.modulus(), p = ctx.p();
    const unsigned N = ctx.precision();
    bool negate = false;
    std::uint64_t det = 1;
    for (std::size_t t = 0; t < n; ++t) {
        std::size_t bi = n, bj = n;
        unsigned best = N + 1;
        for (std::size_t i = t; i < n && best > 0; ++i)
            for (std::size_t j = t; j < n; ++j) {
                unsigned v = val_p(m.at(i, j), p, N);
                if (v < best) { best = v; bi = i; bj = j; if (v == 0) break; }
            }
        if (bi == n) return 0; // remaining block vanishes mod p^N
        if (bi != t) {
            for (std::size_t j = 0; j < n; ++j) std::swap(m.at(bi, j), m.at(t, j));
            negate = !negate;
        }
        if (bj != t) {
            for (std::size_t i = 0; i < n; ++i) std::swap(m.at(i, bj), m.at(i, t));
            negate = !negate;
        }
        std::uint64_t d = m.at(t, t);
        std::uint64_t pa = 1;
        for (unsigned k = 0; k < best; ++k) pa *= p;
        std::uint64_t uinv = inv_unit_mod(d / pa, ctx);
        for (std::size_t i = t + 1; i < n; ++i) {
            std::uint64_t e = m.at(i, t);
            if (e == 0) continue;
            std::uint64_t f = mul_mod(e / pa, uinv, mod); // e/d with exact p-part
            for (std::size_t j = t; j < n; ++j) {
                std::uint64_t sub = mul_mod(f, m.at(t, j), mod);
                m.at(i, j) = (m.at(i, j) + mod - sub) % mod;
            }
        }
        det = mul_mod(det, d, mod);
    }
    return negate ? (mod - det) % mod : det;
}

std::vector<std::vector<std::uint64_t>> pkernel(PMatrix m, const PadicContext& ctx) {
    const std::size_t rows = m.rows, cols = m.cols;
    const std::uint64_t mod = ctx.modulus(), p = ctx.p();
    const unsigned N = ctx.precision();
    // diagonalize tracking column transform V
    std::vector<std::vector<std::uint64_t>> V(cols, std::vector<std::uint64_t>(cols, 0));
    for (std::size_t j = 0; j < cols; ++j) V[j][j] = 1;
    std::vector<std::uint64_t> diag(cols, 0);
    const std::size_t steps = std::min(rows, cols);
    for (std::size_t t = 0; t < steps; ++t) {
        std::size_t bi = rows, bj = cols;
        unsigned best = N + 1;
        for (std::size_t i = t; i < rows && best > 0; ++i)
            for (std::size_t j = t; j < cols; ++j) {
                unsigned v = val_p(m.at(i, j), p, N);
                if (v < best) { best = v; bi = i; bj = j; if (v == 0) break; }
            }
        if (bi == rows) break; // rest is zero
        if (bi != t)
            for (std::size_t j = 0; j < cols; ++j) std::swap(m.at(bi, j), m.at(t, j));
        if (bj != t) {
            for (std::size_t i = 0; i < rows; ++i) std::swap(m.at(i, bj), m.at(i, t));
            std::swap(V[bj], V[t]); // V stored as columns
        }
        std::uint64_t d = m.at(t, t);
        std::uint64_t pa = 1;
        for (unsigned k = 0; k < best; ++k) pa *= p;
        std::uint64_t uinv = inv_unit_mod(d / pa, ctx);
        for (std::size_t i = t + 1; i < rows; ++i) {
            std::uint64_t e = m.at(i, t);
            if (e == 0) continue;
            std::uint64_t f = mul_mod(e / pa, uinv, mod);
            for (std::size_t j = t; j < cols; ++j) {
                std::uint64_t sub = mul_mod(f, m.at(t, j), mod);
                m.at(i, j) = (m.at(i, j) + mod - sub) % mod;
            }
        }
        for (std::size_t j = t + 1; j < cols; ++j) {
            std::uint64_t e = m.at(t, j);
            if (e == 0) continue;
            std::uint64_t f = mul_mod(e / pa, uinv, mod);
            // col_j -= f * col_t (only row t is nonzero in col t below)
            for (std::size_t i = 0; i < rows; ++i) {
                std::uint64_t sub = mul_mod(f, m.at(i, t), mod);
                m.at(i, j) = (m.at(i, j) + mod - sub) % mod;
            }
            for (std::size_t k = 0; k < cols; ++k) {
                std::uint64_t sub = mul_mod(f, V[t][k], mod);
                V[j][k] = (V[j][k] + mod - sub) % mod;
            }
        }
        diag[t] = m.at(t, t);
    }
    std::vector<std::vector<std::uint64_t>> gens;
    for (std::size_t t = 0; t < cols; ++t) {
        unsigned a = val_p(diag[t], p, N); // a == N when diag vanishes mod p^N
        if (a == 0) continue;              // unit pivot: coordinate forced to 0
        std::uint64_t scale = 1;           // p^(N-a); the column is free when a == N
        for (unsigned k = a; k < N; ++k) scale *= p;
        std::vector<std::uint64_t> g(cols);
        bool nonzero = false;
        for (std::size_t k = 0; k < cols; ++k) {
            g[k] = mul_mod(V[t][k], scale % mod, mod);
            nonzero = nonzero || g[k] != 0;
        }
        if (nonzero) gens.push_back(std::move(g));
    }
    return gens;
}

std::size_t fp_rank(PMatrix m, const PadicContext& ctx) {
    const std::uint64_t p = ctx.p();
    const std::size_t rows = m.rows, cols = m.cols;
    std::size_t rank = 0;
    for (std::size_t col = 0; col < cols && rank < rows; ++col) {
        std::size_t piv = rows;
        for (std::size_t i = rank; i < rows; ++i)
            if (m.at(i, col) % p != 0) { piv = i; break; }
        if (piv == rows) continue;
        if (piv != rank)
            for (std::size_t j = 0; j < cols; ++j) std::swap(m.at(piv, j), m.at(rank, j));
        std::uint64_t dinv = pow_mod(m.at(rank, col) % p, p - 2, p);
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == rank) continue;
            std::uint64_t f = mul_mod(m.at(i, col) % p, dinv, p);
            if (f == 0) continue;
            for (std::size_t j = 0; j < cols; ++j)
                m.at(i, j) = (m.at(i, j) % p + p - mul_mod(f, m.at(rank, j) % p, p)) % p;
        }
        ++rank;
    }
    return rank;
}

// --------------------------------------------------------------------------
// Integer row lattices
// --------------------------------------------------------------------------

RowLattice::RowLattice(std::vector<std::int64_t> col_mods) : mods_(std::move(col_mods)) {
    for (std::int64_t m : mods_)
        if (m < 1) throw DomainError("RowLattice: column modulus must be >= 1");
}

void RowLattice::normalize_entries(std::vector<std::int64_t>& row) const {
    for (std::size_t j = 0; j < row.size(); ++j) {
        std::int64_t m = mods_[j];
        row[j] %= m;
        if (row[j] < 0) row[j] += m;
    }
}

void RowLattice::add_row(std::vector<std::int64_t> first) {
    if (first.size() != mods_.size()) throw DomainError("RowLattice: row width mismatch");
    std::deque<std::vector<std::int64_t>> work;
    work.push_back(std::move(first));
    while (!work.empty()) {
        std::vector<std::int64_t> row = std::move(work.front());
        work.pop_front();
        normalize_entries(row);
        std::size_t j = 0;
        while (j < row.size()) {
            if (row[j] == 0) { ++j; continue; }
            auto it = pivot_rows_.find(j);
            if (it == pivot_rows_.end()) {
                // new pivot: gcd with the column modulus
                std::int64_t x, y;
                std::int64_t g = ext_gcd(row[j], mods_[j], x, y);
                std::vector<std::int64_t> piv(row.size(), 0);
                for (std::size_t k = j; k < row.size(); ++k) piv[k] = chk_mul(x, row[k]);
                piv[j] = g;
                normalize_entries(piv);
                piv[j] = g; // keep the pivot entry exact, not mod-reduced
                // residual of the incoming row
                std::int64_t q = row[j] / g;
                for (std::size_t k = j; k < row.size(); ++k)
                    row[k] = chk_add(row[k], -chk_mul(q, piv[k]));
                normalize_entries(row);
                // annihilator row keeps the Howell form complete
                if (g < mods_[j]) {
                    std::int64_t t = mods_[j] / g;
                    std::vector<std::int64_t> ann(row.size(), 0);
                    for (std::size_t k = j + 1; k < row.size(); ++k) ann[k] = chk_mul(t, piv[k]);
                    work.push_back(std::move(ann));
                }
                pivot_rows_[j] = std::move(piv);
                continue;
            }
            std::vector<std::int64_t>& piv = it->second;
            std::int64_t d = piv[j];
            if (row[j] % d == 0) {
                std::int64_t q = row[j] / d;
                for (std::size_t k = j; k < row.size(); ++k)
                    row[k] = chk_add(row[k], -chk_mul(q, piv[k]));
                normalize_entries(row);
                continue;
            }
            // combine to the gcd and retire the old pivot into the worklist
            std::int64_t x, y;
            std::int64_t g = ext_gcd(d, row[j], x, y);
            std::vector<std::int64_t> comb(row.size(), 0);
            for (std::size_t k = j; k < row.size(); ++k)
                comb[k] = chk_add(chk_mul(x, piv[k]), chk_mul(y, row[k]));
            normalize_entries(comb);
            comb[j] = g;
            std::vector<std::int64_t> old_resid(row.size(), 0);
            std::int64_t qd = d / g;
            for (std::size_t k = j; k < row.size(); ++k)
                old_resid[k] = chk_add(piv[k], -chk_mul(qd, comb[k]));
            work.push_back(std::move(old_resid));
            std::int64_t qr = row[j] / g;
            for (std::size_t k = j; k < row.size(); ++k)
                row[k] = chk_add(row[k], -chk_mul(qr, comb[k]));
            normalize_entries(row);
            if (g < mods_[j]) {
                std::int64_t t = mods_[j] / g;
                std::vector<std::int64_t> ann(row.size(), 0);
                for (std::size_t k = j + 1; k < row.size(); ++k) ann[k] = chk_mul(t, comb[k]);
                work.push_back(std::move(ann));
            }
            it->second = std::move(comb);
        }
    }
}

std::vector<std::int64_t> RowLattice::reduce(std::vector<std::int64_t> row) const {
    if (row.size() != mods_.size()) throw DomainError("RowLattice: row width mismatch");
    normalize_entries(row);
    for (const auto& [j, piv] : pivot_rows_) {
        if (row[j] == 0) continue;
        std::int64_t q = row[j] / piv[j];
        if (q == 0) continue;
        for (std::size_t k = j; k < row.size(); ++k)
            row[k] = chk_add(row[k], -chk_mul(q, piv[k]));
        normalize_entries(row);
    }
    return row;
}

bool RowLattice::contains(const std::vector<std::int64_t>& row) const {
    auto r = reduce(row);
    return std::all_of(r.begin(), r.end(), [](std::int64_t v) { return v == 0; });
}

std::vector<std::vector<std::int64_t>> RowLattice::basis() const {
    std::vector<std::vector<std::int64_t>> rows;
    for (std::size_t j = 0; j < mods_.size(); ++j) {
        auto it = pivot_rows_.find(j);
        if (it != pivot_rows_.end()) {
            rows.push_back(it->second);
        } else {
            std::vector<std::int64_t> rel(mods_.size(), 0);
            rel[j] = mods_[j];
            rows.push_back(std::move(rel));
        }
    }
    return rows;
}

// --------------------------------------------------------------------------
// Integer SNF helpers
// --------------------------------------------------------------------------

namespace {

struct SnfResult {
    std::vector<std::int64_t> diag;                // raw diagonal, may include 0
    std::vector<std::vector<std::int64_t>> vcols;  // right transform as columns (optional)
};

SnfResult snf_core(std::vector<std::vector<std::int64_t>> a, std::size_t cols,
                   bool track_v, bool divisibility_chain) {
    const std::size_t rows = a.size();
    std::vector<std::vector<std::int64_t>> V;
    if (track_v) {
        V.assign(cols, std::vector<std::int64_t>(cols, 0));
        for (std::size_t j = 0; j < cols; ++j) V[j][j] = 1;
    }
    const std::size_t steps = std::min(rows, cols);
    std::vector<std::int64_t> diag(cols, 0);
    for (std::size_t t = 0; t < steps; ++t) {
        for (;;) {
            // locate minimal nonzero entry in the working block
            std::size_t bi = rows, bj = cols;
            std::int64_t best = 0;
            for (std::size_t i = t; i < rows; ++i)
                for (std::size_t j = t; j < cols; ++j) {
                    std::int64_t v = a[i][j] < 0 ? -a[i][j] : a[i][j];
                    if (v != 0 && (best == 0 || v < best)) { best = v; bi = i; bj = j; }
                }
            if (bi == rows) { t = steps; break; } // block is zero
            if (bi != t) std::swap(a[bi], a[t]);
            if (bj != t) {
                for (std::size_t i = 0; i < rows; ++i) std::swap(a[i][bj], a[i][t]);
                if (track_v) std::swap(V[bj], V[t]);
            }
            bool clean = true;
            for (std::size_t i = t + 1; i < rows; ++i) {
                if (a[i][t] == 0) continue;
                std::int64_t q = a[i][t] / a[t][t];
                if (q != 0)
                    for (std::size_t j = t; j < cols; ++j)
                        a[i][j] = chk_add(a[i][j], -chk_mul(q, a[t][j]));
                if (a[i][t] != 0) clean = false;
            }
            for (std::size_t j = t + 1; j < cols; ++j) {
                if (a[t][j] == 0) continue;
                std::int64_t q = a[t][j] / a[t][t];
                if (q != 0) {
                    for (std::size_t i = 0; i < rows; ++i)
                        a[i][j] = chk_add(a[i][j], -chk_mul(q, a[i][t]));
                    if (track_v)
                        for (std::size_t k = 0; k < cols; ++k)
                            V[j][k] = chk_add(V[j][k], -chk_mul(q, V[t][k]));
                }
                if (a[t][j] != 0) clean = false;
            }
            if (!clean) continue;
            if (divisibility_chain) {
                bool fixed = true;
                for (std::size_t i = t + 1; i < rows && fixed; ++i)
                    for (std::size_t j = t + 1; j < cols; ++j)
                        if (a[i][j] % a[t][t] != 0) {
                            for (std::size_t k = t; k < cols; ++k)
                                a[t][k] = chk_add(a[t][k], a[i][k]);
                            fixed = false;
                            break;
                        }
                if (!fixed) continue;
            }
            break;
        }
        if (t >= steps) break;
        diag[t] = a[t][t] < 0 ? -a[t][t] : a[t][t];
    }
    SnfResult res;
    res.diag = std::move(diag);
    res.vcols = std::move(V);
    return res;
}

} // namespace

std::vector<std::int64_t> snf_invariants(std::vector<std::vector<std::int64_t>> rows,
                                         std::size_t cols) {
    for (auto& r : rows)
        if (r.size() != cols) throw DomainError("snf_invariants: ragged rows");
    auto res = snf_core(std::move(rows), cols, false, true);
    std::vector<std::int64_t> inv;
    for (std::int64_t d : res.diag)
        if (d > 1) inv.push_back(d);
    return inv;
}

std::vector<std::vector<std::int64_t>> kernel_mod(
    const std::vector<std::vector<std::int64_t>>& p_rows, std::size_t n,
    std::int64_t L) {
    std::vector<std::vector<std::int64_t>> m = p_rows;
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<std::int64_t> rel(n, 0);
        rel[j] = L;
        m.push_back(std::move(rel));
    }
    auto res = snf_core(std::move(m), n, true, false);
    std::vector<std::vector<std::int64_t>> gens;
    for (std::size_t t = 0; t < n; ++t) {
        std::int64_t d = res.diag[t];
        if (d == 0) throw CheckError("kernel_mod: unexpected zero diagonal");
        std::int64_t g = std::gcd(d, L);
        std::int64_t scale = L / g;
        std::vector<std::int64_t> gen(n);
        bool nonzero = false;
        for (std::size_t k = 0; k < n; ++k) {
            std::int64_t v = chk_mul(res.vcols[t][k], scale) % L;
            if (v < 0) v += L;
            gen[k] = v;
            nonzero = nonzero || v != 0;
        }
        if (nonzero) gens.push_back(std::move(gen));
    }
    return gens;
}

// --------------------------------------------------------------------------
// Finite abelian quotients
// --------------------------------------------------------------------------

QuotientGroup make_quotient(const std::vector<std::int64_t>& col_mods,
                            std::vector<std::vector<std::int64_t>> gens,
                            const std::vector<std::vector<std::int64_t>>& rels) {
    const std::size_t n = col_mods.size();
    RowLattice num(col_mods);
    for (const auto& g : gens) num.add_row(g);
    for (const auto& r : rels)
        if (!num.contains(r))
            throw CheckError("make_quotient: relation outside generator span");

    RowLattice den(col_mods);
    for (const auto& r : rels) den.add_row(r);

    // numerator basis, triangular by pivot column
    auto basis = num.basis();

    // coordinates of each denominator generator in that basis
    std::vector<std::vector<std::int64_t>> coords;
    auto express = [&](std::vector<std::int64_t> v) {
        std::vector<std::int64_t> c(n, 0);
        for (std::size_t j = 0; j < n; ++j) {
            if (v[j] == 0) continue;
            if (v[j] % basis[j][j] != 0)
                throw CheckError("make_quotient: vector not in numerator span");
            std::int64_t q = v[j] / basis[j][j];
            c[j] = q;
            for (std::size_t k = j; k < n; ++k)
                v[k] = chk_add(v[k], -chk_mul(q, basis[j][k]));
        }
        return c;
    };
    for (const auto& r : rels) coords.push_back(express(r));
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<std::int64_t> rel(n, 0);
        rel[j] = col_mods[j];
        coords.push_back(express(rel));
    }

    QuotientGroup q{col_mods, std::move(gens), std::move(den), {}, 1};
    q.invariants = snf_invariants(std::move(coords), n);
    for (std::int64_t d : q.invariants) q.order = chk_mul(q.order, d);
    return q;
}

std::vector<std::vector<std::int64_t>> QuotientGroup::classes(std::size_t budget) const {
    std::set<std::vector<std::int64_t>> seen;
    std::deque<std::vector<std::int64_t>> frontier;
    std::vector<std::int64_t> zero(col_mods.size(), 0);
    seen.insert(denominator.reduce(zero));
    frontier.push_back(zero);
    while (!frontier.empty()) {
        auto cur = std::move(frontier.front());
        frontier.pop_front();
        for (const auto& g : gens) {
            std::vector<std::int64_t> nxt(cur.size());
            for (std::size_t k = 0; k < cur.size(); ++k) nxt[k] = chk_add(cur[k], g[k]);
            auto canon = denominator.reduce(nxt);
            if (seen.insert(canon).second) {
                if (seen.size() > budget) throw BudgetError("quotient class enumeration budget");
                frontier.push_back(std::move(canon));
            }
        }
    }
    return {seen.begin(), seen.end()};
}

bool QuotientGroup::is_zero(const std::vector<std::int64_t>& v) const {
    return denominator.contains(v);
}

bool QuotientGroup::same_class(const std::vector<std::int64_t>& a,
                               const std::vector<std::int64_t>& b) const {
    std::vector<std::int64_t> d(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) d[k] = chk_add(a[k], -b[k]);
    return denominator.contains(d);
}

} // namespace normbench
