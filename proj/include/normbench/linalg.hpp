#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "normbench/errors.hpp"
#include "normbench/padic.hpp"

namespace normbench {

// ---------------------------------------------------------------------------
// Dense matrices over Z/p^N.  Z/p^N is a chain ring, so Gaussian elimination
// works as long as pivots are chosen with minimal p-valuation.
// ---------------------------------------------------------------------------

struct PMatrix {
    std::size_t rows = 0, cols = 0;
    std::vector<std::uint64_t> a; // row-major, entries in [0, p^N)

    PMatrix() = default;
    PMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0) {}

    std::uint64_t& at(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    std::uint64_t at(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
};

// LU decomposition with unit pivots; requires the matrix to be invertible
// mod p (true for change-of-basis matrices between integral bases).
class PLu {
public:
    PLu(PMatrix m, const PadicContext& ctx);
    std::vector<std::uint64_t> solve(std::vector<std::uint64_t> rhs) const;

private:
    PMatrix lu_;
    std::vector<std::size_t> perm_;
    PadicContext ctx_;
};

// Determinant mod p^N via minimal-valuation pivoting.
std::uint64_t pdet(PMatrix m, const PadicContext& ctx);

// Generators of {x : A x = 0 mod p^N}.
std::vector<std::vector<std::uint64_t>> pkernel(PMatrix m, const PadicContext& ctx);

// Rank of the mod-p reduction.
std::size_t fp_rank(PMatrix m, const PadicContext& ctx);

// ---------------------------------------------------------------------------
// Integer row lattices with per-column relations.
//
// RowLattice maintains a Howell-style echelon form of the lattice spanned by
// the added rows together with the relation rows m_j * e_j.  Membership
// testing against the echelon is exact.  Used as the workhorse for finite
// abelian group linear algebra in the cohomology module.
// ---------------------------------------------------------------------------

class RowLattice {
public:
    explicit RowLattice(std::vector<std::int64_t> col_mods);

    std::size_t cols() const { return mods_.size(); }
    void add_row(std::vector<std::int64_t> row);
    // Canonical residue of `row` modulo the lattice.
    std::vector<std::int64_t> reduce(std::vector<std::int64_t> row) const;
    bool contains(const std::vector<std::int64_t>& row) const;

    // Triangular basis (one row per column, ordered by pivot column).  Only
    // meaningful because every column modulus is finite.
    std::vector<std::vector<std::int64_t>> basis() const;

private:
    void normalize_entries(std::vector<std::int64_t>& row) const;

    std::vector<std::int64_t> mods_;
    std::map<std::size_t, std::vector<std::int64_t>> pivot_rows_; // col -> row
};

// Invariant factors (SNF diagonal, 1s dropped, ascending divisibility chain)
// of the integer matrix `rows`.
std::vector<std::int64_t> snf_invariants(std::vector<std::vector<std::int64_t>> rows,
                                         std::size_t cols);

// Generators of {x in Z^n : P x == 0 mod L} taken mod L.
// P is given by rows of width n.
std::vector<std::vector<std::int64_t>> kernel_mod(
    const std::vector<std::vector<std::int64_t>>& p_rows, std::size_t n,
    std::int64_t L);

// Finite abelian quotient (span(gens) + Lambda) / (span(rels) + Lambda)
// inside Z^n with coordinate relations Lambda = <m_j e_j>.  Requires the
// relation span to be contained in the generator span.
struct QuotientGroup {
    std::vector<std::int64_t> col_mods;
    std::vector<std::vector<std::int64_t>> gens;
    RowLattice denominator;
    std::vector<std::int64_t> invariants; // ascending, 1s dropped
    std::int64_t order = 1;

    // All classes as canonical representatives (deterministic order).
    std::vector<std::vector<std::int64_t>> classes(std::size_t budget = 100000) const;
    bool is_zero(const std::vector<std::int64_t>& v) const;
    bool same_class(const std::vector<std::int64_t>& a,
                    const std::vector<std::int64_t>& b) const;
};

QuotientGroup make_quotient(const std::vector<std::int64_t>& col_mods,
                            std::vector<std::vector<std::int64_t>> gens,
                            const std::vector<std::vector<std::int64_t>>& rels);

} // namespace normbench
