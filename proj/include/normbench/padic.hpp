#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "normbench/errors.hpp"

namespace normbench {

bool is_prime(std::uint64_t n);

// v_p(x) as a normalized fraction, or the +infinity marker used when x is
// indistinguishable from zero at working precision.
struct Valuation {
    bool infinite = false;
    std::int64_t num = 0;
    std::int64_t den = 1;

    static Valuation infinity() { return Valuation{true, 0, 1}; }
    static Valuation of(std::int64_t n, std::int64_t d = 1);

    bool operator==(const Valuation&) const = default;
    Valuation operator+(const Valuation& o) const;
    bool operator<(const Valuation& o) const;
    bool operator<=(const Valuation& o) const { return *this < o || *this == o; }
    std::string str() const;
};

// Fixes the prime p and precision exponent N.  Every PadicInt lives in
// Z/p^N viewed as Z_p truncated at p^N; p^N must fit in 62 bits so that
// products are exact via unsigned 128-bit arithmetic.
class PadicContext {
public:
    PadicContext(std::uint64_t p, unsigned precision);

    std::uint64_t p() const { return p_; }
    unsigned precision() const { return precision_; }
    std::uint64_t modulus() const { return modulus_; }
    std::uint64_t pow_p(unsigned k) const; // p^k for k <= precision

    bool operator==(const PadicContext&) const = default;

private:
    std::uint64_t p_ = 0;
    unsigned precision_ = 0;
    std::uint64_t modulus_ = 0;
};

// An element of Z_p known mod p^N.  Immutable; arithmetic requires both
// operands to share the same context.
class PadicInt {
public:
    PadicInt(const PadicContext& ctx, std::uint64_t residue)
        : ctx_(ctx), r_(residue % ctx.modulus()) {}

    static PadicInt from_int(const PadicContext& ctx, std::int64_t v);

    const PadicContext& context() const { return ctx_; }
    std::uint64_t residue() const { return r_; }

    bool is_zero() const { return r_ == 0; }
    bool is_unit() const { return r_ % ctx_.p() != 0; }

    PadicInt operator+(const PadicInt& o) const;
    PadicInt operator-(const PadicInt& o) const;
    PadicInt operator*(const PadicInt& o) const;
    PadicInt operator-() const;
    bool operator==(const PadicInt& o) const;
    bool operator!=(const PadicInt& o) const { return !(*this == o); }

    // Inverse of a unit; DomainError on non-units.
    PadicInt inv() const;
    PadicInt pow(std::uint64_t e) const;

    // Largest k <= N with p^k | residue; +infinity marker iff residue == 0.
    Valuation val() const;

    // Exact division by p^k; DomainError if p^k does not divide the residue.
    // The result is only determined mod p^(N-k); the caller owns that loss.
    PadicInt div_exact_pk(unsigned k) const;

private:
    void require_same_context(const PadicInt& o) const;

    PadicContext ctx_;
    std::uint64_t r_;
};

// Unique (p-1)-st root of unity congruent to a mod p.  DomainError if p | a.
PadicInt teichmuller(const PadicContext& ctx, std::uint64_t a);

// Newton lift of a simple root a0 of f (integer coefficients, f[i] is the
// coefficient of x^i): f(a0) = 0 mod p and f'(a0) a unit are required.
PadicInt hensel_lift(std::span<const std::int64_t> f, std::uint64_t a0,
                     const PadicContext& ctx);

} // namespace normbench
