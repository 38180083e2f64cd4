#include "normbench/padic.hpp"

#include <numeric>

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

} // namespace

bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

Valuation Valuation::of(std::int64_t n, std::int64_t d) {
    if (d == 0) throw DomainError("valuation with zero denominator");
    if (d < 0) { n = -n; d = -d; }
    std::int64_t g = std::gcd(n < 0 ? -n : n, d);
    if (g > 1) { n /= g; d /= g; }
    return Valuation{false, n, d};
}

Valuation Valuation::operator+(const Valuation& o) const {
    if (infinite || o.infinite) return infinity();
    return of(num * o.den + o.num * den, den * o.den);
}

bool Valuation::operator<(const Valuation& o) const {
    if (infinite) return false;
    if (o.infinite) return true;
    return num * o.den < o.num * den;
}

std::string Valuation::str() const {
    if (infinite) return "inf";
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
}

PadicContext::PadicContext(std::uint64_t p, unsigned precision)
    : p_(p), precision_(precision) {
    if (!is_prime(p)) throw ConfigError("p = " + std::to_string(p) + " is not prime");
    if (precision < 1) throw ConfigError("precision must be >= 1");
    std::uint64_t m = 1;
    for (unsigned i = 0; i < precision; ++i) {
        if (m > (1ULL << 62) / p)
            throw BudgetError("p^N exceeds 62-bit budget");
        m *= p;
    }
    modulus_ = m;
}

std::uint64_t PadicContext::pow_p(unsigned k) const {
    if (k > precision_) throw DomainError("p^k beyond precision");
    std::uint64_t m = 1;
    for (unsigned i = 0; i < k; ++i) m *= p_;
    return m;
}

PadicInt PadicInt::from_int(const PadicContext& ctx, std::int64_t v) {
    std::int64_t m = static_cast<std::int64_t>(ctx.modulus());
    std::int64_t r = v % m;
    if (r < 0) r += m;
    return PadicInt(ctx, static_cast<std::uint64_t>(r));
}

void PadicInt::require_same_context(const PadicInt& o) const {
    if (!(ctx_ == o.ctx_)) throw DomainError("p-adic context mismatch");
}

PadicInt PadicInt::operator+(const PadicInt& o) const {
    require_same_context(o);
    std::uint64_t s = r_ + o.r_;
    if (s >= ctx_.modulus()) s -= ctx_.modulus();
    return PadicInt(ctx_, s);
}

PadicInt PadicInt::operator-(const PadicInt& o) const {
    require_same_context(o);
    std::uint64_t s = r_ + (ctx_.modulus() - o.r_);
    if (s >= ctx_.modulus()) s -= ctx_.modulus();
    return PadicInt(ctx_, s);
}

PadicInt PadicInt::operator*(const PadicInt& o) const {
    require_same_context(o);
    return PadicInt(ctx_, mul_mod(r_, o.r_, ctx_.modulus()));
}

PadicInt PadicInt::operator-() const {
    return PadicInt(ctx_, r_ == 0 ? 0 : ctx_.modulus() - r_);
}

bool PadicInt::operator==(const PadicInt& o) const {
    require_same_context(o);
    return r_ == o.r_;
}

PadicInt PadicInt::inv() const {
    if (!is_unit()) throw DomainError("inverse of non-unit p-adic integer");
    // Units mod p^N form a group of order p^(N-1)*(p-1).
    std::uint64_t order = (ctx_.modulus() / ctx_.p()) * (ctx_.p() - 1);
    return PadicInt(ctx_, pow_mod(r_, order - 1, ctx_.modulus()));
}

PadicInt PadicInt::pow(std::uint64_t e) const {
    return PadicInt(ctx_, pow_mod(r_, e, ctx_.modulus()));
}

Valuation PadicInt::val() const {
    if (r_ == 0) return Valuation::infinity();
    std::uint64_t v = 0, r = r_;
    while (r % ctx_.p() == 0) { r /= ctx_.p(); ++v; }
    return Valuation::of(static_cast<std::int64_t>(v));
}

PadicInt PadicInt::div_exact_pk(unsigned k) const {
    std::uint64_t pk = 1;
    for (unsigned i = 0; i < k; ++i) pk *= ctx_.p();
    if (r_ % pk != 0) throw DomainError("inexact division by p^k");
    return PadicInt(ctx_, r_ / pk);
}

PadicInt teichmuller(const PadicContext& ctx, std::uint64_t a) {
    a %= ctx.p();
    if (a == 0) throw DomainError("teichmuller of residue 0");
    // Iterate x -> x^p; converges to the (p-1)-st root of unity above a.
    std::uint64_t x = a;
    for (unsigned i = 0; i <= ctx.precision() + 1; ++i) {
        std::uint64_t next = pow_mod(x, ctx.p(), ctx.modulus());
        if (next == x) break;
        x = next;
    }
    if (pow_mod(x, ctx.p(), ctx.modulus()) != x)
        throw CheckError("teichmuller iteration failed to stabilize");
    return PadicInt(ctx, x);
}

namespace {

PadicInt eval_poly(std::span<const std::int64_t> f, const PadicInt& x) {
    PadicInt acc(x.context(), 0);
    for (std::size_t i = f.size(); i-- > 0;)
        acc = acc * x + PadicInt::from_int(x.context(), f[i]);
    return acc;
}

PadicInt eval_poly_deriv(std::span<const std::int64_t> f, const PadicInt& x) {
    PadicInt acc(x.context(), 0);
    for (std::size_t i = f.size(); i-- > 1;) {
        acc = acc * x +
              PadicInt::from_int(x.context(), f[i]) * PadicInt::from_int(x.context(), static_cast<std::int64_t>(i));
    }
    return acc;
}

} // namespace

PadicInt hensel_lift(std::span<const std::int64_t> f, std::uint64_t a0,
                     const PadicContext& ctx) {
    PadicInt x(ctx, a0 % ctx.modulus());
    if (!eval_poly(f, x).val().infinite && eval_poly(f, x).val().num < 1)
        throw DomainError("a0 is not a root of f mod p");
    PadicInt d = eval_poly_deriv(f, x);
    if (!d.is_unit()) throw DomainError("non-simple root: f'(a0) is not a unit mod p");
    // Newton iteration doubles precision each step.
    for (unsigned i = 0; i <= ctx.precision(); ++i) {
        PadicInt fx = eval_poly(f, x);
        if (fx.is_zero()) break;
        x = x - fx * eval_poly_deriv(f, x).inv();
    }
    if (!eval_poly(f, x).is_zero())
        throw CheckError("hensel lift did not converge");
    if ((x - PadicInt(ctx, a0 % ctx.modulus())).is_unit())
        throw CheckError("hensel lift drifted from a0 mod p");
    return x;
}

} // namespace normbench
