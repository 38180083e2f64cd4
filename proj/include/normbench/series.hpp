#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "normbench/errors.hpp"
#include "normbench/padic.hpp"

namespace normbench {

// ---------------------------------------------------------------------------
// Coefficient rings.  A ring object provides element construction and the
// ring operations; elements are value types.  The p-divisibility hooks
// (times_p / divisible_p / div_p) are what ScaledRing needs to bookkeep
// explicit powers of p for fraction-field intermediates.
// ---------------------------------------------------------------------------

struct ZpRing {
    using Elem = PadicInt;
    PadicContext ctx;

    explicit ZpRing(PadicContext c) : ctx(c) {}

    std::uint64_t char_p() const { return ctx.p(); }
    Elem zero() const { return PadicInt(ctx, 0); }
    Elem one() const { return PadicInt(ctx, 1); }
    Elem from_int(std::int64_t v) const { return PadicInt::from_int(ctx, v); }
    Elem add(const Elem& a, const Elem& b) const { return a + b; }
    Elem sub(const Elem& a, const Elem& b) const { return a - b; }
    Elem mul(const Elem& a, const Elem& b) const { return a * b; }
    Elem neg(const Elem& a) const { return -a; }
    bool is_zero(const Elem& a) const { return a.is_zero(); }
    bool eq(const Elem& a, const Elem& b) const { return a == b; }
    bool is_unit(const Elem& a) const { return a.is_unit(); }
    Elem inv(const Elem& a) const { return a.inv(); }
    Elem frobenius(const Elem& a) const { return a; } // W(F_p): trivial lift
    Elem times_p(const Elem& a) const { return a * from_int(static_cast<std::int64_t>(ctx.p())); }
    bool divisible_p(const Elem& a) const { return a.residue() % ctx.p() == 0; }
    Elem div_p(const Elem& a) const { return a.div_exact_pk(1); }
    std::string str(const Elem& a) const { return std::to_string(a.residue()); }

    // precision headroom for fraction-field intermediates
    unsigned precision() const { return ctx.precision(); }
    bool zero_mod_pk(const Elem& a, unsigned k) const {
        if (k >= ctx.precision()) return a.residue() == 0;
        return a.residue() % ctx.pow_p(k) == 0;
    }
    ZpRing boosted(unsigned extra) const { return ZpRing(PadicContext(ctx.p(), ctx.precision() + extra)); }
    Elem promote(const ZpRing& big, const Elem& a) const { return PadicInt(big.ctx, a.residue()); }
    Elem demote(const Elem& a) const { return PadicInt(ctx, a.residue() % ctx.modulus()); }
};

// ---------------------------------------------------------------------------
// Truncated multivariate power series over a coefficient ring.  Total-degree
// truncation at `bound`; sparse storage keyed by exponent vector; absent key
// means zero.
// ---------------------------------------------------------------------------

template <class R>
class TruncSeries {
public:
    using Ring = R;
    using Coeff = typename R::Elem;
    using Mono = std::vector<std::uint16_t>;

    TruncSeries(R ring, std::vector<std::string> vars, unsigned bound)
        : ring_(std::move(ring)), vars_(std::move(vars)), bound_(bound) {}

    static TruncSeries constant(R ring, std::vector<std::string> vars, unsigned bound,
                                Coeff c) {
        TruncSeries s(std::move(ring), std::move(vars), bound);
        s.set_coeff(Mono(s.vars_.size(), 0), std::move(c));
        return s;
    }

    static TruncSeries variable(R ring, std::vector<std::string> vars, unsigned bound,
                                const std::string& name) {
        TruncSeries s(ring, std::move(vars), bound);
        Mono m(s.vars_.size(), 0);
        m[s.var_index(name)] = 1;
        s.set_coeff(m, ring.one());
        return s;
    }

    const R& ring() const { return ring_; }
    const std::vector<std::string>& vars() const { return vars_; }
    unsigned bound() const { return bound_; }
    const std::map<Mono, Coeff>& coeffs() const { return coeffs_; }

    std::size_t var_index(const std::string& name) const {
        for (std::size_t i = 0; i < vars_.size(); ++i)
            if (vars_[i] == name) return i;
        throw DomainError("unknown series variable " + name);
    }

    static unsigned total_degree(const Mono& m) {
        unsigned d = 0;
        for (auto e : m) d += e;
        return d;
    }

    Coeff coeff(const Mono& m) const {
        auto it = coeffs_.find(m);
        return it == coeffs_.end() ? ring_.zero() : it->second;
    }

    Coeff coeff_of_power(const std::string& name, unsigned e) const {
        Mono m(vars_.size(), 0);
        m[var_index(name)] = static_cast<std::uint16_t>(e);
        return coeff(m);
    }

    void set_coeff(Mono m, Coeff c) {
        if (m.size() != vars_.size()) throw DomainError("monomial arity mismatch");
        if (total_degree(m) > bound_) return;
        if (ring_.is_zero(c))
            coeffs_.erase(m);
        else
            coeffs_.insert_or_assign(std::move(m), std::move(c));
    }

    bool is_zero() const { return coeffs_.empty(); }

    Coeff constant_term() const { return coeff(Mono(vars_.size(), 0)); }

    bool operator==(const TruncSeries& o) const {
        require_compatible(o);
        if (coeffs_.size() != o.coeffs_.size()) return false;
        auto it = coeffs_.begin();
        auto jt = o.coeffs_.begin();
        for (; it != coeffs_.end(); ++it, ++jt) {
            if (it->first != jt->first) return false;
            if (!ring_.eq(it->second, jt->second)) return false;
        }
        return true;
    }
    bool operator!=(const TruncSeries& o) const { return !(*this == o); }

    TruncSeries operator+(const TruncSeries& o) const {
        require_compatible(o);
        TruncSeries r = *this;
        for (const auto& [m, c] : o.coeffs_) r.accumulate(m, c);
        return r;
    }

    TruncSeries operator-(const TruncSeries& o) const {
        require_compatible(o);
        TruncSeries r = *this;
        for (const auto& [m, c] : o.coeffs_) r.accumulate(m, ring_.neg(c));
        return r;
    }

    TruncSeries operator-() const {
        TruncSeries r(ring_, vars_, bound_);
        for (const auto& [m, c] : coeffs_) r.coeffs_.emplace(m, ring_.neg(c));
        return r;
    }

    TruncSeries operator*(const TruncSeries& o) const {
        require_compatible(o);
        TruncSeries r(ring_, vars_, bound_);
        for (const auto& [ma, ca] : coeffs_) {
            unsigned da = total_degree(ma);
            for (const auto& [mb, cb] : o.coeffs_) {
                if (da + total_degree(mb) > bound_) continue;
                Mono m(ma.size());
                for (std::size_t k = 0; k < m.size(); ++k)
                    m[k] = static_cast<std::uint16_t>(ma[k] + mb[k]);
                r.accumulate(m, ring_.mul(ca, cb));
            }
        }
        return r;
    }

    TruncSeries scale(const Coeff& c) const {
        TruncSeries r(ring_, vars_, bound_);
        for (const auto& [m, cc] : coeffs_) r.accumulate(m, ring_.mul(cc, c));
        return r;
    }

    TruncSeries pow(unsigned e) const {
        TruncSeries r = constant(ring_, vars_, bound_, ring_.one());
        TruncSeries b = *this;
        while (e) {
            if (e & 1) r = r * b;
            b = b * b;
            e >>= 1;
        }
        return r;
    }

    // simultaneous substitution; every variable must be assigned a series
    // with zero constant term, all assignments sharing variables and bound
    TruncSeries<R> subst(const std::map<std::string, TruncSeries<R>>& assign) const {
        if (assign.empty()) throw DomainError("empty substitution");
        const TruncSeries<R>& proto = assign.begin()->second;
        for (const auto& v : vars_) {
            auto it = assign.find(v);
            if (it == assign.end()) throw DomainError("substitution misses variable " + v);
            if (!ring_.is_zero(it->second.constant_term()))
                throw DomainError("substituted series for " + v + " has nonzero constant term");
            it->second.require_compatible(proto);
        }
        // cache powers of each assigned series
        std::vector<std::vector<TruncSeries<R>>> powers;
        std::vector<const TruncSeries<R>*> per_var;
        for (const auto& v : vars_) per_var.push_back(&assign.at(v));
        powers.resize(vars_.size());
        TruncSeries<R> result(proto.ring_, proto.vars_, proto.bound_);
        TruncSeries<R> one_s = constant(proto.ring_, proto.vars_, proto.bound_, ring_.one());
        for (std::size_t i = 0; i < vars_.size(); ++i) powers[i].push_back(one_s);
        for (const auto& [m, c] : coeffs_) {
            TruncSeries<R> term = one_s.scale(c);
            for (std::size_t i = 0; i < vars_.size(); ++i) {
                while (powers[i].size() <= m[i])
                    powers[i].push_back(powers[i].back() * (*per_var[i]));
                if (m[i] > 0) term = term * powers[i][m[i]];
            }
            result = result + term;
        }
        return result;
    }

    TruncSeries derivative(const std::string& name) const {
        std::size_t vi = var_index(name);
        TruncSeries r(ring_, vars_, bound_);
        for (const auto& [m, c] : coeffs_) {
            if (m[vi] == 0) continue;
            Mono d = m;
            d[vi] -= 1;
            r.accumulate(d, ring_.mul(c, ring_.from_int(m[vi])));
        }
        return r;
    }

    // multiplicative inverse; constant term must be a unit
    TruncSeries inverse() const {
        Coeff c0 = constant_term();
        if (!ring_.is_unit(c0)) throw DomainError("series inverse: constant term not a unit");
        Coeff c0inv = ring_.inv(c0);
        TruncSeries one_s = constant(ring_, vars_, bound_, ring_.one());
        TruncSeries g = one_s.scale(c0inv);
        for (unsigned it = 0; it <= bound_; ++it) {
            TruncSeries e = one_s - (*this) * g;
            if (e.is_zero()) return g;
            g = g + g * e;
        }
        TruncSeries e = one_s - (*this) * g;
        if (!e.is_zero()) throw CheckError("series inverse failed to converge");
        return g;
    }

    // compositional inverse of a single-variable series with unit linear term
    TruncSeries comp_inverse() const {
        if (vars_.size() != 1) throw DomainError("comp_inverse needs a univariate series");
        if (!ring_.is_zero(constant_term()))
            throw DomainError("comp_inverse: nonzero constant term");
        Coeff c1 = coeff(Mono{1});
        if (!ring_.is_unit(c1)) throw DomainError("comp_inverse: linear coefficient not a unit");
        Coeff c1inv = ring_.inv(c1);
        TruncSeries g = variable(ring_, vars_, bound_, vars_[0]).scale(c1inv);
        TruncSeries t = variable(ring_, vars_, bound_, vars_[0]);
        for (unsigned k = 2; k <= bound_ + 1; ++k) {
            TruncSeries e = subst({{vars_[0], g}}) - t;
            if (e.is_zero()) break;
            Mono lowest = e.coeffs_.begin()->first;
            for (const auto& [m, c] : e.coeffs_)
                if (total_degree(m) < total_degree(lowest)) lowest = m;
            Coeff corr = ring_.neg(ring_.mul(e.coeff(lowest), c1inv));
            TruncSeries delta(ring_, vars_, bound_);
            delta.set_coeff(lowest, corr);
            g = g + delta;
        }
        if (subst({{vars_[0], g}}) != t)
            throw CheckError("comp_inverse failed to converge");
        return g;
    }

    template <class R2, class Fn>
    TruncSeries<R2> map_coeffs(R2 ring2, Fn&& fn) const {
        TruncSeries<R2> r(std::move(ring2), vars_, bound_);
        for (const auto& [m, c] : coeffs_) r.set_coeff(m, fn(c));
        return r;
    }

    std::string str() const {
        if (coeffs_.empty()) return "0";
        std::string s;
        for (const auto& [m, c] : coeffs_) {
            if (!s.empty()) s += " + ";
            s += "(" + ring_.str(c) + ")";
            for (std::size_t i = 0; i < m.size(); ++i) {
                if (m[i] == 0) continue;
                s += "*" + vars_[i];
                if (m[i] > 1) s += "^" + std::to_string(m[i]);
            }
        }
        return s;
    }

    void require_compatible(const TruncSeries& o) const {
        if (vars_ != o.vars_) throw DomainError("series variable mismatch");
        if (bound_ != o.bound_) throw DomainError("series degree-bound mismatch");
    }

private:
    void accumulate(const Mono& m, Coeff c) {
        if (total_degree(m) > bound_) return;
        auto it = coeffs_.find(m);
        if (it == coeffs_.end()) {
            if (!ring_.is_zero(c)) coeffs_.emplace(m, std::move(c));
            return;
        }
        it->second = ring_.add(it->second, c);
        if (ring_.is_zero(it->second)) coeffs_.erase(it);
    }

    R ring_;
    std::vector<std::string> vars_;
    unsigned bound_;
    std::map<Mono, Coeff> coeffs_;
};

// ---------------------------------------------------------------------------
// Truncated polynomial ring used as a coefficient ring (deformation
// parameters u_i live here, with their own total-degree bound).
// ---------------------------------------------------------------------------

template <class R>
struct SeriesRing {
    using Elem = TruncSeries<R>;
    R base;
    std::vector<std::string> vars;
    unsigned bound;

    SeriesRing(R b, std::vector<std::string> v, unsigned d)
        : base(std::move(b)), vars(std::move(v)), bound(d) {}

    std::uint64_t char_p() const { return base.char_p(); }
    Elem zero() const { return Elem(base, vars, bound); }
    Elem one() const { return Elem::constant(base, vars, bound, base.one()); }
    Elem from_int(std::int64_t v) const { return Elem::constant(base, vars, bound, base.from_int(v)); }
    Elem var(const std::string& name) const { return Elem::variable(base, vars, bound, name); }
    Elem add(const Elem& a, const Elem& b) const { return a + b; }
    Elem sub(const Elem& a, const Elem& b) const { return a - b; }
    Elem mul(const Elem& a, const Elem& b) const { return a * b; }
    Elem neg(const Elem& a) const { return -a; }
    bool is_zero(const Elem& a) const { return a.is_zero(); }
    bool eq(const Elem& a, const Elem& b) const { return a == b; }
    bool is_unit(const Elem& a) const { return base.is_unit(a.constant_term()); }
    Elem inv(const Elem& a) const { return a.inverse(); }
    // coefficient Frobenius: u_i -> u_i^p on top of the base ring lift
    Elem frobenius(const Elem& a) const {
        unsigned p = static_cast<unsigned>(char_p());
        Elem r(base, vars, bound);
        for (const auto& [m, c] : a.coeffs()) {
            typename Elem::Mono mp(m.size());
            unsigned total = 0;
            for (std::size_t k = 0; k < m.size(); ++k) {
                total += m[k] * p;
                mp[k] = static_cast<std::uint16_t>(m[k] * p);
            }
            if (total > bound) continue; // truncated ring: u^(bound+1) == 0
            r.set_coeff(mp, base.frobenius(c));
        }
        return r;
    }
    Elem times_p(const Elem& a) const { return a.scale(base.from_int(static_cast<std::int64_t>(char_p()))); }
    bool divisible_p(const Elem& a) const {
        for (const auto& [m, c] : a.coeffs())
            if (!base.divisible_p(c)) return false;
        return true;
    }
    Elem div_p(const Elem& a) const {
        Elem r(base, vars, bound);
        for (const auto& [m, c] : a.coeffs()) r.set_coeff(m, base.div_p(c));
        return r;
    }
    std::string str(const Elem& a) const { return a.str(); }

    unsigned precision() const { return base.precision(); }
    bool zero_mod_pk(const Elem& a, unsigned k) const {
        for (const auto& [m, c] : a.coeffs())
            if (!base.zero_mod_pk(c, k)) return false;
        return true;
    }
    SeriesRing boosted(unsigned extra) const { return SeriesRing(base.boosted(extra), vars, bound); }
    Elem promote(const SeriesRing& big, const Elem& a) const {
        return a.map_coeffs(big.base, [&](const typename R::Elem& c) { return base.promote(big.base, c); });
    }
    Elem demote(const Elem& a) const {
        return a.map_coeffs(base, [&](const typename R::Elem& c) { return base.demote(c); });
    }
};

// ---------------------------------------------------------------------------
// Fraction-field bookkeeping: value = mant * p^expo.  Only the formal-group
// logarithm pipeline uses this; all final/exported coefficients must come
// back integral via to_integral().
// ---------------------------------------------------------------------------

template <class R>
struct Scaled {
    typename R::Elem mant;
    int expo = 0;
};

template <class R>
struct ScaledRing {
    using Elem = Scaled<R>;
    R base;
    int min_expo; // precision-budget floor; going below means the mantissa
                  // padding was chosen too small for the requested degree

    ScaledRing(R b, int floor_expo) : base(std::move(b)), min_expo(floor_expo) {}

    std::uint64_t char_p() const { return base.char_p(); }
    Elem zero() const { return {base.zero(), 0}; }
    Elem one() const { return {base.one(), 0}; }
    Elem from_int(std::int64_t v) const { return {base.from_int(v), 0}; }
    Elem lift(typename R::Elem e) const { return {std::move(e), 0}; }

    Elem normalized(Elem a) const {
        if (base.is_zero(a.mant)) return {base.zero(), 0};
        while (a.expo < 0 && base.divisible_p(a.mant)) {
            a.mant = base.div_p(a.mant);
            ++a.expo;
        }
        return a;
    }

    void check_floor(const Elem& a) const {
        if (a.expo < min_expo)
            throw BudgetError("scaled-ring exponent below precision floor");
    }

    Elem add(const Elem& a, const Elem& b) const {
        if (base.is_zero(a.mant)) return b;
        if (base.is_zero(b.mant)) return a;
        int e = std::min(a.expo, b.expo);
        typename R::Elem ma = a.mant, mb = b.mant;
        for (int k = a.expo; k > e; --k) ma = base.times_p(ma);
        for (int k = b.expo; k > e; --k) mb = base.times_p(mb);
        Elem r{base.add(ma, mb), e};
        r = normalized(r);
        check_floor(r);
        return r;
    }
    Elem sub(const Elem& a, const Elem& b) const { return add(a, neg(b)); }
    Elem neg(const Elem& a) const { return {base.neg(a.mant), a.expo}; }
    Elem mul(const Elem& a, const Elem& b) const {
        Elem r{base.mul(a.mant, b.mant), a.expo + b.expo};
        r = normalized(r);
        check_floor(r);
        return r;
    }
    bool is_zero(const Elem& a) const { return base.is_zero(a.mant); }
    bool eq(const Elem& a, const Elem& b) const { return is_zero(sub(a, b)); }
    bool is_unit(const Elem& a) const { return !is_zero(a); } // fraction field
    Elem inv(Elem a) const {
        a = normalized(a);
        // strip remaining p-powers into the exponent so the mantissa is a unit
        while (!base.is_zero(a.mant) && base.divisible_p(a.mant)) {
            a.mant = base.div_p(a.mant);
            ++a.expo;
        }
        if (base.is_zero(a.mant)) throw DomainError("scaled inverse of zero");
        Elem r{base.inv(a.mant), -a.expo};
        check_floor(r);
        return r;
    }
    Elem frobenius(const Elem& a) const { return {base.frobenius(a.mant), a.expo}; }
    Elem div_by_p(const Elem& a) const {
        Elem r{a.mant, a.expo - 1};
        r = normalized(r);
        check_floor(r);
        return r;
    }
    // integral read-out; CheckError reports a genuine denominator
    typename R::Elem to_integral(Elem a) const {
        a = normalized(a);
        if (base.is_zero(a.mant)) return base.zero();
        if (a.expo < 0) throw CheckError("integrality violation: coefficient has p in denominator");
        typename R::Elem m = a.mant;
        for (int k = 0; k < a.expo; ++k) m = base.times_p(m);
        return m;
    }
    std::string str(const Elem& a) const {
        return base.str(a.mant) + "*p^" + std::to_string(a.expo);
    }
};

} // namespace normbench
