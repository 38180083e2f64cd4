#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "normbench/errors.hpp"
#include "normbench/series.hpp"

namespace normbench {

// One-dimensional commutative formal group law axiom failure: which axiom
// broke and at which monomial.
class AxiomError : public DomainError {
public:
    AxiomError(std::string axiom, std::string detail)
        : DomainError("formal group axiom '" + axiom + "' fails at " + detail),
          axiom_(std::move(axiom)), detail_(std::move(detail)) {}
    const std::string& axiom() const { return axiom_; }
    const std::string& detail() const { return detail_; }

private:
    std::string axiom_, detail_;
};

namespace detail {

template <class R>
TruncSeries<R> reembed(const TruncSeries<R>& s, const std::vector<std::string>& vars) {
    TruncSeries<R> r(s.ring(), vars, s.bound());
    for (const auto& [m, c] : s.coeffs()) {
        typename TruncSeries<R>::Mono mm(vars.size(), 0);
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (m[i] == 0) continue;
            bool placed = false;
            for (std::size_t j = 0; j < vars.size(); ++j)
                if (vars[j] == s.vars()[i]) { mm[j] = m[i]; placed = true; break; }
            if (!placed) throw DomainError("reembed: variable " + s.vars()[i] + " missing");
        }
        r.set_coeff(mm, c);
    }
    return r;
}

template <class R>
std::string lowest_monomial_detail(const TruncSeries<R>& diff) {
    auto lowest = diff.coeffs().begin()->first;
    for (const auto& [m, c] : diff.coeffs())
        if (TruncSeries<R>::total_degree(m) < TruncSeries<R>::total_degree(lowest)) lowest = m;
    std::string s = "degree " + std::to_string(TruncSeries<R>::total_degree(lowest)) + ", monomial";
    for (std::size_t i = 0; i < lowest.size(); ++i)
        s += " " + diff.vars()[i] + "^" + std::to_string(lowest[i]);
    return s;
}

} // namespace detail

template <class R>
struct FormalGroupLaw {
    TruncSeries<R> F; // in T1, T2
    unsigned bound = 0;
    bool verified = false;

    // formal sum of two univariate series
    TruncSeries<R> plus(const TruncSeries<R>& x, const TruncSeries<R>& y) const {
        return F.subst({{"T1", x}, {"T2", y}});
    }
};

// Checks unit, commutativity and associativity axioms through the degree
// bound; throws AxiomError naming the first violated axiom.
template <class R>
FormalGroupLaw<R> fgl_verify(const TruncSeries<R>& F) {
    const R& ring = F.ring();
    if (F.vars() != std::vector<std::string>{"T1", "T2"})
        throw DomainError("fgl_verify expects variables T1, T2");
    if (!ring.is_zero(F.constant_term()))
        throw AxiomError("unit", "degree 0, nonzero constant term");
    const unsigned D = F.bound();

    TruncSeries<R> t1 = TruncSeries<R>::variable(ring, F.vars(), D, "T1");
    TruncSeries<R> t2 = TruncSeries<R>::variable(ring, F.vars(), D, "T2");
    TruncSeries<R> zero(ring, F.vars(), D);

    if (auto d = F.subst({{"T1", t1}, {"T2", zero}}) - t1; !d.is_zero())
        throw AxiomError("unit", detail::lowest_monomial_detail(d));
    if (auto d = F.subst({{"T1", zero}, {"T2", t2}}) - t2; !d.is_zero())
        throw AxiomError("unit", detail::lowest_monomial_detail(d));
    if (auto d = F.subst({{"T1", t2}, {"T2", t1}}) - F; !d.is_zero())
        throw AxiomError("commutativity", detail::lowest_monomial_detail(d));

    const std::vector<std::string> v3 = {"T1", "T2", "T3"};
    TruncSeries<R> a1 = TruncSeries<R>::variable(ring, v3, D, "T1");
    TruncSeries<R> a2 = TruncSeries<R>::variable(ring, v3, D, "T2");
    TruncSeries<R> a3 = TruncSeries<R>::variable(ring, v3, D, "T3");
    TruncSeries<R> inner12 = F.subst({{"T1", a1}, {"T2", a2}});
    TruncSeries<R> inner23 = F.subst({{"T1", a2}, {"T2", a3}});
    TruncSeries<R> lhs = F.subst({{"T1", a1}, {"T2", inner23}});
    TruncSeries<R> rhs = F.subst({{"T1", inner12}, {"T2", a3}});
    if (auto d = lhs - rhs; !d.is_zero())
        throw AxiomError("associativity", detail::lowest_monomial_detail(d));

    return FormalGroupLaw<R>{F, D, true};
}

// The series i(T) with F(T, i(T)) = 0 and i = -T + higher terms.
template <class R>
TruncSeries<R> neg_series(const FormalGroupLaw<R>& X) {
    const R& ring = X.F.ring();
    const unsigned D = X.bound;
    TruncSeries<R> t = TruncSeries<R>::variable(ring, {"T"}, D, "T");
    TruncSeries<R> io = -t;
    for (unsigned k = 0; k <= D + 1; ++k) {
        TruncSeries<R> err = X.plus(t, io);
        if (err.is_zero()) return io;
        io = io - err;
    }
    if (!X.plus(t, io).is_zero()) throw CheckError("neg_series failed to converge");
    return io;
}

// Multiplication-by-a series together with the p-adic approximation depth
// used (0 for plain integers).
template <class R>
struct BracketResult {
    TruncSeries<R> series;
    unsigned approx_digits = 0;
};

// Formal O-module over O = Z_p at desk scale: a verified formal group law
// plus the [a]-endomorphisms.  Integer brackets come from binary formal-sum
// chains; for p-adic multipliers an integer approximant is used once the
// module certifies that [p^k] vanishes at (precision, degree).
template <class R>
class FormalOModule {
public:
    FormalOModule(FormalGroupLaw<R> law, std::uint64_t q)
        : law_(std::move(law)), q_(q) {
        if (!law_.verified) throw DomainError("formal module needs a verified law");
    }

    const FormalGroupLaw<R>& law() const { return law_; }
    std::uint64_t q() const { return q_; }
    unsigned bound() const { return law_.bound; }

    TruncSeries<R> bracket(std::int64_t a) const {
        auto it = cache_.find(a);
        if (it != cache_.end()) return it->second;
        TruncSeries<R> r = compute_bracket(a);
        cache_.emplace(a, r);
        return r;
    }

    // [a] for a p-adic multiplier; records the digit depth k with
    // a' = a mod p^k.  DomainError if a carries too little precision for the
    // bracket to be determined at (precision, degree bound).
    BracketResult<R> bracket_padic(const PadicInt& a) const {
        unsigned k = vanishing_depth();
        if (a.context().precision() < k)
            throw DomainError("insufficient p-adic precision for [a]: need " +
                              std::to_string(k) + " digits");
        std::uint64_t pk = 1;
        for (unsigned i = 0; i < k; ++i) pk *= a.context().p();
        std::int64_t approx = static_cast<std::int64_t>(a.residue() % pk);
        return BracketResult<R>{bracket(approx), k};
    }

    // smallest k with [p^k] == 0 mod (precision, degree bound)
    unsigned vanishing_depth() const {
        if (vanishing_depth_) return *vanishing_depth_;
        const unsigned cap = 2 * bound() + 40; // generous; loop exits early
        TruncSeries<R> s = bracket(static_cast<std::int64_t>(q_));
        TruncSeries<R> pbr = s;
        unsigned k = 1;
        while (!s.is_zero() && k < cap) {
            s = s.subst({{"T", pbr}}); // [p^(k+1)] = [p^k] o [p]
            ++k;
        }
        if (!s.is_zero()) throw BudgetError("[p^k] does not vanish within depth cap");
        vanishing_depth_ = k;
        return k;
    }

    // stash for logarithm-derived brackets (cross-check material)
    void stash_log_bracket(std::int64_t a, TruncSeries<R> s) { log_brackets_.emplace(a, std::move(s)); }
    const std::map<std::int64_t, TruncSeries<R>>& log_brackets() const { return log_brackets_; }

    template <class R2, class Fn>
    FormalOModule<R2> map(R2 ring2, Fn&& fn) const {
        FormalGroupLaw<R2> law2{law_.F.map_coeffs(ring2, fn), law_.bound, false};
        law2 = fgl_verify(law2.F);
        FormalOModule<R2> m(std::move(law2), q_);
        for (const auto& [a, s] : log_brackets_) m.stash_log_bracket(a, s.map_coeffs(ring2, fn));
        return m;
    }

private:
    TruncSeries<R> compute_bracket(std::int64_t a) const {
        const R& ring = law_.F.ring();
        const unsigned D = law_.bound;
        TruncSeries<R> t = TruncSeries<R>::variable(ring, {"T"}, D, "T");
        if (a == 0) return TruncSeries<R>(ring, {"T"}, D);
        if (a < 0) {
            TruncSeries<R> pos = bracket(-a);
            TruncSeries<R> io = neg_series(law_);
            return io.subst({{"T", pos}});
        }
        if (a == 1) return t;
        TruncSeries<R> half = bracket(a / 2);
        TruncSeries<R> dbl = law_.plus(half, half);
        return (a % 2) ? law_.plus(dbl, t) : dbl;
    }

    FormalGroupLaw<R> law_;
    std::uint64_t q_;
    mutable std::map<std::int64_t, TruncSeries<R>> cache_;
    std::map<std::int64_t, TruncSeries<R>> log_brackets_;
    mutable std::optional<unsigned> vanishing_depth_;
};

// F = T1 + T2 + T1*T2 with [a](T) = (1+T)^a - 1.
inline FormalOModule<ZpRing> multiplicative_module(const PadicContext& ctx, unsigned D) {
    ZpRing ring(ctx);
    std::vector<std::string> v = {"T1", "T2"};
    TruncSeries<ZpRing> F(ring, v, D);
    F.set_coeff({1, 0}, ring.one());
    F.set_coeff({0, 1}, ring.one());
    F.set_coeff({1, 1}, ring.one());
    return FormalOModule<ZpRing>(fgl_verify(F), ctx.p());
}

// ---------------------------------------------------------------------------
// Functional-equation construction.  The logarithm
//     f(T) = T + sum_{i<h} s_i * f^(sigma^i)(T^{p^i}) + s_h * f^(sigma^h)(T^{p^h}),
// with s_i = u_i/p and s_h = 1/p, is solved degree by degree over the
// fraction-field coefficients, then F = f^{-1}(f(T1)+f(T2)) and [a] =
// f^{-1}(a f(T)) are read back; every exported coefficient must be integral.
// sigma is the coefficient Frobenius (identity on Z_p, u -> u^p on the
// parameter ring).
// ---------------------------------------------------------------------------

template <class R>
FormalOModule<R> functional_equation_module(const R& ring, std::vector<typename R::Elem> params,
                                            unsigned h, unsigned D) {
    if (h < 1) throw DomainError("functional_equation_module: h must be >= 1");
    if (params.size() != h - 1)
        throw DomainError("functional_equation_module: expected h-1 parameters");
    const std::uint64_t p = ring.char_p();

    // Mantissa headroom: denominators reach p^-(D-1)/(p-1) per composition
    // layer, two layers deep.  The mantissa runs that much above the target
    // precision so read-outs stay exact.
    const int budget = 2 * static_cast<int>((D + p - 3) / (p - 1)) + 4;
    R big = ring.boosted(static_cast<unsigned>(budget));
    using Q = ScaledRing<R>;
    Q q(big, -(budget + 4));

    // s_1..s_h
    std::vector<typename Q::Elem> s;
    for (unsigned i = 0; i + 1 < h; ++i)
        s.push_back(q.div_by_p(q.lift(ring.promote(big, params[i]))));
    s.push_back(q.div_by_p(q.one()));

    // logarithm coefficients c_1..c_D; c_m = sum over i with p^i | m of
    // s_i * sigma^i(c_{m/p^i})
    std::vector<typename Q::Elem> c(D + 1, q.zero());
    c[1] = q.one();
    std::vector<std::uint64_t> ppow(h + 1, 1);
    for (unsigned i = 1; i <= h; ++i) ppow[i] = ppow[i - 1] * p;
    for (unsigned m = 2; m <= D; ++m) {
        typename Q::Elem acc = q.zero();
        for (unsigned i = 1; i <= h; ++i) {
            if (ppow[i] > m || m % ppow[i] != 0) continue;
            typename Q::Elem prev = c[m / ppow[i]];
            for (unsigned t = 0; t < i; ++t) prev = q.frobenius(prev);
            acc = q.add(acc, q.mul(s[i - 1], prev));
        }
        c[m] = acc;
    }

    using QS = TruncSeries<Q>;
    QS f(q, {"T"}, D);
    for (unsigned m = 1; m <= D; ++m)
        f.set_coeff({static_cast<std::uint16_t>(m)}, c[m]);
    QS g = f.comp_inverse();

    auto to_plain = [&](const QS& series, const std::vector<std::string>& vars) {
        TruncSeries<R> out(ring, vars, D);
        for (const auto& [m, coeff] : series.coeffs())
            out.set_coeff(m, ring.demote(q.to_integral(coeff)));
        return out;
    };

    // F(T1,T2) = g(f(T1) + f(T2))
    const std::vector<std::string> v2 = {"T1", "T2"};
    QS f1(q, v2, D), f2(q, v2, D);
    for (unsigned m = 1; m <= D; ++m) {
        f1.set_coeff({static_cast<std::uint16_t>(m), 0}, c[m]);
        f2.set_coeff({0, static_cast<std::uint16_t>(m)}, c[m]);
    }
    QS Fq = g.subst({{"T", f1 + f2}});
    FormalGroupLaw<R> law = fgl_verify(to_plain(Fq, v2));

    FormalOModule<R> mod(law, p);

    // logarithm-route brackets for a few multipliers, for cross-checking
    for (std::int64_t a : {static_cast<std::int64_t>(p), std::int64_t{2}, std::int64_t{-1}}) {
        QS af = f.scale(q.from_int(a));
        mod.stash_log_bracket(a, to_plain(g.subst({{"T", af}}), {"T"}));
    }

    // [p] = pT + ... must hold to first order
    TruncSeries<R> pbr = mod.bracket(static_cast<std::int64_t>(p));
    if (!ring.eq(pbr.coeff({1}), ring.from_int(static_cast<std::int64_t>(p))))
        throw CheckError("functional-equation module: [p] is not pT to first order");
    return mod;
}

// ---------------------------------------------------------------------------
// Height of a formal module over a characteristic-p coefficient ring: the
// largest power q^h dividing every exponent of [p] with unit coefficient at
// T^(q^h).  When [p] vanishes through the degree bound only a lower bound is
// visible.
// ---------------------------------------------------------------------------

template <class R>
struct HeightReport {
    bool is_lower_bound = false;
    unsigned h = 0;             // exact height, or the bound when is_lower_bound
    std::optional<TruncSeries<R>> witness; // g with [p](T) = g(T^(q^h)), g'(0) != 0
};

template <class R>
HeightReport<R> height(const FormalOModule<R>& mod) {
    const R& ring = mod.law().F.ring();
    const std::uint64_t qq = mod.q();
    const unsigned D = mod.bound();
    TruncSeries<R> pbr = mod.bracket(static_cast<std::int64_t>(qq));
    unsigned max_h = 0;
    {
        std::uint64_t qe = qq;
        while (qe <= D) { ++max_h; qe *= qq; }
    }
    if (pbr.is_zero()) return HeightReport<R>{true, max_h, std::nullopt};
    for (int hh = static_cast<int>(max_h); hh >= 0; --hh) {
        std::uint64_t qe = 1;
        for (int i = 0; i < hh; ++i) qe *= qq;
        bool all_divisible = true;
        for (const auto& [m, c] : pbr.coeffs())
            if (m[0] % qe != 0) { all_divisible = false; break; }
        if (!all_divisible) continue;
        if (qe <= D && ring.is_unit(pbr.coeff({static_cast<std::uint16_t>(qe)}))) {
            TruncSeries<R> witness(ring, {"T"}, D);
            for (const auto& [m, c] : pbr.coeffs())
                witness.set_coeff({static_cast<std::uint16_t>(m[0] / qe)}, c);
            return HeightReport<R>{false, static_cast<unsigned>(hh), witness};
        }
    }
    throw CheckError("height: [p] has no q-power witness; not a formal module in char p");
}

// f : X -> Y is a homomorphism of formal modules: f(X(T1,T2)) = Y(f(T1),f(T2))
// and f([a]_X) = [a]_Y(f) for the sampled multipliers.
template <class R>
bool hom_verify(const TruncSeries<R>& f, const FormalOModule<R>& X, const FormalOModule<R>& Y,
                const std::vector<std::int64_t>& multipliers = {}) {
    const R& ring = f.ring();
    if (!ring.is_zero(f.constant_term())) throw DomainError("hom_verify: f(0) != 0");
    const unsigned D = X.bound();
    const std::vector<std::string> v2 = {"T1", "T2"};
    TruncSeries<R> f_at_1 = f.subst({{"T", TruncSeries<R>::variable(ring, v2, D, "T1")}});
    TruncSeries<R> f_at_2 = f.subst({{"T", TruncSeries<R>::variable(ring, v2, D, "T2")}});
    TruncSeries<R> lhs = f.subst({{"T", X.law().F}});
    TruncSeries<R> rhs = Y.law().F.subst({{"T1", f_at_1}, {"T2", f_at_2}});
    if (lhs != rhs) return false;
    std::vector<std::int64_t> as = multipliers;
    if (as.empty()) as = {2, 3, static_cast<std::int64_t>(X.q())};
    for (std::int64_t a : as) {
        TruncSeries<R> l = f.subst({{"T", X.bracket(a)}});
        TruncSeries<R> r = Y.bracket(a).subst({{"T", f}});
        if (l != r) return false;
    }
    return true;
}

} // namespace normbench
