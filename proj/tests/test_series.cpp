#include "doctest.h"

#include "normbench/rng.hpp"
#include "normbench/series.hpp"

using namespace normbench;

namespace {

using S = TruncSeries<ZpRing>;

S make_random(const ZpRing& R, const std::vector<std::string>& vars, unsigned bound,
              Rng& rng, bool zero_const = true) {
    S s(R, vars, bound);
    std::vector<std::uint16_t> m(vars.size(), 0);
    for (;;) {
        if (S::total_degree(m) <= bound && !(zero_const && S::total_degree(m) == 0))
            if (rng.below(3) != 0) s.set_coeff(m, PadicInt(R.ctx, rng.below(R.ctx.modulus())));
        std::size_t d = 0;
        while (d < m.size() && ++m[d] > bound) m[d++] = 0;
        if (d == m.size()) break;
    }
    return s;
}

} // namespace

TEST_CASE("series arithmetic basics") {
    ZpRing R{PadicContext(3, 4)};
    std::vector<std::string> v = {"T"};
    S one = S::constant(R, v, 3, R.one());
    S t = S::variable(R, v, 3, "T");

    // (1+T)(1-T) = 1 - T^2
    S prod = (one + t) * (one - t);
    S expect = one - t * t;
    CHECK(prod == expect);

    // a * 0 = 0
    CHECK((prod * S(R, v, 3)).is_zero());

    // (T1+T2)^2 = T1^2 + 2 T1 T2 + T2^2 at bound 2
    std::vector<std::string> v2 = {"T1", "T2"};
    S t1 = S::variable(R, v2, 2, "T1"), t2 = S::variable(R, v2, 2, "T2");
    S sq = (t1 + t2) * (t1 + t2);
    CHECK(sq.coeff({2, 0}).residue() == 1);
    CHECK(sq.coeff({1, 1}).residue() == 2);
    CHECK(sq.coeff({0, 2}).residue() == 1);
}

TEST_CASE("substitution") {
    ZpRing R{PadicContext(3, 4)};
    std::vector<std::string> v = {"T"};
    S t = S::variable(R, v, 4, "T");

    // identity substitution
    Rng rng(31);
    S g = make_random(R, v, 4, rng);
    CHECK(t.subst({{"T", g}}) == g);

    // f(T) = T^2 into g = T + T^2 at bound 4: T^2 + 2T^3 + T^4
    S f = t * t;
    S r = f.subst({{"T", t + t * t}});
    CHECK(r.coeff({2}).residue() == 1);
    CHECK(r.coeff({3}).residue() == 2);
    CHECK(r.coeff({4}).residue() == 1);

    // nonzero constant term rejected
    S bad = t + S::constant(R, v, 4, R.one());
    CHECK_THROWS_AS(t.subst({{"T", bad}}), DomainError);
}

TEST_CASE("substitution is associative on random instances") {
    ZpRing R{PadicContext(3, 3)};
    std::vector<std::string> v = {"T"};
    Rng rng(33);
    for (int rep = 0; rep < 15; ++rep) {
        S f = make_random(R, v, 5, rng);
        S g = make_random(R, v, 5, rng);
        S h = make_random(R, v, 5, rng);
        S lhs = f.subst({{"T", g}}).subst({{"T", h}});
        S rhs = f.subst({{"T", g.subst({{"T", h}})}});
        CHECK(lhs == rhs);
    }
}

TEST_CASE("compositional inverse") {
    ZpRing R{PadicContext(3, 4)};
    std::vector<std::string> v = {"T"};
    S t = S::variable(R, v, 3, "T");

    // f = T + T^2 has inverse T - T^2 + 2T^3 at bound 3
    S f = t + t * t;
    S g = f.comp_inverse();
    CHECK(g.coeff({1}).residue() == 1);
    CHECK(g.coeff({2}) == -R.one());
    CHECK(g.coeff({3}).residue() == 2);

    // two-sided through the bound
    CHECK(f.subst({{"T", g}}) == t);
    CHECK(g.subst({{"T", f}}) == t);

    // f = cT for a unit c
    S ct = t.scale(R.from_int(2));
    CHECK(ct.comp_inverse() == t.scale(R.from_int(2).inv()));

    // f = T^2 rejected
    CHECK_THROWS_AS((t * t).comp_inverse(), DomainError);

    Rng rng(34);
    for (int rep = 0; rep < 10; ++rep) {
        S h = make_random(R, v, 6, rng);
        h.set_coeff({1}, R.one()); // force unit linear term
        S hi = h.comp_inverse();
        S tt = S::variable(R, v, 6, "T");
        CHECK(h.subst({{"T", hi}}) == tt);
        CHECK(hi.subst({{"T", h}}) == tt);
    }
}

TEST_CASE("derivative") {
    ZpRing R{PadicContext(5, 3)};
    std::vector<std::string> v = {"T"};
    S t = S::variable(R, v, 4, "T");
    S d = (t * t * t).derivative("T");
    CHECK(d.coeff({2}).residue() == 3);
    CHECK(S::constant(R, v, 4, R.from_int(7)).derivative("T").is_zero());

    std::vector<std::string> v2 = {"T1", "T2"};
    S t1 = S::variable(R, v2, 4, "T1"), t2 = S::variable(R, v2, 4, "T2");
    CHECK((t1 * t2).derivative("T1") == t2);
}

TEST_CASE("series multiplicative inverse") {
    ZpRing R{PadicContext(3, 4)};
    std::vector<std::string> v = {"T"};
    S one = S::constant(R, v, 4, R.one());
    S t = S::variable(R, v, 4, "T");
    S inv = (one + t).inverse();
    // geometric series 1 - T + T^2 - T^3 + T^4
    for (unsigned k = 0; k <= 4; ++k)
        CHECK(inv.coeff({static_cast<std::uint16_t>(k)}) ==
              (k % 2 ? -R.one() : R.one()));
    CHECK((one + t) * inv == one);
    CHECK_THROWS_AS(t.inverse(), DomainError);
}

TEST_CASE("reduction mod p commutes with arithmetic") {
    ZpRing R{PadicContext(3, 4)};
    ZpRing Rp{PadicContext(3, 1)};
    std::vector<std::string> v = {"T1", "T2"};
    Rng rng(35);
    auto red = [&](const S& s) {
        return s.map_coeffs(Rp, [&](const PadicInt& c) {
            return PadicInt(Rp.ctx, c.residue() % 3);
        });
    };
    for (int rep = 0; rep < 10; ++rep) {
        S a = make_random(R, v, 4, rng, false);
        S b = make_random(R, v, 4, rng, false);
        CHECK(red(a * b) == red(a) * red(b));
        CHECK(red(a + b) == red(a) + red(b));
    }
}

TEST_CASE("scaled ring bookkeeping") {
    ZpRing base{PadicContext(3, 8)};
    ScaledRing<ZpRing> Q(base, -6);
    auto third = Q.div_by_p(Q.one());
    auto back = Q.mul(third, Q.from_int(3));
    CHECK(Q.eq(back, Q.one()));
    CHECK_THROWS_AS(Q.to_integral(third), CheckError);
    CHECK(Q.to_integral(Q.mul(third, Q.from_int(6))).residue() == 2);

    // inverse of p^2 * unit
    auto x = Q.mul(Q.from_int(9), Q.from_int(2));
    auto xi = Q.inv(x);
    CHECK(Q.eq(Q.mul(x, xi), Q.one()));

    // floor triggers
    ScaledRing<ZpRing> tight(base, -1);
    auto y = tight.div_by_p(tight.one());
    CHECK_THROWS_AS(tight.div_by_p(y), BudgetError);
}

TEST_CASE("series over the u-polynomial coefficient ring") {
    ZpRing zp{PadicContext(3, 4)};
    SeriesRing<ZpRing> U(zp, {"u"}, 6);
    auto u = U.var("u");
    CHECK(U.is_unit(U.add(U.one(), u)));
    CHECK(!U.is_unit(u));
    auto inv = U.inv(U.add(U.one(), u));
    CHECK(U.eq(U.mul(inv, U.add(U.one(), u)), U.one()));

    // coefficient Frobenius sends u to u^3 and truncates
    auto fr = U.frobenius(u);
    CHECK(fr == U.var("u").pow(3));
    CHECK(U.is_zero(U.frobenius(u.pow(3)))); // u^9 beyond bound 6
}
