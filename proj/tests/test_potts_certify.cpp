#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "survey/potts_certify.hpp"

using namespace survey;

namespace {

Rational R(long n, long d = 1) {
    Rational r(n, d);
    r.canonicalize();
    return r;
}

Rational RS(const char* text) {
    Rational r(text);
    r.canonicalize();
    return r;
}

ContractionProblem problem(std::size_t q, Rational lambda, std::vector<std::pair<unsigned, Rational>> atoms,
                           Rational x_hat) {
    return ContractionProblem{q, std::move(lambda), DegreeDistribution{std::move(atoms), false}, std::move(x_hat)};
}

const Rational kXhat = R(1, 100);

}  // namespace

TEST_CASE("specialized coloring polynomial values") {
    // shape 4: coefficients 3/4, 63/32, -351/256 in x, x^2, x^3
    Rational x = R(1, 10);
    CHECK(corollary_bound(4, x) ==
          R(3, 4) * x + R(63, 32) * x * x - R(351, 256) * x * x * x);
    CHECK(corollary_bound(2, R(0), R(1, 2)) == 0);
    CHECK(corollary_bound(4, R(0)) == 0);
}

TEST_CASE("general and specialized routes agree for d=2 ferromagnets") {
    std::mt19937 rng(404);
    std::uniform_int_distribution<long> num(1, 19);
    for (int trial = 0; trial < 8; ++trial) {
        Rational lambda = R(num(rng), 20);
        Rational x = R(num(rng), 40);
        ContractionProblem p = problem(3, lambda, {{2, R(1)}}, R(1, 2));
        StepPolynomial thm = theorem_polynomial(p);
        CHECK(thm.evaluate(x) == corollary_bound(1, x, lambda));
    }
}

TEST_CASE("route selection") {
    CHECK(step_polynomial(problem(3, R(1, 2), {{2, R(1)}}, kXhat)).route == "corollary");
    CHECK(step_polynomial(problem(3, R(1, 2), {{3, R(1)}}, kXhat)).route == "corollary");
    CHECK(step_polynomial(problem(3, R(1, 2), {{2, R(1, 2)}, {3, R(1, 2)}}, kXhat)).route == "corollary");
    CHECK(step_polynomial(problem(3, R(-1, 2), {{3, R(1)}}, kXhat)).route == "corollary");
    // anything else falls back to the general construction
    CHECK(step_polynomial(problem(3, R(1, 3), {{4, R(1)}}, kXhat)).route == "theorem");
    CHECK(step_polynomial(problem(2, R(1, 2), {{2, R(1)}}, kXhat)).route == "theorem");
}

TEST_CASE("linear coefficient is dbar lambda^2") {
    ContractionProblem p = problem(3, R(7, 10), {{2, R(1, 3)}, {5, R(2, 3)}}, kXhat);
    StepPolynomial s = theorem_polynomial(p);
    CHECK(s.coefficients.at(1) == R(4) * R(49, 100));  // dbar = 4
}

TEST_CASE("xn_step_bound dominates the polynomial route on its domain") {
    ContractionProblem p = problem(3, R(1, 2), {{3, R(1)}}, R(1, 5));
    for (long n = 1; n <= 10; ++n) {
        Rational x = R(n, 50);
        CHECK(xn_step_bound(p, x) >= 0);
        CHECK(xn_step_bound(p, x) == theorem_polynomial(p).evaluate(x));
    }
}

TEST_CASE("frozen certificates for the published q=3 regimes") {
    // d=2, lambda=0.69
    Certificate d2 = certify_contraction(problem(3, R(69, 100), {{2, R(1)}}, R(2939, 100000)), 16);
    CHECK(d2.certified());
    CHECK(d2.contraction == RS("99928807353996777/100000000000000000"));
    CHECK(d2.polynomial.route == "corollary");

    // d=3, lambda=0.555
    Certificate d3 = certify_contraction(problem(3, R(111, 200), {{3, R(1)}}, R(4457, 100000)), 16);
    CHECK(d3.certified());
    CHECK(d3.contraction ==
          RS("104460159134616167280419517020121/104857600000000000000000000000000"));

    // mixed degree, lambda=0.61: the naive coefficient bound fails, the
    // sign-directed interval bound still certifies
    Certificate mixed = certify_contraction(
        problem(3, R(61, 100), {{2, R(1, 2)}, {3, R(1, 2)}}, R(4057, 100000)), 16);
    CHECK(mixed.certified());
    CHECK(mixed.contraction ==
          RS("163838300623282527947468908621711/163840000000000000000000000000000"));
    CHECK(mixed.subintervals == 18);  // two bisections were needed
    CHECK(mixed.naive_bound > 1);

    // coloring, d=3
    Certificate color = certify_contraction(problem(3, R(-1, 2), {{3, R(1)}}, R(38, 100000)), 16);
    CHECK(color.certified());
    CHECK(color.contraction == RS("4920101771601/6553600000000"));
}

TEST_CASE("certification fails when x_hat is too large") {
    Certificate c = certify_contraction(problem(3, R(17, 25), {{2, R(1)}}, R(2, 3)), 16);
    CHECK_FALSE(c.certified());
    CHECK(c.contraction >= 1);
}

TEST_CASE("more subintervals never weaken the bound") {
    ContractionProblem p = problem(3, R(17, 25), {{2, R(1)}}, R(1, 10));
    Rational c16 = certify_contraction(p, 16).contraction;
    Rational c32 = certify_contraction(p, 32).contraction;
    Rational c128 = certify_contraction(p, 128).contraction;
    CHECK(c32 <= c16);
    CHECK(c128 <= c32);
}

TEST_CASE("shrinking x_hat never weakens the bound") {
    Rational prev;
    bool have_prev = false;
    for (long n : {8L, 4L, 2L, 1L}) {
        Rational c = certify_contraction(problem(3, R(17, 25), {{2, R(1)}}, R(n, 80)), 16).contraction;
        if (have_prev) CHECK(c <= prev);
        prev = c;
        have_prev = true;
    }
}

TEST_CASE("threshold enclosures") {
    DegreeDistribution d2{{{2, R(1)}}, false};
    DegreeDistribution d3{{{3, R(1)}}, false};
    DegreeDistribution mixed{{{2, R(1, 2)}, {3, R(1, 2)}}, false};

    Enclosure ks2 = ks_bound(d2);
    CHECK(ks2.lo <= ks2.hi);
    CHECK(ks2.hi - ks2.lo <= R(1, 100000000));
    CHECK(ks2.lo * ks2.lo <= R(1, 2));
    CHECK(ks2.hi * ks2.hi >= R(1, 2));
    CHECK(floor_to_denominator(ks2.lo, 10000) == R(7071, 10000));
    CHECK(floor_to_denominator(ks2.hi, 10000) == R(7071, 10000));

    Enclosure ks3 = ks_bound(d3);
    CHECK(ks3.lo * ks3.lo <= R(1, 3));
    CHECK(ks3.hi * ks3.hi >= R(1, 3));
    CHECK(floor_to_denominator(ks3.lo, 10000) == R(5773, 10000));

    Enclosure ksm = ks_bound(mixed);  // 1/sqrt(5/2)
    CHECK(ksm.lo * ksm.lo <= R(2, 5));
    CHECK(ksm.hi * ksm.hi >= R(2, 5));
    CHECK(floor_to_denominator(ksm.lo, 10000) == R(6324, 10000));

    // q=3, d=2: discriminant is a perfect square, the root is exactly 2/3
    Enclosure mp2 = mp_bound(3, d2);
    CHECK(mp2.exact());
    CHECK(mp2.lo == R(2, 3));

    Enclosure mp3 = mp_bound(3, d3);
    CHECK(floor_to_denominator(mp3.lo, 10000) == R(5302, 10000));
    // root check: p(lo) <= 0 <= p(hi) for p = dbar q l^2 - (q-2) l - 2
    CHECK(R(9) * mp3.lo * mp3.lo - mp3.lo - 2 <= 0);
    CHECK(R(9) * mp3.hi * mp3.hi - mp3.hi - 2 >= 0);

    Enclosure mpm = mp_bound(3, mixed);
    CHECK(floor_to_denominator(mpm.lo, 10000) == R(5873, 10000));
    CHECK(R(15, 2) * mpm.lo * mpm.lo - mpm.lo - 2 <= 0);
    CHECK(R(15, 2) * mpm.hi * mpm.hi - mpm.hi - 2 >= 0);
}

TEST_CASE("second eigenvalue of a Potts-shaped potential") {
    CHECK(potts_lambda(potts_channel(3, R(17, 25)).matrix) == R(17, 25));
    CHECK(potts_lambda(potts_channel(3, R(17, 25)).matrix.scaled(R(9, 2))) == R(17, 25));
    CHECK(potts_lambda(PotentialMatrix::coloring(3)) == R(-1, 2));
    CHECK(potts_lambda(PotentialMatrix::identity(4)) == R(1));
    PotentialMatrix lopsided(2, 2, {R(1), R(2), R(2), R(3)});
    CHECK_FALSE(potts_lambda(lopsided).has_value());
}

TEST_CASE("problem validation") {
    CHECK_THROWS_AS(certify_contraction(problem(3, R(1, 2), {{2, R(1)}}, R(0)), 16), std::invalid_argument);
    CHECK_THROWS_AS(problem(3, R(1, 2), {{2, R(1)}}, R(2)).validate(), std::invalid_argument);
    CHECK_THROWS_AS(problem(3, R(3, 2), {{2, R(1)}}, kXhat).validate(), std::invalid_argument);
    CHECK_THROWS_AS(certify_contraction(problem(3, R(1, 2), {{2, R(1)}}, R(1, 10)), 0), std::invalid_argument);
    problem(3, R(1, 2), {{2, R(1)}}, R(1, 10)).validate();
}

TEST_CASE("unreduced rational inputs certify identically") {
    Certificate a = certify_contraction(problem(3, R(68, 100), {{2, R(50, 100)}, {3, R(2, 4)}}, R(10, 100)), 16);
    Certificate b = certify_contraction(problem(3, R(17, 25), {{2, R(1, 2)}, {3, R(1, 2)}}, R(1, 10)), 16);
    CHECK(a.status == b.status);
    CHECK(a.contraction == b.contraction);
}

TEST_CASE("end-to-end: blind channel certifies trivially") {
    ModelSpec model{3,
                    {LevelSpec{DegreeDistribution{{{2, R(1)}}, false},
                               {{potts_channel(3, R(0)).matrix, R(1)}}}},
                    SymmetryGroup::symmetric(3)};
    CertifyOutcome out = end_to_end_certify(model, Schedule{3, {}, 0, 0}, 16);
    CHECK(out.certificate.certified());
    CHECK(out.problem.x_hat == 0);
}

TEST_CASE("end-to-end: noiseless channel never certifies") {
    ModelSpec model{3,
                    {LevelSpec{DegreeDistribution{{{2, R(1)}}, false},
                               {{potts_channel(3, R(1)).matrix, R(1)}}}},
                    SymmetryGroup::symmetric(3)};
    CertifyOutcome out = end_to_end_certify(model, Schedule{3, {}, 0, 0}, 16);
    CHECK_FALSE(out.certificate.certified());
    CHECK(out.trace.records.back().x_bound == R(2, 3));
}
