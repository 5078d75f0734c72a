#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "survey/core.hpp"

using namespace survey;

namespace {

std::mt19937 rng(20240811);

Rational random_rational(long max_den = 20) {
    std::uniform_int_distribution<long> den(1, max_den);
    long d = den(rng);
    std::uniform_int_distribution<long> num(0, d);
    Rational r(num(rng), d);
    r.canonicalize();
    return r;
}

ProbVec random_prob_vec(std::size_t q) {
    std::vector<Rational> e(q);
    Rational left = 1;
    for (std::size_t a = 0; a + 1 < q; ++a) {
        e[a] = left * random_rational();
        left -= e[a];
    }
    e[q - 1] = left;
    return ProbVec(std::move(e));
}

}  // namespace

TEST_CASE("Potts channel special cases") {
    Channel coloring = potts_channel(3, Rational(-1, 2));
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            CHECK(coloring.matrix.at(i, j) == (i == j ? Rational(0) : Rational(1, 2)));

    Channel noiseless = potts_channel(3, Rational(1));
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) CHECK(noiseless.matrix.at(i, j) == (i == j ? 1 : 0));

    Channel blind = potts_channel(3, Rational(0));
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) CHECK(blind.matrix.at(i, j) == Rational(1, 3));

    CHECK_THROWS_AS(potts_channel(3, Rational(-2, 3)), std::out_of_range);
    CHECK_THROWS_AS(potts_channel(3, Rational(11, 10)), std::out_of_range);
}

TEST_CASE("Potts channel is row-stochastic with second eigenvalue lambda") {
    for (const Rational& lambda : {Rational(69, 100), Rational(-1, 2), Rational(0), Rational(1)}) {
        Channel ch = potts_channel(3, lambda);
        for (std::size_t i = 0; i < 3; ++i) {
            Rational row = 0;
            for (std::size_t j = 0; j < 3; ++j) row += ch.matrix.at(i, j);
            CHECK(row == 1);
        }
        // M v = lambda v for v = e1 - e2
        for (std::size_t i = 0; i < 3; ++i) {
            Rational mv = ch.matrix.at(i, 0) - ch.matrix.at(i, 1);
            Rational lv = lambda * (Rational(i == 0 ? 1 : 0) - Rational(i == 1 ? 1 : 0));
            CHECK(mv == lv);
        }
    }
}

TEST_CASE("channel construction reduces unreduced rational input") {
    // mpq_class(68, 100) is not in lowest terms; the channel must not care
    Channel a = potts_channel(3, Rational(68, 100));
    Channel b = potts_channel(3, Rational(17, 25));
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) CHECK(a.matrix.at(i, j) == b.matrix.at(i, j));
    CHECK(is_canonical(a.lambda));
}

TEST_CASE("bp_update examples") {
    PotentialMatrix id2 = PotentialMatrix::identity(2);
    ProbVec eta(std::vector<Rational>{Rational(1, 3), Rational(2, 3)});
    BpResult r = bp_update({id2}, {eta});
    CHECK(r.vector == std::vector<Rational>{Rational(1, 3), Rational(2, 3)});
    CHECK(r.norm == 1);
    CHECK(r.normalized() == eta);

    PotentialMatrix col3 = PotentialMatrix::coloring(3);
    ProbVec red = ProbVec::basis(3, 0);
    BpResult two_reds = bp_update({col3, col3}, {red, red});
    CHECK(two_reds.vector == std::vector<Rational>{Rational(0), Rational(1), Rational(1)});
    CHECK(two_reds.norm == 2);
    CHECK(two_reds.normalized() == ProbVec(std::vector<Rational>{Rational(0), Rational(1, 2), Rational(1, 2)}));
}

TEST_CASE("bp_update zero norm is signaled, not fatal") {
    PotentialMatrix col2 = PotentialMatrix::coloring(2);
    BpResult r = bp_update({col2, col2}, {ProbVec::basis(2, 0), ProbVec::basis(2, 1)});
    CHECK(sgn(r.norm) == 0);
    CHECK_THROWS_AS(r.normalized(), std::domain_error);
}

TEST_CASE("row scaling factors out of bp_update") {
    PotentialMatrix psi = potts_channel(3, Rational(1, 2)).matrix;
    for (int trial = 0; trial < 20; ++trial) {
        ProbVec a = random_prob_vec(3), b = random_prob_vec(3);
        BpResult plain = bp_update({psi, psi}, {a, b});
        BpResult scaled = bp_update({psi.scaled(Rational(7, 3)), psi}, {a, b});
        CHECK(scaled.norm == Rational(7, 3) * plain.norm);
        for (std::size_t i = 0; i < 3; ++i) CHECK(scaled.vector[i] == Rational(7, 3) * plain.vector[i]);
    }
}

TEST_CASE("bp_update is affine in each child") {
    PotentialMatrix psi = potts_channel(3, Rational(69, 100)).matrix;
    for (int trial = 0; trial < 20; ++trial) {
        ProbVec fixed = random_prob_vec(3), eta = random_prob_vec(3), etap = random_prob_vec(3);
        Rational a = random_rational();
        Rational b = 1 - a;
        std::vector<Rational> mixed(3);
        for (std::size_t i = 0; i < 3; ++i) mixed[i] = a * eta[i] + b * etap[i];
        BpResult at_mix = bp_update({psi, psi}, {fixed, ProbVec(std::move(mixed))});
        BpResult at_eta = bp_update({psi, psi}, {fixed, eta});
        BpResult at_etap = bp_update({psi, psi}, {fixed, etap});
        for (std::size_t i = 0; i < 3; ++i)
            CHECK(at_mix.vector[i] == a * at_eta.vector[i] + b * at_etap.vector[i]);
        CHECK(at_mix.norm == a * at_eta.norm + b * at_etap.norm);
    }
}

TEST_CASE("bp_update norm equals the component sum") {
    PotentialMatrix psi = potts_channel(3, Rational(-1, 2)).matrix;
    for (int trial = 0; trial < 20; ++trial) {
        BpResult r = bp_update({psi, psi, psi}, {random_prob_vec(3), random_prob_vec(3), random_prob_vec(3)});
        Rational s = 0;
        for (const auto& x : r.vector) s += x;
        CHECK(s == r.norm);
        CHECK(is_canonical(r.norm));
    }
}

TEST_CASE("convex functionals") {
    CHECK(g_sq(ProbVec::uniform(3), 3) == 0);
    CHECK(g_sq(ProbVec::basis(3, 0), 3) == Rational(2, 3));
    CHECK(g_sq(ProbVec::uniform(2), 2) == 0);

    ProbVec pi = ProbVec::uniform(3);
    CHECK(g_tv(pi, pi) == 0);
    CHECK(g_tv(ProbVec::basis(3, 0), pi) == Rational(2, 3));
    CHECK(g_tv(ProbVec::basis(2, 0), ProbVec::basis(2, 1)) == 1);
}

TEST_CASE("ProbVec invariants") {
    CHECK_THROWS_AS(ProbVec(std::vector<Rational>{Rational(1, 2), Rational(1, 3)}), std::invalid_argument);
    CHECK_THROWS_AS(ProbVec(std::vector<Rational>{Rational(3, 2), Rational(-1, 2)}), std::invalid_argument);
    CHECK_THROWS_AS(ProbVec(std::vector<Rational>{}), std::invalid_argument);
    // unreduced entries are reduced on entry
    ProbVec v(std::vector<Rational>{Rational(50, 100), Rational(2, 4)});
    CHECK(is_canonical(v[0]));
    CHECK(v == ProbVec::uniform(2));
}

TEST_CASE("potential matrix invariants") {
    CHECK_THROWS_AS(PotentialMatrix(2, 2, {Rational(1), Rational(0), Rational(0), Rational(0)}),
                    std::invalid_argument);  // all-zero row
    CHECK_THROWS_AS(PotentialMatrix(2, 2, {Rational(1), Rational(-1), Rational(0), Rational(1)}),
                    std::invalid_argument);
    CHECK_THROWS_AS(PotentialMatrix(2, 2, {Rational(1)}), std::invalid_argument);
}

TEST_CASE("degree distribution validation") {
    DegreeDistribution ok{{{2, Rational(1, 2)}, {3, Rational(1, 2)}}, false};
    ok.validate();
    CHECK(ok.mean() == Rational(5, 2));
    CHECK(ok.max_degree() == 3);
    CHECK(ok.tail_mass() == 0);

    DegreeDistribution dup{{{2, Rational(1, 2)}, {2, Rational(1, 2)}}, false};
    CHECK_THROWS_AS(dup.validate(), std::invalid_argument);

    DegreeDistribution short_mass{{{2, Rational(1, 2)}}, false};
    CHECK_THROWS_AS(short_mass.validate(), std::invalid_argument);

    DegreeDistribution tailed{{{2, Rational(3, 4)}}, true};
    tailed.validate();
    CHECK(tailed.tail_mass() == Rational(1, 4));
}
