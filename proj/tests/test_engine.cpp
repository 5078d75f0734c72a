#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "survey/engine.hpp"

using namespace survey;

namespace {

Rational R(long n, long d = 1) {
    Rational r(n, d);
    r.canonicalize();
    return r;
}

LevelSpec potts_level(std::size_t q, const Rational& lambda, std::vector<std::pair<unsigned, Rational>> atoms) {
    return LevelSpec{DegreeDistribution{std::move(atoms), false}, {{potts_channel(q, lambda).matrix, R(1)}}};
}

Survey exact_survey(const ResidualDistribution& dist, const SymmetryGroup& group) {
    std::vector<ProbVec> pts;
    for (std::size_t a = 0; a < group.q(); ++a) pts.push_back(ProbVec::basis(group.q(), a));
    for (const auto& [eta, w] : dist.support())
        if (std::find(pts.begin(), pts.end(), eta) == pts.end()) pts.push_back(eta);
    auto skel = std::make_shared<Skeleton>(group, std::move(pts));
    std::vector<Rational> weights(skel->size(), R(0));
    for (const auto& [eta, w] : dist.support()) weights[skel->find(eta)] = w;
    return Survey(std::move(skel), std::move(weights));
}

}  // namespace

TEST_CASE("survey_step on exact supports equals the exact recursion") {
    SymmetryGroup s3 = SymmetryGroup::symmetric(3);
    PotentialMatrix psi = potts_channel(3, R(1, 2)).matrix;
    ResidualDistribution base = ResidualDistribution::uniform_over_basis(3);
    ResidualDistribution depth1 = residual_exact({base, base}, {psi, psi});

    Survey child = exact_survey(depth1, s3);
    CHECK(survey_step({child, child}, {psi, psi}) == residual_exact({depth1, depth1}, {psi, psi}));
}

TEST_CASE("survey_step coloring example matches brute force") {
    SymmetryGroup s3 = SymmetryGroup::symmetric(3);
    PotentialMatrix col = PotentialMatrix::coloring(3);
    Survey base = exact_survey(ResidualDistribution::uniform_over_basis(3), s3);
    ResidualDistribution out = survey_step({base, base}, {col, col});
    CHECK(out == brute_force_residual(TreeInstance::complete(3, 1, 2, col)));
}

TEST_CASE("survey_step ignores per-edge potential scaling") {
    SymmetryGroup s3 = SymmetryGroup::symmetric(3);
    PotentialMatrix psi = potts_channel(3, R(69, 100)).matrix;
    Survey base = exact_survey(ResidualDistribution::uniform_over_basis(3), s3);
    CHECK(survey_step({base, base}, {psi, psi}) == survey_step({base, base}, {psi.scaled(R(5, 2)), psi}));
}

TEST_CASE("level_step point-mass degree is a pure survey_step") {
    SymmetryGroup s3 = SymmetryGroup::symmetric(3);
    PotentialMatrix psi = potts_channel(3, R(1, 2)).matrix;
    Survey base = exact_survey(ResidualDistribution::uniform_over_basis(3), s3);
    Survey stepped = level_step(base, potts_level(3, R(1, 2), {{2, R(1)}}), s3);
    CHECK(stepped.to_distribution() == survey_step({base, base}, {psi, psi}));
}

TEST_CASE("level_step mixes degrees with their probabilities") {
    SymmetryGroup s3 = SymmetryGroup::symmetric(3);
    PotentialMatrix psi = potts_channel(3, R(1, 2)).matrix;
    Survey base = exact_survey(ResidualDistribution::uniform_over_basis(3), s3);
    ResidualDistribution d2 = survey_step({base, base}, {psi, psi});
    ResidualDistribution d3 = survey_step({base, base, base}, {psi, psi, psi});

    Survey mixed = level_step(base, potts_level(3, R(1, 2), {{2, R(1, 2)}, {3, R(1, 2)}}), s3);
    std::map<ProbVec, Rational> expect;
    for (const auto& [eta, w] : d2.support()) expect[eta] += R(1, 2) * w;
    for (const auto& [eta, w] : d3.support()) expect[eta] += R(1, 2) * w;
    CHECK(mixed.to_distribution() == ResidualDistribution(std::move(expect)));
}

TEST_CASE("level_step mixes potentials per edge") {
    // two potentials with probability 1/2 each; compare against the ordered
    // enumeration over independent per-edge choices
    SymmetryGroup triv = SymmetryGroup::trivial(2);
    PotentialMatrix a = potts_channel(2, R(1, 2)).matrix;
    PotentialMatrix b = potts_channel(2, R(1, 4)).matrix;
    Survey base = exact_survey(ResidualDistribution::uniform_over_basis(2), triv);
    LevelSpec level{DegreeDistribution{{{2, R(1)}}, false}, {{a, R(1, 2)}, {b, R(1, 2)}}};
    Survey out = level_step(base, level, triv);

    std::map<ProbVec, Rational> expect;
    for (const PotentialMatrix* p1 : {&a, &b})
        for (const PotentialMatrix* p2 : {&a, &b}) {
            ResidualDistribution inst =
                survey_step({base, base}, {*p1, *p2});
            for (const auto& [eta, w] : inst.support()) expect[eta] += R(1, 4) * w;
        }
    CHECK(out.to_distribution() == ResidualDistribution(std::move(expect)));
}

TEST_CASE("degree tail mass becomes the trivial survey") {
    SymmetryGroup s3 = SymmetryGroup::symmetric(3);
    LevelSpec level{DegreeDistribution{{{2, R(3, 4)}}, true}, {{potts_channel(3, R(1, 2)).matrix, R(1)}}};
    Survey base = exact_survey(ResidualDistribution::uniform_over_basis(3), s3);
    Survey out = level_step(base, level, s3);

    LevelSpec full{DegreeDistribution{{{2, R(1)}}, false}, {{potts_channel(3, R(1, 2)).matrix, R(1)}}};
    ResidualDistribution enumerated = level_step(base, full, s3).to_distribution();
    std::map<ProbVec, Rational> expect;
    for (const auto& [eta, w] : enumerated.support()) expect[eta] += R(3, 4) * w;
    for (std::size_t a = 0; a < 3; ++a) expect[ProbVec::basis(3, a)] += R(1, 12);
    CHECK(out.to_distribution() == ResidualDistribution(std::move(expect)));

    // refused without symmetry: the trivial-survey argument needs it
    SymmetryGroup triv = SymmetryGroup::trivial(3);
    Survey base_t = exact_survey(ResidualDistribution::uniform_over_basis(3), triv);
    CHECK_THROWS_AS(level_step(base_t, level, triv), std::invalid_argument);
}

TEST_CASE("bounds read off surveys") {
    SymmetryGroup s3 = SymmetryGroup::symmetric(3);
    Survey base = exact_survey(ResidualDistribution::uniform_over_basis(3), s3);
    CHECK(x_bound(base, 3) == R(2, 3));
    CHECK(tv_bound(base, ProbVec::uniform(3)) == R(2, 3));
    CHECK(root_marginal(base) == ProbVec::uniform(3));

    Survey at_uniform = exact_survey(ResidualDistribution::point_mass(ProbVec::uniform(3)), s3);
    CHECK(x_bound(at_uniform, 3) == 0);
    CHECK(tv_bound(at_uniform, ProbVec::uniform(3)) == 0);
}

TEST_CASE("run: zero iterations yields the base survey") {
    ModelSpec model{3, {potts_level(3, R(1, 2), {{2, R(1)}})}, SymmetryGroup::symmetric(3)};
    RunResult r = run(model, Schedule{0, {}, 0, 0});
    REQUIRE(r.trace.records.size() == 1);
    CHECK(r.trace.records[0].x_bound == R(2, 3));
    CHECK(r.trace.records[0].support == 3);
}

TEST_CASE("run: noiseless channel never loses the root") {
    ModelSpec model{3, {potts_level(3, R(1), {{2, R(1)}})}, SymmetryGroup::symmetric(3)};
    RunResult r = run(model, Schedule{3, {}, 0, 0});
    for (const auto& rec : r.trace.records) CHECK(rec.x_bound == R(2, 3));
}

TEST_CASE("run: blind channel erases the root in one step") {
    ModelSpec model{3, {potts_level(3, R(0), {{2, R(1)}})}, SymmetryGroup::symmetric(3)};
    RunResult r = run(model, Schedule{1, {}, 0, 0});
    CHECK(r.trace.records.back().x_bound == 0);
    CHECK(r.final_survey.to_distribution() == ResidualDistribution::point_mass(ProbVec::uniform(3)));
}

TEST_CASE("run without schedule machinery reproduces the exact recursion") {
    PotentialMatrix psi = potts_channel(3, R(1, 2)).matrix;
    ModelSpec model{3, {potts_level(3, R(1, 2), {{2, R(1)}})}, SymmetryGroup::symmetric(3)};
    RunResult r = run(model, Schedule{2, {}, 0, 0});

    ResidualDistribution exact = ResidualDistribution::uniform_over_basis(3);
    for (int i = 0; i < 2; ++i) exact = residual_exact({exact, exact}, {psi, psi});
    CHECK(r.final_survey.to_distribution() == exact);
    CHECK(r.trace.records.back().x_bound == exact.expect_g_sq(3));
}

TEST_CASE("run is deterministic and keeps weights normalized") {
    auto grid = std::make_shared<Skeleton>(make_grid_skeleton(3, 4));
    Schedule sched{4, {{1, grid}}, 1000, 12};
    ModelSpec model{3, {potts_level(3, R(3, 5), {{2, R(1)}})}, SymmetryGroup::symmetric(3)};

    RunResult a = run(model, sched);
    RunResult b = run(model, sched);
    REQUIRE(a.trace.records.size() == b.trace.records.size());
    for (std::size_t i = 0; i < a.trace.records.size(); ++i) {
        CHECK(a.trace.records[i].x_bound == b.trace.records[i].x_bound);
        CHECK(a.trace.records[i].tv_bound == b.trace.records[i].tv_bound);
        CHECK(a.trace.records[i].support == b.trace.records[i].support);
    }
    Rational total = 0;
    for (const auto& w : a.final_survey.weights()) total += w;
    CHECK(total == 1);
    CHECK(a.final_survey == b.final_survey);
}

TEST_CASE("observer can stop the run early") {
    ModelSpec model{3, {potts_level(3, R(1, 2), {{2, R(1)}})}, SymmetryGroup::symmetric(3)};
    unsigned calls = 0;
    RunResult r = run(model, Schedule{10, {}, 0, 0},
                      [&](const BoundRecord& rec, const Survey&) { return ++calls, rec.iteration >= 2; });
    CHECK(r.trace.records.back().iteration == 2);
    CHECK(calls == 3);  // iterations 0, 1, 2
}

TEST_CASE("trace CSV format") {
    ModelSpec model{3, {potts_level(3, R(1, 2), {{2, R(1)}})}, SymmetryGroup::symmetric(3)};
    RunResult r = run(model, Schedule{1, {}, 0, 0});
    std::ostringstream out;
    r.trace.write_csv(out);
    std::istringstream in(out.str());
    std::string header;
    std::getline(in, header);
    CHECK(header == "iter,support,x_num,x_den,x_dec,tv_num,tv_den,tv_dec");
    std::string row0;
    std::getline(in, row0);
    CHECK(row0 == "0,3,2,3,0.666666666667,2,3,0.666666666667");
}

TEST_CASE("budget guard on the tuple enumeration") {
    // large degree on a many-point support exceeds the default budget
    auto grid = std::make_shared<Skeleton>(make_grid_skeleton(3, 16));
    Survey wide = Survey::uniform_over_basis(grid);
    LevelSpec level = potts_level(3, R(1, 2), {{40, R(1)}});
    SymmetryGroup s3 = SymmetryGroup::symmetric(3);
    Survey spread = level_step(wide, potts_level(3, R(1, 2), {{2, R(1)}}), s3);
    CHECK_THROWS_AS(level_step(resurvey(spread, grid), level, s3), BudgetExceeded);
}

TEST_CASE("schedule validation") {
    CHECK_THROWS_AS((Schedule{2, {}, 0, 5}).validate(3), std::invalid_argument);  // cap without plan
    auto grid = std::make_shared<Skeleton>(make_grid_skeleton(3, 2));
    CHECK_THROWS_AS((Schedule{2, {{3, grid}}, 0, 10}).validate(3), std::invalid_argument);  // misses iteration 1
    Schedule ok{2, {{1, grid}}, 100, 10};
    ok.validate(3);
    CHECK(ok.skeleton_for(1) == grid);
    CHECK(ok.skeleton_for(5) == grid);
}
