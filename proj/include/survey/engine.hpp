#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "survey/core.hpp"
#include "survey/oracle.hpp"
#include "survey/skeleton.hpp"

namespace survey {

// Random tree MRF generator: domain size, per-level degree/potential
// distributions (a single entry is reused for every level), and the color
// symmetry of the model (full S_q for Potts, trivial otherwise).
struct ModelSpec {
    std::size_t q = 0;
    std::vector<LevelSpec> levels;
    SymmetryGroup symmetry{1, {}};

    bool symmetric() const { return !symmetry.is_trivial(); }
    // Level spec for 1-based iteration number; stationary models reuse levels[0].
    const LevelSpec& level(unsigned iteration) const;
    void validate() const;
};

struct SkeletonPlanEntry {
    unsigned from_iteration = 1;
    SkeletonPtr skeleton;
};

// Iteration plan: total count, which skeleton to resurvey onto from which
// iteration on, the rounding denominator (0 disables rounding) and the
// support cap that triggers a resurvey (0 means never).
struct Schedule {
    unsigned iterations = 0;
    std::vector<SkeletonPlanEntry> plan;
    unsigned long rounding_denominator = 0;
    std::size_t support_cap = 0;

    const SkeletonPtr& skeleton_for(unsigned iteration) const;
    void validate(std::size_t q) const;
};

struct BoundRecord {
    unsigned iteration = 0;
    std::size_t support = 0;
    Rational x_bound;
    Rational tv_bound;
};

struct BoundTrace {
    std::vector<BoundRecord> records;
    std::vector<std::string> warnings;  // e.g. non-monotone x_bound

    void write_csv(std::ostream& out) const;
};

struct RunResult {
    BoundTrace trace;
    Survey final_survey;
};

// One survey-level recursion step: every tuple of base points across the
// children contributes (product of weights) * ||f(tuple)|| at f/||f||.
// The output is a survey of the next residual distribution, represented on
// its natural support.
ResidualDistribution survey_step(const std::vector<Survey>& children,
                                 const std::vector<PotentialMatrix>& potentials);

// Mixes survey_step over the level's random degree and i.i.d. potential
// choices; a degree tail contributes the trivial survey (uniform over basis),
// which is only valid for symmetric models. Identical children allow the
// tuple enumeration to run over multisets with multinomial coefficients.
Survey level_step(const Survey& child_survey, const LevelSpec& level, const SymmetryGroup& symmetry);

// Certified bounds read off a survey (convex dominance): x_bound dominates
// E sum_a (P^a - 1/q)^2, tv_bound dominates E d_TV(P, pi), and the mean is
// exact because it is affine.
Rational x_bound(const Survey& survey, std::size_t q);
Rational tv_bound(const Survey& survey, const ProbVec& pi);
ProbVec root_marginal(const Survey& survey);

// Called after each recorded iteration; returning true stops the run early
// (the trace keeps everything recorded so far).
using RunObserver = std::function<bool(const BoundRecord&, const Survey&)>;

// Iteration driver: starts from the uniform-over-basis base survey, then per
// iteration applies level_step, resurveys onto the scheduled skeleton when
// the support exceeds the cap, rounds to the scheduled denominator, and
// records bounds. Deterministic.
RunResult run(const ModelSpec& model, const Schedule& schedule, const RunObserver& observer = {});

}  // namespace survey
