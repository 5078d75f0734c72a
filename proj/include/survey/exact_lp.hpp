#pragma once

#include <cstddef>
#include <vector>

#include "survey/rational.hpp"

namespace survey {

// Small dense LP in exact rational arithmetic:
//   minimize c'x  subject to  A x = b,  x >= 0.
struct LpProblem {
    std::vector<Rational> objective;               // length n
    std::vector<std::vector<Rational>> constraints;  // m rows of length n
    std::vector<Rational> rhs;                     // length m

    std::size_t num_vars() const { return objective.size(); }
    std::size_t num_constraints() const { return constraints.size(); }
    void validate() const;  // throws std::invalid_argument
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpSolution {
    LpStatus status = LpStatus::infeasible;
    std::vector<Rational> values;   // length n when optimal
    Rational objective_value;
};

// Two-phase primal simplex with Bland's rule (guaranteed termination).
// Returns an exact optimal basic solution, or infeasible/unbounded status.
LpSolution solve(const LpProblem& problem);

// Same, but starts phase 2 directly from the given feasible basis
// (column indices, one per constraint row; the corresponding basic solution
// must be feasible). Used to warm-start decomposition solves.
LpSolution solve_with_basis(const LpProblem& problem, const std::vector<std::size_t>& basis);

}  // namespace survey
