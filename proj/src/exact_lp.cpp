#include "survey/exact_lp.hpp"

#include <limits>
#include <stdexcept>

namespace survey {
namespace {

// Dense simplex tableau. Basis columns are kept reduced to the identity;
// the cost row holds reduced costs and (negated) objective value.
class Tableau {
  public:
    Tableau(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows, std::vector<Rational>(cols + 1)), cost_(cols + 1), basis_(rows, SIZE_MAX) {}

    Rational& at(std::size_t i, std::size_t j) { return a_[i][j]; }
    Rational& rhs(std::size_t i) { return a_[i][cols_]; }
    Rational& cost(std::size_t j) { return cost_[j]; }
    Rational& objective() { return cost_[cols_]; }
    std::size_t basis(std::size_t i) const { return basis_[i]; }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    void pivot(std::size_t row, std::size_t col) {
        Rational inv = a_[row][col];
        for (auto& x : a_[row]) x /= inv;
        for (std::size_t i = 0; i < rows_; ++i) {
            if (i == row || sgn(a_[i][col]) == 0) continue;
            Rational factor = a_[i][col];
            for (std::size_t j = 0; j <= cols_; ++j) a_[i][j] -= factor * a_[row][j];
        }
        if (sgn(cost_[col]) != 0) {
            Rational factor = cost_[col];
            for (std::size_t j = 0; j <= cols_; ++j) cost_[j] -= factor * a_[row][j];
        }
        basis_[row] = col;
    }

    // Reduces basis columns to the identity and the cost row against them.
    // Throws if the proposed basis is singular.
    void install_basis(const std::vector<std::size_t>& basis) {
        for (std::size_t i = 0; i < rows_; ++i) {
            std::size_t col = basis[i];
            std::size_t prow = SIZE_MAX;
            for (std::size_t r = i; r < rows_; ++r) {
                if (sgn(a_[r][col]) != 0 && basis_[r] == SIZE_MAX) { prow = r; break; }
            }
            if (prow == SIZE_MAX) throw std::invalid_argument("exact_lp: singular basis");
            if (prow != i) std::swap(a_[prow], a_[i]);
            pivot(i, col);
        }
    }

    // Bland's rule: entering = smallest index with negative reduced cost,
    // leaving = smallest ratio, ties by smallest basic variable index.
    // Returns optimal/unbounded.
    LpStatus run(const std::vector<bool>& allowed) {
        for (;;) {
            std::size_t enter = SIZE_MAX;
            for (std::size_t j = 0; j < cols_; ++j) {
                if (allowed[j] && sgn(cost_[j]) < 0) { enter = j; break; }
            }
            if (enter == SIZE_MAX) return LpStatus::optimal;
            std::size_t leave = SIZE_MAX;
            Rational best;
            for (std::size_t i = 0; i < rows_; ++i) {
                if (sgn(a_[i][enter]) <= 0) continue;
                Rational ratio = a_[i][cols_] / a_[i][enter];
                if (leave == SIZE_MAX || ratio < best || (ratio == best && basis_[i] < basis_[leave])) {
                    leave = i;
                    best = ratio;
                }
            }
            if (leave == SIZE_MAX) return LpStatus::unbounded;
            pivot(leave, enter);
        }
    }

  private:
    std::size_t rows_, cols_;
    std::vector<std::vector<Rational>> a_;
    std::vector<Rational> cost_;
    std::vector<std::size_t> basis_;
};

LpSolution extract(Tableau& t, std::size_t n) {
    LpSolution sol;
    sol.status = LpStatus::optimal;
    sol.values.assign(n, Rational(0));
    for (std::size_t i = 0; i < t.rows(); ++i)
        if (t.basis(i) < n) sol.values[t.basis(i)] = t.rhs(i);
    sol.objective_value = -t.objective();
    return sol;
}

LpSolution phase2(Tableau& t, const LpProblem& p) {
    const std::size_t n = p.num_vars();
    const std::size_t total = t.cols();
    // install phase-2 reduced costs for the current basis
    for (std::size_t j = 0; j <= total; ++j) t.cost(j) = 0;
    for (std::size_t j = 0; j < n; ++j) t.cost(j) = p.objective[j];
    for (std::size_t i = 0; i < t.rows(); ++i) {
        std::size_t b = t.basis(i);
        if (b >= n || sgn(p.objective[b]) == 0) continue;
        Rational factor = p.objective[b];
        for (std::size_t j = 0; j <= total; ++j) t.cost(j) -= factor * t.at(i, j);
    }
    std::vector<bool> allowed(total, false);
    for (std::size_t j = 0; j < n; ++j) allowed[j] = true;
    LpStatus st = t.run(allowed);
    if (st == LpStatus::unbounded) return LpSolution{LpStatus::unbounded, {}, Rational(0)};
    return extract(t, n);
}

}  // namespace

void LpProblem::validate() const {
    if (objective.empty()) throw std::invalid_argument("LpProblem: no variables");
    if (constraints.size() != rhs.size()) throw std::invalid_argument("LpProblem: rows/rhs mismatch");
    for (const auto& row : constraints)
        if (row.size() != objective.size()) throw std::invalid_argument("LpProblem: row length mismatch");
}

LpSolution solve(const LpProblem& problem) {
    problem.validate();
    const std::size_t n = problem.num_vars();
    const std::size_t m = problem.num_constraints();
    if (m == 0) {
        // min c'x over x >= 0 with no constraints
        for (std::size_t j = 0; j < n; ++j)
            if (sgn(problem.objective[j]) < 0) return LpSolution{LpStatus::unbounded, {}, Rational(0)};
        return LpSolution{LpStatus::optimal, std::vector<Rational>(n, Rational(0)), Rational(0)};
    }

    // Phase 1 with one artificial per row.
    Tableau t(m, n + m);
    for (std::size_t i = 0; i < m; ++i) {
        int s = sgn(problem.rhs[i]) < 0 ? -1 : 1;
        for (std::size_t j = 0; j < n; ++j) t.at(i, j) = s * problem.constraints[i][j];
        t.rhs(i) = s * problem.rhs[i];
        t.at(i, n + i) = 1;
    }
    std::vector<std::size_t> art(m);
    for (std::size_t i = 0; i < m; ++i) art[i] = n + i;
    for (std::size_t j = 0; j < m; ++j) t.cost(n + j) = 1;
    t.install_basis(art);

    std::vector<bool> allowed(n + m, true);
    LpStatus st = t.run(allowed);
    (void)st;  // phase 1 is bounded below by 0
    if (sgn(-t.objective()) != 0) return LpSolution{LpStatus::infeasible, {}, Rational(0)};

    // Drive any artificial still basic (at zero) out of the basis.
    for (std::size_t i = 0; i < m; ++i) {
        if (t.basis(i) < n) continue;
        std::size_t enter = SIZE_MAX;
        for (std::size_t j = 0; j < n; ++j)
            if (sgn(t.at(i, j)) != 0) { enter = j; break; }
        if (enter != SIZE_MAX) t.pivot(i, enter);
        // else: the row is redundant; the artificial stays basic at zero,
        // which is harmless since artificials are disallowed in phase 2.
    }
    return phase2(t, problem);
}

LpSolution solve_with_basis(const LpProblem& problem, const std::vector<std::size_t>& basis) {
    problem.validate();
    const std::size_t n = problem.num_vars();
    const std::size_t m = problem.num_constraints();
    if (basis.size() != m) throw std::invalid_argument("solve_with_basis: basis size mismatch");
    Tableau t(m, n);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) t.at(i, j) = problem.constraints[i][j];
        t.rhs(i) = problem.rhs[i];
    }
    t.install_basis(basis);
    for (std::size_t i = 0; i < m; ++i)
        if (sgn(t.rhs(i)) < 0) throw std::invalid_argument("solve_with_basis: basis not feasible");
    return phase2(t, problem);
}

}  // namespace survey
