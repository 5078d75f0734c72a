#pragma once

#include <cstddef>
#include <map>
#include <stdexcept>
#include <vector>

#include "survey/core.hpp"

namespace survey {

// Finitely supported distribution over probability vectors; the residual
// distribution at the root. Support vectors are pairwise distinct (exact
// equality) and weights are positive, summing to 1.
class ResidualDistribution {
  public:
    ResidualDistribution() = default;
    // Normalizes, drops zero weights, merges duplicate vectors.
    explicit ResidualDistribution(std::map<ProbVec, Rational> support);

    static ResidualDistribution point_mass(ProbVec eta);
    // The depth-1 base case {(e_a, 1/q)}.
    static ResidualDistribution uniform_over_basis(std::size_t q);

    const std::map<ProbVec, Rational>& support() const { return support_; }
    std::size_t size() const { return support_.size(); }
    std::size_t dim() const;

    ProbVec mean() const;
    Rational expect_g_sq(std::size_t q) const;
    Rational expect_g_tv(const ProbVec& pi) const;

    friend bool operator==(const ResidualDistribution&, const ResidualDistribution&) = default;

  private:
    std::map<ProbVec, Rational> support_;
};

// Fully instantiated tree: an internal vertex holds one (potential, subtree)
// pair per child; a leaf has no children. Potentials are indexed
// (parent value, child value) along the broadcast direction.
struct TreeNode {
    std::vector<std::pair<PotentialMatrix, TreeNode>> children;

    bool is_leaf() const { return children.empty(); }
    std::size_t leaf_count() const;
};

struct TreeInstance {
    std::size_t q = 0;
    TreeNode root;

    // Complete d-ary tree with `levels` edge levels (levels = 0 is a single
    // vertex) and the same potential on every edge.
    static TreeInstance complete(std::size_t q, unsigned levels, unsigned d, const PotentialMatrix& psi);
};

// Enumeration guard for brute-force boundary enumeration, measured in bits:
// leaves * log2(q) must not exceed the budget. The default corresponds to
// 16 leaves at q = 3. SURVEY_RECON_BUDGET overrides it when set.
double enumeration_budget_bits();

// One step of the exact residual-distribution recursion:
// P(Q = eta) proportional to E[ ||f(P_1..P_r)|| 1[f(P_1..P_r) ~ eta] ],
// by enumeration of all support tuples. Zero-norm tuples are dropped.
ResidualDistribution residual_exact(const std::vector<ResidualDistribution>& children,
                                    const std::vector<PotentialMatrix>& potentials);

// Independent ground truth: enumerates every boundary configuration L,
// accumulates Z_T(L) and the conditional root vector eta_T(L) by direct
// dynamic programming. Refuses (throws BudgetExceeded) beyond the budget.
ResidualDistribution brute_force_residual(const TreeInstance& tree);

struct BudgetExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The model assigns zero weight to every boundary (e.g. an unsatisfiable
// constraint system); no residual distribution exists.
struct ModelContradiction : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// E_{L} | P(a|L)/pi(a) - P(b|L)/pi(b) | for each tree, by brute force.
// The caller asserts non-increase along nested trees.
std::vector<Rational> depth_monotonicity_check(const std::vector<TreeInstance>& trees, std::size_t a, std::size_t b);

}  // namespace survey
