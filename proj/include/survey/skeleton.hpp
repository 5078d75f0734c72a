#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "survey/core.hpp"
#include "survey/oracle.hpp"

namespace survey {

// Group of color permutations under which the model is invariant. Elements
// are permutations p of {0..q-1} acting on vectors by result[p[a]] = v[a].
class SymmetryGroup {
  public:
    SymmetryGroup(std::size_t q, std::vector<std::vector<std::size_t>> generators);

    // Identity only: no symmetry is assumed.
    static SymmetryGroup trivial(std::size_t q);
    // Full symmetric group S_q.
    static SymmetryGroup symmetric(std::size_t q);

    std::size_t q() const { return q_; }
    bool is_trivial() const { return elements_.size() == 1; }
    // All group elements (closure of the generators), identity first.
    const std::vector<std::vector<std::size_t>>& elements() const { return elements_; }

    // Lexicographically smallest vector in the orbit of eta.
    ProbVec canonical(const ProbVec& eta) const;
    // As above, also reporting a permutation g with eta.permuted(g) == canonical.
    ProbVec canonical(const ProbVec& eta, std::vector<std::size_t>& g) const;

    static std::vector<std::size_t> inverse(const std::vector<std::size_t>& p);

  private:
    std::size_t q_;
    std::vector<std::vector<std::size_t>> elements_;
};

// Base set of probability vectors onto which distributions are decomposed.
// Always contains the q basis vectors; in symmetric mode (nontrivial group)
// the set is closed under the group action.
class Skeleton {
  public:
    Skeleton(SymmetryGroup group, std::vector<ProbVec> points);

    std::size_t q() const { return group_.q(); }
    std::size_t size() const { return points_.size(); }
    const std::vector<ProbVec>& points() const { return points_; }
    const ProbVec& point(std::size_t i) const { return points_[i]; }
    const SymmetryGroup& group() const { return group_; }

    // Index of a vector in the base set, or SIZE_MAX.
    std::size_t find(const ProbVec& eta) const;
    std::size_t basis_index(std::size_t a) const { return basis_index_[a]; }
    bool is_basis_point(std::size_t i) const;

    friend bool operator==(const Skeleton& a, const Skeleton& b) {
        return a.points_ == b.points_;
    }

  private:
    SymmetryGroup group_;
    std::vector<ProbVec> points_;
    std::map<ProbVec, std::size_t> index_;
    std::vector<std::size_t> basis_index_;
};

using SkeletonPtr = std::shared_ptr<const Skeleton>;

// Distribution over the base points of a skeleton. Weights are aligned with
// the base set (zeros allowed), nonnegative, summing to exactly 1.
class Survey {
  public:
    Survey(SkeletonPtr skeleton, std::vector<Rational> weights);

    static Survey uniform_over_basis(SkeletonPtr skeleton);

    const SkeletonPtr& skeleton() const { return skeleton_; }
    const std::vector<Rational>& weights() const { return weights_; }
    std::size_t support_size() const;

    ResidualDistribution to_distribution() const;
    ProbVec mean() const;
    bool is_orbit_constant() const;

    friend bool operator==(const Survey&, const Survey&) = default;

  private:
    SkeletonPtr skeleton_;
    std::vector<Rational> weights_;
};

// Convex decomposition of eta over the base set: coefficients alpha >= 0 with
// sum alpha = 1 and sum alpha_i S_i = eta, minimizing sum alpha_i d_TV(S_i, eta)
// by exact LP. Zero coefficients are omitted. Throws std::logic_error if the
// LP reports infeasible (impossible while basis vectors are in the base set).
std::vector<std::pair<std::size_t, Rational>> decompose(const ProbVec& eta, const Skeleton& skeleton);

// Memoizes decompositions per canonical orbit representative: a query vector
// is mapped to its canonical form, decomposed once, and the coefficients are
// carried back along the permutation (valid because the base set is
// orbit-closed and the TV objective is permutation-invariant).
class DecompositionCache {
  public:
    explicit DecompositionCache(SkeletonPtr skeleton);

    const SkeletonPtr& skeleton() const { return skeleton_; }
    std::vector<std::pair<std::size_t, Rational>> decompose(const ProbVec& eta);

  private:
    SkeletonPtr skeleton_;
    std::map<ProbVec, std::vector<std::pair<std::size_t, Rational>>> canonical_;
};

// Survey of a distribution: weight of S_i = sum_eta P(eta) alpha_i(eta).
Survey survey_of(const ResidualDistribution& distribution, SkeletonPtr skeleton);
Survey survey_of(const ResidualDistribution& distribution, DecompositionCache& cache);

// Re-expresses a survey on a new skeleton by decomposing each base point.
Survey resurvey(const Survey& survey, SkeletonPtr new_skeleton);

// Probability mixture of surveys; the result lives on the union base set
// (the common skeleton when all inputs share one).
Survey mix(const std::vector<Survey>& surveys, const std::vector<Rational>& probabilities);

// Floors every non-basis weight to a multiple of 1/N and moves the removed
// mass to the basis vectors in equal shares. Requires orbit-constant weights
// when the symmetry group is nontrivial; the result is again a survey of
// whatever the input surveyed.
Survey round_survey(const Survey& survey, unsigned long n, const SymmetryGroup& symmetry);

// All probability vectors with denominator m (compositions of m into q parts).
Skeleton make_grid_skeleton(std::size_t q, unsigned m);

// For each radius t and basis direction a: (1-t) * uniform + t * e_a,
// plus the basis vectors and the uniform vector. Radii must lie in (0, 1].
Skeleton make_star_skeleton(std::size_t q, const std::vector<Rational>& radii);

// One base vector per line, q whitespace-separated rationals; '#' starts a
// comment line. Validates simplex membership and (symmetric mode) orbit
// closure. Throws std::runtime_error with a line number on bad input.
Skeleton load_skeleton(std::istream& in, const SymmetryGroup& group);
Skeleton load_skeleton_file(const std::string& path, const SymmetryGroup& group);

}  // namespace survey
