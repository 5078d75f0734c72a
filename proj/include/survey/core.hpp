#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "survey/rational.hpp"

namespace survey {

// Probability vector over a finite domain {1..q}. Entries are exact
// rationals, nonnegative, summing to exactly 1.
class ProbVec {
  public:
    ProbVec() = default;
    explicit ProbVec(std::vector<Rational> entries);

    // Point mass at value a (0-based), domain size q.
    static ProbVec basis(std::size_t q, std::size_t a);
    static ProbVec uniform(std::size_t q);

    std::size_t dim() const { return entries_.size(); }
    const Rational& operator[](std::size_t a) const { return entries_[a]; }
    const std::vector<Rational>& entries() const { return entries_; }

    // Returns the vector with entries permuted: result[p[a]] = entries[a].
    ProbVec permuted(const std::vector<std::size_t>& p) const;

    friend bool operator==(const ProbVec&, const ProbVec&) = default;
    // Lexicographic; total order used for canonical dedup.
    friend bool operator<(const ProbVec& a, const ProbVec& b);

  private:
    std::vector<Rational> entries_;
};

// Edge potential, indexed (parent value, child value). Nonnegative, with at
// least one positive entry per row.
class PotentialMatrix {
  public:
    PotentialMatrix() = default;
    PotentialMatrix(std::size_t parent_dim, std::size_t child_dim, std::vector<Rational> values);

    static PotentialMatrix identity(std::size_t q);
    // 1[a != b], the proper-coloring potential.
    static PotentialMatrix coloring(std::size_t q);

    std::size_t parent_dim() const { return rows_; }
    std::size_t child_dim() const { return cols_; }
    const Rational& at(std::size_t parent, std::size_t child) const { return values_[parent * cols_ + child]; }

    PotentialMatrix scaled(const Rational& c) const;

    friend bool operator==(const PotentialMatrix&, const PotentialMatrix&) = default;
    friend bool operator<(const PotentialMatrix& a, const PotentialMatrix& b);

  private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<Rational> values_;
};

// Row-stochastic Markov channel. For the Potts case, lambda is the second
// eigenvalue of the matrix.
struct Channel {
    std::size_t q = 0;
    PotentialMatrix matrix;
    Rational lambda;
};

// Potts channel with stay probability 1-p, p = (1-lambda)(q-1)/q.
// Requires q >= 2 and lambda in [-1/(q-1), 1].
Channel potts_channel(std::size_t q, const Rational& lambda);

// Degree distribution with optional tail mass for truncated distributions.
struct DegreeDistribution {
    std::vector<std::pair<unsigned, Rational>> atoms;  // (degree, probability)
    bool has_tail = false;  // when set, 1 - sum(probabilities) is tail mass

    Rational atom_mass() const;
    Rational tail_mass() const;
    Rational mean() const;           // d-bar over the atoms (tail excluded)
    unsigned max_degree() const;     // over the atoms
    void validate() const;           // throws std::invalid_argument
};

// One level of the random-MRF generator: a degree distribution plus a
// distribution over edge potentials.
struct LevelSpec {
    DegreeDistribution degree;
    std::vector<std::pair<PotentialMatrix, Rational>> potentials;

    void validate(std::size_t q) const;
};

// Unnormalized BP update f^a = prod_i sum_sigma eta_i^sigma Psi_i(a, sigma)
// and its norm sum_a f^a. A zero norm signals a zero-extension boundary;
// callers drop such terms with zero weight.
struct BpResult {
    std::vector<Rational> vector;
    Rational norm;

    ProbVec normalized() const;  // requires norm > 0
};

BpResult bp_update(const std::vector<PotentialMatrix>& potentials, const std::vector<ProbVec>& children);

// sum_a (eta^a - 1/q)^2, the convex functional behind x_n.
Rational g_sq(const ProbVec& eta, std::size_t q);

// Total variation distance (1/2) sum_a |eta^a - pi^a|.
Rational g_tv(const ProbVec& eta, const ProbVec& pi);

}  // namespace survey
