#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "survey/core.hpp"
#include "survey/engine.hpp"

namespace survey {

// Inputs of a one-step contraction question: does the recursive bound on
// x_{n+1} stay below x_n throughout (0, x_hat]?
struct ContractionProblem {
    std::size_t q = 0;
    Rational lambda;
    DegreeDistribution degree;
    Rational x_hat;

    Rational mean_degree() const { return degree.mean(); }
    unsigned max_degree() const { return degree.max_degree(); }
    void validate() const;
};

// Step bound as a polynomial in x (coefficient of x^j keyed by j). The
// degree-1 coefficient is always d-bar * lambda^2; higher terms carry the
// per-j z-optimization (theorem route) or the published specialized
// polynomials (corollary route, used when the problem matches one of the
// four published shapes).
struct StepPolynomial {
    std::map<unsigned, Rational> coefficients;
    std::string route;  // "theorem" or "corollary"
    std::vector<std::string> audit;

    Rational evaluate(const Rational& x) const;
    // sum_j |c_j| x^{j-1}: the naive bound on the ratio, kept for comparison.
    Rational naive_ratio_bound(const Rational& x) const;
};

StepPolynomial theorem_polynomial(const ContractionProblem& problem);
StepPolynomial step_polynomial(const ContractionProblem& problem);

// Right-hand side of the recursive inequality with each j-term maximized
// over z in [0, x] (endpoints plus interior critical points, all rational).
Rational xn_step_bound(const ContractionProblem& problem, const Rational& x);

// The four published q=3 polynomials: 1 = d2 ferromagnetic, 2 = d3
// ferromagnetic, 3 = mixed d in {2,3} each w.p. 1/2, 4 = d3 coloring
// (lambda fixed at -1/2; the lambda argument is ignored there).
Rational corollary_bound(int case_id, const Rational& x, const Rational& lambda = Rational(0));

enum class CertStatus { certified, not_certified };

struct SubintervalBound {
    Rational lo, hi;
    Rational bound;
};

struct Certificate {
    CertStatus status = CertStatus::not_certified;
    Rational contraction;  // C: certified implies C < 1 exactly
    std::size_t subintervals = 0;
    Rational naive_bound;
    StepPolynomial polynomial;
    std::vector<SubintervalBound> intervals;

    bool certified() const { return status == CertStatus::certified; }
    void write_report(std::ostream& out, const ContractionProblem& problem) const;
};

// Bounds sup_{x in (0, x_hat]} step(x)/x by sign-directed interval
// evaluation on m subintervals; subintervals whose bound reaches 1 are
// bisected adaptively as long as the exact ratio there stays below 1.
// C = max subinterval bound; certified iff C < 1.
Certificate certify_contraction(const ContractionProblem& problem, unsigned subintervals);

// Two-sided rational enclosure of an (often irrational) threshold.
struct Enclosure {
    Rational lo, hi;
    bool exact() const { return lo == hi; }
};

// Kesten-Stigum threshold 1/sqrt(d-bar) (reconstruction above it).
Enclosure ks_bound(const DegreeDistribution& degree);
// Mossel-Peres threshold: positive root of d-bar q lambda^2 - (q-2) lambda = 2;
// exact when the discriminant is a rational square (q=3, d=2 gives 2/3).
Enclosure mp_bound(std::size_t q, const DegreeDistribution& degree);

// Second eigenvalue of a Potts-shaped potential (equal diagonal, equal
// off-diagonal), scale-invariant; nullopt for any other shape.
std::optional<Rational> potts_lambda(const PotentialMatrix& psi);

struct CertifyOutcome {
    Certificate certificate;
    ContractionProblem problem;  // with the x_hat that was certified (or last tried)
    BoundTrace trace;
};

// Runs the engine and attempts certification after every iteration with
// x_hat = the recorded x_bound; stops at the first success. The model must
// be a symmetric single-potential Potts model with a tail-free degree
// distribution.
CertifyOutcome end_to_end_certify(const ModelSpec& model, const Schedule& schedule, unsigned subintervals);

}  // namespace survey
