#include "survey/potts_certify.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

namespace survey {
namespace {

Rational pow_r(const Rational& base, unsigned e) {
    Rational r = 1;
    for (unsigned i = 0; i < e; ++i) r *= base;
    return r;
}

Rational binom_r(unsigned n, unsigned k) {
    if (k > n) return 0;
    Integer b;
    mpz_bin_uiui(b.get_mpz_t(), n, k);
    return Rational(b);
}

std::optional<Rational> rational_sqrt(const Rational& r) {
    if (sgn(r) < 0) return std::nullopt;
    const Integer& num = r.get_num();
    const Integer& den = r.get_den();
    if (!mpz_perfect_square_p(num.get_mpz_t()) || !mpz_perfect_square_p(den.get_mpz_t())) return std::nullopt;
    Integer sn, sd;
    mpz_sqrt(sn.get_mpz_t(), num.get_mpz_t());
    mpz_sqrt(sd.get_mpz_t(), den.get_mpz_t());
    Rational out(sn, sd);
    out.canonicalize();
    return out;
}

std::map<unsigned, Rational> corollary_coefficients(int case_id, const Rational& lambda) {
    Rational l2 = lambda * lambda;
    Rational quad = 2 * l2 + 4 * lambda + 1;          // 2l^2 + 4l + 1
    Rational cube = pow_r(1 + lambda, 3);
    switch (case_id) {
        case 1:
            return {{1, 2 * l2}, {2, Rational(3, 2) * l2 * l2 * quad}};
        case 2:
            return {{1, 3 * l2},
                    {2, Rational(9, 2) * l2 * l2 * quad},
                    {3, -Rational(9, 2) * pow_r(l2, 3) * cube}};
        case 3:
            return {{1, Rational(5, 2) * l2},
                    {2, 3 * l2 * l2 * quad},
                    {3, -Rational(9, 4) * pow_r(l2, 3) * cube}};
        case 4:
            return {{1, Rational(3, 4)}, {2, Rational(63, 32)}, {3, -Rational(351, 256)}};
        default:
            throw std::invalid_argument("corollary_bound: case must be 1..4");
    }
}

// gmp equality and canonicity-sensitive ops need canonical operands, and the
// two-argument Rational constructor does not reduce; normalize user input once.
ContractionProblem canonical(const ContractionProblem& problem) {
    ContractionProblem p = problem;
    p.lambda.canonicalize();
    p.x_hat.canonicalize();
    for (auto& [d, pr] : p.degree.atoms) pr.canonicalize();
    return p;
}

}  // namespace

void ContractionProblem::validate() const {
    if (q < 2) throw std::invalid_argument("ContractionProblem: q must be >= 2");
    if (lambda < Rational(-1, static_cast<long>(q - 1)) || lambda > 1)
        throw std::invalid_argument("ContractionProblem: lambda outside [-1/(q-1), 1]");
    if (sgn(x_hat) < 0 || x_hat > Rational(static_cast<long>(q - 1), static_cast<long>(q)))
        throw std::invalid_argument("ContractionProblem: x_hat outside [0, 1 - 1/q]");
    degree.validate();
    if (degree.has_tail && sgn(degree.tail_mass()) > 0)
        throw std::invalid_argument("ContractionProblem: degree tail mass is not supported");
}

Rational StepPolynomial::evaluate(const Rational& x) const {
    Rational s = 0;
    for (const auto& [j, c] : coefficients) s += c * pow_r(x, j);
    return s;
}

Rational StepPolynomial::naive_ratio_bound(const Rational& x) const {
    Rational s = 0;
    for (const auto& [j, c] : coefficients) s += abs(c) * pow_r(x, j - 1);
    return s;
}

StepPolynomial theorem_polynomial(const ContractionProblem& problem_in) {
    const ContractionProblem problem = canonical(problem_in);
    problem.validate();
    const std::size_t q = problem.q;
    const Rational& l = problem.lambda;
    StepPolynomial out;
    out.route = "theorem";
    out.coefficients[1] = problem.mean_degree() * l * l;

    // Each j-term is c_A A^j + c_B B^j - c_T (-q/(q-1))^j with A, B affine in
    // t = z/x over [0, 1]; the sup is attained at an endpoint or where
    // A = +/- B, all of which are rational.
    const long ql = static_cast<long>(q);
    Rational a0 = Rational(ql) * (Rational(ql - 3) + l) / Rational(ql - 1);
    Rational a1 = Rational(ql * ql) * l / Rational(ql - 1);
    Rational b0 = 0, b1 = 0, c_b = 0;
    if (q > 2) {
        b0 = -Rational(ql) * (Rational(3 * ql - 6) + 2 * l) / (Rational(ql - 1) * Rational(ql - 2));
        b1 = Rational(2 * ql * ql) * l / (Rational(ql - 1) * Rational(ql - 2));
        c_b = Rational((ql - 1) * (ql - 2), ql * ql);
    }
    Rational c_a(2 * (ql - 1), ql * ql);
    Rational c_t(2 * (ql - 1), ql);
    Rational tail_base(-ql, ql - 1);

    for (unsigned j = 2; j <= problem.max_degree(); ++j) {
        Rational ec = 0;
        for (const auto& [d, p] : problem.degree.atoms) ec += binom_r(d, j) * p;
        if (sgn(ec) == 0) continue;

        std::vector<Rational> cands{Rational(0), Rational(1)};
        if (sgn(a1 + b1) != 0) {
            Rational t = (a0 - b0) / (a1 + b1);
            if (sgn(t) > 0 && t < 1) cands.push_back(t);
        }
        if (sgn(a1 - b1) != 0) {
            Rational t = (a0 + b0) / (a1 - b1);
            if (sgn(t) > 0 && t < 1) cands.push_back(t);
        }
        bool first = true;
        Rational sup;
        Rational sup_t;
        for (const auto& t : cands) {
            Rational v = c_a * pow_r(a0 - a1 * t, j) + c_b * pow_r(b0 + b1 * t, j) - c_t * pow_r(tail_base, j);
            if (first || v > sup) {
                sup = v;
                sup_t = t;
                first = false;
            }
        }
        out.coefficients[j] = ec * pow_r(l, 2 * j) * sup;
        out.audit.push_back("j=" + std::to_string(j) + ": sup over z/x at t=" + sup_t.get_str() +
                            ", term coefficient " + out.coefficients[j].get_str());
    }
    return out;
}

StepPolynomial step_polynomial(const ContractionProblem& problem_in) {
    const ContractionProblem problem = canonical(problem_in);
    problem.validate();
    if (problem.q == 3 && !problem.degree.has_tail) {
        bool small_degrees = true;
        Rational p2 = 0, p3 = 0;
        for (const auto& [d, p] : problem.degree.atoms) {
            if (d == 2)
                p2 = p;
            else if (d == 3)
                p3 = p;
            else if (sgn(p) > 0)
                small_degrees = false;
        }
        if (small_degrees && sgn(problem.lambda) > 0) {
            StepPolynomial out;
            out.route = "corollary";
            for (const auto& [j, c] : corollary_coefficients(1, problem.lambda))
                if (sgn(p2) > 0) out.coefficients[j] += p2 * c;
            for (const auto& [j, c] : corollary_coefficients(2, problem.lambda))
                if (sgn(p3) > 0) out.coefficients[j] += p3 * c;
            out.audit.push_back("degree-weighted mix of the published d=2/d=3 polynomials, weights " +
                                p2.get_str() + " and " + p3.get_str());
            return out;
        }
        if (small_degrees && problem.lambda == Rational(-1, 2) && p3 == 1) {
            StepPolynomial out;
            out.route = "corollary";
            out.coefficients = corollary_coefficients(4, problem.lambda);
            out.audit.push_back("published coloring polynomial (q=3, d=3, lambda=-1/2)");
            return out;
        }
    }
    return theorem_polynomial(problem);
}

Rational xn_step_bound(const ContractionProblem& problem, const Rational& x_in) {
    Rational x = x_in;
    x.canonicalize();
    if (sgn(x) < 0 || x > Rational(static_cast<long>(problem.q - 1), static_cast<long>(problem.q)))
        throw std::invalid_argument("xn_step_bound: x outside [0, 1 - 1/q]");
    return theorem_polynomial(problem).evaluate(x);
}

Rational corollary_bound(int case_id, const Rational& x_in, const Rational& lambda_in) {
    Rational x = x_in, lambda = lambda_in;
    x.canonicalize();
    lambda.canonicalize();
    if (sgn(x) < 0 || x > Rational(2, 3)) throw std::invalid_argument("corollary_bound: x outside [0, 2/3]");
    Rational s = 0;
    for (const auto& [j, c] : corollary_coefficients(case_id, lambda)) s += c * pow_r(x, j);
    return s;
}

Certificate certify_contraction(const ContractionProblem& problem_in, unsigned subintervals) {
    const ContractionProblem problem = canonical(problem_in);
    problem.validate();
    if (subintervals == 0) throw std::invalid_argument("certify_contraction: need at least one subinterval");
    if (sgn(problem.x_hat) <= 0) throw std::invalid_argument("certify_contraction: x_hat must be positive");

    Certificate cert;
    cert.polynomial = step_polynomial(problem);
    const auto& coeffs = cert.polynomial.coefficients;
    cert.naive_bound = cert.polynomial.naive_ratio_bound(problem.x_hat);

    auto ratio_at = [&](const Rational& x) {
        Rational s = 0;
        for (const auto& [j, c] : coeffs) s += c * pow_r(x, j - 1);
        return s;
    };
    // sign-directed bound of the ratio on [a, b]: positive coefficients at b,
    // negative at a
    auto bound_on = [&](const Rational& a, const Rational& b) {
        Rational s = 0;
        for (const auto& [j, c] : coeffs) s += c * pow_r(sgn(c) > 0 ? b : a, j - 1);
        return s;
    };

    constexpr int kMaxDepth = 40;
    struct Piece {
        Rational lo, hi;
        int depth;
    };
    std::vector<Piece> stack;
    for (unsigned i = subintervals; i-- > 0;)
        stack.push_back({problem.x_hat * static_cast<long>(i) / static_cast<long>(subintervals),
                         problem.x_hat * static_cast<long>(i + 1) / static_cast<long>(subintervals), 0});

    Rational c_max = 0;
    bool hopeless = false;
    while (!stack.empty()) {
        Piece p = stack.back();
        stack.pop_back();
        Rational v = bound_on(p.lo, p.hi);
        // Refine only while there is hope: the exact ratio at the right
        // endpoint is a lower bound on the sup, so >= 1 there is final.
        if (v >= 1 && !hopeless && p.depth < kMaxDepth && ratio_at(p.hi) < 1) {
            Rational mid = (p.lo + p.hi) / 2;
            stack.push_back({p.lo, mid, p.depth + 1});
            stack.push_back({mid, p.hi, p.depth + 1});
            continue;
        }
        if (v >= 1) hopeless = true;
        cert.intervals.push_back({p.lo, p.hi, v});
        if (v > c_max) c_max = v;
    }
    std::sort(cert.intervals.begin(), cert.intervals.end(),
              [](const SubintervalBound& a, const SubintervalBound& b) { return a.lo < b.lo; });

    cert.contraction = c_max;
    cert.subintervals = cert.intervals.size();
    cert.status = c_max < 1 ? CertStatus::certified : CertStatus::not_certified;
    return cert;
}

void Certificate::write_report(std::ostream& out, const ContractionProblem& problem) const {
    out << "contraction certificate\n";
    out << "  q = " << problem.q << ", lambda = " << problem.lambda << " (" << decimal_string(problem.lambda)
        << ")\n";
    out << "  degree atoms:";
    for (const auto& [d, p] : problem.degree.atoms) out << " " << d << " w.p. " << p;
    out << "\n  x_hat = " << problem.x_hat << " (" << decimal_string(problem.x_hat) << ")\n";
    out << "  route: " << polynomial.route << "\n";
    out << "  step polynomial coefficients (of x^j):\n";
    for (const auto& [j, c] : polynomial.coefficients)
        out << "    j=" << j << ": " << c << " (" << decimal_string(c) << ")\n";
    for (const auto& line : polynomial.audit) out << "  note: " << line << "\n";
    out << "  naive absolute-coefficient ratio bound: " << naive_bound << " (" << decimal_string(naive_bound)
        << ")\n";
    out << "  subintervals: " << subintervals << "\n";
    for (const auto& iv : intervals)
        out << "    [" << decimal_string(iv.lo) << ", " << decimal_string(iv.hi)
            << "]: " << decimal_string(iv.bound) << "\n";
    out << "  C = " << contraction << " (" << decimal_string(contraction) << ")\n";
    out << "  status: " << (certified() ? "certified" : "not-certified") << "\n";
}

Enclosure ks_bound(const DegreeDistribution& degree) {
    Rational dbar = degree.mean();
    dbar.canonicalize();
    if (dbar <= 1) throw std::domain_error("ks_bound: mean degree must exceed 1");
    Rational target = 1 / dbar;  // lambda^2 at threshold
    if (auto root = rational_sqrt(target)) return {*root, *root};
    Rational lo = 0, hi = 1, width(1, 1000000000UL);
    while (hi - lo > width) {
        Rational mid = (lo + hi) / 2;
        (mid * mid * dbar < 1 ? lo : hi) = mid;
    }
    return {lo, hi};
}

Enclosure mp_bound(std::size_t q, const DegreeDistribution& degree) {
    if (q < 3) throw std::invalid_argument("mp_bound: q must be >= 3");
    Rational dbar = degree.mean();
    dbar.canonicalize();
    if (dbar <= 1) throw std::domain_error("mp_bound: mean degree must exceed 1");
    const long ql = static_cast<long>(q);
    // positive root of dbar q l^2 - (q-2) l - 2 = 0
    Rational disc = Rational((ql - 2) * (ql - 2)) + 8 * Rational(ql) * dbar;
    if (auto root = rational_sqrt(disc)) {
        Rational l = (Rational(ql - 2) + *root) / (2 * Rational(ql) * dbar);
        return {l, l};
    }
    auto f = [&](const Rational& l) -> Rational { return dbar * Rational(ql) * l * l - Rational(ql - 2) * l - 2; };
    Rational lo = 0, hi = 1, width(1, 1000000000UL);
    while (hi - lo > width) {
        Rational mid = (lo + hi) / 2;
        (sgn(f(mid)) < 0 ? lo : hi) = mid;
    }
    return {lo, hi};
}

std::optional<Rational> potts_lambda(const PotentialMatrix& psi) {
    const std::size_t q = psi.parent_dim();
    if (q < 2 || psi.child_dim() != q) return std::nullopt;
    const Rational& diag = psi.at(0, 0);
    const Rational& off = q > 1 ? psi.at(0, 1) : diag;
    for (std::size_t a = 0; a < q; ++a)
        for (std::size_t b = 0; b < q; ++b)
            if (psi.at(a, b) != (a == b ? diag : off)) return std::nullopt;
    Rational row_sum = diag + Rational(static_cast<long>(q - 1)) * off;
    if (sgn(row_sum) <= 0) return std::nullopt;
    return (diag - off) / row_sum;
}

CertifyOutcome end_to_end_certify(const ModelSpec& model, const Schedule& schedule, unsigned subintervals) {
    model.validate();
    if (!model.symmetric()) throw std::invalid_argument("end_to_end_certify: model must be symmetric");
    if (model.levels.size() != 1 || model.levels.front().potentials.size() != 1)
        throw std::invalid_argument("end_to_end_certify: need a stationary single-potential model");
    auto lambda = potts_lambda(model.levels.front().potentials.front().first);
    if (!lambda) throw std::invalid_argument("end_to_end_certify: potential is not Potts-shaped");

    ContractionProblem problem{model.q, *lambda, model.levels.front().degree, Rational(0)};
    problem.validate();

    CertifyOutcome outcome;
    outcome.problem = problem;
    bool have = false;
    auto observer = [&](const BoundRecord& rec, const Survey&) {
        if (rec.iteration == 0) return false;
        problem.x_hat = rec.x_bound;
        if (sgn(rec.x_bound) == 0) {
            Certificate c;
            c.status = CertStatus::certified;
            c.contraction = 0;
            c.polynomial.route = "trivial";
            c.polynomial.audit.push_back("x_bound reached 0: x_n is already extinguished");
            outcome.certificate = std::move(c);
            outcome.problem = problem;
            have = true;
            return true;
        }
        Certificate c = certify_contraction(problem, subintervals);
        bool done = c.certified();
        outcome.certificate = std::move(c);
        outcome.problem = problem;
        have = true;
        return done;
    };
    RunResult rr = run(model, schedule, observer);
    outcome.trace = std::move(rr.trace);
    if (!have) throw std::logic_error("end_to_end_certify: schedule ran no iterations");
    return outcome;
}

}  // namespace survey
