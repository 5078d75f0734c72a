#include "survey/core.hpp"

#include <stdexcept>

namespace survey {

ProbVec::ProbVec(std::vector<Rational> entries) : entries_(std::move(entries)) {
    if (entries_.empty()) throw std::invalid_argument("ProbVec: empty");
    for (auto& e : entries_) e.canonicalize();  // gmp requires canonical operands
    Rational sum = 0;
    for (const auto& e : entries_) {
        if (sgn(e) < 0) throw std::invalid_argument("ProbVec: negative entry");
        sum += e;
    }
    if (sum != 1) throw std::invalid_argument("ProbVec: entries must sum to 1");
}

ProbVec ProbVec::basis(std::size_t q, std::size_t a) {
    std::vector<Rational> e(q, Rational(0));
    e.at(a) = 1;
    return ProbVec(std::move(e));
}

ProbVec ProbVec::uniform(std::size_t q) {
    std::vector<Rational> e(q, Rational(1, q));
    return ProbVec(std::move(e));
}

ProbVec ProbVec::permuted(const std::vector<std::size_t>& p) const {
    std::vector<Rational> e(entries_.size());
    for (std::size_t a = 0; a < entries_.size(); ++a) e[p[a]] = entries_[a];
    ProbVec out;
    out.entries_ = std::move(e);
    return out;
}

bool operator<(const ProbVec& a, const ProbVec& b) {
    if (a.entries_.size() != b.entries_.size()) return a.entries_.size() < b.entries_.size();
    for (std::size_t i = 0; i < a.entries_.size(); ++i) {
        int c = cmp(a.entries_[i], b.entries_[i]);
        if (c != 0) return c < 0;
    }
    return false;
}

PotentialMatrix::PotentialMatrix(std::size_t parent_dim, std::size_t child_dim, std::vector<Rational> values)
    : rows_(parent_dim), cols_(child_dim), values_(std::move(values)) {
    if (rows_ == 0 || cols_ == 0 || values_.size() != rows_ * cols_)
        throw std::invalid_argument("PotentialMatrix: inconsistent dimensions");
    for (auto& v : values_) v.canonicalize();
    for (std::size_t r = 0; r < rows_; ++r) {
        bool positive = false;
        for (std::size_t c = 0; c < cols_; ++c) {
            const Rational& v = at(r, c);
            if (sgn(v) < 0) throw std::invalid_argument("PotentialMatrix: negative entry");
            if (sgn(v) > 0) positive = true;
        }
        if (!positive) throw std::invalid_argument("PotentialMatrix: all-zero row");
    }
}

PotentialMatrix PotentialMatrix::identity(std::size_t q) {
    std::vector<Rational> v(q * q, Rational(0));
    for (std::size_t i = 0; i < q; ++i) v[i * q + i] = 1;
    return PotentialMatrix(q, q, std::move(v));
}

PotentialMatrix PotentialMatrix::coloring(std::size_t q) {
    std::vector<Rational> v(q * q, Rational(1));
    for (std::size_t i = 0; i < q; ++i) v[i * q + i] = 0;
    return PotentialMatrix(q, q, std::move(v));
}

PotentialMatrix PotentialMatrix::scaled(const Rational& c) const {
    std::vector<Rational> v(values_);
    for (auto& x : v) x *= c;
    return PotentialMatrix(rows_, cols_, std::move(v));
}

bool operator<(const PotentialMatrix& a, const PotentialMatrix& b) {
    if (a.rows_ != b.rows_) return a.rows_ < b.rows_;
    if (a.cols_ != b.cols_) return a.cols_ < b.cols_;
    for (std::size_t i = 0; i < a.values_.size(); ++i) {
        int c = cmp(a.values_[i], b.values_[i]);
        if (c != 0) return c < 0;
    }
    return false;
}

Channel potts_channel(std::size_t q, const Rational& lambda_in) {
    if (q < 2) throw std::invalid_argument("potts_channel: q must be >= 2");
    Rational lambda = lambda_in;
    lambda.canonicalize();
    if (lambda < Rational(-1, static_cast<long>(q - 1)) || lambda > 1)
        throw std::out_of_range("potts_channel: lambda outside [-1/(q-1), 1]");
    Rational p = (1 - lambda) * Rational(q - 1, q);
    Rational off = p / static_cast<long>(q - 1);
    std::vector<Rational> v(q * q, off);
    for (std::size_t i = 0; i < q; ++i) v[i * q + i] = 1 - p;
    return Channel{q, PotentialMatrix(q, q, std::move(v)), lambda};
}

Rational DegreeDistribution::atom_mass() const {
    Rational s = 0;
    for (const auto& [d, p] : atoms) s += p;
    return s;
}

Rational DegreeDistribution::tail_mass() const { return has_tail ? Rational(1) - atom_mass() : Rational(0); }

Rational DegreeDistribution::mean() const {
    Rational s = 0;
    for (const auto& [d, p] : atoms) s += Rational(d) * p;
    return s;
}

unsigned DegreeDistribution::max_degree() const {
    unsigned m = 0;
    for (const auto& [d, p] : atoms) m = std::max(m, d);
    return m;
}

void DegreeDistribution::validate() const {
    if (atoms.empty()) throw std::invalid_argument("DegreeDistribution: no atoms");
    std::vector<unsigned> seen;
    for (const auto& [d, p] : atoms) {
        if (d < 1) throw std::invalid_argument("DegreeDistribution: degree must be >= 1");
        if (sgn(p) < 0) throw std::invalid_argument("DegreeDistribution: negative probability");
        for (unsigned s : seen)
            if (s == d) throw std::invalid_argument("DegreeDistribution: duplicate degree");
        seen.push_back(d);
    }
    Rational mass = atom_mass();
    mass.canonicalize();
    if (has_tail) {
        if (mass > 1) throw std::invalid_argument("DegreeDistribution: atom mass exceeds 1");
    } else if (mass != 1) {
        throw std::invalid_argument("DegreeDistribution: probabilities must sum to 1");
    }
}

void LevelSpec::validate(std::size_t q) const {
    degree.validate();
    if (potentials.empty()) throw std::invalid_argument("LevelSpec: no potentials");
    Rational mass = 0;
    for (const auto& [psi, p] : potentials) {
        if (psi.parent_dim() != q || psi.child_dim() != q)
            throw std::invalid_argument("LevelSpec: potential dimension mismatch");
        if (sgn(p) < 0) throw std::invalid_argument("LevelSpec: negative potential probability");
        mass += p;
    }
    mass.canonicalize();
    if (mass != 1) throw std::invalid_argument("LevelSpec: potential probabilities must sum to 1");
}

ProbVec BpResult::normalized() const {
    if (sgn(norm) <= 0) throw std::domain_error("BpResult: zero norm has no normalization");
    std::vector<Rational> e(vector);
    for (auto& x : e) x /= norm;
    return ProbVec(std::move(e));
}

BpResult bp_update(const std::vector<PotentialMatrix>& potentials, const std::vector<ProbVec>& children) {
    if (potentials.empty() || potentials.size() != children.size())
        throw std::invalid_argument("bp_update: need equally many potentials and children, at least one");
    const std::size_t q = potentials.front().parent_dim();
    for (std::size_t i = 0; i < children.size(); ++i) {
        if (potentials[i].parent_dim() != q) throw std::invalid_argument("bp_update: parent dimension mismatch");
        if (potentials[i].child_dim() != children[i].dim())
            throw std::invalid_argument("bp_update: child dimension mismatch");
    }
    std::vector<Rational> f(q, Rational(1));
    for (std::size_t i = 0; i < children.size(); ++i) {
        for (std::size_t a = 0; a < q; ++a) {
            Rational msg = 0;
            for (std::size_t s = 0; s < children[i].dim(); ++s) msg += children[i][s] * potentials[i].at(a, s);
            f[a] *= msg;
        }
    }
    Rational norm = 0;
    for (const auto& x : f) norm += x;
    return BpResult{std::move(f), std::move(norm)};
}

Rational g_sq(const ProbVec& eta, std::size_t q) {
    if (eta.dim() != q) throw std::invalid_argument("g_sq: dimension mismatch");
    Rational inv_q(1, q), s = 0;
    for (std::size_t a = 0; a < q; ++a) {
        Rational d = eta[a] - inv_q;
        s += d * d;
    }
    return s;
}

Rational g_tv(const ProbVec& eta, const ProbVec& pi) {
    if (eta.dim() != pi.dim()) throw std::invalid_argument("g_tv: dimension mismatch");
    Rational s = 0;
    for (std::size_t a = 0; a < eta.dim(); ++a) s += abs(eta[a] - pi[a]);
    return s / 2;
}

}  // namespace survey
