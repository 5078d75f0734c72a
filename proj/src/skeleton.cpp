#include "survey/skeleton.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "survey/exact_lp.hpp"

namespace survey {

namespace {

std::vector<std::size_t> identity_perm(std::size_t q) {
    std::vector<std::size_t> p(q);
    for (std::size_t i = 0; i < q; ++i) p[i] = i;
    return p;
}

}  // namespace

SymmetryGroup::SymmetryGroup(std::size_t q, std::vector<std::vector<std::size_t>> generators) : q_(q) {
    if (q == 0) throw std::invalid_argument("SymmetryGroup: q must be positive");
    for (const auto& g : generators) {
        if (g.size() != q) throw std::invalid_argument("SymmetryGroup: generator size mismatch");
        std::vector<bool> seen(q, false);
        for (std::size_t v : g) {
            if (v >= q || seen[v]) throw std::invalid_argument("SymmetryGroup: not a permutation");
            seen[v] = true;
        }
    }
    // closure by breadth-first products
    std::set<std::vector<std::size_t>> closed;
    std::vector<std::vector<std::size_t>> frontier{identity_perm(q)};
    closed.insert(frontier.front());
    while (!frontier.empty()) {
        std::vector<std::vector<std::size_t>> next;
        for (const auto& p : frontier) {
            for (const auto& g : generators) {
                std::vector<std::size_t> prod(q);
                for (std::size_t i = 0; i < q; ++i) prod[i] = g[p[i]];
                if (closed.insert(prod).second) next.push_back(std::move(prod));
            }
        }
        frontier = std::move(next);
    }
    elements_.assign(closed.begin(), closed.end());
    // identity is lexicographically smallest, so it is already first
}

SymmetryGroup SymmetryGroup::trivial(std::size_t q) { return SymmetryGroup(q, {}); }

SymmetryGroup SymmetryGroup::symmetric(std::size_t q) {
    std::vector<std::vector<std::size_t>> gens;
    if (q >= 2) {
        auto swap01 = identity_perm(q);
        std::swap(swap01[0], swap01[1]);
        auto cycle = identity_perm(q);
        for (std::size_t i = 0; i < q; ++i) cycle[i] = (i + 1) % q;
        gens = {swap01, cycle};
    }
    return SymmetryGroup(q, std::move(gens));
}

ProbVec SymmetryGroup::canonical(const ProbVec& eta) const {
    std::vector<std::size_t> g;
    return canonical(eta, g);
}

ProbVec SymmetryGroup::canonical(const ProbVec& eta, std::vector<std::size_t>& g) const {
    ProbVec best = eta;
    g = elements_.front();
    for (const auto& p : elements_) {
        ProbVec cand = eta.permuted(p);
        if (cand < best) {
            best = std::move(cand);
            g = p;
        }
    }
    return best;
}

std::vector<std::size_t> SymmetryGroup::inverse(const std::vector<std::size_t>& p) {
    std::vector<std::size_t> inv(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) inv[p[i]] = i;
    return inv;
}

Skeleton::Skeleton(SymmetryGroup group, std::vector<ProbVec> points)
    : group_(std::move(group)), points_(std::move(points)) {
    const std::size_t q = group_.q();
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (points_[i].dim() != q) throw std::invalid_argument("Skeleton: point dimension mismatch");
        if (!index_.emplace(points_[i], i).second) throw std::invalid_argument("Skeleton: duplicate base point");
    }
    basis_index_.resize(q);
    for (std::size_t a = 0; a < q; ++a) {
        std::size_t idx = find(ProbVec::basis(q, a));
        if (idx == SIZE_MAX) throw std::invalid_argument("Skeleton: missing basis vector");
        basis_index_[a] = idx;
    }
    if (!group_.is_trivial()) {
        for (const auto& pt : points_)
            for (const auto& p : group_.elements())
                if (find(pt.permuted(p)) == SIZE_MAX)
                    throw std::invalid_argument("Skeleton: base set not closed under symmetry group");
    }
}

std::size_t Skeleton::find(const ProbVec& eta) const {
    auto it = index_.find(eta);
    return it == index_.end() ? SIZE_MAX : it->second;
}

bool Skeleton::is_basis_point(std::size_t i) const {
    for (std::size_t b : basis_index_)
        if (b == i) return true;
    return false;
}

Survey::Survey(SkeletonPtr skeleton, std::vector<Rational> weights)
    : skeleton_(std::move(skeleton)), weights_(std::move(weights)) {
    if (!skeleton_) throw std::invalid_argument("Survey: null skeleton");
    if (weights_.size() != skeleton_->size()) throw std::invalid_argument("Survey: weight count mismatch");
    Rational sum = 0;
    for (auto& w : weights_) {
        w.canonicalize();  // gmp requires canonical operands
        if (sgn(w) < 0) throw std::invalid_argument("Survey: negative weight");
        sum += w;
    }
    if (sum != 1) throw std::invalid_argument("Survey: weights must sum to 1");
}

Survey Survey::uniform_over_basis(SkeletonPtr skeleton) {
    std::vector<Rational> w(skeleton->size(), Rational(0));
    const std::size_t q = skeleton->q();
    for (std::size_t a = 0; a < q; ++a) w[skeleton->basis_index(a)] = Rational(1, q);
    return Survey(std::move(skeleton), std::move(w));
}

std::size_t Survey::support_size() const {
    std::size_t n = 0;
    for (const auto& w : weights_)
        if (sgn(w) > 0) ++n;
    return n;
}

ResidualDistribution Survey::to_distribution() const {
    std::map<ProbVec, Rational> s;
    for (std::size_t i = 0; i < weights_.size(); ++i)
        if (sgn(weights_[i]) > 0) s.emplace(skeleton_->point(i), weights_[i]);
    return ResidualDistribution(std::move(s));
}

ProbVec Survey::mean() const {
    const std::size_t q = skeleton_->q();
    std::vector<Rational> m(q, Rational(0));
    for (std::size_t i = 0; i < weights_.size(); ++i)
        for (std::size_t a = 0; a < q; ++a) m[a] += weights_[i] * skeleton_->point(i)[a];
    return ProbVec(std::move(m));
}

bool Survey::is_orbit_constant() const {
    const auto& group = skeleton_->group();
    if (group.is_trivial()) return true;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
        for (const auto& p : group.elements()) {
            std::size_t j = skeleton_->find(skeleton_->point(i).permuted(p));
            if (weights_[j] != weights_[i]) return false;
        }
    }
    return true;
}

std::vector<std::pair<std::size_t, Rational>> decompose(const ProbVec& eta, const Skeleton& skeleton) {
    if (eta.dim() != skeleton.q()) throw std::invalid_argument("decompose: dimension mismatch");
    // A base point decomposes onto itself: the TV objective is zero there and
    // strictly positive for any other valid decomposition.
    if (std::size_t self = skeleton.find(eta); self != SIZE_MAX) return {{self, Rational(1)}};

    const std::size_t n = skeleton.size();
    const std::size_t q = skeleton.q();
    LpProblem lp;
    lp.objective.resize(n);
    for (std::size_t k = 0; k < n; ++k) lp.objective[k] = g_tv(skeleton.point(k), eta);
    // Mean constraints only: sum of the q rows already forces sum alpha = 1
    // because every base point sums to 1.
    lp.constraints.assign(q, std::vector<Rational>(n));
    lp.rhs.resize(q);
    for (std::size_t a = 0; a < q; ++a) {
        for (std::size_t k = 0; k < n; ++k) lp.constraints[a][k] = skeleton.point(k)[a];
        lp.rhs[a] = eta[a];
    }
    // Barycentric warm start: the basis-vector columns form an identity basis
    // and carry the feasible solution alpha = eta.
    std::vector<std::size_t> start(q);
    for (std::size_t a = 0; a < q; ++a) start[a] = skeleton.basis_index(a);
    LpSolution sol = solve_with_basis(lp, start);
    if (sol.status != LpStatus::optimal) throw std::logic_error("decompose: LP not optimal");

    std::vector<std::pair<std::size_t, Rational>> out;
    for (std::size_t k = 0; k < n; ++k)
        if (sgn(sol.values[k]) > 0) out.emplace_back(k, sol.values[k]);
    return out;
}

DecompositionCache::DecompositionCache(SkeletonPtr skeleton) : skeleton_(std::move(skeleton)) {
    if (!skeleton_) throw std::invalid_argument("DecompositionCache: null skeleton");
}

std::vector<std::pair<std::size_t, Rational>> DecompositionCache::decompose(const ProbVec& eta) {
    const auto& group = skeleton_->group();
    if (group.is_trivial()) return survey::decompose(eta, *skeleton_);
    std::vector<std::size_t> g;
    ProbVec canon = group.canonical(eta, g);
    auto it = canonical_.find(canon);
    if (it == canonical_.end())
        it = canonical_.emplace(canon, survey::decompose(canon, *skeleton_)).first;
    // eta = canon permuted by g^{-1}; carry the base points along with it
    std::vector<std::size_t> ginv = SymmetryGroup::inverse(g);
    std::vector<std::pair<std::size_t, Rational>> out;
    out.reserve(it->second.size());
    for (const auto& [idx, coef] : it->second) {
        std::size_t mapped = skeleton_->find(skeleton_->point(idx).permuted(ginv));
        out.emplace_back(mapped, coef);
    }
    return out;
}

Survey survey_of(const ResidualDistribution& distribution, DecompositionCache& cache) {
    const Skeleton& skel = *cache.skeleton();
    std::vector<Rational> w(skel.size(), Rational(0));
    for (const auto& [eta, p] : distribution.support())
        for (const auto& [idx, coef] : cache.decompose(eta)) w[idx] += p * coef;
    return Survey(cache.skeleton(), std::move(w));
}

Survey survey_of(const ResidualDistribution& distribution, SkeletonPtr skeleton) {
    DecompositionCache cache(std::move(skeleton));
    return survey_of(distribution, cache);
}

Survey resurvey(const Survey& survey, SkeletonPtr new_skeleton) {
    if (*new_skeleton == *survey.skeleton()) return Survey(std::move(new_skeleton), survey.weights());
    DecompositionCache cache(std::move(new_skeleton));
    std::vector<Rational> w(cache.skeleton()->size(), Rational(0));
    const auto& old = *survey.skeleton();
    for (std::size_t i = 0; i < old.size(); ++i) {
        if (sgn(survey.weights()[i]) == 0) continue;
        for (const auto& [idx, coef] : cache.decompose(old.point(i))) w[idx] += survey.weights()[i] * coef;
    }
    return Survey(cache.skeleton(), std::move(w));
}

Survey mix(const std::vector<Survey>& surveys, const std::vector<Rational>& probabilities) {
    if (surveys.empty() || surveys.size() != probabilities.size())
        throw std::invalid_argument("mix: need equally many surveys and probabilities, at least one");
    Rational total = 0;
    for (const auto& p : probabilities) {
        if (sgn(p) < 0) throw std::invalid_argument("mix: negative probability");
        total += p;
    }
    if (total != 1) throw std::invalid_argument("mix: probabilities must sum to 1");

    bool same = true;
    for (const auto& s : surveys)
        if (!(*s.skeleton() == *surveys.front().skeleton())) { same = false; break; }

    if (same) {
        std::vector<Rational> w(surveys.front().skeleton()->size(), Rational(0));
        for (std::size_t k = 0; k < surveys.size(); ++k)
            for (std::size_t i = 0; i < w.size(); ++i) w[i] += probabilities[k] * surveys[k].weights()[i];
        return Survey(surveys.front().skeleton(), std::move(w));
    }

    // union base set, first-seen order
    std::vector<ProbVec> points;
    std::map<ProbVec, std::size_t> where;
    for (const auto& s : surveys)
        for (const auto& pt : s.skeleton()->points())
            if (where.emplace(pt, points.size()).second) points.push_back(pt);
    auto merged = std::make_shared<Skeleton>(surveys.front().skeleton()->group(), std::move(points));
    std::vector<Rational> w(merged->size(), Rational(0));
    for (std::size_t k = 0; k < surveys.size(); ++k) {
        const auto& skel = *surveys[k].skeleton();
        for (std::size_t i = 0; i < skel.size(); ++i) w[where.at(skel.point(i))] += probabilities[k] * surveys[k].weights()[i];
    }
    return Survey(std::move(merged), std::move(w));
}

Survey round_survey(const Survey& survey, unsigned long n, const SymmetryGroup& symmetry) {
    if (n == 0) throw std::invalid_argument("round_survey: denominator must be positive");
    if (!symmetry.is_trivial() && !survey.is_orbit_constant())
        throw std::invalid_argument("round_survey: weights must be orbit-constant under the symmetry group");
    const Skeleton& skel = *survey.skeleton();
    const std::size_t q = skel.q();
    std::vector<Rational> w = survey.weights();
    Rational removed = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (skel.is_basis_point(i)) continue;
        Rational floored = floor_to_denominator(w[i], n);
        removed += w[i] - floored;
        w[i] = floored;
    }
    Rational share = removed / static_cast<long>(q);
    for (std::size_t a = 0; a < q; ++a) w[skel.basis_index(a)] += share;
    return Survey(survey.skeleton(), std::move(w));
}

Skeleton make_grid_skeleton(std::size_t q, unsigned m) {
    if (q == 0 || m == 0) throw std::invalid_argument("make_grid_skeleton: q and m must be positive");
    std::vector<ProbVec> points;
    std::vector<unsigned> parts(q, 0);
    // enumerate compositions of m into q nonnegative parts
    std::function<void(std::size_t, unsigned)> rec = [&](std::size_t i, unsigned left) {
        if (i + 1 == q) {
            parts[i] = left;
            std::vector<Rational> e(q);
            for (std::size_t a = 0; a < q; ++a) e[a] = Rational(parts[a], m);
            for (auto& x : e) x.canonicalize();
            points.emplace_back(std::move(e));
            return;
        }
        for (unsigned k = 0; k <= left; ++k) {
            parts[i] = k;
            rec(i + 1, left - k);
        }
    };
    rec(0, m);
    return Skeleton(SymmetryGroup::symmetric(q), std::move(points));
}

Skeleton make_star_skeleton(std::size_t q, const std::vector<Rational>& radii) {
    if (q == 0) throw std::invalid_argument("make_star_skeleton: q must be positive");
    std::set<ProbVec> seen;
    std::vector<ProbVec> points;
    auto add = [&](ProbVec v) {
        if (seen.insert(v).second) points.push_back(std::move(v));
    };
    for (std::size_t a = 0; a < q; ++a) add(ProbVec::basis(q, a));
    add(ProbVec::uniform(q));
    for (const auto& t : radii) {
        if (sgn(t) <= 0 || t > 1) throw std::invalid_argument("make_star_skeleton: radius outside (0, 1]");
        for (std::size_t a = 0; a < q; ++a) {
            std::vector<Rational> e(q);
            for (std::size_t b = 0; b < q; ++b) e[b] = (1 - t) / static_cast<long>(q) + (a == b ? t : Rational(0));
            add(ProbVec(std::move(e)));
        }
    }
    return Skeleton(SymmetryGroup::symmetric(q), std::move(points));
}

Skeleton load_skeleton(std::istream& in, const SymmetryGroup& group) {
    std::vector<ProbVec> points;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view sv(line);
        while (!sv.empty() && std::isspace(static_cast<unsigned char>(sv.front()))) sv.remove_prefix(1);
        if (sv.empty() || sv.front() == '#') continue;
        std::istringstream tokens{std::string(sv)};
        std::vector<Rational> entries;
        std::string tok;
        while (tokens >> tok) {
            auto r = parse_rational(tok);
            if (!r) throw std::runtime_error("skeleton file line " + std::to_string(lineno) + ": bad rational '" + tok + "'");
            entries.push_back(std::move(*r));
        }
        if (entries.size() != group.q())
            throw std::runtime_error("skeleton file line " + std::to_string(lineno) + ": expected " + std::to_string(group.q()) + " entries");
        try {
            points.emplace_back(std::move(entries));
        } catch (const std::invalid_argument& e) {
            throw std::runtime_error("skeleton file line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    try {
        return Skeleton(group, std::move(points));
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error(std::string("skeleton file: ") + e.what());
    }
}

Skeleton load_skeleton_file(const std::string& path, const SymmetryGroup& group) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("skeleton file: cannot open " + path);
    return load_skeleton(in, group);
}

}  // namespace survey
