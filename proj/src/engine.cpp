#include "survey/engine.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <ostream>
#include <stdexcept>

namespace survey {

const LevelSpec& ModelSpec::level(unsigned iteration) const {
    if (levels.empty()) throw std::logic_error("ModelSpec: no levels");
    if (levels.size() == 1) return levels.front();
    if (iteration < 1 || iteration > levels.size()) throw std::out_of_range("ModelSpec: iteration beyond level list");
    return levels[iteration - 1];
}

void ModelSpec::validate() const {
    if (q < 2) throw std::invalid_argument("ModelSpec: q must be >= 2");
    if (symmetry.q() != q) throw std::invalid_argument("ModelSpec: symmetry group dimension mismatch");
    if (levels.empty()) throw std::invalid_argument("ModelSpec: no levels");
    for (const auto& l : levels) l.validate(q);
}

const SkeletonPtr& Schedule::skeleton_for(unsigned iteration) const {
    const SkeletonPtr* best = nullptr;
    unsigned best_from = 0;
    for (const auto& e : plan) {
        if (e.from_iteration <= iteration && (best == nullptr || e.from_iteration >= best_from)) {
            best = &e.skeleton;
            best_from = e.from_iteration;
        }
    }
    if (!best) throw std::logic_error("Schedule: no skeleton scheduled for iteration");
    return *best;
}

void Schedule::validate(std::size_t q) const {
    bool covers_first = plan.empty();
    for (const auto& e : plan) {
        if (!e.skeleton) throw std::invalid_argument("Schedule: null skeleton in plan");
        if (e.skeleton->q() != q) throw std::invalid_argument("Schedule: skeleton dimension mismatch");
        if (e.from_iteration <= 1) covers_first = true;
    }
    if (!covers_first) throw std::invalid_argument("Schedule: plan must cover iteration 1");
    if (support_cap != 0 && support_cap < q) throw std::invalid_argument("Schedule: support cap below q");
    if (support_cap != 0 && plan.empty()) throw std::invalid_argument("Schedule: support cap without a skeleton plan");
}

void BoundTrace::write_csv(std::ostream& out) const {
    out << "iter,support,x_num,x_den,x_dec,tv_num,tv_den,tv_dec\n";
    for (const auto& r : records) {
        out << r.iteration << ',' << r.support << ',' << r.x_bound.get_num() << ',' << r.x_bound.get_den() << ','
            << decimal_string(r.x_bound) << ',' << r.tv_bound.get_num() << ',' << r.tv_bound.get_den() << ','
            << decimal_string(r.tv_bound) << '\n';
    }
}

ResidualDistribution survey_step(const std::vector<Survey>& children,
                                 const std::vector<PotentialMatrix>& potentials) {
    std::vector<ResidualDistribution> dists;
    dists.reserve(children.size());
    for (const auto& c : children) dists.push_back(c.to_distribution());
    return residual_exact(dists, potentials);
}

namespace {

Rational binom(unsigned n, unsigned k) {
    Integer b;
    mpz_bin_uiui(b.get_mpz_t(), n, k);
    return Rational(b);
}

// One instantiation step over identical i.i.d. children: mixes the
// per-potential-multiset surveys (each normalized separately) with their
// multinomial probabilities. Point-tuple enumeration within a potential
// group runs over multisets, weighted by multinomial coefficients.
ResidualDistribution level_step_dist(const ResidualDistribution& child, const LevelSpec& level,
                                     const SymmetryGroup& symmetry) {
    const std::size_t q = symmetry.q();
    const auto& pots = level.potentials;
    const std::size_t k = pots.size();
    // copies of the user-supplied probabilities, canonicalized for gmp
    std::vector<Rational> pprob(k);
    for (std::size_t j = 0; j < k; ++j) {
        pprob[j] = pots[j].second;
        pprob[j].canonicalize();
    }

    // factor[j][i]: BP factor vector of support point i under potential j
    std::vector<ProbVec> points;
    std::vector<Rational> pweights;
    for (const auto& [eta, w] : child.support()) {
        points.push_back(eta);
        pweights.push_back(w);
    }
    const std::size_t s = points.size();
    std::vector<std::vector<std::vector<Rational>>> factor(k, std::vector<std::vector<Rational>>(s));
    for (std::size_t j = 0; j < k; ++j)
        for (std::size_t i = 0; i < s; ++i) {
            std::vector<Rational> f(q, Rational(0));
            for (std::size_t a = 0; a < q; ++a)
                for (std::size_t b = 0; b < points[i].dim(); ++b) f[a] += points[i][b] * pots[j].first.at(a, b);
            factor[j][i] = std::move(f);
        }

    std::map<ProbVec, Rational> acc;

    for (const auto& [d, pd_raw] : level.degree.atoms) {
        Rational pd = pd_raw;
        pd.canonicalize();
        if (sgn(pd) == 0) continue;
        if (static_cast<double>(d) * std::log2(static_cast<double>(std::max<std::size_t>(k * s, 2))) >
            enumeration_budget_bits())
            throw BudgetExceeded("level_step: tuple enumeration budget exceeded");

        // outer: multiset of potentials (counts m_j), probability
        // d!/(prod m_j!) * prod p_j^{m_j}
        std::vector<unsigned> pot_count(k, 0);
        std::function<void(std::size_t, unsigned, Rational)> outer = [&](std::size_t j, unsigned left, Rational pm) {
            if (j + 1 == k) {
                pot_count[j] = left;
                for (unsigned t = 0; t < left; ++t) pm *= pprob[j];
                if (sgn(pm) == 0) return;

                // inner: per potential group, multisets of child points
                std::map<ProbVec, Rational> inst;
                Rational z = 0;
                std::function<void(std::size_t, const std::vector<Rational>&, const Rational&)> enter_group;
                std::function<void(std::size_t, std::size_t, unsigned, const std::vector<Rational>&, const Rational&)>
                    in_group = [&](std::size_t g, std::size_t i, unsigned rem, const std::vector<Rational>& f,
                                   const Rational& w) {
                        // last point takes whatever remains of the group
                        unsigned cmin = i + 1 == s ? rem : 0;
                        for (unsigned c = cmin; c <= rem; ++c) {
                            std::vector<Rational> nf(f);
                            Rational nw = w * binom(rem, c);
                            for (unsigned t = 0; t < c; ++t) {
                                nw *= pweights[i];
                                for (std::size_t a = 0; a < q; ++a) nf[a] *= factor[g][i][a];
                            }
                            if (i + 1 == s)
                                enter_group(g + 1, nf, nw);
                            else
                                in_group(g, i + 1, rem - c, nf, nw);
                        }
                    };
                enter_group = [&](std::size_t g, const std::vector<Rational>& f, const Rational& w) {
                    while (g < k && pot_count[g] == 0) ++g;
                    if (g < k) {
                        in_group(g, 0, pot_count[g], f, w);
                        return;
                    }
                    Rational norm = 0;
                    for (const auto& x : f) norm += x;
                    if (sgn(norm) == 0) return;
                    std::vector<Rational> eta(f);
                    for (auto& x : eta) x /= norm;
                    Rational mass = w * norm;
                    inst[ProbVec(std::move(eta))] += mass;
                    z += mass;
                };
                enter_group(0, std::vector<Rational>(q, Rational(1)), Rational(1));

                if (sgn(z) == 0)
                    throw ModelContradiction("level_step: instantiation admits no boundary with positive weight");
                for (auto& [eta, m] : inst) acc[eta] += pd * pm * (m / z);
                return;
            }
            for (unsigned c = 0; c <= left; ++c) {
                pot_count[j] = c;
                Rational npm = pm * binom(left, c);
                for (unsigned t = 0; t < c; ++t) npm *= pprob[j];
                outer(j + 1, left - c, npm);
            }
        };
        outer(0, d, Rational(1));
    }

    Rational tail = level.degree.tail_mass();
    tail.canonicalize();
    if (sgn(tail) > 0) {
        if (symmetry.is_trivial())
            throw std::invalid_argument("level_step: degree tail mass requires a symmetric model");
        Rational share = tail / static_cast<long>(q);
        for (std::size_t a = 0; a < q; ++a) acc[ProbVec::basis(q, a)] += share;
    }

    if (acc.empty()) throw ModelContradiction("level_step: empty output");
    return ResidualDistribution(std::move(acc));
}

SkeletonPtr natural_skeleton(const SymmetryGroup& group, const ResidualDistribution& dist) {
    const std::size_t q = group.q();
    std::vector<ProbVec> pts;
    std::map<ProbVec, bool> seen;
    for (std::size_t a = 0; a < q; ++a) {
        pts.push_back(ProbVec::basis(q, a));
        seen.emplace(pts.back(), true);
    }
    for (const auto& [eta, w] : dist.support())
        if (seen.emplace(eta, true).second) pts.push_back(eta);
    return std::make_shared<Skeleton>(group, std::move(pts));
}

Survey survey_on_natural(const SymmetryGroup& group, const ResidualDistribution& dist) {
    SkeletonPtr skel = natural_skeleton(group, dist);
    std::vector<Rational> w(skel->size(), Rational(0));
    for (const auto& [eta, p] : dist.support()) w[skel->find(eta)] = p;
    return Survey(std::move(skel), std::move(w));
}

}  // namespace

Survey level_step(const Survey& child_survey, const LevelSpec& level, const SymmetryGroup& symmetry) {
    level.validate(symmetry.q());
    return survey_on_natural(symmetry, level_step_dist(child_survey.to_distribution(), level, symmetry));
}

Rational x_bound(const Survey& survey, std::size_t q) {
    Rational s = 0;
    for (std::size_t i = 0; i < survey.weights().size(); ++i)
        s += survey.weights()[i] * g_sq(survey.skeleton()->point(i), q);
    return s;
}

Rational tv_bound(const Survey& survey, const ProbVec& pi) {
    Rational s = 0;
    for (std::size_t i = 0; i < survey.weights().size(); ++i)
        s += survey.weights()[i] * g_tv(survey.skeleton()->point(i), pi);
    return s;
}

ProbVec root_marginal(const Survey& survey) { return survey.mean(); }

RunResult run(const ModelSpec& model, const Schedule& schedule, const RunObserver& observer) {
    model.validate();
    schedule.validate(model.q);

    std::vector<ProbVec> basis_pts;
    for (std::size_t a = 0; a < model.q; ++a) basis_pts.push_back(ProbVec::basis(model.q, a));
    Survey state = Survey::uniform_over_basis(std::make_shared<Skeleton>(model.symmetry, std::move(basis_pts)));

    RunResult result{BoundTrace{}, state};
    ProbVec pi = state.mean();
    result.trace.records.push_back({0, state.support_size(), x_bound(state, model.q), tv_bound(state, pi)});
    if (observer && observer(result.trace.records.back(), state)) {
        result.final_survey = state;
        return result;
    }

    std::map<const Skeleton*, DecompositionCache> caches;
    for (unsigned it = 1; it <= schedule.iterations; ++it) {
        ResidualDistribution dist = level_step_dist(state.to_distribution(), model.level(it), model.symmetry);
        if (schedule.support_cap != 0 && dist.size() > schedule.support_cap) {
            const SkeletonPtr& target = schedule.skeleton_for(it);
            auto [cache_it, inserted] = caches.try_emplace(target.get(), target);
            state = survey_of(dist, cache_it->second);
        } else {
            state = survey_on_natural(model.symmetry, dist);
        }
        if (schedule.rounding_denominator != 0)
            state = round_survey(state, schedule.rounding_denominator, model.symmetry);

        BoundRecord rec{it, state.support_size(), x_bound(state, model.q), tv_bound(state, state.mean())};
        if (it >= 2 && rec.x_bound > result.trace.records.back().x_bound)
            result.trace.warnings.push_back("x_bound increased at iteration " + std::to_string(it) +
                                            " (skeleton too coarse)");
        result.trace.records.push_back(std::move(rec));
        if (observer && observer(result.trace.records.back(), state)) break;
    }
    result.final_survey = state;
    return result;
}

}  // namespace survey
