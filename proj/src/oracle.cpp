#include "survey/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <stdexcept>

namespace survey {

ResidualDistribution::ResidualDistribution(std::map<ProbVec, Rational> support) {
    Rational total = 0;
    for (auto& [eta, w] : support) {
        w.canonicalize();  // gmp requires canonical operands
        if (sgn(w) < 0) throw std::invalid_argument("ResidualDistribution: negative weight");
        total += w;
    }
    if (sgn(total) <= 0) throw std::invalid_argument("ResidualDistribution: zero total mass");
    for (auto& [eta, w] : support) {
        if (sgn(w) == 0) continue;
        support_.emplace(eta, w / total);
    }
}

ResidualDistribution ResidualDistribution::point_mass(ProbVec eta) {
    std::map<ProbVec, Rational> s;
    s.emplace(std::move(eta), Rational(1));
    return ResidualDistribution(std::move(s));
}

ResidualDistribution ResidualDistribution::uniform_over_basis(std::size_t q) {
    std::map<ProbVec, Rational> s;
    for (std::size_t a = 0; a < q; ++a) s.emplace(ProbVec::basis(q, a), Rational(1, q));
    return ResidualDistribution(std::move(s));
}

std::size_t ResidualDistribution::dim() const {
    return support_.empty() ? 0 : support_.begin()->first.dim();
}

ProbVec ResidualDistribution::mean() const {
    std::vector<Rational> m(dim(), Rational(0));
    for (const auto& [eta, w] : support_)
        for (std::size_t a = 0; a < m.size(); ++a) m[a] += w * eta[a];
    return ProbVec(std::move(m));
}

Rational ResidualDistribution::expect_g_sq(std::size_t q) const {
    Rational s = 0;
    for (const auto& [eta, w] : support_) s += w * g_sq(eta, q);
    return s;
}

Rational ResidualDistribution::expect_g_tv(const ProbVec& pi) const {
    Rational s = 0;
    for (const auto& [eta, w] : support_) s += w * g_tv(eta, pi);
    return s;
}

std::size_t TreeNode::leaf_count() const {
    if (is_leaf()) return 1;
    std::size_t n = 0;
    for (const auto& [psi, child] : children) n += child.leaf_count();
    return n;
}

TreeInstance TreeInstance::complete(std::size_t q, unsigned levels, unsigned d, const PotentialMatrix& psi) {
    std::function<TreeNode(unsigned)> build = [&](unsigned lev) {
        TreeNode node;
        if (lev == 0) return node;
        node.children.reserve(d);
        for (unsigned i = 0; i < d; ++i) node.children.emplace_back(psi, build(lev - 1));
        return node;
    };
    return TreeInstance{q, build(levels)};
}

double enumeration_budget_bits() {
    if (const char* env = std::getenv("SURVEY_RECON_BUDGET")) {
        char* end = nullptr;
        double v = std::strtod(env, &end);
        if (end != env && v > 0) return v;
    }
    return 16.0 * std::log2(3.0);
}

ResidualDistribution residual_exact(const std::vector<ResidualDistribution>& children,
                                    const std::vector<PotentialMatrix>& potentials) {
    if (children.empty() || children.size() != potentials.size())
        throw std::invalid_argument("residual_exact: need equally many children and potentials, at least one");
    const std::size_t r = children.size();
    const std::size_t q = potentials.front().parent_dim();

    // Per child, per support point: the BP factor vector
    // factor[a] = sum_sigma eta^sigma Psi(a, sigma), alongside its weight.
    struct Entry {
        std::vector<Rational> factor;
        Rational weight;
    };
    std::vector<std::vector<Entry>> factors(r);
    for (std::size_t i = 0; i < r; ++i) {
        if (potentials[i].parent_dim() != q) throw std::invalid_argument("residual_exact: dimension mismatch");
        for (const auto& [eta, w] : children[i].support()) {
            if (eta.dim() != potentials[i].child_dim())
                throw std::invalid_argument("residual_exact: child dimension mismatch");
            Entry e;
            e.factor.assign(q, Rational(0));
            for (std::size_t a = 0; a < q; ++a)
                for (std::size_t s = 0; s < eta.dim(); ++s) e.factor[a] += eta[s] * potentials[i].at(a, s);
            e.weight = w;
            factors[i].push_back(std::move(e));
        }
    }

    double tuple_bits = 0;
    for (const auto& f : factors) tuple_bits += std::log2(static_cast<double>(std::max<std::size_t>(f.size(), 1)));
    if (tuple_bits > enumeration_budget_bits())
        throw BudgetExceeded("residual_exact: enumeration budget exceeded");

    std::map<ProbVec, Rational> acc;
    std::vector<Rational> prefix(q, Rational(1));
    Rational prob(1);
    std::function<void(std::size_t, const std::vector<Rational>&, const Rational&)> rec =
        [&](std::size_t i, const std::vector<Rational>& partial, const Rational& w) {
            if (i == r) {
                Rational norm = 0;
                for (const auto& x : partial) norm += x;
                if (sgn(norm) == 0) return;  // zero-extension boundary: zero weight
                std::vector<Rational> eta(partial);
                for (auto& x : eta) x /= norm;
                acc[ProbVec(std::move(eta))] += w * norm;
                return;
            }
            for (const Entry& e : factors[i]) {
                std::vector<Rational> next(q);
                for (std::size_t a = 0; a < q; ++a) next[a] = partial[a] * e.factor[a];
                rec(i + 1, next, w * e.weight);
            }
        };
    rec(0, prefix, prob);

    if (acc.empty()) throw ModelContradiction("residual_exact: all tuples have zero extension weight");
    return ResidualDistribution(std::move(acc));
}

namespace {

// Integer-scaled potential: per-edge positive scaling leaves the residual
// distribution unchanged, so all message arithmetic can stay in mpz.
std::vector<Integer> scale_potential(const PotentialMatrix& psi) {
    const std::size_t rows = psi.parent_dim(), cols = psi.child_dim();
    Integer lcm = 1;
    for (std::size_t a = 0; a < rows; ++a)
        for (std::size_t b = 0; b < cols; ++b) mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), psi.at(a, b).get_den().get_mpz_t());
    std::vector<Integer> out(rows * cols);
    for (std::size_t a = 0; a < rows; ++a)
        for (std::size_t b = 0; b < cols; ++b) {
            Rational v = psi.at(a, b) * Rational(lcm);
            out[a * cols + b] = v.get_num();
        }
    return out;
}

}  // namespace

ResidualDistribution brute_force_residual(const TreeInstance& tree) {
    const std::size_t q = tree.q;
    if (q < 2) throw std::invalid_argument("brute_force_residual: q must be >= 2");
    const std::size_t leaves = tree.root.leaf_count();
    if (static_cast<double>(leaves) * std::log2(static_cast<double>(q)) > enumeration_budget_bits())
        throw BudgetExceeded("brute_force_residual: enumeration budget exceeded");

    // Accumulate Z_T(L) per normalized integer root-message direction.
    std::map<std::vector<Integer>, Integer> acc;
    Integer z_total = 0;

    // Enumerates the subtree's boundary configurations in lexicographic
    // order, yielding the integer upward message for each.
    std::function<void(const TreeNode&, const std::function<void(const std::vector<Integer>&)>&)> enumerate =
        [&](const TreeNode& node, const std::function<void(const std::vector<Integer>&)>& yield) {
            if (node.is_leaf()) {
                std::vector<Integer> m(q, Integer(0));
                for (std::size_t c = 0; c < q; ++c) {
                    m[c] = 1;
                    yield(m);
                    m[c] = 0;
                }
                return;
            }
            const std::size_t r = node.children.size();
            std::vector<std::vector<Integer>> scaled;
            scaled.reserve(r);
            for (const auto& [psi, child] : node.children) scaled.push_back(scale_potential(psi));

            std::function<void(std::size_t, const std::vector<Integer>&)> rec =
                [&](std::size_t i, const std::vector<Integer>& partial) {
                    if (i == r) {
                        yield(partial);
                        return;
                    }
                    const auto& psi = scaled[i];
                    const std::size_t cd = node.children[i].first.child_dim();
                    enumerate(node.children[i].second, [&](const std::vector<Integer>& msg) {
                        std::vector<Integer> next(q);
                        for (std::size_t a = 0; a < q; ++a) {
                            Integer f = 0;
                            for (std::size_t b = 0; b < cd; ++b) f += psi[a * cd + b] * msg[b];
                            next[a] = partial[a] * f;
                        }
                        rec(i + 1, next);
                    });
                };
            rec(0, std::vector<Integer>(q, Integer(1)));
        };

    enumerate(tree.root, [&](const std::vector<Integer>& m) {
        Integer z = 0;
        for (const auto& x : m) z += x;
        if (z == 0) return;  // boundary with no consistent extension
        Integer g = 0;
        for (const auto& x : m) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
        std::vector<Integer> key(m);
        for (auto& x : key) x /= g;
        acc[std::move(key)] += z;
        z_total += z;
    });

    if (z_total == 0) throw ModelContradiction("brute_force_residual: no boundary has positive weight");

    std::map<ProbVec, Rational> out;
    for (const auto& [key, z] : acc) {
        Integer s = 0;
        for (const auto& x : key) s += x;
        std::vector<Rational> eta(q);
        for (std::size_t a = 0; a < q; ++a) {
            eta[a] = Rational(key[a], s);
            eta[a].canonicalize();
        }
        Rational w(z, z_total);
        w.canonicalize();
        out.emplace(ProbVec(std::move(eta)), std::move(w));
    }
    return ResidualDistribution(std::move(out));
}

std::vector<Rational> depth_monotonicity_check(const std::vector<TreeInstance>& trees, std::size_t a, std::size_t b) {
    std::vector<Rational> out;
    out.reserve(trees.size());
    for (const TreeInstance& t : trees) {
        ResidualDistribution dist = brute_force_residual(t);
        ProbVec pi = dist.mean();
        if (sgn(pi[a]) == 0 || sgn(pi[b]) == 0)
            throw std::domain_error("depth_monotonicity_check: zero root marginal");
        Rational s = 0;
        for (const auto& [eta, w] : dist.support()) s += w * abs(eta[a] / pi[a] - eta[b] / pi[b]);
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace survey
