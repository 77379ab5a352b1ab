#pragma once

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "taylam/analysis.hpp"
#include "taylam/expansion.hpp"
#include "taylam/generators.hpp"

namespace taylam {

// Outcome record of one property-law run.
struct LawReport {
    std::string law;
    std::size_t cases_run = 0;
    std::vector<std::string> failures;
    std::uint64_t seed = 0;
    bool passed() const { return failures.empty(); }
};

namespace detail {

// --- shrinking ------------------------------------------------------------

inline bool term_self_contained(const Term& t, int depth) {
    switch (t.kind()) {
    case Term::Kind::Bound: return t.index() < depth;
    case Term::Kind::Free: return true;
    case Term::Kind::Lam: return term_self_contained(t.body(), depth + 1);
    case Term::Kind::App:
        return term_self_contained(t.fun(), depth) && term_self_contained(t.arg(), depth);
    }
    return true;
}

inline void collect_closed_subterms(const Term& t, int depth, std::vector<Term>& out) {
    switch (t.kind()) {
    case Term::Kind::Bound:
    case Term::Kind::Free: break;
    case Term::Kind::Lam:
        if (term_self_contained(t.body(), 0)) out.push_back(t.body());
        collect_closed_subterms(t.body(), depth + 1, out);
        break;
    case Term::Kind::App:
        if (term_self_contained(t.fun(), 0)) out.push_back(t.fun());
        if (term_self_contained(t.arg(), 0)) out.push_back(t.arg());
        collect_closed_subterms(t.fun(), depth, out);
        collect_closed_subterms(t.arg(), depth, out);
        break;
    }
}

inline bool rigid_self_contained(const RigidTerm& t, int depth) {
    switch (t.kind()) {
    case RigidTerm::Kind::Zero: return true;
    case RigidTerm::Kind::Bound: return t.index() < depth;
    case RigidTerm::Kind::Free: return true;
    case RigidTerm::Kind::Lam: return rigid_self_contained(t.body(), depth + 1);
    case RigidTerm::Kind::LinApp: {
        if (!rigid_self_contained(t.fun(), depth)) return false;
        for (const auto& a : t.args())
            if (!rigid_self_contained(a, depth)) return false;
        return true;
    }
    }
    return true;
}

inline void collect_rigid_subterms(const RigidTerm& t, std::vector<RigidTerm>& out) {
    switch (t.kind()) {
    case RigidTerm::Kind::Zero:
    case RigidTerm::Kind::Bound:
    case RigidTerm::Kind::Free: break;
    case RigidTerm::Kind::Lam:
        if (rigid_self_contained(t.body(), 0)) out.push_back(t.body());
        collect_rigid_subterms(t.body(), out);
        break;
    case RigidTerm::Kind::LinApp: {
        if (rigid_self_contained(t.fun(), 0)) out.push_back(t.fun());
        collect_rigid_subterms(t.fun(), out);
        for (std::size_t i = 0; i < t.args().size(); ++i) {
            const auto& a = t.args()[i];
            if (rigid_self_contained(a, 0)) out.push_back(a);
            collect_rigid_subterms(a, out);
            // Dropping one bag entry is also a valid smaller candidate.
            std::vector<RigidTerm> rest = t.args();
            rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(i));
            out.push_back(RigidTerm::lin_app(t.fun(), RigidMonomial::of(rest)));
        }
        break;
    }
    }
}

inline bool res_self_contained(const ResTerm& t, int depth) {
    switch (t.kind()) {
    case ResTerm::Kind::Bound: return t.index() < depth;
    case ResTerm::Kind::Free: return true;
    case ResTerm::Kind::Lam: return res_self_contained(t.body(), depth + 1);
    case ResTerm::Kind::MApp: {
        if (!res_self_contained(t.fun(), depth)) return false;
        for (const auto& u : t.bag_items())
            if (!res_self_contained(u, depth)) return false;
        return true;
    }
    }
    return true;
}

inline void collect_res_subterms(const ResTerm& t, std::vector<ResTerm>& out) {
    switch (t.kind()) {
    case ResTerm::Kind::Bound:
    case ResTerm::Kind::Free: break;
    case ResTerm::Kind::Lam:
        if (res_self_contained(t.body(), 0)) out.push_back(t.body());
        collect_res_subterms(t.body(), out);
        break;
    case ResTerm::Kind::MApp: {
        if (res_self_contained(t.fun(), 0)) out.push_back(t.fun());
        collect_res_subterms(t.fun(), out);
        ResMonomial bag = t.bag();
        for (std::size_t i = 0; i < bag.width(); ++i) {
            const auto& u = bag.items()[i];
            if (res_self_contained(u, 0)) out.push_back(u);
            collect_res_subterms(u, out);
            out.push_back(ResTerm::m_app(t.fun(), bag.without_index(i)));
        }
        break;
    }
    }
}

template <typename T, typename SubtermsFn, typename FailsFn>
T shrink_counterexample(T value, SubtermsFn&& subterms, FailsFn&& fails) {
    bool progress = true;
    while (progress) {
        progress = false;
        std::vector<T> candidates;
        subterms(value, candidates);
        std::sort(candidates.begin(), candidates.end(),
                  [](const T& a, const T& b) { return a.size() < b.size(); });
        for (const auto& cand : candidates) {
            if (cand.size() >= value.size()) break;
            if (fails(cand)) {
                value = cand;
                progress = true;
                break;
            }
        }
    }
    return value;
}

inline Term shrink_lambda_case(Term value, const std::function<bool(const Term&)>& fails) {
    return shrink_counterexample(
        std::move(value),
        [](const Term& t, std::vector<Term>& out) { collect_closed_subterms(t, 0, out); },
        fails);
}

inline RigidTerm shrink_rigid_case(RigidTerm value,
                                   const std::function<bool(const RigidTerm&)>& fails) {
    return shrink_counterexample(
        std::move(value),
        [](const RigidTerm& t, std::vector<RigidTerm>& out) { collect_rigid_subterms(t, out); },
        fails);
}

inline ResTerm shrink_res_case(ResTerm value,
                               const std::function<bool(const ResTerm&)>& fails) {
    return shrink_counterexample(
        std::move(value),
        [](const ResTerm& t, std::vector<ResTerm>& out) { collect_res_subterms(t, out); },
        fails);
}

// --- shared helpers ---------------------------------------------------------

inline Budget expansion_budget(const Term& m, std::size_t slack, std::size_t count) {
    return Budget(expansion_min_size(m) + slack, count, 1);
}

inline std::vector<ResTerm> eps_ne_support_successors(const ResTerm& t) {
    std::vector<ResTerm> out;
    for (const auto& sum : res_successors(t, ResStrategyKind::EpsilonNonErasing))
        for (const auto& [u, c] : sum.entries()) out.push_back(u);
    std::sort(out.begin(), out.end(), [](const ResTerm& a, const ResTerm& b) { return a < b; });
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// Singleton erasing reducts (coefficient one, one support term).
inline std::vector<ResTerm> erasing_term_successors(const ResTerm& t) {
    std::vector<ResTerm> out;
    for (const auto& sum : res_successors(t, ResStrategyKind::PartialErasing)) {
        if (sum.support_size() == 1 && sum.entries().begin()->second == 1)
            out.push_back(sum.entries().begin()->first);
    }
    std::sort(out.begin(), out.end(), [](const ResTerm& a, const ResTerm& b) { return a < b; });
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

} // namespace detail

namespace laws {

using CaseFailure = std::optional<std::string>;

// --- substitution commutes with rigid expansion -----------------------------

inline CaseFailure case_taysub(Rng& rng, std::size_t size_bound) {
    Term m = random_lambda_term(rng, size_bound);
    Term n = random_lambda_term(rng, std::max<std::size_t>(size_bound / 2, 3));
    NameId x = intern_name("x");
    Term subst = substitute(m, x, n);
    if (subst.size() > 42) return std::nullopt; // keep enumeration tractable
    Budget b(expansion_min_size(subst) + 4, 200000, 1);
    auto image = rigid_substitution_image(m, x, n, b);
    auto direct = rigid_expand(subst, b);
    std::sort(direct.begin(), direct.end(), [](const RigidTerm& a, const RigidTerm& c) {
        if (a.size() != c.size()) return a.size() < c.size();
        return a < c;
    });
    if (image != direct)
        return "substitution image differs from the expansion of the substituted term: m=" +
               render(m) + ", n=" + render(n);
    return std::nullopt;
}

// --- substitution commutes with the taylor support ---------------------------

inline CaseFailure case_subres(Rng& rng, std::size_t size_bound) {
    Term m = random_lambda_term(rng, std::max<std::size_t>(size_bound / 2, 4));
    Term n = random_lambda_term(rng, std::max<std::size_t>(size_bound / 3, 3));
    NameId x = intern_name("x");
    Term subst = substitute(m, x, n);
    if (subst.size() > 30) return std::nullopt;
    std::size_t cap = expansion_min_size(subst) + 6;
    Budget b(cap, 200000, 1);
    auto direct = taylor_support_expand(subst, b);
    std::sort(direct.begin(), direct.end(),
              [](const ResTerm& a, const ResTerm& c) { return a < c; });

    std::vector<ResTerm> image;
    auto sources = taylor_support_expand(m, b);
    auto values = taylor_support_expand(n, b);
    for (const auto& s : sources) {
        std::size_t uses = res_occurrences(s, x);
        std::size_t base = s.size() - uses;
        std::vector<ResTerm> chosen(uses, ResTerm::free_var(x));
        const std::function<void(std::size_t, std::size_t, std::size_t)> pick =
            [&](std::size_t i, std::size_t from, std::size_t used) {
                if (base + used > cap) return;
                if (i == uses) {
                    TermSum sum = n_linear_substitute(s, x, ResMonomial::of(chosen));
                    for (const auto& [u, c] : sum.entries())
                        if (u.size() <= cap) image.push_back(u);
                    return;
                }
                for (std::size_t j = from; j < values.size(); ++j) {
                    chosen[i] = values[j];
                    pick(i + 1, j, used + values[j].size());
                }
            };
        pick(0, 0, 0);
    }
    std::sort(image.begin(), image.end(), [](const ResTerm& a, const ResTerm& c) { return a < c; });
    image.erase(std::unique(image.begin(), image.end()), image.end());
    if (image != direct)
        return "n-linear substitution image differs from the support of the substituted term: m=" +
               render(m) + ", n=" + render(n);
    return std::nullopt;
}

// --- one-step anti-reduction --------------------------------------------------

inline CaseFailure case_antired1(Rng& rng, std::size_t size_bound) {
    Term m = random_lambda_term(rng, size_bound);
    auto steps = beta_step_candidates(m);
    if (steps.empty()) return std::nullopt;
    const LambdaStep& step = steps[rng.next(steps.size())];
    Term n = step.result;
    if (n.size() > 40) return std::nullopt;
    for (const auto& b : rigid_expand(n, detail::expansion_budget(n, 5, 200))) {
        auto a = rigid_anti_step(m, step, b);
        if (!a || !is_rigid_approximant(*a, m) || rigid_replay(*a, step) != b)
            return "no reducing preimage for " + render(b) + " along " + render(m) + " -> " +
                   render(n);
    }
    return std::nullopt;
}

// --- commutation of head reduction with the expansion ------------------------

inline CaseFailure case_commh(Rng& rng, std::size_t size_bound) {
    Term m = random_lambda_term(rng, size_bound);
    Term h = head_step(m);
    if (h.size() > 40) return std::nullopt;
    for (const auto& a : rigid_expand(m, detail::expansion_budget(m, 6, 400))) {
        RigidTerm fired = rigid_head_step(a);
        if (!fired.is_zero() && !is_rigid_approximant(fired, h))
            return "forward inclusion fails on " + render(a) + " of " + render(m);
    }
    for (const auto& b : rigid_expand(h, detail::expansion_budget(h, 5, 200))) {
        auto a = head_commutation_preimage(m, b);
        if (!a || !is_rigid_approximant(*a, m) || rigid_head_step(*a) != b)
            return "backward inclusion fails on " + render(b) + " of " + render(h) +
                   " (from " + render(m) + ")";
    }
    return std::nullopt;
}

// --- commutation of left-parallel reduction ----------------------------------

inline CaseFailure case_comml(Rng& rng, std::size_t size_bound) {
    Term m = random_lambda_term(rng, size_bound);
    Term l = left_parallel_step(m);
    if (l.size() > 40) return std::nullopt;
    for (const auto& a : rigid_expand(m, detail::expansion_budget(m, 6, 400))) {
        RigidTerm fired = rigid_left_parallel_step(a);
        if (!fired.is_zero() && !is_rigid_approximant(fired, l))
            return "forward inclusion fails on " + render(a) + " of " + render(m);
    }
    for (const auto& b : rigid_expand(l, detail::expansion_budget(l, 5, 200))) {
        auto a = left_commutation_preimage(m, b);
        if (!a || !is_rigid_approximant(*a, m) || rigid_left_parallel_step(*a) != b)
            return "backward inclusion fails on " + render(b) + " of " + render(l) +
                   " (from " + render(m) + ")";
    }
    return std::nullopt;
}

// --- a positive normal approximant forces a beta-normal form -----------------

inline CaseFailure case_forcingl(Rng& rng, std::size_t size_bound) {
    Term m = random_lambda_term(rng, size_bound);
    for (const auto& s : rigid_expand(m, detail::expansion_budget(m, 6, 400))) {
        if (is_positive_rigid(s) && is_rigid_normal(s) && !is_beta_normal_form(m))
            return "positive normal approximant " + render(s) +
                   " of a non-normal term " + render(m);
    }
    return std::nullopt;
}

// --- iterated left-parallel reduction reaches the normal form ----------------

inline CaseFailure case_standl(Rng& rng, std::size_t size_bound) {
    RigidTerm a = random_rigid_term(rng, std::max<std::size_t>(size_bound, 4));
    auto fails = [](const RigidTerm& t) {
        RigidTerm expected = r_normal_form(t);
        RigidTerm cur = t;
        for (std::size_t i = 0; i <= t.size() + 1; ++i) {
            if (cur == expected) return false;
            cur = rigid_left_parallel_step(cur);
        }
        return cur != expected;
    };
    if (fails(a)) {
        a = detail::shrink_rigid_case(a, fails);
        return "left-parallel iteration misses the normal form of " + render(a);
    }
    return std::nullopt;
}

// --- non-zero normal form gives a non-zero head-normal form ------------------

inline CaseFailure case_nftohnf(Rng& rng, std::size_t size_bound) {
    RigidTerm a = random_rigid_term(rng, std::max<std::size_t>(size_bound, 4));
    auto fails = [](const RigidTerm& t) {
        if (r_normal_form(t).is_zero()) return false;
        RigidTerm cur = t;
        for (std::size_t i = 0; i <= t.size() + 1; ++i) {
            RigidTerm next = rigid_head_step(cur);
            if (next == cur) break;
            cur = next;
        }
        return cur.is_zero() || !is_rigid_head_normal(cur) || rigid_head_step(cur) != cur;
    };
    if (fails(a)) {
        a = detail::shrink_rigid_case(a, fails);
        return "head reduction dies on " + render(a) + " despite a non-zero normal form";
    }
    return std::nullopt;
}

// --- subject expansion along non-erasing epsilon steps -----------------------

inline CaseFailure case_subject_expansion(Rng& rng, std::size_t size_bound) {
    Term m = random_lambda_term(rng, size_bound);
    auto steps = lambda_step_candidates(m, StrategyKind::EpsilonNonErasing);
    if (steps.empty()) return std::nullopt;
    const LambdaStep& step = steps[rng.next(steps.size())];
    Term n = step.result;
    if (n.size() > 30) return std::nullopt;
    for (const auto& t0 : taylor_support_expand(n, detail::expansion_budget(n, 5, 60))) {
        auto s = res_anti_step(m, step, t0);
        if (!s || !is_taylor_approximant(*s, m))
            return "no preimage approximant for " + render(t0) + " along " + render(m);
        TermSum sigma = mirror_lambda_step(*s, step);
        if (!sigma.contains(t0))
            return "mirrored reduction of " + render(*s) + " misses " + render(t0);
        for (const auto& [u, c] : sigma.entries())
            if (!is_taylor_approximant(u, n))
                return "mirrored reduction of " + render(*s) + " leaves the expansion of " +
                       render(n);
    }
    return std::nullopt;
}

// --- subject reduction along non-erasing epsilon steps -----------------------

inline CaseFailure case_subject_reduction(Rng& rng, std::size_t size_bound) {
    Term m = random_lambda_term(rng, size_bound);
    auto steps = lambda_step_candidates(m, StrategyKind::EpsilonNonErasing);
    if (steps.empty()) return std::nullopt;
    const LambdaStep& step = steps[rng.next(steps.size())];
    Term n = step.result;
    if (n.size() > 30) return std::nullopt;
    for (const auto& s : taylor_support_expand(m, detail::expansion_budget(m, 5, 100))) {
        TermSum sigma = mirror_lambda_step(s, step);
        for (const auto& [u, c] : sigma.entries())
            if (!is_taylor_approximant(u, n))
                return "reduct support of " + render(s) + " leaves the expansion of " +
                       render(n);
        if (step.path.empty()) {
            // The mirrored contraction is a single step; when the
            // approximant drops every copy of the bound variable it is an
            // erasing step, so check against the full epsilon relation.
            auto one = res_successors(s, ResStrategyKind::Partial);
            auto sig = res_successors(s, ResStrategyKind::PartialSigma1);
            one.insert(one.end(), sig.begin(), sig.end());
            if (std::find(one.begin(), one.end(), sigma) == one.end())
                return "base mirror of " + render(s) + " is not a one-step reduct";
            if (is_positive_res(s)) {
                auto ne = res_successors(s, ResStrategyKind::EpsilonNonErasing);
                if (std::find(ne.begin(), ne.end(), sigma) == ne.end())
                    return "base mirror of positive " + render(s) +
                           " is not a non-erasing step";
            }
        }
    }
    return std::nullopt;
}

// --- positivity is preserved by base steps -----------------------------------

inline CaseFailure case_pres(Rng& rng, std::size_t size_bound) {
    ResTerm s = random_positive_res_term(rng, std::max<std::size_t>(size_bound, 4));
    auto fails = [](const ResTerm& t) {
        if (!is_positive_res(t)) return false;
        for (const auto& sum : partial_successors(t))
            for (const auto& [u, c] : sum.entries())
                if (!is_positive_res(u)) return true;
        return false;
    };
    if (fails(s)) {
        s = detail::shrink_res_case(s, fails);
        return "a base step of " + render(s) + " loses positivity";
    }
    return std::nullopt;
}

// --- erasure-to-zero propagation ----------------------------------------------

inline CaseFailure case_epresnf(Rng& rng, std::size_t size_bound) {
    ResTerm s = random_res_term(rng, std::max<std::size_t>(size_bound, 4));
    auto fails = [](const ResTerm& t) {
        for (const auto& sigma : res_successors(t, ResStrategyKind::PartialErasing)) {
            if (sigma.is_zero()) continue;
            if (nf_eps_nonerasing(sigma).is_zero() && !nf_eps_nonerasing(t).is_zero())
                return true;
        }
        return false;
    };
    if (fails(s)) {
        s = detail::shrink_res_case(s, fails);
        return "erasing step of " + render(s) + " normalizes to zero but the term does not";
    }
    return std::nullopt;
}

// --- a normalizable term has a positive witness in its support ----------------

inline CaseFailure case_taysn(Rng& rng, std::size_t size_bound) {
    Term m = random_lambda_term(rng, std::min<std::size_t>(size_bound, 8));
    // Bounded search for a reachable non-erasing epsilon normal form,
    // remembering the step taken into every discovered term.
    struct NodeInfo {
        Term term;
        int parent;
        LambdaStep step;
    };
    std::vector<NodeInfo> nodes{{m, -1, LambdaStep{m, {}, StepRule::BetaNonErasing}}};
    std::map<Term, int> index{{m, 0}};
    std::deque<int> queue{0};
    int found = -1;
    while (!queue.empty() && nodes.size() < 220) {
        int cur = queue.front();
        queue.pop_front();
        Term t = nodes[cur].term;
        auto steps = lambda_step_candidates(t, StrategyKind::EpsilonNonErasing);
        if (steps.empty()) {
            found = cur;
            break;
        }
        for (const auto& step : steps) {
            if (step.result.size() > 26) continue;
            if (index.count(step.result)) continue;
            int id = static_cast<int>(nodes.size());
            nodes.push_back({step.result, cur, step});
            index.emplace(step.result, id);
            queue.push_back(id);
        }
    }
    if (found < 0) return std::nullopt; // no normal form within the search bound
    // Anti-reduce the positive skeleton of the normal form back to m.
    std::vector<int> path;
    for (int cur = found; cur > 0; cur = nodes[cur].parent) path.push_back(cur);
    ResTerm witness = positive_skeleton(nodes[found].term);
    for (int id : path) {
        auto s = res_anti_step(nodes[nodes[id].parent].term, nodes[id].step, witness);
        if (!s) return "anti-reduction chain breaks below " + render(nodes[id].term);
        witness = *s;
    }
    if (!is_taylor_approximant(witness, m))
        return "chained witness " + render(witness) + " does not approximate " + render(m);
    TermSum nf = nf_eps_nonerasing(witness);
    bool has_positive = false;
    for (const auto& [u, c] : nf.entries()) has_positive = has_positive || is_positive_res(u);
    if (!has_positive)
        return "witness " + render(witness) + " of " + render(m) +
               " has no positive normal support";
    return std::nullopt;
}

// --- strong normalization and confluence of the combined reduction -----------

inline CaseFailure case_snce(Rng& rng, std::size_t size_bound) {
    ResTerm s = random_res_term(rng, std::max<std::size_t>(size_bound, 4));
    std::set<TermSum> seen;
    std::vector<TermSum> order;
    std::deque<TermSum> queue{TermSum::of(s)};
    seen.insert(queue.front());
    std::map<TermSum, std::vector<TermSum>> edges;
    while (!queue.empty()) {
        if (seen.size() > 6000) return std::nullopt; // graph too large for this case
        TermSum cur = queue.front();
        queue.pop_front();
        order.push_back(cur);
        auto succ = sum_successors(cur, ResStrategyKind::EpsilonNonErasing);
        edges.emplace(cur, succ);
        for (const auto& next : succ)
            if (seen.insert(next).second) queue.push_back(next);
    }
    // A cycle would contradict strong normalization.
    std::map<TermSum, int> color;
    std::vector<std::pair<TermSum, std::size_t>> stack;
    for (const auto& root : order) {
        if (color.count(root)) continue;
        stack.push_back({root, 0});
        color[root] = 1;
        while (!stack.empty()) {
            auto& [t, idx] = stack.back();
            const auto& next = edges[t];
            if (idx == next.size()) {
                color[t] = 2;
                stack.pop_back();
                continue;
            }
            const TermSum& child = next[idx++];
            auto it = color.find(child);
            if (it == color.end()) {
                color[child] = 1;
                stack.push_back({child, 0});
            } else if (it->second == 1) {
                return "reduction cycle reachable from " + render(s);
            }
        }
    }
    std::set<TermSum> sinks;
    for (const auto& [t, succ] : edges)
        if (succ.empty()) sinks.insert(t);
    if (sinks.size() != 1)
        return "reduction graph of " + render(s) + " has " + std::to_string(sinks.size()) +
               " sinks";
    if (!(*sinks.begin() == nf_eps_nonerasing(s)))
        return "graph sink of " + render(s) + " is not the computed normal form";
    return std::nullopt;
}

// --- the parallel reduction has the diamond property --------------------------

inline CaseFailure case_parallel_confluence(Rng& rng, std::size_t size_bound) {
    ResTerm s = random_res_term(rng, std::min<std::size_t>(size_bound, 10));
    auto reducts = parallel_successors(s);
    if (reducts.size() > 48) return std::nullopt; // keep the pair set tractable
    // Parallel reducts of a sum: every copy steps independently.
    auto par_of_sum = [](const TermSum& sum) -> std::optional<std::vector<TermSum>> {
        std::vector<ResTerm> copies;
        for (const auto& [t, c] : sum.entries()) {
            if (c > 4) return std::nullopt;
            for (Coeff i = 0; i < c; ++i) copies.push_back(t);
        }
        if (copies.size() > 5) return std::nullopt;
        std::vector<TermSum> acc{TermSum{}};
        for (const auto& t : copies) {
            auto choices = parallel_successors(t);
            std::vector<TermSum> next;
            if (acc.size() * choices.size() > 4000) return std::nullopt;
            for (const auto& base : acc)
                for (const auto& choice : choices) next.push_back(base + choice);
            next = sorted_unique(std::move(next));
            acc = std::move(next);
        }
        return acc;
    };
    std::vector<std::vector<TermSum>> closures(reducts.size());
    for (std::size_t i = 0; i < reducts.size(); ++i) {
        auto c = par_of_sum(reducts[i]);
        if (!c) return std::nullopt;
        closures[i] = std::move(*c);
    }
    for (std::size_t i = 0; i < reducts.size(); ++i) {
        for (std::size_t j = i + 1; j < reducts.size(); ++j) {
            bool met = false;
            for (const auto& a : closures[i]) {
                if (std::binary_search(closures[j].begin(), closures[j].end(), a,
                                       [](const TermSum& x, const TermSum& y) { return x < y; })) {
                    met = true;
                    break;
                }
            }
            if (!met)
                return "diamond fails for " + render(s) + " between " + render(reducts[i]) +
                       " and " + render(reducts[j]);
        }
    }
    return std::nullopt;
}

// --- postponement of erasing steps ---------------------------------------------

// Full support closure under the non-erasing epsilon reduction; finite
// because that reduction is strongly normalizing.
inline std::optional<std::set<ResTerm>> eps_ne_support_closure(const ResTerm& start,
                                                               std::size_t node_cap) {
    std::set<ResTerm> seen{start};
    std::vector<ResTerm> frontier{start};
    while (!frontier.empty()) {
        ResTerm cur = frontier.back();
        frontier.pop_back();
        for (const auto& u : detail::eps_ne_support_successors(cur)) {
            if (seen.insert(u).second) frontier.push_back(u);
            if (seen.size() > node_cap) return std::nullopt;
        }
    }
    return seen;
}

inline CaseFailure postponement_impl(const ResTerm& s) {
    constexpr std::size_t kNodeCap = 20000;
    auto erasing_first = detail::erasing_term_successors(s);
    if (erasing_first.empty()) return std::nullopt;
    auto from_s = eps_ne_support_closure(s, kNodeCap);
    if (!from_s) return std::nullopt; // closure too large for this case
    for (const auto& t : erasing_first) {
        auto reachable = eps_ne_support_closure(t, kNodeCap);
        if (!reachable) continue;
        for (const auto& u : *reachable) {
            bool found = false;
            for (const auto& tp : *from_s) {
                auto er = detail::erasing_term_successors(tp);
                if (std::find(er.begin(), er.end(), u) != er.end()) {
                    found = true;
                    break;
                }
            }
            if (!found)
                return "erasing step cannot be postponed: s=" + render(s) + ", u=" + render(u);
        }
    }
    return std::nullopt;
}

inline CaseFailure case_postponement(Rng& rng, std::size_t size_bound) {
    ResTerm s = random_res_term(rng, std::min<std::size_t>(size_bound, 11));
    return postponement_impl(s);
}

inline std::set<RigidTerm> rigid_eps_ne_closure(const RigidTerm& start) {
    std::set<RigidTerm> seen{start};
    std::vector<RigidTerm> frontier{start};
    while (!frontier.empty()) {
        RigidTerm cur = frontier.back();
        frontier.pop_back();
        for (const auto& u : rigid_successors(cur, RigidStrategy::EpsilonNonErasing)) {
            if (u.is_zero()) continue;
            if (seen.insert(u).second) frontier.push_back(u);
        }
    }
    return seen;
}

inline CaseFailure rigid_postponement_impl(const RigidTerm& s) {
    auto erasing = [](const RigidTerm& t) {
        std::vector<RigidTerm> out;
        for (const auto& u : rigid_successors(t, RigidStrategy::Erasing))
            if (!u.is_zero()) out.push_back(u);
        return out;
    };
    auto erasing_first = erasing(s);
    if (erasing_first.empty()) return std::nullopt;
    std::set<RigidTerm> from_s = rigid_eps_ne_closure(s);
    for (const auto& t : erasing_first) {
        for (const auto& u : rigid_eps_ne_closure(t)) {
            bool found = false;
            for (const auto& tp : from_s) {
                auto er = erasing(tp);
                if (std::find(er.begin(), er.end(), u) != er.end()) {
                    found = true;
                    break;
                }
            }
            if (!found)
                return "erasing step cannot be postponed: s=" + render(s) + ", u=" + render(u);
        }
    }
    return std::nullopt;
}

inline CaseFailure case_rigid_postponement(Rng& rng, std::size_t size_bound) {
    RigidTerm s = random_rigid_term(rng, std::min<std::size_t>(size_bound, 12));
    return rigid_postponement_impl(s);
}

// --- the fixed confluence-failure instance -------------------------------------

struct NamedSequence {
    std::string label;
    std::vector<RigidTerm> steps;
};

// The two reduction sequences of the fixed instance: rearranging first ends
// in zero, reducing first ends in a non-zero normal form.
inline std::vector<NamedSequence> rigid_confluence_failure_sequences() {
    auto R = [](const char* text) { return parse_rigid_term(text); };
    RigidTerm s = R("<\\y. <<\\x. <x>(x)>(y, y)>(y)>(\\f. <z>(f), \\f. <z>(), \\f. <z>())");
    NamedSequence zero{"rearrange-first", {}};
    zero.steps = {
        s,
        R("<\\y. <\\x. <<x>(x)>(y)>(y, y)>(\\f. <z>(f), \\f. <z>(), \\f. <z>())"),
        R("<\\x. <<x>(x)>(\\f. <z>(f))>(\\f. <z>(), \\f. <z>())"),
        R("<<\\f. <z>()>(\\f. <z>())>(\\f. <z>(f))"),
        RigidTerm::zero(),
    };
    NamedSequence nonzero{"reduce-first", {}};
    nonzero.steps = {
        s,
        R("<<\\x. <x>(x)>(\\f. <z>(f), \\f. <z>())>(\\f. <z>())"),
        R("<\\x. <<x>(x)>(\\f. <z>())>(\\f. <z>(f), \\f. <z>())"),
        R("<<\\f. <z>(f)>(\\f. <z>())>(\\f. <z>())"),
        R("<<z>(\\f. <z>())>(\\f. <z>())"),
    };
    return {zero, nonzero};
}

inline CaseFailure case_rigid_confluence_failure(Rng&, std::size_t) {
    auto sequences = rigid_confluence_failure_sequences();
    if (sequences.size() != 2) return "expected two sequences";
    if (!(sequences[0].steps.front() == sequences[1].steps.front()))
        return "sequences start from different terms";
    for (const auto& seq : sequences) {
        for (std::size_t i = 0; i + 1 < seq.steps.size(); ++i) {
            auto base = r_successors(seq.steps[i]);
            auto rearranged = rigid_sigma1_successors(seq.steps[i]);
            bool ok = std::find(base.begin(), base.end(), seq.steps[i + 1]) != base.end() ||
                      std::find(rearranged.begin(), rearranged.end(), seq.steps[i + 1]) !=
                          rearranged.end();
            if (!ok)
                return seq.label + ": step " + std::to_string(i) + " is not a valid reduction";
        }
    }
    const RigidTerm& zero_end = sequences[0].steps.back();
    const RigidTerm& nonzero_end = sequences[1].steps.back();
    if (!zero_end.is_zero()) return "rearrange-first run does not end in zero";
    if (nonzero_end.is_zero() || !r_successors(nonzero_end).empty() ||
        !rigid_sigma1_successors(nonzero_end).empty())
        return "reduce-first run does not end in a non-zero normal form";
    return std::nullopt;
}

} // namespace laws

using laws::NamedSequence;
using laws::rigid_confluence_failure_sequences;

// ---------------------------------------------------------------------------
// Registry
// ---------------------------------------------------------------------------

namespace detail {

using LawCase = laws::CaseFailure (*)(Rng&, std::size_t);

inline const std::map<std::string, LawCase>& law_registry() {
    static const std::map<std::string, LawCase> registry = {
        {"taysub", laws::case_taysub},
        {"subres", laws::case_subres},
        {"antired1", laws::case_antired1},
        {"commh", laws::case_commh},
        {"comml", laws::case_comml},
        {"forcingl", laws::case_forcingl},
        {"standl", laws::case_standl},
        {"nftohnf", laws::case_nftohnf},
        {"subject-expansion", laws::case_subject_expansion},
        {"subject-reduction", laws::case_subject_reduction},
        {"pres", laws::case_pres},
        {"epresnf", laws::case_epresnf},
        {"taysn", laws::case_taysn},
        {"snce", laws::case_snce},
        {"parallel-confluence", laws::case_parallel_confluence},
        {"postponement", laws::case_postponement},
        {"rigid-postponement", laws::case_rigid_postponement},
        {"rigid-confluence-failure", laws::case_rigid_confluence_failure},
    };
    return registry;
}

inline std::string normalize_law_name(std::string_view name) {
    std::string out;
    for (char c : name) out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

} // namespace detail

inline std::vector<std::string> registered_laws() {
    std::vector<std::string> names;
    for (const auto& [name, fn] : detail::law_registry()) names.push_back(name);
    return names;
}

// Runs the law's bounded statement on `cases` reproducible random instances.
inline LawReport check_law(std::string_view law, std::size_t cases, std::uint64_t seed,
                           std::size_t size_bound) {
    std::string key = detail::normalize_law_name(law);
    const auto& registry = detail::law_registry();
    auto it = registry.find(key);
    if (it == registry.end()) throw std::invalid_argument("unknown law: " + std::string(law));
    LawReport report;
    report.law = key;
    report.seed = seed;
    Rng rng(seed);
    std::size_t total = key == "rigid-confluence-failure" ? 1 : cases;
    for (std::size_t i = 0; i < total; ++i) {
        ++report.cases_run;
        if (auto failure = it->second(rng, size_bound)) report.failures.push_back(*failure);
        if (report.failures.size() >= 10) break;
    }
    return report;
}

} // namespace taylam
