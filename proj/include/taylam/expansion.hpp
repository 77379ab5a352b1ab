#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "taylam/resource.hpp"
#include "taylam/rigid.hpp"
#include "taylam/syntax.hpp"

namespace taylam {

// Search limits for expansion enumeration and the analyses built on it.
struct Budget {
    std::size_t max_size = 12;
    std::size_t max_count = 5000;
    std::size_t max_steps = 200;

    Budget() = default;
    Budget(std::size_t size, std::size_t count, std::size_t steps)
        : max_size(size), max_count(count), max_steps(steps) {
        if (size < 1 || count < 1 || steps < 1)
            throw std::invalid_argument("budget bounds must be at least 1");
    }
};

// Size of the smallest approximant (every argument list empty).
inline std::size_t expansion_min_size(const Term& m) {
    switch (m.kind()) {
    case Term::Kind::Bound:
    case Term::Kind::Free: return 1;
    case Term::Kind::Lam: return 1 + expansion_min_size(m.body());
    case Term::Kind::App: return 1 + expansion_min_size(m.fun());
    }
    return 1;
}

// ---------------------------------------------------------------------------
// Enumeration of the rigid expansion, stratified by exact size
// ---------------------------------------------------------------------------

namespace detail {

struct TermSizeKey {
    Term term;
    std::size_t size;
    bool operator==(const TermSizeKey& o) const { return size == o.size && term == o.term; }
};
struct TermSizeKeyHash {
    std::size_t operator()(const TermSizeKey& k) const { return k.term.hash() * 31 + k.size; }
};

class RigidExpander {
public:
    const std::vector<RigidTerm>& exact(const Term& m, std::size_t n) {
        TermSizeKey key{m, n};
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
        std::vector<RigidTerm> out;
        switch (m.kind()) {
        case Term::Kind::Bound:
            if (n == 1) out.push_back(RigidTerm::bound(m.index()));
            break;
        case Term::Kind::Free:
            if (n == 1) out.push_back(RigidTerm::free_var(m.name()));
            break;
        case Term::Kind::Lam:
            if (n >= 2)
                for (const auto& b : exact(m.body(), n - 1)) out.push_back(RigidTerm::lam(b));
            break;
        case Term::Kind::App: {
            for (std::size_t fun_size = 1; fun_size + 1 <= n; ++fun_size) {
                const auto& funs = exact(m.fun(), fun_size);
                if (funs.empty()) continue;
                std::size_t arg_size = n - 1 - fun_size;
                const auto& tuples = arg_tuples(m.arg(), arg_size);
                for (const auto& f : funs)
                    for (const auto& tuple : tuples)
                        out.push_back(RigidTerm::lin_app(f, RigidMonomial::of(tuple)));
            }
            break;
        }
        }
        std::sort(out.begin(), out.end(),
                  [](const RigidTerm& a, const RigidTerm& b) { return a < b; });
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return memo_.emplace(std::move(key), std::move(out)).first->second;
    }

    // All ordered lists of approximants of q with the given total size.
    const std::vector<std::vector<RigidTerm>>& arg_tuples(const Term& q, std::size_t total) {
        TermSizeKey key{q, total};
        auto it = tuple_memo_.find(key);
        if (it != tuple_memo_.end()) return it->second;
        std::vector<std::vector<RigidTerm>> out;
        if (total == 0) {
            out.push_back({});
        } else {
            for (std::size_t first = 1; first <= total; ++first) {
                const auto& heads = exact(q, first);
                if (heads.empty()) continue;
                const auto& rests = arg_tuples(q, total - first);
                for (const auto& h : heads) {
                    for (const auto& rest : rests) {
                        std::vector<RigidTerm> tuple;
                        tuple.reserve(1 + rest.size());
                        tuple.push_back(h);
                        tuple.insert(tuple.end(), rest.begin(), rest.end());
                        out.push_back(std::move(tuple));
                    }
                }
            }
        }
        return tuple_memo_.emplace(std::move(key), std::move(out)).first->second;
    }

private:
    std::unordered_map<TermSizeKey, std::vector<RigidTerm>, TermSizeKeyHash> memo_;
    std::unordered_map<TermSizeKey, std::vector<std::vector<RigidTerm>>, TermSizeKeyHash>
        tuple_memo_;
};

class TaylorExpander {
public:
    const std::vector<ResTerm>& exact(const Term& m, std::size_t n) {
        TermSizeKey key{m, n};
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
        std::vector<ResTerm> out;
        switch (m.kind()) {
        case Term::Kind::Bound:
            if (n == 1) out.push_back(ResTerm::bound(m.index()));
            break;
        case Term::Kind::Free:
            if (n == 1) out.push_back(ResTerm::free_var(m.name()));
            break;
        case Term::Kind::Lam:
            if (n >= 2)
                for (const auto& b : exact(m.body(), n - 1)) out.push_back(ResTerm::lam(b));
            break;
        case Term::Kind::App: {
            for (std::size_t fun_size = 1; fun_size + 1 <= n; ++fun_size) {
                const auto& funs = exact(m.fun(), fun_size);
                if (funs.empty()) continue;
                std::size_t arg_size = n - 1 - fun_size;
                const auto& bags = arg_bags(m.arg(), arg_size);
                for (const auto& f : funs)
                    for (const auto& bag : bags) out.push_back(ResTerm::m_app(f, bag));
            }
            break;
        }
        }
        std::sort(out.begin(), out.end(), [](const ResTerm& a, const ResTerm& b) { return a < b; });
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return memo_.emplace(std::move(key), std::move(out)).first->second;
    }

    // All bags (multisets) of approximants of q with the given total size.
    const std::vector<ResMonomial>& arg_bags(const Term& q, std::size_t total) {
        TermSizeKey key{q, total};
        auto it = bag_memo_.find(key);
        if (it != bag_memo_.end()) return it->second;
        std::vector<ResMonomial> out;
        if (total == 0) {
            out.push_back(ResMonomial());
        } else {
            for (std::size_t first = 1; first <= total; ++first) {
                const auto& heads = exact(q, first);
                if (heads.empty()) continue;
                const auto& rests = arg_bags(q, total - first);
                for (const auto& h : heads)
                    for (const auto& rest : rests) out.push_back(rest.with(h));
            }
        }
        std::sort(out.begin(), out.end(),
                  [](const ResMonomial& a, const ResMonomial& b) { return a < b; });
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return bag_memo_.emplace(std::move(key), std::move(out)).first->second;
    }

private:
    std::unordered_map<TermSizeKey, std::vector<ResTerm>, TermSizeKeyHash> memo_;
    std::unordered_map<TermSizeKey, std::vector<ResMonomial>, TermSizeKeyHash> bag_memo_;
};

} // namespace detail

// Elements of the rigid expansion of m with size up to the budget, in
// increasing size then canonical structural order, truncated to max_count.
inline std::vector<RigidTerm> rigid_expand(const Term& m, const Budget& budget) {
    detail::RigidExpander expander;
    std::vector<RigidTerm> out;
    for (std::size_t n = expansion_min_size(m); n <= budget.max_size; ++n) {
        for (const auto& a : expander.exact(m, n)) {
            if (out.size() >= budget.max_count) return out;
            out.push_back(a);
        }
    }
    return out;
}

// The Taylor expansion support (multiset images), deduplicated, same order.
inline std::vector<ResTerm> taylor_support_expand(const Term& m, const Budget& budget) {
    detail::TaylorExpander expander;
    std::vector<ResTerm> out;
    for (std::size_t n = expansion_min_size(m); n <= budget.max_size; ++n) {
        for (const auto& s : expander.exact(m, n)) {
            if (out.size() >= budget.max_count) return out;
            out.push_back(s);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Membership tests (structural, no enumeration)
// ---------------------------------------------------------------------------

inline bool is_rigid_approximant(const RigidTerm& a, const Term& m) {
    switch (a.kind()) {
    case RigidTerm::Kind::Zero: return false;
    case RigidTerm::Kind::Bound:
        return m.kind() == Term::Kind::Bound && m.index() == a.index();
    case RigidTerm::Kind::Free:
        return m.kind() == Term::Kind::Free && m.name() == a.name();
    case RigidTerm::Kind::Lam:
        return m.kind() == Term::Kind::Lam && is_rigid_approximant(a.body(), m.body());
    case RigidTerm::Kind::LinApp: {
        if (m.kind() != Term::Kind::App) return false;
        if (!is_rigid_approximant(a.fun(), m.fun())) return false;
        for (const auto& d : a.args())
            if (!is_rigid_approximant(d, m.arg())) return false;
        return true;
    }
    }
    return false;
}

inline bool is_taylor_approximant(const ResTerm& s, const Term& m) {
    switch (s.kind()) {
    case ResTerm::Kind::Bound:
        return m.kind() == Term::Kind::Bound && m.index() == s.index();
    case ResTerm::Kind::Free:
        return m.kind() == Term::Kind::Free && m.name() == s.name();
    case ResTerm::Kind::Lam:
        return m.kind() == Term::Kind::Lam && is_taylor_approximant(s.body(), m.body());
    case ResTerm::Kind::MApp: {
        if (m.kind() != Term::Kind::App) return false;
        if (!is_taylor_approximant(s.fun(), m.fun())) return false;
        for (const auto& t : s.bag_items())
            if (!is_taylor_approximant(t, m.arg())) return false;
        return true;
    }
    }
    return false;
}

// ---------------------------------------------------------------------------
// The representation relation and its canonical section
// ---------------------------------------------------------------------------

inline bool represents(const RigidTerm& a, const ResTerm& s);

// List-vs-multiset matching: some permutation pairs each list entry with a
// distinct bag entry it represents.
inline bool represents(const RigidMonomial& a, const ResMonomial& s) {
    if (a.is_zero()) return false;
    if (a.width() != s.width()) return false;
    std::vector<bool> used(s.width(), false);
    const std::function<bool(std::size_t)> match = [&](std::size_t i) -> bool {
        if (i == a.width()) return true;
        for (std::size_t j = 0; j < s.width(); ++j) {
            if (used[j]) continue;
            if (!represents(a.items()[i], s.items()[j])) continue;
            used[j] = true;
            if (match(i + 1)) return true;
            used[j] = false;
        }
        return false;
    };
    return match(0);
}

inline bool represents(const RigidTerm& a, const ResTerm& s) {
    switch (a.kind()) {
    case RigidTerm::Kind::Zero: return false;
    case RigidTerm::Kind::Bound:
        return s.kind() == ResTerm::Kind::Bound && s.index() == a.index();
    case RigidTerm::Kind::Free:
        return s.kind() == ResTerm::Kind::Free && s.name() == a.name();
    case RigidTerm::Kind::Lam:
        return s.kind() == ResTerm::Kind::Lam && represents(a.body(), s.body());
    case RigidTerm::Kind::LinApp:
        return s.kind() == ResTerm::Kind::MApp && represents(a.fun(), s.fun()) &&
               represents(RigidMonomial::of(a.args()), s.bag());
    }
    return false;
}

// Forgets list order everywhere; the unique multiset term represented by a.
inline ResTerm forget(const RigidTerm& a) {
    switch (a.kind()) {
    case RigidTerm::Kind::Zero: throw std::invalid_argument("zero has no multiset image");
    case RigidTerm::Kind::Bound: return ResTerm::bound(a.index());
    case RigidTerm::Kind::Free: return ResTerm::free_var(a.name());
    case RigidTerm::Kind::Lam: return ResTerm::lam(forget(a.body()));
    case RigidTerm::Kind::LinApp: {
        std::vector<ResTerm> bag;
        bag.reserve(a.args().size());
        for (const auto& d : a.args()) bag.push_back(forget(d));
        return ResTerm::m_app(forget(a.fun()), ResMonomial::of(bag));
    }
    }
    throw std::logic_error("unreachable");
}

inline ResMonomial forget(const RigidMonomial& a) {
    if (a.is_zero()) throw std::invalid_argument("zero has no multiset image");
    std::vector<ResTerm> bag;
    bag.reserve(a.width());
    for (const auto& d : a.items()) bag.push_back(forget(d));
    return ResMonomial::of(bag);
}

// ---------------------------------------------------------------------------
// The image of a rigid expansion under substitution
// ---------------------------------------------------------------------------

// { a[bag/x] | a approximates m, bag over the expansion of n }, kept to
// results within the size budget; with a large enough max_count this is
// exactly the bounded expansion of m[n/x].
inline std::vector<RigidTerm> rigid_substitution_image(const Term& m, NameId x, const Term& n,
                                                       const Budget& budget) {
    std::vector<RigidTerm> image;
    std::vector<RigidTerm> ms = rigid_expand(m, Budget(budget.max_size, budget.max_count,
                                                       budget.max_steps));
    std::vector<RigidTerm> ns = rigid_expand(n, Budget(budget.max_size, budget.max_count,
                                                       budget.max_steps));
    for (const auto& a : ms) {
        std::size_t uses = occurrences(a, x);
        std::size_t base = a.size() - uses; // target occurrences are replaced
        // Choose an ordered tuple of substituends within the size budget.
        std::vector<RigidTerm> chosen(uses, RigidTerm::zero());
        const std::function<void(std::size_t, std::size_t)> pick = [&](std::size_t i,
                                                                       std::size_t used_size) {
            if (base + used_size > budget.max_size) return;
            if (i == uses) {
                RigidTerm r = rigid_substitute(a, x, RigidMonomial::of(chosen));
                if (!r.is_zero() && r.size() <= budget.max_size) image.push_back(r);
                return;
            }
            for (const auto& b : ns) {
                chosen[i] = b;
                pick(i + 1, used_size + b.size());
            }
        };
        pick(0, 0);
        if (image.size() > budget.max_count * 4) break; // generous pre-truncation guard
    }
    std::sort(image.begin(), image.end(), [](const RigidTerm& a, const RigidTerm& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        return a < b;
    });
    image.erase(std::unique(image.begin(), image.end()), image.end());
    if (image.size() > budget.max_count) image.resize(budget.max_count);
    return image;
}

// ---------------------------------------------------------------------------
// Constructive witnesses: substitution decomposition, anti-reduction
// preimages, and step mirrors used by the metatheory harness
// ---------------------------------------------------------------------------

namespace detail {

// Inverse of the positional substitution along a beta step: splits an
// approximant of body[arg/x] into an approximant of the body plus the list
// of argument approximants, collected in reading order.
struct RigidSubstDecomposition {
    RigidTerm body_part;
    std::vector<RigidTerm> bag;
};

inline std::optional<RigidTerm> rigid_decompose_rec(const Term& body, const Term& arg,
                                                    const RigidTerm& b, int depth,
                                                    std::vector<RigidTerm>& bag) {
    switch (body.kind()) {
    case Term::Kind::Bound: {
        int i = body.index();
        if (i == depth) {
            // This position received shift(arg, depth); recover the original.
            bag.push_back(rigid_shift(b, -depth));
            return RigidTerm::bound(depth);
        }
        int expected = i > depth ? i - 1 : i;
        if (b.kind() != RigidTerm::Kind::Bound || b.index() != expected) return std::nullopt;
        return RigidTerm::bound(i);
    }
    case Term::Kind::Free:
        if (b.kind() != RigidTerm::Kind::Free || b.name() != body.name()) return std::nullopt;
        return b;
    case Term::Kind::Lam: {
        if (b.kind() != RigidTerm::Kind::Lam) return std::nullopt;
        auto inner = rigid_decompose_rec(body.body(), arg, b.body(), depth + 1, bag);
        if (!inner) return std::nullopt;
        return RigidTerm::lam(*inner);
    }
    case Term::Kind::App: {
        if (b.kind() != RigidTerm::Kind::LinApp) return std::nullopt;
        auto fun = rigid_decompose_rec(body.fun(), arg, b.fun(), depth, bag);
        if (!fun) return std::nullopt;
        std::vector<RigidTerm> items;
        items.reserve(b.args().size());
        for (const auto& d : b.args()) {
            auto e = rigid_decompose_rec(body.arg(), arg, d, depth, bag);
            if (!e) return std::nullopt;
            items.push_back(*e);
        }
        return RigidTerm::lin_app(*fun, RigidMonomial::of(items));
    }
    }
    return std::nullopt;
}

inline std::optional<RigidSubstDecomposition>
rigid_decompose_subst(const Term& body, const Term& arg, const RigidTerm& b) {
    std::vector<RigidTerm> bag;
    auto part = rigid_decompose_rec(body, arg, b, 0, bag);
    if (!part) return std::nullopt;
    return RigidSubstDecomposition{*part, std::move(bag)};
}

} // namespace detail

// Preimage along a single beta or sigma1 step: an approximant of the step's
// source whose reduction (rigid_anti_replay) reaches b.
inline std::optional<RigidTerm> rigid_anti_step(const Term& source, const LambdaStep& step,
                                                const RigidTerm& b, std::size_t path_index = 0) {
    if (path_index == step.path.size()) {
        switch (step.rule) {
        case StepRule::BetaNonErasing:
        case StepRule::BetaErasing: {
            if (!is_redex(source)) return std::nullopt;
            auto dec = detail::rigid_decompose_subst(source.fun().body(), source.arg(), b);
            if (!dec) return std::nullopt;
            return RigidTerm::lin_app(RigidTerm::lam(dec->body_part),
                                      RigidMonomial::of(dec->bag));
        }
        case StepRule::Sigma1: {
            // b approximates (\x. <inner> P') N; source is ((\x. inner) N) P.
            if (b.kind() != RigidTerm::Kind::LinApp ||
                b.fun().kind() != RigidTerm::Kind::Lam ||
                b.fun().body().kind() != RigidTerm::Kind::LinApp)
                return std::nullopt;
            RigidTerm inner = b.fun().body().fun();
            RigidMonomial outer_args =
                detail::rigid_shift(RigidMonomial::of(b.fun().body().args()), -1);
            RigidMonomial n_args = RigidMonomial::of(b.args());
            return RigidTerm::lin_app(RigidTerm::lin_app(RigidTerm::lam(inner), n_args),
                                      outer_args);
        }
        }
        return std::nullopt;
    }
    switch (step.path[path_index]) {
    case StepDir::LamBody: {
        if (source.kind() != Term::Kind::Lam || b.kind() != RigidTerm::Kind::Lam)
            return std::nullopt;
        auto inner = rigid_anti_step(source.body(), step, b.body(), path_index + 1);
        if (!inner) return std::nullopt;
        return RigidTerm::lam(*inner);
    }
    case StepDir::AppFun: {
        if (source.kind() != Term::Kind::App || b.kind() != RigidTerm::Kind::LinApp)
            return std::nullopt;
        auto fun = rigid_anti_step(source.fun(), step, b.fun(), path_index + 1);
        if (!fun) return std::nullopt;
        return RigidTerm::lin_app(*fun, RigidMonomial::of(b.args()));
    }
    case StepDir::AppArg: {
        if (source.kind() != Term::Kind::App || b.kind() != RigidTerm::Kind::LinApp)
            return std::nullopt;
        std::vector<RigidTerm> items;
        items.reserve(b.args().size());
        for (const auto& d : b.args()) {
            auto e = rigid_anti_step(source.arg(), step, d, path_index + 1);
            if (!e) return std::nullopt;
            items.push_back(*e);
        }
        return RigidTerm::lin_app(b.fun(), RigidMonomial::of(items));
    }
    }
    return std::nullopt;
}

// Replays the lambda step on a rigid approximant of the step's source (one
// contraction per affected copy; every firing is a plain ->r or sigma1 step).
inline RigidTerm rigid_replay(const RigidTerm& a, const LambdaStep& step,
                              std::size_t path_index = 0) {
    if (path_index == step.path.size()) {
        switch (step.rule) {
        case StepRule::BetaNonErasing:
        case StepRule::BetaErasing:
            return rigid_beta_contract(a.fun().body(), RigidMonomial::of(a.args()));
        case StepRule::Sigma1: return detail::rigid_sigma1_fire(a);
        }
        return a;
    }
    switch (step.path[path_index]) {
    case StepDir::LamBody: return RigidTerm::lam(rigid_replay(a.body(), step, path_index + 1));
    case StepDir::AppFun:
        return RigidTerm::lin_app(rigid_replay(a.fun(), step, path_index + 1),
                                  RigidMonomial::of(a.args()));
    case StepDir::AppArg: {
        std::vector<RigidTerm> items;
        items.reserve(a.args().size());
        for (const auto& d : a.args()) items.push_back(rigid_replay(d, step, path_index + 1));
        return RigidTerm::lin_app(a.fun(), RigidMonomial::of(items));
    }
    }
    return a;
}

// Preimage of a head-reduction step: a in the expansion of m with
// rigid_head_step(a) equal to b, following the head-reduction case split.
inline std::optional<RigidTerm> head_commutation_preimage(const Term& m, const RigidTerm& b) {
    if (is_head_normal_form(m)) return b;
    if (m.kind() == Term::Kind::Lam) {
        if (b.kind() != RigidTerm::Kind::Lam) return std::nullopt;
        auto inner = head_commutation_preimage(m.body(), b.body());
        if (!inner) return std::nullopt;
        return RigidTerm::lam(*inner);
    }
    if (m.kind() == Term::Kind::App) {
        HeadDecomposition d = head_decompose(m);
        if (d.core_is_redex && d.args.empty() && m == d.core) {
            auto dec = detail::rigid_decompose_subst(m.fun().body(), m.arg(), b);
            if (!dec) return std::nullopt;
            return RigidTerm::lin_app(RigidTerm::lam(dec->body_part),
                                      RigidMonomial::of(dec->bag));
        }
        // Peel one spine application: the head step happens in the function.
        if (b.kind() != RigidTerm::Kind::LinApp) return std::nullopt;
        auto fun = head_commutation_preimage(m.fun(), b.fun());
        if (!fun) return std::nullopt;
        return RigidTerm::lin_app(*fun, RigidMonomial::of(b.args()));
    }
    return std::nullopt;
}

// Preimage of a left-parallel step: a in the expansion of m with
// rigid_left_parallel_step(a) equal to b.
inline std::optional<RigidTerm> left_commutation_preimage(const Term& m, const RigidTerm& b) {
    if (is_beta_normal_form(m)) return b;
    HeadDecomposition d = head_decompose(m);
    if (d.core_is_redex) return head_commutation_preimage(m, b);
    // Head-normal, not normal: the step maps over the argument approximants.
    if (m.kind() == Term::Kind::Lam) {
        if (b.kind() != RigidTerm::Kind::Lam) return std::nullopt;
        auto inner = left_commutation_preimage(m.body(), b.body());
        if (!inner) return std::nullopt;
        return RigidTerm::lam(*inner);
    }
    if (m.kind() == Term::Kind::App) {
        if (b.kind() != RigidTerm::Kind::LinApp) return std::nullopt;
        auto fun = left_commutation_preimage(m.fun(), b.fun());
        if (!fun) return std::nullopt;
        std::vector<RigidTerm> items;
        items.reserve(b.args().size());
        for (const auto& e : b.args()) {
            auto inner = left_commutation_preimage(m.arg(), e);
            if (!inner) return std::nullopt;
            items.push_back(*inner);
        }
        return RigidTerm::lin_app(*fun, RigidMonomial::of(items));
    }
    if (m.kind() == Term::Kind::Bound)
        return b.kind() == RigidTerm::Kind::Bound && b.index() == m.index()
                   ? std::optional<RigidTerm>(b)
                   : std::nullopt;
    if (m.kind() == Term::Kind::Free)
        return b.kind() == RigidTerm::Kind::Free && b.name() == m.name()
                   ? std::optional<RigidTerm>(b)
                   : std::nullopt;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Multiset-side mirrors and preimages
// ---------------------------------------------------------------------------

// Fires the resource steps matching one lambda step on an approximant of the
// step's source; the supports of the result approximate the step's target.
inline TermSum mirror_lambda_step(const ResTerm& s, const LambdaStep& step,
                                  std::size_t path_index = 0) {
    if (path_index == step.path.size()) {
        switch (step.rule) {
        case StepRule::BetaNonErasing:
        case StepRule::BetaErasing: return res_beta_fire(s);
        case StepRule::Sigma1: return TermSum::of(res_sigma1_fire(s));
        }
        return TermSum::of(s);
    }
    switch (step.path[path_index]) {
    case StepDir::LamBody: return lam_sum(mirror_lambda_step(s.body(), step, path_index + 1));
    case StepDir::AppFun:
        return app_sum(mirror_lambda_step(s.fun(), step, path_index + 1), MonoSum::of(s.bag()));
    case StepDir::AppArg: {
        MonoSum bags = MonoSum::of(ResMonomial());
        for (const auto& t : s.bag_items())
            bags = cons_sum(mirror_lambda_step(t, step, path_index + 1), bags);
        return app_sum(TermSum::of(s.fun()), bags);
    }
    }
    return TermSum::of(s);
}

namespace detail {

struct ResSubstDecomposition {
    ResTerm body_part;
    std::vector<ResTerm> bag;
};

inline std::optional<ResTerm> res_decompose_rec(const Term& body, const ResTerm& t, int depth,
                                                std::vector<ResTerm>& bag) {
    switch (body.kind()) {
    case Term::Kind::Bound: {
        int i = body.index();
        if (i == depth) {
            bag.push_back(res_shift(t, -depth));
            return ResTerm::bound(depth);
        }
        int expected = i > depth ? i - 1 : i;
        if (t.kind() != ResTerm::Kind::Bound || t.index() != expected) return std::nullopt;
        return ResTerm::bound(i);
    }
    case Term::Kind::Free:
        if (t.kind() != ResTerm::Kind::Free || t.name() != body.name()) return std::nullopt;
        return t;
    case Term::Kind::Lam: {
        if (t.kind() != ResTerm::Kind::Lam) return std::nullopt;
        auto inner = res_decompose_rec(body.body(), t.body(), depth + 1, bag);
        if (!inner) return std::nullopt;
        return ResTerm::lam(*inner);
    }
    case Term::Kind::App: {
        if (t.kind() != ResTerm::Kind::MApp) return std::nullopt;
        auto fun = res_decompose_rec(body.fun(), t.fun(), depth, bag);
        if (!fun) return std::nullopt;
        std::vector<ResTerm> items;
        items.reserve(t.bag_items().size());
        for (const auto& u : t.bag_items()) {
            auto e = res_decompose_rec(body.arg(), u, depth, bag);
            if (!e) return std::nullopt;
            items.push_back(*e);
        }
        return ResTerm::m_app(*fun, ResMonomial::of(items));
    }
    }
    return std::nullopt;
}

inline std::optional<ResSubstDecomposition> res_decompose_subst(const Term& body,
                                                                const ResTerm& t) {
    std::vector<ResTerm> bag;
    auto part = res_decompose_rec(body, t, 0, bag);
    if (!part) return std::nullopt;
    return ResSubstDecomposition{*part, std::move(bag)};
}

} // namespace detail

// Preimage along a single non-erasing epsilon lambda step: an approximant of
// the source whose mirrored reduction covers t0.
inline std::optional<ResTerm> res_anti_step(const Term& source, const LambdaStep& step,
                                            const ResTerm& t0, std::size_t path_index = 0) {
    if (path_index == step.path.size()) {
        switch (step.rule) {
        case StepRule::BetaNonErasing:
        case StepRule::BetaErasing: {
            if (!is_redex(source)) return std::nullopt;
            auto dec = detail::res_decompose_subst(source.fun().body(), t0);
            if (!dec) return std::nullopt;
            return ResTerm::m_app(ResTerm::lam(dec->body_part),
                                  ResMonomial::of(dec->bag));
        }
        case StepRule::Sigma1: {
            if (t0.kind() != ResTerm::Kind::MApp || t0.fun().kind() != ResTerm::Kind::Lam ||
                t0.fun().body().kind() != ResTerm::Kind::MApp)
                return std::nullopt;
            ResTerm inner = t0.fun().body().fun();
            ResMonomial outer = detail::res_shift(t0.fun().body().bag(), -1);
            ResMonomial n_bag = t0.bag();
            return ResTerm::m_app(ResTerm::m_app(ResTerm::lam(inner), n_bag), outer);
        }
        }
        return std::nullopt;
    }
    switch (step.path[path_index]) {
    case StepDir::LamBody: {
        if (source.kind() != Term::Kind::Lam || t0.kind() != ResTerm::Kind::Lam)
            return std::nullopt;
        auto inner = res_anti_step(source.body(), step, t0.body(), path_index + 1);
        if (!inner) return std::nullopt;
        return ResTerm::lam(*inner);
    }
    case StepDir::AppFun: {
        if (source.kind() != Term::Kind::App || t0.kind() != ResTerm::Kind::MApp)
            return std::nullopt;
        auto fun = res_anti_step(source.fun(), step, t0.fun(), path_index + 1);
        if (!fun) return std::nullopt;
        return ResTerm::m_app(*fun, t0.bag());
    }
    case StepDir::AppArg: {
        if (source.kind() != Term::Kind::App || t0.kind() != ResTerm::Kind::MApp)
            return std::nullopt;
        std::vector<ResTerm> items;
        items.reserve(t0.bag_items().size());
        for (const auto& u : t0.bag_items()) {
            auto e = res_anti_step(source.arg(), step, u, path_index + 1);
            if (!e) return std::nullopt;
            items.push_back(*e);
        }
        return ResTerm::m_app(t0.fun(), ResMonomial::of(items));
    }
    }
    return std::nullopt;
}

// The approximant that keeps exactly one copy of every argument; positive by
// construction.
inline ResTerm positive_skeleton(const Term& m) {
    switch (m.kind()) {
    case Term::Kind::Bound: return ResTerm::bound(m.index());
    case Term::Kind::Free: return ResTerm::free_var(m.name());
    case Term::Kind::Lam: return ResTerm::lam(positive_skeleton(m.body()));
    case Term::Kind::App:
        return ResTerm::m_app(positive_skeleton(m.fun()),
                              ResMonomial::singleton(positive_skeleton(m.arg())));
    }
    throw std::logic_error("unreachable");
}

} // namespace taylam
