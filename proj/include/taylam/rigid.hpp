#pragma once

#include <algorithm>
#include <cassert>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "taylam/syntax.hpp"

namespace taylam {

class RigidMonomial;

// Rigid resource terms: argument bags are ordered lists and substitution is
// positional and length-checked. Zero is absorbing and represented by an
// empty node so the smart constructors can collapse eagerly.
class RigidTerm {
public:
    enum class Kind { Zero, Bound, Free, Lam, LinApp };

    RigidTerm() = default; // Zero
    static RigidTerm zero() { return RigidTerm(); }
    static RigidTerm bound(int index) {
        if (index < 0) throw std::invalid_argument("negative de Bruijn index");
        return make(Kind::Bound, index, 0, {}, {});
    }
    static RigidTerm free_var(NameId name) { return make(Kind::Free, 0, name, {}, {}); }
    static RigidTerm free_var(std::string_view text) { return free_var(intern_name(text)); }
    static RigidTerm lam(const RigidTerm& body) {
        if (body.is_zero()) return zero();
        return make(Kind::Lam, 0, 0, body.node_, {});
    }
    static RigidTerm lin_app(const RigidTerm& fun, const RigidMonomial& args);

    bool is_zero() const { return node_ == nullptr; }
    Kind kind() const { return node_ ? node_->kind : Kind::Zero; }
    int index() const { return node_->index; }
    NameId name() const { return node_->name; }
    RigidTerm body() const { return RigidTerm(node_->child); }
    RigidTerm fun() const { return RigidTerm(node_->child); }
    const std::vector<RigidTerm>& args() const { return node_->args; }

    // Zero = 0, Var = 1, Lam = 1 + body, LinApp = 1 + fun + sum of args.
    std::size_t size() const { return node_ ? node_->size : 0; }
    std::size_t hash() const { return node_ ? node_->hash : 0x5a5a5a5aull; }

    bool operator==(const RigidTerm& other) const {
        if (node_ == other.node_) return true;
        if (!node_ || !other.node_) return false;
        if (node_->hash != other.node_->hash) return false;
        return compare(other) == std::strong_ordering::equal;
    }
    bool operator!=(const RigidTerm& other) const { return !(*this == other); }

    std::strong_ordering compare(const RigidTerm& other) const {
        if (node_ == other.node_) return std::strong_ordering::equal;
        if (auto c = kind() <=> other.kind(); c != 0) return c;
        switch (kind()) {
        case Kind::Zero: return std::strong_ordering::equal;
        case Kind::Bound: return index() <=> other.index();
        case Kind::Free: return name() <=> other.name();
        case Kind::Lam: return body().compare(other.body());
        case Kind::LinApp: {
            if (auto c = fun().compare(other.fun()); c != 0) return c;
            const auto& a = args();
            const auto& b = other.args();
            if (auto c = a.size() <=> b.size(); c != 0) return c;
            for (std::size_t i = 0; i < a.size(); ++i)
                if (auto c = a[i].compare(b[i]); c != 0) return c;
            return std::strong_ordering::equal;
        }
        }
        return std::strong_ordering::equal;
    }
    bool operator<(const RigidTerm& other) const { return compare(other) < 0; }

private:
    struct Node {
        Kind kind;
        int index;
        NameId name;
        std::shared_ptr<const Node> child;
        std::vector<RigidTerm> args;
        std::size_t size;
        std::size_t hash;
    };

    explicit RigidTerm(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

    static RigidTerm make(Kind kind, int index, NameId name, std::shared_ptr<const Node> child,
                          std::vector<RigidTerm> args) {
        auto node = std::make_shared<Node>();
        node->kind = kind;
        node->index = index;
        node->name = name;
        node->child = std::move(child);
        node->args = std::move(args);
        node->size = 1;
        std::size_t h = 0x2f0e1d2c3b4a5968ull + static_cast<std::size_t>(kind);
        switch (kind) {
        case Kind::Zero: break;
        case Kind::Bound: h ^= mix(static_cast<std::size_t>(index) + 11); break;
        case Kind::Free: h ^= mix(static_cast<std::size_t>(name) + 97); break;
        case Kind::Lam:
            node->size += node->child->size;
            h ^= mix(node->child->hash);
            break;
        case Kind::LinApp:
            node->size += node->child->size;
            h ^= mix(node->child->hash);
            for (const auto& a : node->args) {
                node->size += a.size();
                h = mix(h * 5 + a.hash());
            }
            break;
        }
        node->hash = h;
        return RigidTerm(std::move(node));
    }

    static std::size_t mix(std::size_t v) {
        v ^= v >> 31;
        v *= 0x7fb5d329728ea185ull;
        v ^= v >> 29;
        return v;
    }

    friend class RigidMonomial;
    std::shared_ptr<const Node> node_;
};

// An ordered list of rigid terms, or the absorbed zero monomial. A Zero
// element collapses the whole monomial.
class RigidMonomial {
public:
    RigidMonomial() = default; // ()
    static RigidMonomial zero() {
        RigidMonomial m;
        m.zero_ = true;
        return m;
    }
    static RigidMonomial of(std::vector<RigidTerm> items) {
        for (const auto& t : items)
            if (t.is_zero()) return zero();
        RigidMonomial m;
        m.items_ = std::move(items);
        return m;
    }
    static RigidMonomial singleton(const RigidTerm& t) { return of({t}); }

    bool is_zero() const { return zero_; }
    bool empty() const { return !zero_ && items_.empty(); }
    std::size_t width() const { return items_.size(); }
    const std::vector<RigidTerm>& items() const { return items_; }
    std::size_t total_size() const {
        std::size_t s = 0;
        for (const auto& t : items_) s += t.size();
        return s;
    }
    RigidMonomial concat(const RigidMonomial& other) const {
        if (zero_ || other.zero_) return zero();
        std::vector<RigidTerm> items = items_;
        items.insert(items.end(), other.items_.begin(), other.items_.end());
        return of(std::move(items));
    }

    std::size_t hash() const {
        if (zero_) return 0x77ull;
        std::size_t h = 0x1234ull;
        for (const auto& t : items_) h = h * 1000003 + t.hash();
        return h;
    }
    bool operator==(const RigidMonomial& other) const {
        return zero_ == other.zero_ && items_ == other.items_;
    }
    std::strong_ordering compare(const RigidMonomial& other) const {
        if (auto c = zero_ <=> other.zero_; c != 0) return c;
        if (auto c = items_.size() <=> other.items_.size(); c != 0) return c;
        for (std::size_t i = 0; i < items_.size(); ++i)
            if (auto c = items_[i].compare(other.items_[i]); c != 0) return c;
        return std::strong_ordering::equal;
    }
    bool operator<(const RigidMonomial& other) const { return compare(other) < 0; }

private:
    bool zero_ = false;
    std::vector<RigidTerm> items_;
};

inline RigidTerm RigidTerm::lin_app(const RigidTerm& fun, const RigidMonomial& args) {
    if (fun.is_zero() || args.is_zero()) return zero();
    return make(Kind::LinApp, 0, 0, fun.node_, args.items());
}

inline RigidMonomial rigid_monomial(std::initializer_list<RigidTerm> items) {
    return RigidMonomial::of(std::vector<RigidTerm>(items));
}

struct RigidTermHash {
    std::size_t operator()(const RigidTerm& t) const { return t.hash(); }
};

// ---------------------------------------------------------------------------
// Occurrence counting and positional substitution
// ---------------------------------------------------------------------------

namespace detail {

// A substitution target: a free name, or the bound variable that is `depth`
// binders up from the current position (used when firing a redex).
struct RigidTarget {
    bool is_free;
    NameId name;
};

inline bool rigid_var_matches(const RigidTerm& t, const RigidTarget& target, int depth) {
    if (t.kind() == RigidTerm::Kind::Free) return target.is_free && t.name() == target.name;
    if (t.kind() == RigidTerm::Kind::Bound) return !target.is_free && t.index() == depth;
    return false;
}

inline std::size_t rigid_count(const RigidTerm& t, const RigidTarget& target, int depth);

inline std::size_t rigid_count(const std::vector<RigidTerm>& items, const RigidTarget& target,
                               int depth) {
    std::size_t n = 0;
    for (const auto& t : items) n += rigid_count(t, target, depth);
    return n;
}

inline std::size_t rigid_count(const RigidTerm& t, const RigidTarget& target, int depth) {
    switch (t.kind()) {
    case RigidTerm::Kind::Zero: return 0;
    case RigidTerm::Kind::Bound:
    case RigidTerm::Kind::Free: return rigid_var_matches(t, target, depth) ? 1 : 0;
    case RigidTerm::Kind::Lam: return rigid_count(t.body(), target, depth + 1);
    case RigidTerm::Kind::LinApp:
        return rigid_count(t.fun(), target, depth) + rigid_count(t.args(), target, depth);
    }
    return 0;
}

inline RigidTerm rigid_shift(const RigidTerm& t, int amount, int cutoff = 0) {
    if (amount == 0 || t.is_zero()) return t;
    switch (t.kind()) {
    case RigidTerm::Kind::Bound:
        return t.index() >= cutoff ? RigidTerm::bound(t.index() + amount) : t;
    case RigidTerm::Kind::Free: return t;
    case RigidTerm::Kind::Lam: return RigidTerm::lam(rigid_shift(t.body(), amount, cutoff + 1));
    case RigidTerm::Kind::LinApp: {
        std::vector<RigidTerm> args;
        args.reserve(t.args().size());
        for (const auto& a : t.args()) args.push_back(rigid_shift(a, amount, cutoff));
        return RigidTerm::lin_app(rigid_shift(t.fun(), amount, cutoff), RigidMonomial::of(args));
    }
    default: return t;
    }
}

inline RigidMonomial rigid_shift(const RigidMonomial& m, int amount, int cutoff = 0) {
    if (m.is_zero()) return m;
    std::vector<RigidTerm> items;
    items.reserve(m.width());
    for (const auto& t : m.items()) items.push_back(rigid_shift(t, amount, cutoff));
    return RigidMonomial::of(items);
}

// Exact positional substitution: `bag` holds exactly as many resources as the
// target occurs in `t` (the caller has checked), split left-to-right. When
// the target is a bound variable, indices above it are decremented.
inline RigidTerm rigid_subst_exact(const RigidTerm& t, const RigidTarget& target,
                                   std::span<const RigidTerm> bag, int depth) {
    switch (t.kind()) {
    case RigidTerm::Kind::Zero: return t;
    case RigidTerm::Kind::Bound:
        if (rigid_var_matches(t, target, depth)) return rigid_shift(bag.front(), depth);
        if (!target.is_free && t.index() > depth) return RigidTerm::bound(t.index() - 1);
        return t;
    case RigidTerm::Kind::Free:
        if (rigid_var_matches(t, target, depth)) return rigid_shift(bag.front(), depth);
        return t;
    case RigidTerm::Kind::Lam:
        return RigidTerm::lam(rigid_subst_exact(t.body(), target, bag, depth + 1));
    case RigidTerm::Kind::LinApp: {
        std::size_t head = rigid_count(t.fun(), target, depth);
        RigidTerm fun = rigid_subst_exact(t.fun(), target, bag.first(head), depth);
        std::span<const RigidTerm> rest = bag.subspan(head);
        std::vector<RigidTerm> args;
        args.reserve(t.args().size());
        for (const auto& a : t.args()) {
            std::size_t k = rigid_count(a, target, depth);
            args.push_back(rigid_subst_exact(a, target, rest.first(k), depth));
            rest = rest.subspan(k);
        }
        return RigidTerm::lin_app(fun, RigidMonomial::of(args));
    }
    }
    return t;
}

inline RigidTerm rigid_subst_checked(const RigidTerm& t, const RigidTarget& target,
                                     const RigidMonomial& bag) {
    if (bag.is_zero() || t.is_zero()) return RigidTerm::zero();
    if (rigid_count(t, target, 0) != bag.width()) return RigidTerm::zero();
    return rigid_subst_exact(t, target, bag.items(), 0);
}

} // namespace detail

// Number of free occurrences of x.
inline std::size_t occurrences(const RigidTerm& t, NameId x) {
    return detail::rigid_count(t, {true, x}, 0);
}
inline std::size_t occurrences(const RigidMonomial& m, NameId x) {
    return m.is_zero() ? 0 : detail::rigid_count(m.items(), {true, x}, 0);
}

// e[bag/x]: the positional substitution when occurrence count and width
// agree, Zero otherwise.
inline RigidTerm rigid_substitute(const RigidTerm& t, NameId x, const RigidMonomial& bag) {
    return detail::rigid_subst_checked(t, {true, x}, bag);
}
inline RigidMonomial rigid_substitute(const RigidMonomial& m, NameId x,
                                      const RigidMonomial& bag) {
    if (m.is_zero() || bag.is_zero()) return RigidMonomial::zero();
    if (occurrences(m, x) != bag.width()) return RigidMonomial::zero();
    std::span<const RigidTerm> rest(bag.items());
    std::vector<RigidTerm> items;
    items.reserve(m.width());
    for (const auto& t : m.items()) {
        std::size_t k = detail::rigid_count(t, {true, x}, 0);
        items.push_back(detail::rigid_subst_exact(t, {true, x}, rest.first(k), 0));
        rest = rest.subspan(k);
    }
    return RigidMonomial::of(items);
}

// Fires <\x. body> bag.
inline RigidTerm rigid_beta_contract(const RigidTerm& body, const RigidMonomial& bag) {
    return detail::rigid_subst_checked(body, {false, 0}, bag);
}

inline bool is_rigid_redex(const RigidTerm& t) {
    return t.kind() == RigidTerm::Kind::LinApp && t.fun().kind() == RigidTerm::Kind::Lam;
}

inline bool is_rigid_normal(const RigidTerm& t) {
    switch (t.kind()) {
    case RigidTerm::Kind::Zero:
    case RigidTerm::Kind::Bound:
    case RigidTerm::Kind::Free: return true;
    case RigidTerm::Kind::Lam: return is_rigid_normal(t.body());
    case RigidTerm::Kind::LinApp: {
        if (is_rigid_redex(t)) return false;
        if (!is_rigid_normal(t.fun())) return false;
        for (const auto& a : t.args())
            if (!is_rigid_normal(a)) return false;
        return true;
    }
    }
    return true;
}

// ---------------------------------------------------------------------------
// One-step reduction and normal forms
// ---------------------------------------------------------------------------

enum class RigidStrategy { Base, NonErasing, Erasing, Sigma1, EpsilonNonErasing };

namespace detail {

inline bool rigid_sigma1_shape(const RigidTerm& t) {
    return t.kind() == RigidTerm::Kind::LinApp && is_rigid_redex(t.fun());
}

inline RigidTerm rigid_sigma1_fire(const RigidTerm& t) {
    // <<\x. b>(q...)>(r...)  ->  <\x. <b>(r'...)>(q...)
    RigidTerm b = t.fun().fun().body();
    RigidMonomial q = RigidMonomial::of(t.fun().args());
    RigidMonomial r = RigidMonomial::of(t.args());
    return RigidTerm::lin_app(RigidTerm::lam(RigidTerm::lin_app(b, rigid_shift(r, 1))), q);
}

inline void rigid_collect_steps(const RigidTerm& t, RigidStrategy kind,
                                const std::function<RigidTerm(const RigidTerm&)>& rebuild,
                                std::vector<RigidTerm>& out) {
    if (is_rigid_redex(t)) {
        std::size_t uses = rigid_count(t.fun().body(), {false, 0}, 0);
        bool erasing = uses == 0;
        bool fire = kind == RigidStrategy::Base || (kind == RigidStrategy::Erasing && erasing) ||
                    ((kind == RigidStrategy::NonErasing || kind == RigidStrategy::EpsilonNonErasing) &&
                     !erasing);
        if (fire)
            out.push_back(
                rebuild(rigid_beta_contract(t.fun().body(), RigidMonomial::of(t.args()))));
    }
    if ((kind == RigidStrategy::Sigma1 || kind == RigidStrategy::EpsilonNonErasing) &&
        rigid_sigma1_shape(t)) {
        out.push_back(rebuild(rigid_sigma1_fire(t)));
    }
    switch (t.kind()) {
    case RigidTerm::Kind::Zero:
    case RigidTerm::Kind::Bound:
    case RigidTerm::Kind::Free: return;
    case RigidTerm::Kind::Lam: {
        auto wrap = [&](const RigidTerm& u) { return rebuild(RigidTerm::lam(u)); };
        rigid_collect_steps(t.body(), kind, wrap, out);
        return;
    }
    case RigidTerm::Kind::LinApp: {
        RigidMonomial args = RigidMonomial::of(t.args());
        auto wrap_fun = [&rebuild, args](const RigidTerm& u) {
            return rebuild(RigidTerm::lin_app(u, args));
        };
        rigid_collect_steps(t.fun(), kind, wrap_fun, out);
        RigidTerm fun = t.fun();
        for (std::size_t i = 0; i < t.args().size(); ++i) {
            auto wrap_arg = [&rebuild, &t, fun, i](const RigidTerm& u) {
                std::vector<RigidTerm> items = t.args();
                items[i] = u;
                return rebuild(RigidTerm::lin_app(fun, RigidMonomial::of(items)));
            };
            rigid_collect_steps(t.args()[i], kind, wrap_arg, out);
        }
        return;
    }
    }
}

} // namespace detail

inline std::vector<RigidTerm> sorted_unique(std::vector<RigidTerm> terms) {
    std::sort(terms.begin(), terms.end(),
              [](const RigidTerm& a, const RigidTerm& b) { return a < b; });
    terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
    return terms;
}

inline std::vector<RigidTerm> rigid_successors(const RigidTerm& t, RigidStrategy kind) {
    std::vector<RigidTerm> out;
    detail::rigid_collect_steps(t, kind, [](const RigidTerm& u) { return u; }, out);
    return sorted_unique(std::move(out));
}

// All one-step ->r reducts under contextual closure.
inline std::vector<RigidTerm> r_successors(const RigidTerm& t) {
    return rigid_successors(t, RigidStrategy::Base);
}

inline std::vector<RigidTerm> rigid_sigma1_successors(const RigidTerm& t) {
    return rigid_successors(t, RigidStrategy::Sigma1);
}

namespace detail {

// Leftmost-innermost single ->r step, or nullopt on normal forms.
inline std::optional<RigidTerm> rigid_li_step(const RigidTerm& t) {
    switch (t.kind()) {
    case RigidTerm::Kind::Zero:
    case RigidTerm::Kind::Bound:
    case RigidTerm::Kind::Free: return std::nullopt;
    case RigidTerm::Kind::Lam:
        if (auto b = rigid_li_step(t.body())) return RigidTerm::lam(*b);
        return std::nullopt;
    case RigidTerm::Kind::LinApp: {
        if (auto f = rigid_li_step(t.fun()))
            return RigidTerm::lin_app(*f, RigidMonomial::of(t.args()));
        for (std::size_t i = 0; i < t.args().size(); ++i) {
            if (auto a = rigid_li_step(t.args()[i])) {
                std::vector<RigidTerm> items = t.args();
                items[i] = *a;
                return RigidTerm::lin_app(t.fun(), RigidMonomial::of(items));
            }
        }
        if (is_rigid_redex(t))
            return rigid_beta_contract(t.fun().body(), RigidMonomial::of(t.args()));
        return std::nullopt;
    }
    }
    return std::nullopt;
}

} // namespace detail

// Single leftmost-innermost ->r step; empty on normal forms.
inline std::optional<RigidTerm> rigid_leftmost_innermost_step(const RigidTerm& t) {
    return detail::rigid_li_step(t);
}

// The unique ->r normal form, by leftmost-innermost firing.
inline RigidTerm r_normal_form(const RigidTerm& t) {
    switch (t.kind()) {
    case RigidTerm::Kind::Zero:
    case RigidTerm::Kind::Bound:
    case RigidTerm::Kind::Free: return t;
    case RigidTerm::Kind::Lam: return RigidTerm::lam(r_normal_form(t.body()));
    case RigidTerm::Kind::LinApp: {
        RigidTerm fun = r_normal_form(t.fun());
        std::vector<RigidTerm> args;
        args.reserve(t.args().size());
        for (const auto& a : t.args()) {
            RigidTerm na = r_normal_form(a);
            if (na.is_zero()) return RigidTerm::zero();
            args.push_back(na);
        }
        if (fun.is_zero()) return RigidTerm::zero();
        if (fun.kind() == RigidTerm::Kind::Lam)
            return r_normal_form(rigid_beta_contract(fun.body(), RigidMonomial::of(args)));
        return RigidTerm::lin_app(fun, RigidMonomial::of(args));
    }
    }
    return t;
}

// Step-by-step record of the leftmost-innermost reduction, starting at t and
// ending at its normal form.
inline std::vector<RigidTerm> r_normal_form_trace(const RigidTerm& t) {
    std::vector<RigidTerm> steps{t};
    RigidTerm cur = t;
    while (auto next = detail::rigid_li_step(cur)) {
        cur = *next;
        steps.push_back(cur);
        if (cur.is_zero()) break;
    }
    return steps;
}

// ---------------------------------------------------------------------------
// Canonical decomposition and the deterministic strategies
// ---------------------------------------------------------------------------

struct RigidHeadDecomposition {
    bool zero = false;
    int binders = 0;
    RigidTerm core;
    std::vector<RigidMonomial> arg_monomials;
    bool core_is_redex = false;
};

inline RigidHeadDecomposition rigid_head_decompose(const RigidTerm& t) {
    RigidHeadDecomposition d;
    if (t.is_zero()) {
        d.zero = true;
        return d;
    }
    RigidTerm cur = t;
    while (cur.kind() == RigidTerm::Kind::Lam) {
        ++d.binders;
        cur = cur.body();
    }
    std::vector<RigidMonomial> rev;
    while (cur.kind() == RigidTerm::Kind::LinApp &&
           cur.fun().kind() == RigidTerm::Kind::LinApp) {
        rev.push_back(RigidMonomial::of(cur.args()));
        cur = cur.fun();
    }
    if (cur.kind() == RigidTerm::Kind::LinApp && cur.fun().kind() != RigidTerm::Kind::Lam) {
        rev.push_back(RigidMonomial::of(cur.args()));
        cur = cur.fun();
    }
    d.core = cur;
    d.core_is_redex = is_rigid_redex(cur);
    d.arg_monomials.assign(rev.rbegin(), rev.rend());
    return d;
}

inline RigidTerm rigid_reassemble(const RigidHeadDecomposition& d) {
    if (d.zero) return RigidTerm::zero();
    RigidTerm t = d.core;
    for (const auto& m : d.arg_monomials) t = RigidTerm::lin_app(t, m);
    for (int i = 0; i < d.binders; ++i) t = RigidTerm::lam(t);
    return t;
}

inline bool is_rigid_head_normal(const RigidTerm& t) {
    return !rigid_head_decompose(t).core_is_redex;
}

// Head resource reduction: identity on head-normal forms (variable-headed or
// Zero), otherwise fires the head redex. Does not descend into arguments.
inline RigidTerm rigid_head_step(const RigidTerm& t) {
    RigidHeadDecomposition d = rigid_head_decompose(t);
    if (d.zero || !d.core_is_redex) return t;
    RigidTerm fired =
        rigid_beta_contract(d.core.fun().body(), RigidMonomial::of(d.core.args()));
    RigidHeadDecomposition nd = d;
    nd.core = fired;
    nd.core_is_redex = false;
    return rigid_reassemble(nd);
}

inline RigidMonomial rigid_head_step(const RigidMonomial& m) {
    if (m.is_zero()) return m;
    std::vector<RigidTerm> items;
    items.reserve(m.width());
    for (const auto& t : m.items()) items.push_back(rigid_head_step(t));
    return RigidMonomial::of(items);
}

// Left-parallel resource reduction: identity on normal forms, maps over the
// argument monomials of a head-normal form, fires the head redex otherwise.
inline RigidTerm rigid_left_parallel_step(const RigidTerm& t);

inline RigidMonomial rigid_left_parallel_step(const RigidMonomial& m) {
    if (m.is_zero()) return m;
    std::vector<RigidTerm> items;
    items.reserve(m.width());
    for (const auto& t : m.items()) items.push_back(rigid_left_parallel_step(t));
    return RigidMonomial::of(items);
}

inline RigidTerm rigid_left_parallel_step(const RigidTerm& t) {
    if (t.is_zero() || is_rigid_normal(t)) return t;
    RigidHeadDecomposition d = rigid_head_decompose(t);
    if (d.core_is_redex) return rigid_head_step(t);
    RigidHeadDecomposition nd = d;
    for (auto& m : nd.arg_monomials) m = rigid_left_parallel_step(m);
    return rigid_reassemble(nd);
}

// ---------------------------------------------------------------------------
// Positivity: no empty argument list anywhere
// ---------------------------------------------------------------------------

inline bool is_positive_rigid(const RigidTerm& t) {
    switch (t.kind()) {
    case RigidTerm::Kind::Zero: return false;
    case RigidTerm::Kind::Bound:
    case RigidTerm::Kind::Free: return true;
    case RigidTerm::Kind::Lam: return is_positive_rigid(t.body());
    case RigidTerm::Kind::LinApp: {
        if (t.args().empty()) return false;
        if (!is_positive_rigid(t.fun())) return false;
        for (const auto& a : t.args())
            if (!is_positive_rigid(a)) return false;
        return true;
    }
    }
    return false;
}

// ---------------------------------------------------------------------------
// Surface syntax: "<c>(a1,...,an)", "\x. a", "0"
// ---------------------------------------------------------------------------

namespace detail {

inline RigidTerm parse_rigid_rec(TokenCursor& cur, std::vector<std::string>& binders);

inline RigidMonomial parse_rigid_monomial_rec(TokenCursor& cur,
                                              std::vector<std::string>& binders) {
    cur.expect('(', "'(' starting a monomial");
    std::vector<RigidTerm> items;
    if (cur.eat(')')) return RigidMonomial::of(std::move(items));
    while (true) {
        items.push_back(parse_rigid_rec(cur, binders));
        if (cur.eat(',')) continue;
        cur.expect(')', "')' or ','");
        break;
    }
    return RigidMonomial::of(std::move(items));
}

inline RigidTerm parse_rigid_rec(TokenCursor& cur, std::vector<std::string>& binders) {
    if (cur.eat_lambda()) {
        std::vector<std::string> names;
        while (auto n = cur.name()) names.push_back(*n);
        if (names.empty()) throw ParseError("expected binder name", cur.pos());
        cur.expect('.', "'.' after binders");
        for (const auto& n : names) binders.push_back(n);
        RigidTerm body = parse_rigid_rec(cur, binders);
        for (std::size_t i = 0; i < names.size(); ++i) {
            binders.pop_back();
            body = RigidTerm::lam(body);
        }
        return body;
    }
    if (cur.eat('<')) {
        RigidTerm fun = parse_rigid_rec(cur, binders);
        cur.expect('>', "'>' closing a linear application head");
        RigidMonomial args = parse_rigid_monomial_rec(cur, binders);
        return RigidTerm::lin_app(fun, args);
    }
    if (cur.eat('0')) return RigidTerm::zero();
    if (cur.eat('(')) {
        RigidTerm inner = parse_rigid_rec(cur, binders);
        cur.expect(')', "')'");
        return inner;
    }
    if (auto n = cur.name()) {
        for (std::size_t i = binders.size(); i-- > 0;)
            if (binders[i] == *n) return RigidTerm::bound(static_cast<int>(binders.size() - 1 - i));
        return RigidTerm::free_var(*n);
    }
    throw ParseError("expected rigid term", cur.pos());
}

inline void render_rigid_rec(const RigidTerm& t, std::vector<std::string>& binders,
                             std::string& out) {
    switch (t.kind()) {
    case RigidTerm::Kind::Zero: out += '0'; return;
    case RigidTerm::Kind::Bound:
        out += binders[binders.size() - 1 - static_cast<std::size_t>(t.index())];
        return;
    case RigidTerm::Kind::Free: out += name_text(t.name()); return;
    case RigidTerm::Kind::Lam: {
        std::set<std::string> avoid;
        const std::function<void(const RigidTerm&)> collect = [&](const RigidTerm& u) {
            switch (u.kind()) {
            case RigidTerm::Kind::Free: avoid.insert(name_text(u.name())); break;
            case RigidTerm::Kind::Lam: collect(u.body()); break;
            case RigidTerm::Kind::LinApp:
                collect(u.fun());
                for (const auto& a : u.args()) collect(a);
                break;
            default: break;
            }
        };
        collect(t.body());
        for (const auto& b : binders) avoid.insert(b);
        std::string name = pick_binder_name(avoid);
        out += '\\';
        out += name;
        out += ". ";
        binders.push_back(name);
        render_rigid_rec(t.body(), binders, out);
        binders.pop_back();
        return;
    }
    case RigidTerm::Kind::LinApp: {
        out += '<';
        render_rigid_rec(t.fun(), binders, out);
        out += ">(";
        bool first = true;
        for (const auto& a : t.args()) {
            if (!first) out += ", ";
            first = false;
            render_rigid_rec(a, binders, out);
        }
        out += ')';
        return;
    }
    }
}

} // namespace detail

inline RigidTerm parse_rigid_term(std::string_view text) {
    detail::TokenCursor cur(text);
    std::vector<std::string> binders;
    RigidTerm t = detail::parse_rigid_rec(cur, binders);
    if (!cur.done()) throw ParseError("trailing input", cur.pos());
    return t;
}

inline RigidMonomial parse_rigid_monomial(std::string_view text) {
    detail::TokenCursor cur(text);
    std::vector<std::string> binders;
    if (cur.eat('0')) {
        if (!cur.done()) throw ParseError("trailing input", cur.pos());
        return RigidMonomial::zero();
    }
    RigidMonomial m = detail::parse_rigid_monomial_rec(cur, binders);
    if (!cur.done()) throw ParseError("trailing input", cur.pos());
    return m;
}

inline std::string render(const RigidTerm& t) {
    std::string out;
    std::vector<std::string> binders;
    detail::render_rigid_rec(t, binders, out);
    return out;
}

inline std::string render(const RigidMonomial& m) {
    if (m.is_zero()) return "0";
    std::string out = "(";
    bool first = true;
    std::vector<std::string> binders;
    for (const auto& t : m.items()) {
        if (!first) out += ", ";
        first = false;
        detail::render_rigid_rec(t, binders, out);
    }
    out += ')';
    return out;
}

} // namespace taylam
