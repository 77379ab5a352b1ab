#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <memory>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "taylam/names.hpp"

namespace taylam {

// Ordinary lambda-terms. Bound variables are de Bruijn indices, so structural
// equality coincides with alpha-equivalence; free variables are interned
// names treated as constants. Values are immutable and share subtrees.
class Term {
public:
    enum class Kind { Bound, Free, Lam, App };

    static Term bound(int index) {
        if (index < 0) throw std::invalid_argument("negative de Bruijn index");
        return Term(std::make_shared<Node>(Node{Kind::Bound, index, 0, {}, {}, 0, 0}));
    }
    static Term free_var(NameId name) {
        return Term(std::make_shared<Node>(Node{Kind::Free, 0, name, {}, {}, 0, 0}));
    }
    static Term free_var(std::string_view text) { return free_var(intern_name(text)); }
    static Term lam(Term body) {
        return Term(std::make_shared<Node>(Node{Kind::Lam, 0, 0, body.node_, {}, 0, 0}));
    }
    static Term app(Term fun, Term arg) {
        return Term(std::make_shared<Node>(Node{Kind::App, 0, 0, fun.node_, arg.node_, 0, 0}));
    }

    Kind kind() const { return node_->kind; }
    int index() const { return node_->index; }
    NameId name() const { return node_->name; }
    Term body() const { return Term(node_->left); }
    Term fun() const { return Term(node_->left); }
    Term arg() const { return Term(node_->right); }

    // Node count: Var = 1, Lam = 1 + body, App = 1 + fun + arg.
    std::size_t size() const { return node_->size; }
    std::size_t hash() const { return node_->hash; }

    bool operator==(const Term& other) const {
        if (node_ == other.node_) return true;
        if (node_->hash != other.node_->hash) return false;
        return compare(other) == std::strong_ordering::equal;
    }
    bool operator!=(const Term& other) const { return !(*this == other); }

    // Total order used wherever sets of terms need a canonical listing.
    std::strong_ordering compare(const Term& other) const {
        if (node_ == other.node_) return std::strong_ordering::equal;
        if (auto c = node_->kind <=> other.node_->kind; c != 0) return c;
        switch (node_->kind) {
        case Kind::Bound: return node_->index <=> other.node_->index;
        case Kind::Free: return node_->name <=> other.node_->name;
        case Kind::Lam: return body().compare(other.body());
        case Kind::App:
            if (auto c = fun().compare(other.fun()); c != 0) return c;
            return arg().compare(other.arg());
        }
        return std::strong_ordering::equal;
    }
    bool operator<(const Term& other) const { return compare(other) < 0; }

private:
    struct Node {
        Kind kind;
        int index;
        NameId name;
        std::shared_ptr<const Node> left;
        std::shared_ptr<const Node> right;
        std::size_t size;
        std::size_t hash;

        Node(Kind k, int i, NameId n, std::shared_ptr<const Node> l,
             std::shared_ptr<const Node> r, std::size_t, std::size_t)
            : kind(k), index(i), name(n), left(std::move(l)), right(std::move(r)) {
            size = 1;
            hash = static_cast<std::size_t>(kind) * 0x9e3779b97f4a7c15ull;
            switch (kind) {
            case Kind::Bound: hash ^= mix(static_cast<std::size_t>(index)); break;
            case Kind::Free: hash ^= mix(static_cast<std::size_t>(name) + 0x51ull); break;
            case Kind::Lam:
                size += left->size;
                hash ^= mix(left->hash);
                break;
            case Kind::App:
                size += left->size + right->size;
                hash ^= mix(left->hash) ^ mix(right->hash * 3 + 1);
                break;
            }
        }
        static std::size_t mix(std::size_t v) {
            v ^= v >> 33;
            v *= 0xff51afd7ed558ccdull;
            v ^= v >> 33;
            return v;
        }
    };

    explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;
};

struct TermHash {
    std::size_t operator()(const Term& t) const { return t.hash(); }
};

namespace detail {

// Lift bound indices >= cutoff by amount (amount may be negative; indices
// must stay in range, which holds for every call site below).
inline Term shift_term(const Term& t, int amount, int cutoff = 0) {
    if (amount == 0) return t;
    switch (t.kind()) {
    case Term::Kind::Bound:
        return t.index() >= cutoff ? Term::bound(t.index() + amount) : t;
    case Term::Kind::Free: return t;
    case Term::Kind::Lam: return Term::lam(shift_term(t.body(), amount, cutoff + 1));
    case Term::Kind::App:
        return Term::app(shift_term(t.fun(), amount, cutoff),
                         shift_term(t.arg(), amount, cutoff));
    }
    throw std::logic_error("unreachable");
}

// Substitute the bound variable `target` by `value` (beta step helper).
inline Term subst_bound(const Term& t, int target, const Term& value) {
    switch (t.kind()) {
    case Term::Kind::Bound:
        if (t.index() == target) return shift_term(value, target);
        if (t.index() > target) return Term::bound(t.index() - 1);
        return t;
    case Term::Kind::Free: return t;
    case Term::Kind::Lam: return Term::lam(subst_bound(t.body(), target + 1, value));
    case Term::Kind::App:
        return Term::app(subst_bound(t.fun(), target, value),
                         subst_bound(t.arg(), target, value));
    }
    throw std::logic_error("unreachable");
}

inline bool bound_occurs(const Term& t, int target) {
    switch (t.kind()) {
    case Term::Kind::Bound: return t.index() == target;
    case Term::Kind::Free: return false;
    case Term::Kind::Lam: return bound_occurs(t.body(), target + 1);
    case Term::Kind::App:
        return bound_occurs(t.fun(), target) || bound_occurs(t.arg(), target);
    }
    throw std::logic_error("unreachable");
}

} // namespace detail

// Fires the redex (\x. body) arg.
inline Term beta_contract(const Term& body, const Term& arg) {
    return detail::subst_bound(body, 0, arg);
}

inline bool is_redex(const Term& t) {
    return t.kind() == Term::Kind::App && t.fun().kind() == Term::Kind::Lam;
}

// Whether a redex (\x. body) arg erases its argument.
inline bool redex_is_erasing(const Term& t) {
    return !detail::bound_occurs(t.fun().body(), 0);
}

inline void collect_free_vars(const Term& t, std::set<NameId>& out) {
    switch (t.kind()) {
    case Term::Kind::Bound: return;
    case Term::Kind::Free: out.insert(t.name()); return;
    case Term::Kind::Lam: collect_free_vars(t.body(), out); return;
    case Term::Kind::App:
        collect_free_vars(t.fun(), out);
        collect_free_vars(t.arg(), out);
        return;
    }
}

inline std::set<NameId> free_vars(const Term& t) {
    std::set<NameId> out;
    collect_free_vars(t, out);
    return out;
}

// Free names in first-occurrence order (used to close open terms).
inline std::vector<NameId> free_vars_in_order(const Term& t) {
    std::vector<NameId> order;
    std::set<NameId> seen;
    const std::function<void(const Term&)> walk = [&](const Term& u) {
        switch (u.kind()) {
        case Term::Kind::Bound: return;
        case Term::Kind::Free:
            if (seen.insert(u.name()).second) order.push_back(u.name());
            return;
        case Term::Kind::Lam: walk(u.body()); return;
        case Term::Kind::App:
            walk(u.fun());
            walk(u.arg());
            return;
        }
    };
    walk(t);
    return order;
}

// Capture-avoiding substitution of `value` for the free name `x` in `t`.
inline Term substitute(const Term& t, NameId x, const Term& value) {
    const std::function<Term(const Term&, int)> walk = [&](const Term& u, int depth) -> Term {
        switch (u.kind()) {
        case Term::Kind::Bound: return u;
        case Term::Kind::Free:
            return u.name() == x ? detail::shift_term(value, depth) : u;
        case Term::Kind::Lam: return Term::lam(walk(u.body(), depth + 1));
        case Term::Kind::App: return Term::app(walk(u.fun(), depth), walk(u.arg(), depth));
        }
        throw std::logic_error("unreachable");
    };
    return walk(t, 0);
}

inline Term substitute(const Term& t, std::string_view x, const Term& value) {
    return substitute(t, intern_name(x), value);
}

} // namespace taylam
