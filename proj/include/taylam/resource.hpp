#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "taylam/rigid.hpp"

namespace taylam {

// Coefficients are exact naturals: permutation counts grow factorially.
using Coeff = boost::multiprecision::cpp_int;

class ResMonomial;

// Multiset resource terms. Bags are kept in a canonical total order
// (constructor tag, then fields, recursively), so structural equality is
// multiset equality.
class ResTerm {
public:
    enum class Kind { Bound, Free, Lam, MApp };

    static ResTerm bound(int index) {
        if (index < 0) throw std::invalid_argument("negative de Bruijn index");
        return make(Kind::Bound, index, 0, {}, {});
    }
    static ResTerm free_var(NameId name) { return make(Kind::Free, 0, name, {}, {}); }
    static ResTerm free_var(std::string_view text) { return free_var(intern_name(text)); }
    static ResTerm lam(const ResTerm& body) { return make(Kind::Lam, 0, 0, body.node_, {}); }
    static ResTerm m_app(const ResTerm& fun, const ResMonomial& bag);

    Kind kind() const { return node_->kind; }
    int index() const { return node_->index; }
    NameId name() const { return node_->name; }
    ResTerm body() const { return ResTerm(node_->child); }
    ResTerm fun() const { return ResTerm(node_->child); }
    const std::vector<ResTerm>& bag_items() const { return node_->bag; }
    ResMonomial bag() const;

    std::size_t size() const { return node_->size; }
    std::size_t hash() const { return node_->hash; }

    bool operator==(const ResTerm& other) const {
        if (node_ == other.node_) return true;
        if (node_->hash != other.node_->hash) return false;
        return compare(other) == std::strong_ordering::equal;
    }
    bool operator!=(const ResTerm& other) const { return !(*this == other); }

    std::strong_ordering compare(const ResTerm& other) const {
        if (node_ == other.node_) return std::strong_ordering::equal;
        if (auto c = kind() <=> other.kind(); c != 0) return c;
        switch (kind()) {
        case Kind::Bound: return index() <=> other.index();
        case Kind::Free: return name() <=> other.name();
        case Kind::Lam: return body().compare(other.body());
        case Kind::MApp: {
            if (auto c = fun().compare(other.fun()); c != 0) return c;
            const auto& a = node_->bag;
            const auto& b = other.node_->bag;
            if (auto c = a.size() <=> b.size(); c != 0) return c;
            for (std::size_t i = 0; i < a.size(); ++i)
                if (auto c = a[i].compare(b[i]); c != 0) return c;
            return std::strong_ordering::equal;
        }
        }
        return std::strong_ordering::equal;
    }
    bool operator<(const ResTerm& other) const { return compare(other) < 0; }

private:
    struct Node {
        Kind kind;
        int index;
        NameId name;
        std::shared_ptr<const Node> child;
        std::vector<ResTerm> bag; // sorted canonically
        std::size_t size;
        std::size_t hash;
    };

    explicit ResTerm(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

    static ResTerm make(Kind kind, int index, NameId name, std::shared_ptr<const Node> child,
                        std::vector<ResTerm> bag) {
        auto node = std::make_shared<Node>();
        node->kind = kind;
        node->index = index;
        node->name = name;
        node->child = std::move(child);
        node->bag = std::move(bag);
        node->size = 1;
        std::size_t h = 0x51ed2701aa55ff13ull + static_cast<std::size_t>(kind);
        switch (kind) {
        case Kind::Bound: h ^= mix(static_cast<std::size_t>(index) + 3); break;
        case Kind::Free: h ^= mix(static_cast<std::size_t>(name) + 71); break;
        case Kind::Lam:
            node->size += node->child->size;
            h ^= mix(node->child->hash);
            break;
        case Kind::MApp:
            node->size += node->child->size;
            h ^= mix(node->child->hash);
            for (const auto& t : node->bag) {
                node->size += t.size();
                h = mix(h * 7 + t.hash());
            }
            break;
        }
        node->hash = h;
        return ResTerm(std::move(node));
    }

    static std::size_t mix(std::size_t v) {
        v ^= v >> 30;
        v *= 0xbf58476d1ce4e5b9ull;
        v ^= v >> 27;
        return v;
    }

    friend class ResMonomial;
    std::shared_ptr<const Node> node_;
};

// Finite multiset of resource terms, stored sorted.
class ResMonomial {
public:
    ResMonomial() = default;
    static ResMonomial of(std::vector<ResTerm> items) {
        std::sort(items.begin(), items.end(),
                  [](const ResTerm& a, const ResTerm& b) { return a < b; });
        ResMonomial m;
        m.items_ = std::move(items);
        return m;
    }
    static ResMonomial singleton(const ResTerm& t) { return of({t}); }

    bool empty() const { return items_.empty(); }
    std::size_t width() const { return items_.size(); }
    const std::vector<ResTerm>& items() const { return items_; }
    std::size_t total_size() const {
        std::size_t s = 0;
        for (const auto& t : items_) s += t.size();
        return s;
    }
    ResMonomial with(const ResTerm& extra) const {
        std::vector<ResTerm> items = items_;
        items.push_back(extra);
        return of(std::move(items));
    }
    ResMonomial without_index(std::size_t i) const {
        std::vector<ResTerm> items = items_;
        items.erase(items.begin() + static_cast<std::ptrdiff_t>(i));
        ResMonomial m;
        m.items_ = std::move(items); // removal preserves sortedness
        return m;
    }
    ResMonomial merged(const ResMonomial& other) const {
        std::vector<ResTerm> items = items_;
        items.insert(items.end(), other.items_.begin(), other.items_.end());
        return of(std::move(items));
    }

    std::size_t hash() const {
        std::size_t h = 0xabcdull;
        for (const auto& t : items_) h = h * 1000033 + t.hash();
        return h;
    }
    bool operator==(const ResMonomial& other) const { return items_ == other.items_; }
    std::strong_ordering compare(const ResMonomial& other) const {
        if (auto c = items_.size() <=> other.items_.size(); c != 0) return c;
        for (std::size_t i = 0; i < items_.size(); ++i)
            if (auto c = items_[i].compare(other.items_[i]); c != 0) return c;
        return std::strong_ordering::equal;
    }
    bool operator<(const ResMonomial& other) const { return compare(other) < 0; }

private:
    std::vector<ResTerm> items_;
};

inline ResTerm ResTerm::m_app(const ResTerm& fun, const ResMonomial& bag) {
    return make(Kind::MApp, 0, 0, fun.node_, bag.items());
}
inline ResMonomial ResTerm::bag() const { return ResMonomial::of(node_->bag); }

inline ResMonomial res_monomial(std::initializer_list<ResTerm> items) {
    return ResMonomial::of(std::vector<ResTerm>(items));
}

struct ResTermHash {
    std::size_t operator()(const ResTerm& t) const { return t.hash(); }
};

// ---------------------------------------------------------------------------
// Finite formal sums with positive natural coefficients
// ---------------------------------------------------------------------------

template <typename T>
class Sum {
public:
    using Map = std::map<T, Coeff>;

    Sum() = default;
    static Sum of(const T& t, Coeff c = 1) {
        Sum s;
        s.add(t, c);
        return s;
    }

    bool is_zero() const { return entries_.empty(); }
    std::size_t support_size() const { return entries_.size(); }
    const Map& entries() const { return entries_; }

    void add(const T& t, const Coeff& c) {
        if (c == 0) return;
        auto [it, inserted] = entries_.emplace(t, c);
        if (!inserted) it->second += c;
    }
    // Removes one copy (coefficient must be at least 1).
    void remove_one(const T& t) {
        auto it = entries_.find(t);
        if (it == entries_.end()) throw std::invalid_argument("term not in support");
        if (--it->second == 0) entries_.erase(it);
    }
    bool contains(const T& t) const { return entries_.count(t) > 0; }
    Coeff coefficient(const T& t) const {
        auto it = entries_.find(t);
        return it == entries_.end() ? Coeff(0) : it->second;
    }

    Sum& operator+=(const Sum& other) {
        for (const auto& [t, c] : other.entries_) add(t, c);
        return *this;
    }
    Sum operator+(const Sum& other) const {
        Sum s = *this;
        s += other;
        return s;
    }
    Sum times(const Coeff& k) const {
        Sum s;
        if (k == 0) return s;
        for (const auto& [t, c] : entries_) s.entries_.emplace(t, c * k);
        return s;
    }
    Coeff total_mass() const {
        Coeff m = 0;
        for (const auto& [t, c] : entries_) m += c;
        return m;
    }
    template <typename F>
    auto map_support(F&& f) const { // F: T -> U; linear extension
        Sum<std::decay_t<decltype(f(std::declval<T>()))>> out;
        for (const auto& [t, c] : entries_) out.add(f(t), c);
        return out;
    }

    bool operator==(const Sum& other) const { return entries_ == other.entries_; }
    bool operator!=(const Sum& other) const { return !(*this == other); }
    std::strong_ordering compare(const Sum& other) const {
        auto a = entries_.begin();
        auto b = other.entries_.begin();
        for (; a != entries_.end() && b != other.entries_.end(); ++a, ++b) {
            if (auto c = a->first.compare(b->first); c != 0) return c;
            if (a->second != b->second)
                return a->second < b->second ? std::strong_ordering::less
                                             : std::strong_ordering::greater;
        }
        if (a != entries_.end()) return std::strong_ordering::greater;
        if (b != other.entries_.end()) return std::strong_ordering::less;
        return std::strong_ordering::equal;
    }
    bool operator<(const Sum& other) const { return compare(other) < 0; }

private:
    Map entries_;
};

using TermSum = Sum<ResTerm>;
using MonoSum = Sum<ResMonomial>;

// Syntactic constructors extended to sums by (bi)linearity.
inline TermSum lam_sum(const TermSum& body) {
    return body.map_support([](const ResTerm& t) { return ResTerm::lam(t); });
}
inline TermSum app_sum(const TermSum& fun, const MonoSum& bag) {
    TermSum out;
    for (const auto& [f, cf] : fun.entries())
        for (const auto& [b, cb] : bag.entries()) out.add(ResTerm::m_app(f, b), cf * cb);
    return out;
}
inline MonoSum cons_sum(const TermSum& head, const MonoSum& tail) {
    MonoSum out;
    for (const auto& [h, ch] : head.entries())
        for (const auto& [t, ct] : tail.entries()) out.add(t.with(h), ch * ct);
    return out;
}

// ---------------------------------------------------------------------------
// Occurrences, shifting, and the two substitutions
// ---------------------------------------------------------------------------

namespace detail {

struct ResTarget {
    bool is_free;
    NameId name;
};

inline bool res_var_matches(const ResTerm& t, const ResTarget& target, int depth) {
    if (t.kind() == ResTerm::Kind::Free) return target.is_free && t.name() == target.name;
    if (t.kind() == ResTerm::Kind::Bound) return !target.is_free && t.index() == depth;
    return false;
}

inline std::size_t res_count(const ResTerm& t, const ResTarget& target, int depth) {
    switch (t.kind()) {
    case ResTerm::Kind::Bound:
    case ResTerm::Kind::Free: return res_var_matches(t, target, depth) ? 1 : 0;
    case ResTerm::Kind::Lam: return res_count(t.body(), target, depth + 1);
    case ResTerm::Kind::MApp: {
        std::size_t n = res_count(t.fun(), target, depth);
        for (const auto& u : t.bag_items()) n += res_count(u, target, depth);
        return n;
    }
    }
    return 0;
}

inline std::size_t res_count(const ResMonomial& m, const ResTarget& target, int depth) {
    std::size_t n = 0;
    for (const auto& t : m.items()) n += res_count(t, target, depth);
    return n;
}

inline ResTerm res_shift(const ResTerm& t, int amount, int cutoff = 0) {
    if (amount == 0) return t;
    switch (t.kind()) {
    case ResTerm::Kind::Bound:
        return t.index() >= cutoff ? ResTerm::bound(t.index() + amount) : t;
    case ResTerm::Kind::Free: return t;
    case ResTerm::Kind::Lam: return ResTerm::lam(res_shift(t.body(), amount, cutoff + 1));
    case ResTerm::Kind::MApp: {
        std::vector<ResTerm> bag;
        bag.reserve(t.bag_items().size());
        for (const auto& u : t.bag_items()) bag.push_back(res_shift(u, amount, cutoff));
        return ResTerm::m_app(res_shift(t.fun(), amount, cutoff), ResMonomial::of(bag));
    }
    }
    return t;
}

inline ResMonomial res_shift(const ResMonomial& m, int amount, int cutoff = 0) {
    if (amount == 0) return m;
    std::vector<ResTerm> items;
    items.reserve(m.width());
    for (const auto& t : m.items()) items.push_back(res_shift(t, amount, cutoff));
    return ResMonomial::of(items);
}

// Positional substitution: assigns the i-th listed resource to the i-th
// occurrence of the target in reading order. The sum over all permutations
// of the bag is the n-linear substitution.
inline ResTerm res_positional(const ResTerm& t, const ResTarget& target,
                              std::span<const ResTerm> values, std::size_t& cursor, int depth) {
    switch (t.kind()) {
    case ResTerm::Kind::Bound:
        if (res_var_matches(t, target, depth)) return res_shift(values[cursor++], depth);
        if (!target.is_free && t.index() > depth) return ResTerm::bound(t.index() - 1);
        return t;
    case ResTerm::Kind::Free:
        if (res_var_matches(t, target, depth)) return res_shift(values[cursor++], depth);
        return t;
    case ResTerm::Kind::Lam:
        return ResTerm::lam(res_positional(t.body(), target, values, cursor, depth + 1));
    case ResTerm::Kind::MApp: {
        ResTerm fun = res_positional(t.fun(), target, values, cursor, depth);
        std::vector<ResTerm> bag;
        bag.reserve(t.bag_items().size());
        for (const auto& u : t.bag_items())
            bag.push_back(res_positional(u, target, values, cursor, depth));
        return ResTerm::m_app(fun, ResMonomial::of(bag));
    }
    }
    return t;
}

template <typename F>
inline void for_each_subset(std::size_t n, std::size_t k, F&& visit) {
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    if (k > n) return;
    while (true) {
        visit(static_cast<const std::vector<std::size_t>&>(idx));
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
        if (i == 0) break;
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

inline std::pair<std::vector<ResTerm>, std::vector<ResTerm>>
split_by_subset(const std::vector<ResTerm>& bag, const std::vector<std::size_t>& subset) {
    std::vector<ResTerm> in, out;
    in.reserve(subset.size());
    out.reserve(bag.size() - subset.size());
    std::size_t si = 0;
    for (std::size_t i = 0; i < bag.size(); ++i) {
        if (si < subset.size() && subset[si] == i) {
            in.push_back(bag[i]);
            ++si;
        } else {
            out.push_back(bag[i]);
        }
    }
    return {std::move(in), std::move(out)};
}

inline TermSum nsub_term_exact(const ResTerm& e, const ResTarget& x,
                               const std::vector<ResTerm>& bag, int depth);

inline MonoSum nsub_items_exact(std::span<const ResTerm> items, const ResTarget& x,
                                const std::vector<ResTerm>& bag, int depth) {
    if (items.empty()) return MonoSum::of(ResMonomial());
    const ResTerm& head = items.front();
    std::size_t k = res_count(head, x, depth);
    MonoSum out;
    for_each_subset(bag.size(), k, [&](const std::vector<std::size_t>& subset) {
        auto [mine, rest] = split_by_subset(bag, subset);
        TermSum h = nsub_term_exact(head, x, mine, depth);
        if (h.is_zero()) return;
        MonoSum t = nsub_items_exact(items.subspan(1), x, rest, depth);
        out += cons_sum(h, t);
    });
    return out;
}

inline TermSum nsub_term_exact(const ResTerm& e, const ResTarget& x,
                               const std::vector<ResTerm>& bag, int depth) {
    switch (e.kind()) {
    case ResTerm::Kind::Bound:
        if (res_var_matches(e, x, depth)) return TermSum::of(res_shift(bag.front(), depth));
        if (!x.is_free && e.index() > depth) return TermSum::of(ResTerm::bound(e.index() - 1));
        return TermSum::of(e);
    case ResTerm::Kind::Free:
        if (res_var_matches(e, x, depth)) return TermSum::of(res_shift(bag.front(), depth));
        return TermSum::of(e);
    case ResTerm::Kind::Lam:
        return lam_sum(nsub_term_exact(e.body(), x, bag, depth + 1));
    case ResTerm::Kind::MApp: {
        std::size_t k = res_count(e.fun(), x, depth);
        TermSum out;
        for_each_subset(bag.size(), k, [&](const std::vector<std::size_t>& subset) {
            auto [mine, rest] = split_by_subset(bag, subset);
            TermSum f = nsub_term_exact(e.fun(), x, mine, depth);
            if (f.is_zero()) return;
            MonoSum b = nsub_items_exact(e.bag_items(), x, rest, depth);
            out += app_sum(f, b);
        });
        return out;
    }
    }
    return TermSum{};
}

} // namespace detail

inline std::size_t res_occurrences(const ResTerm& t, NameId x) {
    return detail::res_count(t, {true, x}, 0);
}
inline std::size_t res_occurrences(const ResMonomial& m, NameId x) {
    return detail::res_count(m, {true, x}, 0);
}

// The n-linear substitution: zero when the occurrence count and the bag width
// differ, otherwise the sum over all ways to hand the resources to the
// occurrences (computed by the partition recursion).
inline TermSum n_linear_substitute(const ResTerm& e, NameId x, const ResMonomial& bag) {
    if (res_occurrences(e, x) != bag.width()) return TermSum{};
    return detail::nsub_term_exact(e, {true, x}, bag.items(), 0);
}
inline MonoSum n_linear_substitute(const ResMonomial& e, NameId x, const ResMonomial& bag) {
    if (res_occurrences(e, x) != bag.width()) return MonoSum{};
    return detail::nsub_items_exact(e.items(), {true, x}, bag.items(), 0);
}

// Positional (single-assignment) substitution used by the permutation
// definition; assignments are consumed in reading order.
inline ResTerm res_positional_substitute(const ResTerm& e, NameId x,
                                         const std::vector<ResTerm>& values) {
    std::size_t cursor = 0;
    ResTerm out = detail::res_positional(e, {true, x}, values, cursor, 0);
    if (cursor != values.size()) throw std::invalid_argument("value count mismatch");
    return out;
}
inline ResMonomial res_positional_substitute(const ResMonomial& e, NameId x,
                                             const std::vector<ResTerm>& values) {
    std::size_t cursor = 0;
    std::vector<ResTerm> items;
    items.reserve(e.width());
    for (const auto& t : e.items())
        items.push_back(detail::res_positional(t, {true, x}, values, cursor, 0));
    if (cursor != values.size()) throw std::invalid_argument("value count mismatch");
    return ResMonomial::of(items);
}

// ---------------------------------------------------------------------------
// Reduction
// ---------------------------------------------------------------------------

enum class ResStrategyKind {
    Partial,
    PartialSigma1,
    PartialNonErasing,
    PartialErasing,
    EpsilonNonErasing,
};

inline bool is_res_redex(const ResTerm& t) {
    return t.kind() == ResTerm::Kind::MApp && t.fun().kind() == ResTerm::Kind::Lam;
}

inline bool res_redex_is_erasing(const ResTerm& t) {
    return detail::res_count(t.fun().body(), {false, 0}, 0) == 0;
}

// Fires <\x. s>[t...] into the n-linear substitution (possibly the zero sum).
inline TermSum res_beta_fire(const ResTerm& t) {
    const ResTerm body = t.fun().body();
    const std::vector<ResTerm>& bag = t.bag_items();
    if (detail::res_count(body, {false, 0}, 0) != bag.size()) return TermSum{};
    return detail::nsub_term_exact(body, {false, 0}, bag, 0);
}

inline bool res_sigma1_shape(const ResTerm& t) {
    return t.kind() == ResTerm::Kind::MApp && is_res_redex(t.fun());
}

inline ResTerm res_sigma1_fire(const ResTerm& t) {
    // <<\x. s>[q...]>[r...] -> <\x. <s>[r'...]>[q...]
    ResTerm s = t.fun().fun().body();
    ResMonomial q = t.fun().bag();
    ResMonomial r = t.bag();
    return ResTerm::m_app(ResTerm::lam(ResTerm::m_app(s, detail::res_shift(r, 1))), q);
}

namespace detail {

inline void res_collect_steps(const ResTerm& t, ResStrategyKind kind,
                              const std::function<TermSum(const TermSum&)>& rebuild,
                              std::vector<TermSum>& out) {
    if (is_res_redex(t)) {
        bool erasing = res_redex_is_erasing(t);
        bool fire = kind == ResStrategyKind::Partial ||
                    (kind == ResStrategyKind::PartialErasing && erasing) ||
                    ((kind == ResStrategyKind::PartialNonErasing ||
                      kind == ResStrategyKind::EpsilonNonErasing) &&
                     !erasing);
        if (fire) out.push_back(rebuild(res_beta_fire(t)));
    }
    if ((kind == ResStrategyKind::PartialSigma1 || kind == ResStrategyKind::EpsilonNonErasing) &&
        res_sigma1_shape(t)) {
        out.push_back(rebuild(TermSum::of(res_sigma1_fire(t))));
    }
    switch (t.kind()) {
    case ResTerm::Kind::Bound:
    case ResTerm::Kind::Free: return;
    case ResTerm::Kind::Lam: {
        auto wrap = [&](const TermSum& s) { return rebuild(lam_sum(s)); };
        res_collect_steps(t.body(), kind, wrap, out);
        return;
    }
    case ResTerm::Kind::MApp: {
        MonoSum bag_sum = MonoSum::of(t.bag());
        auto wrap_fun = [&rebuild, bag_sum](const TermSum& s) {
            return rebuild(app_sum(s, bag_sum));
        };
        res_collect_steps(t.fun(), kind, wrap_fun, out);
        ResTerm fun = t.fun();
        ResMonomial bag = t.bag();
        for (std::size_t i = 0; i < bag.width(); ++i) {
            if (i > 0 && bag.items()[i] == bag.items()[i - 1]) continue;
            ResMonomial rest = bag.without_index(i);
            auto wrap_arg = [&rebuild, fun, rest](const TermSum& s) {
                return rebuild(app_sum(TermSum::of(fun), cons_sum(s, MonoSum::of(rest))));
            };
            res_collect_steps(bag.items()[i], kind, wrap_arg, out);
        }
        return;
    }
    }
}

} // namespace detail

inline std::vector<TermSum> sorted_unique(std::vector<TermSum> sums) {
    std::sort(sums.begin(), sums.end(),
              [](const TermSum& a, const TermSum& b) { return a < b; });
    sums.erase(std::unique(sums.begin(), sums.end()), sums.end());
    return sums;
}

// One-step reducts under the designated relation, one sum per redex
// occurrence, contextual closure included.
inline std::vector<TermSum> res_successors(const ResTerm& t, ResStrategyKind kind) {
    std::vector<TermSum> out;
    detail::res_collect_steps(t, kind, [](const TermSum& s) { return s; }, out);
    return sorted_unique(std::move(out));
}

inline std::vector<TermSum> partial_successors(const ResTerm& t) {
    return res_successors(t, ResStrategyKind::Partial);
}

// A step on a sum reduces exactly one support occurrence and re-merges.
inline std::vector<TermSum> sum_successors(const TermSum& sum, ResStrategyKind kind) {
    std::vector<TermSum> out;
    for (const auto& [t, c] : sum.entries()) {
        for (const auto& reduct : res_successors(t, kind)) {
            TermSum next = sum;
            next.remove_one(t);
            next += reduct;
            out.push_back(std::move(next));
        }
    }
    return sorted_unique(std::move(out));
}

inline bool is_partial_normal(const ResTerm& t) {
    switch (t.kind()) {
    case ResTerm::Kind::Bound:
    case ResTerm::Kind::Free: return true;
    case ResTerm::Kind::Lam: return is_partial_normal(t.body());
    case ResTerm::Kind::MApp: {
        if (is_res_redex(t)) return false;
        if (!is_partial_normal(t.fun())) return false;
        for (const auto& u : t.bag_items())
            if (!is_partial_normal(u)) return false;
        return true;
    }
    }
    return true;
}

namespace detail {

inline MonoSum partial_nf_items(std::span<const ResTerm> items,
                                std::unordered_map<ResTerm, TermSum, ResTermHash>& memo);

inline TermSum partial_nf(const ResTerm& t,
                          std::unordered_map<ResTerm, TermSum, ResTermHash>& memo) {
    auto it = memo.find(t);
    if (it != memo.end()) return it->second;
    TermSum out;
    switch (t.kind()) {
    case ResTerm::Kind::Bound:
    case ResTerm::Kind::Free: out = TermSum::of(t); break;
    case ResTerm::Kind::Lam: out = lam_sum(partial_nf(t.body(), memo)); break;
    case ResTerm::Kind::MApp: {
        TermSum funs = partial_nf(t.fun(), memo);
        MonoSum bags = partial_nf_items(t.bag_items(), memo);
        for (const auto& [f, cf] : funs.entries()) {
            for (const auto& [b, cb] : bags.entries()) {
                Coeff k = cf * cb;
                if (f.kind() == ResTerm::Kind::Lam) {
                    TermSum fired = res_beta_fire(ResTerm::m_app(f, b));
                    for (const auto& [u, cu] : fired.entries())
                        out += partial_nf(u, memo).times(cu * k);
                } else {
                    out.add(ResTerm::m_app(f, b), k);
                }
            }
        }
        break;
    }
    }
    memo.emplace(t, out);
    return out;
}

inline MonoSum partial_nf_items(std::span<const ResTerm> items,
                                std::unordered_map<ResTerm, TermSum, ResTermHash>& memo) {
    MonoSum acc = MonoSum::of(ResMonomial());
    for (const auto& t : items) acc = cons_sum(partial_nf(t, memo), acc);
    return acc;
}

} // namespace detail

// The unique normal sum of the base resource reduction, by leftmost-innermost
// firing extended to sums by linearity.
inline TermSum partial_normal_form(const ResTerm& t) {
    std::unordered_map<ResTerm, TermSum, ResTermHash> memo;
    return detail::partial_nf(t, memo);
}

inline TermSum partial_normal_form(const TermSum& sum) {
    std::unordered_map<ResTerm, TermSum, ResTermHash> memo;
    TermSum out;
    for (const auto& [t, c] : sum.entries()) out += detail::partial_nf(t, memo).times(c);
    return out;
}

// ---------------------------------------------------------------------------
// Non-erasing epsilon reduction and its normal form
// ---------------------------------------------------------------------------

inline bool has_eps_ne_redex(const ResTerm& t) {
    if (is_res_redex(t) && !res_redex_is_erasing(t)) return true;
    if (res_sigma1_shape(t)) return true;
    switch (t.kind()) {
    case ResTerm::Kind::Bound:
    case ResTerm::Kind::Free: return false;
    case ResTerm::Kind::Lam: return has_eps_ne_redex(t.body());
    case ResTerm::Kind::MApp: {
        if (has_eps_ne_redex(t.fun())) return true;
        for (const auto& u : t.bag_items())
            if (has_eps_ne_redex(u)) return true;
        return false;
    }
    }
    return false;
}

namespace detail {

// Leftmost-innermost one-step of the non-erasing epsilon reduction.
inline std::optional<TermSum> eps_ne_step(const ResTerm& t) {
    switch (t.kind()) {
    case ResTerm::Kind::Bound:
    case ResTerm::Kind::Free: return std::nullopt;
    case ResTerm::Kind::Lam:
        if (auto s = eps_ne_step(t.body())) return lam_sum(*s);
        return std::nullopt;
    case ResTerm::Kind::MApp: {
        if (auto s = eps_ne_step(t.fun())) return app_sum(*s, MonoSum::of(t.bag()));
        ResMonomial bag = t.bag();
        for (std::size_t i = 0; i < bag.width(); ++i) {
            if (i > 0 && bag.items()[i] == bag.items()[i - 1]) continue;
            if (auto s = eps_ne_step(bag.items()[i])) {
                return app_sum(TermSum::of(t.fun()),
                               cons_sum(*s, MonoSum::of(bag.without_index(i))));
            }
        }
        if (is_res_redex(t) && !res_redex_is_erasing(t)) return res_beta_fire(t);
        if (res_sigma1_shape(t)) return TermSum::of(res_sigma1_fire(t));
        return std::nullopt;
    }
    }
    return std::nullopt;
}

struct EpsNeEngine {
    explicit EpsNeEngine(std::size_t fires) : fires_left(fires) {}

    std::size_t fires_left;
    bool exceeded = false;
    std::unordered_map<ResTerm, TermSum, ResTermHash> memo;

    TermSum normalize(const ResTerm& t) {
        auto it = memo.find(t);
        if (it != memo.end()) return it->second;
        auto step = eps_ne_step(t);
        if (!step) {
            TermSum self = TermSum::of(t);
            memo.emplace(t, self);
            return self;
        }
        if (fires_left == 0) {
            exceeded = true;
            return TermSum::of(t);
        }
        --fires_left;
        TermSum out = normalize(*step);
        if (!exceeded) memo.emplace(t, out);
        return out;
    }

    TermSum normalize(const TermSum& sum) {
        TermSum out;
        for (const auto& [t, c] : sum.entries()) {
            out += normalize(t).times(c);
            if (exceeded) break;
        }
        return out;
    }
};

} // namespace detail

// The unique normal form of the non-erasing epsilon reduction (possibly the
// zero sum).
inline TermSum nf_eps_nonerasing(const ResTerm& t) {
    detail::EpsNeEngine engine(static_cast<std::size_t>(-1));
    return engine.normalize(t);
}

inline TermSum nf_eps_nonerasing(const TermSum& sum) {
    detail::EpsNeEngine engine(static_cast<std::size_t>(-1));
    return engine.normalize(sum);
}

// Budgeted variant for the analyzers; nullopt when the fire budget runs out.
inline std::optional<TermSum> nf_eps_nonerasing_bounded(const ResTerm& t,
                                                        std::size_t max_fires) {
    detail::EpsNeEngine engine(max_fires);
    TermSum out = engine.normalize(t);
    if (engine.exceeded) return std::nullopt;
    return out;
}

// ---------------------------------------------------------------------------
// Parallel reduction (simultaneous non-erasing epsilon steps)
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<TermSum> parallel_rec(const ResTerm& t);

inline std::vector<MonoSum> parallel_rec_mono(const std::vector<ResTerm>& items) {
    std::vector<MonoSum> acc{MonoSum::of(ResMonomial())};
    for (const auto& item : items) {
        std::vector<MonoSum> next;
        for (const auto& head : parallel_rec(item))
            for (const auto& tail : acc) next.push_back(cons_sum(head, tail));
        std::sort(next.begin(), next.end(),
                  [](const MonoSum& a, const MonoSum& b) { return a < b; });
        next.erase(std::unique(next.begin(), next.end()), next.end());
        acc = std::move(next);
    }
    return acc;
}

inline TermSum nsub_sum(const TermSum& body, const MonoSum& bag) {
    TermSum out;
    for (const auto& [s, cs] : body.entries()) {
        for (const auto& [b, cb] : bag.entries()) {
            ResTerm redex = ResTerm::m_app(ResTerm::lam(s), b);
            out += res_beta_fire(redex).times(cs * cb);
        }
    }
    return out;
}

inline std::vector<TermSum> parallel_rec(const ResTerm& t) {
    std::vector<TermSum> out{TermSum::of(t)}; // reflexivity
    switch (t.kind()) {
    case ResTerm::Kind::Bound:
    case ResTerm::Kind::Free: return out;
    case ResTerm::Kind::Lam:
        for (const auto& s : parallel_rec(t.body())) out.push_back(lam_sum(s));
        break;
    case ResTerm::Kind::MApp: {
        auto funs = parallel_rec(t.fun());
        auto bags = parallel_rec_mono(t.bag_items());
        for (const auto& f : funs)
            for (const auto& b : bags) out.push_back(app_sum(f, b));
        if (is_res_redex(t) && !res_redex_is_erasing(t)) {
            for (const auto& s : parallel_rec(t.fun().body()))
                for (const auto& b : bags) out.push_back(nsub_sum(s, b));
        }
        if (res_sigma1_shape(t)) {
            auto inner_bodies = parallel_rec(t.fun().fun().body());
            auto inner_bags = parallel_rec_mono(t.fun().bag_items());
            for (const auto& s : inner_bodies) {
                for (const auto& q : bags) {
                    MonoSum shifted;
                    for (const auto& [m, c] : q.entries()) shifted.add(res_shift(m, 1), c);
                    for (const auto& b : inner_bags)
                        out.push_back(app_sum(lam_sum(app_sum(s, shifted)), b));
                }
            }
        }
        break;
    }
    }
    return sorted_unique(std::move(out));
}

} // namespace detail

// All one-step parallel reducts (always contains the term itself).
inline std::vector<TermSum> parallel_successors(const ResTerm& t) {
    return detail::parallel_rec(t);
}

// ---------------------------------------------------------------------------
// Positivity
// ---------------------------------------------------------------------------

inline bool is_positive_res(const ResTerm& t) {
    switch (t.kind()) {
    case ResTerm::Kind::Bound:
    case ResTerm::Kind::Free: return true;
    case ResTerm::Kind::Lam: return is_positive_res(t.body());
    case ResTerm::Kind::MApp: {
        if (t.bag_items().empty()) return false;
        if (!is_positive_res(t.fun())) return false;
        for (const auto& u : t.bag_items())
            if (!is_positive_res(u)) return false;
        return true;
    }
    }
    return false;
}

// ---------------------------------------------------------------------------
// Surface syntax: "<s>[t1,...,tn]", "[]", sums as "c1*s1 + c2*s2"
// ---------------------------------------------------------------------------

namespace detail {

inline ResTerm parse_res_rec(TokenCursor& cur, std::vector<std::string>& binders);

inline ResMonomial parse_res_monomial_rec(TokenCursor& cur, std::vector<std::string>& binders) {
    cur.expect('[', "'[' starting a bag");
    std::vector<ResTerm> items;
    if (cur.eat(']')) return ResMonomial::of(std::move(items));
    while (true) {
        items.push_back(parse_res_rec(cur, binders));
        if (cur.eat(',')) continue;
        cur.expect(']', "']' or ','");
        break;
    }
    return ResMonomial::of(std::move(items));
}

inline ResTerm parse_res_rec(TokenCursor& cur, std::vector<std::string>& binders) {
    if (cur.eat_lambda()) {
        std::vector<std::string> names;
        while (auto n = cur.name()) names.push_back(*n);
        if (names.empty()) throw ParseError("expected binder name", cur.pos());
        cur.expect('.', "'.' after binders");
        for (const auto& n : names) binders.push_back(n);
        ResTerm body = parse_res_rec(cur, binders);
        for (std::size_t i = 0; i < names.size(); ++i) {
            binders.pop_back();
            body = ResTerm::lam(body);
        }
        return body;
    }
    if (cur.eat('<')) {
        ResTerm fun = parse_res_rec(cur, binders);
        cur.expect('>', "'>' closing an application head");
        ResMonomial bag = parse_res_monomial_rec(cur, binders);
        return ResTerm::m_app(fun, bag);
    }
    if (cur.eat('(')) {
        ResTerm inner = parse_res_rec(cur, binders);
        cur.expect(')', "')'");
        return inner;
    }
    if (auto n = cur.name()) {
        for (std::size_t i = binders.size(); i-- > 0;)
            if (binders[i] == *n) return ResTerm::bound(static_cast<int>(binders.size() - 1 - i));
        return ResTerm::free_var(*n);
    }
    throw ParseError("expected resource term", cur.pos());
}

inline void render_res_rec(const ResTerm& t, std::vector<std::string>& binders,
                           std::string& out) {
    switch (t.kind()) {
    case ResTerm::Kind::Bound:
        out += binders[binders.size() - 1 - static_cast<std::size_t>(t.index())];
        return;
    case ResTerm::Kind::Free: out += name_text(t.name()); return;
    case ResTerm::Kind::Lam: {
        std::set<std::string> avoid;
        const std::function<void(const ResTerm&)> collect = [&](const ResTerm& u) {
            switch (u.kind()) {
            case ResTerm::Kind::Free: avoid.insert(name_text(u.name())); break;
            case ResTerm::Kind::Lam: collect(u.body()); break;
            case ResTerm::Kind::MApp:
                collect(u.fun());
                for (const auto& v : u.bag_items()) collect(v);
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
        render_res_rec(t.body(), binders, out);
        binders.pop_back();
        return;
    }
    case ResTerm::Kind::MApp: {
        out += '<';
        render_res_rec(t.fun(), binders, out);
        out += ">[";
        bool first = true;
        for (const auto& u : t.bag_items()) {
            if (!first) out += ", ";
            first = false;
            render_res_rec(u, binders, out);
        }
        out += ']';
        return;
    }
    }
}

} // namespace detail

inline ResTerm parse_res_term(std::string_view text) {
    detail::TokenCursor cur(text);
    std::vector<std::string> binders;
    ResTerm t = detail::parse_res_rec(cur, binders);
    if (!cur.done()) throw ParseError("trailing input", cur.pos());
    return t;
}

inline ResMonomial parse_res_monomial(std::string_view text) {
    detail::TokenCursor cur(text);
    std::vector<std::string> binders;
    ResMonomial m = detail::parse_res_monomial_rec(cur, binders);
    if (!cur.done()) throw ParseError("trailing input", cur.pos());
    return m;
}

inline TermSum parse_res_sum(std::string_view text) {
    detail::TokenCursor cur(text);
    if (cur.eat('0')) {
        if (!cur.done()) throw ParseError("trailing input", cur.pos());
        return TermSum{};
    }
    TermSum out;
    while (true) {
        cur.skip_ws();
        Coeff coeff = 1;
        std::size_t start = cur.pos();
        std::string digits;
        while (std::isdigit(static_cast<unsigned char>(cur.peek()))) {
            digits += cur.peek();
            cur.eat(cur.peek());
        }
        if (!digits.empty()) {
            coeff = Coeff(digits);
            if (!cur.eat('*')) throw ParseError("expected '*' after coefficient", start);
        }
        std::vector<std::string> binders;
        out.add(detail::parse_res_rec(cur, binders), coeff);
        if (!cur.eat('+')) break;
    }
    if (!cur.done()) throw ParseError("trailing input", cur.pos());
    return out;
}

inline std::string render(const ResTerm& t) {
    std::string out;
    std::vector<std::string> binders;
    detail::render_res_rec(t, binders, out);
    return out;
}

inline std::string render(const ResMonomial& m) {
    std::string out = "[";
    bool first = true;
    std::vector<std::string> binders;
    for (const auto& t : m.items()) {
        if (!first) out += ", ";
        first = false;
        detail::render_res_rec(t, binders, out);
    }
    out += ']';
    return out;
}

inline std::string render(const TermSum& sum) {
    if (sum.is_zero()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [t, c] : sum.entries()) {
        if (!first) out += " + ";
        first = false;
        if (c != 1) {
            out += c.str();
            out += '*';
        }
        out += render(t);
    }
    return out;
}

} // namespace taylam
