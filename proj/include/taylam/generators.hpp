#pragma once

#include <random>
#include <string>
#include <vector>

#include "taylam/resource.hpp"
#include "taylam/rigid.hpp"
#include "taylam/syntax.hpp"

namespace taylam {

// Seeded random source for the law harness. Draws go through next() so that
// reports are reproducible across platforms and standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next(std::uint64_t bound) { return engine_() % bound; }
    bool chance(std::uint64_t num, std::uint64_t den) { return next(den) < num; }

private:
    std::mt19937_64 engine_;
};

namespace detail {

inline const std::vector<std::string>& free_name_pool() {
    static const std::vector<std::string> pool = {"x", "y", "z"};
    return pool;
}

// Generates a term with exactly `size` nodes so that the harness actually
// exercises the requested size bound. Application functions are biased
// toward abstractions to keep the redex density up.
inline Term random_lambda_sized(Rng& rng, std::size_t size, int depth, bool lambda_I);

inline Term random_lambda_abstraction(Rng& rng, std::size_t size, int depth, bool lambda_I) {
    Term body = random_lambda_sized(rng, size - 1, depth + 1, lambda_I);
    if (lambda_I && !detail::bound_occurs(body, 0)) body = Term::app(body, Term::bound(0));
    return Term::lam(body);
}

inline Term random_lambda_sized(Rng& rng, std::size_t size, int depth, bool lambda_I) {
    if (size <= 1) {
        if (depth > 0 && (lambda_I || rng.chance(3, 5)))
            return Term::bound(static_cast<int>(rng.next(depth)));
        const auto& pool = free_name_pool();
        return Term::free_var(pool[rng.next(pool.size())]);
    }
    bool make_lam = size == 2 || rng.chance(1, 3);
    if (make_lam) return random_lambda_abstraction(rng, size, depth, lambda_I);
    std::size_t left = 1 + rng.next(size - 2);
    Term fun = left >= 2 && rng.chance(1, 2)
                   ? random_lambda_abstraction(rng, left, depth, lambda_I)
                   : random_lambda_sized(rng, left, depth, lambda_I);
    return Term::app(fun, random_lambda_sized(rng, size - 1 - left, depth, lambda_I));
}

} // namespace detail

inline Term random_lambda_term(Rng& rng, std::size_t size_bound) {
    std::size_t size = 1 + rng.next(size_bound);
    return detail::random_lambda_sized(rng, size, 0, false);
}

// Every abstraction binds an occurring variable (repairs unused binders by
// applying the body to the binder, so sizes may exceed the bound slightly).
inline Term random_lambda_I_term(Rng& rng, std::size_t size_bound) {
    std::size_t size = 1 + rng.next(size_bound);
    return detail::random_lambda_sized(rng, size, 0, true);
}

namespace detail {

inline RigidTerm random_rigid_sized(Rng& rng, std::size_t size, int depth, bool positive) {
    if (size <= 1) {
        if (depth > 0 && rng.chance(3, 5))
            return RigidTerm::bound(static_cast<int>(rng.next(depth)));
        const auto& pool = free_name_pool();
        return RigidTerm::free_var(pool[rng.next(pool.size())]);
    }
    std::size_t min_app = positive ? 3 : 2; // 1 + fun + (positive ? one arg : none)
    bool make_lam = size < min_app || rng.chance(2, 5);
    if (make_lam)
        return RigidTerm::lam(random_rigid_sized(rng, size - 1, depth + 1, positive));
    // Linear application: size = 1 + fun + args, args of width w with >= w nodes.
    std::size_t rest = size - 1;
    std::size_t max_width = std::min<std::size_t>(rest - 1, 3);
    std::size_t min_width = positive ? 1 : 0;
    std::size_t width = min_width + rng.next(max_width - min_width + 1);
    std::size_t fun_size = 1 + rng.next(rest - width); // leaves >= width for args
    std::size_t arg_total = rest - fun_size;
    RigidTerm fun = fun_size >= 2 && rng.chance(1, 2)
                        ? RigidTerm::lam(random_rigid_sized(rng, fun_size - 1, depth + 1,
                                                            positive))
                        : random_rigid_sized(rng, fun_size, depth, positive);
    std::vector<RigidTerm> args;
    for (std::size_t i = 0; i < width; ++i) {
        std::size_t remaining_slots = width - i - 1;
        std::size_t arg_size =
            remaining_slots == 0 ? arg_total : 1 + rng.next(arg_total - remaining_slots);
        args.push_back(random_rigid_sized(rng, arg_size, depth, positive));
        arg_total -= arg_size;
    }
    return RigidTerm::lin_app(fun, RigidMonomial::of(args));
}

} // namespace detail

inline RigidTerm random_rigid_term(Rng& rng, std::size_t size_bound) {
    std::size_t size = 1 + rng.next(size_bound);
    return detail::random_rigid_sized(rng, size, 0, false);
}

inline RigidTerm random_positive_rigid_term(Rng& rng, std::size_t size_bound) {
    std::size_t size = 1 + rng.next(size_bound);
    return detail::random_rigid_sized(rng, size, 0, true);
}

namespace detail {

inline ResTerm random_res_sized(Rng& rng, std::size_t size, int depth, bool positive) {
    if (size <= 1) {
        if (depth > 0 && rng.chance(3, 5))
            return ResTerm::bound(static_cast<int>(rng.next(depth)));
        const auto& pool = free_name_pool();
        return ResTerm::free_var(pool[rng.next(pool.size())]);
    }
    std::size_t min_app = positive ? 3 : 2;
    bool make_lam = size < min_app || rng.chance(2, 5);
    if (make_lam) return ResTerm::lam(random_res_sized(rng, size - 1, depth + 1, positive));
    std::size_t rest = size - 1;
    std::size_t max_width = std::min<std::size_t>(rest - 1, 3);
    std::size_t min_width = positive ? 1 : 0;
    std::size_t width = min_width + rng.next(max_width - min_width + 1);
    std::size_t fun_size = 1 + rng.next(rest - width);
    std::size_t arg_total = rest - fun_size;
    ResTerm fun = fun_size >= 2 && rng.chance(1, 2)
                      ? ResTerm::lam(random_res_sized(rng, fun_size - 1, depth + 1, positive))
                      : random_res_sized(rng, fun_size, depth, positive);
    std::vector<ResTerm> bag;
    for (std::size_t i = 0; i < width; ++i) {
        std::size_t remaining_slots = width - i - 1;
        std::size_t arg_size =
            remaining_slots == 0 ? arg_total : 1 + rng.next(arg_total - remaining_slots);
        bag.push_back(random_res_sized(rng, arg_size, depth, positive));
        arg_total -= arg_size;
    }
    return ResTerm::m_app(fun, ResMonomial::of(bag));
}

} // namespace detail

inline ResTerm random_res_term(Rng& rng, std::size_t size_bound) {
    std::size_t size = 1 + rng.next(size_bound);
    return detail::random_res_sized(rng, size, 0, false);
}

inline ResTerm random_positive_res_term(Rng& rng, std::size_t size_bound) {
    std::size_t size = 1 + rng.next(size_bound);
    return detail::random_res_sized(rng, size, 0, true);
}

} // namespace taylam
