#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "taylam/generators.hpp"
#include "taylam/rigid.hpp"

using namespace taylam;

namespace {

RigidTerm R(const std::string& text) { return parse_rigid_term(text); }
RigidMonomial RM(const std::string& text) { return parse_rigid_monomial(text); }

const char* RIGID_OMEGA = "<\\x. <x>(x)>(\\x. <x>(x))";

} // namespace

TEST_CASE("zero is absorbing through the smart constructors") {
    REQUIRE(RigidTerm::lam(RigidTerm::zero()).is_zero());
    REQUIRE(RigidTerm::lin_app(RigidTerm::zero(), RM("(x)")).is_zero());
    REQUIRE(RigidTerm::lin_app(R("x"), RigidMonomial::zero()).is_zero());
    REQUIRE(RigidMonomial::of({R("x"), RigidTerm::zero()}).is_zero());
    REQUIRE(R("<0>(x)").is_zero());
}

TEST_CASE("size is positive on non-zero terms and matches the definition") {
    REQUIRE(RigidTerm::zero().size() == 0);
    REQUIRE(R("x").size() == 1);
    REQUIRE(R("\\x. x").size() == 2);
    REQUIRE(R("<x>(y, z)").size() == 4);
    REQUIRE(R(RIGID_OMEGA).size() == 9);
}

TEST_CASE("rigid surface syntax round-trips") {
    Rng rng(3);
    for (int i = 0; i < 300; ++i) {
        RigidTerm t = random_rigid_term(rng, 14);
        REQUIRE(parse_rigid_term(render(t)) == t);
    }
    REQUIRE(render(RigidTerm::zero()) == "0");
    REQUIRE(render(RM("()")) == "()");
    REQUIRE(parse_rigid_monomial("0").is_zero());
}

TEST_CASE("occurrence counting") {
    REQUIRE(occurrences(R("<x>(x)"), intern_name("x")) == 2);
    REQUIRE(occurrences(R("\\x. <x>(x)"), intern_name("x")) == 0);
    REQUIRE(occurrences(R("y"), intern_name("x")) == 0);
    REQUIRE(occurrences(RM("(x, <x>(y))"), intern_name("x")) == 2);
}

TEST_CASE("rigid substitution is positional and length-checked") {
    NameId x = intern_name("x");
    REQUIRE(rigid_substitute(R("<x>(x)"), x, RM("(u, v)")) == R("<u>(v)"));
    REQUIRE(rigid_substitute(R("x"), x, RM("()")).is_zero());
    REQUIRE(rigid_substitute(R("<x>(x)"), x, RM("(\\x. <x>(x))")).is_zero());
    REQUIRE(rigid_substitute(R("y"), x, RM("()")) == R("y"));
    // Monomials split componentwise, left to right.
    REQUIRE(rigid_substitute(RM("(x, <x>(x))"), x, RM("(a, b, c)")) == RM("(a, <b>(c))"));
    REQUIRE(rigid_substitute(RM("(x)"), x, RM("(a, b)")).is_zero());
}

TEST_CASE("substitution with mismatched counts is zero on random instances") {
    Rng rng(5);
    NameId x = intern_name("x");
    for (int i = 0; i < 300; ++i) {
        RigidTerm t = random_rigid_term(rng, 10);
        std::size_t n = occurrences(t, x);
        std::vector<RigidTerm> items;
        for (std::size_t k = 0; k < n + 1; ++k) items.push_back(R("y"));
        REQUIRE(rigid_substitute(t, x, RigidMonomial::of(items)).is_zero());
        items.resize(n);
        REQUIRE_FALSE(rigid_substitute(t, x, RigidMonomial::of(items)).is_zero());
    }
}

TEST_CASE("one-step reducts") {
    REQUIRE(r_successors(R(RIGID_OMEGA)) == std::vector<RigidTerm>{RigidTerm::zero()});
    REQUIRE(r_successors(R("<\\x. x>(y)")) == std::vector<RigidTerm>{R("y")});
    REQUIRE(r_successors(R("x")).empty());
}

TEST_CASE("every reduction step strictly decreases size") {
    Rng rng(23);
    for (int i = 0; i < 500; ++i) {
        RigidTerm t = random_rigid_term(rng, 20);
        for (const auto& u : r_successors(t)) REQUIRE(u.size() < t.size());
    }
}

TEST_CASE("normal forms") {
    REQUIRE(r_normal_form(R(RIGID_OMEGA)).is_zero());
    REQUIRE(r_normal_form(R("<x>()")) == R("<x>()"));
    REQUIRE(r_normal_form(R("<\\x. <x>(x)>(\\y. y, z)")) == R("z"));
    auto oracle = oracles::brute_force_rigid_nf(R("<\\x. <x>(x)>(\\y. y, z)"));
    REQUIRE(oracle.has_value());
    REQUIRE(*oracle == R("z"));
}

TEST_CASE("reduction is confluent: all orders reach one normal form") {
    Rng rng(29);
    for (int i = 0; i < 300; ++i) {
        RigidTerm t = random_rigid_term(rng, 20);
        auto nf = oracles::brute_force_rigid_nf(t);
        REQUIRE(nf.has_value());
        REQUIRE(*nf == r_normal_form(t));
    }
}

TEST_CASE("normal form trace replays single steps") {
    auto trace = r_normal_form_trace(R("<\\x. <x>(x)>(\\y. y, z)"));
    REQUIRE(trace.front() == R("<\\x. <x>(x)>(\\y. y, z)"));
    REQUIRE(trace.back() == R("z"));
    for (std::size_t i = 0; i + 1 < trace.size(); ++i) {
        auto succ = r_successors(trace[i]);
        REQUIRE(std::find(succ.begin(), succ.end(), trace[i + 1]) != succ.end());
    }
}

TEST_CASE("head decomposition of rigid terms") {
    SECTION("variable-headed") {
        auto d = rigid_head_decompose(R("\\x. <<y>(a)>(b)"));
        REQUIRE_FALSE(d.zero);
        REQUIRE(d.binders == 1);
        REQUIRE(d.core == R("y"));
        REQUIRE_FALSE(d.core_is_redex);
        REQUIRE(d.arg_monomials == std::vector<RigidMonomial>{RM("(a)"), RM("(b)")});
    }
    SECTION("redex core") {
        auto d = rigid_head_decompose(R("<\\x. c>(d)"));
        REQUIRE(d.core_is_redex);
        REQUIRE(d.arg_monomials.empty());
    }
    SECTION("zero") { REQUIRE(rigid_head_decompose(RigidTerm::zero()).zero); }
    Rng rng(31);
    for (int i = 0; i < 300; ++i) {
        RigidTerm t = random_rigid_term(rng, 16);
        REQUIRE(rigid_reassemble(rigid_head_decompose(t)) == t);
    }
}

TEST_CASE("head resource reduction") {
    REQUIRE(rigid_head_step(R(RIGID_OMEGA)).is_zero());
    // Head-normal forms are fixed points; arguments are not entered.
    RigidTerm hnf = R("<x>(<\\y. y>(z))");
    REQUIRE(rigid_head_step(hnf) == hnf);
    REQUIRE(rigid_head_step(RigidTerm::zero()).is_zero());
    // Monomials map componentwise.
    RigidMonomial m = RM("(<\\x. x>(y), z)");
    REQUIRE(rigid_head_step(m) == RM("(y, z)"));
}

TEST_CASE("iterated head reduction reaches a head-normal form when nf is non-zero") {
    Rng rng(37);
    for (int i = 0; i < 300; ++i) {
        RigidTerm t = random_rigid_term(rng, 16);
        if (r_normal_form(t).is_zero()) continue;
        RigidTerm cur = t;
        for (std::size_t steps = 0; steps <= t.size() + 1; ++steps) {
            RigidTerm next = rigid_head_step(cur);
            if (next == cur) break;
            cur = next;
        }
        REQUIRE(rigid_head_step(cur) == cur);
        REQUIRE_FALSE(cur.is_zero());
        REQUIRE(is_rigid_head_normal(cur));
    }
}

TEST_CASE("left-parallel resource reduction") {
    REQUIRE(rigid_left_parallel_step(R("<x>(<\\y. y>(z))")) == R("<x>(z)"));
    REQUIRE(rigid_left_parallel_step(R("\\x. x")) == R("\\x. x"));
    REQUIRE(rigid_left_parallel_step(R("<\\x. x>(y)")) == R("y"));
    REQUIRE(rigid_left_parallel_step(RigidTerm::zero()).is_zero());
}

TEST_CASE("iterating left-parallel reaches the normal form") {
    Rng rng(41);
    for (int i = 0; i < 400; ++i) {
        RigidTerm t = random_rigid_term(rng, 18);
        RigidTerm expected = r_normal_form(t);
        RigidTerm cur = t;
        std::size_t bound = t.size() + 2;
        bool reached = false;
        for (std::size_t steps = 0; steps < bound; ++steps) {
            if (cur == expected) {
                reached = true;
                break;
            }
            cur = rigid_left_parallel_step(cur);
        }
        REQUIRE((reached || cur == expected));
    }
}

TEST_CASE("sigma1 rearrangement") {
    REQUIRE(rigid_sigma1_successors(R("<x>(y)")).empty());
    REQUIRE(rigid_sigma1_successors(R("<<\\x. x>(y)>(z)")) ==
            std::vector<RigidTerm>{R("<\\x. <x>(z)>(y)")});
}

TEST_CASE("positivity") {
    REQUIRE_FALSE(is_positive_rigid(R("<x>()")));
    REQUIRE(is_positive_rigid(R("<x>(y)")));
    REQUIRE_FALSE(is_positive_rigid(R("\\x. <x>(<y>())")));
    REQUIRE_FALSE(is_positive_rigid(RigidTerm::zero()));
}

TEST_CASE("the combined sigma1 reduction loses confluence on the fixed instance") {
    RigidTerm s = R("<\\y. <<\\x. <x>(x)>(y, y)>(y)>"
                    "(\\f. <z>(f), \\f. <z>(), \\f. <z>())");

    // Rearranging first drives the term to zero.
    RigidTerm s1 = R("<\\y. <\\x. <<x>(x)>(y)>(y, y)>(\\f. <z>(f), \\f. <z>(), \\f. <z>())");
    auto sig = rigid_sigma1_successors(s);
    REQUIRE(sig == std::vector<RigidTerm>{s1});
    RigidTerm s2 = R("<\\x. <<x>(x)>(\\f. <z>(f))>(\\f. <z>(), \\f. <z>())");
    auto succ1 = r_successors(s1);
    REQUIRE(std::find(succ1.begin(), succ1.end(), s2) != succ1.end());
    RigidTerm s3 = R("<<\\f. <z>()>(\\f. <z>())>(\\f. <z>(f))");
    auto succ2 = r_successors(s2);
    REQUIRE(std::find(succ2.begin(), succ2.end(), s3) != succ2.end());
    REQUIRE(r_successors(s3) == std::vector<RigidTerm>{RigidTerm::zero()});

    // Reducing first and then rearranging ends in a non-zero normal form.
    RigidTerm t1 = R("<<\\x. <x>(x)>(\\f. <z>(f), \\f. <z>())>(\\f. <z>())");
    auto succ = r_successors(s);
    REQUIRE(std::find(succ.begin(), succ.end(), t1) != succ.end());
    RigidTerm t2 = R("<\\x. <<x>(x)>(\\f. <z>())>(\\f. <z>(f), \\f. <z>())");
    auto sig2 = rigid_sigma1_successors(t1);
    REQUIRE(std::find(sig2.begin(), sig2.end(), t2) != sig2.end());
    RigidTerm t3 = R("<<\\f. <z>(f)>(\\f. <z>())>(\\f. <z>())");
    auto succ3 = r_successors(t2);
    REQUIRE(std::find(succ3.begin(), succ3.end(), t3) != succ3.end());
    RigidTerm t4 = R("<<z>(\\f. <z>())>(\\f. <z>())");
    auto succ4 = r_successors(t3);
    REQUIRE(std::find(succ4.begin(), succ4.end(), t4) != succ4.end());
    REQUIRE(r_successors(t4).empty());
    REQUIRE(rigid_sigma1_successors(t4).empty());
    REQUIRE_FALSE(t4.is_zero());
}

TEST_CASE("erasing and non-erasing rigid steps split the base reduction") {
    Rng rng(43);
    for (int i = 0; i < 300; ++i) {
        RigidTerm t = random_rigid_term(rng, 14);
        auto ne = rigid_successors(t, RigidStrategy::NonErasing);
        auto er = rigid_successors(t, RigidStrategy::Erasing);
        std::vector<RigidTerm> both = ne;
        both.insert(both.end(), er.begin(), er.end());
        REQUIRE(sorted_unique(std::move(both)) == r_successors(t));
        auto eps = rigid_successors(t, RigidStrategy::EpsilonNonErasing);
        std::vector<RigidTerm> uni = ne;
        auto s1 = rigid_sigma1_successors(t);
        uni.insert(uni.end(), s1.begin(), s1.end());
        REQUIRE(sorted_unique(std::move(uni)) == eps);
    }
}
