#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "taylam/generators.hpp"
#include "taylam/resource.hpp"

using namespace taylam;

namespace {

ResTerm M(const std::string& text) { return parse_res_term(text); }
ResMonomial MB(const std::string& text) { return parse_res_monomial(text); }

Coeff factorial(std::size_t n) {
    Coeff f = 1;
    for (std::size_t i = 2; i <= n; ++i) f *= static_cast<unsigned>(i);
    return f;
}

} // namespace

TEST_CASE("bags are unordered") {
    REQUIRE(MB("[x, \\y. y]") == MB("[\\y. y, x]"));
    REQUIRE(M("<x>[y, z]") == M("<x>[z, y]"));
    REQUIRE(MB("[x, x]") != MB("[x]"));
}

TEST_CASE("resource surface syntax round-trips") {
    Rng rng(47);
    for (int i = 0; i < 300; ++i) {
        ResTerm t = random_res_term(rng, 14);
        REQUIRE(parse_res_term(render(t)) == t);
    }
    REQUIRE(parse_res_sum("0").is_zero());
    TermSum s = parse_res_sum("2*<x>[y] + z");
    REQUIRE(s.coefficient(M("<x>[y]")) == 2);
    REQUIRE(s.coefficient(M("z")) == 1);
    REQUIRE(parse_res_sum(render(s)) == s);
}

TEST_CASE("n-linear substitution base cases") {
    NameId x = intern_name("x");
    REQUIRE(n_linear_substitute(M("x"), x, MB("[t]")) == TermSum::of(M("t")));
    TermSum two = n_linear_substitute(M("<x>[x]"), x, MB("[u, v]"));
    TermSum expected;
    expected.add(M("<u>[v]"), 1);
    expected.add(M("<v>[u]"), 1);
    REQUIRE(two == expected);
    REQUIRE(n_linear_substitute(M("y"), x, MB("[u]")).is_zero());
    REQUIRE(n_linear_substitute(M("y"), x, MB("[]")) == TermSum::of(M("y")));
}

TEST_CASE("duplicated resources merge coefficients") {
    NameId x = intern_name("x");
    TermSum s = n_linear_substitute(M("<x>[x]"), x, MB("[u, u]"));
    REQUIRE(s.support_size() == 1);
    REQUIRE(s.coefficient(M("<u>[u]")) == 2);
    REQUIRE(s.total_mass() == 2);
}

TEST_CASE("coefficients stay exact at factorial scale") {
    NameId x = intern_name("x");
    // Seven occurrences, seven identical resources: all 7! assignments merge.
    ResTerm e = M("<x>[x, x, x, x, x, x]");
    ResMonomial bag = MB("[u, u, u, u, u, u, u]");
    TermSum s = n_linear_substitute(e, x, bag);
    REQUIRE(s.support_size() == 1);
    REQUIRE(s.coefficient(M("<u>[u, u, u, u, u, u]")) == 5040);
    ResMonomial mixed = MB("[u, u, u, u, u, u, v]");
    TermSum m = n_linear_substitute(e, x, mixed);
    REQUIRE(m.total_mass() == 5040);
    REQUIRE(m.support_size() == 2); // v in the head, or v among the arguments
}

TEST_CASE("partition recursion agrees with the permutation definition") {
    Rng rng(53);
    NameId x = intern_name("x");
    int checked = 0;
    for (int i = 0; i < 500 && checked < 250; ++i) {
        ResTerm e = random_res_term(rng, 10);
        std::size_t n = res_occurrences(e, x);
        if (n > 4) continue;
        std::vector<ResTerm> values;
        for (std::size_t k = 0; k < n; ++k) values.push_back(random_res_term(rng, 3));
        ResMonomial bag = ResMonomial::of(values);
        TermSum lib = n_linear_substitute(e, x, bag);
        TermSum oracle = oracles::permutation_substitute(e, x, bag);
        REQUIRE(lib == oracle);
        REQUIRE(lib.total_mass() == factorial(n));
        ++checked;
    }
    REQUIRE(checked >= 100);
}

TEST_CASE("monomial substitution agrees with the permutation definition") {
    Rng rng(59);
    NameId x = intern_name("x");
    int checked = 0;
    for (int i = 0; i < 400 && checked < 150; ++i) {
        std::vector<ResTerm> items;
        std::size_t w = 1 + rng.next(3);
        for (std::size_t k = 0; k < w; ++k) items.push_back(random_res_term(rng, 5));
        ResMonomial e = ResMonomial::of(items);
        std::size_t n = res_occurrences(e, x);
        if (n > 4) continue;
        std::vector<ResTerm> values;
        for (std::size_t k = 0; k < n; ++k) values.push_back(random_res_term(rng, 3));
        ResMonomial bag = ResMonomial::of(values);
        MonoSum lib = n_linear_substitute(e, x, bag);
        MonoSum oracle = oracles::permutation_substitute(e, x, bag);
        REQUIRE(lib == oracle);
        ++checked;
    }
    REQUIRE(checked >= 50);
}

TEST_CASE("one-step reducts of the base reduction") {
    TermSum fired;
    fired.add(M("<u>[v]"), 1);
    fired.add(M("<v>[u]"), 1);
    REQUIRE(partial_successors(M("<\\x. <x>[x]>[u, v]")) == std::vector<TermSum>{fired});
    REQUIRE(partial_successors(M("<\\x. x>[]")) == std::vector<TermSum>{TermSum{}});
    REQUIRE(partial_successors(M("x")).empty());
    // Reduction happens inside bags too.
    auto succ = partial_successors(M("<x>[<\\y. y>[z]]"));
    REQUIRE(succ == std::vector<TermSum>{TermSum::of(M("<x>[z]"))});
}

TEST_CASE("normal forms of the base reduction") {
    REQUIRE(partial_normal_form(M("<\\x. <x>[x]>[\\x. <x>[x]]")).is_zero());
    REQUIRE(partial_normal_form(M("<x>[]")) == TermSum::of(M("<x>[]")));
    TermSum nf = partial_normal_form(M("<\\x. <x>[x]>[\\y. y, z]"));
    TermSum expected;
    expected.add(M("z"), 1);
    expected.add(M("<z>[\\y. y]"), 1);
    REQUIRE(nf == expected);
    auto oracle = oracles::brute_force_partial_nf(M("<\\x. <x>[x]>[\\y. y, z]"));
    REQUIRE(oracle.has_value());
    REQUIRE(*oracle == expected);
}

TEST_CASE("all reduction orders agree on random terms") {
    Rng rng(61);
    for (int i = 0; i < 150; ++i) {
        ResTerm t = random_res_term(rng, 12);
        auto oracle = oracles::brute_force_partial_nf(t);
        REQUIRE(oracle.has_value());
        REQUIRE(*oracle == partial_normal_form(t));
    }
}

TEST_CASE("strategy-restricted one-step relations") {
    SECTION("erasing fires an empty-bag redex") {
        auto succ = res_successors(M("<\\x. y>[]"), ResStrategyKind::PartialErasing);
        REQUIRE(succ == std::vector<TermSum>{TermSum::of(M("y"))});
    }
    SECTION("sigma1 rearranges without substitution") {
        auto succ = res_successors(M("<<\\x. s>[t]>[q]"), ResStrategyKind::PartialSigma1);
        REQUIRE(succ == std::vector<TermSum>{TermSum::of(M("<\\x. <s>[q]>[t]"))});
        for (const auto& s : succ) REQUIRE(s.support_size() == 1);
    }
    SECTION("an erasing redex is not non-erasing") {
        REQUIRE(res_successors(M("<\\x. y>[z]"), ResStrategyKind::PartialNonErasing).empty());
    }
    SECTION("the union relation") {
        Rng rng(67);
        for (int i = 0; i < 200; ++i) {
            ResTerm t = random_res_term(rng, 12);
            auto ne = res_successors(t, ResStrategyKind::PartialNonErasing);
            auto s1 = res_successors(t, ResStrategyKind::PartialSigma1);
            std::vector<TermSum> uni = ne;
            uni.insert(uni.end(), s1.begin(), s1.end());
            REQUIRE(sorted_unique(std::move(uni)) ==
                    res_successors(t, ResStrategyKind::EpsilonNonErasing));
            auto er = res_successors(t, ResStrategyKind::PartialErasing);
            std::vector<TermSum> beta = ne;
            beta.insert(beta.end(), er.begin(), er.end());
            REQUIRE(sorted_unique(std::move(beta)) == partial_successors(t));
        }
    }
}

TEST_CASE("non-erasing epsilon normal form") {
    REQUIRE(nf_eps_nonerasing(M("<\\x. <x>[x]>[\\x. <x>[x]]")).is_zero());
    REQUIRE(nf_eps_nonerasing(M("<\\x. y>[z]")) == TermSum::of(M("<\\x. y>[z]")));
    REQUIRE(nf_eps_nonerasing(M("<<\\x. x>[y]>[z]")) == TermSum::of(M("<y>[z]")));
    // A sigma1 rearrangement can be forced before any substitution fires.
    REQUIRE(nf_eps_nonerasing(M("<<\\x. y>[z]>[w]")) == TermSum::of(M("<\\x. <y>[w]>[z]")));
}

TEST_CASE("bounded normalizer reports exhaustion") {
    ResTerm t = M("<<\\x. x>[y]>[z]");
    REQUIRE_FALSE(nf_eps_nonerasing_bounded(t, 0).has_value());
    auto full = nf_eps_nonerasing_bounded(t, 64);
    REQUIRE(full.has_value());
    REQUIRE(*full == nf_eps_nonerasing(t));
}

TEST_CASE("exhaustive graphs of the non-erasing epsilon reduction are single-sink") {
    Rng rng(71);
    for (int i = 0; i < 80; ++i) {
        ResTerm t = random_res_term(rng, 12);
        std::set<TermSum> seen;
        std::vector<TermSum> frontier{TermSum::of(t)};
        seen.insert(frontier.front());
        std::set<TermSum> sinks;
        bool capped = false;
        while (!frontier.empty()) {
            TermSum cur = frontier.back();
            frontier.pop_back();
            auto succ = sum_successors(cur, ResStrategyKind::EpsilonNonErasing);
            if (succ.empty()) sinks.insert(cur);
            for (const auto& next : succ) {
                if (seen.insert(next).second) frontier.push_back(next);
            }
            if (seen.size() > 20000) {
                capped = true;
                break;
            }
        }
        REQUIRE_FALSE(capped);
        REQUIRE(sinks.size() == 1);
        REQUIRE(*sinks.begin() == nf_eps_nonerasing(t));
    }
}

TEST_CASE("parallel reduction") {
    REQUIRE(parallel_successors(M("x")) == std::vector<TermSum>{TermSum::of(M("x"))});
    ResTerm t = M("<\\x. <x>[]>[y]");
    auto par = parallel_successors(t);
    REQUIRE(std::find(par.begin(), par.end(), TermSum::of(t)) != par.end());
    REQUIRE(std::find(par.begin(), par.end(), TermSum::of(M("<y>[]"))) != par.end());
}

TEST_CASE("parallel reduction sits between one step and many steps") {
    Rng rng(73);
    for (int i = 0; i < 100; ++i) {
        ResTerm t = random_res_term(rng, 10);
        auto par = parallel_successors(t);
        // Contains every one-step reduct.
        for (const auto& s : res_successors(t, ResStrategyKind::EpsilonNonErasing)) {
            REQUIRE(std::find(par.begin(), par.end(), s) != par.end());
        }
        // And each parallel reduct is reachable by iterated one-steps.
        std::set<TermSum> reach;
        std::vector<TermSum> frontier{TermSum::of(t)};
        reach.insert(frontier.front());
        while (!frontier.empty() && reach.size() < 20000) {
            TermSum cur = frontier.back();
            frontier.pop_back();
            for (const auto& next : sum_successors(cur, ResStrategyKind::EpsilonNonErasing))
                if (reach.insert(next).second) frontier.push_back(next);
        }
        for (const auto& s : par) REQUIRE(reach.count(s) == 1);
    }
}

TEST_CASE("positivity") {
    REQUIRE_FALSE(is_positive_res(M("<x>[]")));
    REQUIRE(is_positive_res(M("<x>[y]")));
    REQUIRE_FALSE(is_positive_res(M("\\x. <x>[<y>[]]")));
}

TEST_CASE("positivity is preserved by base steps") {
    Rng rng(79);
    for (int i = 0; i < 200; ++i) {
        ResTerm t = random_positive_res_term(rng, 12);
        REQUIRE(is_positive_res(t));
        for (const auto& sum : partial_successors(t))
            for (const auto& [u, c] : sum.entries()) REQUIRE(is_positive_res(u));
    }
}
