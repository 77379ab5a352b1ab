#include <catch2/catch_amalgamated.hpp>

#include <atomic>
#include <thread>

#include "taylam/generators.hpp"
#include "taylam/syntax.hpp"

using namespace taylam;

namespace {

Term T(const std::string& text) { return parse_term(text); }

const char* OMEGA = "(\\x. x x) (\\x. x x)";

} // namespace

TEST_CASE("parsing produces nameless terms, alpha-equivalent inputs collapse") {
    Term id = T("\\x. x");
    REQUIRE(id.kind() == Term::Kind::Lam);
    REQUIRE(id.body().kind() == Term::Kind::Bound);
    REQUIRE(id.body().index() == 0);
    REQUIRE(T("\\x. x") == T("\\y. y"));
    REQUIRE(T("\\x. \\y. x y") == T("\\a. \\b. a b"));
    REQUIRE(T("\\x. x") != T("\\x. \\y. x"));
}

TEST_CASE("application is left-associative, abstraction body extends right") {
    Term t = T("x (\\y. y) z");
    REQUIRE(t.kind() == Term::Kind::App);
    REQUIRE(t.arg() == Term::free_var("z"));
    REQUIRE(t.fun().kind() == Term::Kind::App);
    REQUIRE(t.fun().fun() == Term::free_var("x"));
    REQUIRE(T("\\x. x x") == Term::lam(Term::app(Term::bound(0), Term::bound(0))));
    REQUIRE(T("\\x y. x") == T("\\x. \\y. x"));
    Term omega = T(OMEGA);
    Term self = Term::lam(Term::app(Term::bound(0), Term::bound(0)));
    REQUIRE(omega == Term::app(self, self));
}

TEST_CASE("parse errors carry a position") {
    REQUIRE_THROWS_AS(T("(\\x. x"), ParseError);
    REQUIRE_THROWS_AS(T("\\. x"), ParseError);
    REQUIRE_THROWS_AS(T(""), ParseError);
    REQUIRE_THROWS_AS(T("x )"), ParseError);
}

TEST_CASE("render uses minimal parentheses and reparses") {
    REQUIRE(render(T("\\x. x")) == "\\x. x");
    REQUIRE(render(Term::app(Term::free_var("x"),
                             Term::app(Term::free_var("y"), Term::free_var("z")))) ==
            "x (y z)");
    REQUIRE(render(T(OMEGA)) == "(\\x. x x) (\\x. x x)");
    REQUIRE(render(T("x y z")) == "x y z");
}

TEST_CASE("render then parse is the identity up to alpha on random terms") {
    Rng rng(2024);
    for (int i = 0; i < 300; ++i) {
        Term t = random_lambda_term(rng, 10);
        REQUIRE(parse_term(render(t)) == t);
    }
}

TEST_CASE("free variables") {
    REQUIRE(free_vars(T("\\x. x")).empty());
    std::set<NameId> ys{intern_name("y")};
    REQUIRE(free_vars(T("\\x. x y")) == ys);
    Term t = Term::app(T("\\x. y"), T(OMEGA));
    REQUIRE(free_vars(t) == ys);
}

TEST_CASE("substitution is capture-avoiding") {
    REQUIRE(substitute(T("x x"), "x", T("\\y. y")) == T("(\\y. y) (\\y. y)"));
    // (\y. x)[x := y] must not capture y.
    Term r = substitute(T("\\y. x"), "x", T("y"));
    REQUIRE(r == Term::lam(Term::free_var("y")));
    REQUIRE(render(r) != "\\y. y");
    // Bound occurrences are untouched.
    REQUIRE(substitute(T("(\\x. x x) x"), "x", T("\\w. w")) == T("(\\x. x x) (\\w. w)"));
}

TEST_CASE("substitution agrees with a naive named-term oracle on capture-free cases") {
    // The oracle substitutes on the surface text; valid because the value is
    // closed so no capture can occur.
    auto naive = [](const std::string& m, const std::string& x, const std::string& n) {
        std::string out;
        detail::TokenCursor cur(m);
        // textual replacement of the standalone name x
        std::size_t i = 0;
        while (i < m.size()) {
            if (std::isalpha(static_cast<unsigned char>(m[i]))) {
                std::size_t j = i;
                while (j < m.size() &&
                       (std::isalnum(static_cast<unsigned char>(m[j])) || m[j] == '_' ||
                        m[j] == '\''))
                    ++j;
                std::string word = m.substr(i, j - i);
                out += (word == x) ? "(" + n + ")" : word;
                i = j;
            } else {
                out += m[i++];
            }
        }
        return out;
    };
    std::string m = "x (y x) z";
    REQUIRE(substitute(T(m), "x", T("\\w. w w")) == T(naive(m, "x", "\\w. w w")));
    REQUIRE(substitute(T("x x"), "x", T("\\y. y")) == T(naive("x x", "x", "\\y. y")));
}

TEST_CASE("head decomposition") {
    SECTION("abstracted head variable") {
        HeadDecomposition d = head_decompose(T("\\x. x y"));
        REQUIRE(d.binders == 1);
        REQUIRE(d.core == Term::bound(0));
        REQUIRE_FALSE(d.core_is_redex);
        REQUIRE(d.args == std::vector<Term>{Term::free_var("y")});
    }
    SECTION("redex core keeps trailing arguments") {
        Term t = T("(\\x. p) q r");
        HeadDecomposition d = head_decompose(t);
        REQUIRE(d.binders == 0);
        REQUIRE(d.core == T("(\\x. p) q"));
        REQUIRE(d.core_is_redex);
        REQUIRE(d.args == std::vector<Term>{Term::free_var("r")});
    }
    SECTION("bare variable") {
        HeadDecomposition d = head_decompose(T("x"));
        REQUIRE(d.binders == 0);
        REQUIRE(d.core == Term::free_var("x"));
        REQUIRE(d.args.empty());
    }
}

TEST_CASE("head decomposition reassembles to the original term") {
    Rng rng(7);
    for (int i = 0; i < 400; ++i) {
        Term t = random_lambda_term(rng, 12);
        REQUIRE(reassemble(head_decompose(t)) == t);
    }
}

TEST_CASE("head step") {
    Term omega = T(OMEGA);
    REQUIRE(head_step(omega) == omega);
    REQUIRE(head_step(Term::app(T("\\x. y"), omega)) == Term::free_var("y"));
    Term hnf = T("\\z. x ((\\x. x x) (\\x. x x))");
    REQUIRE(head_step(hnf) == hnf);
}

TEST_CASE("head step is the identity exactly on head-normal forms") {
    Rng rng(11);
    for (int i = 0; i < 400; ++i) {
        Term t = random_lambda_term(rng, 10);
        REQUIRE((head_step(t) == t) == is_head_normal_form(t));
    }
}

TEST_CASE("left-parallel step") {
    REQUIRE(left_parallel_step(T("x ((\\y. y) z)")) == T("x z"));
    REQUIRE(left_parallel_step(T("(\\x. x) y")) == Term::free_var("y"));
    // x Omega cycles under L: the argument reproduces itself.
    Term t = Term::app(Term::free_var("x"), T(OMEGA));
    Term cur = t;
    for (int i = 0; i < 5; ++i) {
        cur = left_parallel_step(cur);
        REQUIRE(cur == t);
        REQUIRE_FALSE(is_beta_normal_form(cur));
    }
}

TEST_CASE("left-parallel fires no redex exactly on beta-normal forms") {
    Rng rng(13);
    for (int i = 0; i < 400; ++i) {
        Term t = random_lambda_term(rng, 10);
        std::size_t fired = 0;
        left_parallel_step(t, &fired);
        REQUIRE((fired == 0) == is_beta_normal_form(t));
    }
}

TEST_CASE("left-parallel reducts are reachable by as many beta steps as were fired") {
    Rng rng(15);
    for (int i = 0; i < 200; ++i) {
        Term t = random_lambda_term(rng, 10);
        std::size_t fired = 0;
        Term l = left_parallel_step(t, &fired);
        if (fired == 0) continue;
        std::set<Term> frontier{t};
        bool reached = false;
        for (std::size_t depth = 0; depth < fired && !reached; ++depth) {
            std::set<Term> next;
            for (const Term& u : frontier)
                for (const Term& v : beta_successors(u)) next.insert(v);
            reached = next.count(l) > 0;
            frontier = std::move(next);
        }
        REQUIRE(reached);
    }
}

TEST_CASE("one-step relations") {
    SECTION("non-erasing on (\\x. y) Omega only steps inside Omega") {
        Term t = Term::app(T("\\x. y"), T(OMEGA));
        auto succ = lambda_successors(t, StrategyKind::NonErasing);
        REQUIRE(succ == std::vector<Term>{t});
    }
    SECTION("sigma1 rearranges a stacked redex") {
        Term t = T("((\\x. m) n) p");
        auto succ = lambda_successors(t, StrategyKind::Sigma1);
        REQUIRE(succ == std::vector<Term>{T("(\\x. m p) n")});
    }
    SECTION("a non-erasing normal form that is not beta-normal") {
        Term t = T("((\\y. \\x. x x) z) (\\x. x x)");
        REQUIRE(lambda_successors(t, StrategyKind::NonErasing).empty());
        REQUIRE_FALSE(classify(t).is_beta_nf);
    }
    SECTION("erasing fires the top redex of (\\x. y) z") {
        auto succ = lambda_successors(T("(\\x. y) z"), StrategyKind::Erasing);
        REQUIRE(succ == std::vector<Term>{Term::free_var("y")});
    }
    SECTION("head and left-parallel are not relations") {
        REQUIRE_THROWS_AS(lambda_successors(T("x"), StrategyKind::Head), std::invalid_argument);
        REQUIRE_THROWS_AS(lambda_successors(T("x"), StrategyKind::LeftParallel),
                          std::invalid_argument);
    }
    SECTION("beta-leftmost is deterministic") {
        auto succ = lambda_successors(T("(\\x. x) ((\\y. y) z)"), StrategyKind::BetaLeftmost);
        REQUIRE(succ == std::vector<Term>{T("(\\y. y) z")});
        REQUIRE(lambda_successors(T("\\x. x"), StrategyKind::BetaLeftmost).empty());
    }
}

TEST_CASE("non-erasing and erasing partition the beta reducts") {
    Rng rng(17);
    for (int i = 0; i < 300; ++i) {
        Term t = random_lambda_term(rng, 10);
        auto ne = lambda_successors(t, StrategyKind::NonErasing);
        auto er = lambda_successors(t, StrategyKind::Erasing);
        std::vector<Term> both = ne;
        both.insert(both.end(), er.begin(), er.end());
        REQUIRE(sorted_unique(std::move(both)) == beta_successors(t));
        auto eps = lambda_successors(t, StrategyKind::EpsilonNonErasing);
        std::vector<Term> uni = ne;
        auto s1 = lambda_successors(t, StrategyKind::Sigma1);
        uni.insert(uni.end(), s1.begin(), s1.end());
        REQUIRE(sorted_unique(std::move(uni)) == eps);
        REQUIRE(lambda_successors(t, StrategyKind::BetaLeftmost).empty() ==
                is_beta_normal_form(t));
    }
}

TEST_CASE("sigma1 steps preserve free-variable sets") {
    Rng rng(19);
    int seen = 0;
    for (int i = 0; i < 600 && seen < 100; ++i) {
        Term t = random_lambda_term(rng, 12);
        for (const Term& u : lambda_successors(t, StrategyKind::Sigma1)) {
            REQUIRE(free_vars(u) == free_vars(t));
            ++seen;
        }
    }
    REQUIRE(seen > 0);
}

TEST_CASE("deep binder stacks and decorated names round-trip") {
    std::string deep = "x";
    for (int i = 0; i < 16; ++i) deep = "\\b" + std::to_string(i) + ". " + deep + " b" + std::to_string(i);
    Term t = parse_term(deep);
    REQUIRE(parse_term(render(t)) == t);
    Term named = parse_term("foo' bar_1 Baz''");
    REQUIRE(free_vars(named).size() == 3);
    REQUIRE(parse_term(render(named)) == named);
}

TEST_CASE("terms are safely shared across threads") {
    Term omega = T(OMEGA);
    Term shared = Term::app(Term::free_var("shared"), omega);
    std::vector<std::thread> workers;
    std::atomic<int> checks{0};
    for (int w = 0; w < 4; ++w) {
        workers.emplace_back([&, w] {
            Rng rng(1000 + w);
            for (int i = 0; i < 400; ++i) {
                NameId id = intern_name("worker" + std::to_string(w) + "_" +
                                        std::to_string(rng.next(50)));
                (void)name_text(id);
                Term local = Term::app(shared, random_lambda_term(rng, 8));
                if (head_step(local) != local) ++checks;
                if (left_parallel_step(omega) == omega) ++checks;
                (void)render(local);
            }
        });
    }
    for (auto& th : workers) th.join();
    REQUIRE(checks > 0);
}

TEST_CASE("arbitrary input either parses or raises a parse error") {
    Rng rng(127);
    const std::string alphabet = "\\xy.z( )01<>[],+*\xce\xbb";
    for (int i = 0; i < 3000; ++i) {
        std::string text;
        std::size_t len = rng.next(24);
        for (std::size_t k = 0; k < len; ++k) text += alphabet[rng.next(alphabet.size())];
        try {
            Term t = parse_term(text);
            REQUIRE(parse_term(render(t)) == t);
        } catch (const ParseError&) {
        }
        try {
            RigidTerm t = parse_rigid_term(text);
            REQUIRE(parse_rigid_term(render(t)) == t);
        } catch (const ParseError&) {
        }
        try {
            parse_res_sum(text);
        } catch (const ParseError&) {
        }
    }
}

TEST_CASE("classification flags") {
    TermFlags f = classify(T("\\x. x"));
    REQUIRE((f.is_beta_nf && f.is_head_nf && f.is_non_erasing_nf && f.is_lambda_I &&
             f.is_closed));
    TermFlags g = classify(T("((\\y. \\x. x x) z) (\\x. x x)"));
    REQUIRE(g.is_non_erasing_nf);
    REQUIRE_FALSE(g.is_beta_nf);
    TermFlags h = classify(T("\\x. y"));
    REQUIRE_FALSE(h.is_lambda_I);
    REQUIRE_FALSE(h.is_closed);
    REQUIRE(classify(T("\\x. x ((\\y. y) x)")).is_lambda_I);
}
