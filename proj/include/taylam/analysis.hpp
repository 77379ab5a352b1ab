#pragma once

#include <deque>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "taylam/expansion.hpp"

namespace taylam {

enum class AnalysisProperty { Head, Solvable, Beta, Strong };

inline const char* property_name(AnalysisProperty p) {
    switch (p) {
    case AnalysisProperty::Head: return "head";
    case AnalysisProperty::Solvable: return "solvable";
    case AnalysisProperty::Beta: return "beta";
    case AnalysisProperty::Strong: return "strong";
    }
    return "?";
}

// Three-valued analysis result. Yes carries a witness, No carries evidence
// (a cycle or a complete reduction graph), Unknown carries the spent budget.
struct Verdict {
    enum class Outcome { Yes, No, Unknown };
    Outcome outcome = Outcome::Unknown;
    std::optional<std::string> witness;
    std::vector<std::string> trace;
    Budget budget_used;
    std::string reason;
};

inline const char* outcome_name(Verdict::Outcome o) {
    switch (o) {
    case Verdict::Outcome::Yes: return "yes";
    case Verdict::Outcome::No: return "no";
    case Verdict::Outcome::Unknown: return "unknown";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Expansion-based semi-decision
// ---------------------------------------------------------------------------

// Abstracts the free names of m in first-occurrence order.
inline Term close_term(const Term& m) {
    std::vector<NameId> order = free_vars_in_order(m);
    Term out = m;
    for (std::size_t i = order.size(); i-- > 0;) {
        NameId x = order[i];
        const std::function<Term(const Term&, int)> bind = [&](const Term& u, int depth) -> Term {
            switch (u.kind()) {
            case Term::Kind::Bound: return u;
            case Term::Kind::Free:
                return u.name() == x ? Term::bound(depth) : u;
            case Term::Kind::Lam: return Term::lam(bind(u.body(), depth + 1));
            case Term::Kind::App: return Term::app(bind(u.fun(), depth), bind(u.arg(), depth));
            }
            throw std::logic_error("unreachable");
        };
        out = Term::lam(bind(out, 0));
    }
    return out;
}

namespace detail {

inline std::vector<std::string> render_sum_trace(const ResTerm& start, std::size_t max_steps) {
    std::vector<std::string> lines;
    TermSum cur = TermSum::of(start);
    lines.push_back(render(cur));
    for (std::size_t i = 0; i < max_steps; ++i) {
        std::optional<TermSum> next;
        for (const auto& [t, c] : cur.entries()) {
            if (auto step = eps_ne_step(t)) {
                TermSum after = cur;
                after.remove_one(t);
                after += *step;
                next = std::move(after);
                break;
            }
        }
        if (!next) break;
        cur = *next;
        lines.push_back(render(cur));
    }
    return lines;
}

} // namespace detail

// Semi-decides the property by searching the bounded expansion for a witness
// approximant. Never returns No: an exhausted search is Unknown.
inline Verdict analyze(const Term& m, AnalysisProperty property, const Budget& budget) {
    Verdict v;
    v.budget_used = budget;
    switch (property) {
    case AnalysisProperty::Solvable: {
        Verdict inner = analyze(close_term(m), AnalysisProperty::Head, budget);
        inner.reason = "solvable via head analysis of the closure: " + inner.reason;
        return inner;
    }
    case AnalysisProperty::Head:
    case AnalysisProperty::Beta: {
        for (const auto& a : rigid_expand(m, budget)) {
            RigidTerm nf = r_normal_form(a);
            if (nf.is_zero()) continue;
            if (property == AnalysisProperty::Beta && !is_positive_rigid(nf)) continue;
            v.outcome = Verdict::Outcome::Yes;
            v.witness = render(a);
            for (const auto& step : r_normal_form_trace(a)) v.trace.push_back(render(step));
            v.reason = property == AnalysisProperty::Head
                           ? "approximant with a non-zero normal form"
                           : "approximant with a positive normal form";
            return v;
        }
        v.outcome = Verdict::Outcome::Unknown;
        v.reason = "expansion budget exhausted without a witness";
        return v;
    }
    case AnalysisProperty::Strong: {
        bool skipped = false;
        for (const auto& s : taylor_support_expand(m, budget)) {
            if (!is_positive_res(s)) continue;
            auto nf = nf_eps_nonerasing_bounded(s, budget.max_steps);
            if (!nf) {
                skipped = true;
                continue;
            }
            if (nf->is_zero()) continue;
            v.outcome = Verdict::Outcome::Yes;
            v.witness = render(s);
            v.trace = detail::render_sum_trace(s, budget.max_steps);
            v.reason = "positive support element with a non-zero normal form";
            return v;
        }
        v.outcome = Verdict::Outcome::Unknown;
        v.reason = skipped ? "expansion budget exhausted (some normalizations cut short)"
                           : "expansion budget exhausted without a witness";
        return v;
    }
    }
    return v;
}

// ---------------------------------------------------------------------------
// Direct reduction oracles
// ---------------------------------------------------------------------------

enum class OracleProperty { Head, Beta, Strong };

namespace detail {

constexpr std::size_t kMaxTraceLines = 48;

inline void push_trace(std::vector<std::string>& trace, const Term& t) {
    if (trace.size() < kMaxTraceLines) trace.push_back(render(t));
    else if (trace.size() == kMaxTraceLines) trace.push_back("...");
}

inline Verdict iterate_deterministic(const Term& m, bool head_only, std::size_t fuel) {
    Verdict v;
    v.budget_used = Budget(1, 1, std::max<std::size_t>(fuel, 1));
    std::unordered_set<Term, TermHash> seen;
    Term cur = m;
    push_trace(v.trace, cur);
    for (std::size_t i = 0; i < fuel; ++i) {
        bool done = head_only ? is_head_normal_form(cur) : is_beta_normal_form(cur);
        if (done) {
            v.outcome = Verdict::Outcome::Yes;
            v.witness = render(cur);
            v.reason = head_only ? "head-normal form reached" : "beta-normal form reached";
            return v;
        }
        seen.insert(cur);
        cur = head_only ? head_step(cur) : left_parallel_step(cur);
        push_trace(v.trace, cur);
        if (seen.count(cur)) {
            v.outcome = Verdict::Outcome::No;
            v.reason = "deterministic reduction revisits a term (divergence)";
            if (v.trace.back() == "...") v.trace.push_back(render(cur));
            return v;
        }
    }
    v.outcome = Verdict::Outcome::Unknown;
    v.reason = "fuel exhausted";
    return v;
}

inline Verdict explore_beta_graph(const Term& m, std::size_t fuel) {
    Verdict v;
    v.budget_used = Budget(1, 1, std::max<std::size_t>(fuel, 1));
    // Iterative depth-first search with an explicit stack; a back edge to a
    // term on the current path is a cycle, i.e. an infinite reduction.
    std::unordered_map<Term, std::vector<Term>, TermHash> succs;
    std::unordered_set<Term, TermHash> done;
    std::unordered_set<Term, TermHash> on_stack;
    std::vector<std::pair<Term, std::size_t>> stack;
    auto expand = [&](const Term& t) -> const std::vector<Term>& {
        auto it = succs.find(t);
        if (it == succs.end()) it = succs.emplace(t, beta_successors(t)).first;
        return it->second;
    };
    stack.push_back({m, 0});
    on_stack.insert(m);
    while (!stack.empty()) {
        if (succs.size() > fuel) {
            v.outcome = Verdict::Outcome::Unknown;
            v.reason = "node budget exhausted";
            return v;
        }
        auto& [t, idx] = stack.back();
        const auto& next = expand(t);
        if (idx == next.size()) {
            on_stack.erase(t);
            done.insert(t);
            stack.pop_back();
            continue;
        }
        Term child = next[idx++];
        if (on_stack.count(child)) {
            v.outcome = Verdict::Outcome::No;
            v.reason = "reduction graph has a cycle";
            for (const auto& [u, i] : stack) push_trace(v.trace, u);
            v.trace.push_back(render(child));
            return v;
        }
        if (done.count(child)) continue;
        stack.push_back({child, 0});
        on_stack.insert(child);
    }
    v.outcome = Verdict::Outcome::Yes;
    v.witness = render(m);
    v.reason = "finite acyclic reduction graph with " + std::to_string(done.size()) + " terms";
    return v;
}

} // namespace detail

// Independent lambda-level checker: iterated head reduction, iterated
// left-parallel reduction with cycle detection, or exhaustive beta-graph
// exploration. Only exact revisits count as divergence.
inline Verdict oracle(const Term& m, OracleProperty property, std::size_t fuel) {
    switch (property) {
    case OracleProperty::Head: return detail::iterate_deterministic(m, true, fuel);
    case OracleProperty::Beta: return detail::iterate_deterministic(m, false, fuel);
    case OracleProperty::Strong: return detail::explore_beta_graph(m, fuel);
    }
    return {};
}

// ---------------------------------------------------------------------------
// The inductive set S
// ---------------------------------------------------------------------------

namespace detail {

struct SEngine {
    std::size_t fuel;
    std::unordered_map<Term, bool, TermHash> memo;
    std::unordered_set<Term, TermHash> in_progress;

    explicit SEngine(std::size_t f) : fuel(f) {}

    Verdict::Outcome decide(const Term& m) {
        auto hit = memo.find(m);
        if (hit != memo.end())
            return hit->second ? Verdict::Outcome::Yes : Verdict::Outcome::No;
        // The clause split is deterministic, so a cyclic dependency can never
        // be discharged by a finite derivation.
        if (in_progress.count(m)) return Verdict::Outcome::No;
        if (fuel == 0) return Verdict::Outcome::Unknown;
        --fuel;
        in_progress.insert(m);
        Verdict::Outcome out = decide_shape(m);
        in_progress.erase(m);
        if (out != Verdict::Outcome::Unknown) memo.emplace(m, out == Verdict::Outcome::Yes);
        return out;
    }

private:
    Verdict::Outcome combine(Verdict::Outcome a, Verdict::Outcome b) {
        if (a == Verdict::Outcome::No || b == Verdict::Outcome::No)
            return Verdict::Outcome::No;
        if (a == Verdict::Outcome::Unknown || b == Verdict::Outcome::Unknown)
            return Verdict::Outcome::Unknown;
        return Verdict::Outcome::Yes;
    }

    Verdict::Outcome decide_shape(const Term& m) {
        if (m.kind() == Term::Kind::Lam) return decide(m.body());
        HeadDecomposition d = head_decompose(m); // binders == 0 here
        if (!d.core_is_redex) {
            Verdict::Outcome acc = Verdict::Outcome::Yes;
            for (const auto& q : d.args) acc = combine(acc, decide(q));
            return acc;
        }
        Term m1 = d.core.arg();
        Verdict::Outcome first = decide(m1);
        if (first == Verdict::Outcome::No) return Verdict::Outcome::No;
        Term contracted = beta_contract(d.core.fun().body(), m1);
        for (const auto& q : d.args) contracted = Term::app(contracted, q);
        return combine(first, decide(contracted));
    }
};

} // namespace detail

// Membership in the inductive set whose elements are exactly the strongly
// normalizable terms; fuel bounds the number of clause applications.
inline Verdict in_S(const Term& m, std::size_t fuel) {
    detail::SEngine engine(fuel);
    Verdict v;
    v.budget_used = Budget(1, 1, std::max<std::size_t>(fuel, 1));
    v.outcome = engine.decide(m);
    switch (v.outcome) {
    case Verdict::Outcome::Yes:
        v.witness = render(m);
        v.reason = "derivable by the inductive clauses";
        break;
    case Verdict::Outcome::No: v.reason = "no finite derivation exists"; break;
    case Verdict::Outcome::Unknown: v.reason = "fuel exhausted"; break;
    }
    return v;
}

// ---------------------------------------------------------------------------
// Conservation check for lambda-I terms
// ---------------------------------------------------------------------------

// Runs both reduction oracles and reports whether they agree; on lambda-I
// terms two definite verdicts must never disagree.
inline Verdict check_conservation(const Term& m, std::size_t fuel) {
    if (!classify(m).is_lambda_I)
        throw std::invalid_argument("conservation check requires a lambda-I term");
    Verdict beta = oracle(m, OracleProperty::Beta, fuel);
    Verdict strong = oracle(m, OracleProperty::Strong, fuel);
    Verdict v;
    v.budget_used = Budget(1, 1, std::max<std::size_t>(fuel, 1));
    v.trace.push_back(std::string("beta: ") + outcome_name(beta.outcome));
    v.trace.push_back(std::string("strong: ") + outcome_name(strong.outcome));
    bool beta_definite = beta.outcome != Verdict::Outcome::Unknown;
    bool strong_definite = strong.outcome != Verdict::Outcome::Unknown;
    if (beta_definite && strong_definite) {
        if (beta.outcome == strong.outcome) {
            v.outcome = Verdict::Outcome::Yes;
            v.witness = render(m);
            v.reason = "normalization and strong normalization verdicts agree";
        } else {
            v.outcome = Verdict::Outcome::No;
            v.reason = "definite verdicts disagree";
        }
        return v;
    }
    v.outcome = Verdict::Outcome::Unknown;
    v.reason = "at least one oracle ran out of fuel";
    return v;
}

} // namespace taylam
