#pragma once

#include <algorithm>
#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "taylam/term.hpp"

namespace taylam {

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

struct ParseError : std::runtime_error {
    ParseError(const std::string& message, std::size_t position)
        : std::runtime_error(message + " at offset " + std::to_string(position)),
          position(position) {}
    std::size_t position;
};

namespace detail {

class TokenCursor {
public:
    explicit TokenCursor(std::string_view text) : text_(text) {}

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    bool done() {
        skip_ws();
        return pos_ >= text_.size();
    }
    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }
    std::size_t pos() const { return pos_; }
    bool eat(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    void expect(char c, const char* what) {
        if (!eat(c)) throw ParseError(std::string("expected ") + what, pos_);
    }
    // Accepts "\" or the UTF-8 lambda.
    bool eat_lambda() {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == '\\') {
            ++pos_;
            return true;
        }
        if (pos_ + 1 < text_.size() && static_cast<unsigned char>(text_[pos_]) == 0xCE &&
            static_cast<unsigned char>(text_[pos_ + 1]) == 0xBB) {
            pos_ += 2;
            return true;
        }
        return false;
    }
    std::optional<std::string> name() {
        skip_ws();
        if (pos_ >= text_.size() || !std::isalpha(static_cast<unsigned char>(text_[pos_])))
            return std::nullopt;
        std::size_t start = pos_;
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'') ++pos_;
            else break;
        }
        return std::string(text_.substr(start, pos_ - start));
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
};

inline Term make_var(const std::string& name, const std::vector<std::string>& binders) {
    for (std::size_t i = binders.size(); i-- > 0;) {
        if (binders[i] == name) return Term::bound(static_cast<int>(binders.size() - 1 - i));
    }
    return Term::free_var(name);
}

inline Term parse_term_rec(TokenCursor& cur, std::vector<std::string>& binders);

inline std::optional<Term> parse_atom(TokenCursor& cur, std::vector<std::string>& binders) {
    if (cur.peek() == '(') {
        cur.eat('(');
        Term inner = parse_term_rec(cur, binders);
        cur.expect(')', "')'");
        return inner;
    }
    if (auto n = cur.name()) return make_var(*n, binders);
    return std::nullopt;
}

inline Term parse_lambda_tail(TokenCursor& cur, std::vector<std::string>& binders) {
    std::vector<std::string> names;
    while (auto n = cur.name()) names.push_back(*n);
    if (names.empty()) throw ParseError("expected binder name", cur.pos());
    cur.expect('.', "'.' after binders");
    for (const auto& n : names) binders.push_back(n);
    Term body = parse_term_rec(cur, binders);
    for (std::size_t i = 0; i < names.size(); ++i) {
        binders.pop_back();
        body = Term::lam(body);
    }
    return body;
}

inline Term parse_term_rec(TokenCursor& cur, std::vector<std::string>& binders) {
    if (cur.eat_lambda()) return parse_lambda_tail(cur, binders);
    auto first = parse_atom(cur, binders);
    if (!first) throw ParseError("expected term", cur.pos());
    Term acc = *first;
    while (true) {
        // An abstraction in argument position extends maximally right, so
        // "x \y. y z" reads as "x (\y. y z)".
        if (cur.eat_lambda()) return Term::app(acc, parse_lambda_tail(cur, binders));
        auto next = parse_atom(cur, binders);
        if (!next) break;
        acc = Term::app(acc, *next);
    }
    return acc;
}

} // namespace detail

inline Term parse_term(std::string_view text) {
    detail::TokenCursor cur(text);
    std::vector<std::string> binders;
    Term t = detail::parse_term_rec(cur, binders);
    if (!cur.done()) throw ParseError("trailing input", cur.pos());
    return t;
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

namespace detail {

inline const std::vector<std::string>& binder_candidates() {
    static const std::vector<std::string> names = {"x", "y", "z", "u", "v", "w",
                                                   "f", "g", "h", "s", "t", "r"};
    return names;
}

inline std::string pick_binder_name(const std::set<std::string>& avoid) {
    for (const auto& n : binder_candidates())
        if (!avoid.count(n)) return n;
    for (int i = 1;; ++i) {
        std::string n = "x" + std::to_string(i);
        if (!avoid.count(n)) return n;
    }
}

enum class RenderPos { Top, Fun, Arg };

inline void render_rec(const Term& t, std::vector<std::string>& binders, RenderPos pos,
                       std::string& out) {
    switch (t.kind()) {
    case Term::Kind::Bound: {
        std::size_t i = binders.size() - 1 - static_cast<std::size_t>(t.index());
        out += binders[i];
        return;
    }
    case Term::Kind::Free: out += name_text(t.name()); return;
    case Term::Kind::Lam: {
        bool parens = pos != RenderPos::Top;
        if (parens) out += '(';
        std::set<std::string> avoid;
        for (NameId id : free_vars(t.body())) avoid.insert(name_text(id));
        for (const auto& b : binders) avoid.insert(b);
        std::string name = pick_binder_name(avoid);
        out += '\\';
        out += name;
        out += ". ";
        binders.push_back(name);
        render_rec(t.body(), binders, RenderPos::Top, out);
        binders.pop_back();
        if (parens) out += ')';
        return;
    }
    case Term::Kind::App: {
        bool parens = pos == RenderPos::Arg;
        if (parens) out += '(';
        render_rec(t.fun(), binders, RenderPos::Fun, out);
        out += ' ';
        render_rec(t.arg(), binders, RenderPos::Arg, out);
        if (parens) out += ')';
        return;
    }
    }
}

} // namespace detail

inline std::string render(const Term& t) {
    std::string out;
    std::vector<std::string> binders;
    detail::render_rec(t, binders, detail::RenderPos::Top, out);
    return out;
}

// ---------------------------------------------------------------------------
// Canonical head decomposition: every term is \x1...xm. core N1...Nn with
// core either a redex or a variable.
// ---------------------------------------------------------------------------

struct HeadDecomposition {
    int binders = 0;
    Term core;
    std::vector<Term> args;
    bool core_is_redex = false;
};

inline HeadDecomposition head_decompose(const Term& t) {
    HeadDecomposition d{0, t, {}, false};
    Term cur = t;
    while (cur.kind() == Term::Kind::Lam) {
        ++d.binders;
        cur = cur.body();
    }
    std::vector<Term> rev_args;
    while (cur.kind() == Term::Kind::App && cur.fun().kind() == Term::Kind::App) {
        rev_args.push_back(cur.arg());
        cur = cur.fun();
    }
    if (cur.kind() == Term::Kind::App && cur.fun().kind() != Term::Kind::Lam) {
        rev_args.push_back(cur.arg());
        cur = cur.fun();
    }
    d.core = cur;
    d.core_is_redex = is_redex(cur);
    d.args.assign(rev_args.rbegin(), rev_args.rend());
    return d;
}

inline Term reassemble(const HeadDecomposition& d) {
    Term t = d.core;
    for (const Term& a : d.args) t = Term::app(t, a);
    for (int i = 0; i < d.binders; ++i) t = Term::lam(t);
    return t;
}

// ---------------------------------------------------------------------------
// Deterministic strategies H and L (total functions, identity on their
// normal forms).
// ---------------------------------------------------------------------------

inline Term head_step(const Term& t) {
    HeadDecomposition d = head_decompose(t);
    if (!d.core_is_redex) return t;
    Term contracted = beta_contract(d.core.fun().body(), d.core.arg());
    Term out = contracted;
    for (const Term& a : d.args) out = Term::app(out, a);
    for (int i = 0; i < d.binders; ++i) out = Term::lam(out);
    return out;
}

inline bool is_head_normal_form(const Term& t) { return !head_decompose(t).core_is_redex; }

inline bool is_beta_normal_form(const Term& t) {
    switch (t.kind()) {
    case Term::Kind::Bound:
    case Term::Kind::Free: return true;
    case Term::Kind::Lam: return is_beta_normal_form(t.body());
    case Term::Kind::App:
        return !is_redex(t) && is_beta_normal_form(t.fun()) && is_beta_normal_form(t.arg());
    }
    return true;
}

// Left-parallel reduction; `fired` (when given) counts contracted redexes,
// and is zero exactly on beta-normal forms.
inline Term left_parallel_step(const Term& t, std::size_t* fired = nullptr) {
    std::size_t local = 0;
    HeadDecomposition d = head_decompose(t);
    Term result = t;
    if (d.core_is_redex) {
        local = 1;
        result = head_step(t);
    } else if (!d.args.empty()) {
        std::vector<Term> args;
        args.reserve(d.args.size());
        for (const Term& a : d.args) {
            std::size_t sub = 0;
            args.push_back(left_parallel_step(a, &sub));
            local += sub;
        }
        if (local > 0) {
            HeadDecomposition nd = d;
            nd.args = std::move(args);
            result = reassemble(nd);
        }
    }
    if (fired) *fired = local;
    return result;
}

// ---------------------------------------------------------------------------
// One-step contextual relations
// ---------------------------------------------------------------------------

enum class StrategyKind {
    BetaLeftmost,
    Head,
    LeftParallel,
    NonErasing,
    Erasing,
    Sigma1,
    EpsilonNonErasing,
};

enum class StepDir { LamBody, AppFun, AppArg };
enum class StepRule { BetaNonErasing, BetaErasing, Sigma1 };

struct LambdaStep {
    Term result;
    std::vector<StepDir> path;
    StepRule rule;
};

namespace detail {

inline Term apply_sigma1(const Term& t) {
    // ((\x. b) n) p  ->  (\x. b p') n, shifting p under the binder.
    Term b = t.fun().fun().body();
    Term n = t.fun().arg();
    Term p = t.arg();
    return Term::app(Term::lam(Term::app(b, shift_term(p, 1))), n);
}

inline bool is_sigma1_redex(const Term& t) {
    return t.kind() == Term::Kind::App && is_redex(t.fun());
}

inline void collect_lambda_steps(const Term& t, bool want_non_erasing, bool want_erasing,
                                 bool want_sigma1, std::vector<StepDir>& path,
                                 const std::function<Term(const Term&)>& rebuild,
                                 std::vector<LambdaStep>& out) {
    if (is_redex(t)) {
        bool erasing = redex_is_erasing(t);
        if ((erasing && want_erasing) || (!erasing && want_non_erasing)) {
            Term fired = beta_contract(t.fun().body(), t.arg());
            out.push_back({rebuild(fired), path,
                           erasing ? StepRule::BetaErasing : StepRule::BetaNonErasing});
        }
    }
    if (want_sigma1 && is_sigma1_redex(t)) {
        out.push_back({rebuild(apply_sigma1(t)), path, StepRule::Sigma1});
    }
    switch (t.kind()) {
    case Term::Kind::Bound:
    case Term::Kind::Free: return;
    case Term::Kind::Lam: {
        path.push_back(StepDir::LamBody);
        auto wrap = [&](const Term& u) { return rebuild(Term::lam(u)); };
        collect_lambda_steps(t.body(), want_non_erasing, want_erasing, want_sigma1, path, wrap,
                             out);
        path.pop_back();
        return;
    }
    case Term::Kind::App: {
        path.push_back(StepDir::AppFun);
        Term arg_copy = t.arg();
        auto wrap_fun = [&rebuild, arg_copy](const Term& u) {
            return rebuild(Term::app(u, arg_copy));
        };
        collect_lambda_steps(t.fun(), want_non_erasing, want_erasing, want_sigma1, path, wrap_fun,
                             out);
        path.pop_back();
        path.push_back(StepDir::AppArg);
        Term fun_copy = t.fun();
        auto wrap_arg = [&rebuild, fun_copy](const Term& u) {
            return rebuild(Term::app(fun_copy, u));
        };
        collect_lambda_steps(t.arg(), want_non_erasing, want_erasing, want_sigma1, path, wrap_arg,
                             out);
        path.pop_back();
        return;
    }
    }
}

inline std::optional<Term> leftmost_beta_step(const Term& t) {
    if (is_redex(t)) return beta_contract(t.fun().body(), t.arg());
    switch (t.kind()) {
    case Term::Kind::Bound:
    case Term::Kind::Free: return std::nullopt;
    case Term::Kind::Lam:
        if (auto b = leftmost_beta_step(t.body())) return Term::lam(*b);
        return std::nullopt;
    case Term::Kind::App:
        if (auto f = leftmost_beta_step(t.fun())) return Term::app(*f, t.arg());
        if (auto a = leftmost_beta_step(t.arg())) return Term::app(t.fun(), *a);
        return std::nullopt;
    }
    return std::nullopt;
}

} // namespace detail

inline std::vector<LambdaStep> lambda_step_candidates(const Term& t, StrategyKind kind) {
    bool ne = false, er = false, s1 = false;
    switch (kind) {
    case StrategyKind::NonErasing: ne = true; break;
    case StrategyKind::Erasing: er = true; break;
    case StrategyKind::Sigma1: s1 = true; break;
    case StrategyKind::EpsilonNonErasing: ne = s1 = true; break;
    default: throw std::invalid_argument("not a contextual one-step relation");
    }
    std::vector<LambdaStep> out;
    std::vector<StepDir> path;
    detail::collect_lambda_steps(t, ne, er, s1, path, [](const Term& u) { return u; }, out);
    return out;
}

inline std::vector<Term> sorted_unique(std::vector<Term> terms) {
    std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a < b; });
    terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
    return terms;
}

// One-step reducts under the designated relation; empty exactly on the
// relation's normal forms.
inline std::vector<Term> lambda_successors(const Term& t, StrategyKind kind) {
    if (kind == StrategyKind::BetaLeftmost) {
        if (auto n = detail::leftmost_beta_step(t)) return {*n};
        return {};
    }
    if (kind == StrategyKind::Head || kind == StrategyKind::LeftParallel)
        throw std::invalid_argument("head/left-parallel are the deterministic functions");
    std::vector<Term> out;
    for (auto& step : lambda_step_candidates(t, kind)) out.push_back(step.result);
    return sorted_unique(std::move(out));
}

// All one-step beta reducts (non-erasing plus erasing).
inline std::vector<Term> beta_successors(const Term& t) {
    std::vector<Term> out;
    for (auto& s : lambda_step_candidates(t, StrategyKind::NonErasing)) out.push_back(s.result);
    for (auto& s : lambda_step_candidates(t, StrategyKind::Erasing)) out.push_back(s.result);
    return sorted_unique(std::move(out));
}

inline std::vector<LambdaStep> beta_step_candidates(const Term& t) {
    std::vector<LambdaStep> out = lambda_step_candidates(t, StrategyKind::NonErasing);
    auto er = lambda_step_candidates(t, StrategyKind::Erasing);
    out.insert(out.end(), er.begin(), er.end());
    return out;
}

// ---------------------------------------------------------------------------
// Structural classification
// ---------------------------------------------------------------------------

struct TermFlags {
    bool is_beta_nf = false;
    bool is_head_nf = false;
    bool is_non_erasing_nf = false;
    bool is_lambda_I = false;
    bool is_closed = false;
};

namespace detail {

inline bool no_non_erasing_redex(const Term& t) {
    switch (t.kind()) {
    case Term::Kind::Bound:
    case Term::Kind::Free: return true;
    case Term::Kind::Lam: return no_non_erasing_redex(t.body());
    case Term::Kind::App:
        if (is_redex(t) && !redex_is_erasing(t)) return false;
        return no_non_erasing_redex(t.fun()) && no_non_erasing_redex(t.arg());
    }
    return true;
}

inline bool is_lambda_I_term(const Term& t) {
    switch (t.kind()) {
    case Term::Kind::Bound:
    case Term::Kind::Free: return true;
    case Term::Kind::Lam:
        return bound_occurs(t.body(), 0) && is_lambda_I_term(t.body());
    case Term::Kind::App: return is_lambda_I_term(t.fun()) && is_lambda_I_term(t.arg());
    }
    return true;
}

} // namespace detail

inline TermFlags classify(const Term& t) {
    TermFlags f;
    f.is_beta_nf = is_beta_normal_form(t);
    f.is_head_nf = is_head_normal_form(t);
    f.is_non_erasing_nf = detail::no_non_erasing_redex(t);
    f.is_lambda_I = detail::is_lambda_I_term(t);
    f.is_closed = free_vars(t).empty();
    return f;
}

} // namespace taylam
