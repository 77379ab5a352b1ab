// Command-line front door for the taylam library: parse and print terms in
// the three surface syntaxes, reduce under any strategy, enumerate
// expansions, run the normalization analyses, and execute the law harness.
//
// Exit codes: 0 success / yes, 2 unknown, 3 no / law failure, 1 usage or
// parse error.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "taylam/taylam.hpp"

using json = nlohmann::ordered_json;
using namespace taylam;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitUnknown = 2;
constexpr int kExitNo = 3;

struct CommonOptions {
    std::string term_text;
    std::string file;
    bool json_output = false;
    bool trace = false;
    std::size_t max_size = 12;
    std::size_t max_count = 5000;
    std::size_t fuel = 200;
    std::uint64_t seed = 42;
    std::size_t cases = 200;
};

void add_common_flags(CLI::App* cmd, CommonOptions& opt, bool with_term) {
    if (with_term) cmd->add_option("term", opt.term_text, "term in surface syntax");
    cmd->add_option("--file", opt.file, "read the term from a file instead");
    cmd->add_flag("--json", opt.json_output, "emit one JSON document");
    cmd->add_flag("--trace", opt.trace, "include the step-by-step trace");
    cmd->add_option("--max-size", opt.max_size, "approximant size bound")->check(CLI::PositiveNumber);
    cmd->add_option("--max-count", opt.max_count, "enumeration cap")->check(CLI::PositiveNumber);
    cmd->add_option("--fuel", opt.fuel, "reduction fuel / node budget")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", opt.seed, "random seed");
    cmd->add_option("--cases", opt.cases, "number of random cases")->check(CLI::PositiveNumber);
}

std::string load_term_text(const CommonOptions& opt) {
    if (!opt.file.empty()) {
        std::ifstream in(opt.file);
        if (!in) throw std::runtime_error("cannot read file: " + opt.file);
        std::ostringstream buf;
        buf << in.rdbuf();
        std::string text = buf.str();
        while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
        return text;
    }
    if (opt.term_text.empty()) throw std::runtime_error("no term given (inline or --file)");
    return opt.term_text;
}

int exit_for(Verdict::Outcome outcome) {
    switch (outcome) {
    case Verdict::Outcome::Yes: return kExitOk;
    case Verdict::Outcome::Unknown: return kExitUnknown;
    case Verdict::Outcome::No: return kExitNo;
    }
    return kExitUsage;
}

json verdict_to_json(const char* property, const Verdict& v) {
    json doc;
    doc["property"] = property;
    doc["outcome"] = outcome_name(v.outcome);
    doc["witness"] = v.witness ? json(*v.witness) : json(nullptr);
    doc["trace"] = v.trace;
    doc["budget"] = {{"max-size", v.budget_used.max_size},
                     {"max-count", v.budget_used.max_count},
                     {"fuel", v.budget_used.max_steps}};
    doc["reason"] = v.reason;
    return doc;
}

void print_verdict_text(const char* property, const Verdict& v, bool trace) {
    std::cout << property << ": " << outcome_name(v.outcome) << "\n";
    if (v.witness) std::cout << "witness: " << *v.witness << "\n";
    std::cout << "reason: " << v.reason << "\n";
    if (trace)
        for (const auto& line : v.trace) std::cout << "  " << line << "\n";
}

// --- parse / render ---------------------------------------------------------

int run_parse(const CommonOptions& opt, const std::string& lang) {
    std::string text = load_term_text(opt);
    std::string canonical;
    if (lang == "lambda") canonical = render(parse_term(text));
    else if (lang == "rigid") canonical = render(parse_rigid_term(text));
    else if (lang == "resource") canonical = render(parse_res_term(text));
    else throw std::runtime_error("unknown language: " + lang);
    if (opt.json_output) {
        json doc{{"language", lang}, {"term", canonical}};
        std::cout << doc.dump(2) << "\n";
    } else {
        std::cout << canonical << "\n";
    }
    return kExitOk;
}

// --- reduce -------------------------------------------------------------------

struct StrategyInfo {
    enum class Language { Lambda, Rigid, Resource } language;
    std::string name;
};

StrategyInfo resolve_strategy(const std::string& strategy) {
    StrategyInfo info{StrategyInfo::Language::Lambda, strategy};
    if (strategy.rfind("r-", 0) == 0) {
        info.language = StrategyInfo::Language::Rigid;
        info.name = strategy.substr(2);
    } else if (strategy.rfind("d-", 0) == 0) {
        info.language = StrategyInfo::Language::Resource;
        info.name = strategy.substr(2);
    }
    return info;
}

int finish_reduce(const CommonOptions& opt, const std::string& strategy,
                  const std::vector<std::string>& steps, bool normal) {
    if (opt.json_output) {
        json doc;
        doc["strategy"] = strategy;
        doc["steps"] = opt.trace ? json(steps) : json(json::array());
        doc["result"] = steps.back();
        doc["status"] = normal ? "normal-form" : "fuel-exhausted";
        std::cout << doc.dump(2) << "\n";
    } else {
        if (opt.trace)
            for (const auto& s : steps) std::cout << s << "\n";
        else
            std::cout << steps.back() << "\n";
        if (!normal) std::cout << "(fuel exhausted)\n";
    }
    return normal ? kExitOk : kExitUnknown;
}

int run_reduce_lambda(const CommonOptions& opt, const std::string& name,
                      const std::string& strategy) {
    Term cur = parse_term(load_term_text(opt));
    auto is_normal = [&](const Term& t) {
        if (name == "head") return is_head_normal_form(t);
        if (name == "beta" || name == "left") return is_beta_normal_form(t);
        if (name == "non-erasing") return lambda_successors(t, StrategyKind::NonErasing).empty();
        if (name == "erasing") return lambda_successors(t, StrategyKind::Erasing).empty();
        if (name == "sigma1") return lambda_successors(t, StrategyKind::Sigma1).empty();
        if (name == "epsilon-ne")
            return lambda_successors(t, StrategyKind::EpsilonNonErasing).empty();
        throw std::runtime_error("unknown strategy: " + strategy);
    };
    auto step = [&](const Term& t) -> Term {
        if (name == "head") return head_step(t);
        if (name == "left") return left_parallel_step(t);
        if (name == "beta") return lambda_successors(t, StrategyKind::BetaLeftmost).front();
        StrategyKind kind = name == "non-erasing" ? StrategyKind::NonErasing
                            : name == "erasing"   ? StrategyKind::Erasing
                            : name == "sigma1"    ? StrategyKind::Sigma1
                                                  : StrategyKind::EpsilonNonErasing;
        return lambda_successors(t, kind).front(); // canonically least reduct
    };
    std::vector<std::string> steps{render(cur)};
    bool normal = is_normal(cur);
    for (std::size_t i = 0; i < opt.fuel && !normal; ++i) {
        cur = step(cur);
        steps.push_back(render(cur));
        normal = is_normal(cur);
    }
    return finish_reduce(opt, strategy, steps, normal);
}

int run_reduce_rigid(const CommonOptions& opt, const std::string& name,
                     const std::string& strategy) {
    RigidTerm cur = parse_rigid_term(load_term_text(opt));
    auto step = [&](const RigidTerm& t) -> std::optional<RigidTerm> {
        if (name == "beta") return rigid_leftmost_innermost_step(t);
        if (name == "head") {
            RigidTerm next = rigid_head_step(t);
            if (next == t) return std::nullopt;
            return next;
        }
        if (name == "left") {
            RigidTerm next = rigid_left_parallel_step(t);
            if (next == t) return std::nullopt;
            return next;
        }
        RigidStrategy kind = name == "non-erasing" ? RigidStrategy::NonErasing
                             : name == "erasing"   ? RigidStrategy::Erasing
                             : name == "sigma1"    ? RigidStrategy::Sigma1
                             : name == "epsilon-ne"
                                 ? RigidStrategy::EpsilonNonErasing
                                 : throw std::runtime_error("unknown strategy: " + strategy);
        auto succ = rigid_successors(t, kind);
        if (succ.empty()) return std::nullopt;
        return succ.front();
    };
    std::vector<std::string> steps{render(cur)};
    bool normal = false;
    for (std::size_t i = 0; i <= opt.fuel; ++i) {
        auto next = step(cur);
        if (!next) {
            normal = true;
            break;
        }
        if (i == opt.fuel) break;
        cur = *next;
        steps.push_back(render(cur));
    }
    return finish_reduce(opt, strategy, steps, normal);
}

int run_reduce_resource(const CommonOptions& opt, const std::string& name,
                        const std::string& strategy) {
    if (name == "head" || name == "left")
        throw std::runtime_error("strategy " + strategy + " is not defined for multiset terms");
    ResStrategyKind kind = name == "beta"          ? ResStrategyKind::Partial
                           : name == "non-erasing" ? ResStrategyKind::PartialNonErasing
                           : name == "erasing"     ? ResStrategyKind::PartialErasing
                           : name == "sigma1"      ? ResStrategyKind::PartialSigma1
                           : name == "epsilon-ne"
                               ? ResStrategyKind::EpsilonNonErasing
                               : throw std::runtime_error("unknown strategy: " + strategy);
    TermSum cur = TermSum::of(parse_res_term(load_term_text(opt)));
    std::vector<std::string> steps{render(cur)};
    bool normal = false;
    for (std::size_t i = 0; i <= opt.fuel; ++i) {
        auto succ = sum_successors(cur, kind);
        if (succ.empty()) {
            normal = true;
            break;
        }
        if (i == opt.fuel) break;
        cur = succ.front();
        steps.push_back(render(cur));
    }
    return finish_reduce(opt, strategy, steps, normal);
}

// --- expand ---------------------------------------------------------------------

int run_expand(const CommonOptions& opt, const std::string& kind) {
    Term m = parse_term(load_term_text(opt));
    Budget budget(opt.max_size, opt.max_count, opt.fuel);
    std::vector<std::string> lines;
    if (kind == "rigid") {
        for (const auto& a : rigid_expand(m, budget)) lines.push_back(render(a));
    } else if (kind == "taylor") {
        for (const auto& s : taylor_support_expand(m, budget)) lines.push_back(render(s));
    } else {
        throw std::runtime_error("unknown expansion kind: " + kind);
    }
    if (opt.json_output) {
        json doc{{"kind", kind}, {"count", lines.size()}, {"terms", lines}};
        std::cout << doc.dump(2) << "\n";
    } else {
        for (const auto& line : lines) std::cout << line << "\n";
    }
    return kExitOk;
}

// --- analyze ---------------------------------------------------------------------

int run_analyze(const CommonOptions& opt, const std::string& property) {
    Term m = parse_term(load_term_text(opt));
    AnalysisProperty prop;
    if (property == "head") prop = AnalysisProperty::Head;
    else if (property == "solvable") prop = AnalysisProperty::Solvable;
    else if (property == "beta") prop = AnalysisProperty::Beta;
    else if (property == "strong") prop = AnalysisProperty::Strong;
    else throw std::runtime_error("unknown property: " + property);
    Budget budget(opt.max_size, opt.max_count, opt.fuel);
    Verdict v = analyze(m, prop, budget);
    if (opt.json_output) {
        json doc = verdict_to_json(property.c_str(), v);
        if (!opt.trace) doc["trace"] = json::array();
        std::cout << doc.dump(2) << "\n";
    } else {
        print_verdict_text(property.c_str(), v, opt.trace);
    }
    return exit_for(v.outcome);
}

// --- laws ------------------------------------------------------------------------

int run_laws(const CommonOptions& opt, const std::string& law, std::size_t size_bound) {
    std::vector<std::string> names;
    if (law == "all") names = registered_laws();
    else names.push_back(law);
    bool all_passed = true;
    json docs = json::array();
    for (const auto& name : names) {
        LawReport report = check_law(name, opt.cases, opt.seed, size_bound);
        all_passed = all_passed && report.passed();
        if (opt.json_output) {
            json doc{{"law", report.law},
                     {"cases", report.cases_run},
                     {"seed", report.seed},
                     {"failures", report.failures}};
            docs.push_back(doc);
        } else {
            std::cout << report.law << ": " << (report.passed() ? "pass" : "FAIL") << " ("
                      << report.cases_run << " cases, seed " << report.seed << ")\n";
            for (const auto& f : report.failures) std::cout << "  counterexample: " << f << "\n";
            if (report.law == "rigid-confluence-failure" && report.passed()) {
                for (const auto& seq : rigid_confluence_failure_sequences()) {
                    std::cout << "  " << seq.label << ":\n";
                    for (const auto& step : seq.steps)
                        std::cout << "    " << render(step) << "\n";
                }
            }
        }
    }
    if (opt.json_output) std::cout << json{{"laws", docs}}.dump(2) << "\n";
    return all_passed ? kExitOk : kExitNo;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"rigid and multiset resource calculi with Taylor-expansion-based "
                 "normalization analysis"};
    app.require_subcommand(1);

    CommonOptions opt;
    std::string lang = "lambda";
    std::string strategy = "beta";
    std::string kind = "rigid";
    std::string property = "head";
    std::string law = "all";

    CLI::App* parse_cmd = app.add_subcommand("parse", "parse a term and print it canonically");
    add_common_flags(parse_cmd, opt, true);
    parse_cmd->add_option("--lang", lang, "lambda | rigid | resource");

    CLI::App* render_cmd = app.add_subcommand("render", "same as parse");
    add_common_flags(render_cmd, opt, true);
    render_cmd->add_option("--lang", lang, "lambda | rigid | resource");

    CLI::App* reduce_cmd = app.add_subcommand("reduce", "iterate a reduction strategy");
    add_common_flags(reduce_cmd, opt, true);
    reduce_cmd->add_option("--strategy", strategy,
                           "beta|head|left|non-erasing|erasing|sigma1|epsilon-ne, "
                           "prefixed r- (rigid) or d- (multiset)");

    CLI::App* expand_cmd = app.add_subcommand("expand", "enumerate expansion approximants");
    add_common_flags(expand_cmd, opt, true);
    expand_cmd->add_option("--kind", kind, "rigid | taylor");

    CLI::App* analyze_cmd = app.add_subcommand("analyze", "run a normalization analysis");
    add_common_flags(analyze_cmd, opt, true);
    analyze_cmd->add_option("--property", property, "head | solvable | beta | strong");

    CLI::App* laws_cmd = app.add_subcommand("laws", "run the property-law harness");
    add_common_flags(laws_cmd, opt, false);
    laws_cmd->add_option("--law", law, "law identifier, or 'all'");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (parse_cmd->parsed()) return run_parse(opt, lang);
        if (render_cmd->parsed()) return run_parse(opt, lang);
        if (reduce_cmd->parsed()) {
            StrategyInfo info = resolve_strategy(strategy);
            switch (info.language) {
            case StrategyInfo::Language::Lambda:
                return run_reduce_lambda(opt, info.name, strategy);
            case StrategyInfo::Language::Rigid:
                return run_reduce_rigid(opt, info.name, strategy);
            case StrategyInfo::Language::Resource:
                return run_reduce_resource(opt, info.name, strategy);
            }
        }
        if (expand_cmd->parsed()) return run_expand(opt, kind);
        if (analyze_cmd->parsed()) return run_analyze(opt, property);
        if (laws_cmd->parsed()) return run_laws(opt, law, opt.max_size);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
