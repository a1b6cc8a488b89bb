#include "fraisse/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <optional>
#include <ostream>

#include "fraisse/classes.hpp"
#include "fraisse/config.hpp"
#include "fraisse/enumerate.hpp"
#include "fraisse/error.hpp"
#include "fraisse/ramsey.hpp"
#include "fraisse/ranks.hpp"

namespace fraisse {

namespace {

struct Options {
    std::string class_expr;
    int n = 2;
    int m = 2;
    int bound = 3;
    int level = 3;
    int cap = 512;
    int k = 1;
    int colors = 2;
    std::string target;
    std::string interp;
    std::string coloring;
    std::string axiom;
    std::string kind = "point";
    std::uint64_t budget = 0;
    unsigned jobs = 1;
    std::uint64_t seed = 0x9e3779b97f4a7c15ull;
    bool pretty = false;
    bool timing = false;
};

int exit_for(Verdict v) {
    switch (v) {
        case Verdict::Verified: return ExitOk;
        case Verdict::Refuted:
        case Verdict::RefutedWithinCap: return ExitRefuted;
        case Verdict::Inconclusive: return ExitInconclusive;
    }
    return ExitRefuted;
}

int worst(int a, int b) {
    if (a == ExitRefuted || b == ExitRefuted) return ExitRefuted;
    return std::max(a, b);
}

json load_json_file(const std::string& path) {
    try {
        return json::parse(read_text_file(path));
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::Parse, path + ": " + e.what());
    }
}

GenericModel load_target(const Options& o, const SearchContext& ctx) {
    if (o.target.empty()) return standard_graph_target(o.seed, ctx);
    json j = load_json_file(o.target);
    if (j.contains("model")) j = j["model"];
    return model_from_json(j);
}

struct Result {
    json body;
    int code = ExitOk;
};

Result cmd_enumerate(const Options& o, const SearchContext& ctx) {
    ClassSpec spec = parse_class(o.class_expr);
    auto members = enumerate_structures(spec, o.n, ctx);
    json list = json::array();
    for (const auto& s : members) list.push_back(structure_to_json(s));
    return {{{"class", spec.name}, {"n", o.n}, {"count", members.size()}, {"structures", list}}, ExitOk};
}

Result cmd_check_class(const Options& o, const SearchContext& ctx) {
    ClassSpec spec = parse_class(o.class_expr);
    std::vector<Axiom> axioms;
    if (o.axiom.empty()) {
        axioms = {Axiom::Hereditary, Axiom::JointEmbedding, Axiom::StrongAmalgamation};
    } else {
        std::string name = o.axiom;
        std::replace(name.begin(), name.end(), '-', '_');
        axioms = {parse_axiom(name)};
    }
    json reports = json::array();
    int code = ExitOk;
    for (Axiom a : axioms) {
        VerificationReport r = verify_class_axioms(spec, o.bound, a, ctx);
        reports.push_back(r.to_json());
        code = worst(code, exit_for(r.verdict));
    }
    return {{{"class", spec.name}, {"bound", o.bound}, {"reports", reports}}, code};
}

Result cmd_self_sim(const Options& o, const SearchContext& ctx) {
    ClassSpec spec = parse_class(o.class_expr);
    VerificationReport r = check_self_similarity(spec, o.bound, ctx);
    return {{{"class", spec.name}, {"bound", o.bound}, {"report", r.to_json()}}, exit_for(r.verdict)};
}

Result cmd_types(const Options& o, const SearchContext& ctx) {
    ClassSpec spec = parse_class(o.class_expr);
    auto types = enumerate_pair_types(spec, ctx);
    json list = json::array();
    for (const auto& p : types) list.push_back(pair_type_to_json(spec, p));
    return {{{"class", spec.name}, {"count", types.size()}, {"types", list}}, ExitOk};
}

Result cmd_generic_model(const Options& o, const SearchContext& ctx) {
    ClassSpec spec = parse_class(o.class_expr);
    ClosureOptions opt;
    opt.seed = o.seed;
    GenericModel g = build_generic_model(spec, o.level, o.cap, opt, ctx);
    json body = {{"class", spec.name}, {"level", o.level}, {"cap", o.cap}, {"size", g.structure.size()}, {"capped", g.capped}};
    int code = ExitOk;
    if (g.capped) {
        code = ExitInconclusive;
    } else {
        VerificationReport r = check_extension_property(g, o.level, ctx);
        body["extension"] = r.to_json();
        code = exit_for(r.verdict);
    }
    body["model"] = model_to_json(g);
    return {body, code};
}

Result cmd_verify_config(const Options& o, const SearchContext& ctx) {
    if (o.interp.empty()) throw Error(ErrorCode::Usage, "verify-config needs --interp");
    InterpretationMap interp = interpretation_from_json(load_json_file(o.interp));
    GenericModel target = load_target(o, ctx);
    ConfigResult r = verify_configuration(interp, target, o.bound, ctx);
    json body = {{"interpretation", interpretation_to_json(interp)},
                 {"target", {{"spec", target.spec.name}, {"size", target.structure.size()}, {"certified_level", target.certified_level},
                             {"embedding_size", target.embedding_size}}},
                 {"bound", o.bound},
                 {"report", r.report.to_json()}};
    if (r.certificate) body["certificate"] = certificate_to_json(*r.certificate);
    return {body, exit_for(r.report.verdict)};
}

Result cmd_rank(const Options& o, const SearchContext& ctx) {
    ClassSpec spec = parse_class(o.class_expr);
    GenericModel target = load_target(o, ctx);
    RankResult r = compute_rank(spec, o.n, target, o.bound, ctx);
    json body = r.to_json(true);
    body["target"] = {{"size", target.structure.size()}, {"certified_level", target.certified_level}, {"embedding_size", target.embedding_size}};
    return {body, exit_for(r.lower_report.verdict)};
}

Result cmd_ramsey_box(const Options& o, const CLI::App& sub, const SearchContext& ctx) {
    BoxKind kind;
    if (o.kind == "point")
        kind = BoxKind::Point;
    else if (o.kind == "directed")
        kind = BoxKind::Directed;
    else
        throw Error(ErrorCode::Usage, "--kind must be point or directed");
    json body = {{"k", o.k}, {"colors", o.colors}, {"m", o.m}, {"kind", o.kind}};
    try {
        body["upper_bound"] = box_ramsey_upper_bound(o.k, o.colors, o.m, kind).str();
    } catch (const Error& e) {
        if (e.code() != ErrorCode::Overflow) throw;
        body["upper_bound"] = nullptr;
        body["upper_bound_error"] = e.what();
    }
    std::optional<BoxColoring> c;
    if (!o.coloring.empty()) {
        c = coloring_from_json(load_json_file(o.coloring), o.k);
    } else if (sub.count("--n")) {
        std::mt19937_64 rng(o.seed);
        c = kind == BoxKind::Point ? random_point_coloring(o.k, o.n, o.colors, rng) : random_pair_coloring(o.k, o.n, o.colors, rng);
        body["coloring"] = coloring_to_json(*c);
    }
    if (!c) return {body, ExitOk};
    body["n"] = c->n;
    auto found = kind == BoxKind::Point ? find_monochromatic_box(*c, o.m, ctx) : find_monochromatic_directed_box(*c, o.m, ctx);
    if (!found) {
        body["result"] = "NotFound";
        return {body, ExitRefuted};
    }
    body["result"] = "Found";
    body["box"] = box_to_json(*found);
    body["recheck"] = kind == BoxKind::Point ? box_constant(*c, *found) : directed_box_constant(*c, *found);
    return {body, ExitOk};
}

Result cmd_dagger(const Options& o, const SearchContext& ctx) {
    GenericModel target = load_target(o, ctx);
    DaggerReport d = verify_dagger_base_case(target);
    return {d.to_json(), d.ok() ? ExitOk : ExitRefuted};
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Finite-scale Fraisse class, configuration and K-rank computations", "fraisse"};
    app.require_subcommand(1);
    Options o;
    std::uint64_t seed = 0;

    auto common = [&](CLI::App* s) {
        s->add_option("--budget", o.budget, "search node cap (0 = none)");
        s->add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber);
        s->add_option("--seed", seed, "seed for closures and random colorings");
        s->add_flag("--pretty", o.pretty, "indented JSON");
        s->add_flag("--timing", o.timing, "add wall time to the report");
    };
    auto with_class = [&](CLI::App* s) { s->add_option("--class", o.class_expr, "class expression, e.g. LO*G or E^2")->required(); };

    auto* enumerate = app.add_subcommand("enumerate", "members of a given size up to isomorphism");
    with_class(enumerate);
    enumerate->add_option("--n", o.n, "universe size")->required();
    auto* check = app.add_subcommand("check-class", "class axioms up to a size bound");
    with_class(check);
    check->add_option("--bound", o.bound);
    check->add_option("--axiom", o.axiom, "hereditary, joint-embedding, amalgamation or strong-amalgamation");
    auto* selfsim = app.add_subcommand("self-sim", "definable self-similarity criterion");
    with_class(selfsim);
    selfsim->add_option("--bound", o.bound);
    auto* types = app.add_subcommand("types", "pair types of distinct points");
    with_class(types);
    auto* generic = app.add_subcommand("generic-model", "finite extension-property model");
    with_class(generic);
    generic->add_option("--level", o.level);
    generic->add_option("--cap", o.cap);
    auto* verify = app.add_subcommand("verify-config", "verify an interpretation map into a target model");
    verify->add_option("--interp", o.interp, "interpretation JSON")->required();
    verify->add_option("--target", o.target, "model JSON (default: generic graph)");
    verify->add_option("--bound", o.bound);
    auto* rank = app.add_subcommand("rank", "bracketed K-rank into the generic graph");
    with_class(rank);
    rank->add_option("--n", o.n, "tuple length");
    rank->add_option("--bound", o.bound);
    rank->add_option("--target", o.target);
    auto* ramsey = app.add_subcommand("ramsey-box", "monochromatic boxes and the recursive bound");
    ramsey->add_option("--k", o.k);
    ramsey->add_option("--m", o.m);
    ramsey->add_option("--colors", o.colors);
    ramsey->add_option("--kind", o.kind, "point or directed");
    ramsey->add_option("--coloring", o.coloring, "coloring JSON");
    ramsey->add_option("--n", o.n, "side of a random coloring");
    auto* dagger = app.add_subcommand("dagger", "base-case counts for E into the generic graph");
    dagger->add_option("--target", o.target);
    for (auto* s : {enumerate, check, selfsim, types, generic, verify, rank, ramsey, dagger}) common(s);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ExitOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n" << app.help();
        return ExitUsage;
    }
    CLI::App* sub = app.get_subcommands().front();
    if (sub->count("--seed")) o.seed = seed;

    Budget budget(o.budget ? o.budget : std::numeric_limits<std::uint64_t>::max());
    SearchContext ctx{&budget, o.jobs};
    json report = {{"command", args}, {"subcommand", sub->get_name()}, {"tool_version", tool_version}};
    const auto start = std::chrono::steady_clock::now();
    int code = ExitOk;
    try {
        Result r;
        const std::string name = sub->get_name();
        if (name == "enumerate") r = cmd_enumerate(o, ctx);
        else if (name == "check-class") r = cmd_check_class(o, ctx);
        else if (name == "self-sim") r = cmd_self_sim(o, ctx);
        else if (name == "types") r = cmd_types(o, ctx);
        else if (name == "generic-model") r = cmd_generic_model(o, ctx);
        else if (name == "verify-config") r = cmd_verify_config(o, ctx);
        else if (name == "rank") r = cmd_rank(o, ctx);
        else if (name == "ramsey-box") r = cmd_ramsey_box(o, *sub, ctx);
        else r = cmd_dagger(o, ctx);
        report["result"] = r.body;
        code = r.code;
    } catch (const Error& e) {
        switch (e.code()) {
            case ErrorCode::Usage:
            case ErrorCode::Parse:
                err << e.what() << "\n";
                return ExitUsage;
            case ErrorCode::BoundExceeded:
            case ErrorCode::UnderCertifiedTarget:
                code = ExitInconclusive;
                break;
            default:
                code = ExitRefuted;
        }
        report["error"] = {{"code", error_code_name(e.code())}, {"message", e.what()}};
    }
    report["budget"] = {{"limit", o.budget}, {"used", budget.used()}};
    report["exit_code"] = code;
    if (o.timing)
        report["timing_ms"] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    out << (o.pretty ? report.dump(2) : report.dump()) << "\n";
    return code;
}

}  // namespace fraisse
