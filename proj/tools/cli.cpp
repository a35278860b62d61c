#include "cli.hpp"

#include <pla/continuity.hpp>
#include <pla/eliminator.hpp>
#include <pla/model_config.hpp>
#include <pla/pagerank.hpp>
#include <pla/random_worlds.hpp>
#include <pla/seq_metrics.hpp>
#include <pla/syntax.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <optional>
#include <ostream>

namespace pla::cli {

namespace {

using json = nlohmann::ordered_json;

// Element tuples enumerated by eval are capped to keep output bounded.
constexpr std::size_t max_eval_tuples = 1'000'000;

struct Common {
    std::string format = "json";
    std::uint64_t seed = 0;
};

double parse_double(const std::string& s, const std::string& what) {
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw Error("malformed " + what + " '" + s + "'");
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t end = s.find(sep, start);
        std::string part = s.substr(start, end == std::string::npos ? std::string::npos : end - start);
        auto b = part.find_first_not_of(" \t");
        auto e = part.find_last_not_of(" \t");
        out.push_back(b == std::string::npos ? "" : part.substr(b, e - b + 1));
        if (end == std::string::npos) break;
        start = end + 1;
    }
    return out;
}

std::vector<double> parse_list(const std::string& s, const std::string& what) {
    std::vector<double> out;
    for (const auto& part : split(s, ',')) out.push_back(parse_double(part, what));
    return out;
}

std::vector<std::size_t> parse_schedule(const std::string& s) {
    std::vector<std::size_t> out;
    for (const auto& part : split(s, ',')) {
        std::size_t v = 0;
        auto res = std::from_chars(part.data(), part.data() + part.size(), v);
        if (res.ec != std::errc() || res.ptr != part.data() + part.size() || v == 0)
            throw Error("malformed schedule entry '" + part + "'");
        out.push_back(v);
    }
    return out;
}

/// "c:alpha,c:alpha" per argument, arguments separated by ';'.
std::vector<FreqParams> parse_params(const std::string& s) {
    std::vector<FreqParams> out;
    for (const auto& arg : split(s, ';')) {
        std::vector<FreqPoint> points;
        for (const auto& pt : split(arg, ',')) {
            auto cs = split(pt, ':');
            if (cs.size() != 2) throw Error("frequency point '" + pt + "' is not of the form c:alpha");
            points.push_back({parse_double(cs[0], "value"), parse_double(cs[1], "proportion")});
        }
        out.emplace_back(std::move(points), 1e-9);
    }
    return out;
}

/// "name" or "name[k=v,...]".
AggregatorPtr parse_aggregator(const std::string& s) {
    auto open = s.find('[');
    std::string name = s.substr(0, open);
    Params params;
    if (open != std::string::npos) {
        if (s.back() != ']') throw Error("malformed aggregator '" + s + "'");
        for (const auto& kv : split(s.substr(open + 1, s.size() - open - 2), ',')) {
            auto parts = split(kv, '=');
            if (parts.size() != 2) throw Error("malformed aggregator parameter '" + kv + "'");
            params[parts[0]] = parse_double(parts[1], "parameter");
        }
    }
    return Catalog::builtin().aggregator(name, params);
}

Formula read_formula(const std::string& text) {
    if (!text.empty() && text[0] == '@') {
        auto f = named_formula(std::string_view(text).substr(1));
        if (!f) throw Error("unknown named formula '" + text.substr(1) + "'");
        return *f;
    }
    return parse(text);
}

IidModel default_model(const Formula& f) {
    IidModel m;
    for (const auto& [symbol, arity] : used_symbols(f)) {
        m.signature.add(symbol, arity);
        m.probs[symbol] = 0.5;
    }
    return m;
}

json params_json(std::span<const FreqParams> params) {
    json out = json::array();
    for (const auto& p : params) {
        json arg = json::array();
        for (const auto& pt : p) arg.push_back({{"c", pt.c}, {"alpha", pt.alpha}});
        out.push_back(arg);
    }
    return out;
}

json report_json(const ProbeReport& r) {
    json out{{"kind", r.kind},
             {"verdict", to_string(r.verdict)},
             {"schedule", r.schedule},
             {"deviations", r.deviations},
             {"max_deviation", r.max_deviation},
             {"trials", r.trials},
             {"seed", r.seed}};
    if (r.counterexample) {
        const auto& c = *r.counterexample;
        json lengths_p = json::array(), lengths_q = json::array();
        for (const auto& s : c.p) lengths_p.push_back(s.size());
        for (const auto& s : c.q) lengths_q.push_back(s.size());
        out["counterexample"] = {{"n", c.n},
                                 {"value_p", c.value_p},
                                 {"value_q", c.value_q},
                                 {"lengths_p", lengths_p},
                                 {"lengths_q", lengths_q}};
    } else {
        out["counterexample"] = nullptr;
    }
    return out;
}

json equivalence_json(const EquivalenceReport& r) {
    json points = json::array();
    for (const auto& p : r.points)
        points.push_back({{"n", p.n},
                          {"samples", p.samples},
                          {"passing", p.passing},
                          {"fraction", p.fraction},
                          {"worst_sup", p.worst_sup},
                          {"mean_sup", p.mean_sup}});
    return {{"epsilon", r.epsilon}, {"seed", r.seed}, {"points", points}};
}

json model_json(const IidModel& m) { return json::parse(model_to_json(m)); }

json trace_json(const EliminationTrace& t) {
    json aggs = json::array();
    for (const auto& a : t.aggregations) {
        json types = json::array();
        for (const auto& s : a.types)
            types.push_back({{"theta", render(s.theta)},
                             {"params", params_json(s.params)},
                             {"ct", to_string(s.ct)},
                             {"up", to_string(s.up)},
                             {"ct_deviation", s.ct_deviation},
                             {"up_deviation", s.up_deviation},
                             {"value", s.value},
                             {"method", to_string(s.method)}});
        aggs.push_back({{"path", a.path},
                        {"aggregator", a.aggregator},
                        {"xbar", a.xbar},
                        {"ybar", a.ybar},
                        {"types", types},
                        {"nudged_to", a.nudged_to ? json(*a.nudged_to) : json(nullptr)}});
    }
    json conns = json::array();
    for (const auto& c : t.connectives)
        conns.push_back({{"path", c.path},
                         {"connective", c.connective},
                         {"input_sizes", c.input_sizes},
                         {"output_size", c.output_size}});
    return {{"aggregations", aggs}, {"connectives", conns}};
}

std::string csv_cell(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
}

void emit(const json& record, const std::string& format, std::ostream& out) {
    if (format == "csv") {
        out << "path,value\n";
        const json flat = record.flatten();
        for (const auto& [path, value] : flat.items())
            out << csv_cell(path) << "," << csv_cell(value.dump()) << "\n";
    } else {
        out << record.dump(2) << "\n";
    }
}

json record(const std::string& command, json inputs, std::uint64_t seed, json results) {
    return {{"tool", tool_name},
            {"version", tool_version},
            {"command", command},
            {"inputs", std::move(inputs)},
            {"seed", seed},
            {"results", std::move(results)}};
}

// Advances a tuple over [0, n) in lexicographic order; false after the last one.
bool next_tuple(std::vector<std::size_t>& t, std::size_t n) {
    std::size_t pos = t.size();
    while (pos > 0) {
        if (++t[pos - 1] < n) return true;
        t[--pos] = 0;
    }
    return false;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Probability logic with aggregation functions: evaluation, continuity probes and elimination",
                 tool_name};
    app.require_subcommand(1);
    app.set_version_flag("--version", tool_version);

    Common common;
    std::string formula_text, against_text, model_path, p_text, q_text, agg_text, params_text, schedule_text;
    std::size_t n = 10, samples = 100, trials = 32;
    double eps = 0.05, tol = 1e-2;
    bool do_validate = false, allow_nudge = false, nudge_flag = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--seed", common.seed, "Seed for all randomness")->capture_default_str();
        sub->add_option("--format", common.format, "Output format")
            ->check(CLI::IsMember({"json", "csv"}))
            ->capture_default_str();
    };

    auto* eval = app.add_subcommand("eval", "Evaluate a formula on a sampled structure at every tuple");
    eval->add_option("-f,--formula", formula_text, "Formula text, or @PR0, @PR1, ...")->required();
    eval->add_option("--model", model_path, "Model config (.json or .toml); default p = 0.5 per used symbol");
    eval->add_option("-n,--n", n, "Domain size")->capture_default_str();
    add_common(eval);

    auto* sample_cmd = app.add_subcommand("sample", "Sample a structure from the model");
    sample_cmd->add_option("--model", model_path, "Model config")->required();
    sample_cmd->add_option("-n,--n", n, "Domain size")->capture_default_str();
    add_common(sample_cmd);

    auto* metrics = app.add_subcommand("metrics", "Pseudometric distances between two value sequences");
    metrics->add_option("--p", p_text, "Comma-separated entries")->required();
    metrics->add_option("--q", q_text, "Comma-separated entries")->required();
    add_common(metrics);

    auto* probe = app.add_subcommand("probe", "Continuity probes of an aggregation function");
    probe->add_option("--agg", agg_text, "Aggregator, e.g. am or proportional[beta=0.5]")->required();
    probe->add_option("--params", params_text, "Frequency parameters c:alpha,... per argument, ';' between arguments")
        ->required();
    probe->add_option("--schedule", schedule_text, "Comma-separated sequence lengths");
    probe->add_option("--trials", trials, "Trials per length")->capture_default_str();
    probe->add_option("--tol", tol, "Pass tolerance")->capture_default_str();
    probe->add_flag("--nudge", nudge_flag, "Perturb the threshold parameter until both probes pass");
    add_common(probe);

    auto* elim = app.add_subcommand("eliminate", "Rewrite a formula into an L0-basic formula");
    elim->add_option("-f,--formula", formula_text, "Formula text, or @PR0, @PR1, ...")->required();
    elim->add_option("--model", model_path, "Model config")->required();
    elim->add_flag("--validate", do_validate, "Monte Carlo validation of the result");
    elim->add_option("--eps", eps, "Validation tolerance")->capture_default_str();
    elim->add_option("--samples", samples, "Worlds per domain size")->capture_default_str();
    elim->add_option("--schedule", schedule_text, "Validation domain sizes (default: the model schedule)");
    elim->add_flag("--allow-nudge", allow_nudge, "Perturb thresholds to restore continuity");
    add_common(elim);

    auto* val = app.add_subcommand("validate", "Asymptotic equivalence estimate of two formulas");
    val->add_option("-f,--formula", formula_text, "First formula")->required();
    val->add_option("-g,--against", against_text, "Second formula")->required();
    val->add_option("--model", model_path, "Model config")->required();
    val->add_option("--eps", eps, "Tolerance")->capture_default_str();
    val->add_option("--samples", samples, "Worlds per domain size")->capture_default_str();
    val->add_option("--schedule", schedule_text, "Domain sizes (default: the model schedule)");
    add_common(val);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::CallForVersion&) {
        out << tool_version << "\n";
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (eval->parsed()) {
            Formula f = read_formula(formula_text);
            IidModel model = model_path.empty() ? default_model(f) : load_model(model_path);
            if (n == 0) throw Error("domain size must be positive");
            Structure a = sample(model, n, common.seed);
            auto fv = free_vars(f);
            std::vector<std::string> order(fv.begin(), fv.end());
            double tuples = 1.0;
            for (std::size_t i = 0; i < order.size(); ++i) tuples *= static_cast<double>(n);
            if (tuples > static_cast<double>(max_eval_tuples)) throw Error("too many tuples to enumerate");
            CompiledFormula cf(f, model.signature, order);
            json values = json::array();
            std::vector<std::size_t> t(order.size(), 0);
            do {
                json assignment = json::object();
                for (std::size_t i = 0; i < order.size(); ++i) assignment[order[i]] = t[i];
                values.push_back({{"assignment", assignment}, {"value", cf.evaluate(a, t)}});
            } while (next_tuple(t, n));
            json inputs{{"formula", formula_text}, {"model", model_json(model)}, {"n", n}};
            json results{{"formula", pretty(f)}, {"free_vars", order}, {"n", n}, {"values", values}};
            emit(record("eval", inputs, common.seed, results), common.format, out);
        } else if (sample_cmd->parsed()) {
            IidModel model = load_model(model_path);
            if (n == 0) throw Error("domain size must be positive");
            Structure a = sample(model, n, common.seed);
            json relations = json::object();
            for (const auto& [name, arity] : model.signature.symbols())
                relations[name] = {{"arity", arity}, {"count", a.count(name)}, {"tuples", a.tuples(name)}};
            json inputs{{"model", model_json(model)}, {"n", n}};
            emit(record("sample", inputs, common.seed, {{"n", n}, {"relations", relations}}), common.format, out);
        } else if (metrics->parsed()) {
            ValueSeq p(parse_list(p_text, "entry"));
            ValueSeq q(parse_list(q_text, "entry"));
            json inputs{{"p", p_text}, {"q", q_text}};
            json results{{"mu1u", mu1u(p, q)}, {"muinf_o", muinf_o(p, q)}};
            emit(record("metrics", inputs, common.seed, results), common.format, out);
        } else if (probe->parsed()) {
            AggregatorPtr f = parse_aggregator(agg_text);
            auto params = parse_params(params_text);
            ProbeConfig config;
            config.seed = common.seed;
            config.trials = trials;
            config.tol = tol;
            if (!schedule_text.empty()) config.schedule = parse_schedule(schedule_text);
            json inputs{{"aggregator", agg_text}, {"params", params_text}, {"schedule", config.schedule},
                        {"trials", trials}, {"tol", tol}, {"nudge", nudge_flag}};
            json results{{"aggregator", f->display_name()},
                         {"params", params_json(params)},
                         {"ct", report_json(ct_probe(*f, params, config))},
                         {"up", report_json(up_probe(*f, params, config))}};
            if (nudge_flag) results["nudged_to"] = nudge(*f, params, config).display_name();
            emit(record("probe", inputs, common.seed, results), common.format, out);
        } else if (elim->parsed()) {
            Formula f = read_formula(formula_text);
            IidModel model = load_model(model_path);
            EliminationOptions options;
            options.probe.seed = common.seed;
            options.allow_nudge = allow_nudge;
            json inputs{{"formula", formula_text}, {"model", model_json(model)}, {"validate", do_validate},
                        {"eps", eps}, {"samples", samples}, {"schedule", schedule_text}, {"allow_nudge", allow_nudge}};
            std::optional<EliminationResult> r;
            try {
                r = eliminate(f, model, options);
            } catch (const ContinuityViolation& e) {
                json error{{"kind", "ContinuityViolation"},
                           {"message", e.what()},
                           {"path", e.path()},
                           {"aggregator", e.aggregator()},
                           {"theta", render(e.theta())},
                           {"params", params_json(e.params())},
                           {"probe", report_json(e.report())}};
                emit(record("eliminate", inputs, common.seed, {{"error", error}}), common.format, out);
                err << "continuity violation: " << e.what() << "\n";
                return 3;
            }
            json clauses = json::array();
            for (const auto& c : r->basic.clauses()) clauses.push_back({{"guard", render(c.guard)}, {"value", c.value}});
            json results{{"formula", pretty(f)},
                         {"basic", r->basic.render()},
                         {"partition_form", r->basic.render(false)},
                         {"free_vars", r->basic.free_vars()},
                         {"clauses", clauses},
                         {"trace", trace_json(r->trace)}};
            if (do_validate) {
                if (!schedule_text.empty()) model.schedule = parse_schedule(schedule_text);
                if (model.schedule.empty()) throw Error("validation needs a schedule (model or --schedule)");
                results["validation"] = equivalence_json(validate(f, r->basic, model, eps, samples, common.seed));
            }
            emit(record("eliminate", inputs, common.seed, results), common.format, out);
        } else if (val->parsed()) {
            Formula f = read_formula(formula_text);
            Formula g = read_formula(against_text);
            IidModel model = load_model(model_path);
            if (!schedule_text.empty()) model.schedule = parse_schedule(schedule_text);
            if (model.schedule.empty()) throw Error("validation needs a schedule (model or --schedule)");
            json inputs{{"formula", formula_text}, {"against", against_text}, {"model", model_json(model)},
                        {"eps", eps}, {"samples", samples}};
            auto report = estimate_equivalence(f, g, model, eps, samples, common.seed);
            emit(record("validate", inputs, common.seed, equivalence_json(report)), common.format, out);
        }
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const NotStabilized& e) {
        err << "not stabilized: " << e.what() << "\n";
        return 4;
    } catch (const ContinuityViolation& e) {
        err << "continuity violation: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace pla::cli
