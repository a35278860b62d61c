#include <pla/continuity.hpp>
#include <pla/rng.hpp>
#include <pla/seq_metrics.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pla {

double NoiseSchedule::operator()(std::size_t n) const {
    if (scale == 0.0 || n == 0) return 0.0;
    return scale * std::pow(static_cast<double>(n), -exponent);
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::fail: return "fail";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

std::vector<std::size_t> largest_remainder_counts(const FreqParams& params, std::size_t n) {
    const std::size_t k = params.size();
    std::vector<std::size_t> counts(k);
    std::vector<std::pair<double, std::size_t>> remainders(k);
    std::size_t assigned = 0;
    for (std::size_t j = 0; j < k; ++j) {
        double exact = params[j].alpha * static_cast<double>(n);
        auto fl = static_cast<std::size_t>(std::floor(exact));
        fl = std::min(fl, n);
        counts[j] = fl;
        assigned += fl;
        remainders[j] = {exact - static_cast<double>(fl), j};
    }
    // Largest remainder first; ties go to the earlier component.
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t i = 0; assigned < n; i = (i + 1) % k, ++assigned) ++counts[remainders[i].second];
    while (assigned > n) {
        // Only reachable through rounding of alphas summing slightly above 1.
        auto it = std::max_element(counts.begin(), counts.end());
        --*it;
        --assigned;
    }
    return counts;
}

double noise_radius(const FreqParams& params, const NoiseSchedule& noise, std::size_t n) {
    double r = noise(n);
    std::vector<double> cs;
    for (const auto& p : params) cs.push_back(p.c);
    std::sort(cs.begin(), cs.end());
    for (std::size_t i = 1; i < cs.size(); ++i) r = std::min(r, 0.49 * (cs[i] - cs[i - 1]));
    return r;
}

namespace {

std::vector<std::size_t> draw_counts(const FreqParams& params, std::size_t n, CountStrategy strategy, Rng& rng) {
    const std::size_t k = params.size();
    switch (strategy) {
        case CountStrategy::LargestRemainder:
            return largest_remainder_counts(params, n);
        case CountStrategy::RandomRemainder: {
            std::vector<std::size_t> counts(k);
            std::vector<std::size_t> open;
            std::size_t assigned = 0;
            for (std::size_t j = 0; j < k; ++j) {
                double exact = params[j].alpha * static_cast<double>(n);
                counts[j] = std::min(n, static_cast<std::size_t>(std::floor(exact)));
                assigned += counts[j];
                if (exact > static_cast<double>(counts[j])) open.push_back(j);
            }
            if (assigned > n) return largest_remainder_counts(params, n);
            rng.shuffle(std::span<std::size_t>(open));
            for (std::size_t i = 0; assigned < n; ++i, ++assigned) {
                std::size_t j = open.empty() ? rng.below(k) : open[i % open.size()];
                ++counts[j];
            }
            return counts;
        }
        case CountStrategy::Shift: {
            auto counts = largest_remainder_counts(params, n);
            if (k < 2) return counts;
            std::size_t to = rng.below(k);
            std::size_t from = rng.below(k - 1);
            if (from >= to) ++from;
            if (counts[from] == 0) return counts;
            --counts[from];
            ++counts[to];
            return counts;
        }
    }
    return largest_remainder_counts(params, n);
}

// Moves up to max_moves single units between random components.
void perturb_counts(std::vector<std::size_t>& counts, std::size_t max_moves, Rng& rng) {
    const std::size_t k = counts.size();
    if (k < 2 || max_moves == 0) return;
    std::size_t moves = rng.below(max_moves + 1);
    for (std::size_t s = 0; s < moves; ++s) {
        std::size_t to = rng.below(k);
        std::size_t from = rng.below(k - 1);
        if (from >= to) ++from;
        if (counts[from] == 0) continue;
        --counts[from];
        ++counts[to];
    }
}

bool keep_exact(double c, bool exact_endpoints) { return exact_endpoints && (c == 0.0 || c == 1.0); }

double noisy_value(double c, double r, Rng& rng) {
    double lo = std::max(0.0, c - r);
    double hi = std::min(1.0, c + r);
    return lo + (hi - lo) * rng.uniform_open();
}

bool draw_noise(double fraction, Rng& rng) {
    if (fraction >= 1.0) return true;
    if (fraction <= 0.0) return false;
    return rng.uniform() < fraction;
}

std::vector<double> fill_entries(const FreqParams& params, const std::vector<std::size_t>& counts, double r,
                                 double noise_fraction, bool exact_endpoints, Rng& rng) {
    std::vector<double> out;
    out.reserve(std::accumulate(counts.begin(), counts.end(), std::size_t{0}));
    for (std::size_t j = 0; j < params.size(); ++j) {
        double c = params[j].c;
        for (std::size_t i = 0; i < counts[j]; ++i) {
            bool noisy = r > 0.0 && !keep_exact(c, exact_endpoints) && draw_noise(noise_fraction, rng);
            out.push_back(noisy ? noisy_value(c, r, rng) : c);
        }
    }
    rng.shuffle(std::span<double>(out));
    return out;
}

void check_schedule(const std::vector<std::size_t>& schedule, std::size_t min_lengths) {
    if (schedule.size() < min_lengths)
        throw Error("length schedule needs at least " + std::to_string(min_lengths) + " entries");
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        if (schedule[i] == 0) throw Error("length schedule entries must be positive");
        if (i > 0 && schedule[i] <= schedule[i - 1]) throw Error("length schedule must be strictly increasing");
    }
}

void check_probe_inputs(const AggregatorDef& f, std::span<const FreqParams> params, const ProbeConfig& config) {
    if (params.size() != f.arity)
        throw Error("aggregator " + f.display_name() + " has arity " + std::to_string(f.arity) + ", got " +
                    std::to_string(params.size()) + " parameter tuples");
    check_schedule(config.schedule, 3);
    if (config.trials == 0) throw Error("probes need at least one trial per length");
    for (const auto& p : params)
        if (p.size() > config.schedule.front())
            throw Error("shortest length is below the number of convergence points");
}

Verdict classify(const std::vector<double>& dev, const ProbeConfig& config) {
    double last = dev.back();
    double second = dev[dev.size() - 2];
    if (last >= config.fail_threshold) return Verdict::fail;
    if (last <= config.tol && second <= config.tol && last <= second + 0.1 * config.tol) return Verdict::pass;
    return Verdict::inconclusive;
}

struct Tracker {
    double worst = -1.0;
    Counterexample example;

    void offer(std::size_t n, std::vector<std::vector<double>> p, std::vector<std::vector<double>> q, double fp,
               double fq) {
        double d = std::abs(fp - fq);
        if (d <= worst) return;
        worst = d;
        example.n = n;
        example.p.clear();
        example.q.clear();
        for (auto& s : p) example.p.emplace_back(std::move(s));
        for (auto& s : q) example.q.emplace_back(std::move(s));
        example.value_p = fp;
        example.value_q = fq;
    }
};

double evaluate_on(const AggregatorDef& f, const std::vector<std::vector<double>>& seqs) {
    std::vector<ValueSeq> args;
    args.reserve(seqs.size());
    for (const auto& s : seqs) args.emplace_back(s);
    return f(args);
}

ProbeReport finish(std::string kind, const ProbeConfig& config, std::vector<double> dev, Tracker& last) {
    ProbeReport report;
    report.kind = std::move(kind);
    report.schedule = config.schedule;
    report.deviations = std::move(dev);
    report.max_deviation = report.deviations.back();
    report.verdict = classify(report.deviations, config);
    if (report.verdict == Verdict::fail) report.counterexample = std::move(last.example);
    report.trials = config.trials;
    report.seed = config.seed;
    return report;
}

constexpr CountStrategy kStrategies[3] = {CountStrategy::LargestRemainder, CountStrategy::RandomRemainder,
                                          CountStrategy::Shift};

}  // namespace

ValueSeq make_ct_sequence(const CTSeqSpec& spec, std::size_t n, const SequenceVariant& variant,
                          std::uint64_t stream) {
    check_schedule(spec.schedule, 1);
    if (std::find(spec.schedule.begin(), spec.schedule.end(), n) == spec.schedule.end())
        throw Error("length " + std::to_string(n) + " is not in the schedule");
    if (spec.params.size() > n)
        throw Error("length " + std::to_string(n) + " is below the number of convergence points");
    Rng rng(derive_seed(spec.seed, {n, stream}));
    auto counts = draw_counts(spec.params, n, variant.counts, rng);
    double r = noise_radius(spec.params, spec.noise, n);
    return ValueSeq(fill_entries(spec.params, counts, r, variant.noise_fraction, variant.exact_endpoints, rng));
}

ProbeReport ct_probe(const AggregatorDef& f, std::span<const FreqParams> params, const ProbeConfig& config) {
    check_probe_inputs(f, params, config);
    const bool exact = config.exact_boolean_endpoints && f.boolean_inputs;
    const std::size_t k = params.size();
    std::vector<double> dev;
    Tracker tracker;
    for (std::size_t idx = 0; idx < config.schedule.size(); ++idx) {
        const std::size_t n = config.schedule[idx];
        Tracker here;
        for (std::size_t t = 0; t < config.trials; ++t) {
            std::vector<std::vector<double>> p(k), q(k);
            for (std::size_t i = 0; i < k; ++i) {
                Rng rp(derive_seed(config.seed, {n, t, 0, i}));
                Rng rq(derive_seed(config.seed, {n, t, 1, i}));
                std::size_t len_q = n + t % 3;
                auto cp = draw_counts(params[i], n, kStrategies[t % 3], rp);
                auto cq = draw_counts(params[i], len_q, kStrategies[(t / 3) % 3], rq);
                p[i] = fill_entries(params[i], cp, noise_radius(params[i], config.noise, n), config.noise_fraction,
                                    exact, rp);
                q[i] = fill_entries(params[i], cq, noise_radius(params[i], config.noise, len_q),
                                    config.noise_fraction, exact, rq);
            }
            double fp = evaluate_on(f, p);
            double fq = evaluate_on(f, q);
            here.offer(n, std::move(p), std::move(q), fp, fq);
        }
        dev.push_back(here.worst);
        if (idx + 1 == config.schedule.size()) tracker = std::move(here);
    }
    return finish("ct", config, std::move(dev), tracker);
}

ProbeReport up_probe(const AggregatorDef& f, std::span<const FreqParams> params, const ProbeConfig& config) {
    check_probe_inputs(f, params, config);
    const bool exact = config.exact_boolean_endpoints && f.boolean_inputs;
    const std::size_t k = params.size();
    std::vector<double> dev;
    Tracker tracker;
    for (std::size_t idx = 0; idx < config.schedule.size(); ++idx) {
        const std::size_t n = config.schedule[idx];
        const double radius = config.up_radius(n);
        auto slack_moves = [&config](std::size_t len) {
            return static_cast<std::size_t>(std::floor(config.count_slack(len) * static_cast<double>(len)));
        };
        Tracker here;
        for (std::size_t t = 0; t < config.trials; ++t) {
            // Condition (1): exact support, counts within the slack of the targets.
            {
                std::vector<std::vector<double>> p(k), q(k);
                for (std::size_t i = 0; i < k; ++i) {
                    Rng rp(derive_seed(config.seed, {n, t, 2, i}));
                    Rng rq(derive_seed(config.seed, {n, t, 3, i}));
                    std::size_t len_q = n + t % 3;
                    auto cp = largest_remainder_counts(params[i], n);
                    auto cq = largest_remainder_counts(params[i], len_q);
                    perturb_counts(cp, slack_moves(n), rp);
                    perturb_counts(cq, slack_moves(len_q), rq);
                    p[i] = fill_entries(params[i], cp, 0.0, 0.0, exact, rp);
                    q[i] = fill_entries(params[i], cq, 0.0, 0.0, exact, rq);
                }
                double fp = evaluate_on(f, p);
                double fq = evaluate_on(f, q);
                here.offer(n, std::move(p), std::move(q), fp, fq);
            }
            // Condition (2): q moves the entries of an exact-support p by less than radius.
            {
                std::vector<std::vector<double>> p(k), q(k);
                for (std::size_t i = 0; i < k; ++i) {
                    Rng rng(derive_seed(config.seed, {n, t, 4, i}));
                    auto cp = largest_remainder_counts(params[i], n);
                    perturb_counts(cp, slack_moves(n), rng);
                    p[i] = fill_entries(params[i], cp, 0.0, 0.0, exact, rng);
                    q[i] = p[i];
                    for (double& v : q[i]) {
                        if (keep_exact(v, exact) || !draw_noise(config.noise_fraction, rng)) continue;
                        v = noisy_value(v, radius, rng);
                    }
                }
                double fp = evaluate_on(f, p);
                double fq = evaluate_on(f, q);
                here.offer(n, std::move(p), std::move(q), fp, fq);
            }
        }
        dev.push_back(here.worst);
        if (idx + 1 == config.schedule.size()) tracker = std::move(here);
    }
    return finish("up", config, std::move(dev), tracker);
}

AggregatorDef nudge(const AggregatorDef& f, std::span<const FreqParams> params, const ProbeConfig& config,
                    const NudgeConfig& nudge_config) {
    auto passes = [&](const AggregatorDef& g) {
        return ct_probe(g, params, config).verdict == Verdict::pass &&
               up_probe(g, params, config).verdict == Verdict::pass;
    };
    if (!f.threshold) throw Error("aggregator " + f.display_name() + " has no threshold parameter to perturb");
    if (passes(f)) return f;
    const std::string& key = *f.threshold;
    auto it = f.params.find(key);
    if (it == f.params.end()) throw Error("aggregator " + f.display_name() + " lacks a value for " + key);
    Rational base = rational_from_decimal(it->second);
    Rational step = rational_from_decimal(nudge_config.step);
    for (std::size_t s = 1; s <= nudge_config.max_steps; ++s) {
        for (int sign : {+1, -1}) {
            // base + sign * s * step over the common denominator base.den * step.den.
            __int128 num = static_cast<__int128>(base.num) * step.den +
                           static_cast<__int128>(sign) * static_cast<__int128>(s) * step.num * base.den;
            __int128 den = static_cast<__int128>(base.den) * step.den;
            if (num < 0 || num > den) continue;
            double candidate = static_cast<double>(num) / static_cast<double>(den);
            AggregatorDef g = f.with_params({{key, candidate}});
            if (passes(g)) return g;
        }
    }
    throw Error("no perturbation of " + key + " within " + std::to_string(nudge_config.max_steps) + " steps of " +
                format_number(nudge_config.step) + " restores continuity of " + f.display_name());
}

}  // namespace pla
