#include <pla/errors.hpp>
#include <pla/random_worlds.hpp>
#include <pla/rng.hpp>

#include <algorithm>
#include <cmath>
#include <set>

namespace pla {

void IidModel::validate() const {
    for (const auto& [name, arity] : signature.symbols()) {
        auto it = probs.find(name);
        if (it == probs.end()) throw Error("no probability given for relation symbol " + name);
        if (!(it->second >= 0.0 && it->second <= 1.0))
            throw Error("probability of " + name + " outside [0,1]");
    }
    for (const auto& [name, p] : probs)
        if (!signature.contains(name)) throw Error("probability given for unknown relation symbol " + name);
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        if (schedule[i] == 0) throw Error("domain sizes in the schedule must be positive");
        if (i > 0 && schedule[i] <= schedule[i - 1]) throw Error("domain schedule must be strictly increasing");
    }
}

double IidModel::prob(std::string_view symbol) const {
    auto it = probs.find(symbol);
    if (it == probs.end()) throw Error("no probability given for relation symbol " + std::string(symbol));
    return it->second;
}

Structure sample(const IidModel& model, std::size_t n, std::uint64_t seed) {
    model.validate();
    Structure a(model.signature, n);
    Rng rng(derive_seed(seed, {n}));
    std::size_t idx = 0;
    for (const auto& [name, arity] : model.signature.symbols()) {
        const double p = model.prob(name);
        std::size_t cells = 1;
        for (std::size_t i = 0; i < arity; ++i) cells *= n;
        for (std::size_t code = 0; code < cells; ++code)
            if (rng.uniform() < p) a.set_code(idx, code, true);
        ++idx;
    }
    return a;
}

WorldSampler iid_sampler(const IidModel& model) {
    model.validate();
    return [model](std::size_t n, std::uint64_t seed) { return sample(model, n, seed); };
}

namespace {

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

EquivalenceReport estimate_equivalence(const Formula& phi, const Formula& psi, const WorldSampler& sampler,
                                       const Signature& signature, std::span<const std::size_t> schedule,
                                       double epsilon, std::size_t samples, std::uint64_t seed,
                                       const EquivalenceOptions& options) {
    auto fv = free_vars(phi);
    if (fv != free_vars(psi)) throw Error("formulas compared for equivalence have different free variables");
    if (fv.size() > options.max_free_vars)
        throw Error("too many free variables (" + std::to_string(fv.size()) + ") for exhaustive comparison");
    if (!(epsilon >= 0.0)) throw Error("epsilon must be nonnegative");
    if (samples == 0) throw Error("at least one sampled world is required");
    if (schedule.empty()) throw Error("the domain schedule is empty");

    std::vector<std::string> order(fv.begin(), fv.end());
    CompiledFormula cphi(phi, signature, order);
    CompiledFormula cpsi(psi, signature, order);

    EquivalenceReport report;
    report.epsilon = epsilon;
    report.seed = seed;
    for (std::size_t n : schedule) {
        EquivalencePoint point;
        point.n = n;
        point.samples = samples;
        double sum_sup = 0.0;
        for (std::size_t w = 0; w < samples; ++w) {
            Structure a = sampler(n, derive_seed(seed, {n, w}));
            std::vector<std::size_t> t(order.size(), 0);
            double sup = 0.0;
            do {
                sup = std::max(sup, std::abs(cphi.evaluate(a, t) - cpsi.evaluate(a, t)));
            } while (next_tuple(t, n));
            if (sup <= epsilon) ++point.passing;
            point.worst_sup = std::max(point.worst_sup, sup);
            sum_sup += sup;
        }
        point.fraction = static_cast<double>(point.passing) / static_cast<double>(samples);
        point.mean_sup = sum_sup / static_cast<double>(samples);
        report.points.push_back(point);
    }
    return report;
}

EquivalenceReport estimate_equivalence(const Formula& phi, const Formula& psi, const IidModel& model,
                                       double epsilon, std::size_t samples, std::uint64_t seed,
                                       const EquivalenceOptions& options) {
    return estimate_equivalence(phi, psi, iid_sampler(model), model.signature, model.schedule, epsilon, samples,
                                seed, options);
}

double analytic_alpha(const LiteralConjunction& guard, const LiteralConjunction& theta,
                      std::span<const std::string> xbar, const IidModel& model) {
    if (!is_complete_type(theta, xbar, model.signature))
        throw Error("'" + render(theta) + "' is not a complete type over the given variables");
    if (!literal_sat(guard)) throw Error("guard '" + render(guard) + "' is unsatisfiable");
    const std::set<std::string> xs(xbar.begin(), xbar.end());
    auto is_y = [&xs](const std::string& v) { return !xs.count(v); };

    LiteralConjunction both = guard & theta;
    if (!literal_sat(both)) return 0.0;

    // A bound variable equal to another variable pins at most n^(|y|-1) of n^|y| tuples.
    for (const auto& l : guard.literals())
        if (l.kind == Literal::Kind::eq && l.positive && l.vars[0] != l.vars[1] && (is_y(l.vars[0]) || is_y(l.vars[1])))
            return 0.0;

    auto rep = equality_classes(both);
    std::map<std::pair<std::string, std::vector<std::string>>, bool> atoms;
    for (const auto& l : guard.literals()) {
        if (l.kind != Literal::Kind::atom) continue;
        if (std::none_of(l.vars.begin(), l.vars.end(), is_y)) continue;
        std::vector<std::string> collapsed;
        for (const auto& v : l.vars) collapsed.push_back(rep.count(v) ? rep.at(v) : v);
        atoms.emplace(std::make_pair(l.symbol, std::move(collapsed)), l.positive);
    }
    double alpha = 1.0;
    for (const auto& [key, positive] : atoms) {
        double p = model.prob(key.first);
        alpha *= positive ? p : 1.0 - p;
    }
    return alpha;
}

std::vector<FreqEstimate> estimate_freq_params(std::span<const LiteralConjunction> guards,
                                               const LiteralConjunction& theta,
                                               std::span<const std::string> xbar,
                                               std::span<const std::string> ybar, const IidModel& model,
                                               std::size_t n, std::size_t samples, std::uint64_t seed,
                                               const FreqEstimateOptions& options) {
    model.validate();
    std::vector<std::string> xs(xbar.begin(), xbar.end());
    std::vector<std::string> order = xs;
    order.insert(order.end(), ybar.begin(), ybar.end());
    CompiledFormula ctheta(theta.to_formula(), model.signature, xs);
    std::vector<CompiledFormula> cguards;
    for (const auto& g : guards) cguards.emplace_back(g.to_formula(), model.signature, order);

    const std::size_t k = guards.size();
    std::vector<std::vector<double>> per_world(k);
    std::vector<FreqEstimate> out(k);

    for (std::size_t w = 0; w < samples; ++w) {
        Structure a = sample(model, n, derive_seed(seed, {n, w}));
        std::vector<std::vector<std::size_t>> witnesses;
        std::vector<std::size_t> t(xs.size(), 0);
        do {
            if (ctheta.evaluate(a, t) == 1.0) witnesses.push_back(t);
        } while (next_tuple(t, n));
        if (witnesses.empty()) continue;
        if (options.max_tuples_per_world > 0 && witnesses.size() > options.max_tuples_per_world) {
            Rng rng(derive_seed(seed, {n, w, 1}));
            rng.shuffle(std::span<std::vector<std::size_t>>(witnesses));
            witnesses.resize(options.max_tuples_per_world);
        }

        std::vector<double> sums(k, 0.0);
        std::size_t measured = 0;
        for (const auto& xa : witnesses) {
            std::vector<std::size_t> counts(k, 0);
            std::size_t denom = 0;
            std::vector<std::size_t> values = xa;
            values.resize(order.size(), 0);
            std::vector<std::size_t> b(ybar.size(), 0);
            do {
                if (options.scope == TupleScope::Generic) {
                    bool generic = true;
                    for (std::size_t i = 0; i < b.size() && generic; ++i) {
                        if (std::find(xa.begin(), xa.end(), b[i]) != xa.end()) generic = false;
                        for (std::size_t j = 0; j < i && generic; ++j)
                            if (b[j] == b[i]) generic = false;
                    }
                    if (!generic) continue;
                }
                std::copy(b.begin(), b.end(), values.begin() + static_cast<std::ptrdiff_t>(xs.size()));
                ++denom;
                for (std::size_t g = 0; g < k; ++g)
                    if (cguards[g].evaluate(a, values) == 1.0) ++counts[g];
            } while (next_tuple(b, n));
            if (denom == 0) continue;
            ++measured;
            for (std::size_t g = 0; g < k; ++g)
                sums[g] += static_cast<double>(counts[g]) / static_cast<double>(denom);
        }
        if (measured == 0) continue;
        for (std::size_t g = 0; g < k; ++g) {
            per_world[g].push_back(sums[g] / static_cast<double>(measured));
            out[g].tuples += measured;
            ++out[g].worlds;
        }
    }

    for (std::size_t g = 0; g < k; ++g) {
        const auto& xsw = per_world[g];
        if (xsw.empty()) continue;
        double mean = 0.0;
        for (double v : xsw) mean += v;
        mean /= static_cast<double>(xsw.size());
        double var = 0.0;
        for (double v : xsw) var += (v - mean) * (v - mean);
        out[g].mean = mean;
        out[g].std_error =
            xsw.size() > 1 ? std::sqrt(var / static_cast<double>(xsw.size() - 1) / static_cast<double>(xsw.size()))
                           : 0.0;
    }
    return out;
}

}  // namespace pla
