#include <pla/catalog.hpp>
#include <pla/errors.hpp>
#include <pla/seq_metrics.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>

namespace pla {

namespace {

bool in_unit(double v) { return v >= 0.0 && v <= 1.0; }

std::vector<double> sorted_entries(const ValueSeq& p) {
    std::vector<double> v(p.begin(), p.end());
    std::sort(v.begin(), v.end());
    return v;
}

// Params accepted by a factory: every key must be listed, missing keys take the default.
Params resolve_params(const std::string& name, const Params& given, const Params& defaults) {
    Params out = defaults;
    for (const auto& [k, v] : given) {
        auto it = out.find(k);
        if (it == out.end()) throw Error("aggregator " + name + " has no parameter '" + k + "'");
        if (!std::isfinite(v)) throw Error("parameter " + k + " of " + name + " is not finite");
        it->second = v;
    }
    return out;
}

AggregatorDef unary(std::string name, std::function<double(const ValueSeq&)> f) {
    AggregatorDef def;
    def.name = std::move(name);
    def.arity = 1;
    def.eval = [f = std::move(f)](std::span<const ValueSeq> args) { return f(args[0]); };
    return def;
}

// Factory for an aggregator without parameters; rebuilt copies keep the factory.
struct FixedFactory {
    AggregatorDef def;

    AggregatorDef operator()(const Params& p) const {
        resolve_params(def.name, p, {});
        AggregatorDef copy = def;
        copy.factory = *this;
        return copy;
    }
};

AggregatorFactory no_params(AggregatorDef def) { return FixedFactory{std::move(def)}; }

AggregatorDef make_max() {
    auto def = unary("max", [](const ValueSeq& p) { return *std::max_element(p.begin(), p.end()); });
    def.closed_form_limit = [](std::span<const FreqParams> ps) {
        double best = 0.0;
        for (const auto& pt : ps[0])
            if (pt.alpha > 0.0) best = std::max(best, pt.c);
        return best;
    };
    return def;
}

AggregatorDef make_min() {
    auto def = unary("min", [](const ValueSeq& p) { return *std::min_element(p.begin(), p.end()); });
    def.closed_form_limit = [](std::span<const FreqParams> ps) {
        double best = 1.0;
        for (const auto& pt : ps[0])
            if (pt.alpha > 0.0) best = std::min(best, pt.c);
        return best;
    };
    return def;
}

// Summation in ascending order makes the mean independent of entry order.
AggregatorDef make_am() {
    auto def = unary("am", [](const ValueSeq& p) {
        auto v = sorted_entries(p);
        double s = std::accumulate(v.begin(), v.end(), 0.0);
        return std::min(1.0, s / static_cast<double>(v.size()));
    });
    def.closed_form_limit = [](std::span<const FreqParams> ps) {
        double s = 0.0;
        for (const auto& pt : ps[0]) s += pt.alpha * pt.c;
        return std::clamp(s, 0.0, 1.0);
    };
    return def;
}

AggregatorDef make_gm() {
    auto def = unary("gm", [](const ValueSeq& p) {
        auto v = sorted_entries(p);
        if (v.front() == 0.0) return 0.0;
        if (v.front() == v.back()) return v.front();
        double s = 0.0;
        for (double x : v) s += std::log(x);
        return std::min(1.0, std::exp(s / static_cast<double>(v.size())));
    });
    def.closed_form_limit = [](std::span<const FreqParams> ps) {
        double s = 0.0;
        for (const auto& pt : ps[0]) {
            if (pt.alpha == 0.0) continue;
            if (pt.c == 0.0) return 0.0;
            s += pt.alpha * std::log(pt.c);
        }
        return std::min(1.0, std::exp(s));
    };
    return def;
}

AggregatorDef make_length(const Params& given) {
    Params params = resolve_params("length", given, {{"beta", 1.0}});
    double beta = params.at("beta");
    if (beta < 0.0) throw Error("length requires beta >= 0");
    auto def = unary("length", [beta](const ValueSeq& p) {
        return std::pow(static_cast<double>(p.size()), -beta);
    });
    def.params = params;
    if (beta > 0.0)
        def.closed_form_limit = [](std::span<const FreqParams>) { return 0.0; };
    else
        def.closed_form_limit = [](std::span<const FreqParams>) { return 1.0; };
    def.factory = make_length;
    return def;
}

AggregatorDef make_lengthinv() {
    auto def = unary("lengthinv", [](const ValueSeq& p) { return 1.0 / static_cast<double>(p.size()); });
    def.closed_form_limit = [](std::span<const FreqParams>) { return 0.0; };
    return def;
}

AggregatorDef make_tsum() {
    return unary("tsum", [](const ValueSeq& p) {
        auto v = sorted_entries(p);
        double s = 0.0;
        for (double x : v) {
            s += x;
            if (s >= 1.0) return 1.0;
        }
        return s;
    });
}

AggregatorDef make_mu1u() {
    AggregatorDef def;
    def.name = "mu1u";
    def.arity = 2;
    def.eval = [](std::span<const ValueSeq> args) { return mu1u(args[0], args[1]); };
    def.closed_form_limit = [](std::span<const FreqParams> ps) { return mu1u_limit(ps[0], ps[1]); };
    return def;
}

std::int64_t gcd64(std::int64_t a, std::int64_t b) {
    a = a < 0 ? -a : a;
    b = b < 0 ? -b : b;
    while (b != 0) {
        std::int64_t t = a % b;
        a = b;
        b = t;
    }
    return a;
}

// Nonnegative integers compared exactly through 128-bit products.
bool ratio_at_least(std::size_t count, std::size_t total, const Rational& beta) {
    __int128 lhs = static_cast<__int128>(count) * beta.den;
    __int128 rhs = static_cast<__int128>(beta.num) * static_cast<__int128>(total);
    return lhs >= rhs;
}

AggregatorDef make_proportional(const Params& given) {
    Params params = resolve_params("proportional", given, {{"beta", 0.5}});
    double beta = params.at("beta");
    if (beta < 0.0 || beta > 1.0) throw Error("proportional requires beta in [0,1]");
    auto def = quantifier_to_agg(proportional_quantifier(rational_from_decimal(beta)));
    def.params = params;
    def.threshold = "beta";
    def.factory = make_proportional;
    return def;
}

}  // namespace

double ConnectiveDef::operator()(std::span<const double> args) const {
    if (args.size() != arity)
        throw EvaluationError("connective " + name + " expects " + std::to_string(arity) + " arguments, got " +
                              std::to_string(args.size()));
    double v = eval(args);
    if (!in_unit(v)) throw EvaluationError("connective " + name + " produced a value outside [0,1]");
    return v;
}

double AggregatorDef::operator()(std::span<const ValueSeq> args) const {
    if (args.size() != arity)
        throw EvaluationError("aggregator " + name + " expects " + std::to_string(arity) + " arguments, got " +
                              std::to_string(args.size()));
    double v = eval(args);
    if (!in_unit(v)) throw EvaluationError("aggregator " + display_name() + " produced a value outside [0,1]");
    return v;
}

AggregatorDef AggregatorDef::with_params(const Params& p) const {
    if (!factory) throw Error("aggregator " + name + " cannot be rebuilt with parameters");
    Params merged = params;
    for (const auto& [k, v] : p) merged[k] = v;
    return factory(merged);
}

std::string AggregatorDef::display_name() const {
    if (params.empty()) return name;
    std::string out = name + "[";
    bool first = true;
    for (const auto& [k, v] : params) {
        if (!first) out += ",";
        first = false;
        out += k + "=" + format_number(v);
    }
    return out + "]";
}

std::string format_number(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

Rational rational_from_decimal(double x) {
    if (!std::isfinite(x)) throw Error("cannot convert a non-finite value to a rational");
    // Scientific shortest form: mantissa digits and a decimal exponent.
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::scientific);
    std::string s(buf, res.ptr);
    bool negative = !s.empty() && s[0] == '-';
    if (negative) s.erase(0, 1);
    auto epos = s.find('e');
    std::string mant = s.substr(0, epos);
    int exp10 = std::stoi(s.substr(epos + 1));
    std::string digits;
    int frac_digits = 0;
    bool after_point = false;
    for (char ch : mant) {
        if (ch == '.') {
            after_point = true;
            continue;
        }
        digits += ch;
        if (after_point) ++frac_digits;
    }
    int scale = frac_digits - exp10;  // x = digits * 10^-scale
    if (digits.size() > 18) throw Error("decimal too long for an exact rational: " + s);
    std::int64_t num = std::stoll(digits);
    std::int64_t den = 1;
    while (scale < 0) {
        if (num > std::numeric_limits<std::int64_t>::max() / 10) throw Error("rational overflow: " + s);
        num *= 10;
        ++scale;
    }
    while (scale > 0) {
        if (den > std::numeric_limits<std::int64_t>::max() / 10) throw Error("rational overflow: " + s);
        den *= 10;
        --scale;
    }
    std::int64_t g = gcd64(num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
    return {negative ? -num : num, den};
}

AggregatorDef quantifier_to_agg(const MostowskiQuantifier& q) {
    if (q.k == 0) throw Error("quantifier must aggregate at least one set");
    AggregatorDef def;
    def.name = q.name;
    def.arity = q.k;
    def.boolean_inputs = true;
    def.eval = [q](std::span<const ValueSeq> args) {
        std::size_t m = 0;
        std::vector<std::size_t> sizes(args.size());
        for (std::size_t i = 0; i < args.size(); ++i) {
            m = std::max(m, args[i].size());
            sizes[i] = args[i].count_equal(1.0);
        }
        return q.holds(m, sizes) ? 1.0 : 0.0;
    };
    return def;
}

MostowskiQuantifier proportional_quantifier(Rational beta) {
    return {"proportional", 1, [beta](std::size_t m, std::span<const std::size_t> x) {
                return ratio_at_least(x[0], m, beta);
            }};
}

MostowskiQuantifier rescher_quantifier() {
    return {"rescher", 2, [](std::size_t, std::span<const std::size_t> x) { return x[0] <= x[1]; }};
}

MostowskiQuantifier hartig_quantifier() {
    return {"hartig", 2, [](std::size_t, std::span<const std::size_t> x) { return x[0] == x[1]; }};
}

MostowskiQuantifier exists_quantifier() {
    return {"q_exists", 1, [](std::size_t, std::span<const std::size_t> x) { return x[0] > 0; }};
}

MostowskiQuantifier forall_quantifier() {
    return {"q_forall", 1, [](std::size_t m, std::span<const std::size_t> x) { return x[0] == m; }};
}

ConnectiveRegistry builtin_connectives() {
    ConnectiveRegistry r;
    auto add = [&r](std::string name, std::size_t arity, std::function<double(std::span<const double>)> f,
                    double lipschitz) {
        auto def = std::make_shared<ConnectiveDef>();
        def->name = name;
        def->arity = arity;
        def->eval = std::move(f);
        def->lipschitz = lipschitz;
        r.emplace(std::move(name), std::move(def));
    };
    add("not", 1, [](std::span<const double> a) { return 1.0 - a[0]; }, 1.0);
    add("and", 2, [](std::span<const double> a) { return std::min(a[0], a[1]); }, 1.0);
    add("or", 2, [](std::span<const double> a) { return std::max(a[0], a[1]); }, 1.0);
    add("implies", 2, [](std::span<const double> a) { return std::min(1.0, 1.0 - a[0] + a[1]); }, 2.0);
    add("prod", 2, [](std::span<const double> a) { return a[0] * a[1]; }, 2.0);
    return r;
}

AggregatorRegistry builtin_aggregators() {
    AggregatorRegistry r;
    r.emplace("max", no_params(make_max()));
    r.emplace("min", no_params(make_min()));
    r.emplace("am", no_params(make_am()));
    r.emplace("gm", no_params(make_gm()));
    r.emplace("length", AggregatorFactory(make_length));
    r.emplace("lengthinv", no_params(make_lengthinv()));
    r.emplace("tsum", no_params(make_tsum()));
    r.emplace("mu1u", no_params(make_mu1u()));
    return r;
}

AggregatorRegistry prebuilt_quantifiers() {
    AggregatorRegistry r;
    r.emplace("proportional", AggregatorFactory(make_proportional));
    r.emplace("rescher", no_params(quantifier_to_agg(rescher_quantifier())));
    r.emplace("hartig", no_params(quantifier_to_agg(hartig_quantifier())));
    r.emplace("q_exists", no_params(quantifier_to_agg(exists_quantifier())));
    r.emplace("q_forall", no_params(quantifier_to_agg(forall_quantifier())));
    return r;
}

const Catalog& Catalog::builtin() {
    static const Catalog catalog = [] {
        Catalog c;
        c.connectives_ = builtin_connectives();
        c.aggregators_ = builtin_aggregators();
        for (auto& [name, f] : prebuilt_quantifiers()) c.aggregators_.emplace(name, f);
        return c;
    }();
    return catalog;
}

void Catalog::add_connective(ConnectiveDef def) {
    if (def.arity == 0 || !def.eval) throw Error("connective " + def.name + " needs an arity and an eval map");
    std::string name = def.name;
    connectives_[name] = std::make_shared<const ConnectiveDef>(std::move(def));
}

void Catalog::add_aggregator(const std::string& name, AggregatorFactory factory) {
    if (!factory) throw Error("aggregator " + name + " needs a factory");
    aggregators_[name] = std::move(factory);
}

bool Catalog::has_connective(std::string_view name) const { return connectives_.find(name) != connectives_.end(); }

bool Catalog::has_aggregator(std::string_view name) const { return aggregators_.find(name) != aggregators_.end(); }

ConnectivePtr Catalog::connective(std::string_view name) const {
    auto it = connectives_.find(name);
    if (it == connectives_.end()) throw Error("unknown connective '" + std::string(name) + "'");
    return it->second;
}

AggregatorPtr Catalog::aggregator(std::string_view name, const Params& params) const {
    auto it = aggregators_.find(name);
    if (it == aggregators_.end()) throw Error("unknown aggregator '" + std::string(name) + "'");
    AggregatorDef def = it->second(params);
    if (!def.factory) def.factory = it->second;
    return std::make_shared<const AggregatorDef>(std::move(def));
}

std::vector<std::string> Catalog::connective_names() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : connectives_) out.push_back(k);
    return out;
}

std::vector<std::string> Catalog::aggregator_names() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : aggregators_) out.push_back(k);
    return out;
}

}  // namespace pla
