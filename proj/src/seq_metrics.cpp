#include <pla/errors.hpp>
#include <pla/seq_metrics.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace pla {

StepFunction::StepFunction(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw Error("step function needs at least one piece");
    for (double v : values_)
        if (!(v >= 0.0 && v <= 1.0)) throw Error("step function value outside [0,1]");
}

double StepFunction::operator()(double t) const {
    if (!(t >= 0.0 && t <= 1.0)) throw Error("step function argument outside [0,1]");
    auto n = values_.size();
    auto i = static_cast<std::size_t>(std::floor(t * static_cast<double>(n)));
    return values_[std::min(i, n - 1)];
}

StepFunction ordered_rep(const ValueSeq& p) { return StepFunction(std::vector<double>(p.begin(), p.end())); }

StepFunction unordered_rep(const ValueSeq& p) {
    std::vector<double> v(p.begin(), p.end());
    std::stable_sort(v.begin(), v.end());
    return StepFunction(std::move(v));
}

namespace {

// Visits the pieces of the common refinement of the grids {i/n} and {j/m}.
// Breakpoints are compared as integers i*m and j*n, so the walk and every
// segment length are identical when the two functions are swapped.
template <typename Visit>
void walk_grid(const StepFunction& f, const StepFunction& g, Visit visit) {
    const std::uint64_t n = f.pieces();
    const std::uint64_t m = g.pieces();
    const double total = static_cast<double>(n * m);
    auto fv = f.values();
    auto gv = g.values();
    std::uint64_t i = 0, j = 0, cur = 0;
    while (i < n && j < m) {
        std::uint64_t next_f = (i + 1) * m;
        std::uint64_t next_g = (j + 1) * n;
        std::uint64_t next = std::min(next_f, next_g);
        visit(static_cast<double>(next - cur) / total, fv[i], gv[j]);
        cur = next;
        if (next == next_f) ++i;
        if (next == next_g) ++j;
    }
}

}  // namespace

double l1_distance(const StepFunction& f, const StepFunction& g) {
    double sum = 0.0;
    walk_grid(f, g, [&sum](double len, double a, double b) { sum += len * std::abs(a - b); });
    return std::min(sum, 1.0);
}

double sup_distance(const StepFunction& f, const StepFunction& g) {
    double best = 0.0;
    walk_grid(f, g, [&best](double, double a, double b) { best = std::max(best, std::abs(a - b)); });
    // The point 1 takes the last values, which the last segment already compares.
    return best;
}

double mu1u(const ValueSeq& p, const ValueSeq& q) { return l1_distance(unordered_rep(p), unordered_rep(q)); }

double muinf_o(const ValueSeq& p, const ValueSeq& q) { return sup_distance(ordered_rep(p), ordered_rep(q)); }

double mu_tuple(Metric metric, std::span<const ValueSeq> p, std::span<const ValueSeq> q) {
    if (p.size() != q.size()) throw Error("mu_tuple: arity mismatch");
    if (p.empty()) throw Error("mu_tuple: empty tuples");
    double best = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        double d = metric == Metric::mu1u ? mu1u(p[i], q[i]) : muinf_o(p[i], q[i]);
        best = std::max(best, d);
    }
    return best;
}

double mu1u_limit(const FreqParams& p, const FreqParams& q) {
    // Quantile functions: ascending c, each occupying an interval of length alpha.
    auto quantiles = [](const FreqParams& fp) {
        std::vector<FreqPoint> pts(fp.begin(), fp.end());
        std::sort(pts.begin(), pts.end(), [](const FreqPoint& a, const FreqPoint& b) { return a.c < b.c; });
        std::vector<std::pair<double, double>> out;  // (right end, value)
        double acc = 0.0;
        for (const auto& pt : pts) {
            if (pt.alpha <= 0.0) continue;
            acc += pt.alpha;
            out.emplace_back(acc, pt.c);
        }
        out.back().first = 1.0;
        return out;
    };
    auto a = quantiles(p);
    auto b = quantiles(q);
    double sum = 0.0, cur = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        double next = std::min(a[i].first, b[j].first);
        sum += (next - cur) * std::abs(a[i].second - b[j].second);
        cur = next;
        if (a[i].first == next) ++i;
        if (b[j].first == next) ++j;
    }
    return std::clamp(sum, 0.0, 1.0);
}

}  // namespace pla
