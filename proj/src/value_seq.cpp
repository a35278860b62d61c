#include <pla/errors.hpp>
#include <pla/value_seq.hpp>

#include <cmath>
#include <set>

namespace pla {

namespace {

void check_unit(double v, const char* what) {
    if (!(v >= 0.0 && v <= 1.0)) throw Error(std::string(what) + " outside [0,1]: " + std::to_string(v));
}

}  // namespace

ValueSeq::ValueSeq(std::vector<double> entries) : entries_(std::move(entries)) {
    if (entries_.empty()) throw Error("value sequence must be nonempty");
    for (double v : entries_) check_unit(v, "sequence entry");
}

ValueSeq::ValueSeq(std::initializer_list<double> entries) : ValueSeq(std::vector<double>(entries)) {}

std::size_t ValueSeq::count_equal(double value) const noexcept {
    return static_cast<std::size_t>(std::count(entries_.begin(), entries_.end(), value));
}

FreqParams::FreqParams(std::vector<FreqPoint> points, double sum_tolerance) : points_(std::move(points)) {
    if (points_.empty()) throw Error("frequency parameters must be nonempty");
    std::set<double> seen;
    double total = 0.0;
    for (const auto& p : points_) {
        check_unit(p.c, "convergence point");
        check_unit(p.alpha, "proportion");
        if (!seen.insert(p.c).second) throw Error("repeated convergence point " + std::to_string(p.c));
        total += p.alpha;
    }
    if (std::abs(total - 1.0) > sum_tolerance)
        throw Error("proportions sum to " + std::to_string(total) + ", expected 1");
}

FreqParams::FreqParams(std::initializer_list<FreqPoint> points) : FreqParams(std::vector<FreqPoint>(points)) {}

double FreqParams::mass_at(double value) const noexcept {
    double m = 0.0;
    for (const auto& p : points_)
        if (p.c == value) m += p.alpha;
    return m;
}

}  // namespace pla
