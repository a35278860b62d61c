#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace pla {

/// A finite nonempty sequence of reals in [0,1]; the input type of aggregation functions.
class ValueSeq {
public:
    /// Throws pla::Error when empty or when an entry lies outside [0,1].
    explicit ValueSeq(std::vector<double> entries);
    ValueSeq(std::initializer_list<double> entries);

    std::size_t size() const noexcept { return entries_.size(); }
    double operator[](std::size_t i) const noexcept { return entries_[i]; }
    std::span<const double> entries() const noexcept { return entries_; }
    auto begin() const noexcept { return entries_.begin(); }
    auto end() const noexcept { return entries_.end(); }

    /// Number of entries exactly equal to value.
    std::size_t count_equal(double value) const noexcept;

    friend bool operator==(const ValueSeq&, const ValueSeq&) = default;

private:
    std::vector<double> entries_;
};

/// One convergence point c together with its limiting proportion alpha.
struct FreqPoint {
    double c = 0.0;
    double alpha = 0.0;

    friend bool operator==(const FreqPoint&, const FreqPoint&) = default;
};

/// Parameters (c_1, alpha_1), ..., (c_k, alpha_k) with distinct c_j and alphas summing to 1.
class FreqParams {
public:
    /// Throws pla::Error if empty, if some c_j repeats, if a value is outside [0,1],
    /// or if the alphas do not sum to 1 within tolerance.
    explicit FreqParams(std::vector<FreqPoint> points, double sum_tolerance = 1e-12);
    FreqParams(std::initializer_list<FreqPoint> points);

    std::size_t size() const noexcept { return points_.size(); }
    const FreqPoint& operator[](std::size_t i) const noexcept { return points_[i]; }
    std::span<const FreqPoint> points() const noexcept { return points_; }
    auto begin() const noexcept { return points_.begin(); }
    auto end() const noexcept { return points_.end(); }

    /// Sum of alpha_j over the points whose c_j equals value exactly.
    double mass_at(double value) const noexcept;

    friend bool operator==(const FreqParams&, const FreqParams&) = default;
    friend auto operator<=>(const FreqParams& a, const FreqParams& b) {
        return std::lexicographical_compare_three_way(
            a.points_.begin(), a.points_.end(), b.points_.begin(), b.points_.end(),
            [](const FreqPoint& x, const FreqPoint& y) {
                if (auto c = x.c <=> y.c; c != 0) return c;
                return x.alpha <=> y.alpha;
            });
    }

private:
    std::vector<FreqPoint> points_;
};

}  // namespace pla
