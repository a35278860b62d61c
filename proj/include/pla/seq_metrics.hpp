#pragma once

// Functional representations of value sequences and the pseudometrics
// mu1u (L1 distance of the sorted step functions) and muinf_o (sup distance
// of the step functions in sequence order). Both are computed exactly by
// walking the merged breakpoint grid {i/|p|} u {j/|q|}.

#include <pla/value_seq.hpp>

#include <cstddef>
#include <span>
#include <vector>

namespace pla {

/// Piecewise-constant f : [0,1] -> [0,1] taking values[i] on [i/n, (i+1)/n)
/// and values[n-1] at 1.
class StepFunction {
public:
    explicit StepFunction(std::vector<double> values);

    std::size_t pieces() const noexcept { return values_.size(); }
    std::span<const double> values() const noexcept { return values_; }
    double operator()(double t) const;

private:
    std::vector<double> values_;
};

StepFunction ordered_rep(const ValueSeq& p);
/// Sorted ascending (stable), then ordered_rep.
StepFunction unordered_rep(const ValueSeq& p);

double l1_distance(const StepFunction& f, const StepFunction& g);
double sup_distance(const StepFunction& f, const StepFunction& g);

double mu1u(const ValueSeq& p, const ValueSeq& q);
double muinf_o(const ValueSeq& p, const ValueSeq& q);

enum class Metric { mu1u, muinf_o };

/// Componentwise maximum of the scalar metric; throws pla::Error on arity mismatch.
double mu_tuple(Metric metric, std::span<const ValueSeq> p, std::span<const ValueSeq> q);

/// mu1u between the limiting sorted step functions of two parameter sets:
/// each is the quantile function placing mass alpha_j at c_j.
double mu1u_limit(const FreqParams& p, const FreqParams& q);

}  // namespace pla
