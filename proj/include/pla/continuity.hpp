#pragma once

// Convergence-testing sequences and sampling probes for ct-continuity and
// up-continuity of aggregation functions.
//
// The probes are falsifiers: a pass verdict means that no pair of inputs
// with the configured budget produced a deviation above tolerance, not that
// the aggregation function is continuous.

#include <pla/catalog.hpp>
#include <pla/errors.hpp>
#include <pla/value_seq.hpp>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pla {

/// r(n) = scale * n^-exponent; scale 0 means no noise.
struct NoiseSchedule {
    double scale = 1.0;
    double exponent = 0.5;

    static NoiseSchedule none() { return {0.0, 0.5}; }
    double operator()(std::size_t n) const;
};

struct CTSeqSpec {
    FreqParams params;
    std::vector<std::size_t> schedule;  // strictly increasing
    NoiseSchedule noise;
    std::uint64_t seed = 0;
};

enum class CountStrategy {
    LargestRemainder,  // round(alpha_j n) fixed up by the largest remainders
    RandomRemainder,   // the leftover units go to components drawn at random
    Shift,             // largest remainder, then one unit moved between two components
};

/// How a single sequence is drawn. The defaults give the plain construction.
struct SequenceVariant {
    CountStrategy counts = CountStrategy::LargestRemainder;
    /// Probability that an entry is drawn from its interval rather than set to c_j.
    double noise_fraction = 1.0;
    /// Keep entries at c_j in {0, 1} exact.
    bool exact_endpoints = false;
};

/// Largest-remainder apportionment of n among the alphas; sums to n and
/// |count_j - alpha_j n| < 1.
std::vector<std::size_t> largest_remainder_counts(const FreqParams& params, std::size_t n);

/// r(n) clipped to 0.49 times the smallest gap between distinct c_j.
double noise_radius(const FreqParams& params, const NoiseSchedule& noise, std::size_t n);

/// A length-n member of the convergence-testing family described by spec.
/// Throws pla::Error if n is not in the schedule, the schedule is not strictly
/// increasing, or the number of parameters exceeds n. `stream` selects an
/// independent random stream for the same (seed, n).
ValueSeq make_ct_sequence(const CTSeqSpec& spec, std::size_t n, const SequenceVariant& variant = {},
                          std::uint64_t stream = 0);

struct ProbeConfig {
    std::vector<std::size_t> schedule{64, 256, 1024, 4096, 16384};
    std::size_t trials = 32;
    double tol = 1e-2;
    double fail_threshold = 0.1;
    std::uint64_t seed = 0;
    NoiseSchedule noise;
    /// Fraction of entries that receive noise in each drawn sequence.
    double noise_fraction = 0.5;
    /// For aggregators flagged boolean_inputs, keep entries at 0 and 1 exact.
    bool exact_boolean_endpoints = true;
    /// up_probe: counts move away from alpha_j n by at most slack(n) * n units.
    NoiseSchedule count_slack{1.0 / 16.0, 0.5};
    /// up_probe condition (2): entries move by less than radius(n).
    NoiseSchedule up_radius{1.0, 2.0 / 3.0};
};

enum class Verdict { pass, fail, inconclusive };

std::string to_string(Verdict v);

struct Counterexample {
    std::size_t n = 0;
    std::vector<ValueSeq> p;
    std::vector<ValueSeq> q;
    double value_p = 0.0;
    double value_q = 0.0;
};

struct ProbeReport {
    std::string kind;  // "ct" or "up"
    Verdict verdict = Verdict::inconclusive;
    std::vector<std::size_t> schedule;
    /// deviations[i] = max over trials of |F(p) - F(q)| at schedule[i].
    std::vector<double> deviations;
    double max_deviation = 0.0;  // at the largest n
    std::optional<Counterexample> counterexample;
    std::size_t trials = 0;
    std::uint64_t seed = 0;
};

/// Draws pairs of convergence-testing tuples for the same parameters and
/// records the largest output difference per length. Throws pla::Error when
/// params.size() differs from F's arity or the schedule has fewer than 3 lengths.
ProbeReport ct_probe(const AggregatorDef& f, std::span<const FreqParams> params, const ProbeConfig& config = {});

/// Samples both conditions of up-continuity: (1) pairs with exact support
/// {c_j} and counts within count_slack(n) n of alpha_j n, hence small mu1u
/// distance; (2) equal-length pairs where the first is as in (1) and the
/// second moves entries by less than up_radius(n).
ProbeReport up_probe(const AggregatorDef& f, std::span<const FreqParams> params, const ProbeConfig& config = {});

struct NudgeConfig {
    double step = 1e-3;
    std::size_t max_steps = 50;
};

/// f with its threshold parameter moved by the smallest multiple of step
/// (trying +k step before -k step) for which both probes pass. Returns f
/// unchanged if it already passes. Throws pla::Error when f has no threshold
/// or no perturbation within range passes.
AggregatorDef nudge(const AggregatorDef& f, std::span<const FreqParams> params, const ProbeConfig& config = {},
                    const NudgeConfig& nudge_config = {});

}  // namespace pla
