#pragma once

// Random structures where every tuple of every relation symbol R holds
// independently with probability p_R, plus the Monte Carlo estimators built
// on them: asymptotic-equivalence fractions and frequency parameters.

#include <pla/literals.hpp>
#include <pla/logic.hpp>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace pla {

struct IidModel {
    Signature signature;
    std::map<std::string, double, std::less<>> probs;
    std::vector<std::size_t> schedule;  // strictly increasing domain sizes
    std::uint64_t seed = 0;

    /// Throws pla::Error on a missing or out-of-range probability, a
    /// probability for an unknown symbol, or a schedule that is not strictly
    /// increasing or contains 0.
    void validate() const;
    double prob(std::string_view symbol) const;
};

/// Draws a structure of size n; deterministic in (model, n, seed).
Structure sample(const IidModel& model, std::size_t n, std::uint64_t seed);

/// Any law on structures of size n, as a seeded sampler.
using WorldSampler = std::function<Structure(std::size_t n, std::uint64_t seed)>;

WorldSampler iid_sampler(const IidModel& model);

struct EquivalencePoint {
    std::size_t n = 0;
    std::size_t samples = 0;
    std::size_t passing = 0;
    double fraction = 0.0;       // passing / samples
    double worst_sup = 0.0;      // largest sup-deviation over the sampled worlds
    double mean_sup = 0.0;
};

struct EquivalenceReport {
    double epsilon = 0.0;
    std::uint64_t seed = 0;
    std::vector<EquivalencePoint> points;
};

struct EquivalenceOptions {
    std::size_t max_free_vars = 3;
};

/// For each n in `schedule`, the fraction of `samples` worlds in which
/// sup over all tuples a of |phi(a) - psi(a)| <= epsilon. World w at size n
/// uses seed derive_seed(seed, {n, w}). Throws pla::Error if the free
/// variables differ, exceed the cap, epsilon < 0 or samples == 0.
EquivalenceReport estimate_equivalence(const Formula& phi, const Formula& psi, const WorldSampler& sampler,
                                       const Signature& signature, std::span<const std::size_t> schedule,
                                       double epsilon, std::size_t samples, std::uint64_t seed,
                                       const EquivalenceOptions& options = {});

/// Same, over model.schedule with the iid sampler.
EquivalenceReport estimate_equivalence(const Formula& phi, const Formula& psi, const IidModel& model,
                                       double epsilon, std::size_t samples, std::uint64_t seed,
                                       const EquivalenceOptions& options = {});

/// Limiting proportion of tuples b over the non-xbar variables of guard with
/// guard(a, b), for a satisfying the complete type theta. Throws pla::Error if
/// theta is not a complete type over xbar or guard is unsatisfiable.
double analytic_alpha(const LiteralConjunction& guard, const LiteralConjunction& theta,
                      std::span<const std::string> xbar, const IidModel& model);

enum class TupleScope {
    All,      // every b in D^|ybar|, the literal definition
    Generic,  // only b with pairwise distinct entries outside a
};

struct FreqEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t worlds = 0;  // worlds with at least one a satisfying theta
    std::size_t tuples = 0;  // (world, a) pairs measured
};

struct FreqEstimateOptions {
    TupleScope scope = TupleScope::All;
    /// Tuples a measured per world, drawn uniformly among those satisfying theta; 0 = all.
    std::size_t max_tuples_per_world = 16;
};

/// Empirical proportion of b over ybar with guard_j(a, b), averaged over a
/// satisfying theta and then over worlds (the standard error is across
/// worlds). The condition is true, so the denominator counts every b in scope.
std::vector<FreqEstimate> estimate_freq_params(std::span<const LiteralConjunction> guards,
                                               const LiteralConjunction& theta,
                                               std::span<const std::string> xbar,
                                               std::span<const std::string> ybar, const IidModel& model,
                                               std::size_t n, std::size_t samples, std::uint64_t seed,
                                               const FreqEstimateOptions& options = {});

}  // namespace pla
