#pragma once

// Aggregation elimination for the instantiation where the guards are
// consistent conjunctions of first-order literals and every aggregation
// condition is true. A formula is rewritten bottom-up into an L0-basic
// formula AND_i (theta_i -> d_i) that is asymptotically equivalent to it in
// the iid model, provided every aggregation function met along the way passes
// the continuity probes at the frequency parameters it is applied to.

#include <pla/catalog.hpp>
#include <pla/continuity.hpp>
#include <pla/errors.hpp>
#include <pla/literals.hpp>
#include <pla/logic.hpp>
#include <pla/random_worlds.hpp>

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pla {

/// An aggregation node whose frequency parameters fail a continuity probe.
class ContinuityViolation : public Error {
public:
    ContinuityViolation(const std::string& message, std::string path, std::string aggregator,
                        LiteralConjunction theta, std::vector<FreqParams> params, ProbeReport report)
        : Error(message), path_(std::move(path)), aggregator_(std::move(aggregator)), theta_(std::move(theta)),
          params_(std::move(params)), report_(std::move(report)) {}

    const std::string& path() const noexcept { return path_; }
    const std::string& aggregator() const noexcept { return aggregator_; }
    const LiteralConjunction& theta() const noexcept { return theta_; }
    const std::vector<FreqParams>& params() const noexcept { return params_; }
    const ProbeReport& report() const noexcept { return report_; }

private:
    std::string path_;
    std::string aggregator_;
    LiteralConjunction theta_;
    std::vector<FreqParams> params_;
    ProbeReport report_;
};

struct Clause {
    LiteralConjunction guard;
    double value = 0.0;

    friend bool operator==(const Clause&, const Clause&) = default;
};

/// AND_i (guard_i -> value_i). With the partition flag, exactly one guard
/// holds for every structure and assignment, and the value of the formula is
/// the value of that clause.
class L0BasicFormula {
public:
    L0BasicFormula(std::vector<std::string> free_vars, std::vector<Clause> clauses, bool partition);

    /// {(true, c)}
    static L0BasicFormula constant(double c);

    const std::vector<std::string>& free_vars() const noexcept { return free_vars_; }
    const std::vector<Clause>& clauses() const noexcept { return clauses_; }
    bool partition() const noexcept { return partition_; }

    double evaluate(const Structure& a, const VarAssignment& assignment) const;

    /// AND_i (guard_i -> value_i) with the builtin connectives; its
    /// evaluation equals evaluate() exactly.
    Formula to_formula() const;

    /// Formula text. With merging, guards sharing a value are joined by "or"
    /// into a single clause.
    std::string render(bool merge_equal_values = true) const;

    friend bool operator==(const L0BasicFormula&, const L0BasicFormula&) = default;

private:
    std::vector<std::string> free_vars_;
    std::vector<Clause> clauses_;
    bool partition_;
};

/// Exact partition form of a 0/1-valued aggregation-free formula. Throws
/// pla::Error if f contains an aggregation or a value outside {0, 1}.
L0BasicFormula atom_to_basic(const Formula& f);

/// Common refinement of the inputs with values c(v_1, ..., v_k). Exact: the
/// result evaluates identically to c applied to the inputs.
L0BasicFormula combine_connective(const ConnectiveDef& c, std::span<const L0BasicFormula> basics);

struct LimitOptions {
    std::size_t min_log2 = 10;
    std::size_t max_log2 = 16;
    double gate = 1e-3;
};

enum class LimitMethod { closed_form, extrapolated };

std::string to_string(LimitMethod m);

struct LimitResult {
    double value = 0.0;
    LimitMethod method = LimitMethod::closed_form;
    /// (n, F at n) for the extrapolation ladder; empty for closed forms.
    std::vector<std::pair<std::size_t, double>> ladder;
};

/// The limit of F on convergence-testing inputs with these parameters: the
/// registered closed form if any, otherwise F on sequences with exact values
/// c_j and largest-remainder counts at n = 2^min_log2 .. 2^max_log2, accepted
/// when the last two values differ by less than the gate. Throws
/// NotStabilized otherwise.
LimitResult limit_value_detailed(const AggregatorDef& f, std::span<const FreqParams> params,
                                 const LimitOptions& options = {});
double limit_value(const AggregatorDef& f, std::span<const FreqParams> params, const LimitOptions& options = {});

/// Frequency parameters of a partition-form formula over xbar + ybar relative
/// to the complete type theta: clause values with the summed analytic alphas
/// of their guards. Guards inconsistent with theta are dropped; degenerate
/// guards stay with alpha 0. Throws pla::Error if the alphas do not sum to 1
/// within 1e-9.
FreqParams type_freq_params(const L0BasicFormula& inner, const LiteralConjunction& theta,
                            std::span<const std::string> xbar, const IidModel& model);

struct TypeStep {
    LiteralConjunction theta;
    std::vector<FreqParams> params;
    Verdict ct = Verdict::inconclusive;
    Verdict up = Verdict::inconclusive;
    double ct_deviation = 0.0;
    double up_deviation = 0.0;
    double value = 0.0;
    LimitMethod method = LimitMethod::closed_form;
};

struct AggregationStep {
    std::string path;
    std::string aggregator;
    std::vector<std::string> xbar;
    std::vector<std::string> ybar;
    std::vector<TypeStep> types;
    /// Set when the threshold was perturbed to restore continuity.
    std::optional<std::string> nudged_to;
};

struct ConnectiveStep {
    std::string path;
    std::string connective;
    std::vector<std::size_t> input_sizes;
    std::size_t output_size = 0;
};

struct EliminationTrace {
    std::vector<AggregationStep> aggregations;
    std::vector<ConnectiveStep> connectives;
};

struct EliminationOptions {
    std::size_t max_free_vars = 3;
    std::size_t max_bound_vars = 2;
    ProbeConfig probe;
    LimitOptions limit;
    bool allow_nudge = false;
    NudgeConfig nudge;
};

/// Eliminates one aggregation whose conditions are all true. inner[i] is the
/// partition form of the i-th aggregated formula over xbar + ybar.
L0BasicFormula eliminate_aggregation(const AggregatorDef& f, std::span<const L0BasicFormula> inner,
                                     std::span<const std::string> xbar, std::span<const std::string> ybar,
                                     const IidModel& model, const EliminationOptions& options = {},
                                     EliminationTrace* trace = nullptr, const std::string& path = "");

struct EliminationResult {
    L0BasicFormula basic;
    EliminationTrace trace;
};

/// Rewrites f bottom-up. Errors carry the AST path of the failing node
/// ("" for the root, then ".0", ".1" ... for children). Throws pla::Error for
/// conditions other than true and for variable caps exceeded.
EliminationResult eliminate(const Formula& f, const IidModel& model, const EliminationOptions& options = {});

/// Monte Carlo check that f and the eliminated form are asymptotically
/// equivalent over model.schedule.
EquivalenceReport validate(const Formula& f, const L0BasicFormula& result, const IidModel& model, double epsilon,
                           std::size_t samples, std::uint64_t seed);

}  // namespace pla
