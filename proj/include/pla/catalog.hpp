#pragma once

// Connectives, aggregation functions and Mostowski quantifiers.
//
// Connectives are maps [0,1]^k -> [0,1]. Aggregation functions map k nonempty
// value sequences to [0,1] and must not depend on the order of entries inside
// each sequence. A Catalog resolves the names used in formula text to
// definitions; the builtin catalog is immutable and shared.

#include <pla/value_seq.hpp>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pla {

using Params = std::map<std::string, double, std::less<>>;

struct ConnectiveDef {
    std::string name;
    std::size_t arity = 0;
    std::function<double(std::span<const double>)> eval;
    /// Lipschitz modulus w.r.t. the sup norm, used by the continuity spot check.
    double lipschitz = 1.0;

    /// Checked application: arity must match and the result must land in [0,1].
    double operator()(std::span<const double> args) const;
};

struct AggregatorDef;
using AggregatorFactory = std::function<AggregatorDef(const Params&)>;

struct AggregatorDef {
    std::string name;
    std::size_t arity = 1;
    Params params;
    std::function<double(std::span<const ValueSeq>)> eval;

    /// Limit of eval on convergence-testing inputs, when known analytically.
    std::function<double(std::span<const FreqParams>)> closed_form_limit;

    /// Name of a real parameter that may be perturbed to restore continuity.
    std::optional<std::string> threshold;

    /// True for quantifier adapters: the value depends only on how many
    /// entries of each argument are exactly 1.
    bool boolean_inputs = false;

    /// Rebuilds this aggregator with different parameter values.
    AggregatorFactory factory;

    double operator()(std::span<const ValueSeq> args) const;
    double operator()(const ValueSeq& single) const { return (*this)(std::span(&single, 1)); }

    AggregatorDef with_params(const Params& p) const;

    /// Name plus parameters, e.g. "proportional[beta=0.5]".
    std::string display_name() const;
};

using ConnectivePtr = std::shared_ptr<const ConnectiveDef>;
using AggregatorPtr = std::shared_ptr<const AggregatorDef>;

/// Exact rational p/q with q > 0.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    friend bool operator==(const Rational&, const Rational&) = default;
};

/// Shortest decimal text that reads back to the same double, e.g. "1", "0.3".
std::string format_number(double x);

/// The shortest decimal that round-trips to x, as a reduced fraction.
Rational rational_from_decimal(double x);

/// A quantifier aggregating k sets, given by a predicate on (|D|, |X_1|, ..., |X_k|).
struct MostowskiQuantifier {
    std::string name;
    std::size_t k = 1;
    std::function<bool(std::size_t domain_size, std::span<const std::size_t> set_sizes)> holds;
};

/// The 0/1-valued aggregation function representing Q: with m_i = |p_i|,
/// D = [max m_i] and X_i = positions of p_i holding exactly 1, the value is 1 iff
/// (D, X_1, ..., X_k) is in Q.
AggregatorDef quantifier_to_agg(const MostowskiQuantifier& q);

MostowskiQuantifier proportional_quantifier(Rational beta);  // |X|/|D| >= beta
MostowskiQuantifier rescher_quantifier();                   // |X_1| <= |X_2|
MostowskiQuantifier hartig_quantifier();                    // |X_1| == |X_2|
MostowskiQuantifier exists_quantifier();                    // X nonempty
MostowskiQuantifier forall_quantifier();                    // X == D

using ConnectiveRegistry = std::map<std::string, ConnectivePtr, std::less<>>;
using AggregatorRegistry = std::map<std::string, AggregatorFactory, std::less<>>;

/// not, and, or, implies (Lukasiewicz) and prod.
ConnectiveRegistry builtin_connectives();

/// max, min, am, gm, length (|p|^-beta), lengthinv, tsum and the binary mu1u.
AggregatorRegistry builtin_aggregators();

/// proportional[beta], rescher, hartig, q_exists, q_forall.
AggregatorRegistry prebuilt_quantifiers();

class Catalog {
public:
    Catalog() = default;

    /// Every builtin connective, aggregator and quantifier adapter.
    static const Catalog& builtin();

    void add_connective(ConnectiveDef def);
    void add_aggregator(const std::string& name, AggregatorFactory factory);

    bool has_connective(std::string_view name) const;
    bool has_aggregator(std::string_view name) const;

    /// Throws pla::Error for unknown names.
    ConnectivePtr connective(std::string_view name) const;
    AggregatorPtr aggregator(std::string_view name, const Params& params = {}) const;

    std::vector<std::string> connective_names() const;
    std::vector<std::string> aggregator_names() const;

private:
    ConnectiveRegistry connectives_;
    AggregatorRegistry aggregators_;
};

}  // namespace pla
