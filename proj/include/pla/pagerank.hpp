#pragma once

// PageRank stages without damping, over a binary link relation E:
//   PR_0(x)     = lengthinv{ x = x : y : true }                       = 1/n
//   PR_{k+1}(x) = tsum{ x = x and prod(PR_k(y), out(y)) : y : E(y, x) }
//   out(y)      = lengthinv{ y = y : z : E(y, z) }                   = 1/|OUT_y|
// Stage k binds yk and zk (stage 0 binds y), so no stage captures another.

#include <pla/logic.hpp>

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace pla {

Formula pagerank_formula(std::size_t stage, const std::string& var = "x", const std::string& relation = "E");

/// "PR0", "PR1", "PR2" (case-insensitive, any stage number); nullopt for other names.
std::optional<Formula> named_formula(std::string_view name);

}  // namespace pla
