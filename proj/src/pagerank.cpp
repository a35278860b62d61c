#include <pla/errors.hpp>
#include <pla/pagerank.hpp>

#include <cctype>

namespace pla {

namespace {

// Names used as bound variables: "y" for stage 0, "yk" and "zk" for stage k.
bool reserved(const std::string& v) {
    if (v == "y") return true;
    if (v.size() < 2 || (v[0] != 'y' && v[0] != 'z')) return false;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(v[i]))) return false;
    return true;
}

Formula stage_formula(std::size_t stage, const std::string& var, const std::string& relation) {
    const auto& cat = Catalog::builtin();
    if (stage == 0) return Formula::agg(cat.aggregator("lengthinv"), {Formula::eq(var, var)}, {"y"}, {Formula::truth()});
    const std::string y = "y" + std::to_string(stage);
    const std::string z = "z" + std::to_string(stage);
    Formula out = Formula::agg(cat.aggregator("lengthinv"), {Formula::eq(y, y)}, {z}, {Formula::atom(relation, {y, z})});
    Formula body = Formula::conjunction(Formula::eq(var, var),
                                        Formula::product(stage_formula(stage - 1, y, relation), out));
    return Formula::agg(cat.aggregator("tsum"), {body}, {y}, {Formula::atom(relation, {y, var})});
}

}  // namespace

Formula pagerank_formula(std::size_t stage, const std::string& var, const std::string& relation) {
    if (reserved(var)) throw Error("variable '" + var + "' clashes with the bound variables of the PageRank stages");
    return stage_formula(stage, var, relation);
}

std::optional<Formula> named_formula(std::string_view name) {
    if (name.size() < 3 || std::toupper(static_cast<unsigned char>(name[0])) != 'P' ||
        std::toupper(static_cast<unsigned char>(name[1])) != 'R')
        return std::nullopt;
    std::size_t stage = 0;
    for (std::size_t i = 2; i < name.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(name[i]))) return std::nullopt;
        stage = stage * 10 + static_cast<std::size_t>(name[i] - '0');
        if (stage > 64) return std::nullopt;
    }
    return pagerank_formula(stage);
}

}  // namespace pla
