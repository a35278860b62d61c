#include <pla/syntax.hpp>

#include <cctype>
#include <charconv>
#include <optional>
#include <set>
#include <vector>

namespace pla {

namespace {

enum class Tok { ident, number, lparen, rparen, lbrace, rbrace, lbracket, rbracket, comma, colon, dot, equals, arrow, end };

struct Token {
    Tok kind;
    std::string text;
    std::size_t line;
    std::size_t col;
};

const std::set<std::string, std::less<>> keywords{"not", "and", "or", "true", "false", "exists", "forall"};

std::string describe(const Token& t) { return t.kind == Tok::end ? "end of input" : "'" + t.text + "'"; }

std::vector<Token> tokenize(std::string_view s) {
    std::vector<Token> out;
    std::size_t line = 1, col = 1, i = 0;
    auto advance = [&](std::size_t k) {
        for (std::size_t j = 0; j < k; ++j, ++i) {
            if (s[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    auto is_ident_start = [](char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; };
    auto is_ident = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; };
    auto is_digit = [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; };

    while (i < s.size()) {
        const char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        const std::size_t l = line, k = col, start = i;
        if (is_ident_start(c)) {
            std::size_t j = i;
            while (j < s.size() && is_ident(s[j])) ++j;
            out.push_back({Tok::ident, std::string(s.substr(i, j - i)), l, k});
            advance(j - i);
            continue;
        }
        const bool signed_number = c == '-' && i + 1 < s.size() && (is_digit(s[i + 1]) || s[i + 1] == '.');
        if (is_digit(c) || (c == '.' && i + 1 < s.size() && is_digit(s[i + 1])) || signed_number) {
            std::size_t j = signed_number ? i + 1 : i;
            while (j < s.size() && (is_digit(s[j]) || s[j] == '.')) ++j;
            if (j < s.size() && (s[j] == 'e' || s[j] == 'E')) {
                std::size_t m = j + 1;
                if (m < s.size() && (s[m] == '+' || s[m] == '-')) ++m;
                if (m < s.size() && is_digit(s[m])) {
                    while (m < s.size() && is_digit(s[m])) ++m;
                    j = m;
                }
            }
            out.push_back({Tok::number, std::string(s.substr(start, j - start)), l, k});
            advance(j - i);
            continue;
        }
        if (c == '-' && i + 1 < s.size() && s[i + 1] == '>') {
            out.push_back({Tok::arrow, "->", l, k});
            advance(2);
            continue;
        }
        Tok kind;
        switch (c) {
            case '(': kind = Tok::lparen; break;
            case ')': kind = Tok::rparen; break;
            case '{': kind = Tok::lbrace; break;
            case '}': kind = Tok::rbrace; break;
            case '[': kind = Tok::lbracket; break;
            case ']': kind = Tok::rbracket; break;
            case ',': kind = Tok::comma; break;
            case ':': kind = Tok::colon; break;
            case '.': kind = Tok::dot; break;
            case '=': kind = Tok::equals; break;
            default: throw ParseError(std::string("unexpected character '") + c + "'", l, k);
        }
        out.push_back({kind, std::string(1, c), l, k});
        advance(1);
    }
    out.push_back({Tok::end, "", line, col});
    return out;
}

class Parser {
public:
    Parser(std::vector<Token> tokens, const Catalog& catalog) : toks_(std::move(tokens)), catalog_(catalog) {}

    Formula parse_all() {
        Formula f = formula();
        if (peek().kind != Tok::end) fail("expected end of input, found " + describe(peek()));
        return f;
    }

private:
    const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }
    const Token& take() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
    bool is_keyword(const Token& t, std::string_view kw) const { return t.kind == Tok::ident && t.text == kw; }
    bool is_name(const Token& t) const { return t.kind == Tok::ident && !keywords.count(t.text); }

    [[noreturn]] void fail(const std::string& msg) const { fail_at(peek(), msg); }
    [[noreturn]] static void fail_at(const Token& t, const std::string& msg) { throw ParseError(msg, t.line, t.col); }

    const Token& expect(Tok kind, const char* what) {
        if (peek().kind != kind) fail(std::string("expected ") + what + ", found " + describe(peek()));
        return take();
    }

    std::string variable() {
        if (!is_name(peek())) fail("expected a variable, found " + describe(peek()));
        return take().text;
    }

    // Library errors raised while building a node are reported at its first token.
    template <typename Build>
    Formula build_at(const Token& at, Build&& build) {
        try {
            return build();
        } catch (const ParseError&) {
            throw;
        } catch (const Error& e) {
            fail_at(at, e.what());
        }
    }

    Formula formula() { return implication(); }

    Formula implication() {
        Formula lhs = disjunction();
        if (peek().kind != Tok::arrow) return lhs;
        take();
        Formula rhs = implication();
        return Formula::implication(lhs, rhs);
    }

    Formula disjunction() {
        Formula f = conjunction();
        while (is_keyword(peek(), "or")) {
            take();
            f = Formula::disjunction(f, conjunction());
        }
        return f;
    }

    Formula conjunction() {
        Formula f = unary();
        while (is_keyword(peek(), "and")) {
            take();
            f = Formula::conjunction(f, unary());
        }
        return f;
    }

    Formula unary() {
        const Token& t = peek();
        if (is_keyword(t, "not")) {
            take();
            return Formula::negation(unary());
        }
        if (is_keyword(t, "exists") || is_keyword(t, "forall")) {
            const bool ex = t.text == "exists";
            const Token& at = take();
            std::vector<std::string> vars;
            // A run of names followed by "." is the variable list; otherwise one variable.
            std::size_t run = 0;
            while (is_name(peek(run))) ++run;
            if (run > 0 && peek(run).kind == Tok::dot) {
                for (std::size_t i = 0; i < run; ++i) vars.push_back(take().text);
                take();
            } else {
                vars.push_back(variable());
                if (peek().kind == Tok::dot) take();
            }
            Formula body = unary();
            return build_at(at, [&] { return ex ? Formula::exists(vars, body) : Formula::forall(vars, body); });
        }
        return primary();
    }

    double number_value(const Token& t) {
        double v = 0.0;
        auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        if (res.ec != std::errc() || res.ptr != t.text.data() + t.text.size())
            fail_at(t, "malformed number '" + t.text + "'");
        return v;
    }

    Formula primary() {
        const Token& t = peek();
        if (t.kind == Tok::number) {
            take();
            const double v = number_value(t);
            return build_at(t, [&] { return Formula::constant(v); });
        }
        if (is_keyword(t, "true")) {
            take();
            return Formula::truth();
        }
        if (is_keyword(t, "false")) {
            take();
            return Formula::falsity();
        }
        if (t.kind == Tok::lparen) {
            take();
            Formula f = formula();
            expect(Tok::rparen, "')'");
            return f;
        }
        if (!is_name(t)) fail("expected a formula, found " + describe(t));
        const Token& name = take();
        switch (peek().kind) {
            case Tok::equals: {
                take();
                std::string rhs = variable();
                return Formula::eq(name.text, rhs);
            }
            case Tok::lparen: return application(name);
            case Tok::lbrace:
            case Tok::lbracket: return aggregation(name);
            default: fail_at(name, "expected '=', '(' or '{' after '" + name.text + "'");
        }
    }

    Formula application(const Token& name) {
        take();
        if (catalog_.has_connective(name.text)) {
            std::vector<Formula> args{formula()};
            while (peek().kind == Tok::comma) {
                take();
                args.push_back(formula());
            }
            expect(Tok::rparen, "')'");
            auto conn = catalog_.connective(name.text);
            return build_at(name, [&] { return Formula::conn(conn, args); });
        }
        std::vector<std::string> vars{variable()};
        while (peek().kind == Tok::comma) {
            take();
            vars.push_back(variable());
        }
        expect(Tok::rparen, "')'");
        return Formula::atom(name.text, std::move(vars));
    }

    Formula aggregation(const Token& name) {
        Params params;
        if (peek().kind == Tok::lbracket) {
            take();
            do {
                if (!params.empty()) take();
                const Token& key = peek();
                if (key.kind != Tok::ident) fail("expected a parameter name, found " + describe(key));
                take();
                expect(Tok::equals, "'='");
                const Token& value = expect(Tok::number, "a number");
                if (!params.emplace(key.text, number_value(value)).second)
                    fail_at(key, "parameter '" + key.text + "' given twice");
            } while (peek().kind == Tok::comma);
            expect(Tok::rbracket, "']'");
        }
        expect(Tok::lbrace, "'{'");
        std::vector<Formula> inner{formula()};
        while (peek().kind == Tok::comma) {
            take();
            inner.push_back(formula());
        }
        expect(Tok::colon, "':'");
        std::vector<std::string> bound;
        while (true) {
            if (peek().kind == Tok::comma && !bound.empty()) take();
            if (!is_name(peek())) break;
            bound.push_back(take().text);
        }
        if (bound.empty()) fail("expected bound variables, found " + describe(peek()));
        expect(Tok::colon, "':'");
        std::vector<Formula> conditions{formula()};
        while (peek().kind == Tok::comma) {
            take();
            conditions.push_back(formula());
        }
        expect(Tok::rbrace, "'}'");
        return build_at(name, [&] {
            auto agg = catalog_.aggregator(name.text, params);
            return Formula::agg(agg, inner, bound, conditions);
        });
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    const Catalog& catalog_;
};

void print(const Formula& f, std::string& out) {
    const auto& node = f.node();
    if (const auto* c = std::get_if<ConstNode>(&node)) {
        out += format_number(c->value);
    } else if (const auto* e = std::get_if<EqNode>(&node)) {
        out += e->left + " = " + e->right;
    } else if (const auto* a = std::get_if<AtomNode>(&node)) {
        out += a->symbol + "(";
        for (std::size_t i = 0; i < a->vars.size(); ++i) out += (i ? ", " : "") + a->vars[i];
        out += ")";
    } else if (const auto* cn = std::get_if<ConnNode>(&node)) {
        const std::string& name = cn->connective->name;
        if (name == "not" && cn->children.size() == 1) {
            out += "(not ";
            print(cn->children[0], out);
            out += ")";
        } else if ((name == "and" || name == "or" || name == "implies") && cn->children.size() == 2) {
            out += "(";
            print(cn->children[0], out);
            out += name == "implies" ? " -> " : " " + name + " ";
            print(cn->children[1], out);
            out += ")";
        } else {
            out += name + "(";
            for (std::size_t i = 0; i < cn->children.size(); ++i) {
                if (i) out += ", ";
                print(cn->children[i], out);
            }
            out += ")";
        }
    } else {
        const auto& ag = std::get<AggNode>(node);
        out += ag.aggregator->display_name() + "{";
        for (std::size_t i = 0; i < ag.inner.size(); ++i) {
            if (i) out += ", ";
            print(ag.inner[i], out);
        }
        out += " :";
        for (const auto& y : ag.bound) out += " " + y;
        out += " : ";
        bool shared = true;
        for (const auto& c : ag.conditions) shared = shared && c == ag.conditions.front();
        const std::size_t shown = shared ? 1 : ag.conditions.size();
        for (std::size_t i = 0; i < shown; ++i) {
            if (i) out += ", ";
            print(ag.conditions[i], out);
        }
        out += "}";
    }
}

}  // namespace

Formula parse(std::string_view text, const Catalog& catalog) {
    return Parser(tokenize(text), catalog).parse_all();
}

std::string pretty(const Formula& f) {
    std::string out;
    print(f, out);
    return out;
}

}  // namespace pla
