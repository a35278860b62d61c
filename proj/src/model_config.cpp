#include <pla/errors.hpp>
#include <pla/model_config.hpp>

#include <json.hpp>

#include <charconv>
#include <fstream>
#include <sstream>

namespace pla {

namespace {

using nlohmann::json;

IidModel model_from_json(const json& j) {
    if (!j.is_object()) throw Error("model config must be an object");
    for (const auto& [key, value] : j.items())
        if (key != "signature" && key != "probs" && key != "schedule" && key != "seed")
            throw Error("unknown model config key '" + key + "'");
    if (!j.contains("signature") || !j["signature"].is_object()) throw Error("model config needs a signature table");
    if (!j.contains("probs") || !j["probs"].is_object()) throw Error("model config needs a probs table");

    IidModel m;
    for (const auto& [name, arity] : j["signature"].items()) {
        if (!arity.is_number_integer() || arity.get<std::int64_t>() < 1)
            throw Error("arity of " + name + " must be a positive integer");
        m.signature.add(name, arity.get<std::size_t>());
    }
    for (const auto& [name, p] : j["probs"].items()) {
        if (!p.is_number()) throw Error("probability of " + name + " must be a number");
        m.probs[name] = p.get<double>();
    }
    if (j.contains("schedule")) {
        if (!j["schedule"].is_array()) throw Error("schedule must be an array");
        for (const auto& n : j["schedule"]) {
            if (!n.is_number_integer() || n.get<std::int64_t>() < 1)
                throw Error("schedule entries must be positive integers");
            m.schedule.push_back(n.get<std::size_t>());
        }
    }
    if (j.contains("seed")) {
        const auto& s = j["seed"];
        if (!s.is_number_unsigned()) throw Error("seed must be a nonnegative integer");
        m.seed = s.get<std::uint64_t>();
    }
    m.validate();
    return m;
}

// Just enough TOML for model configs: [table] headers, key = value lines,
// inline tables, single- or multi-line arrays of numbers, strings, comments.
class TomlReader {
public:
    explicit TomlReader(std::string_view text) : s_(text) {}

    json read() {
        json root = json::object();
        json* table = &root;
        while (true) {
            skip_all();
            if (eof()) break;
            if (s_[i_] == '[') {
                ++i_;
                skip_ws();
                std::string name = key();
                skip_ws();
                if (!consume(']')) fail("expected ']' after table name");
                if (root.contains(name)) fail("table '" + name + "' defined twice");
                root[name] = json::object();
                table = &root[name];
            } else {
                std::string k = key();
                skip_ws();
                if (!consume('=')) fail("expected '=' after key '" + k + "'");
                skip_ws();
                if (table->contains(k)) fail("key '" + k + "' defined twice");
                (*table)[k] = value();
            }
            end_of_line();
        }
        return root;
    }

private:
    bool eof() const { return i_ >= s_.size(); }

    [[noreturn]] void fail(const std::string& msg) const {
        std::size_t line = 1;
        for (std::size_t j = 0; j < i_ && j < s_.size(); ++j) line += s_[j] == '\n';
        throw Error("TOML line " + std::to_string(line) + ": " + msg);
    }

    bool consume(char c) {
        if (!eof() && s_[i_] == c) {
            ++i_;
            return true;
        }
        return false;
    }

    void skip_ws() {
        while (!eof() && (s_[i_] == ' ' || s_[i_] == '\t')) ++i_;
    }

    void skip_comment() {
        if (!eof() && s_[i_] == '#')
            while (!eof() && s_[i_] != '\n') ++i_;
    }

    // Whitespace, newlines and comments, as allowed inside arrays.
    void skip_all() {
        while (!eof()) {
            skip_ws();
            skip_comment();
            if (!eof() && (s_[i_] == '\n' || s_[i_] == '\r'))
                ++i_;
            else
                break;
        }
    }

    void end_of_line() {
        skip_ws();
        skip_comment();
        if (!eof() && s_[i_] == '\r') ++i_;
        if (!eof() && !consume('\n')) fail("unexpected text after value");
    }

    std::string key() {
        if (!eof() && s_[i_] == '"') return string();
        std::size_t j = i_;
        while (j < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[j])) || s_[j] == '_' || s_[j] == '-')) ++j;
        if (j == i_) fail("expected a key");
        std::string out(s_.substr(i_, j - i_));
        i_ = j;
        return out;
    }

    std::string string() {
        ++i_;
        std::string out;
        while (!eof() && s_[i_] != '"') {
            if (s_[i_] == '\n') fail("unterminated string");
            if (s_[i_] == '\\') fail("escape sequences are not supported");
            out += s_[i_++];
        }
        if (!consume('"')) fail("unterminated string");
        return out;
    }

    json value() {
        if (eof()) fail("expected a value");
        const char c = s_[i_];
        if (c == '"') return string();
        if (c == '[') {
            ++i_;
            json arr = json::array();
            skip_all();
            while (!consume(']')) {
                arr.push_back(value());
                skip_all();
                if (consume(']')) break;
                if (!consume(',')) fail("expected ',' or ']' in array");
                skip_all();
            }
            return arr;
        }
        if (c == '{') {
            ++i_;
            json obj = json::object();
            skip_ws();
            while (!consume('}')) {
                std::string k = key();
                skip_ws();
                if (!consume('=')) fail("expected '=' in inline table");
                skip_ws();
                obj[k] = value();
                skip_ws();
                if (consume('}')) break;
                if (!consume(',')) fail("expected ',' or '}' in inline table");
                skip_ws();
            }
            return obj;
        }
        return number();
    }

    json number() {
        std::size_t j = i_;
        while (j < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[j])) || s_[j] == '.' || s_[j] == '+' ||
                                 s_[j] == '-' || s_[j] == '_'))
            ++j;
        std::string text;
        for (std::size_t k = i_; k < j; ++k)
            if (s_[k] != '_') text += s_[k];
        if (text.empty()) fail("expected a value");
        if (text[0] == '+') text.erase(0, 1);
        const char* b = text.data();
        const char* e = b + text.size();
        if (text.find_first_of(".eE") == std::string::npos) {
            if (text[0] == '-') {
                std::int64_t v = 0;
                if (auto r = std::from_chars(b, e, v); r.ec == std::errc() && r.ptr == e) {
                    i_ = j;
                    return v;
                }
            } else {
                std::uint64_t v = 0;
                if (auto r = std::from_chars(b, e, v); r.ec == std::errc() && r.ptr == e) {
                    i_ = j;
                    return v;
                }
            }
        }
        double v = 0.0;
        auto r = std::from_chars(b, e, v);
        if (r.ec != std::errc() || r.ptr != e) fail("malformed value '" + text + "'");
        i_ = j;
        return v;
    }

    std::string_view s_;
    std::size_t i_ = 0;
};

}  // namespace

IidModel parse_model_json(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(std::string("malformed JSON model config: ") + e.what());
    }
    return model_from_json(j);
}

IidModel parse_model_toml(std::string_view text) { return model_from_json(TomlReader(text).read()); }

IidModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open model config " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    const auto ext = path.extension().string();
    if (ext == ".json") return parse_model_json(buf.str());
    if (ext == ".toml") return parse_model_toml(buf.str());
    throw Error("model config must end in .json or .toml: " + path.string());
}

std::string model_to_json(const IidModel& model) {
    json j;
    j["signature"] = json::object();
    for (const auto& [name, arity] : model.signature.symbols()) j["signature"][name] = arity;
    j["probs"] = json::object();
    for (const auto& [name, p] : model.probs) j["probs"][name] = p;
    j["schedule"] = model.schedule;
    j["seed"] = model.seed;
    return j.dump(2);
}

}  // namespace pla
