#include "sbl/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace sbl {

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw std::runtime_error("format_double: to_chars failed");
    return std::string(buf, ptr);
}

std::vector<std::string> split_letters(const std::string& letters) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : letters) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else if (c != ' ' && c != '\t') {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    if (out.empty()) throw std::invalid_argument("config: empty letters list");
    return out;
}

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw std::invalid_argument("config: bad boolean for " + key + ": '" + v + "'");
}

template <typename T>
T parse_int(const std::string& v, const std::string& key) {
    T out{};
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
        throw std::invalid_argument("config: bad integer for " + key + ": '" + v + "'");
    }
    return out;
}

double parse_double(const std::string& v, const std::string& key) {
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
        throw std::invalid_argument("config: bad number for " + key + ": '" + v + "'");
    }
    return out;
}

} // namespace

void apply_override(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "family") cfg.family = value;
    else if (key == "letters") cfg.letters = value;
    else if (key == "truncation_K") cfg.truncation_K = parse_int<std::uint32_t>(value, key);
    else if (key == "renormalize") cfg.renormalize = parse_bool(value, key);
    else if (key == "table_file") cfg.table_file = value;
    else if (key == "table_inline") cfg.table_inline = value;
    else if (key == "w") cfg.w = value;
    else if (key == "power") cfg.power = parse_int<std::uint32_t>(value, key);
    else if (key == "kmax") cfg.kmax = parse_int<std::uint32_t>(value, key);
    else if (key == "kmax_conv") cfg.kmax_conv = parse_int<std::uint32_t>(value, key);
    else if (key == "rel_kmax") cfg.rel_kmax = parse_int<std::uint32_t>(value, key);
    else if (key == "depth") cfg.depth = parse_int<std::uint32_t>(value, key);
    else if (key == "margin") cfg.margin = parse_int<std::uint32_t>(value, key);
    else if (key == "samples") cfg.samples = parse_int<std::uint64_t>(value, key);
    else if (key == "seed") cfg.seed = parse_int<std::uint64_t>(value, key);
    else if (key == "epsilon") cfg.epsilon = parse_double(value, key);
    else if (key == "max_w_occurrences") cfg.max_w_occurrences = parse_int<std::int64_t>(value, key);
    else if (key == "out") cfg.out = value;
    else if (key == "svg") cfg.svg = parse_bool(value, key);
    else throw std::invalid_argument("config: unknown key '" + key + "'");
}

void validate_config(const ExperimentConfig& cfg) {
    if (cfg.family.empty()) throw std::invalid_argument("config: family must be set");
    split_letters(cfg.letters);
    if (cfg.power == 0) throw std::invalid_argument("config: power must be >= 1");
    if (cfg.kmax == 0) throw std::invalid_argument("config: kmax must be >= 1");
    if (cfg.kmax_conv == 0) throw std::invalid_argument("config: kmax_conv must be >= 1");
    if (cfg.depth == 0) throw std::invalid_argument("config: depth must be >= 1");
    if (cfg.margin == 0) throw std::invalid_argument("config: margin must be >= 1");
    if (cfg.samples == 0) throw std::invalid_argument("config: samples must be >= 1");
    if (!(cfg.epsilon > 0.0) || cfg.epsilon >= 1.0) {
        throw std::invalid_argument("config: epsilon must be in (0, 1)");
    }
    if (cfg.max_w_occurrences >= 0 && cfg.w.empty()) {
        throw std::invalid_argument("config: max_w_occurrences needs w");
    }
}

namespace {

ExperimentConfig parse_config_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    if (!j.is_object()) throw std::invalid_argument("config: JSON root must be an object");
    ExperimentConfig cfg;
    for (const auto& [key, val] : j.items()) {
        std::string v;
        if (val.is_string()) {
            v = val.get<std::string>();
        } else if (val.is_boolean()) {
            v = val.get<bool>() ? "true" : "false";
        } else if (val.is_number_integer()) {
            v = std::to_string(val.get<std::int64_t>());
        } else if (val.is_number_unsigned()) {
            v = std::to_string(val.get<std::uint64_t>());
        } else if (val.is_number_float()) {
            v = format_double(val.get<double>());
        } else {
            throw std::invalid_argument("config: unsupported JSON value for '" + key + "'");
        }
        apply_override(cfg, key, v);
    }
    return cfg;
}

} // namespace

ExperimentConfig parse_config(const std::string& text) {
    std::size_t first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        ExperimentConfig cfg = parse_config_json(text);
        validate_config(cfg);
        return cfg;
    }
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        std::string t = trim(line);
        if (t.empty()) continue;
        std::size_t eq = t.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config: line " + std::to_string(lineno) + " has no '='");
        }
        apply_override(cfg, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }
    validate_config(cfg);
    return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
    std::string s;
    auto kv = [&s](const std::string& k, const std::string& v) { s += k + " = " + v + "\n"; };
    kv("family", cfg.family);
    kv("letters", cfg.letters);
    kv("truncation_K", std::to_string(cfg.truncation_K));
    kv("renormalize", cfg.renormalize ? "true" : "false");
    if (!cfg.table_file.empty()) kv("table_file", cfg.table_file);
    if (!cfg.table_inline.empty()) kv("table_inline", cfg.table_inline);
    if (!cfg.w.empty()) kv("w", cfg.w);
    kv("power", std::to_string(cfg.power));
    kv("kmax", std::to_string(cfg.kmax));
    kv("kmax_conv", std::to_string(cfg.kmax_conv));
    kv("rel_kmax", std::to_string(cfg.rel_kmax));
    kv("depth", std::to_string(cfg.depth));
    kv("margin", std::to_string(cfg.margin));
    kv("samples", std::to_string(cfg.samples));
    kv("seed", std::to_string(cfg.seed));
    kv("epsilon", format_double(cfg.epsilon));
    kv("max_w_occurrences", std::to_string(cfg.max_w_occurrences));
    // `out` is deliberately omitted: where results land is not part of the
    // experiment, and keeping it out makes echoes byte-identical across dirs
    kv("svg", cfg.svg ? "true" : "false");
    return s;
}

std::string serialize_config_json(const ExperimentConfig& cfg) {
    nlohmann::json j;
    j["family"] = cfg.family;
    j["letters"] = cfg.letters;
    j["truncation_K"] = cfg.truncation_K;
    j["renormalize"] = cfg.renormalize;
    if (!cfg.table_file.empty()) j["table_file"] = cfg.table_file;
    if (!cfg.table_inline.empty()) j["table_inline"] = cfg.table_inline;
    if (!cfg.w.empty()) j["w"] = cfg.w;
    j["power"] = cfg.power;
    j["kmax"] = cfg.kmax;
    j["kmax_conv"] = cfg.kmax_conv;
    j["rel_kmax"] = cfg.rel_kmax;
    j["depth"] = cfg.depth;
    j["margin"] = cfg.margin;
    j["samples"] = cfg.samples;
    j["seed"] = cfg.seed;
    j["epsilon"] = cfg.epsilon;
    j["max_w_occurrences"] = cfg.max_w_occurrences;
    j["svg"] = cfg.svg;
    return j.dump(2) + "\n";
}

} // namespace sbl
