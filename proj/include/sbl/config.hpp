#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace sbl {

// Everything an experiment run needs, round-trippable through text. Two
// on-disk forms are accepted: flat "key = value" lines (with '#' comments) and
// a flat JSON object with the same keys; serialization is canonical in both
// forms, so config -> text -> config is the identity.
struct ExperimentConfig {
    std::string family = "letter-uniform";
    std::string letters = "a,b"; // comma-separated symbol names
    std::uint32_t truncation_K = 40;
    bool renormalize = false;
    std::string table_file;
    std::string table_inline;

    std::string w;               // dotted word; empty = no w-specific output
    std::uint32_t power = 1;     // run on mu^*power instead of mu

    std::uint32_t kmax = 32;      // length-projection series depth
    std::uint32_t kmax_conv = 8;  // word-side series depth
    std::uint32_t rel_kmax = 0;   // boundary-conditional series depth (0 = skip)
    std::uint32_t depth = 4;      // cylinder table depth
    std::uint32_t margin = 4;     // boundary averaging margin
    std::uint64_t samples = 100000;
    std::uint64_t seed = 12345;
    double epsilon = 1e-15;
    std::int64_t max_w_occurrences = -1; // >= 0: certify occurrence_count(g,w) <= this on support

    std::string out;  // output directory; empty = $SBL_OUT or ./sbl-out
    bool svg = false; // also emit small SVG charts

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

// One "key = value" per line, canonical key order.
std::string serialize_config(const ExperimentConfig& cfg);
// Flat JSON object, alphabetical keys, 2-space indent.
std::string serialize_config_json(const ExperimentConfig& cfg);

// Applies one "key=value" override (CLI flags use this). Throws on unknown
// keys or unparsable values.
void apply_override(ExperimentConfig& cfg, const std::string& key, const std::string& value);

// Range checks shared by parsing and the CLI; throws std::invalid_argument.
void validate_config(const ExperimentConfig& cfg);

std::vector<std::string> split_letters(const std::string& letters);

// Shortest round-trip decimal form via std::to_chars (locale-independent).
std::string format_double(double v);

} // namespace sbl
