#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace postrec {

// The nine searchable fields of an indexed post. The first three hold analyzed
// natural-language tokens, the rest hold verbatim code tokens.
enum class FieldId : std::uint8_t {
    title = 0,
    question,
    answer,
    import_declaration,
    method_declaration,
    method_invocation,
    variable_type,
    variable_declaration,
    class_instance,
};

inline constexpr std::size_t kFieldCount = 9;

inline constexpr std::array<FieldId, kFieldCount> kAllFields = {
    FieldId::title,
    FieldId::question,
    FieldId::answer,
    FieldId::import_declaration,
    FieldId::method_declaration,
    FieldId::method_invocation,
    FieldId::variable_type,
    FieldId::variable_declaration,
    FieldId::class_instance,
};

constexpr bool is_text_field(FieldId f) {
    return f == FieldId::title || f == FieldId::question || f == FieldId::answer;
}

// snake_case name used in JSON and on disk.
std::string_view field_name(FieldId f);

// CamelCase name used in the human-readable query debug format.
std::string_view field_display_name(FieldId f);

// Accepts snake_case names, display names, and a couple of legacy spellings
// (VariableType, VariableDec). Returns nullopt for anything else.
std::optional<FieldId> parse_field_name(std::string_view name);

// How a term frequency is turned into a score contribution.
//   standard:      Okapi BM25, idf * tf * (k1 + 1) / (tf + k1 * norm)
//   tf_saturation: plain saturation ratio tf / (k1 * norm + tf), no idf term
enum class ScorerMode : std::uint8_t {
    standard = 0,
    tf_saturation,
};

std::string_view scorer_mode_name(ScorerMode m);
std::optional<ScorerMode> parse_scorer_mode(std::string_view name);

} // namespace postrec
