#include "postrec/fields.hpp"

namespace postrec {

namespace {

constexpr std::array<std::string_view, kFieldCount> kSnakeNames = {
    "title",
    "question",
    "answer",
    "import_declaration",
    "method_declaration",
    "method_invocation",
    "variable_type",
    "variable_declaration",
    "class_instance",
};

constexpr std::array<std::string_view, kFieldCount> kDisplayNames = {
    "Title",
    "Question",
    "Answer",
    "ImportDeclaration",
    "MethodDeclaration",
    "MethodInvocation",
    "VariableDeclarationType",
    "VariableDeclaration",
    "ClassInstance",
};

} // namespace

std::string_view field_name(FieldId f) {
    return kSnakeNames[static_cast<std::size_t>(f)];
}

std::string_view field_display_name(FieldId f) {
    return kDisplayNames[static_cast<std::size_t>(f)];
}

std::optional<FieldId> parse_field_name(std::string_view name) {
    for (std::size_t i = 0; i < kFieldCount; ++i) {
        if (name == kSnakeNames[i] || name == kDisplayNames[i])
            return static_cast<FieldId>(i);
    }
    if (name == "VariableType")
        return FieldId::variable_type;
    if (name == "VariableDec")
        return FieldId::variable_declaration;
    return std::nullopt;
}

std::string_view scorer_mode_name(ScorerMode m) {
    return m == ScorerMode::standard ? "standard" : "tf_saturation";
}

std::optional<ScorerMode> parse_scorer_mode(std::string_view name) {
    if (name == "standard")
        return ScorerMode::standard;
    if (name == "tf_saturation" || name == "tf-saturation")
        return ScorerMode::tf_saturation;
    return std::nullopt;
}

} // namespace postrec
