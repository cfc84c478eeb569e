#pragma once

#include <array>
#include <string_view>

namespace oscar {

/// Captioning prompt templates used during onboarding.
enum class PromptType { kBlind, kComma, kCaption, kAttributes };

inline constexpr std::array<PromptType, 4> kAllPromptTypes = {
    PromptType::kBlind, PromptType::kComma, PromptType::kCaption,
    PromptType::kAttributes};

// Attributes scores best on large or cluttered databases; Blind on small
// sets of very distinct objects.
inline constexpr PromptType kDefaultPromptType = PromptType::kAttributes;

/// Lower-case wire name ("blind", "comma", "caption", "attributes").
std::string_view to_string(PromptType type);

/// Accepts the wire name, case-insensitively. Throws invalid-argument.
PromptType parse_prompt_type(std::string_view name);

/// Verbatim instruction sent to the captioning model.
std::string_view prompt_template(PromptType type);

}  // namespace oscar
