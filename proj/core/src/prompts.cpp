#include "oscar/prompts.hpp"

#include <algorithm>
#include <cctype>
#include <string>

#include "oscar/error.hpp"

namespace oscar {

std::string_view to_string(PromptType type) {
  switch (type) {
    case PromptType::kBlind: return "blind";
    case PromptType::kComma: return "comma";
    case PromptType::kCaption: return "caption";
    case PromptType::kAttributes: return "attributes";
  }
  return "attributes";
}

PromptType parse_prompt_type(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (PromptType t : kAllPromptTypes) {
    if (lower == to_string(t)) return t;
  }
  fail(ErrorCode::kInvalidArgument, "unknown prompt type '" + std::string(name) +
                                        "' (expected blind, comma, caption or attributes)");
}

std::string_view prompt_template(PromptType type) {
  switch (type) {
    case PromptType::kBlind:
      return "Imagine you're describing the object to a blind person. Be extremely "
             "detailed about the object's appearance, colors, shape, material, any "
             "text or logos, and any unique markings.";
    case PromptType::kComma:
      return "Describe the object in a comma-separated list, focusing on its visual "
             "appearance, color, material, and any visible text or brand names. Be "
             "concise.";
    case PromptType::kCaption:
      return "Write a detailed visual caption of the image, mentioning colors, "
             "materials, brand names, and visible labels.";
    case PromptType::kAttributes:
      return "Extract visual attributes of the main object in the image: object type, "
             "brand name, color, material, and label text.";
  }
  return {};
}

}  // namespace oscar
