#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace fluency::prompt {

enum class TemplateId {
  TherapySystem,
  TherapyHuman,
  CriticSystem,
  CriticHuman,
  RefineSystem,
  RefineHuman,
  HumanRevision,
};

inline constexpr std::array<TemplateId, 7> kAllTemplates = {
    TemplateId::TherapySystem, TemplateId::TherapyHuman,
    TemplateId::CriticSystem,  TemplateId::CriticHuman,
    TemplateId::RefineSystem,  TemplateId::RefineHuman,
    TemplateId::HumanRevision,
};

/// Asset stem under templates/, e.g. "therapy_system".
std::string_view name(TemplateId id);

class TemplateSet {
 public:
  /// The assets compiled into the library.
  static const TemplateSet& builtin();
  /// Reads <dir>/<name>.txt for every template. Throws Error(BadConfig) if a
  /// file is missing.
  static TemplateSet load(const std::filesystem::path& dir);

  const std::string& text(TemplateId id) const;

 private:
  std::map<TemplateId, std::string> texts_;
};

/// Value bound to a placeholder. nullopt marks optional data that is absent:
/// every template line mentioning that placeholder is dropped.
using Bindings = std::map<std::string, std::optional<std::string>, std::less<>>;

/// Single-pass substitution of {lower_snake} tokens. Substituted values are
/// never rescanned, so braces inside values are inert. Throws
/// Error(MissingContext, name) for a token with no binding.
std::string substitute(std::string_view tmpl, const Bindings& bindings);

}  // namespace fluency::prompt
