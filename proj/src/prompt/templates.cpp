#include "fluency/prompt/templates.hpp"

#include <fstream>
#include <sstream>

#include "fluency/core/error.hpp"

namespace fluency::prompt {

namespace {

// Generated from templates/*.txt at configure time.
#include "fluency_embedded_templates.inc"

bool token_char(char c) { return (c >= 'a' && c <= 'z') || c == '_'; }

// Length of a {lower_snake} token starting at pos, or 0.
std::size_t token_length(std::string_view text, std::size_t pos) {
  if (text[pos] != '{') return 0;
  std::size_t end = pos + 1;
  while (end < text.size() && token_char(text[end])) ++end;
  if (end == pos + 1 || end >= text.size() || text[end] != '}') return 0;
  return end - pos + 1;
}

}  // namespace

std::string_view name(TemplateId id) {
  switch (id) {
    case TemplateId::TherapySystem: return "therapy_system";
    case TemplateId::TherapyHuman: return "therapy_human";
    case TemplateId::CriticSystem: return "critic_system";
    case TemplateId::CriticHuman: return "critic_human";
    case TemplateId::RefineSystem: return "refine_system";
    case TemplateId::RefineHuman: return "refine_human";
    case TemplateId::HumanRevision: return "human_revision";
  }
  return "";
}

const TemplateSet& TemplateSet::builtin() {
  static const TemplateSet set = [] {
    TemplateSet s;
    for (const auto& [stem, text] : kEmbeddedTemplates) {
      for (auto id : kAllTemplates) {
        if (name(id) == stem) s.texts_[id] = std::string(text);
      }
    }
    return s;
  }();
  return set;
}

TemplateSet TemplateSet::load(const std::filesystem::path& dir) {
  TemplateSet s;
  for (auto id : kAllTemplates) {
    auto path = dir / (std::string(name(id)) + ".txt");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::BadConfig, "missing template " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    s.texts_[id] = buf.str();
  }
  return s;
}

const std::string& TemplateSet::text(TemplateId id) const { return texts_.at(id); }

std::string substitute(std::string_view tmpl, const Bindings& bindings) {
  std::string out;
  out.reserve(tmpl.size());
  std::size_t line_start = 0;
  while (line_start < tmpl.size()) {
    std::size_t line_end = tmpl.find('\n', line_start);
    line_end = line_end == std::string_view::npos ? tmpl.size() : line_end + 1;
    const std::string_view line = tmpl.substr(line_start, line_end - line_start);
    line_start = line_end;

    std::string rendered;
    bool drop = false;
    for (std::size_t i = 0; i < line.size();) {
      const std::size_t len = token_length(line, i);
      if (len == 0) {
        rendered.push_back(line[i++]);
        continue;
      }
      const std::string_view key = line.substr(i + 1, len - 2);
      auto it = bindings.find(key);
      if (it == bindings.end()) throw Error(ErrorCode::MissingContext, std::string(key));
      if (!it->second) {
        drop = true;
        break;
      }
      rendered += *it->second;
      i += len;
    }
    if (!drop) out += rendered;
  }
  return out;
}

}  // namespace fluency::prompt
