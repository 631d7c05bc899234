#pragma once

#include <string>
#include <string_view>

#include "fluency/service/record.hpp"

namespace fluency::service {

inline constexpr std::string_view kDraftWatermark = "DRAFT — NOT APPROVED";

/// Standalone HTML report: analysis summary, overall classification, chunk
/// heatmap, therapy recommendations, generation history and the audit table.
/// Sessions that are not Approved carry the draft watermark.
std::string render_html(const SessionRecord& record);

std::string html_escape(std::string_view text);

}  // namespace fluency::service
