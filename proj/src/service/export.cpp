#include "fluency/service/export.hpp"

#include <cstdio>

#include "fluency/analysis/aggregate.hpp"

namespace fluency::service {

namespace {

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

std::string_view color_of(StutterLabel label) {
  switch (label) {
    case StutterLabel::Prolongation: return "#e67e22";
    case StutterLabel::Block: return "#c0392b";
    case StutterLabel::SoundRepetition: return "#8e44ad";
    case StutterLabel::WordRepetition: return "#2980b9";
    case StutterLabel::Interjection: return "#16a085";
    case StutterLabel::Fluent: return "#7f8c8d";
  }
  return "#7f8c8d";
}

std::string row(std::string_view key, const std::string& value) {
  return "<tr><th>" + html_escape(key) + "</th><td>" + html_escape(value) + "</td></tr>\n";
}

constexpr std::string_view kStyle = R"(<style>
body{font-family:sans-serif;margin:2em;max-width:60em;color:#222}
table{border-collapse:collapse;margin:0.5em 0}
th,td{border:1px solid #ccc;padding:4px 8px;text-align:left;vertical-align:top}
.heatmap{display:flex;flex-wrap:wrap;gap:2px}
.cell{display:block;width:28px;height:28px}
.watermark{color:#c0392b;font-size:1.6em;font-weight:bold;border:3px solid #c0392b;padding:0.3em;text-align:center}
.urgent{background:#fdecea;border-left:6px solid #c0392b;padding:0.5em}
pre{white-space:pre-wrap;background:#f6f6f6;padding:0.5em}
</style>
)";

void summary_section(std::string& out, const SessionRecord& r) {
  out += "<section id=\"analysis-summary\"><h2>Analysis Summary</h2>\n<table>\n";
  out += row("Duration", fixed(r.duration_s(), 2) + " s");
  out += row("Sample rate", std::to_string(r.sample_rate_hz) + " Hz");
  out += row("Chunks", std::to_string(r.analyses.size()));
  out += row("Window", std::to_string(r.seg_config.duration_s()) + " s, " +
                           std::to_string(r.seg_config.overlap_pct()) + "% overlap");
  out += "</table>\n<h3>Type distribution</h3>\n<table>\n";
  if (!r.analyses.empty()) {
    for (const auto& [label, f] : analysis::type_distribution(r.analyses)) {
      out += row(display_name(label), fixed(100.0 * f, 1) + "%");
    }
  }
  out += "</table></section>\n";
}

void classification_section(std::string& out, const SessionRecord& r) {
  out += "<section id=\"overall-classification\"><h2>Overall Classification</h2>\n";
  if (!r.classification) {
    out += "<p>Not available.</p></section>\n";
    return;
  }
  const auto& c = *r.classification;
  out += "<table>\n";
  out += row("Primary type", std::string(display_name(c.primary_type)));
  out += row("Secondary type",
             c.secondary_type ? std::string(display_name(*c.secondary_type)) : "None");
  out += row("Severity", std::string(to_string(c.severity)));
  out += row("Stuttering percentage", fixed(c.stuttering_pct, 1) + "% of chunks");
  out += row("Weighted confidence", fixed(c.weighted_confidence, 3));
  std::string phonemes;
  for (const auto& p : c.problematic_phonemes) {
    if (!phonemes.empty()) phonemes += ", ";
    phonemes += "/" + p.phoneme + "/ (" + fixed(p.ratio, 2) + ")";
  }
  out += row("Problematic phonemes", phonemes.empty() ? "None identified" : phonemes);
  out += "</table></section>\n";
}

void heatmap_section(std::string& out, const SessionRecord& r) {
  out += "<section id=\"chunk-heatmap\"><h2>Chunk Heatmap</h2>\n<div class=\"heatmap\">\n";
  for (const auto& a : r.analyses) {
    std::string tip = fixed(a.start_s, 2) + "-" + fixed(a.end_s, 2) + " s | " +
                      std::string(display_name(a.top_label)) + " | " +
                      fixed(a.confidence, 2);
    if (a.phonemes && !a.phonemes->empty()) {
      tip += " | ";
      for (const auto& p : *a.phonemes) tip += p + " ";
      tip.pop_back();
    }
    if (a.transcript && !a.transcript->empty()) tip += " | \"" + *a.transcript + "\"";
    out += "<a class=\"cell\" href=\"/api/sessions/" + html_escape(r.id) + "/chunks/" +
           std::to_string(a.chunk_index) + "/audio\" data-chunk=\"" +
           std::to_string(a.chunk_index) + "\" title=\"" + html_escape(tip) +
           "\" style=\"background:" + std::string(color_of(a.top_label)) +
           ";opacity:" + fixed(a.confidence, 3) + "\"></a>\n";
  }
  out += "</div>\n<p>";
  for (auto label : kAllLabels) {
    out += "<span style=\"color:" + std::string(color_of(label)) + "\">&#9632;</span> " +
           html_escape(display_name(label)) + " ";
  }
  out += "</p></section>\n";
}

void plan_section(std::string& out, const SessionRecord& r) {
  out += "<section id=\"therapy-recommendations\"><h2>Therapy Recommendations</h2>\n";
  if (!r.plan) {
    out += "<p>No therapy plan (classification-only session).</p></section>\n";
    return;
  }
  const auto& p = *r.plan;
  if (p.urgent_flag) {
    out += "<p class=\"urgent\">This plan contains an urgent clinical note. Immediate "
           "human assessment is required.</p>\n";
  }
  out += "<h3>Explanation</h3>\n<table>\n";
  out += row("Stuttering type", p.explanation.stuttering_type_definition);
  out += row("Patient characteristics", p.explanation.patient_characteristics);
  out += row("Therapeutic rationale", p.explanation.therapeutic_rationale);
  out += "</table>\n<h3>Primary Goal</h3>\n<table>\n";
  out += row("Goal", p.primary_goal.goal);
  out += row("Target", p.primary_goal.target);
  out += row("Baseline", p.primary_goal.baseline);
  if (!p.primary_goal.rationale.empty()) out += row("Rationale", p.primary_goal.rationale);
  out += "</table>\n<h3>Step by Step Plan</h3>\n<ol>\n";
  for (const auto& step : p.steps) {
    out += "<li><h4>" + html_escape(step.name) + "</h4>\n<p><b>Week range:</b> " +
           html_escape(step.week_range) + "<br><b>Objective:</b> " +
           html_escape(step.objective) + "</p>\n<ul>\n";
    for (const auto& s : step.strategies) {
      const auto& cr = s.clinical_reasoning;
      out += "<li><b>" + html_escape(s.name) + "</b>: " + html_escape(s.description) +
             "\n<pre>" + html_escape(s.instructions) + "</pre>\n<table>\n" +
             row("Observation", cr.observation) + row("Clinical rationale", cr.clinicalRationale) +
             row("Expected outcome", cr.expectedOutcome) + row("Evidence base", cr.evidenceBase) +
             "</table></li>\n";
    }
    out += "</ul></li>\n";
  }
  out += "</ol></section>\n";
}

void history_section(std::string& out, const SessionRecord& r) {
  out += "<section id=\"generation-history\"><h2>Generation History</h2>\n";
  if (r.history.empty()) out += "<p>No generation rounds.</p>\n";
  for (const auto& g : r.history) {
    out += "<details><summary>Round " + std::to_string(g.round) + ": " +
           html_escape(to_string(g.role)) + (g.parsed_ok ? "" : " (not used)") +
           "</summary>\n<h4>System prompt</h4><pre>" + html_escape(g.prompt_system) +
           "</pre>\n<h4>Human prompt</h4><pre>" + html_escape(g.prompt_human) +
           "</pre>\n<h4>Output</h4><pre>" + html_escape(g.raw_output) + "</pre>";
    if (!g.parse_error.empty()) {
      out += "\n<p>Parse error: " + html_escape(g.parse_error) + "</p>";
    }
    out += "</details>\n";
  }
  out += "</section>\n";
}

void audit_section(std::string& out, const SessionRecord& r) {
  out += "<section id=\"audit-log\"><h2>Audit Log</h2>\n<table class=\"audit\">\n"
         "<tr><th>Timestamp (UTC)</th><th>Clinician</th><th>Action</th><th>Feedback</th>"
         "<th>Resulting state</th></tr>\n";
  for (const auto& e : r.audit_log) {
    out += "<tr><td>" + html_escape(review::format_timestamp(e.timestamp)) + "</td><td>" +
           html_escape(e.clinician_id) + "</td><td>" + html_escape(to_string(e.action)) +
           "</td><td>" + html_escape(e.feedback.value_or("")) + "</td><td>" +
           html_escape(to_string(e.resulting_state)) + "</td></tr>\n";
  }
  out += "</table></section>\n";
}

}  // namespace

std::string html_escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&#39;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string render_html(const SessionRecord& r) {
  const bool approved = r.lifecycle == Lifecycle::Approved;
  std::string out = "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n";
  out += "<title>Therapy report " + html_escape(r.id) + "</title>\n";
  out += kStyle;
  out += "</head>\n<body>\n";
  if (!approved) out += "<p class=\"watermark\">" + std::string(kDraftWatermark) + "</p>\n";
  out += "<h1>Speech therapy report</h1>\n<p>Session " + html_escape(r.id) + " &middot; " +
         html_escape(to_string(r.lifecycle)) + " &middot; created " +
         html_escape(review::format_timestamp(r.created_at)) + "</p>\n";
  summary_section(out, r);
  classification_section(out, r);
  heatmap_section(out, r);
  plan_section(out, r);
  history_section(out, r);
  audit_section(out, r);
  out += "</body>\n</html>\n";
  return out;
}

}  // namespace fluency::service
