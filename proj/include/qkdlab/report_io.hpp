#pragma once

#include <string>
#include <vector>

#include "qkdlab/pipeline.hpp"

namespace qkdlab {

// All floats serialize with 12 significant digits; CSV uses comma
// separators, LF line endings, UTF-8 and a mandatory header row.
std::string format_double(double v);

const std::vector<std::string>& report_csv_columns();
std::string report_to_csv_row(const KeyRateReport& r);
std::string reports_to_csv(const std::vector<KeyRateReport>& rows);
std::vector<KeyRateReport> parse_report_csv(const std::string& text);

// Structured trace export: per-stage pguess / min-entropy / statistical
// distance, key values, the public transcript and its digest.
std::string trace_to_json(const PipelineTrace& trace, const KeyRateReport& report);

struct TraceSummary {
    StageMetrics sifted, corrected, amplified;
    bool sifted_exact = false, corrected_exact = false, amplified_exact = false;
    std::string sifted_key, corrected_key, amplified_key;
    std::vector<TranscriptEntry> transcript;
    std::string transcript_digest;
    bool residual_error = false;
};
TraceSummary parse_trace_json(const std::string& text);

std::string sweep_manifest_json(const ProtocolConfig& base,
                                const std::vector<double>& d_grid,
                                const std::vector<double>& qber_grid);

}  // namespace qkdlab
