#pragma once

#include "oscsde/experiments.hpp"

#include <string>
#include <string_view>

namespace oscsde {

inline constexpr std::string_view kCsvHeader =
    "experiment,problem,scheme,epsilon,h,M,error,ci_half_width,order_fit,residual,seed";

/// Shortest round-trip decimal form; "nan", "inf", "-inf" for non-finite values.
std::string format_number(double value);

/// `# key=value` provenance lines, the header, then one row per (scheme, eps, h).
std::string render_csv(const TableResult& result);
std::string render_json(const TableResult& result);

/// CSV: one row per (scheme, sample) with the endpoint error; JSON: config,
/// path dumps, per-run errors and medians.
std::string render_csv(const ResonanceResult& result);
std::string render_json(const ResonanceResult& result);

std::string render_csv(const ValidationResult& result);
std::string render_json(const ValidationResult& result);

/// Human-readable PASS/FAIL listing of a validation run.
std::string render_report(const ValidationResult& result);

/// `{"t": [...], "x": [[...]], "scheme": "...", "seed": ...}`.
std::string render_path_json(const SampledPath& path, std::uint64_t seed);

/// Machine-readable error record: `{"error": kind, "message": ..., ...}`.
std::string render_error(std::string_view kind, std::string_view message,
                         const NumericalBlowUp* blow_up = nullptr);

}  // namespace oscsde
