#pragma once

#include <filesystem>
#include <string>

#include "llmpso/experiment.hpp"

namespace llmpso {

enum class ReportFormat { csv, json };

ReportFormat parse_report_format(const std::string& text);

inline constexpr const char* csv_header = "pop_size,c1,c2,metric,mean,std,ci_low,ci_high,n";

std::string to_csv(const ExperimentResults& results);
/// One row per trial with the raw per-run samples.
std::string samples_csv(const ExperimentResults& results);
std::string to_json(const ExperimentResults& results);
ExperimentResults results_from_json(const std::string& text);
ExperimentResults load_results(const std::filesystem::path& path);

/// JSON for a single run, as embedded in the experiment report.
std::string run_report_json(const RunReport& report);

/// Companion samples file for a CSV report: "<stem>.samples.csv".
std::filesystem::path samples_path(const std::filesystem::path& path);

/// Writes the report; CSV also writes the samples companion. Each file goes
/// through a temporary in the same directory and an atomic rename.
void emit_report(const ExperimentResults& results, ReportFormat format,
                 const std::filesystem::path& path);

/// Writes `content` to `path` atomically. Throws io_error.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace llmpso
