#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "reforacle/assessor.hpp"

namespace reforacle {

/// CSV field quoting per RFC 4180.
std::string csv_field(std::string_view value);

struct SummaryTables {
  std::vector<std::filesystem::path> files;
  std::vector<std::string> warnings;
};

/// Writes the summary CSVs for `outcomes` into `out_dir`:
///   accuracy.csv      first-attempt overall / BC / CE / preserving accuracy per run
///   heatmap.csv       first-attempt accuracy per refactoring type
///   taxonomy.csv      answer-label counts per ground-truth category
///   telemetry.csv     per-call latency, token and cost aggregates
///   adjudication.csv  diff-mode answers awaiting manual review
/// Inconclusive records are left out of every denominator and counted in the
/// `inconclusive_excluded` column.
SummaryTables summarize(const std::vector<AssessmentOutcome>& outcomes,
                        const std::filesystem::path& out_dir);

/// Loads an outcomes file and summarizes it; an empty file yields header-only
/// tables and a warning. Throws PipelineError(SchemaMismatch) on bad records.
SummaryTables summarize_file(const std::filesystem::path& outcomes_file,
                             const std::filesystem::path& out_dir);

}  // namespace reforacle
