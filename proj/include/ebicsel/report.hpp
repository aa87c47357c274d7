#pragma once
#include <ebicsel/experiment.hpp>
#include <iosfwd>
#include <string>
#include <vector>

namespace ebicsel {

enum class TableFormat
{
    Csv,
    Markdown,
};

/// "mean(sd)" at three decimals with leading zeros dropped: 0.921, 0.159 → ".921(.159)".
std::string format_cell(double mean, double sd);

/**
 * Study table: one section per (structure, c), rows keyed (n, h), and a PDR
 * and an FDR column per γ label. CSV output carries the section key as
 * leading columns; both formats hold the same cells.
 */
std::string emit_table(const std::vector<SettingSummary>& summaries, TableFormat format);

/// Summary CSV with reals in shortest round-trip form, so reading it back is exact.
void write_summary_csv(std::ostream& out, const std::vector<SettingSummary>& summaries);
std::vector<SettingSummary> read_summary_csv(std::istream& in);

/// Per-replicate log; read_replicate_csv ∘ write_replicate_csv is the identity.
void write_replicate_csv(std::ostream& out, const std::vector<ReplicateRecord>& records);
std::vector<ReplicateRecord> read_replicate_csv(std::istream& in);

} // namespace ebicsel
