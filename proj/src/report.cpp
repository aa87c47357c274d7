#include <ebicsel/error.hpp>
#include <ebicsel/report.hpp>
#include <algorithm>
#include <charconv>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace ebicsel {
namespace {

// Shortest text that parses back to exactly v.
std::string exact(double v)
{
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, res.ptr};
}

std::string quoted(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

std::vector<std::string> split_csv(const std::string& line)
{
    std::vector<std::string> fields(1);
    bool in_quotes = false;
    for (size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (in_quotes) {
            if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                fields.back() += '"';
                ++i;
            } else if (ch == '"') {
                in_quotes = false;
            } else {
                fields.back() += ch;
            }
        } else if (ch == '"') {
            in_quotes = true;
        } else if (ch == ',') {
            fields.emplace_back();
        } else {
            fields.back() += ch;
        }
    }
    if (in_quotes) throw InvalidData("unterminated quote in CSV line");
    return fields;
}

double to_real(const std::string& s)
{
    double v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) throw InvalidData("not a number: '" + s + "'");
    return v;
}

long long to_integer(const std::string& s)
{
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) throw InvalidData("not an integer: '" + s + "'");
    return v;
}

// Rows of a CSV body after checking the header matches `expected`.
std::vector<std::vector<std::string>> read_rows(std::istream& in, const std::vector<std::string>& expected)
{
    std::string line;
    if (!std::getline(in, line)) throw InvalidData("empty CSV input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (split_csv(line) != expected) throw InvalidData("unexpected CSV header: " + line);
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto f = split_csv(line);
        if (f.size() != expected.size()) throw InvalidData("wrong field count in CSV line: " + line);
        rows.push_back(std::move(f));
    }
    return rows;
}

SettingKey parse_key(const std::vector<std::string>& f)
{
    SettingKey k;
    k.structure = parse_covariance_kind(f[0]);
    k.c = static_cast<int>(to_integer(f[1]));
    k.n = static_cast<index_t>(to_integer(f[2]));
    k.h = to_real(f[3]);
    return k;
}

std::string key_fields(const SettingKey& k)
{
    return to_string(k.structure) + ',' + std::to_string(k.c) + ',' + std::to_string(k.n) + ',' + exact(k.h);
}

const std::vector<std::string> summary_header{
    "structure", "c", "n", "h", "gamma_label", "pdr_mean", "pdr_sd", "fdr_mean", "fdr_sd",
    "replicates_completed", "failures", "flagged"};

const std::vector<std::string> replicate_header{
    "structure", "c", "n", "h", "gamma_label", "replicate", "pdr", "fdr", "selected_size", "lambda_star", "status"};

std::string short_decimal(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    std::string s = buf;
    if (s.rfind("0.", 0) == 0) s.erase(0, 1);
    else if (s.rfind("-0.", 0) == 0) s.erase(1, 1);
    return s;
}

} // namespace

std::string format_cell(double mean, double sd)
{
    return short_decimal(mean) + '(' + short_decimal(sd) + ')';
}

std::string emit_table(const std::vector<SettingSummary>& summaries, TableFormat format)
{
    if (summaries.empty()) throw InvalidArgument("emit_table: no summaries");

    std::vector<std::string> labels;
    std::vector<std::pair<CovarianceKind, int>> sections;
    for (const auto& s : summaries) {
        if (std::find(labels.begin(), labels.end(), s.gamma_label) == labels.end()) labels.push_back(s.gamma_label);
        const std::pair sec{s.setting.structure, s.setting.c};
        if (std::find(sections.begin(), sections.end(), sec) == sections.end()) sections.push_back(sec);
    }

    std::ostringstream out;
    if (format == TableFormat::Csv) {
        out << "structure,c,n,h";
        for (const auto& l : labels) out << ",pdr_" << quoted(l);
        for (const auto& l : labels) out << ",fdr_" << quoted(l);
        out << '\n';
    }

    bool first_section = true;
    for (const auto& [structure, c] : sections) {
        // (n, h) → label → summary
        std::map<std::pair<index_t, double>, std::map<std::string, const SettingSummary*>> rows;
        for (const auto& s : summaries) {
            if (s.setting.structure == structure && s.setting.c == c) {
                rows[{s.setting.n, s.setting.h}][s.gamma_label] = &s;
            }
        }

        if (format == TableFormat::Markdown) {
            if (!first_section) out << '\n';
            out << "### Structure " << to_string(structure) << ", c = " << c << "\n\n| n | h |";
            for (const auto& l : labels) out << " PDR " << l << " |";
            for (const auto& l : labels) out << " FDR " << l << " |";
            out << "\n|---|---|";
            for (size_t i = 0; i < 2 * labels.size(); ++i) out << "---|";
            out << '\n';
        }
        first_section = false;

        for (const auto& [nh, cells] : rows) {
            char h[32];
            std::snprintf(h, sizeof h, "%g", nh.second);
            std::vector<std::string> pdr, fdr;
            for (const auto& l : labels) {
                const auto it = cells.find(l);
                pdr.push_back(it == cells.end() ? "" : format_cell(it->second->pdr_mean, it->second->pdr_sd));
                fdr.push_back(it == cells.end() ? "" : format_cell(it->second->fdr_mean, it->second->fdr_sd));
            }
            if (format == TableFormat::Csv) {
                out << to_string(structure) << ',' << c << ',' << nh.first << ',' << h;
                for (const auto& v : pdr) out << ',' << v;
                for (const auto& v : fdr) out << ',' << v;
            } else {
                out << "| " << nh.first << " | " << h << " |";
                for (const auto& v : pdr) out << ' ' << v << " |";
                for (const auto& v : fdr) out << ' ' << v << " |";
            }
            out << '\n';
        }
    }
    return out.str();
}

void write_summary_csv(std::ostream& out, const std::vector<SettingSummary>& summaries)
{
    for (size_t i = 0; i < summary_header.size(); ++i) out << (i ? "," : "") << summary_header[i];
    out << '\n';
    for (const auto& s : summaries) {
        out << key_fields(s.setting) << ',' << quoted(s.gamma_label) << ',' << exact(s.pdr_mean) << ','
            << exact(s.pdr_sd) << ',' << exact(s.fdr_mean) << ',' << exact(s.fdr_sd) << ','
            << s.replicates_completed << ',' << s.failures << ',' << (s.flagged ? 1 : 0) << '\n';
    }
}

std::vector<SettingSummary> read_summary_csv(std::istream& in)
{
    std::vector<SettingSummary> out;
    for (const auto& f : read_rows(in, summary_header)) {
        SettingSummary s;
        s.setting = parse_key(f);
        s.gamma_label = f[4];
        s.pdr_mean = to_real(f[5]);
        s.pdr_sd = to_real(f[6]);
        s.fdr_mean = to_real(f[7]);
        s.fdr_sd = to_real(f[8]);
        s.replicates_completed = static_cast<index_t>(to_integer(f[9]));
        s.failures = static_cast<index_t>(to_integer(f[10]));
        s.flagged = to_integer(f[11]) != 0;
        out.push_back(std::move(s));
    }
    return out;
}

void write_replicate_csv(std::ostream& out, const std::vector<ReplicateRecord>& records)
{
    for (size_t i = 0; i < replicate_header.size(); ++i) out << (i ? "," : "") << replicate_header[i];
    out << '\n';
    for (const auto& r : records) {
        out << key_fields(r.setting) << ',' << quoted(r.gamma_label) << ',' << r.replicate << ','
            << exact(r.pdr) << ',' << exact(r.fdr) << ',' << r.selected_size << ',' << exact(r.lambda_star)
            << ',' << quoted(r.status) << '\n';
    }
}

std::vector<ReplicateRecord> read_replicate_csv(std::istream& in)
{
    std::vector<ReplicateRecord> out;
    for (const auto& f : read_rows(in, replicate_header)) {
        ReplicateRecord r;
        r.setting = parse_key(f);
        r.gamma_label = f[4];
        r.replicate = static_cast<index_t>(to_integer(f[5]));
        r.pdr = to_real(f[6]);
        r.fdr = to_real(f[7]);
        r.selected_size = static_cast<index_t>(to_integer(f[8]));
        r.lambda_star = to_real(f[9]);
        r.status = f[10];
        out.push_back(std::move(r));
    }
    return out;
}

} // namespace ebicsel
