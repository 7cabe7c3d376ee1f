#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace coulomb {

/// One report value. NaN doubles serialize as JSON null / an empty CSV cell.
using Cell = std::variant<std::monostate, bool, std::int64_t, double, std::string>;

struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

using KeyValues = std::vector<std::pair<std::string, Cell>>;

/// Serialized result of one CLI run. The config echo holds every resolved
/// setting (timestamp included), so re-running from it reproduces the
/// document byte for byte.
struct ReportEnvelope {
    std::string tool = "coulomb";
    std::string version;
    std::string timestamp;
    std::string command;
    KeyValues config;
    KeyValues summary;
    std::vector<Table> tables;
    std::vector<std::string> warnings;
};

enum class ReportFormat { json, csv };

/// Throws InvalidArgument for anything but "json" or "csv".
ReportFormat parse_report_format(std::string_view name);

/// JSON: fixed key order, shortest round-trip doubles, UTF-8.
/// CSV (RFC 4180): one header row then one row per table row; with several
/// tables a leading "table" column names the source and the header is the
/// union of all columns.
std::string serialize_report(const ReportEnvelope& envelope, ReportFormat format);

/// Inverse of the JSON serialization. Throws InvalidArgument on malformed input.
ReportEnvelope parse_report_json(std::string_view text);

/// Shortest decimal that round-trips to the same double.
std::string format_double(double value);

}  // namespace coulomb
