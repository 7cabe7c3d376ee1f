#include "coulomb/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "coulomb/errors.hpp"

namespace coulomb {
namespace {

using Json = nlohmann::ordered_json;

Json to_json(const Cell& cell) {
    return std::visit(
        [](const auto& v) -> Json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::monostate>) {
                return nullptr;
            } else if constexpr (std::is_same_v<T, double>) {
                if (!std::isfinite(v)) return nullptr;
                return v;
            } else {
                return v;
            }
        },
        cell);
}

Cell from_json(const Json& j) {
    switch (j.type()) {
        case Json::value_t::null:
            return std::monostate{};
        case Json::value_t::boolean:
            return j.get<bool>();
        case Json::value_t::number_integer:
        case Json::value_t::number_unsigned:
            return j.get<std::int64_t>();
        case Json::value_t::number_float:
            return j.get<double>();
        case Json::value_t::string:
            return j.get<std::string>();
        default:
            throw InvalidArgument("report: unsupported JSON value in cell");
    }
}

Json key_values_to_json(const KeyValues& kv) {
    Json obj = Json::object();
    for (const auto& [k, v] : kv) obj[k] = to_json(v);
    return obj;
}

KeyValues key_values_from_json(const Json& obj) {
    if (!obj.is_object()) throw InvalidArgument("report: expected an object");
    KeyValues kv;
    for (auto it = obj.begin(); it != obj.end(); ++it) kv.emplace_back(it.key(), from_json(it.value()));
    return kv;
}

std::string csv_field(const Cell& cell) {
    std::string text = std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::monostate>) {
                return {};
            } else if constexpr (std::is_same_v<T, bool>) {
                return v ? "true" : "false";
            } else if constexpr (std::is_same_v<T, std::int64_t>) {
                return std::to_string(v);
            } else if constexpr (std::is_same_v<T, double>) {
                return std::isfinite(v) ? format_double(v) : std::string{};
            } else {
                return v;
            }
        },
        cell);
    if (text.find_first_of(",\"\r\n") == std::string::npos) return text;
    std::string quoted = "\"";
    for (char ch : text) {
        if (ch == '"') quoted += '"';
        quoted += ch;
    }
    quoted += '"';
    return quoted;
}

void append_csv_row(std::string& out, const std::vector<Cell>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i > 0) out += ',';
        out += csv_field(row[i]);
    }
    out += "\r\n";
}

std::string serialize_csv(const ReportEnvelope& env) {
    std::string out;
    if (env.tables.size() == 1) {
        const auto& t = env.tables.front();
        append_csv_row(out, std::vector<Cell>(t.columns.begin(), t.columns.end()));
        for (const auto& row : t.rows) append_csv_row(out, row);
        return out;
    }

    std::vector<std::string> columns;
    for (const auto& t : env.tables) {
        for (const auto& c : t.columns) {
            if (std::find(columns.begin(), columns.end(), c) == columns.end()) columns.push_back(c);
        }
    }
    std::vector<Cell> header{std::string("table")};
    header.insert(header.end(), columns.begin(), columns.end());
    append_csv_row(out, header);
    for (const auto& t : env.tables) {
        std::vector<std::size_t> index;
        for (const auto& c : t.columns) {
            index.push_back(static_cast<std::size_t>(std::find(columns.begin(), columns.end(), c) - columns.begin()));
        }
        for (const auto& row : t.rows) {
            std::vector<Cell> full(columns.size() + 1);
            full[0] = t.name;
            for (std::size_t i = 0; i < row.size() && i < index.size(); ++i) full[index[i] + 1] = row[i];
            append_csv_row(out, full);
        }
    }
    return out;
}

}  // namespace

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

ReportFormat parse_report_format(std::string_view name) {
    if (name == "json") return ReportFormat::json;
    if (name == "csv") return ReportFormat::csv;
    throw InvalidArgument("unknown report format '" + std::string(name) + "' (expected json or csv)");
}

std::string serialize_report(const ReportEnvelope& env, ReportFormat format) {
    if (format == ReportFormat::csv) return serialize_csv(env);

    Json doc = Json::object();
    doc["tool"] = env.tool;
    doc["version"] = env.version;
    doc["timestamp"] = env.timestamp;
    doc["command"] = env.command;
    doc["config"] = key_values_to_json(env.config);
    doc["summary"] = key_values_to_json(env.summary);
    Json tables = Json::array();
    for (const auto& t : env.tables) {
        Json jt = Json::object();
        jt["name"] = t.name;
        jt["columns"] = t.columns;
        Json rows = Json::array();
        for (const auto& row : t.rows) {
            Json jr = Json::array();
            for (const auto& cell : row) jr.push_back(to_json(cell));
            rows.push_back(std::move(jr));
        }
        jt["rows"] = std::move(rows);
        tables.push_back(std::move(jt));
    }
    doc["tables"] = std::move(tables);
    doc["warnings"] = env.warnings;
    return doc.dump(2) + "\n";
}

ReportEnvelope parse_report_json(std::string_view text) {
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw InvalidArgument(std::string("report: malformed JSON: ") + e.what());
    }
    try {
        ReportEnvelope env;
        env.tool = doc.at("tool").get<std::string>();
        env.version = doc.at("version").get<std::string>();
        env.timestamp = doc.at("timestamp").get<std::string>();
        env.command = doc.at("command").get<std::string>();
        env.config = key_values_from_json(doc.at("config"));
        env.summary = key_values_from_json(doc.at("summary"));
        for (const auto& jt : doc.at("tables")) {
            Table t;
            t.name = jt.at("name").get<std::string>();
            t.columns = jt.at("columns").get<std::vector<std::string>>();
            for (const auto& jr : jt.at("rows")) {
                std::vector<Cell> row;
                for (const auto& cell : jr) row.push_back(from_json(cell));
                t.rows.push_back(std::move(row));
            }
            env.tables.push_back(std::move(t));
        }
        env.warnings = doc.at("warnings").get<std::vector<std::string>>();
        return env;
    } catch (const Json::exception& e) {
        throw InvalidArgument(std::string("report: unexpected document layout: ") + e.what());
    }
}

}  // namespace coulomb
