#include "dsps/scenario/table_writer.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "dsps/errors.hpp"

namespace dsps::scenario {

namespace {

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (x == 0.0) return "0";  // no "-0"
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

std::string quote_if_needed(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

std::string format_cell(const Cell& cell) {
    if (const auto* d = std::get_if<double>(&cell)) return format_double(*d);
    if (const auto* i = std::get_if<std::int64_t>(&cell)) return std::to_string(*i);
    return std::get<std::string>(cell);
}

nlohmann::json cell_to_json(const Cell& cell) {
    if (const auto* d = std::get_if<double>(&cell)) {
        if (!std::isfinite(*d)) return format_double(*d);
        // round-trip through the CSV text so both formats carry the same digits
        return std::stod(format_double(*d));
    }
    if (const auto* i = std::get_if<std::int64_t>(&cell)) return *i;
    return std::get<std::string>(cell);
}

ResultTable::ResultTable(std::string title, std::vector<Column> columns)
    : title_(std::move(title)), columns_(std::move(columns)) {}

void ResultTable::add_row(std::vector<Cell> row) {
    if (row.size() != columns_.size()) {
        throw NumericalError("row width " + std::to_string(row.size()) + " does not match " +
                             std::to_string(columns_.size()) + " columns in " + title_);
    }
    rows_.push_back(std::move(row));
}

void ResultTable::add_metadata(std::string key, Cell value) {
    metadata_.emplace_back(std::move(key), std::move(value));
}

std::size_t ResultTable::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        if (columns_[i].name == name) return i;
    }
    throw NumericalError("no column " + name + " in " + title_);
}

double ResultTable::number(std::size_t row, const std::string& column) const {
    const Cell& c = rows_.at(row).at(column_index(column));
    if (const auto* d = std::get_if<double>(&c)) return *d;
    if (const auto* i = std::get_if<std::int64_t>(&c)) return static_cast<double>(*i);
    throw NumericalError("column " + column + " is not numeric");
}

const Cell* ResultTable::find_metadata(const std::string& key) const {
    for (const auto& [k, v] : metadata_) {
        if (k == key) return &v;
    }
    return nullptr;
}

void ResultTable::write_csv(std::ostream& out) const {
    out << "# " << title_ << '\n';
    for (const auto& [key, value] : metadata_) out << "# " << key << ": " << format_cell(value) << '\n';
    out << "# units: ";
    for (std::size_t i = 0; i < columns_.size(); ++i) out << (i ? "," : "") << columns_[i].unit;
    out << '\n';
    for (std::size_t i = 0; i < columns_.size(); ++i) out << (i ? "," : "") << columns_[i].name;
    out << '\n';
    for (const auto& row : rows_) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            out << (i ? "," : "") << quote_if_needed(format_cell(row[i]));
        }
        out << '\n';
    }
    out << "# config_hash: " << provenance_.config_hash << '\n';
    out << "# version: " << provenance_.version << '\n';
    out << "# seed: " << provenance_.seed << '\n';
}

nlohmann::json ResultTable::to_json() const {
    using nlohmann::json;
    json meta = json::object();
    for (const auto& [key, value] : metadata_) meta[key] = cell_to_json(value);
    json cols = json::array();
    for (const auto& c : columns_) cols.push_back(json{{"name", c.name}, {"unit", c.unit}});
    json rows = json::array();
    for (const auto& row : rows_) {
        json r = json::array();
        for (const auto& cell : row) r.push_back(cell_to_json(cell));
        rows.push_back(std::move(r));
    }
    return json{{"title", title_},
                {"metadata", meta},
                {"columns", cols},
                {"rows", rows},
                {"provenance",
                 {{"config_hash", provenance_.config_hash},
                  {"version", provenance_.version},
                  {"seed", provenance_.seed}}}};
}

}  // namespace dsps::scenario
