#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

namespace dsps::scenario {

using Cell = std::variant<double, std::int64_t, std::string>;

struct Column {
    std::string name;
    std::string unit;  // "1" for dimensionless
};

struct Provenance {
    std::string config_hash;
    std::string version;
    std::uint64_t seed = 0;
};

// Numbers print with %.10g so identical inputs give identical bytes.
class ResultTable {
public:
    ResultTable(std::string title, std::vector<Column> columns);

    void add_row(std::vector<Cell> row);
    void add_metadata(std::string key, Cell value);
    void set_provenance(Provenance provenance) { provenance_ = std::move(provenance); }

    const std::string& title() const { return title_; }
    const std::vector<Column>& columns() const { return columns_; }
    const std::vector<std::vector<Cell>>& rows() const { return rows_; }
    const std::vector<std::pair<std::string, Cell>>& metadata() const { return metadata_; }
    const Provenance& provenance() const { return provenance_; }

    std::size_t column_index(const std::string& name) const;
    double number(std::size_t row, const std::string& column) const;
    const Cell* find_metadata(const std::string& key) const;

    void write_csv(std::ostream& out) const;
    nlohmann::json to_json() const;

private:
    std::string title_;
    std::vector<Column> columns_;
    std::vector<std::vector<Cell>> rows_;
    std::vector<std::pair<std::string, Cell>> metadata_;
    Provenance provenance_;
};

std::string format_cell(const Cell& cell);
nlohmann::json cell_to_json(const Cell& cell);

}  // namespace dsps::scenario
