// table.hpp — Column tables rendered as CSV (17 significant digits) or JSON

#pragma once

#include <json.hpp>

#include <cstdint>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace memkernel::cli {

using Cell = std::variant<double, std::int64_t, bool, std::string>;

inline Cell count_cell(std::size_t n) { return static_cast<std::int64_t>(n); }

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add(std::vector<Cell> row);
};

std::string format_number(double x);
void write_csv(const Table& t, std::ostream& os);
nlohmann::json to_json(const Table& t);
nlohmann::json number(double x);  // null for non-finite values

} // namespace memkernel::cli
