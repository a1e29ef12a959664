// table.cpp — CSV and JSON rendering of column tables

#include "table.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace memkernel::cli {

void Table::add(std::vector<Cell> row) {
    if (row.size() != columns.size()) throw std::logic_error("table row width mismatch");
    rows.push_back(std::move(row));
}

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (x == 0.0) return "0";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

std::string csv_cell(const Cell& c) {
    struct Visitor {
        std::string operator()(double x) const { return format_number(x); }
        std::string operator()(std::int64_t x) const { return std::to_string(x); }
        std::string operator()(bool x) const { return x ? "true" : "false"; }
        std::string operator()(const std::string& s) const {
            if (s.find_first_of(",\"\n") == std::string::npos) return s;
            std::string q = "\"";
            for (const char ch : s) {
                if (ch == '"') q += '"';
                q += ch;
            }
            return q + '"';
        }
    };
    return std::visit(Visitor{}, c);
}

} // namespace

void write_csv(const Table& t, std::ostream& os) {
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
    os << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_cell(row[i]);
        os << '\n';
    }
}

nlohmann::json number(double x) {
    return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr);
}

nlohmann::json to_json(const Table& t) {
    auto arr = nlohmann::json::array();
    for (const auto& row : t.rows) {
        nlohmann::json obj = nlohmann::json::object();
        for (std::size_t i = 0; i < row.size(); ++i) {
            std::visit(
                [&](const auto& v) {
                    using V = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<V, double>) {
                        obj[t.columns[i]] = number(v);
                    } else {
                        obj[t.columns[i]] = v;
                    }
                },
                row[i]);
        }
        arr.push_back(std::move(obj));
    }
    return arr;
}

} // namespace memkernel::cli
