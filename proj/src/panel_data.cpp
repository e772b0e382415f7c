#include "rypanel/panel_data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace rypanel {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(field);
            field.clear();
        } else if (ch != '\r') {
            field += ch;
        }
    }
    fields.push_back(field);
    return fields;
}

bool same_cell(double a, double b) {
    if (std::isnan(a) && std::isnan(b)) return true;
    return a == b;
}

double parse_number(const std::string& text, int row, const std::string& col) {
    const char* first = text.data();
    const char* last = first + text.size();
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last)
        fail(ErrorCode::ParseError,
             "non-numeric value '" + text + "' at row " + std::to_string(row) + ", column " + col);
    return value;
}

int parse_year(const std::string& text, int row) {
    const char* first = text.data();
    const char* last = first + text.size();
    int value = 0;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last)
        fail(ErrorCode::ParseError, "non-integer year '" + text + "' at row " + std::to_string(row));
    return value;
}

std::string format_cell(double v) {
    if (std::isnan(v)) return "";
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

} // namespace

const std::vector<double>& PanelDataset::column(const std::string& name) const {
    auto it = columns.find(name);
    if (it == columns.end()) fail(ErrorCode::UnknownVariable, "no column named '" + name + "'");
    return it->second;
}

bool PanelDataset::is_balanced() const {
    return n_rows() == static_cast<int>(entities.size() * periods.size());
}

bool PanelDataset::operator==(const PanelDataset& other) const {
    if (entity_column != other.entity_column || year_column != other.year_column ||
        entities != other.entities || periods != other.periods ||
        column_names != other.column_names || row_index != other.row_index)
        return false;
    for (const auto& [name, values] : columns) {
        auto it = other.columns.find(name);
        if (it == other.columns.end() || it->second.size() != values.size()) return false;
        for (size_t i = 0; i < values.size(); ++i)
            if (!same_cell(values[i], it->second[i])) return false;
    }
    return columns.size() == other.columns.size();
}

PanelDataset load_panel(std::istream& source, const CsvSchema& schema) {
    std::string line;
    if (!std::getline(source, line)) fail(ErrorCode::SchemaError, "empty input, header row required");
    const std::vector<std::string> header = split_csv_line(line);
    if (header.size() < 2) fail(ErrorCode::SchemaError, "header must name at least entity and year columns");

    const std::string entity_col = schema.entity_column.empty() ? header[0] : schema.entity_column;
    const std::string year_col = schema.year_column.empty() ? header[1] : schema.year_column;

    int entity_idx = -1;
    int year_idx = -1;
    std::vector<std::string> var_names;
    std::vector<int> var_idx;
    for (size_t i = 0; i < header.size(); ++i) {
        if (header[i] == entity_col && entity_idx < 0) {
            entity_idx = static_cast<int>(i);
        } else if (header[i] == year_col && year_idx < 0) {
            year_idx = static_cast<int>(i);
        } else {
            var_names.push_back(header[i]);
            var_idx.push_back(static_cast<int>(i));
        }
    }
    if (entity_idx < 0) fail(ErrorCode::SchemaError, "designated entity column '" + entity_col + "' not in header");
    if (year_idx < 0) fail(ErrorCode::SchemaError, "designated year column '" + year_col + "' not in header");
    {
        std::set<std::string> seen;
        for (const auto& name : header)
            if (!seen.insert(name).second)
                fail(ErrorCode::SchemaError, "duplicate header column '" + name + "'");
    }

    struct RawRow {
        RowKey key;
        std::vector<double> values;
    };
    std::vector<RawRow> rows;
    int line_no = 1;
    while (std::getline(source, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const std::vector<std::string> fields = split_csv_line(line);
        if (fields.size() != header.size())
            fail(ErrorCode::ParseError, "row " + std::to_string(line_no) + " has " +
                                            std::to_string(fields.size()) + " fields, expected " +
                                            std::to_string(header.size()));
        RawRow row;
        row.key.entity = fields[static_cast<size_t>(entity_idx)];
        row.key.year = parse_year(fields[static_cast<size_t>(year_idx)], line_no);
        row.values.reserve(var_idx.size());
        for (size_t v = 0; v < var_idx.size(); ++v) {
            const std::string& cell = fields[static_cast<size_t>(var_idx[v])];
            row.values.push_back(cell.empty() ? kNaN : parse_number(cell, line_no, var_names[v]));
        }
        rows.push_back(std::move(row));
    }

    std::stable_sort(rows.begin(), rows.end(),
                     [](const RawRow& a, const RawRow& b) { return a.key < b.key; });
    for (size_t i = 1; i < rows.size(); ++i)
        if (rows[i].key == rows[i - 1].key)
            fail(ErrorCode::DuplicateObservation,
                 "(" + rows[i].key.entity + ", " + std::to_string(rows[i].key.year) + ") appears more than once");

    PanelDataset ds;
    ds.entity_column = entity_col;
    ds.year_column = year_col;
    ds.column_names = var_names;
    std::set<std::string> entity_set;
    std::set<int> year_set;
    for (const auto& name : var_names) ds.columns[name].reserve(rows.size());
    for (const auto& row : rows) {
        ds.row_index.push_back(row.key);
        entity_set.insert(row.key.entity);
        year_set.insert(row.key.year);
        for (size_t v = 0; v < var_names.size(); ++v) ds.columns[var_names[v]].push_back(row.values[v]);
    }
    ds.entities.assign(entity_set.begin(), entity_set.end());
    ds.periods.assign(year_set.begin(), year_set.end());
    return ds;
}

PanelDataset load_panel_file(const std::string& path, const CsvSchema& schema) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::IoError, "cannot open data file '" + path + "'");
    return load_panel(in, schema);
}

void write_panel(const PanelDataset& ds, std::ostream& out) {
    out << ds.entity_column << ',' << ds.year_column;
    for (const auto& name : ds.column_names) out << ',' << name;
    out << '\n';
    for (int r = 0; r < ds.n_rows(); ++r) {
        out << ds.row_index[static_cast<size_t>(r)].entity << ','
            << ds.row_index[static_cast<size_t>(r)].year;
        for (const auto& name : ds.column_names)
            out << ',' << format_cell(ds.column(name)[static_cast<size_t>(r)]);
        out << '\n';
    }
}

void write_panel_file(const PanelDataset& ds, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail(ErrorCode::IoError, "cannot write data file '" + path + "'");
    write_panel(ds, out);
}

PanelDataset log_transform(const PanelDataset& ds, const std::vector<std::string>& variables,
                           ZeroPolicy zero_policy, std::vector<RowKey>* dropped) {
    for (const auto& name : variables)
        if (!ds.has_column(name)) fail(ErrorCode::UnknownVariable, "no column named '" + name + "'");

    std::vector<char> keep(static_cast<size_t>(ds.n_rows()), 1);
    if (zero_policy == ZeroPolicy::Drop) {
        for (const auto& name : variables) {
            const auto& values = ds.column(name);
            for (int r = 0; r < ds.n_rows(); ++r)
                if (!std::isnan(values[static_cast<size_t>(r)]) && values[static_cast<size_t>(r)] <= 0.0)
                    keep[static_cast<size_t>(r)] = 0;
        }
    } else {
        for (const auto& name : variables) {
            const auto& values = ds.column(name);
            for (int r = 0; r < ds.n_rows(); ++r) {
                const double v = values[static_cast<size_t>(r)];
                if (!std::isnan(v) && v <= 0.0)
                    fail(ErrorCode::NonPositiveValue,
                         "variable '" + name + "' is " + std::to_string(v) + " at (" +
                             ds.row_index[static_cast<size_t>(r)].entity + ", " +
                             std::to_string(ds.row_index[static_cast<size_t>(r)].year) + ")");
            }
        }
    }

    PanelDataset out;
    out.entity_column = ds.entity_column;
    out.year_column = ds.year_column;
    out.column_names = ds.column_names;
    for (const auto& name : variables) {
        const std::string log_name = "ln_" + name;
        if (!ds.has_column(log_name) &&
            std::find(out.column_names.begin(), out.column_names.end(), log_name) == out.column_names.end())
            out.column_names.push_back(log_name);
    }

    std::set<std::string> entity_set;
    std::set<int> year_set;
    for (int r = 0; r < ds.n_rows(); ++r) {
        if (!keep[static_cast<size_t>(r)]) {
            if (dropped) dropped->push_back(ds.row_index[static_cast<size_t>(r)]);
            continue;
        }
        out.row_index.push_back(ds.row_index[static_cast<size_t>(r)]);
        entity_set.insert(ds.row_index[static_cast<size_t>(r)].entity);
        year_set.insert(ds.row_index[static_cast<size_t>(r)].year);
    }
    out.entities.assign(entity_set.begin(), entity_set.end());
    out.periods.assign(year_set.begin(), year_set.end());

    for (const auto& name : ds.column_names) {
        auto& col = out.columns[name];
        const auto& src = ds.column(name);
        col.reserve(out.row_index.size());
        for (int r = 0; r < ds.n_rows(); ++r)
            if (keep[static_cast<size_t>(r)]) col.push_back(src[static_cast<size_t>(r)]);
    }
    for (const auto& name : variables) {
        const std::string log_name = "ln_" + name;
        if (ds.has_column(log_name)) continue; // already present, keep as is
        auto& col = out.columns[log_name];
        const auto& src = ds.column(name);
        col.reserve(out.row_index.size());
        for (int r = 0; r < ds.n_rows(); ++r) {
            if (!keep[static_cast<size_t>(r)]) continue;
            const double v = src[static_cast<size_t>(r)];
            col.push_back(std::isnan(v) ? kNaN : std::log(v));
        }
    }
    return out;
}

PanelDataset subset_period(const PanelDataset& ds, int start_year, int end_year) {
    if (start_year > end_year)
        fail(ErrorCode::DomainError, "subset start year " + std::to_string(start_year) +
                                         " exceeds end year " + std::to_string(end_year));

    PanelDataset out;
    out.entity_column = ds.entity_column;
    out.year_column = ds.year_column;
    out.column_names = ds.column_names;

    std::vector<char> keep(static_cast<size_t>(ds.n_rows()), 0);
    std::set<std::string> entity_set;
    std::set<int> year_set;
    for (int r = 0; r < ds.n_rows(); ++r) {
        const int year = ds.row_index[static_cast<size_t>(r)].year;
        if (year < start_year || year > end_year) continue;
        keep[static_cast<size_t>(r)] = 1;
        out.row_index.push_back(ds.row_index[static_cast<size_t>(r)]);
        entity_set.insert(ds.row_index[static_cast<size_t>(r)].entity);
        year_set.insert(year);
    }
    if (out.row_index.empty())
        fail(ErrorCode::EmptySubset, "no observations between " + std::to_string(start_year) +
                                         " and " + std::to_string(end_year));
    out.entities.assign(entity_set.begin(), entity_set.end());
    out.periods.assign(year_set.begin(), year_set.end());
    for (const auto& name : ds.column_names) {
        auto& col = out.columns[name];
        const auto& src = ds.column(name);
        col.reserve(out.row_index.size());
        for (int r = 0; r < ds.n_rows(); ++r)
            if (keep[static_cast<size_t>(r)]) col.push_back(src[static_cast<size_t>(r)]);
    }
    return out;
}

BalanceReport balance_check(const PanelDataset& ds) {
    BalanceReport report;
    std::set<std::pair<std::string, int>> present;
    for (const auto& key : ds.row_index) {
        present.insert({key.entity, key.year});
        auto [it, inserted] = report.per_entity_span.try_emplace(key.entity,
                                                                 EntitySpan{key.year, key.year, 1});
        if (!inserted) {
            it->second.first_year = std::min(it->second.first_year, key.year);
            it->second.last_year = std::max(it->second.last_year, key.year);
            ++it->second.count;
        }
    }
    for (const auto& entity : ds.entities)
        for (int year : ds.periods)
            if (!present.count({entity, year})) report.missing_pairs.push_back({entity, year});
    report.balanced = report.missing_pairs.empty();

    for (const auto& name : ds.column_names) {
        int missing = 0;
        for (double v : ds.column(name))
            if (std::isnan(v)) ++missing;
        if (missing > 0) report.missing_cells[name] = missing;
    }
    return report;
}

} // namespace rypanel
