#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "rypanel/errors.hpp"

namespace rypanel {

/// (entity, year) position of one observation.
struct RowKey {
    std::string entity;
    int year = 0;

    bool operator==(const RowKey&) const = default;
    auto operator<=>(const RowKey&) const = default;
};

enum class ZeroPolicy { Error, Drop };

/// Immutable region x year table. Rows are sorted by (entity, year), every
/// (entity, year) pair appears once, and all columns share the row count.
/// Missing cells are stored as NaN and excluded downstream per model.
struct PanelDataset {
    std::string entity_column = "region";
    std::string year_column = "year";
    std::vector<std::string> entities;      // sorted, ascending
    std::vector<int> periods;               // sorted distinct years present
    std::vector<std::string> column_names;  // original column order
    std::map<std::string, std::vector<double>> columns;
    std::vector<RowKey> row_index;

    int n_rows() const { return static_cast<int>(row_index.size()); }
    bool has_column(const std::string& name) const { return columns.count(name) > 0; }
    const std::vector<double>& column(const std::string& name) const;

    /// Derived, never stored: true when every (entity, year) pair exists.
    bool is_balanced() const;

    bool operator==(const PanelDataset& other) const;
};

struct EntitySpan {
    int first_year = 0;
    int last_year = 0;
    int count = 0;

    bool operator==(const EntitySpan&) const = default;
};

struct BalanceReport {
    bool balanced = true;
    std::vector<RowKey> missing_pairs;
    std::map<std::string, EntitySpan> per_entity_span;
    std::map<std::string, int> missing_cells; // blank-cell count per variable

    bool operator==(const BalanceReport&) const = default;
};

/// Which header columns play the entity and year roles. Empty strings mean
/// "first column" and "second column" respectively.
struct CsvSchema {
    std::string entity_column;
    std::string year_column;
};

PanelDataset load_panel(std::istream& source, const CsvSchema& schema = {});
PanelDataset load_panel_file(const std::string& path, const CsvSchema& schema = {});

/// Serializes in the same CSV dialect load_panel reads; a write/load round
/// trip reproduces the dataset exactly (doubles use shortest-round-trip form).
void write_panel(const PanelDataset& ds, std::ostream& out);
void write_panel_file(const PanelDataset& ds, const std::string& path);

/// Adds ln_<name> columns for each selected variable. Under Drop, rows where
/// any selected value <= 0 are removed; `dropped` (when given) receives them.
PanelDataset log_transform(const PanelDataset& ds, const std::vector<std::string>& variables,
                           ZeroPolicy zero_policy = ZeroPolicy::Error,
                           std::vector<RowKey>* dropped = nullptr);

PanelDataset subset_period(const PanelDataset& ds, int start_year, int end_year);

BalanceReport balance_check(const PanelDataset& ds);

} // namespace rypanel
