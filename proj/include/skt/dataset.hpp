#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace skt {

/// A categorical variable with named states. State values are stored as
/// indices into `states`.
struct Variable {
    std::string name;
    std::vector<std::string> states;

    std::size_t cardinality() const { return states.size(); }
    std::optional<std::uint8_t> state_index(std::string_view state) const;

    bool operator==(const Variable&) const = default;
};

/// Column-major table of categorical values with one binary class column.
///
/// Rows are appended through add_row, which checks every cell against its
/// variable's domain, so a DataSet never holds an out-of-domain value.
class DataSet {
public:
    DataSet(std::vector<Variable> variables, std::size_t class_index);

    std::size_t num_vars() const { return variables_.size(); }
    std::size_t num_rows() const { return rows_; }
    std::size_t class_index() const { return class_index_; }

    const std::vector<Variable>& variables() const { return variables_; }
    const Variable& variable(std::size_t i) const { return variables_.at(i); }
    std::optional<std::size_t> index_of(std::string_view name) const;

    std::span<const std::uint8_t> column(std::size_t var) const { return columns_.at(var); }
    std::uint8_t at(std::size_t row, std::size_t var) const { return columns_[var][row]; }
    std::vector<std::uint8_t> row(std::size_t r) const;
    std::uint8_t label(std::size_t r) const { return columns_[class_index_][r]; }

    void add_row(std::span<const std::uint8_t> values);
    void reserve(std::size_t rows);

    /// Rows at the given indices, in the given order.
    DataSet subset(std::span<const std::size_t> rows) const;

    std::size_t count_class(std::uint8_t value) const;

    bool same_schema(const DataSet& other) const {
        return variables_ == other.variables_ && class_index_ == other.class_index_;
    }

    bool operator==(const DataSet& other) const {
        return same_schema(other) && columns_ == other.columns_;
    }

private:
    std::vector<Variable> variables_;
    std::size_t class_index_;
    std::vector<std::vector<std::uint8_t>> columns_;
    std::size_t rows_ = 0;
};

struct TrainTest {
    DataSet train;
    DataSet test;
};

/// Stratified, seed-deterministic partition. Each class contributes
/// round(ratio * n_class) rows to `train`; both halves keep original row order.
TrainTest split(const DataSet& data, double ratio, std::uint64_t seed);

}  // namespace skt
