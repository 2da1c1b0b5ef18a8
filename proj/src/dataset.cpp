#include "skt/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "skt/rng.hpp"

namespace skt {

std::optional<std::uint8_t> Variable::state_index(std::string_view state) const {
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (states[i] == state) return static_cast<std::uint8_t>(i);
    }
    return std::nullopt;
}

DataSet::DataSet(std::vector<Variable> variables, std::size_t class_index)
    : variables_(std::move(variables)), class_index_(class_index), columns_(variables_.size()) {
    if (class_index_ >= variables_.size()) {
        throw std::invalid_argument("class index out of range");
    }
    if (variables_[class_index_].cardinality() != 2) {
        throw std::invalid_argument("class variable must have exactly two states");
    }
    for (const auto& v : variables_) {
        if (v.states.empty() || v.states.size() > 255) {
            throw std::invalid_argument("variable '" + v.name + "' needs 1..255 states");
        }
    }
}

std::optional<std::size_t> DataSet::index_of(std::string_view name) const {
    for (std::size_t i = 0; i < variables_.size(); ++i) {
        if (variables_[i].name == name) return i;
    }
    return std::nullopt;
}

std::vector<std::uint8_t> DataSet::row(std::size_t r) const {
    if (r >= rows_) throw std::out_of_range("row index out of range");
    std::vector<std::uint8_t> out(variables_.size());
    for (std::size_t v = 0; v < variables_.size(); ++v) out[v] = columns_[v][r];
    return out;
}

void DataSet::add_row(std::span<const std::uint8_t> values) {
    if (values.size() != variables_.size()) {
        throw std::invalid_argument("row width does not match the number of variables");
    }
    for (std::size_t v = 0; v < values.size(); ++v) {
        if (values[v] >= variables_[v].cardinality()) {
            throw std::invalid_argument("value out of domain for variable '" + variables_[v].name + "'");
        }
    }
    for (std::size_t v = 0; v < values.size(); ++v) columns_[v].push_back(values[v]);
    ++rows_;
}

void DataSet::reserve(std::size_t rows) {
    for (auto& c : columns_) c.reserve(rows);
}

DataSet DataSet::subset(std::span<const std::size_t> rows) const {
    DataSet out(variables_, class_index_);
    out.reserve(rows.size());
    for (std::size_t v = 0; v < variables_.size(); ++v) {
        for (std::size_t r : rows) out.columns_[v].push_back(columns_[v].at(r));
    }
    out.rows_ = rows.size();
    return out;
}

std::size_t DataSet::count_class(std::uint8_t value) const {
    const auto& c = columns_[class_index_];
    return static_cast<std::size_t>(std::count(c.begin(), c.end(), value));
}

TrainTest split(const DataSet& data, double ratio, std::uint64_t seed) {
    if (!(ratio > 0.0 && ratio < 1.0)) {
        throw std::invalid_argument("split ratio must lie in (0, 1)");
    }
    std::vector<std::vector<std::size_t>> by_class(2);
    for (std::size_t r = 0; r < data.num_rows(); ++r) by_class[data.label(r)].push_back(r);
    for (const auto& rows : by_class) {
        if (rows.size() < 2) {
            throw std::invalid_argument("split needs at least 2 rows per class");
        }
    }

    Rng rng(seed);
    std::vector<std::size_t> train_rows;
    std::vector<std::size_t> test_rows;
    for (auto& rows : by_class) {
        rng.shuffle(rows.begin(), rows.end());
        const auto n_train = static_cast<std::size_t>(std::lround(ratio * static_cast<double>(rows.size())));
        train_rows.insert(train_rows.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(n_train));
        test_rows.insert(test_rows.end(), rows.begin() + static_cast<std::ptrdiff_t>(n_train), rows.end());
    }
    std::sort(train_rows.begin(), train_rows.end());
    std::sort(test_rows.begin(), test_rows.end());
    return {data.subset(train_rows), data.subset(test_rows)};
}

}  // namespace skt
