#include "skt/kernels.hpp"

#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace skt::kernels {

namespace {

// Rows below this are counted on one thread.
constexpr std::size_t kParallelRowThreshold = 1 << 15;

void check_family(const DataSet& data, std::size_t child, std::span<const std::size_t> parents) {
    if (child >= data.num_vars()) throw std::invalid_argument("family child out of range");
    for (std::size_t p : parents) {
        if (p >= data.num_vars() || p == child) throw std::invalid_argument("invalid family parent");
    }
}

std::vector<std::size_t> strides(const DataSet& data, std::span<const std::size_t> parents) {
    std::vector<std::size_t> s(parents.size());
    std::size_t stride = 1;
    for (std::size_t i = parents.size(); i-- > 0;) {
        s[i] = stride;
        stride *= data.variable(parents[i]).cardinality();
    }
    return s;
}

void count_range(const DataSet& data, std::size_t child, std::span<const std::size_t> parents,
                 std::span<const std::size_t> stride, std::size_t begin, std::size_t end,
                 std::uint32_t* counts) {
    const std::size_t r = data.variable(child).cardinality();
    const auto child_col = data.column(child);
    for (std::size_t row = begin; row < end; ++row) {
        std::size_t config = 0;
        for (std::size_t i = 0; i < parents.size(); ++i) config += data.column(parents[i])[row] * stride[i];
        ++counts[config * r + child_col[row]];
    }
}

}  // namespace

std::size_t num_configs(const DataSet& data, std::span<const std::size_t> parents) {
    std::size_t q = 1;
    for (std::size_t p : parents) q *= data.variable(p).cardinality();
    return q;
}

namespace serial {

std::vector<std::uint32_t> family_counts(const DataSet& data, std::size_t child,
                                         std::span<const std::size_t> parents) {
    check_family(data, child, parents);
    const std::size_t r = data.variable(child).cardinality();
    std::vector<std::uint32_t> counts(num_configs(data, parents) * r, 0);
    const auto stride = strides(data, parents);
    count_range(data, child, parents, stride, 0, data.num_rows(), counts.data());
    return counts;
}

std::vector<double> family_scores(const DataSet& data, std::span<const Family> families) {
    std::vector<double> out(families.size());
    for (std::size_t i = 0; i < families.size(); ++i) {
        const auto counts = family_counts(data, families[i].child, families[i].parents);
        out[i] = bic_from_counts(counts, data.variable(families[i].child).cardinality(), data.num_rows());
    }
    return out;
}

}  // namespace serial

std::vector<std::uint32_t> family_counts(const DataSet& data, std::size_t child,
                                         std::span<const std::size_t> parents) {
    const std::size_t n = data.num_rows();
#ifdef _OPENMP
    if (n >= kParallelRowThreshold && !omp_in_parallel()) {
        check_family(data, child, parents);
        const std::size_t cells = num_configs(data, parents) * data.variable(child).cardinality();
        const auto stride = strides(data, parents);
        std::vector<std::uint32_t> counts(cells, 0);
#pragma omp parallel
        {
            std::vector<std::uint32_t> local(cells, 0);
            const auto t = static_cast<std::size_t>(omp_get_thread_num());
            const auto nt = static_cast<std::size_t>(omp_get_num_threads());
            const std::size_t begin = n * t / nt;
            const std::size_t end = n * (t + 1) / nt;
            count_range(data, child, parents, stride, begin, end, local.data());
#pragma omp critical(skt_family_counts_merge)
            for (std::size_t i = 0; i < cells; ++i) counts[i] += local[i];
        }
        return counts;
    }
#endif
    return serial::family_counts(data, child, parents);
}

double bic_from_counts(std::span<const std::uint32_t> counts, std::size_t child_card, std::size_t n) {
    if (n == 0) throw std::invalid_argument("BIC needs at least one row");
    const std::size_t q = counts.size() / child_card;
    double ll = 0.0;
    for (std::size_t j = 0; j < q; ++j) {
        std::uint64_t total = 0;
        for (std::size_t k = 0; k < child_card; ++k) total += counts[j * child_card + k];
        if (total == 0) continue;
        const double log_total = std::log(static_cast<double>(total));
        for (std::size_t k = 0; k < child_card; ++k) {
            const std::uint32_t c = counts[j * child_card + k];
            if (c > 0) ll += c * (std::log(static_cast<double>(c)) - log_total);
        }
    }
    const double free_params = static_cast<double>(q) * static_cast<double>(child_card - 1);
    return ll - 0.5 * std::log(static_cast<double>(n)) * free_params;
}

double family_bic(const DataSet& data, std::size_t child, std::span<const std::size_t> parents) {
    const auto counts = family_counts(data, child, parents);
    return bic_from_counts(counts, data.variable(child).cardinality(), data.num_rows());
}

std::vector<double> family_scores(const DataSet& data, std::span<const Family> families) {
    if (data.num_rows() == 0) throw std::invalid_argument("BIC needs at least one row");
    std::vector<double> out(families.size());
    const auto n = static_cast<std::ptrdiff_t>(families.size());
    std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 8)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        try {
            const auto& f = families[static_cast<std::size_t>(i)];
            const auto counts = serial::family_counts(data, f.child, f.parents);
            out[static_cast<std::size_t>(i)] =
                bic_from_counts(counts, data.variable(f.child).cardinality(), data.num_rows());
        } catch (...) {
#pragma omp critical(skt_family_scores_error)
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
    return out;
}

}  // namespace skt::kernels
