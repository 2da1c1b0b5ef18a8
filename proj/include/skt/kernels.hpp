#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "skt/dataset.hpp"

// Data-parallel counting and scoring kernels. Every kernel has a serial
// reference in skt::kernels::serial that the OpenMP version must match
// exactly; counts are integers and each family score is computed by one
// thread, so results do not depend on the thread count.
namespace skt::kernels {

/// A node and its parent set (sorted, distinct, not containing `child`).
struct Family {
    std::size_t child = 0;
    std::vector<std::size_t> parents;
};

/// Number of joint parent configurations.
std::size_t num_configs(const DataSet& data, std::span<const std::size_t> parents);

/// Joint counts laid out as [config * r + state], where the config index is
/// mixed-radix over `parents` with the last parent varying fastest.
std::vector<std::uint32_t> family_counts(const DataSet& data, std::size_t child,
                                         std::span<const std::size_t> parents);

/// BIC contribution of one family:
///   sum_jk N_jk log(N_jk / N_j) - 0.5 log(N) q (r - 1).
double family_bic(const DataSet& data, std::size_t child, std::span<const std::size_t> parents);

/// Scores for many families, one per entry of `families`.
std::vector<double> family_scores(const DataSet& data, std::span<const Family> families);

/// BIC from precomputed counts; `n` is the total row count.
double bic_from_counts(std::span<const std::uint32_t> counts, std::size_t child_card, std::size_t n);

namespace serial {
std::vector<std::uint32_t> family_counts(const DataSet& data, std::size_t child,
                                         std::span<const std::size_t> parents);
std::vector<double> family_scores(const DataSet& data, std::span<const Family> families);
}  // namespace serial

}  // namespace skt::kernels
