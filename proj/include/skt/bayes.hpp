#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "skt/dataset.hpp"

namespace skt {

/// Directed acyclic graph over at most 64 nodes, stored as parent bitmasks.
class Dag {
public:
    static constexpr std::size_t kMaxNodes = 64;

    explicit Dag(std::size_t num_nodes);

    std::size_t size() const { return parents_.size(); }

    bool has_edge(std::size_t from, std::size_t to) const;
    std::uint64_t parent_mask(std::size_t node) const { return parents_.at(node); }
    std::vector<std::size_t> parents(std::size_t node) const;
    std::vector<std::size_t> children(std::size_t node) const;
    std::size_t num_parents(std::size_t node) const;
    std::size_t num_edges() const;

    /// True when a directed path from -> ... -> to exists (length >= 1).
    bool has_path(std::size_t from, std::size_t to) const;
    bool is_acyclic() const;
    std::vector<std::size_t> topological_order() const;

    /// Throws std::invalid_argument if the edge exists or would close a cycle.
    void add_edge(std::size_t from, std::size_t to);
    void remove_edge(std::size_t from, std::size_t to);

    /// (parent, child) pairs in lexicographic order.
    std::vector<std::pair<std::size_t, std::size_t>> edges() const;
    /// Row-major adjacency bits; used as a deterministic tie-breaker.
    std::string encoding() const;

    bool operator==(const Dag&) const = default;

private:
    std::vector<std::uint64_t> parents_;
};

enum class MoveKind : std::uint8_t { add, remove, reverse };

/// Edge operation on (from -> to). For reverse, the existing edge is
/// from -> to and becomes to -> from.
struct Move {
    MoveKind kind = MoveKind::add;
    std::size_t from = 0;
    std::size_t to = 0;

    bool operator==(const Move&) const = default;
};

/// All moves that keep the graph acyclic and within `max_parents`, in
/// lexicographic (from, to, kind) order.
std::vector<Move> legal_moves(const Dag& dag, std::size_t max_parents);

/// Throws std::invalid_argument if the move is not applicable.
void apply_move(Dag& dag, const Move& move);

/// Decomposable BIC of a DAG (natural log). Higher is better.
double bic_score(const Dag& dag, const DataSet& data);

/// Precomputed BIC for every family with at most `max_parents` parents.
/// Built with the OpenMP family-score kernel.
class FamilyScoreTable {
public:
    FamilyScoreTable(const DataSet& data, std::size_t max_parents);

    std::size_t num_nodes() const { return table_.size(); }
    std::size_t max_parents() const { return max_parents_; }

    double family(std::size_t child, std::uint64_t parent_mask) const;
    double total(const Dag& dag) const;
    /// Score change from applying `move` to `dag`; only the touched families
    /// are looked up.
    double delta(const Dag& dag, const Move& move) const;

private:
    std::size_t max_parents_;
    std::vector<std::unordered_map<std::uint64_t, double>> table_;
};

struct LearnConfig {
    std::size_t max_parents = 3;
    double smoothing = 1.0;
    std::size_t restarts = 5;
    std::uint64_t seed = 0;

    /// Throws std::invalid_argument for max_parents = 0 or smoothing <= 0.
    void validate() const;

    bool operator==(const LearnConfig&) const = default;
};

struct SearchResult {
    Dag dag{0};
    double score = 0.0;
    /// Score after each accepted move, starting with the initial graph.
    std::vector<double> trajectory;
};

/// Greedy ascent: repeatedly applies the best-scoring legal move (earliest
/// in legal_moves order on ties) until nothing improves by more than 1e-9.
SearchResult hill_climb(const FamilyScoreTable& scores, Dag start);

/// Hill climbing from the empty graph, plus `restarts` climbs from seeded
/// random perturbations of that result. Restarts run in parallel; the winner
/// is the highest score, ties going to the smallest encoding().
SearchResult search_structure(const DataSet& data, const LearnConfig& config);

Dag learn_structure(const DataSet& data, const LearnConfig& config);

struct Cpt {
    std::vector<std::size_t> parents;
    std::vector<std::size_t> parent_cards;
    std::size_t cardinality = 0;
    /// [config * cardinality + state]; config is mixed-radix over `parents`
    /// with the last parent varying fastest.
    std::vector<double> probs;

    std::size_t num_configs() const;
    std::span<const double> row(std::size_t config) const;
    std::size_t config_of(std::span<const std::uint8_t> assignment) const;
    /// Parent states for a config index, in `parents` order.
    std::vector<std::uint8_t> config_states(std::size_t config) const;

    bool operator==(const Cpt&) const = default;
};

class BayesNet {
public:
    /// Validates CPT shapes against the DAG and domains and checks that every
    /// row is a distribution within 1e-9. Throws std::invalid_argument.
    BayesNet(std::vector<Variable> variables, std::size_t class_index, Dag dag, std::vector<Cpt> cpts);

    std::size_t num_vars() const { return variables_.size(); }
    std::size_t class_index() const { return class_index_; }
    const std::vector<Variable>& variables() const { return variables_; }
    const Dag& dag() const { return dag_; }
    const Cpt& cpt(std::size_t node) const { return cpts_.at(node); }
    const std::vector<Cpt>& cpts() const { return cpts_; }

    /// Sum of log CPT entries for a complete assignment; no domain checks.
    double log_joint(std::span<const std::uint8_t> assignment) const;

    bool operator==(const BayesNet& o) const {
        return variables_ == o.variables_ && class_index_ == o.class_index_ && dag_ == o.dag_ && cpts_ == o.cpts_;
    }

private:
    std::vector<Variable> variables_;
    std::size_t class_index_;
    Dag dag_;
    std::vector<Cpt> cpts_;
    std::vector<std::vector<double>> log_probs_;
};

/// Laplace-smoothed maximum likelihood: (count + alpha) / (total + alpha r).
BayesNet fit_cpts(const Dag& dag, const DataSet& data, double alpha);

/// Exact P(class | row). `row` spans every variable; the class entry is
/// ignored. Throws std::invalid_argument for out-of-domain values.
std::array<double, 2> class_posterior(const BayesNet& bn, std::span<const std::uint8_t> row);

/// Argmax of class_posterior, ties to class value 0.
std::uint8_t classify(const BayesNet& bn, std::span<const std::uint8_t> row);

/// Fraction of rows classified as their label (OpenMP over rows).
double accuracy(const BayesNet& bn, const DataSet& test);

/// Parents, children and the children's other parents, ascending.
std::vector<std::size_t> markov_blanket(const Dag& dag, std::size_t node);

namespace serial {
double accuracy(const BayesNet& bn, const DataSet& test);
}  // namespace serial

}  // namespace skt
