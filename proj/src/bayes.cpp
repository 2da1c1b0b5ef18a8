#include "skt/bayes.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "skt/kernels.hpp"
#include "skt/rng.hpp"

namespace skt {

namespace {

constexpr double kMinImprovement = 1e-9;

std::uint64_t bit(std::size_t i) { return std::uint64_t{1} << i; }

std::vector<std::size_t> mask_to_list(std::uint64_t mask) {
    std::vector<std::size_t> out;
    while (mask) {
        out.push_back(static_cast<std::size_t>(std::countr_zero(mask)));
        mask &= mask - 1;
    }
    return out;
}

void check_node(const Dag& dag, std::size_t node) {
    if (node >= dag.size()) throw std::invalid_argument("node index out of range");
}

}  // namespace

// --- Dag -------------------------------------------------------------------

Dag::Dag(std::size_t num_nodes) : parents_(num_nodes, 0) {
    if (num_nodes > kMaxNodes) throw std::invalid_argument("Dag supports at most 64 nodes");
}

bool Dag::has_edge(std::size_t from, std::size_t to) const {
    check_node(*this, from);
    check_node(*this, to);
    return (parents_[to] & bit(from)) != 0;
}

std::vector<std::size_t> Dag::parents(std::size_t node) const {
    check_node(*this, node);
    return mask_to_list(parents_[node]);
}

std::vector<std::size_t> Dag::children(std::size_t node) const {
    check_node(*this, node);
    std::vector<std::size_t> out;
    for (std::size_t c = 0; c < size(); ++c) {
        if (parents_[c] & bit(node)) out.push_back(c);
    }
    return out;
}

std::size_t Dag::num_parents(std::size_t node) const {
    check_node(*this, node);
    return static_cast<std::size_t>(std::popcount(parents_[node]));
}

std::size_t Dag::num_edges() const {
    std::size_t n = 0;
    for (auto m : parents_) n += static_cast<std::size_t>(std::popcount(m));
    return n;
}

bool Dag::has_path(std::size_t from, std::size_t to) const {
    check_node(*this, from);
    check_node(*this, to);
    auto children_mask = [&](std::size_t u) {
        std::uint64_t m = 0;
        for (std::size_t c = 0; c < size(); ++c) {
            if (parents_[c] & bit(u)) m |= bit(c);
        }
        return m;
    };
    std::uint64_t visited = 0;
    std::uint64_t frontier = children_mask(from);
    while (frontier) {
        const auto c = static_cast<std::size_t>(std::countr_zero(frontier));
        frontier &= frontier - 1;
        if (c == to) return true;
        if (visited & bit(c)) continue;
        visited |= bit(c);
        frontier |= children_mask(c) & ~visited;
    }
    return false;
}

std::vector<std::size_t> Dag::topological_order() const {
    std::vector<std::size_t> order;
    order.reserve(size());
    std::uint64_t placed = 0;
    while (order.size() < size()) {
        bool progressed = false;
        for (std::size_t v = 0; v < size(); ++v) {
            if (!(placed & bit(v)) && (parents_[v] & ~placed) == 0) {
                order.push_back(v);
                placed |= bit(v);
                progressed = true;
            }
        }
        if (!progressed) throw std::logic_error("graph contains a cycle");
    }
    return order;
}

bool Dag::is_acyclic() const {
    try {
        (void)topological_order();
        return true;
    } catch (const std::logic_error&) {
        return false;
    }
}

void Dag::add_edge(std::size_t from, std::size_t to) {
    check_node(*this, from);
    check_node(*this, to);
    if (from == to) throw std::invalid_argument("self loops are not allowed");
    if (has_edge(from, to)) throw std::invalid_argument("edge already present");
    if (has_path(to, from)) throw std::invalid_argument("edge would create a cycle");
    parents_[to] |= bit(from);
}

void Dag::remove_edge(std::size_t from, std::size_t to) {
    if (!has_edge(from, to)) throw std::invalid_argument("edge not present");
    parents_[to] &= ~bit(from);
}

std::vector<std::pair<std::size_t, std::size_t>> Dag::edges() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t u = 0; u < size(); ++u) {
        for (std::size_t v = 0; v < size(); ++v) {
            if (parents_[v] & bit(u)) out.emplace_back(u, v);
        }
    }
    return out;
}

std::string Dag::encoding() const {
    std::string s(size() * size(), '0');
    for (std::size_t u = 0; u < size(); ++u) {
        for (std::size_t v = 0; v < size(); ++v) {
            if (parents_[v] & bit(u)) s[u * size() + v] = '1';
        }
    }
    return s;
}

// --- moves -----------------------------------------------------------------

std::vector<Move> legal_moves(const Dag& dag, std::size_t max_parents) {
    std::vector<Move> moves;
    const std::size_t n = dag.size();
    for (std::size_t u = 0; u < n; ++u) {
        for (std::size_t v = 0; v < n; ++v) {
            if (u == v) continue;
            if (dag.has_edge(u, v)) {
                moves.push_back({MoveKind::remove, u, v});
                if (dag.num_parents(u) < max_parents) {
                    Dag tmp = dag;
                    tmp.remove_edge(u, v);
                    if (!tmp.has_path(u, v)) moves.push_back({MoveKind::reverse, u, v});
                }
            } else if (!dag.has_edge(v, u) && dag.num_parents(v) < max_parents && !dag.has_path(v, u)) {
                moves.push_back({MoveKind::add, u, v});
            }
        }
    }
    return moves;
}

void apply_move(Dag& dag, const Move& move) {
    switch (move.kind) {
        case MoveKind::add: dag.add_edge(move.from, move.to); break;
        case MoveKind::remove: dag.remove_edge(move.from, move.to); break;
        case MoveKind::reverse: {
            Dag tmp = dag;
            tmp.remove_edge(move.from, move.to);
            tmp.add_edge(move.to, move.from);
            dag = std::move(tmp);
            break;
        }
    }
}

// --- scoring ---------------------------------------------------------------

double bic_score(const Dag& dag, const DataSet& data) {
    if (data.num_rows() == 0) throw std::invalid_argument("bic_score needs a non-empty dataset");
    if (dag.size() != data.num_vars()) throw std::invalid_argument("DAG and dataset variable counts differ");
    double total = 0.0;
    for (std::size_t v = 0; v < dag.size(); ++v) total += kernels::family_bic(data, v, dag.parents(v));
    return total;
}

FamilyScoreTable::FamilyScoreTable(const DataSet& data, std::size_t max_parents)
    : max_parents_(max_parents), table_(data.num_vars()) {
    if (data.num_rows() == 0) throw std::invalid_argument("bic_score needs a non-empty dataset");
    const std::size_t n = data.num_vars();
    if (n > Dag::kMaxNodes) throw std::invalid_argument("too many variables");

    std::vector<kernels::Family> families;
    std::vector<std::uint64_t> masks;
    for (std::size_t child = 0; child < n; ++child) {
        std::vector<std::size_t> others;
        for (std::size_t v = 0; v < n; ++v) {
            if (v != child) others.push_back(v);
        }
        // Enumerate subsets of `others` with at most max_parents members.
        std::vector<std::size_t> current;
        auto recurse = [&](auto&& self, std::size_t start) -> void {
            std::uint64_t mask = 0;
            for (std::size_t p : current) mask |= bit(p);
            families.push_back({child, current});
            masks.push_back(mask);
            if (current.size() == max_parents_) return;
            for (std::size_t i = start; i < others.size(); ++i) {
                current.push_back(others[i]);
                self(self, i + 1);
                current.pop_back();
            }
        };
        recurse(recurse, 0);
    }
    const auto scores = kernels::family_scores(data, families);
    for (std::size_t i = 0; i < families.size(); ++i) table_[families[i].child].emplace(masks[i], scores[i]);
}

double FamilyScoreTable::family(std::size_t child, std::uint64_t parent_mask) const {
    const auto& m = table_.at(child);
    const auto it = m.find(parent_mask);
    if (it == m.end()) throw std::out_of_range("family exceeds the table's parent limit");
    return it->second;
}

double FamilyScoreTable::total(const Dag& dag) const {
    double s = 0.0;
    for (std::size_t v = 0; v < dag.size(); ++v) s += family(v, dag.parent_mask(v));
    return s;
}

double FamilyScoreTable::delta(const Dag& dag, const Move& move) const {
    const std::uint64_t pu = dag.parent_mask(move.from);
    const std::uint64_t pv = dag.parent_mask(move.to);
    switch (move.kind) {
        case MoveKind::add: return family(move.to, pv | bit(move.from)) - family(move.to, pv);
        case MoveKind::remove: return family(move.to, pv & ~bit(move.from)) - family(move.to, pv);
        case MoveKind::reverse:
            return family(move.to, pv & ~bit(move.from)) - family(move.to, pv) +
                   family(move.from, pu | bit(move.to)) - family(move.from, pu);
    }
    return 0.0;
}

// --- search ----------------------------------------------------------------

void LearnConfig::validate() const {
    if (max_parents < 1) throw std::invalid_argument("max_parents must be at least 1");
    if (!(smoothing > 0.0)) throw std::invalid_argument("smoothing must be positive");
}

SearchResult hill_climb(const FamilyScoreTable& scores, Dag start) {
    if (start.size() != scores.num_nodes()) throw std::invalid_argument("DAG size does not match score table");
    SearchResult result{std::move(start), 0.0, {}};
    result.score = scores.total(result.dag);
    result.trajectory.push_back(result.score);
    for (;;) {
        const auto moves = legal_moves(result.dag, scores.max_parents());
        const Move* best = nullptr;
        double best_delta = kMinImprovement;
        for (const auto& m : moves) {
            const double d = scores.delta(result.dag, m);
            if (d > best_delta) {
                best_delta = d;
                best = &m;
            }
        }
        if (!best) break;
        apply_move(result.dag, *best);
        if (!result.dag.is_acyclic()) throw std::logic_error("hill climbing produced a cycle");
        result.score = scores.total(result.dag);
        result.trajectory.push_back(result.score);
    }
    return result;
}

SearchResult search_structure(const DataSet& data, const LearnConfig& config) {
    config.validate();
    for (std::uint8_t c = 0; c < 2; ++c) {
        if (data.count_class(c) < 2) throw std::invalid_argument("structure learning needs at least 2 rows per class");
    }
    const FamilyScoreTable scores(data, config.max_parents);
    const std::size_t n = data.num_vars();

    SearchResult best = hill_climb(scores, Dag(n));

    std::vector<SearchResult> restarts(config.restarts);
    const auto r_count = static_cast<std::ptrdiff_t>(config.restarts);
    std::exception_ptr error;
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t r = 0; r < r_count; ++r) {
        try {
            Rng rng(derive_seed(config.seed, static_cast<std::uint64_t>(r) + 1, Stream::restart));
            Dag start = best.dag;
            for (std::size_t k = 0; k < std::max<std::size_t>(2, n); ++k) {
                const auto moves = legal_moves(start, config.max_parents);
                if (moves.empty()) break;
                apply_move(start, moves[rng.below(moves.size())]);
            }
            restarts[static_cast<std::size_t>(r)] = hill_climb(scores, std::move(start));
        } catch (...) {
#pragma omp critical(skt_search_error)
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);

    for (auto& candidate : restarts) {
        if (candidate.score > best.score ||
            (candidate.score == best.score && candidate.dag.encoding() < best.dag.encoding())) {
            best = std::move(candidate);
        }
    }
    return best;
}

Dag learn_structure(const DataSet& data, const LearnConfig& config) { return search_structure(data, config).dag; }

// --- parameters ------------------------------------------------------------

std::size_t Cpt::num_configs() const {
    std::size_t q = 1;
    for (std::size_t c : parent_cards) q *= c;
    return q;
}

std::span<const double> Cpt::row(std::size_t config) const {
    return std::span<const double>(probs).subspan(config * cardinality, cardinality);
}

std::size_t Cpt::config_of(std::span<const std::uint8_t> assignment) const {
    std::size_t config = 0;
    for (std::size_t i = 0; i < parents.size(); ++i) config = config * parent_cards[i] + assignment[parents[i]];
    return config;
}

std::vector<std::uint8_t> Cpt::config_states(std::size_t config) const {
    std::vector<std::uint8_t> states(parents.size());
    for (std::size_t i = parents.size(); i-- > 0;) {
        states[i] = static_cast<std::uint8_t>(config % parent_cards[i]);
        config /= parent_cards[i];
    }
    return states;
}

BayesNet::BayesNet(std::vector<Variable> variables, std::size_t class_index, Dag dag, std::vector<Cpt> cpts)
    : variables_(std::move(variables)), class_index_(class_index), dag_(std::move(dag)), cpts_(std::move(cpts)) {
    const std::size_t n = variables_.size();
    if (dag_.size() != n || cpts_.size() != n) throw std::invalid_argument("network size mismatch");
    if (class_index_ >= n || variables_[class_index_].cardinality() != 2) {
        throw std::invalid_argument("class variable must exist and be binary");
    }
    if (!dag_.is_acyclic()) throw std::invalid_argument("network graph has a cycle");
    log_probs_.resize(n);
    for (std::size_t v = 0; v < n; ++v) {
        const Cpt& cpt = cpts_[v];
        const std::string where = "CPT of '" + variables_[v].name + "'";
        if (cpt.parents != dag_.parents(v)) throw std::invalid_argument(where + ": parents disagree with the graph");
        if (cpt.cardinality != variables_[v].cardinality()) throw std::invalid_argument(where + ": wrong cardinality");
        if (cpt.parent_cards.size() != cpt.parents.size()) throw std::invalid_argument(where + ": parent domains missing");
        for (std::size_t i = 0; i < cpt.parents.size(); ++i) {
            if (cpt.parent_cards[i] != variables_[cpt.parents[i]].cardinality()) {
                throw std::invalid_argument(where + ": parent domain size mismatch");
            }
        }
        if (cpt.probs.size() != cpt.num_configs() * cpt.cardinality) throw std::invalid_argument(where + ": wrong row count");
        for (std::size_t j = 0; j < cpt.num_configs(); ++j) {
            double sum = 0.0;
            for (double p : cpt.row(j)) {
                if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument(where + ": probability outside [0, 1]");
                sum += p;
            }
            if (!(std::abs(sum - 1.0) <= 1e-9)) throw std::invalid_argument(where + ": row does not sum to 1");
        }
        log_probs_[v].resize(cpt.probs.size());
        std::transform(cpt.probs.begin(), cpt.probs.end(), log_probs_[v].begin(), [](double p) { return std::log(p); });
    }
}

double BayesNet::log_joint(std::span<const std::uint8_t> assignment) const {
    double total = 0.0;
    for (std::size_t v = 0; v < cpts_.size(); ++v) {
        const Cpt& cpt = cpts_[v];
        total += log_probs_[v][cpt.config_of(assignment) * cpt.cardinality + assignment[v]];
    }
    return total;
}

BayesNet fit_cpts(const Dag& dag, const DataSet& data, double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("smoothing alpha must be positive");
    if (dag.size() != data.num_vars()) throw std::invalid_argument("DAG and dataset variable counts differ");
    std::vector<Cpt> cpts(dag.size());
    for (std::size_t v = 0; v < dag.size(); ++v) {
        Cpt& cpt = cpts[v];
        cpt.parents = dag.parents(v);
        for (std::size_t p : cpt.parents) cpt.parent_cards.push_back(data.variable(p).cardinality());
        cpt.cardinality = data.variable(v).cardinality();
        const auto counts = kernels::family_counts(data, v, cpt.parents);
        cpt.probs.resize(counts.size());
        const auto r = static_cast<double>(cpt.cardinality);
        for (std::size_t j = 0; j < cpt.num_configs(); ++j) {
            double total = 0.0;
            for (std::size_t k = 0; k < cpt.cardinality; ++k) total += counts[j * cpt.cardinality + k];
            for (std::size_t k = 0; k < cpt.cardinality; ++k) {
                cpt.probs[j * cpt.cardinality + k] = (counts[j * cpt.cardinality + k] + alpha) / (total + alpha * r);
            }
        }
    }
    return BayesNet(data.variables(), data.class_index(), dag, std::move(cpts));
}

// --- inference -------------------------------------------------------------

namespace {

std::array<double, 2> posterior_unchecked(const BayesNet& bn, std::vector<std::uint8_t>& assignment) {
    assignment[bn.class_index()] = 0;
    const double l0 = bn.log_joint(assignment);
    assignment[bn.class_index()] = 1;
    const double l1 = bn.log_joint(assignment);
    const double m = std::max(l0, l1);
    const double e0 = std::exp(l0 - m);
    const double e1 = std::exp(l1 - m);
    return {e0 / (e0 + e1), e1 / (e0 + e1)};
}

void check_test_set(const BayesNet& bn, const DataSet& test) {
    if (test.num_rows() == 0) throw std::invalid_argument("accuracy needs a non-empty test set");
    if (test.variables() != bn.variables() || test.class_index() != bn.class_index()) {
        throw std::invalid_argument("test set schema differs from the network");
    }
}

}  // namespace

std::array<double, 2> class_posterior(const BayesNet& bn, std::span<const std::uint8_t> row) {
    if (row.size() != bn.num_vars()) throw std::invalid_argument("row width does not match the network");
    for (std::size_t v = 0; v < row.size(); ++v) {
        if (v != bn.class_index() && row[v] >= bn.variables()[v].cardinality()) {
            throw std::invalid_argument("value out of domain for '" + bn.variables()[v].name + "'");
        }
    }
    std::vector<std::uint8_t> assignment(row.begin(), row.end());
    return posterior_unchecked(bn, assignment);
}

std::uint8_t classify(const BayesNet& bn, std::span<const std::uint8_t> row) {
    const auto post = class_posterior(bn, row);
    return post[0] >= post[1] ? 0 : 1;
}

namespace serial {

double accuracy(const BayesNet& bn, const DataSet& test) {
    check_test_set(bn, test);
    std::size_t correct = 0;
    for (std::size_t r = 0; r < test.num_rows(); ++r) {
        auto row = test.row(r);
        const auto post = posterior_unchecked(bn, row);
        const std::uint8_t predicted = post[0] >= post[1] ? 0 : 1;
        if (predicted == test.label(r)) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(test.num_rows());
}

}  // namespace serial

double accuracy(const BayesNet& bn, const DataSet& test) {
    check_test_set(bn, test);
    const auto n = static_cast<std::ptrdiff_t>(test.num_rows());
    std::size_t correct = 0;
#pragma omp parallel for reduction(+ : correct) schedule(static) if (n > 4096)
    for (std::ptrdiff_t r = 0; r < n; ++r) {
        auto row = test.row(static_cast<std::size_t>(r));
        const auto post = posterior_unchecked(bn, row);
        const std::uint8_t predicted = post[0] >= post[1] ? 0 : 1;
        if (predicted == test.label(static_cast<std::size_t>(r))) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(test.num_rows());
}

std::vector<std::size_t> markov_blanket(const Dag& dag, std::size_t node) {
    if (node >= dag.size()) throw std::invalid_argument("unknown node");
    std::uint64_t mask = dag.parent_mask(node);
    for (std::size_t c : dag.children(node)) {
        mask |= bit(c);
        mask |= dag.parent_mask(c);
    }
    mask &= ~bit(node);
    return mask_to_list(mask);
}

}  // namespace skt
