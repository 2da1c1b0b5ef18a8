#include "skt/io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "skt/errors.hpp"

namespace skt::io {

namespace {

std::vector<std::string> split_csv_line(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

// Typed accessors that turn nlohmann type errors into DataError with a path.
const Json& member(const Json& j, const std::string& key, const std::string& path) {
    if (!j.is_object()) throw DataError(path + ": expected an object");
    const auto it = j.find(key);
    if (it == j.end()) throw DataError(path + "." + key + ": missing");
    return *it;
}

double as_double(const Json& j, const std::string& path) {
    if (!j.is_number()) throw DataError(path + ": expected a number");
    return j.get<double>();
}

std::string as_string(const Json& j, const std::string& path) {
    if (!j.is_string()) throw DataError(path + ": expected a string");
    return j.get<std::string>();
}

std::uint64_t as_uint(const Json& j, const std::string& path) {
    if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0)) {
        throw DataError(path + ": expected a non-negative integer");
    }
    return j.get<std::uint64_t>();
}

void reject_unknown(const Json& j, std::initializer_list<std::string_view> known, const std::string& path) {
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (auto k : known) ok = ok || key == k;
        if (!ok) throw DataError(path + "." + key + ": unknown field");
    }
}

Attribute parse_attribute(const Json& j, const std::string& path) {
    const auto name = as_string(j, path);
    const auto a = attribute_from_name(name);
    if (!a) throw DataError(path + ": unknown attribute '" + name + "'");
    return *a;
}

ConditionKey parse_key(const std::string& name, const std::string& path) {
    const auto k = condition_key_from_name(name);
    if (!k) throw DataError(path + ": unknown condition key '" + name + "'");
    return *k;
}

}  // namespace

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << contents;
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

// --- session logs ----------------------------------------------------------

void write_session_jsonl(std::ostream& out, const SessionLog& log) {
    for (const auto& rec : log.records) {
        Json ctx = Json::object();
        for (Stimulus s : kAllStimuli) ctx[std::string(stimulus_name(s))] = rec.context[s];
        Json line = Json::object();
        line["tick"] = rec.tick;
        line["player"] = player_name(rec.player);
        line["context"] = std::move(ctx);
        line["behavior"] = attribute_name(rec.behavior);
        out << line.dump() << '\n';
    }
}

SessionLog read_session_jsonl(std::istream& in, std::uint64_t seed, std::string scenario_id) {
    SessionLog log;
    log.seed = seed;
    log.scenario_id = std::move(scenario_id);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const std::string path = "line " + std::to_string(line_no);
        Json j;
        try {
            j = Json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw DataError(path + ": " + e.what());
        }
        reject_unknown(j, {"tick", "player", "context", "behavior"}, path);
        BehaviorRecord rec;
        rec.tick = as_uint(member(j, "tick", path), path + ".tick");
        const auto player = as_string(member(j, "player", path), path + ".player");
        const auto pid = player_from_name(player);
        if (!pid) throw DataError(path + ".player: unknown player '" + player + "'");
        rec.player = *pid;
        const Json& ctx = member(j, "context", path);
        std::vector<std::string_view> names;
        for (Stimulus s : kAllStimuli) {
            const std::string name(stimulus_name(s));
            const Json& v = member(ctx, name, path + ".context");
            if (!v.is_boolean()) throw DataError(path + ".context." + name + ": expected a boolean");
            rec.context[s] = v.get<bool>();
        }
        for (const auto& [key, value] : ctx.items()) {
            if (!stimulus_from_name(key)) throw DataError(path + ".context." + key + ": unknown field");
        }
        rec.behavior = parse_attribute(member(j, "behavior", path), path + ".behavior");
        if (log.records.empty()) log.player = rec.player;
        log.records.push_back(rec);
    }
    return log;
}

// --- datasets --------------------------------------------------------------

void write_dataset_csv(std::ostream& out, const DataSet& data) {
    const auto& vars = data.variables();
    for (std::size_t v = 0; v < vars.size(); ++v) out << (v ? "," : "") << vars[v].name;
    out << '\n';
    for (std::size_t r = 0; r < data.num_rows(); ++r) {
        for (std::size_t v = 0; v < vars.size(); ++v) out << (v ? "," : "") << vars[v].states[data.at(r, v)];
        out << '\n';
    }
}

DataSet read_dataset_csv(std::istream& in) {
    DataSet data = empty_behavior_dataset();
    const auto& vars = data.variables();
    std::string line;
    if (!std::getline(in, line)) throw DataError("dataset: missing header row");
    const auto header = split_csv_line(line);
    if (header.size() != vars.size()) throw DataError("dataset: header has " + std::to_string(header.size()) + " columns");
    for (std::size_t v = 0; v < vars.size(); ++v) {
        if (header[v] != vars[v].name) {
            throw DataError("dataset: column " + std::to_string(v + 1) + " must be '" + vars[v].name + "'");
        }
    }
    std::size_t line_no = 1;
    std::vector<std::uint8_t> row(vars.size());
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != vars.size()) throw DataError("dataset line " + std::to_string(line_no) + ": wrong column count");
        for (std::size_t v = 0; v < vars.size(); ++v) {
            const auto idx = vars[v].state_index(cells[v]);
            if (!idx) {
                throw DataError("dataset line " + std::to_string(line_no) + ": '" + cells[v] + "' is not a value of " +
                                vars[v].name);
            }
            row[v] = *idx;
        }
        data.add_row(row);
    }
    return data;
}

// --- scenario and profiles -------------------------------------------------

Json scenario_to_json(const Scenario& scenario) {
    Json probs = Json::object();
    for (Stimulus s : kAllStimuli) probs[std::string(stimulus_name(s))] = scenario[s];
    Json j = Json::object();
    j["scenario_id"] = scenario.scenario_id;
    j["ticks_per_session"] = scenario.ticks_per_session;
    j["probabilities"] = std::move(probs);
    return j;
}

Scenario scenario_from_json(const Json& j) {
    const std::string path = "scenario";
    reject_unknown(j, {"scenario_id", "ticks_per_session", "probabilities"}, path);
    Scenario s;
    s.scenario_id = as_string(member(j, "scenario_id", path), path + ".scenario_id");
    s.ticks_per_session = as_uint(member(j, "ticks_per_session", path), path + ".ticks_per_session");
    const Json& probs = member(j, "probabilities", path);
    for (Stimulus st : kAllStimuli) {
        const std::string name(stimulus_name(st));
        s[st] = as_double(member(probs, name, path + ".probabilities"), path + ".probabilities." + name);
    }
    for (const auto& [key, value] : probs.items()) {
        if (!stimulus_from_name(key)) throw DataError(path + ".probabilities." + key + ": unknown field");
    }
    try {
        s.validate();
    } catch (const std::invalid_argument& e) {
        throw DataError(path + ": " + e.what());
    }
    return s;
}

Json profile_to_json(const PlayerProfile& profile) {
    Json dists = Json::object();
    for (ConditionKey k : kAllConditionKeys) {
        Json d = Json::object();
        for (Attribute a : kAllAttributes) d[std::string(attribute_name(a))] = profile[k][slot(a)];
        dists[std::string(condition_key_name(k))] = std::move(d);
    }
    Json j = Json::object();
    j["profile_id"] = profile.profile_id;
    j["distributions"] = std::move(dists);
    return j;
}

PlayerProfile profile_from_json(const Json& j) {
    const std::string path = "profile";
    reject_unknown(j, {"profile_id", "distributions"}, path);
    PlayerProfile p;
    p.profile_id = as_string(member(j, "profile_id", path), path + ".profile_id");
    const Json& dists = member(j, "distributions", path);
    for (const auto& [key, value] : dists.items()) parse_key(key, path + ".distributions." + key);
    for (ConditionKey k : kAllConditionKeys) {
        const std::string kname(condition_key_name(k));
        const std::string kpath = path + ".distributions." + kname;
        const Json& d = member(dists, kname, path + ".distributions");
        for (const auto& [key, value] : d.items()) {
            if (!attribute_from_name(key)) throw DataError(kpath + "." + key + ": unknown attribute");
        }
        for (Attribute a : kAllAttributes) {
            const std::string aname(attribute_name(a));
            p[k][slot(a)] = as_double(member(d, aname, kpath), kpath + "." + aname);
        }
    }
    const auto problems = validate_profile(p);
    if (!problems.empty()) throw DataError(problems.front());
    return p;
}

// --- networks --------------------------------------------------------------

Json network_to_json(const BayesNet& bn) {
    const auto& vars = bn.variables();
    Json j = Json::object();
    j["class"] = vars[bn.class_index()].name;
    Json jvars = Json::array();
    for (const auto& v : vars) jvars.push_back(Json{{"name", v.name}, {"states", v.states}});
    j["variables"] = std::move(jvars);
    Json edges = Json::array();
    for (const auto& [u, v] : bn.dag().edges()) edges.push_back(Json::array({vars[u].name, vars[v].name}));
    j["edges"] = std::move(edges);
    Json cpts = Json::array();
    for (std::size_t v = 0; v < vars.size(); ++v) {
        const Cpt& cpt = bn.cpt(v);
        Json parents = Json::array();
        for (std::size_t p : cpt.parents) parents.push_back(vars[p].name);
        Json rows = Json::array();
        for (std::size_t c = 0; c < cpt.num_configs(); ++c) {
            Json given = Json::array();
            const auto states = cpt.config_states(c);
            for (std::size_t i = 0; i < states.size(); ++i) given.push_back(vars[cpt.parents[i]].states[states[i]]);
            Json probs = Json::array();
            for (double p : cpt.row(c)) probs.push_back(p);
            rows.push_back(Json{{"given", std::move(given)}, {"probabilities", std::move(probs)}});
        }
        cpts.push_back(Json{{"node", vars[v].name}, {"parents", std::move(parents)}, {"rows", std::move(rows)}});
    }
    j["cpts"] = std::move(cpts);
    return j;
}

BayesNet network_from_json(const Json& j) {
    const std::string path = "network";
    reject_unknown(j, {"class", "variables", "edges", "cpts"}, path);
    std::vector<Variable> vars;
    const Json& jvars = member(j, "variables", path);
    if (!jvars.is_array()) throw DataError(path + ".variables: expected an array");
    for (std::size_t i = 0; i < jvars.size(); ++i) {
        const std::string vpath = path + ".variables[" + std::to_string(i) + "]";
        Variable v;
        v.name = as_string(member(jvars[i], "name", vpath), vpath + ".name");
        const Json& states = member(jvars[i], "states", vpath);
        if (!states.is_array()) throw DataError(vpath + ".states: expected an array");
        for (const auto& s : states) v.states.push_back(as_string(s, vpath + ".states"));
        vars.push_back(std::move(v));
    }
    auto index_of = [&](const std::string& name, const std::string& where) {
        for (std::size_t i = 0; i < vars.size(); ++i) {
            if (vars[i].name == name) return i;
        }
        throw DataError(where + ": unknown variable '" + name + "'");
    };
    const std::size_t class_index = index_of(as_string(member(j, "class", path), path + ".class"), path + ".class");

    Dag dag(vars.size());
    const Json& edges = member(j, "edges", path);
    if (!edges.is_array()) throw DataError(path + ".edges: expected an array");
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const std::string epath = path + ".edges[" + std::to_string(i) + "]";
        if (!edges[i].is_array() || edges[i].size() != 2) throw DataError(epath + ": expected [parent, child]");
        try {
            dag.add_edge(index_of(as_string(edges[i][0], epath), epath), index_of(as_string(edges[i][1], epath), epath));
        } catch (const std::invalid_argument& e) {
            throw DataError(epath + ": " + e.what());
        }
    }

    std::vector<Cpt> cpts(vars.size());
    std::vector<bool> seen(vars.size(), false);
    const Json& jcpts = member(j, "cpts", path);
    if (!jcpts.is_array()) throw DataError(path + ".cpts: expected an array");
    for (std::size_t i = 0; i < jcpts.size(); ++i) {
        const std::string cpath = path + ".cpts[" + std::to_string(i) + "]";
        const std::size_t node = index_of(as_string(member(jcpts[i], "node", cpath), cpath + ".node"), cpath + ".node");
        if (seen[node]) throw DataError(cpath + ": duplicate CPT for '" + vars[node].name + "'");
        seen[node] = true;
        Cpt& cpt = cpts[node];
        for (const auto& p : member(jcpts[i], "parents", cpath)) {
            const std::size_t pi = index_of(as_string(p, cpath + ".parents"), cpath + ".parents");
            cpt.parents.push_back(pi);
            cpt.parent_cards.push_back(vars[pi].cardinality());
        }
        cpt.cardinality = vars[node].cardinality();
        cpt.probs.assign(cpt.num_configs() * cpt.cardinality, -1.0);
        const Json& rows = member(jcpts[i], "rows", cpath);
        if (!rows.is_array() || rows.size() != cpt.num_configs()) {
            throw DataError(cpath + ".rows: expected " + std::to_string(cpt.num_configs()) + " rows");
        }
        for (std::size_t r = 0; r < rows.size(); ++r) {
            const std::string rpath = cpath + ".rows[" + std::to_string(r) + "]";
            const Json& given = member(rows[r], "given", rpath);
            if (!given.is_array() || given.size() != cpt.parents.size()) throw DataError(rpath + ".given: wrong length");
            std::size_t config = 0;
            for (std::size_t g = 0; g < given.size(); ++g) {
                const auto& pv = vars[cpt.parents[g]];
                const auto idx = pv.state_index(as_string(given[g], rpath + ".given"));
                if (!idx) throw DataError(rpath + ".given: bad state for '" + pv.name + "'");
                config = config * pv.cardinality() + *idx;
            }
            const Json& probs = member(rows[r], "probabilities", rpath);
            if (!probs.is_array() || probs.size() != cpt.cardinality) throw DataError(rpath + ".probabilities: wrong length");
            if (cpt.probs[config * cpt.cardinality] >= 0.0) throw DataError(rpath + ": duplicate parent assignment");
            for (std::size_t k = 0; k < cpt.cardinality; ++k) {
                cpt.probs[config * cpt.cardinality + k] = as_double(probs[k], rpath + ".probabilities");
            }
        }
    }
    for (std::size_t v = 0; v < vars.size(); ++v) {
        if (!seen[v]) throw DataError(path + ".cpts: missing CPT for '" + vars[v].name + "'");
    }
    try {
        return BayesNet(std::move(vars), class_index, std::move(dag), std::move(cpts));
    } catch (const std::invalid_argument& e) {
        throw DataError(path + ": " + e.what());
    }
}

// --- traces and curves -----------------------------------------------------

void write_trace_csv(std::ostream& out, const TransferTrace& trace) {
    out << "iteration,accuracy,divergence,targeted,terminal_reason\n";
    for (std::size_t i = 0; i < trace.iterations.size(); ++i) {
        const auto& rec = trace.iterations[i];
        std::string targeted;
        for (Attribute a : rec.targeted) {
            if (!targeted.empty()) targeted += ';';
            targeted += attribute_name(a);
        }
        out << rec.iteration << ',' << format_double(rec.accuracy) << ',' << format_double(rec.divergence) << ','
            << targeted << ',';
        if (i + 1 == trace.iterations.size()) out << terminal_reason_name(trace.terminal_reason);
        out << '\n';
    }
}

Json trace_to_json(const TransferTrace& trace) {
    Json j = Json::object();
    j["seed"] = trace.seed;
    j["terminal_reason"] = terminal_reason_name(trace.terminal_reason);
    j["expert"] = profile_to_json(trace.expert);
    Json its = Json::array();
    for (const auto& rec : trace.iterations) {
        Json r = Json::object();
        r["iteration"] = rec.iteration;
        r["accuracy"] = rec.accuracy;
        r["divergence"] = rec.divergence;
        Json targeted = Json::array();
        for (Attribute a : rec.targeted) targeted.push_back(attribute_name(a));
        r["targeted"] = std::move(targeted);
        Json nudged = Json::array();
        for (ConditionKey k : rec.nudged_keys) nudged.push_back(condition_key_name(k));
        r["nudged_keys"] = std::move(nudged);
        r["scenario"] = scenario_to_json(rec.scenario);
        r["learner"] = profile_to_json(rec.learner);
        its.push_back(std::move(r));
    }
    j["iterations"] = std::move(its);
    return j;
}

TransferTrace trace_from_json(const Json& j) {
    const std::string path = "trace";
    reject_unknown(j, {"seed", "terminal_reason", "expert", "iterations"}, path);
    TransferTrace trace;
    trace.seed = as_uint(member(j, "seed", path), path + ".seed");
    const auto reason = as_string(member(j, "terminal_reason", path), path + ".terminal_reason");
    const auto tr = terminal_reason_from_name(reason);
    if (!tr) throw DataError(path + ".terminal_reason: unknown value '" + reason + "'");
    trace.terminal_reason = *tr;
    trace.expert = profile_from_json(member(j, "expert", path));
    const Json& its = member(j, "iterations", path);
    if (!its.is_array()) throw DataError(path + ".iterations: expected an array");
    for (std::size_t i = 0; i < its.size(); ++i) {
        const std::string ipath = path + ".iterations[" + std::to_string(i) + "]";
        const Json& r = its[i];
        reject_unknown(r, {"iteration", "accuracy", "divergence", "targeted", "nudged_keys", "scenario", "learner"}, ipath);
        IterationRecord rec;
        rec.iteration = as_uint(member(r, "iteration", ipath), ipath + ".iteration");
        rec.accuracy = as_double(member(r, "accuracy", ipath), ipath + ".accuracy");
        rec.divergence = as_double(member(r, "divergence", ipath), ipath + ".divergence");
        for (const auto& a : member(r, "targeted", ipath)) rec.targeted.insert(parse_attribute(a, ipath + ".targeted"));
        for (const auto& k : member(r, "nudged_keys", ipath)) {
            rec.nudged_keys.insert(parse_key(as_string(k, ipath + ".nudged_keys"), ipath + ".nudged_keys"));
        }
        rec.scenario = scenario_from_json(member(r, "scenario", ipath));
        rec.learner = profile_from_json(member(r, "learner", ipath));
        trace.iterations.push_back(std::move(rec));
    }
    if (trace.iterations.empty()) throw DataError(path + ".iterations: a trace has at least one iteration");
    return trace;
}

void write_curves_csv(std::ostream& out, const CurveTable& curves) {
    out << "condition,reference_behavior";
    for (const auto& row : curves.rows) out << ',' << player_name(row.player) << '@' << row.iteration;
    out << '\n';
    for (std::size_t k = 0; k < kNumConditionKeys; ++k) {
        out << condition_key_name(kAllConditionKeys[k]) << ',' << attribute_name(curves.reference[k]);
        for (const auto& row : curves.rows) out << ',' << format_double(row.values[k]);
        out << '\n';
    }
}

}  // namespace skt::io
