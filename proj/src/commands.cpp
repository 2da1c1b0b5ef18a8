#include "skt/commands.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "skt/io.hpp"

namespace fs = std::filesystem;

namespace skt {

namespace {

constexpr const char* kExpertLog = "expert.jsonl";
constexpr const char* kLearnerLog = "learner.jsonl";
constexpr const char* kDataset = "dataset.csv";
constexpr const char* kNetwork = "network.json";
constexpr const char* kIdentify = "identify.txt";
constexpr const char* kTraceCsv = "trace.csv";
constexpr const char* kTraceJson = "trace.json";
constexpr const char* kCurves = "curves.csv";
constexpr const char* kReport = "report.txt";

std::string fixed(double x, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, x);
    return buf;
}

template <class Range, class Name>
std::string join(const Range& items, Name name, std::string_view sep) {
    std::string out;
    for (const auto& x : items) {
        if (!out.empty()) out += sep;
        out += name(x);
    }
    return out;
}

fs::path prepare_run_dir(const ExperimentConfig& config) {
    const fs::path dir = run_directory(config);
    fs::create_directories(dir);
    return dir;
}

template <class Writer>
void write_with(const fs::path& path, Writer&& writer) {
    std::ostringstream ss;
    writer(ss);
    io::write_file(path, ss.str());
}

SessionLog read_log(const fs::path& path, PlayerId expected, const ExperimentConfig& config) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    SessionLog log;
    try {
        log = io::read_session_jsonl(in, 0, config.transfer.scenario.scenario_id);
    } catch (const DataError& e) {
        throw DataError(path.filename().string() + ": " + e.what());
    }
    if (log.records.empty()) throw DataError(path.filename().string() + ": no records");
    if (log.player != expected) {
        throw DataError(path.filename().string() + ": expected records of " + std::string(player_name(expected)));
    }
    const auto violations = validate_session(log);
    if (!violations.empty()) {
        throw DataError(path.filename().string() + ": tick " + std::to_string(violations.front().tick) + ": " +
                        violations.front().rule);
    }
    return log;
}

std::vector<SessionLog> sessions(const ExperimentConfig& config, const fs::path& dir, bool reuse) {
    const fs::path expert_path = dir / kExpertLog;
    const fs::path learner_path = dir / kLearnerLog;
    if (reuse && fs::exists(expert_path) && fs::exists(learner_path)) {
        return {read_log(expert_path, PlayerId::ID1, config), read_log(learner_path, PlayerId::ID2, config)};
    }
    const ProfilePair profiles = load_profiles(config);
    auto logs = simulate_pair(profiles.expert, profiles.learner, config.transfer.scenario, config.seed, 0);
    write_with(expert_path, [&](std::ostream& o) { io::write_session_jsonl(o, logs[0]); });
    write_with(learner_path, [&](std::ostream& o) { io::write_session_jsonl(o, logs[1]); });
    return logs;
}

DataSet dataset(const ExperimentConfig& config, const fs::path& dir, bool reuse) {
    const fs::path path = dir / kDataset;
    if (reuse && fs::exists(path)) {
        std::ifstream in(path, std::ios::binary);
        try {
            return io::read_dataset_csv(in);
        } catch (const DataError& e) {
            throw DataError(std::string(kDataset) + ": " + e.what());
        }
    }
    const auto logs = sessions(config, dir, true);
    DataSet data = to_dataset(logs, config.transfer.window);
    write_with(path, [&](std::ostream& o) { io::write_dataset_csv(o, data); });
    return data;
}

TransferTrace transfer_trace(const ExperimentConfig& config, const fs::path& dir, bool reuse) {
    const fs::path path = dir / kTraceJson;
    if (reuse && fs::exists(path)) {
        try {
            return io::trace_from_json(io::Json::parse(io::read_file(path)));
        } catch (const nlohmann::json::parse_error& e) {
            throw DataError(std::string(kTraceJson) + ": " + e.what());
        } catch (const DataError& e) {
            throw DataError(std::string(kTraceJson) + ": " + e.what());
        }
    }
    const ProfilePair profiles = load_profiles(config);
    TransferTrace trace = run_transfer(profiles.expert, profiles.learner, config.transfer, config.seed);
    write_with(dir / kTraceCsv, [&](std::ostream& o) { io::write_trace_csv(o, trace); });
    io::write_file(path, io::trace_to_json(trace).dump(2) + "\n");
    write_with(dir / kCurves, [&](std::ostream& o) { io::write_curves_csv(o, behavioral_curves(trace)); });
    return trace;
}

void validate_transfer_config(const ExperimentConfig& config) {
    try {
        config.transfer.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

}  // namespace

fs::path run_directory(const ExperimentConfig& config) {
    return fs::path(config.output_dir) / (config_hash(config) + "-s" + std::to_string(config.seed));
}

int cmd_simulate(const ExperimentConfig& config, std::ostream& out) {
    validate_transfer_config(config);
    const fs::path dir = prepare_run_dir(config);
    const auto logs = sessions(config, dir, false);
    out << "simulate run_dir=" << dir.string() << " seed=" << config.seed
        << " expert_records=" << logs[0].records.size() << " learner_records=" << logs[1].records.size() << '\n';
    return kExitOk;
}

int cmd_dataset(const ExperimentConfig& config, std::ostream& out) {
    validate_transfer_config(config);
    const fs::path dir = prepare_run_dir(config);
    const DataSet data = dataset(config, dir, false);
    out << "dataset run_dir=" << dir.string() << " rows=" << data.num_rows() << " rows_id1=" << data.count_class(0)
        << " rows_id2=" << data.count_class(1) << " window=" << config.transfer.window << '\n';
    return kExitOk;
}

int cmd_identify(const ExperimentConfig& config, std::ostream& out) {
    validate_transfer_config(config);
    const fs::path dir = prepare_run_dir(config);
    const DataSet data = dataset(config, dir, true);
    const Identification id = identify(data, config.transfer, config.seed, 0);
    io::write_file(dir / kNetwork, io::network_to_json(id.network).dump(2) + "\n");
    const std::string attrs =
        id.discriminative.empty() ? "none"
                                  : join(id.discriminative, [](Attribute a) { return std::string(attribute_name(a)); }, ";");
    const std::string line = "identify run_dir=" + dir.string() + " accuracy=" + io::format_double(id.accuracy) +
                             " train_rows=" + std::to_string(id.train_rows) + " test_rows=" +
                             std::to_string(id.test_rows) + " edges=" + std::to_string(id.network.dag().num_edges()) +
                             " attributes=" + attrs + "\n";
    io::write_file(dir / kIdentify, line);
    out << line;
    return kExitOk;
}

int cmd_transfer(const ExperimentConfig& config, std::ostream& out) {
    validate_transfer_config(config);
    const fs::path dir = prepare_run_dir(config);
    const TransferTrace trace = transfer_trace(config, dir, false);
    const auto& first = trace.iterations.front();
    const auto& last = trace.iterations.back();
    out << "transfer run_dir=" << dir.string() << " iterations=" << trace.iterations.size()
        << " terminal_reason=" << terminal_reason_name(trace.terminal_reason)
        << " final_accuracy=" << io::format_double(last.accuracy)
        << " initial_divergence=" << io::format_double(first.divergence)
        << " final_divergence=" << io::format_double(last.divergence) << '\n';
    return trace.terminal_reason == TerminalReason::max_iterations ? kExitNonTermination : kExitOk;
}

int cmd_report(const ExperimentConfig& config, std::ostream& out) {
    validate_transfer_config(config);
    const fs::path dir = prepare_run_dir(config);
    const TransferTrace trace = transfer_trace(config, dir, true);
    const std::string report = render_report(trace);
    io::write_file(dir / kReport, report);
    out << report;
    out << "report run_dir=" << dir.string() << " iterations=" << trace.iterations.size()
        << " terminal_reason=" << terminal_reason_name(trace.terminal_reason) << '\n';
    return kExitOk;
}

std::string render_report(const TransferTrace& trace) {
    std::ostringstream r;
    const auto& last = trace.iterations.back();
    r << "Skill transfer report\n";
    r << "seed: " << trace.seed << "\n";
    r << "outcome: " << terminal_reason_name(trace.terminal_reason) << " after " << trace.iterations.size()
      << (trace.iterations.size() == 1 ? " iteration" : " iterations") << "\n";
    r << "final accuracy: " << fixed(last.accuracy) << "  final divergence: " << fixed(last.divergence, 6) << "\n\n";

    char buf[256];
    std::snprintf(buf, sizeof buf, "%-10s %-9s %-11s %s\n", "iteration", "accuracy", "divergence", "targeted");
    r << buf;
    for (const auto& rec : trace.iterations) {
        const std::string targeted =
            rec.targeted.empty() ? "-" : join(rec.targeted, [](Attribute a) { return std::string(attribute_name(a)); }, ", ");
        std::snprintf(buf, sizeof buf, "%-10zu %-9s %-11s %s\n", rec.iteration, fixed(rec.accuracy).c_str(),
                      fixed(rec.divergence, 6).c_str(), targeted.c_str());
        r << buf;
    }

    // Curves: how far the learner's reference-behavior probability has moved
    // toward the expert's on each key.
    const CurveTable curves = behavioral_curves(trace);
    r << "\nP(reference behavior | key), expert vs learner at first and last iteration\n";
    std::snprintf(buf, sizeof buf, "%-21s %-11s %-7s %-7s %s\n", "key", "behavior", "expert", "first", "last");
    r << buf;
    const auto& expert_row = curves.rows.front();
    const auto& first_row = curves.rows[1];
    const auto& last_row = curves.rows.back();
    for (std::size_t k = 0; k < kNumConditionKeys; ++k) {
        std::snprintf(buf, sizeof buf, "%-21s %-11s %-7s %-7s %s\n",
                      std::string(condition_key_name(kAllConditionKeys[k])).c_str(),
                      std::string(attribute_name(curves.reference[k])).c_str(), fixed(expert_row.values[k]).c_str(),
                      fixed(first_row.values[k]).c_str(), fixed(last_row.values[k]).c_str());
        r << buf;
    }
    return r.str();
}

int run_command(std::string_view name, const ExperimentConfig& config, std::ostream& out) {
    if (name == "simulate") return cmd_simulate(config, out);
    if (name == "dataset") return cmd_dataset(config, out);
    if (name == "identify") return cmd_identify(config, out);
    if (name == "transfer") return cmd_transfer(config, out);
    if (name == "report") return cmd_report(config, out);
    throw std::invalid_argument("unknown command: " + std::string(name));
}

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Simulated skill transfer between two game players", "skt"};
    app.fallthrough();
    std::string config_path;
    std::uint64_t seed = 0;
    std::string out_dir;
    bool quiet = false;
    app.add_option("--config", config_path, "Experiment configuration (JSON)")->required();
    auto* seed_opt = app.add_option("--seed", seed, "Master seed, overriding the config");
    auto* out_opt = app.add_option("--out", out_dir, "Output directory, overriding the config");
    app.add_flag("--quiet", quiet, "Suppress summary lines on standard output");
    app.require_subcommand(1);
    app.add_subcommand("simulate", "Write expert and learner session logs (JSONL)");
    app.add_subcommand("dataset", "Window session logs into a behavior dataset (CSV)");
    app.add_subcommand("identify", "Learn the player-identification network (JSON) and report accuracy");
    app.add_subcommand("transfer", "Run the transfer loop; write trace and curve tables");
    app.add_subcommand("report", "Summarize a transfer trace in plain text");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error[usage]: " << e.what() << '\n';
        return kExitConfig;
    }

    std::ostringstream discard;
    std::ostream& sink = quiet ? discard : out;
    try {
        ExperimentConfig config = load_config(config_path);
        if (*seed_opt) config.seed = seed;
        if (*out_opt) config.output_dir = out_dir;
        return run_command(app.get_subcommands().front()->get_name(), config, sink);
    } catch (const ConfigValidationError& e) {
        for (const auto& v : e.violations()) err << "error[config]: " << v << '\n';
        return kExitConfig;
    } catch (const ConfigError& e) {
        err << "error[config]: " << e.what() << '\n';
        return kExitConfig;
    } catch (const DataError& e) {
        err << "error[data]: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        err << "error[internal]: " << e.what() << '\n';
        return kExitInternal;
    }
}

}  // namespace skt
