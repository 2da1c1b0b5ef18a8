#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "skt/bayes.hpp"
#include "skt/behavior_data.hpp"
#include "skt/game_domain.hpp"
#include "skt/transfer_loop.hpp"

// Readers throw DataError with the offending line or JSON path in the
// message. Writers are deterministic: identical values give identical bytes.
namespace skt::io {

using Json = nlohmann::ordered_json;

/// Shortest decimal form that parses back to the same double.
std::string format_double(double x);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& contents);

// Session logs: one JSON object per line,
//   {"tick":0,"player":"ID1","context":{...7 booleans...},"behavior":"fighting"}
void write_session_jsonl(std::ostream& out, const SessionLog& log);
/// The log's player is taken from the records (ID1 for an empty file).
SessionLog read_session_jsonl(std::istream& in, std::uint64_t seed = 0, std::string scenario_id = {});

// Behavior datasets: header of the ten attribute names in index order then
// "ID"; cells hold state names.
void write_dataset_csv(std::ostream& out, const DataSet& data);
DataSet read_dataset_csv(std::istream& in);

Json scenario_to_json(const Scenario& scenario);
Scenario scenario_from_json(const Json& j);

Json profile_to_json(const PlayerProfile& profile);
/// Parses and validates; every key and behavior must be present.
PlayerProfile profile_from_json(const Json& j);

Json network_to_json(const BayesNet& bn);
BayesNet network_from_json(const Json& j);

void write_trace_csv(std::ostream& out, const TransferTrace& trace);
Json trace_to_json(const TransferTrace& trace);
TransferTrace trace_from_json(const Json& j);

/// Condition keys as rows; one column per (player, iteration).
void write_curves_csv(std::ostream& out, const CurveTable& curves);

}  // namespace skt::io
