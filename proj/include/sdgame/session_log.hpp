#pragma once

#include <cstdint>
#include <iosfwd>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "sdgame/game.hpp"
#include "sdgame/network.hpp"
#include "sdgame/policy.hpp"
#include "sdgame/round.hpp"

namespace sdgame {

inline constexpr int kLogSchemaVersion = 1;

// Treatment and protocol of one five-person group.
struct SessionConfig {
    std::string session_id = "session";
    Network network = Network::star(5);
    GameParams params;  // baseline parameters; the fine field is ignored
    Intervention intervention = Intervention::Fine;
    double fine = 15.0;  // charged to non-distancers in the fine part
    ProtocolParams protocol;

    GameParams params_for(Part part) const;
    void validate() const;
    bool operator==(const SessionConfig&) const = default;
};

nlohmann::json config_to_json(const SessionConfig& c);
// Missing keys take the defaults above. Throws std::invalid_argument.
SessionConfig config_from_json(const nlohmann::json& j);

struct RosterEntry {
    std::size_t participant = 0;
    bool bot = false;
    std::string name;
    AgentPolicy policy;  // meaningful for bots
};

struct Payment {
    std::size_t participant = 0;
    bool disqualified = false;
    std::vector<int> drawn_rounds[2];
    double drawn_points[2] = {0.0, 0.0};
    std::int64_t bonus_cents[2] = {0, 0};
    std::int64_t fee_cents = 0;
    std::int64_t total_cents = 0;

    nlohmann::json to_json() const;
    static Payment from_json(const nlohmann::json& j);
    bool operator==(const Payment& o) const;
};

// Thrown for unreadable or inconsistent logs; `line` is 1-based.
class LogError : public std::runtime_error {
public:
    LogError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

// Append-only ordered event record, one JSON object per line. The first
// record is the session header carrying the seed and configuration.
class SessionLog {
public:
    SessionLog() = default;
    SessionLog(const SessionConfig& config, std::uint64_t seed);

    void append(nlohmann::json record);
    const std::vector<nlohmann::json>& records() const { return records_; }
    bool empty() const { return records_.empty(); }

    const nlohmann::json& header() const;
    std::uint64_t seed() const;
    SessionConfig config() const;

    std::vector<RosterEntry> roster() const;
    std::vector<RoundOutcome> rounds() const;
    std::set<std::size_t> disqualified() const;
    std::vector<Payment> payments() const;
    bool finished() const;

    std::string to_jsonl() const;
    static std::string record_line(const nlohmann::json& record);
    // Throws LogError naming the first line that is not a JSON object or
    // (line 1) not a session header.
    static SessionLog from_jsonl(std::string_view text);
    static SessionLog read_file(const std::string& path);
    void write_file(const std::string& path) const;

private:
    std::vector<nlohmann::json> records_;
};

// Record constructors shared by the simulator and the server.
namespace records {
nlohmann::json join(const RosterEntry& entry);
nlohmann::json group_formed(std::size_t participants);
nlohmann::json part_start(Part part);
nlohmann::json intervention_start(Intervention kind);
nlohmann::json round_start(int round, Part part, const std::vector<NodeId>& positions);
nlohmann::json decision(int round, std::size_t participant, Decision d);
nlohmann::json round_outcome(const RoundOutcome& outcome);
nlohmann::json disqualified(int round, std::size_t participant);
nlohmann::json payment(const Payment& p);
nlohmann::json session_end(int rounds);
}  // namespace records

// One row per participant and round:
// session,network,alpha,intervention,participant,round,part,position,role,decision,timeout,infected,points
std::string decision_csv(const SessionLog& log, bool with_header = true);

// Writes via a temporary file and rename.
void write_file_atomic(const std::string& path, std::string_view content);

}  // namespace sdgame
