#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sdgame/policy.hpp"
#include "sdgame/rng.hpp"
#include "sdgame/round.hpp"
#include "sdgame/session_log.hpp"

namespace sdgame {

// Stream tags for mix_seed(): nature draws (positions, contagion), payment
// draws, and one stream per bot.
inline constexpr std::uint64_t kNatureStream = 0;
inline constexpr std::uint64_t kPaymentStream = 0xFEE;
inline constexpr std::uint64_t bot_stream(std::size_t participant) { return 1 + participant; }

struct RoundResolution {
    RoundOutcome outcome;
    std::vector<std::size_t> newly_disqualified;
};

// The protocol core shared by the simulator, the live server and replay:
// 40 rounds of position reshuffles and contagion draws from the nature
// stream, timeout streaks and disqualification. It never sees policies;
// callers supply one decision per participant.
class GroupSession {
public:
    GroupSession(SessionConfig config, std::uint64_t seed);

    const SessionConfig& config() const { return config_; }
    std::size_t participants() const { return config_.network.node_count(); }
    int round() const { return round_; }  // last started round, 0 before the first
    Part part() const { return config_.protocol.part_of(std::max(round_, 1)); }
    bool round_open() const { return round_open_; }
    bool finished() const { return round_ == config_.protocol.total_rounds() && !round_open_; }

    const std::vector<NodeId>& begin_round();
    const std::vector<NodeId>& positions() const { return positions_; }
    RoundResolution resolve_round(const std::vector<Decision>& decisions);

    const std::vector<HistoryEntry>& history(std::size_t participant) const { return history_.at(participant); }
    int timeout_streak(std::size_t participant) const { return streak_.at(participant); }
    bool disqualified(std::size_t participant) const { return disqualified_.at(participant); }
    const std::vector<RoundOutcome>& outcomes() const { return outcomes_; }

    // What participant k observes at the start of the current round.
    Observation observation(std::size_t participant) const;

    bool operator==(const GroupSession&) const = default;

private:
    SessionConfig config_;
    Rng nature_;
    int round_ = 0;
    bool round_open_ = false;
    std::vector<NodeId> positions_;
    std::vector<int> streak_;
    std::vector<bool> disqualified_;
    std::vector<std::vector<HistoryEntry>> history_;  // last history_length rounds
    std::vector<RoundOutcome> outcomes_;
};

// Cents for one part: points converted at `points_per_dollar`, rounded
// half away from zero, never negative.
std::int64_t part_bonus_cents(double points, double points_per_dollar);

// Draws `paid_rounds_per_part` rounds per part without replacement for each
// participant (participant order, baseline then intervention) and converts
// them. Disqualified participants receive 0 in total. Throws
// std::invalid_argument if the log does not hold every round.
std::vector<Payment> compute_payment(const SessionLog& log, Rng& rng, double points_per_dollar,
                                     std::int64_t fee_cents);
std::vector<Payment> compute_payment(const std::vector<RoundOutcome>& rounds, const std::set<std::size_t>& disqualified,
                                     std::size_t participants, const ProtocolParams& protocol, Rng& rng,
                                     double points_per_dollar, std::int64_t fee_cents);

// 40 simulated rounds of bots; deterministic in (config, policies, seed).
SessionLog run_session_sim(const SessionConfig& config, const std::vector<AgentPolicy>& policies, std::uint64_t seed);

struct ReplayResult {
    SessionConfig config;
    std::uint64_t seed = 0;
    std::vector<RosterEntry> roster;
    std::vector<RoundOutcome> rounds;
    std::set<std::size_t> disqualified;
    std::vector<Payment> payments;
    bool finished = false;
};

// Re-derives every position, outcome, disqualification and payment from
// the header seed and the logged decisions, checking each against the log.
// Throws LogError naming the first inconsistent or missing line.
ReplayResult replay(const SessionLog& log);

}  // namespace sdgame
