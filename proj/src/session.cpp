#include "sdgame/session.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace sdgame {

GroupSession::GroupSession(SessionConfig config, std::uint64_t seed)
    : config_(std::move(config)), nature_(mix_seed(seed, kNatureStream)) {
    config_.validate();
    const auto n = participants();
    streak_.assign(n, 0);
    disqualified_.assign(n, false);
    history_.assign(n, {});
}

const std::vector<NodeId>& GroupSession::begin_round() {
    if (round_open_) throw std::logic_error("previous round has not been resolved");
    if (round_ >= config_.protocol.total_rounds()) throw std::logic_error("session already finished");
    ++round_;
    round_open_ = true;
    positions_ = assign_positions(nature_, participants(), config_.network);
    return positions_;
}

RoundResolution GroupSession::resolve_round(const std::vector<Decision>& decisions) {
    if (!round_open_) throw std::logic_error("no round in progress");
    if (decisions.size() != participants()) throw std::invalid_argument("one decision per participant required");
    RoundResolution res;
    res.outcome = sample_round(nature_, config_.network, positions_, decisions, config_.params_for(part()),
                               config_.protocol, round_, part());
    round_open_ = false;
    outcomes_.push_back(res.outcome);

    for (std::size_t k = 0; k < participants(); ++k) {
        auto& h = history_[k];
        h.push_back({round_, positions_[k], decisions[k], res.outcome.infected[k], res.outcome.points[k]});
        const auto keep = static_cast<std::size_t>(config_.protocol.history_length);
        if (h.size() > keep) h.erase(h.begin(), h.end() - static_cast<std::ptrdiff_t>(keep));
        if (disqualified_[k]) continue;
        streak_[k] = decisions[k] == Decision::Timeout ? streak_[k] + 1 : 0;
        if (streak_[k] >= config_.protocol.disqualify_after) {
            disqualified_[k] = true;
            res.newly_disqualified.push_back(k);
        }
    }
    return res;
}

Observation GroupSession::observation(std::size_t participant) const {
    Observation obs;
    obs.network = &config_.network;
    obs.position = positions_.at(participant);
    obs.params = config_.params_for(part());
    obs.part = part();
    obs.round = round_;
    obs.history = history_.at(participant);
    return obs;
}

std::int64_t part_bonus_cents(double points, double points_per_dollar) {
    if (!(points_per_dollar > 0)) throw std::invalid_argument("conversion rate must be positive");
    const auto cents = std::llround(points * 100.0 / points_per_dollar);
    return std::max<std::int64_t>(0, cents);
}

std::vector<Payment> compute_payment(const std::vector<RoundOutcome>& rounds, const std::set<std::size_t>& disqualified,
                                     std::size_t participants, const ProtocolParams& protocol, Rng& rng,
                                     double points_per_dollar, std::int64_t fee_cents) {
    if (rounds.size() != static_cast<std::size_t>(protocol.total_rounds()))
        throw std::invalid_argument("incomplete log: " + std::to_string(rounds.size()) + " of " +
                                    std::to_string(protocol.total_rounds()) + " rounds");
    for (std::size_t r = 0; r < rounds.size(); ++r) {
        if (rounds[r].round != static_cast<int>(r) + 1) throw std::invalid_argument("rounds out of order in log");
        if (rounds[r].points.size() != participants) throw std::invalid_argument("round outcome has wrong size");
    }

    std::vector<Payment> out;
    for (std::size_t k = 0; k < participants; ++k) {
        Payment pay;
        pay.participant = k;
        pay.disqualified = disqualified.count(k) > 0;
        pay.fee_cents = fee_cents;
        for (int part = 0; part < 2; ++part) {
            std::vector<int> pool(static_cast<std::size_t>(protocol.rounds_per_part));
            std::iota(pool.begin(), pool.end(), 1 + part * protocol.rounds_per_part);
            // Partial Fisher-Yates: the first `paid` slots are a uniform
            // draw without replacement.
            for (int i = 0; i < protocol.paid_rounds_per_part; ++i) {
                const auto j = i + static_cast<int>(rng.below(pool.size() - static_cast<std::size_t>(i)));
                std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
            }
            pool.resize(static_cast<std::size_t>(protocol.paid_rounds_per_part));
            std::sort(pool.begin(), pool.end());
            double points = 0.0;
            for (int r : pool) points += rounds[static_cast<std::size_t>(r - 1)].points[k];
            pay.drawn_rounds[part] = pool;
            pay.drawn_points[part] = points;
            pay.bonus_cents[part] = part_bonus_cents(points, points_per_dollar);
        }
        pay.total_cents = pay.disqualified ? 0 : pay.fee_cents + pay.bonus_cents[0] + pay.bonus_cents[1];
        out.push_back(std::move(pay));
    }
    return out;
}

std::vector<Payment> compute_payment(const SessionLog& log, Rng& rng, double points_per_dollar,
                                     std::int64_t fee_cents) {
    const auto config = log.config();
    return compute_payment(log.rounds(), log.disqualified(), config.network.node_count(), config.protocol, rng,
                           points_per_dollar, fee_cents);
}

SessionLog run_session_sim(const SessionConfig& config, const std::vector<AgentPolicy>& policies, std::uint64_t seed) {
    config.validate();
    const auto n = config.network.node_count();
    if (policies.size() != n) throw std::invalid_argument("one policy per network position required");

    SessionLog log(config, seed);
    GroupSession session(config, seed);
    std::vector<Agent> agents;
    for (std::size_t k = 0; k < n; ++k) {
        policies[k].validate();
        agents.emplace_back(policies[k], mix_seed(seed, bot_stream(k)));
        log.append(records::join({k, true, "bot-" + std::to_string(k), policies[k]}));
    }
    log.append(records::group_formed(n));

    const auto& protocol = config.protocol;
    for (int r = 1; r <= protocol.total_rounds(); ++r) {
        const Part part = protocol.part_of(r);
        if (r == 1) log.append(records::part_start(Part::Baseline));
        if (r == protocol.rounds_per_part + 1) {
            log.append(records::intervention_start(config.intervention));
            log.append(records::part_start(Part::Intervention));
        }
        const auto& positions = session.begin_round();
        log.append(records::round_start(r, part, positions));

        std::vector<Decision> decisions(n);
        for (std::size_t k = 0; k < n; ++k) {
            decisions[k] = agents[k].decide(session.observation(k));
            log.append(records::decision(r, k, decisions[k]));
        }
        auto res = session.resolve_round(decisions);
        log.append(records::round_outcome(res.outcome));
        for (auto k : res.newly_disqualified) log.append(records::disqualified(r, k));
    }

    Rng payment_rng(mix_seed(seed, kPaymentStream));
    std::set<std::size_t> disq;
    for (std::size_t k = 0; k < n; ++k)
        if (session.disqualified(k)) disq.insert(k);
    for (const auto& p : compute_payment(session.outcomes(), disq, n, protocol, payment_rng,
                                         protocol.points_per_dollar, protocol.fee_cents))
        log.append(records::payment(p));
    log.append(records::session_end(protocol.total_rounds()));
    return log;
}

ReplayResult replay(const SessionLog& log) {
    const auto& recs = log.records();
    ReplayResult result;
    try {
        result.config = log.config();
        result.seed = log.seed();
    } catch (const std::exception& e) {
        throw LogError(1, std::string("bad session header: ") + e.what());
    }
    GroupSession session(result.config, result.seed);
    const auto n = session.participants();
    std::vector<std::optional<Decision>> pending(n);
    std::vector<std::size_t> expected_disq;
    std::optional<std::vector<Payment>> payments;
    std::size_t payment_index = 0;
    bool started = false;

    for (std::size_t i = 1; i < recs.size(); ++i) {
        const auto line = i + 1;
        const auto& rec = recs[i];
        if (result.finished) throw LogError(line, "record after session_end");
        const auto event = rec.at("event").get<std::string>();
        auto fail = [line](const std::string& what) { throw LogError(line, what); };
        try {
            if (!expected_disq.empty() && event != "disqualified")
                fail("expected disqualification of participant " + std::to_string(expected_disq.front()));

            if (event == "join") {
                RosterEntry e;
                e.participant = rec.at("participant").get<std::size_t>();
                e.bot = rec.at("kind") == "bot";
                e.name = rec.value("name", "");
                if (rec.contains("policy")) e.policy = policy_from_json(rec.at("policy"));
                result.roster.push_back(std::move(e));
            } else if (event == "group_formed") {
                started = true;
            } else if (event == "round_start") {
                if (!started) fail("round_start before group_formed");
                if (session.round_open()) fail("round_start while round " + std::to_string(session.round()) + " is open");
                if (session.round() >= result.config.protocol.total_rounds()) fail("too many rounds");
                const auto& pos = session.begin_round();
                if (rec.at("round").get<int>() != session.round()) fail("unexpected round number");
                if (rec.at("positions").get<std::vector<NodeId>>() != pos) fail("positions differ from the seeded draw");
                std::fill(pending.begin(), pending.end(), std::nullopt);
            } else if (event == "decision") {
                if (!session.round_open() || rec.at("round").get<int>() != session.round())
                    fail("decision outside its round");
                const auto k = rec.at("participant").get<std::size_t>();
                if (k >= n) fail("participant index out of range");
                if (pending[k]) fail("duplicate decision for participant " + std::to_string(k));
                pending[k] = decision_from_string(rec.at("decision").get<std::string>());
            } else if (event == "round_outcome") {
                if (!session.round_open()) fail("round_outcome without an open round");
                std::vector<Decision> decisions(n);
                for (std::size_t k = 0; k < n; ++k) {
                    if (!pending[k]) fail("missing decision for participant " + std::to_string(k));
                    decisions[k] = *pending[k];
                }
                auto res = session.resolve_round(decisions);
                if (!(RoundOutcome::from_json(rec) == res.outcome)) fail("round outcome differs from replay");
                result.rounds.push_back(res.outcome);
                expected_disq = res.newly_disqualified;
            } else if (event == "disqualified") {
                const auto k = rec.at("participant").get<std::size_t>();
                if (expected_disq.empty() || expected_disq.front() != k)
                    fail("unexpected disqualification of participant " + std::to_string(k));
                expected_disq.erase(expected_disq.begin());
                result.disqualified.insert(k);
            } else if (event == "payment") {
                if (!session.finished()) fail("payment before the last round");
                if (!payments) {
                    Rng payment_rng(mix_seed(result.seed, kPaymentStream));
                    const auto& protocol = result.config.protocol;
                    payments = compute_payment(session.outcomes(), result.disqualified, n, protocol, payment_rng,
                                               protocol.points_per_dollar, protocol.fee_cents);
                }
                if (payment_index >= payments->size()) fail("too many payment records");
                if (!(Payment::from_json(rec) == (*payments)[payment_index]))
                    fail("payment differs from replay for participant " + std::to_string(payment_index));
                result.payments.push_back((*payments)[payment_index++]);
            } else if (event == "session_end") {
                if (!session.finished()) fail("session_end before the last round");
                if (!payments || payment_index != payments->size()) fail("session_end before all payments");
                result.finished = true;
            }
            // part_start, intervention_start and server-only records carry
            // no replayable state.
        } catch (const LogError&) {
            throw;
        } catch (const std::exception& e) {
            throw LogError(line, std::string("malformed ") + event + " record: " + e.what());
        }
    }
    if (started && !result.finished) {
        throw LogError(recs.size(), session.round_open()
                                        ? "log truncated in round " + std::to_string(session.round())
                                        : "log truncated before session_end");
    }
    return result;
}

}  // namespace sdgame
