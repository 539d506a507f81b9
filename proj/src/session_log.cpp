#include "sdgame/session_log.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sdgame/format.hpp"

namespace sdgame {

GameParams SessionConfig::params_for(Part part) const {
    GameParams p = params;
    p.fine = (part == Part::Intervention && intervention == Intervention::Fine) ? fine : 0.0;
    return p;
}

void SessionConfig::validate() const {
    params.with_fine(fine).validate();
    protocol.validate();
    if (session_id.empty()) throw std::invalid_argument("session id must not be empty");
}

nlohmann::json config_to_json(const SessionConfig& c) {
    auto params = params_to_json(c.params);
    params.erase("fine");
    return {{"session_id", c.session_id},
            {"network", network_to_json(c.network)},
            {"params", params},
            {"intervention", to_string(c.intervention)},
            {"fine", c.fine},
            {"protocol", protocol_to_json(c.protocol)}};
}

SessionConfig config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw std::invalid_argument("session config must be a JSON object");
    try {
        SessionConfig c;
        c.session_id = j.value("session_id", c.session_id);
        if (j.contains("network")) c.network = network_from_json(j.at("network"));
        if (j.contains("params")) c.params = params_from_json(j.at("params"), c.params);
        // Flat keys are accepted as well, so scenario files can stay terse.
        c.params = params_from_json(j, c.params);
        c.params.fine = 0.0;
        if (j.contains("intervention")) c.intervention = intervention_from_string(j.at("intervention").get<std::string>());
        c.fine = j.value("fine", c.fine);
        if (j.contains("protocol")) c.protocol = protocol_from_json(j.at("protocol"));
        c.validate();
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("invalid session config: ") + e.what());
    }
}

nlohmann::json Payment::to_json() const {
    return {{"participant", participant},
            {"disqualified", disqualified},
            {"drawn_rounds", {{"baseline", drawn_rounds[0]}, {"intervention", drawn_rounds[1]}}},
            {"drawn_points", {{"baseline", drawn_points[0]}, {"intervention", drawn_points[1]}}},
            {"bonus_cents", {{"baseline", bonus_cents[0]}, {"intervention", bonus_cents[1]}}},
            {"fee_cents", fee_cents},
            {"total_cents", total_cents},
            {"total", format_cents(total_cents)}};
}

Payment Payment::from_json(const nlohmann::json& j) {
    Payment p;
    p.participant = j.at("participant").get<std::size_t>();
    p.disqualified = j.at("disqualified").get<bool>();
    const char* parts[2] = {"baseline", "intervention"};
    for (int k = 0; k < 2; ++k) {
        p.drawn_rounds[k] = j.at("drawn_rounds").at(parts[k]).get<std::vector<int>>();
        p.drawn_points[k] = j.at("drawn_points").at(parts[k]).get<double>();
        p.bonus_cents[k] = j.at("bonus_cents").at(parts[k]).get<std::int64_t>();
    }
    p.fee_cents = j.at("fee_cents").get<std::int64_t>();
    p.total_cents = j.at("total_cents").get<std::int64_t>();
    return p;
}

bool Payment::operator==(const Payment& o) const {
    return participant == o.participant && disqualified == o.disqualified && drawn_rounds[0] == o.drawn_rounds[0] &&
           drawn_rounds[1] == o.drawn_rounds[1] && drawn_points[0] == o.drawn_points[0] &&
           drawn_points[1] == o.drawn_points[1] && bonus_cents[0] == o.bonus_cents[0] &&
           bonus_cents[1] == o.bonus_cents[1] && fee_cents == o.fee_cents && total_cents == o.total_cents;
}

SessionLog::SessionLog(const SessionConfig& config, std::uint64_t seed) {
    records_.push_back({{"event", "session"},
                        {"schema", kLogSchemaVersion},
                        {"session_id", config.session_id},
                        {"seed", seed},
                        {"config", config_to_json(config)}});
}

void SessionLog::append(nlohmann::json record) {
    if (records_.empty() && record.value("event", "") != "session")
        throw std::logic_error("the first log record must be the session header");
    records_.push_back(std::move(record));
}

const nlohmann::json& SessionLog::header() const {
    if (records_.empty()) throw std::logic_error("session log has no header");
    return records_.front();
}

std::uint64_t SessionLog::seed() const { return header().at("seed").get<std::uint64_t>(); }

SessionConfig SessionLog::config() const { return config_from_json(header().at("config")); }

std::vector<RosterEntry> SessionLog::roster() const {
    std::vector<RosterEntry> out;
    for (const auto& r : records_) {
        if (r.at("event") != "join") continue;
        RosterEntry e;
        e.participant = r.at("participant").get<std::size_t>();
        e.bot = r.at("kind") == "bot";
        e.name = r.value("name", "");
        if (r.contains("policy")) e.policy = policy_from_json(r.at("policy"));
        out.push_back(std::move(e));
    }
    return out;
}

std::vector<RoundOutcome> SessionLog::rounds() const {
    std::vector<RoundOutcome> out;
    for (const auto& r : records_)
        if (r.at("event") == "round_outcome") out.push_back(RoundOutcome::from_json(r));
    return out;
}

std::set<std::size_t> SessionLog::disqualified() const {
    std::set<std::size_t> out;
    for (const auto& r : records_)
        if (r.at("event") == "disqualified") out.insert(r.at("participant").get<std::size_t>());
    return out;
}

std::vector<Payment> SessionLog::payments() const {
    std::vector<Payment> out;
    for (const auto& r : records_)
        if (r.at("event") == "payment") out.push_back(Payment::from_json(r));
    return out;
}

bool SessionLog::finished() const { return !records_.empty() && records_.back().at("event") == "session_end"; }

std::string SessionLog::record_line(const nlohmann::json& record) { return record.dump() + "\n"; }

std::string SessionLog::to_jsonl() const {
    std::string out;
    for (const auto& r : records_) out += record_line(r);
    return out;
}

SessionLog SessionLog::from_jsonl(std::string_view text) {
    SessionLog log;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        const bool terminated = end != std::string_view::npos;
        if (!terminated) end = text.size();
        auto line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (!terminated && line.empty()) break;
        nlohmann::json record;
        try {
            record = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw LogError(line_no, terminated ? "malformed JSON record" : "truncated record");
        }
        if (!record.is_object() || !record.contains("event") || !record.at("event").is_string())
            throw LogError(line_no, "record is not an event object");
        if (line_no == 1 && record.at("event") != "session") throw LogError(1, "missing session header");
        if (line_no == 1 && (!record.contains("seed") || !record.contains("config")))
            throw LogError(1, "session header lacks seed or config");
        log.records_.push_back(std::move(record));
    }
    if (log.records_.empty()) throw LogError(1, "empty log");
    return log;
}

SessionLog SessionLog::read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_jsonl(ss.str());
}

void SessionLog::write_file(const std::string& path) const { write_file_atomic(path, to_jsonl()); }

namespace records {

nlohmann::json join(const RosterEntry& entry) {
    nlohmann::json j{{"event", "join"},
                     {"participant", entry.participant},
                     {"kind", entry.bot ? "bot" : "human"},
                     {"name", entry.name}};
    if (entry.bot) j["policy"] = policy_to_json(entry.policy);
    return j;
}

nlohmann::json group_formed(std::size_t participants) {
    return {{"event", "group_formed"}, {"participants", participants}};
}

nlohmann::json part_start(Part part) { return {{"event", "part_start"}, {"part", to_string(part)}}; }

nlohmann::json intervention_start(Intervention kind) {
    return {{"event", "intervention_start"}, {"kind", to_string(kind)}};
}

nlohmann::json round_start(int round, Part part, const std::vector<NodeId>& positions) {
    return {{"event", "round_start"}, {"round", round}, {"part", to_string(part)}, {"positions", positions}};
}

nlohmann::json decision(int round, std::size_t participant, Decision d) {
    return {{"event", "decision"}, {"round", round}, {"participant", participant}, {"decision", to_string(d)}};
}

nlohmann::json round_outcome(const RoundOutcome& outcome) {
    auto j = outcome.to_json();
    j["event"] = "round_outcome";
    return j;
}

nlohmann::json disqualified(int round, std::size_t participant) {
    return {{"event", "disqualified"}, {"round", round}, {"participant", participant}, {"replacement", "NeverDistance"}};
}

nlohmann::json payment(const Payment& p) {
    auto j = p.to_json();
    j["event"] = "payment";
    return j;
}

nlohmann::json session_end(int rounds) { return {{"event", "session_end"}, {"rounds", rounds}}; }

}  // namespace records

std::string decision_csv(const SessionLog& log, bool with_header) {
    const auto config = log.config();
    std::ostringstream os;
    if (with_header)
        os << "session,network,alpha,intervention,participant,round,part,position,role,decision,timeout,infected,points\n";
    for (const auto& o : log.rounds()) {
        for (std::size_t k = 0; k < o.decisions.size(); ++k) {
            os << config.session_id << ',' << config.network.kind() << ',' << format_double(config.params.alpha) << ','
               << to_string(config.intervention) << ',' << k << ',' << o.round << ',' << to_string(o.part) << ','
               << o.positions[k] << ',' << to_string(node_role(config.network, o.positions[k])) << ','
               << (distances(o.decisions[k]) ? 1 : 0) << ',' << (o.decisions[k] == Decision::Timeout ? 1 : 0) << ','
               << (o.infected[k] ? 1 : 0) << ',' << format_double(o.points[k]) << '\n';
        }
    }
    return os.str();
}

void write_file_atomic(const std::string& path, std::string_view content) {
    const auto tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp);
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw std::runtime_error("write failed for " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace sdgame
