// sdgame: batch entry point for the solver, simulator, analysis and server.
//
// Exit codes: 0 success, 2 usage error (bad flags or parameters), 1 runtime
// error (I/O, malformed logs, ...). SDGAME_LOG sets the log level
// (trace, debug, info, warn, error, off); logs go to stderr.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "sdgame/analysis/report.hpp"
#include "sdgame/equilibrium.hpp"
#include "sdgame/format.hpp"
#include "sdgame/session.hpp"
#include "sdgame/session_log.hpp"

#ifdef SDGAME_WITH_SERVER
#include "sdgame/server/service.hpp"
#endif

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sdgame;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void setup_logging() {
    auto logger = spdlog::stderr_color_mt("sdgame");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("[%H:%M:%S.%e] [%^%l%$] %v");
    spdlog::set_level(spdlog::level::info);
    if (const char* env = std::getenv("SDGAME_LOG"); env && *env) {
        const std::string s = env;
        static const std::vector<std::string> names = {"trace", "debug", "info", "warn", "warning",
                                                       "error", "critical", "off"};
        if (std::find(names.begin(), names.end(), s) == names.end())
            spdlog::warn("SDGAME_LOG='{}' not recognised; using info", s);
        else
            spdlog::set_level(spdlog::level::from_str(s == "warning" ? "warn" : s));
    }
}

// --- shared flags ----------------------------------------------------------

struct GameFlags {
    double benefit = 100.0;
    double cost = 35.0;
    double gamma = 0.5;
    bool fine = false;
    double fine_amount = 15.0;
};

void add_game_flags(CLI::App* cmd, GameFlags& g, bool with_fine_switch) {
    cmd->add_option("--benefit", g.benefit, "points for staying healthy (b)")->capture_default_str();
    cmd->add_option("--cost", g.cost, "cost of distancing (c)")->capture_default_str();
    cmd->add_option("--gamma", g.gamma, "infection probability of a distancing patient zero")->capture_default_str();
    if (with_fine_switch) cmd->add_flag("--fine", g.fine, "charge the fine to non-distancers");
    cmd->add_option("--fine-amount", g.fine_amount, "fine in points (f)")->capture_default_str();
}

GameParams make_params(const GameFlags& g, double alpha) {
    GameParams p;
    p.benefit = g.benefit;
    p.cost = g.cost;
    p.gamma = g.gamma;
    p.alpha = alpha;
    p.fine = g.fine ? g.fine_amount : 0.0;
    try {
        p.validate();
        if (g.fine_amount < 0) throw std::invalid_argument("fine amount must be >= 0");
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    return p;
}

// A kind ("star", "complete", "path") or a path to a network JSON file.
Network load_network(const std::string& spec, std::size_t n) {
    try {
        if (spec.ends_with(".json") || spec.find('/') != std::string::npos) {
            return network_from_json(json::parse(read_text(spec)));
        }
        return network_by_name(spec, n);
    } catch (const json::exception& e) {
        throw UsageError("network '" + spec + "': " + e.what());
    } catch (const std::invalid_argument& e) {
        throw UsageError("network '" + spec + "': " + e.what());
    }
}

std::string network_name(const std::string& spec) {
    if (spec.ends_with(".json")) return fs::path(spec).stem().string();
    return spec;
}

void write_output(const std::string& path, const std::string& content) {
    const auto parent = fs::path(path).parent_path();
    if (!parent.empty()) fs::create_directories(parent);
    write_file_atomic(path, content);
    spdlog::info("wrote {}", path);
}

// --- solve -----------------------------------------------------------------

struct SolveArgs {
    std::string network = "star";
    std::size_t nodes = 5;
    std::vector<double> alphas = {0.15, 0.65};
    GameFlags game;
    bool json_stdout = false;
    std::string out;
};

int run_solve(const SolveArgs& a) {
    const auto net = load_network(a.network, a.nodes);
    if (net.node_count() > kMaxSolverNodes) throw UsageError("solver handles at most 20 nodes");
    json doc = {{"reports", json::array()}};
    std::string text;
    for (double alpha : a.alphas) {
        const auto report = solve(net, make_params(a.game, alpha));
        doc["reports"].push_back(report.to_json());
        text += report.to_table() + "\n";
    }
    if (a.json_stdout)
        std::cout << doc.dump(2) << "\n";
    else
        std::cout << text;
    if (!a.out.empty()) write_output(a.out, doc.dump(2) + "\n");
    return 0;
}

// --- sweep -----------------------------------------------------------------

struct SweepArgs {
    std::vector<std::string> networks = {"complete", "star"};
    std::size_t nodes = 5;
    double step = 0.005;
    GameFlags game;
    std::string out = "sweep";
    std::size_t columns = 41;
    unsigned threads = 0;
};

int run_sweep(const SweepArgs& a) {
    if (!(a.step > 0.0 && a.step <= 1.0)) throw UsageError("--step must be in (0, 1]");
    if (a.columns < 2) throw UsageError("--columns must be at least 2");
    std::vector<NamedNetwork> nets;
    for (const auto& spec : a.networks) {
        auto net = load_network(spec, a.nodes);
        if (net.node_count() > kMaxSolverNodes) throw UsageError("solver handles at most 20 nodes");
        nets.push_back({network_name(spec), std::move(net)});
    }
    const auto params = make_params(a.game, 0.0);
    const auto table = sweep_alpha(nets, params, alpha_grid(a.step), a.threads);

    std::cout << table.to_ascii_chart(a.columns) << "\n";
    std::cout << "boundaries (midpoint between grid points):\n";
    for (const auto& b : table.boundaries) {
        std::cout << "  " << b.network << " " << b.kind << " alpha=" << format_fixed(b.alpha, 4) << "  "
                  << b.before << " -> " << b.after << "\n";
    }
    if (!a.out.empty()) {
        write_output(a.out + ".csv", table.to_csv());
        write_output(a.out + ".json", table.to_json().dump(2) + "\n");
    }
    return 0;
}

// --- simulate --------------------------------------------------------------

struct SimulateArgs {
    std::optional<std::uint64_t> seed;
    std::vector<std::string> networks = {"star"};
    std::vector<double> alphas = {0.65};
    std::vector<std::string> interventions = {"fine"};
    std::size_t sessions = 1;
    GameFlags game;
    std::vector<std::string> policies = {"equilibrium"};
    std::string selection = "smallest";
    double precision = 2.0;
    double risk = 1.0;
    double altruism = 0.0;
    double belief = 0.5;
    std::string out = "sim_out";
    unsigned threads = 0;
};

AgentPolicy make_policy(const SimulateArgs& a, const std::string& kind) {
    AgentPolicy p;
    if (kind == "always") {
        p = AgentPolicy::always();
    } else if (kind == "never") {
        p = AgentPolicy::never();
    } else if (kind == "equilibrium") {
        if (a.selection != "smallest" && a.selection != "largest")
            throw UsageError("--selection must be smallest or largest");
        p = AgentPolicy::equilibrium(a.selection == "largest" ? EquilibriumSelection::LexLargest
                                                              : EquilibriumSelection::LexSmallest);
    } else if (kind == "logit") {
        p = AgentPolicy::logit(a.precision, a.risk, a.altruism, a.belief);
    } else {
        throw UsageError("unknown policy '" + kind + "' (always, never, equilibrium, logit)");
    }
    try {
        p.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    return p;
}

struct PlannedSession {
    SessionConfig config;
    std::uint64_t seed = 0;
};

int run_simulate(const SimulateArgs& a) {
    if (!a.seed) throw UsageError("--seed is required");
    if (a.sessions == 0) throw UsageError("--sessions must be positive");

    std::vector<PlannedSession> plan;
    std::uint64_t index = 0;
    for (const auto& net_spec : a.networks) {
        const auto net = load_network(net_spec, 5);
        for (double alpha : a.alphas) {
            const auto params = make_params(a.game, alpha);
            for (const auto& iv : a.interventions) {
                Intervention kind;
                try {
                    kind = intervention_from_string(iv);
                } catch (const std::invalid_argument& e) {
                    throw UsageError(e.what());
                }
                for (std::size_t s = 0; s < a.sessions; ++s, ++index) {
                    PlannedSession ps;
                    ps.config.network = net;
                    ps.config.params = params.with_fine(0.0);
                    ps.config.intervention = kind;
                    ps.config.fine = a.game.fine_amount;
                    ps.config.session_id = network_name(net_spec) + "-" + format_double(alpha) + "-" + iv + "-" +
                                           std::to_string(s + 1);
                    ps.seed = mix_seed(*a.seed, index);
                    try {
                        ps.config.validate();
                    } catch (const std::invalid_argument& e) {
                        throw UsageError(e.what());
                    }
                    plan.push_back(std::move(ps));
                }
            }
        }
    }

    std::vector<AgentPolicy> base;
    for (const auto& k : a.policies) base.push_back(make_policy(a, k));

    std::vector<SessionLog> logs(plan.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < plan.size();) {
            const auto n = plan[i].config.network.node_count();
            if (base.size() != 1 && base.size() != n)
                throw UsageError("give one --policy or one per participant");
            std::vector<AgentPolicy> pol(n, base.front());
            if (base.size() == n) pol = base;
            logs[i] = run_session_sim(plan[i].config, pol, plan[i].seed);
        }
    };
    unsigned threads = a.threads ? a.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, plan.size()));
    if (base.size() != 1 && base.size() != 5 && threads > 1) threads = 1;  // surface the error on this thread
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::exception_ptr> errors(threads);
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back([&, t] {
                try {
                    worker();
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            });
        for (auto& th : pool) th.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

    fs::create_directories(a.out);
    std::string csv;
    for (std::size_t i = 0; i < logs.size(); ++i) {
        write_output((fs::path(a.out) / (plan[i].config.session_id + ".jsonl")).string(), logs[i].to_jsonl());
        csv += decision_csv(logs[i], i == 0);
    }
    write_output((fs::path(a.out) / "decisions.csv").string(), csv);

    std::cout << "session,seed,distancing_baseline,distancing_intervention,infected_share\n";
    for (std::size_t i = 0; i < logs.size(); ++i) {
        double yes[2] = {0, 0}, cnt[2] = {0, 0}, inf = 0, total = 0;
        for (const auto& r : logs[i].rounds()) {
            const int p = r.part == Part::Baseline ? 0 : 1;
            for (std::size_t k = 0; k < r.decisions.size(); ++k) {
                yes[p] += distances(r.decisions[k]);
                cnt[p] += 1;
                inf += r.infected[k];
                total += 1;
            }
        }
        std::cout << plan[i].config.session_id << "," << plan[i].seed << "," << format_fixed(yes[0] / cnt[0], 4)
                  << "," << format_fixed(yes[1] / cnt[1], 4) << "," << format_fixed(inf / total, 4) << "\n";
    }
    return 0;
}

// --- analyze ---------------------------------------------------------------

struct AnalyzeArgs {
    std::vector<std::string> inputs;
    int first = 11;
    int last = 20;
    int k = 4;
    int a = 2;
    int trim = 4;
    int permutations = 999;
    std::uint64_t seed = 1;
    std::string out;
    bool json_stdout = false;
};

analysis::DecisionPanel load_panel(const std::vector<std::string>& inputs) {
    analysis::DecisionPanel panel;
    std::vector<std::string> files;
    for (const auto& in : inputs) {
        if (fs::is_directory(in)) {
            std::vector<std::string> found;
            for (const auto& e : fs::directory_iterator(in))
                if (e.path().extension() == ".jsonl") found.push_back(e.path().string());
            std::sort(found.begin(), found.end());
            if (found.empty()) spdlog::warn("no .jsonl logs in {}", in);
            files.insert(files.end(), found.begin(), found.end());
        } else if (fs::exists(in)) {
            files.push_back(in);
        } else {
            throw std::runtime_error("no such file or directory: " + in);
        }
    }
    for (const auto& f : files) {
        if (fs::path(f).extension() == ".csv") {
            auto part = analysis::DecisionPanel::from_csv(read_text(f));
            if (!panel.groups.empty() && part.rounds_per_part != panel.rounds_per_part)
                throw std::runtime_error(f + ": rounds per part differ from earlier inputs");
            panel.rounds_per_part = part.rounds_per_part;
            for (auto& g : part.groups) panel.groups.push_back(std::move(g));
        } else {
            panel.add_log(SessionLog::read_file(f));
        }
    }
    panel.validate();
    spdlog::info("loaded {} groups from {} files", panel.groups.size(), files.size());
    return panel;
}

int run_analyze(const AnalyzeArgs& a) {
    if (a.inputs.empty()) throw UsageError("no inputs given");
    if (a.first < 1 || a.last < a.first) throw UsageError("--first/--last must satisfy 1 <= first <= last");
    if (a.k < 1 || a.a < 0) throw UsageError("--k must be >= 1 and --a >= 0");
    if (a.permutations < 0 || a.trim < 2) throw UsageError("--permutations must be >= 0 and --trim >= 2");
    const auto panel = load_panel(a.inputs);
    if (a.last > panel.rounds_per_part) throw UsageError("--last exceeds the rounds per part of the data");

    analysis::AnalyzeOptions opts;
    opts.window = {a.first, a.last};
    opts.k = a.k;
    opts.a = a.a;
    opts.breaks.trim = a.trim;
    opts.breaks.permutations = a.permutations;
    opts.breaks.seed = a.seed;
    const auto report = analysis::analyze_panel(panel, opts);

    const auto text = report.to_text();
    const auto doc = report.to_json().dump(2) + "\n";
    std::cout << (a.json_stdout ? doc : text);
    if (!a.out.empty()) {
        write_output(a.out + ".json", doc);
        write_output(a.out + ".txt", text);
    }
    return 0;
}

// --- replay ----------------------------------------------------------------

struct ReplayArgs {
    std::string log;
    std::string out;
    std::string csv;
};

int run_replay(const ReplayArgs& a) {
    const auto log = SessionLog::read_file(a.log);
    const auto r = replay(log);

    json doc;
    doc["session_id"] = r.config.session_id;
    doc["seed"] = r.seed;
    doc["config"] = config_to_json(r.config);
    doc["roster"] = json::array();
    for (const auto& e : r.roster) doc["roster"].push_back(records::join(e));
    doc["rounds_verified"] = r.rounds.size();
    doc["finished"] = r.finished;
    doc["disqualified"] = r.disqualified;

    std::ostringstream text;
    text << "session " << r.config.session_id << "  seed " << r.seed << "\n"
         << "network " << r.config.network.kind() << "  alpha " << format_double(r.config.params.alpha)
         << "  intervention " << to_string(r.config.intervention) << "\n"
         << "rounds verified: " << r.rounds.size() << (r.finished ? " (finished)" : " (incomplete)") << "\n\n";
    text << "part           distancing  infected  mean points\n";
    json parts = json::object();
    for (Part part : {Part::Baseline, Part::Intervention}) {
        double yes = 0, inf = 0, pts = 0, n = 0;
        for (const auto& o : r.rounds) {
            if (o.part != part) continue;
            for (std::size_t k = 0; k < o.decisions.size(); ++k) {
                yes += distances(o.decisions[k]);
                inf += o.infected[k];
                pts += o.points[k];
                n += 1;
            }
        }
        if (n == 0) continue;
        parts[to_string(part)] = {{"distancing", yes / n}, {"infected", inf / n}, {"mean_points", pts / n}};
        auto name = to_string(part);
        name.resize(15, ' ');
        text << name << format_fixed(yes / n, 4) << "      " << format_fixed(inf / n, 4) << "    "
             << format_fixed(pts / n, 2) << "\n";
    }
    doc["parts"] = parts;

    doc["payments"] = json::array();
    if (!r.payments.empty()) text << "\nparticipant  baseline  intervention  fee  total\n";
    for (const auto& p : r.payments) {
        doc["payments"].push_back(p.to_json());
        text << "  " << p.participant << (p.disqualified ? " (DQ)" : "     ") << "     "
             << format_cents(p.bonus_cents[0]) << "      " << format_cents(p.bonus_cents[1]) << "     "
             << format_cents(p.fee_cents) << "  $" << format_cents(p.total_cents) << "\n";
    }
    std::cout << text.str();
    if (!a.out.empty()) write_output(a.out, doc.dump(2) + "\n");
    if (!a.csv.empty()) write_output(a.csv, decision_csv(log));
    return 0;
}

// --- serve -----------------------------------------------------------------

struct ServeArgs {
    std::string address = "127.0.0.1";
    unsigned short port = 8080;
    std::string log_dir = "sessions";
    std::size_t threads = 2;
    std::uint64_t seed = 1;
    std::string network = "star";
    double alpha = 0.65;
    std::string intervention = "fine";
    GameFlags game;
    std::string bot_policy = "equilibrium";
    bool no_bot_fill = false;
    std::int64_t lobby_wait_ms = 60'000;
    int decision_ms = 20'000;
    int review_ms = 15'000;
    int briefing_ms = 30'000;
    std::string server_config;
};

int run_serve([[maybe_unused]] const ServeArgs& a) {
#ifdef SDGAME_WITH_SERVER
    server::ServiceOptions so;
    so.address = a.address;
    so.port = a.port;
    so.log_dir = a.log_dir;
    so.threads = a.threads;
    try {
        if (!a.server_config.empty()) {
            so.server = server::options_from_json(json::parse(read_text(a.server_config)));
        } else {
            auto& s = so.server;
            s.seed = a.seed;
            s.bot_fill = !a.no_bot_fill;
            s.lobby_wait_ms = a.lobby_wait_ms;
            s.session.network = load_network(a.network, 5);
            s.session.params = make_params(a.game, a.alpha).with_fine(0.0);
            s.session.intervention = intervention_from_string(a.intervention);
            s.session.fine = a.game.fine_amount;
            s.session.protocol.decision_ms = a.decision_ms;
            s.session.protocol.review_ms = a.review_ms;
            s.session.protocol.briefing_ms = a.briefing_ms;
            SimulateArgs defaults;
            s.bot_policy = make_policy(defaults, a.bot_policy);
        }
        so.server.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("refusing to start: ") + e.what());
    } catch (const json::exception& e) {
        throw UsageError(std::string("refusing to start: ") + e.what());
    }
    server::Service service(so);
    service.run_until_signal();
    return 0;
#else
    throw std::runtime_error("this build has no session server");
#endif
}

// --- --config support ------------------------------------------------------

// Turns JSON keys into flags appended to the command line. Top-level keys
// apply wherever the subcommand knows them; an object under a subcommand's
// name applies to that subcommand only and must name known flags. Flags
// given on the command line win.
std::vector<std::string> expand_config(CLI::App& app, std::vector<std::string> args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        if (args[i].starts_with("--config=")) path = args[i].substr(9);
    }
    if (path.empty() || args.empty() || args[0].starts_with("-")) return args;

    CLI::App* sub = nullptr;
    try {
        sub = app.get_subcommand(args[0]);
    } catch (const CLI::OptionNotFound&) {
        return args;  // CLI11 reports the unknown subcommand
    }

    json cfg;
    try {
        cfg = json::parse(read_text(path));
    } catch (const std::exception& e) {
        throw UsageError("config " + path + ": " + e.what());
    }
    if (!cfg.is_object()) throw UsageError("config " + path + ": top level must be an object");

    auto given = [&](const std::string& flag) {
        return std::any_of(args.begin(), args.end(),
                           [&](const std::string& s) { return s == flag || s.starts_with(flag + "="); });
    };
    std::vector<std::string> extra;
    auto add = [&](std::string key, const json& v, bool strict) {
        std::replace(key.begin(), key.end(), '_', '-');
        const std::string flag = "--" + key;
        if (key == "config") return;
        if (!sub->get_option_no_throw(flag)) {
            if (strict) throw UsageError("config " + path + ": " + sub->get_name() + " has no flag " + flag);
            spdlog::debug("config key '{}' not used by {}", key, sub->get_name());
            return;
        }
        if (given(flag) || v.is_null()) return;
        auto scalar = [](const json& x) { return x.is_string() ? x.get<std::string>() : x.dump(); };
        if (v.is_boolean()) {
            extra.push_back(flag + "=" + (v.get<bool>() ? "true" : "false"));
        } else if (v.is_array()) {
            extra.push_back(flag);
            for (const auto& x : v) extra.push_back(scalar(x));
        } else if (v.is_object()) {
            throw UsageError("config " + path + ": value of '" + key + "' must not be an object");
        } else {
            extra.push_back(flag);
            extra.push_back(scalar(v));
        }
    };
    for (const auto& [k, v] : cfg.items()) {
        if (v.is_object() && app.get_subcommand_no_throw(k)) continue;
        add(k, v, false);
    }
    if (cfg.contains(args[0]) && cfg[args[0]].is_object())
        for (const auto& [k, v] : cfg[args[0]].items()) add(k, v, true);

    // Keep a trailing "--" separator (if any) after the injected flags.
    auto sep = std::find(args.begin(), args.end(), "--");
    args.insert(sep, extra.begin(), extra.end());
    return args;
}

}  // namespace

int main(int argc, char** argv) {
    setup_logging();

    CLI::App app{"Networked social-distancing game laboratory"};
    app.name("sdgame");
    app.require_subcommand(1);
    app.set_version_flag("--version", "sdgame 0.1.0");
    app.footer("Environment: SDGAME_LOG=trace|debug|info|warn|error|off (stderr log level).\n"
               "Any flag may also come from --config FILE.json, e.g. {\"alpha\": 0.65, \"simulate\": {\"seed\": 7}}.");
    std::string config_path;
    auto add_config = [&](CLI::App* c) {
        c->add_option("--config", config_path, "JSON file supplying flags (command line wins)");
    };

    // solve
    SolveArgs solve_args;
    auto* solve_cmd = app.add_subcommand("solve", "Enumerate Nash equilibria and efficient profiles");
    solve_cmd->add_option("--network,-n", solve_args.network, "star, complete, path, or a network JSON file")
        ->capture_default_str();
    solve_cmd->add_option("--nodes", solve_args.nodes, "node count for named networks")->capture_default_str();
    solve_cmd->add_option("--alpha,-a", solve_args.alphas, "contagion rate(s)")->capture_default_str();
    add_game_flags(solve_cmd, solve_args.game, true);
    solve_cmd->add_flag("--json", solve_args.json_stdout, "print JSON instead of tables");
    solve_cmd->add_option("--out,-o", solve_args.out, "also write the JSON report to this file");
    add_config(solve_cmd);
    solve_cmd->footer("Example:\n  sdgame solve --network star --alpha 0.65");

    // sweep
    SweepArgs sweep_args;
    auto* sweep_cmd = app.add_subcommand("sweep", "Sweep alpha over a grid and chart the equilibrium regions");
    sweep_cmd->add_option("--network,-n", sweep_args.networks, "networks to sweep")->capture_default_str();
    sweep_cmd->add_option("--nodes", sweep_args.nodes, "node count for named networks")->capture_default_str();
    sweep_cmd->add_option("--step,-s", sweep_args.step, "grid step on [0, 1]")->capture_default_str();
    add_game_flags(sweep_cmd, sweep_args.game, true);
    sweep_cmd->add_option("--out,-o", sweep_args.out, "output prefix for .csv and .json ('' to skip)")
        ->capture_default_str();
    sweep_cmd->add_option("--columns", sweep_args.columns, "chart width in alpha columns")->capture_default_str();
    sweep_cmd->add_option("--threads", sweep_args.threads, "worker threads (0 = hardware)");
    add_config(sweep_cmd);
    sweep_cmd->footer("Example:\n  sdgame sweep --network star --step 0.005 --out star_sweep");

    // simulate
    SimulateArgs sim_args;
    std::uint64_t seed_value = 0;
    auto* sim_cmd = app.add_subcommand("simulate", "Simulate 40-round sessions of bot agents");
    auto* seed_opt = sim_cmd->add_option("--seed", seed_value, "master seed (required)");
    sim_cmd->add_option("--network,-n", sim_args.networks, "network(s)")->capture_default_str();
    sim_cmd->add_option("--alpha,-a", sim_args.alphas, "contagion rate(s)")->capture_default_str();
    sim_cmd->add_option("--intervention", sim_args.interventions, "fine and/or nudge")->capture_default_str();
    sim_cmd->add_option("--sessions", sim_args.sessions, "sessions per treatment")->capture_default_str();
    add_game_flags(sim_cmd, sim_args.game, false);
    sim_cmd->add_option("--policy", sim_args.policies,
                        "always, never, equilibrium or logit; one, or one per participant")
        ->capture_default_str();
    sim_cmd->add_option("--selection", sim_args.selection, "equilibrium choice: smallest or largest")
        ->capture_default_str();
    sim_cmd->add_option("--lambda", sim_args.precision, "logit precision")->capture_default_str();
    sim_cmd->add_option("--risk", sim_args.risk, "logit risk exponent r")->capture_default_str();
    sim_cmd->add_option("--altruism", sim_args.altruism, "logit altruism weight w")->capture_default_str();
    sim_cmd->add_option("--belief", sim_args.belief, "logit belief q about others' distancing")
        ->capture_default_str();
    sim_cmd->add_option("--out,-o", sim_args.out, "output directory")->capture_default_str();
    sim_cmd->add_option("--threads", sim_args.threads, "worker threads (0 = hardware)");
    add_config(sim_cmd);
    sim_cmd->footer(
        "Writes <out>/<session>.jsonl per session and <out>/decisions.csv.\n"
        "Example:\n  sdgame simulate --seed 7 --network star --alpha 0.65 --intervention fine --out run7");

    // analyze
    AnalyzeArgs an_args;
    auto* an_cmd = app.add_subcommand("analyze", "Hypothesis tests, break tests and convergence on session data");
    an_cmd->add_option("inputs,--input,-i", an_args.inputs, "session logs (.jsonl), decision CSVs, or directories");
    an_cmd->add_option("--first", an_args.first, "first round of the test window (per part)")->capture_default_str();
    an_cmd->add_option("--last", an_args.last, "last round of the test window (per part)")->capture_default_str();
    an_cmd->add_option("--k", an_args.k, "convergence: rounds a strategy must be held")->capture_default_str();
    an_cmd->add_option("--a", an_args.a, "convergence: allowed consecutive deviations")->capture_default_str();
    an_cmd->add_option("--trim", an_args.trim, "break test: rounds trimmed at each end")->capture_default_str();
    an_cmd->add_option("--permutations", an_args.permutations, "break test permutations")->capture_default_str();
    an_cmd->add_option("--seed", an_args.seed, "seed of the permutation draws")->capture_default_str();
    an_cmd->add_option("--out,-o", an_args.out, "output prefix for .json and .txt");
    an_cmd->add_flag("--json", an_args.json_stdout, "print JSON instead of text");
    add_config(an_cmd);
    an_cmd->footer("Example:\n  sdgame simulate --seed 3 --network star complete --alpha 0.15 0.65 "
                   "--intervention fine nudge --sessions 4 --out design\n"
                   "  sdgame analyze design --out design_report");

    // serve
    ServeArgs sv_args;
    auto* sv_cmd = app.add_subcommand("serve", "Run the live session server (websocket + /health)");
    sv_cmd->add_option("--address", sv_args.address, "bind address")->capture_default_str();
    sv_cmd->add_option("--port,-p", sv_args.port, "TCP port (0 = any free port)")->capture_default_str();
    sv_cmd->add_option("--log-dir", sv_args.log_dir, "directory for session logs")->capture_default_str();
    sv_cmd->add_option("--threads", sv_args.threads, "I/O threads")->capture_default_str();
    sv_cmd->add_option("--seed", sv_args.seed, "base seed; sessions derive their own")->capture_default_str();
    sv_cmd->add_option("--network,-n", sv_args.network, "network")->capture_default_str();
    sv_cmd->add_option("--alpha,-a", sv_args.alpha, "contagion rate")->capture_default_str();
    sv_cmd->add_option("--intervention", sv_args.intervention, "fine or nudge")->capture_default_str();
    add_game_flags(sv_cmd, sv_args.game, false);
    sv_cmd->add_option("--bot-policy", sv_args.bot_policy, "policy of bot fills")->capture_default_str();
    sv_cmd->add_flag("--no-bot-fill", sv_args.no_bot_fill, "never fill empty seats with bots");
    sv_cmd->add_option("--lobby-wait-ms", sv_args.lobby_wait_ms, "wait before bot fill")->capture_default_str();
    sv_cmd->add_option("--decision-ms", sv_args.decision_ms, "decision deadline")->capture_default_str();
    sv_cmd->add_option("--review-ms", sv_args.review_ms, "result screen time")->capture_default_str();
    sv_cmd->add_option("--briefing-ms", sv_args.briefing_ms, "intervention briefing time")->capture_default_str();
    sv_cmd->add_option("--server-config", sv_args.server_config,
                       "server options JSON (replaces the treatment flags)");
    add_config(sv_cmd);
    sv_cmd->footer("Example:\n  sdgame serve --port 8080 --network star --alpha 0.65 --intervention fine "
                   "--lobby-wait-ms 30000");

    // replay
    ReplayArgs rp_args;
    auto* rp_cmd = app.add_subcommand("replay", "Re-derive a session from its log and verify every record");
    rp_cmd->add_option("log,--log", rp_args.log, "session log (.jsonl)")->required();
    rp_cmd->add_option("--out,-o", rp_args.out, "write the reconstructed report as JSON");
    rp_cmd->add_option("--csv", rp_args.csv, "write the decision CSV");
    add_config(rp_cmd);
    rp_cmd->footer("Example:\n  sdgame simulate --seed 7 --out run7 && sdgame replay run7/star-0.65-fine-1.jsonl");

    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        args = expand_config(app, std::move(args));
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (*solve_cmd) return run_solve(solve_args);
        if (*sweep_cmd) return run_sweep(sweep_args);
        if (*sim_cmd) {
            if (seed_opt->count()) sim_args.seed = seed_value;
            return run_simulate(sim_args);
        }
        if (*an_cmd) return run_analyze(an_args);
        if (*sv_cmd) return run_serve(sv_args);
        if (*rp_cmd) return run_replay(rp_args);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
