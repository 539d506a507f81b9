// Native half of the Python package. Structured values cross the boundary
// as JSON text; sdgame/__init__.py wraps each entry point.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "sdgame/analysis/convergence.hpp"
#include "sdgame/analysis/report.hpp"
#include "sdgame/analysis/structural_break.hpp"
#include "sdgame/analysis/tests.hpp"
#include "sdgame/contagion.hpp"
#include "sdgame/equilibrium.hpp"
#include "sdgame/session.hpp"

#ifdef SDGAME_WITH_SERVER
#include "sdgame/server/protocol.hpp"
#include "sdgame/server/simulated_host.hpp"
#endif

namespace py = pybind11;
using nlohmann::json;
using namespace sdgame;

namespace {

Network net_of(const std::string& j) { return network_from_json(json::parse(j)); }
GameParams params_of(const std::string& j) { return params_from_json(json::parse(j)); }

DistancingProfile profile_of(const Network& net, const std::vector<NodeId>& members) {
    DistancingProfile p(net.node_count());
    for (auto v : members) {
        if (v >= net.node_count()) throw py::index_error("node out of range");
        p.set(v, true);
    }
    return p;
}

std::string solve_json(const std::string& net, const std::string& params) {
    return solve(net_of(net), params_of(params)).to_json().dump();
}

std::vector<double> infection_probs(const std::string& net, const std::vector<NodeId>& distancing,
                                    const std::string& params) {
    const auto n = net_of(net);
    return infection_probabilities(n, profile_of(n, distancing), params_of(params));
}

double reliability(const std::string& net, const std::vector<bool>& open, NodeId s, NodeId t, double alpha) {
    return two_terminal_reliability(net_of(net), open, s, t, alpha);
}

std::string sweep_json(const std::vector<std::string>& names, const std::vector<std::string>& nets,
                       const std::string& params, double step) {
    std::vector<NamedNetwork> named;
    for (std::size_t i = 0; i < nets.size(); ++i) named.push_back({names.at(i), net_of(nets[i])});
    const auto table = sweep_alpha(named, params_of(params), alpha_grid(step));
    auto j = table.to_json();
    j["csv"] = table.to_csv();
    j["chart"] = table.to_ascii_chart();
    return j.dump();
}

std::string simulate_jsonl(const std::string& config, const std::vector<std::string>& policies,
                           std::uint64_t seed) {
    const auto cfg = config_from_json(json::parse(config));
    std::vector<AgentPolicy> pol;
    for (const auto& p : policies) pol.push_back(policy_from_json(json::parse(p)));
    if (pol.size() == 1) pol.resize(cfg.network.node_count(), pol.front());
    py::gil_scoped_release release;
    return run_session_sim(cfg, pol, seed).to_jsonl();
}

std::string replay_json(const std::string& jsonl) {
    const auto r = replay(SessionLog::from_jsonl(jsonl));
    json out;
    out["session_id"] = r.config.session_id;
    out["seed"] = r.seed;
    out["finished"] = r.finished;
    out["rounds"] = json::array();
    for (const auto& o : r.rounds) out["rounds"].push_back(o.to_json());
    out["disqualified"] = r.disqualified;
    out["payments"] = json::array();
    for (const auto& p : r.payments) out["payments"].push_back(p.to_json());
    return out.dump();
}

std::string decision_csv_of(const std::string& jsonl) { return decision_csv(SessionLog::from_jsonl(jsonl)); }

std::string analyze_json(const std::vector<std::string>& logs, int first, int last, int k, int a,
                         int permutations, std::uint64_t seed) {
    analysis::DecisionPanel panel;
    for (const auto& l : logs) panel.add_log(SessionLog::from_jsonl(l));
    analysis::AnalyzeOptions opts;
    opts.window = {first, last};
    opts.k = k;
    opts.a = a;
    opts.breaks.permutations = permutations;
    opts.breaks.seed = seed;
    py::gil_scoped_release release;
    return analysis::analyze_panel(panel, opts).to_json().dump();
}

std::string mw_json(const std::vector<double>& x, const std::vector<double>& y, const std::string& alt) {
    return analysis::mann_whitney_u(x, y, analysis::alternative_from_string(alt)).to_json().dump();
}

std::string wsr_json(const std::vector<double>& x, const std::vector<double>& y, const std::string& alt) {
    return analysis::wilcoxon_signed_rank(x, y, analysis::alternative_from_string(alt)).to_json().dump();
}

std::string t_json(const std::vector<double>& x, const std::vector<double>& y, bool paired, const std::string& alt) {
    return analysis::t_test(x, y, paired, analysis::alternative_from_string(alt)).to_json().dump();
}

std::string convergence_json(const std::vector<bool>& decisions, const std::vector<std::string>& roles, int k,
                             int a) {
    std::vector<NodeRole> r;
    for (const auto& s : roles) r.push_back(analysis::node_role_from_string(s));
    auto d = std::make_unique<bool[]>(decisions.size());
    std::copy(decisions.begin(), decisions.end(), d.get());
    return analysis::detect_convergence({d.get(), decisions.size()}, r, k, a).to_json().dump();
}

std::string break_json(const std::vector<double>& series, int trim, int permutations, std::uint64_t seed) {
    analysis::BreakOptions o;
    o.trim = trim;
    o.permutations = permutations;
    o.seed = seed;
    return analysis::sup_wald_break(series, o).to_json().dump();
}

#ifdef SDGAME_WITH_SERVER
std::string parse_message(const std::string& text) {
    return json::parse(server::encode(server::parse_client_message(text))).dump();
}

// Five scripted clients playing one live-protocol session on a simulated clock.
std::string run_scripted(const std::string& options, std::uint64_t seed, std::size_t clients,
                         std::uint64_t client_seed) {
    const auto opts = server::options_from_json(json::parse(options));
    std::vector<server::ScriptedClient> cl(clients);
    for (std::size_t i = 0; i < clients; ++i) {
        cl[i].name = "client-" + std::to_string(i + 1);
        cl[i].join_at_ms = static_cast<std::int64_t>(i) * 250;
        cl[i].think_ms = 800 + static_cast<std::int64_t>(i) * 300;
    }
    py::gil_scoped_release release;
    const auto run = server::run_simulated_session(opts, server::session_id("py", 0), seed, cl, client_seed);
    json out;
    out["log"] = run.log_jsonl;
    out["phase"] = server::to_string(run.final_state.phase);
    out["end_ms"] = run.end_ms;
    out["received"] = run.received;
    return out.dump();
}
#endif

}  // namespace

PYBIND11_MODULE(_sdgame, m) {
    m.doc() = "native core of the sdgame package";

    // Library errors map onto the usual Python exceptions.
    py::register_exception<LogError>(m, "LogError", PyExc_ValueError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const json::exception& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        }
    });

    m.def("solve", &solve_json, py::arg("network"), py::arg("params"));
    m.def("infection_probabilities", &infection_probs, py::arg("network"), py::arg("distancing"), py::arg("params"));
    m.def("two_terminal_reliability", &reliability, py::arg("network"), py::arg("open_nodes"), py::arg("source"),
          py::arg("target"), py::arg("alpha"));
    m.def("sweep", &sweep_json, py::arg("names"), py::arg("networks"), py::arg("params"), py::arg("step"));
    m.def("simulate", &simulate_jsonl, py::arg("config"), py::arg("policies"), py::arg("seed"));
    m.def("replay", &replay_json, py::arg("log"));
    m.def("decision_csv", &decision_csv_of, py::arg("log"));
    m.def("analyze", &analyze_json, py::arg("logs"), py::arg("first"), py::arg("last"), py::arg("k"), py::arg("a"),
          py::arg("permutations"), py::arg("seed"));
    m.def("mann_whitney_u", &mw_json, py::arg("x"), py::arg("y"), py::arg("alternative"));
    m.def("wilcoxon_signed_rank", &wsr_json, py::arg("x"), py::arg("y"), py::arg("alternative"));
    m.def("t_test", &t_json, py::arg("x"), py::arg("y"), py::arg("paired"), py::arg("alternative"));
    m.def("detect_convergence", &convergence_json, py::arg("decisions"), py::arg("roles"), py::arg("k"),
          py::arg("a"));
    m.def("sup_wald_break", &break_json, py::arg("series"), py::arg("trim"), py::arg("permutations"),
          py::arg("seed"));
#ifdef SDGAME_WITH_SERVER
    m.def("parse_client_message", &parse_message, py::arg("text"));
    m.def("run_scripted_session", &run_scripted, py::arg("options"), py::arg("seed"), py::arg("clients"),
          py::arg("client_seed"));
    m.attr("has_server") = true;
#else
    m.attr("has_server") = false;
#endif
}
