#include "sdgame/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "sdgame/format.hpp"

namespace sdgame {

namespace {

void check_solver_size(const Network& net) {
    if (net.node_count() > kMaxSolverNodes)
        throw std::length_error("equilibrium enumeration supports at most 20 nodes");
}

// Expected payoffs of every agent under every profile, indexed by mask.
class PayoffCache {
public:
    PayoffCache(const Network& net, const GameParams& params) : n_(net.node_count()) {
        check_solver_size(net);
        const std::size_t count = std::size_t{1} << n_;
        payoffs_.resize(count);
        for (std::uint64_t m = 0; m < count; ++m)
            payoffs_[m] = expected_payoffs(net, DistancingProfile::from_mask(n_, m), params);
    }

    const std::vector<double>& at(std::uint64_t mask) const { return payoffs_[mask]; }
    std::size_t profile_count() const { return payoffs_.size(); }
    std::size_t node_count() const { return n_; }

    double welfare(std::uint64_t mask) const {
        double w = 0.0;
        for (double x : payoffs_[mask]) w += x;
        return w;
    }

    bool is_equilibrium(std::uint64_t mask) const {
        for (NodeId i = 0; i < n_; ++i) {
            const double current = payoffs_[mask][i];
            const double deviation = payoffs_[mask ^ (std::uint64_t{1} << i)][i];
            if (deviation > current + kPayoffTolerance) return false;
        }
        return true;
    }

private:
    std::size_t n_;
    std::vector<std::vector<double>> payoffs_;
};

std::vector<DistancingProfile> sorted(std::vector<DistancingProfile> v) {
    std::sort(v.begin(), v.end());
    return v;
}

std::vector<DistancingProfile> equilibria_of(const PayoffCache& cache) {
    std::vector<DistancingProfile> out;
    for (std::uint64_t m = 0; m < cache.profile_count(); ++m)
        if (cache.is_equilibrium(m)) out.push_back(DistancingProfile::from_mask(cache.node_count(), m));
    return sorted(std::move(out));
}

std::pair<std::vector<DistancingProfile>, double> efficient_of(const PayoffCache& cache) {
    double best = -INFINITY;
    for (std::uint64_t m = 0; m < cache.profile_count(); ++m) best = std::max(best, cache.welfare(m));
    std::vector<DistancingProfile> out;
    for (std::uint64_t m = 0; m < cache.profile_count(); ++m)
        if (cache.welfare(m) >= best - kPayoffTolerance)
            out.push_back(DistancingProfile::from_mask(cache.node_count(), m));
    return {sorted(std::move(out)), best};
}

std::string summarize(const Network& net, const std::vector<DistancingProfile>& profiles) {
    if (profiles.empty()) return "-";
    std::set<std::string> patterns;
    for (const auto& p : profiles) patterns.insert(role_pattern(net, p));
    std::string out;
    for (const auto& s : patterns) {
        if (!out.empty()) out += ';';
        out += s;
    }
    return out;
}

std::set<std::string> pattern_set(const Network& net, const std::vector<DistancingProfile>& profiles) {
    std::set<std::string> patterns;
    for (const auto& p : profiles) patterns.insert(role_pattern(net, p));
    return patterns;
}

nlohmann::json profiles_json(const Network& net, const std::vector<DistancingProfile>& profiles) {
    auto arr = nlohmann::json::array();
    for (const auto& p : profiles)
        arr.push_back({{"members", p.members()}, {"labels", p.to_string(net)}, {"pattern", role_pattern(net, p)}});
    return arr;
}

}  // namespace

DeviationPayoffs deviation_payoffs(const Network& net, const DistancingProfile& others, NodeId i,
                                   const GameParams& params) {
    if (others.size() != net.node_count())
        throw std::invalid_argument("profile length does not match node count");
    const double n = static_cast<double>(net.node_count());
    DeviationPayoffs d;
    d.distance = (1.0 - params.gamma / n) * params.benefit - params.cost;
    d.stay = (1.0 - infection_probability(net, others.with(i, false), i, params)) * params.benefit - params.fine;
    return d;
}

bool best_response(const Network& net, const DistancingProfile& others, NodeId i, const GameParams& params) {
    auto d = deviation_payoffs(net, others, i, params);
    return d.distance >= d.stay;
}

bool is_equilibrium(const Network& net, const DistancingProfile& profile, const GameParams& params) {
    for (NodeId i = 0; i < net.node_count(); ++i) {
        auto d = deviation_payoffs(net, profile, i, params);
        const double current = profile[i] ? d.distance : d.stay;
        const double deviation = profile[i] ? d.stay : d.distance;
        if (deviation > current + kPayoffTolerance) return false;
    }
    return true;
}

std::vector<DistancingProfile> enumerate_equilibria(const Network& net, const GameParams& params) {
    return equilibria_of(PayoffCache(net, params));
}

std::vector<DistancingProfile> enumerate_efficient(const Network& net, const GameParams& params) {
    return efficient_of(PayoffCache(net, params)).first;
}

EquilibriumReport solve(const Network& net, const GameParams& params) {
    PayoffCache cache(net, params);
    EquilibriumReport r;
    r.network = net;
    r.params = params;
    r.equilibria = equilibria_of(cache);
    std::tie(r.efficient, r.max_welfare) = efficient_of(cache);
    for (std::uint64_t m = 0; m < cache.profile_count(); ++m)
        r.welfare.push_back({DistancingProfile::from_mask(net.node_count(), m), cache.welfare(m)});
    return r;
}

std::string role_pattern(const Network& net, const DistancingProfile& profile) {
    if (profile.count() == 0) return "none";
    std::map<NodeRole, std::size_t> counts;
    std::vector<std::string> others;
    for (auto v : profile.members()) {
        auto role = node_role(net, v);
        if (role == NodeRole::Other)
            others.push_back(net.label(v));
        else
            ++counts[role];
    }
    std::string out;
    auto append = [&out](std::size_t k, const char* tag) {
        if (k == 0) return;
        if (!out.empty()) out += '+';
        if (k > 1) out += std::to_string(k);
        out += tag;
    };
    append(counts[NodeRole::Superspreader], "S");
    append(counts[NodeRole::CloseKnit], "C");
    append(counts[NodeRole::Peripheral], "P");
    if (!others.empty()) {
        if (!out.empty()) out += '+';
        out += '{';
        for (std::size_t k = 0; k < others.size(); ++k) out += (k ? "," : "") + others[k];
        out += '}';
    }
    return out;
}

nlohmann::json EquilibriumReport::to_json() const {
    auto welfare_json = nlohmann::json::array();
    for (const auto& w : welfare)
        welfare_json.push_back({{"members", w.profile.members()}, {"welfare", w.welfare}});
    return {{"network", network_to_json(network)},
            {"params", params_to_json(params)},
            {"equilibria", profiles_json(network, equilibria)},
            {"efficient", profiles_json(network, efficient)},
            {"max_welfare", max_welfare},
            {"welfare", welfare_json}};
}

std::string EquilibriumReport::to_table() const {
    std::ostringstream os;
    os << "network: " << network.kind() << " (n=" << network.node_count() << ")  alpha=" << format_double(params.alpha)
       << "  b=" << format_double(params.benefit) << "  c=" << format_double(params.cost)
       << "  gamma=" << format_double(params.gamma) << "  fine=" << format_double(params.fine) << "\n";
    auto section = [&](const char* title, const std::vector<DistancingProfile>& list) {
        os << title << " (" << list.size() << "):\n";
        for (const auto& p : list) {
            double w = 0.0;
            for (const auto& pw : welfare)
                if (pw.profile == p) w = pw.welfare;
            os << "  " << p.to_string(network) << "  [" << role_pattern(network, p) << "]  welfare "
               << format_fixed(w, 4) << "\n";
        }
    };
    section("Nash equilibria", equilibria);
    section("Efficient profiles", efficient);
    return os.str();
}

std::string RegionCell::equilibrium_summary(const Network& net) const { return summarize(net, equilibria); }
std::string RegionCell::efficient_summary(const Network& net) const { return summarize(net, efficient); }

std::optional<double> RegionTable::first_alpha_with_equilibrium(const std::string& network,
                                                                const std::string& pattern) const {
    for (std::size_t k = 0; k < networks.size(); ++k) {
        if (networks[k].name != network) continue;
        for (std::size_t a = 0; a < alphas.size(); ++a)
            if (pattern_set(networks[k].network, cells[k][a].equilibria).count(pattern)) return alphas[a];
    }
    return std::nullopt;
}

std::optional<double> RegionTable::equilibrium_entry_boundary(const std::string& network,
                                                              const std::string& pattern) const {
    for (std::size_t k = 0; k < networks.size(); ++k) {
        if (networks[k].name != network) continue;
        for (std::size_t a = 0; a < alphas.size(); ++a) {
            if (!pattern_set(networks[k].network, cells[k][a].equilibria).count(pattern)) continue;
            if (a == 0) return alphas[0];
            return 0.5 * (alphas[a - 1] + alphas[a]);
        }
    }
    return std::nullopt;
}

std::string RegionTable::to_csv() const {
    std::ostringstream os;
    os << "alpha,network,equilibria,efficient,equilibrium_count,efficient_count,max_welfare\n";
    for (std::size_t a = 0; a < alphas.size(); ++a)
        for (std::size_t k = 0; k < networks.size(); ++k) {
            const auto& cell = cells[k][a];
            const auto& net = networks[k].network;
            os << format_double(alphas[a]) << ',' << networks[k].name << ',' << cell.equilibrium_summary(net) << ','
               << cell.efficient_summary(net) << ',' << cell.equilibria.size() << ',' << cell.efficient.size() << ','
               << format_fixed(cell.max_welfare, 6) << '\n';
        }
    return os.str();
}

nlohmann::json RegionTable::to_json() const {
    nlohmann::json j;
    j["params"] = params_to_json(params);
    j["alphas"] = alphas;
    auto nets = nlohmann::json::array();
    for (std::size_t k = 0; k < networks.size(); ++k) {
        const auto& net = networks[k].network;
        auto rows = nlohmann::json::array();
        for (std::size_t a = 0; a < alphas.size(); ++a) {
            const auto& cell = cells[k][a];
            rows.push_back({{"alpha", alphas[a]},
                            {"equilibria", profiles_json(net, cell.equilibria)},
                            {"efficient", profiles_json(net, cell.efficient)},
                            {"max_welfare", cell.max_welfare}});
        }
        nets.push_back({{"name", networks[k].name}, {"network", network_to_json(net)}, {"grid", rows}});
    }
    j["networks"] = nets;
    auto bounds = nlohmann::json::array();
    for (const auto& b : boundaries)
        bounds.push_back({{"network", b.network}, {"kind", b.kind}, {"alpha", b.alpha}, {"lower", b.lower},
                          {"upper", b.upper}, {"before", b.before}, {"after", b.after}});
    j["boundaries"] = bounds;
    return j;
}

std::string RegionTable::to_ascii_chart(std::size_t columns) const {
    std::ostringstream os;
    if (alphas.empty() || columns < 2) return {};
    auto nearest = [this](double x) {
        auto it = std::lower_bound(alphas.begin(), alphas.end(), x);
        if (it == alphas.end()) return alphas.size() - 1;
        auto idx = static_cast<std::size_t>(it - alphas.begin());
        if (idx > 0 && x - alphas[idx - 1] < *it - x) --idx;
        return idx;
    };
    for (std::size_t k = 0; k < networks.size(); ++k) {
        const auto& net = networks[k].network;
        const auto n = net.node_count();
        os << networks[k].name << "  (rows: number of distancing agents; E equilibrium, O efficient, * both)\n";
        for (std::size_t level = n + 1; level-- > 0;) {
            os << (level < 10 ? " " : "") << level << " |";
            for (std::size_t c = 0; c < columns; ++c) {
                const double x = alphas.front() + (alphas.back() - alphas.front()) * static_cast<double>(c) /
                                                      static_cast<double>(columns - 1);
                const auto& cell = cells[k][nearest(x)];
                bool eq = std::any_of(cell.equilibria.begin(), cell.equilibria.end(),
                                      [level](const auto& p) { return p.count() == level; });
                bool ef = std::any_of(cell.efficient.begin(), cell.efficient.end(),
                                      [level](const auto& p) { return p.count() == level; });
                os << (eq && ef ? '*' : eq ? 'E' : ef ? 'O' : ' ');
            }
            os << "\n";
        }
        os << "   +" << std::string(columns, '-') << "\n";
        std::string axis(columns + 4, ' ');
        auto lo = format_fixed(alphas.front(), 2);
        auto hi = format_fixed(alphas.back(), 2);
        axis.replace(4, lo.size(), lo);
        axis.replace(axis.size() - hi.size(), hi.size(), hi);
        os << axis << "  alpha\n\n";
    }
    return os.str();
}

std::vector<double> alpha_grid(double step) {
    if (!(step > 0.0 && step <= 1.0)) throw std::domain_error("grid step must lie in (0, 1]");
    const auto count = static_cast<std::size_t>(std::llround(1.0 / step));
    std::vector<double> grid;
    for (std::size_t k = 0; k <= count; ++k) {
        const double a = std::min(1.0, static_cast<double>(k) * step);
        // Snap to the decimal grid so 0.725 prints as 0.725.
        grid.push_back(std::round(a * 1e9) / 1e9);
    }
    if (grid.back() < 1.0) grid.push_back(1.0);
    return grid;
}

RegionTable sweep_alpha(const std::vector<NamedNetwork>& networks, const GameParams& params,
                        const std::vector<double>& grid, unsigned threads) {
    if (grid.empty()) throw std::domain_error("alpha grid is empty");
    for (std::size_t a = 0; a < grid.size(); ++a) {
        if (!(grid[a] >= 0.0 && grid[a] <= 1.0)) throw std::domain_error("alpha grid must lie in [0, 1]");
        if (a > 0 && !(grid[a] > grid[a - 1])) throw std::domain_error("alpha grid must be strictly increasing");
    }
    for (const auto& nn : networks) check_solver_size(nn.network);

    RegionTable table;
    table.alphas = grid;
    table.networks = networks;
    table.params = params;
    table.cells.assign(networks.size(), std::vector<RegionCell>(grid.size()));

    const std::size_t jobs = networks.size() * grid.size();
    auto work = [&](std::size_t job) {
        const auto k = job / grid.size();
        const auto a = job % grid.size();
        PayoffCache cache(networks[k].network, params.with_alpha(grid[a]));
        auto& cell = table.cells[k][a];
        cell.equilibria = equilibria_of(cache);
        std::tie(cell.efficient, cell.max_welfare) = efficient_of(cache);
    };
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, jobs));
    if (threads <= 1) {
        for (std::size_t j = 0; j < jobs; ++j) work(j);
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back([&, t] {
                for (std::size_t j = t; j < jobs; j += threads) work(j);
            });
        for (auto& th : pool) th.join();
    }

    for (std::size_t k = 0; k < networks.size(); ++k) {
        const auto& net = networks[k].network;
        for (std::size_t a = 1; a < grid.size(); ++a) {
            const auto& prev = table.cells[k][a - 1];
            const auto& cur = table.cells[k][a];
            auto add = [&](const char* kind, std::string before, std::string after) {
                if (before == after) return;
                table.boundaries.push_back({networks[k].name, kind, 0.5 * (grid[a - 1] + grid[a]), grid[a - 1],
                                            grid[a], std::move(before), std::move(after)});
            };
            add("equilibrium", prev.equilibrium_summary(net), cur.equilibrium_summary(net));
            add("efficient", prev.efficient_summary(net), cur.efficient_summary(net));
        }
    }
    return table;
}

RegionTable sweep_alpha(const Network& net, const GameParams& params, const std::vector<double>& grid) {
    return sweep_alpha({{net.kind(), net}}, params, grid, 1);
}

}  // namespace sdgame
