#include "s2spm/sgraph.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "s2spm/errors.hpp"
#include "s2spm/rng.hpp"

namespace s2spm {

namespace {

std::uint64_t pair_key(int u, int v) {
    return (static_cast<std::uint64_t>(u) << 32) | static_cast<std::uint32_t>(v);
}

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

std::string strip(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::optional<int> parse_sign(const std::string& raw) {
    const std::string tok = lower(strip(raw));
    if (tok == "+1" || tok == "1" || tok == "up-regulates") return +1;
    if (tok == "-1" || tok == "down-regulates") return -1;
    return std::nullopt;
}

std::vector<std::string> split_fields(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, delim)) out.push_back(field);
    return out;
}

// Components via BFS over an adjacency list.
std::vector<int> component_labels(const SignedGraph& g, int* n_components) {
    std::vector<std::vector<int>> adj(g.n_nodes);
    for (const Edge& e : g.edges) {
        adj[e.u].push_back(e.v);
        adj[e.v].push_back(e.u);
    }
    std::vector<int> label(g.n_nodes, -1);
    int next = 0;
    std::vector<int> queue;
    for (int s = 0; s < g.n_nodes; ++s) {
        if (label[s] != -1) continue;
        label[s] = next;
        queue.assign(1, s);
        while (!queue.empty()) {
            const int u = queue.back();
            queue.pop_back();
            for (int v : adj[u]) {
                if (label[v] == -1) {
                    label[v] = next;
                    queue.push_back(v);
                }
            }
        }
        ++next;
    }
    if (n_components) *n_components = next;
    return label;
}

// Residual connectivity check used by the splitter; edge `skip` is treated
// as removed.
bool connected_without(const std::vector<std::vector<int>>& adj, int n_nodes,
                       const std::vector<char>& removed, int skip_u, int skip_v,
                       const std::vector<std::vector<int>>& edge_index) {
    if (n_nodes <= 1) return true;
    std::vector<char> seen(n_nodes, 0);
    std::vector<int> queue{0};
    seen[0] = 1;
    int reached = 1;
    while (!queue.empty()) {
        const int u = queue.back();
        queue.pop_back();
        for (std::size_t t = 0; t < adj[u].size(); ++t) {
            const int v = adj[u][t];
            const int ei = edge_index[u][t];
            if (removed[ei]) continue;
            const int a = std::min(u, v), b = std::max(u, v);
            if (a == skip_u && b == skip_v) continue;
            if (!seen[v]) {
                seen[v] = 1;
                ++reached;
                queue.push_back(v);
            }
        }
    }
    return reached == n_nodes;
}

}  // namespace

std::size_t SignedGraph::positive_count() const {
    std::size_t c = 0;
    for (const Edge& e : edges) c += e.y > 0;
    return c;
}

std::size_t SignedGraph::negative_count() const {
    std::size_t c = 0;
    for (const Edge& e : edges) c += e.y < 0;
    return c;
}

double SignedGraph::density() const {
    if (n_nodes < 2) return 0.0;
    return 2.0 * static_cast<double>(edges.size()) /
           (static_cast<double>(n_nodes) * (n_nodes - 1));
}

GraphStats graph_stats(const SignedGraph& g) {
    GraphStats s;
    s.n_nodes = g.n_nodes;
    s.n_edges = g.edges.size();
    s.n_positive = g.positive_count();
    s.n_negative = g.negative_count();
    s.density = g.density();
    return s;
}

SignedGraph load_edge_list(const std::string& path, AggregationPolicy policy) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open edge list '" + path + "'", 0);

    SignedGraph g;
    std::unordered_map<std::string, int> index_of;
    auto node_index = [&](const std::string& id) {
        auto [it, inserted] = index_of.try_emplace(id, g.n_nodes);
        if (inserted) {
            g.node_ids.push_back(id);
            ++g.n_nodes;
        }
        return it->second;
    };

    // (u, v) -> (#positive, #negative); ordered map keeps output deterministic.
    std::map<std::pair<int, int>, std::pair<long, long>> counts;

    std::string line;
    long line_no = 0;
    bool saw_data = false;
    bool first_content = true;
    char delim = '\t';
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (strip(line).empty() || line[0] == '#') continue;
        if (first_content) delim = line.find('\t') != std::string::npos ? '\t' : ',';
        const std::vector<std::string> fields = split_fields(line, delim);
        if (fields.size() < 3) {
            if (first_content) {
                first_content = false;
                continue;  // tolerated header
            }
            throw ParseError("expected at least 3 columns", line_no);
        }
        const std::optional<int> sign = parse_sign(fields[2]);
        if (!sign) {
            if (first_content) {
                first_content = false;
                continue;  // header row, sign column is a column name
            }
            throw ParseError("unrecognized sign token '" + strip(fields[2]) + "'", line_no);
        }
        first_content = false;
        const std::string src = strip(fields[0]), dst = strip(fields[1]);
        if (src.empty() || dst.empty()) throw ParseError("empty node id", line_no);
        const int a = node_index(src), b = node_index(dst);
        saw_data = true;
        if (a == b) continue;  // self loops cannot be represented
        const auto key = std::minmax(a, b);
        auto& c = counts[key];
        (*sign > 0 ? c.first : c.second) += 1;
    }
    if (!saw_data) throw EmptyGraphError("edge list '" + path + "' has no data rows");

    for (const auto& [pair, c] : counts) {
        long y = 0;
        if (policy == AggregationPolicy::net_count) {
            y = c.first - c.second;
        } else {
            y = c.first > c.second ? 1 : (c.second > c.first ? -1 : 0);
        }
        if (y != 0) g.edges.push_back({pair.first, pair.second, y});
    }
    return g;
}

SignedGraph largest_connected_component(const SignedGraph& g) {
    if (g.n_nodes == 0) throw EmptyGraphError("cannot take component of an empty graph");
    int n_components = 0;
    const std::vector<int> label = component_labels(g, &n_components);
    std::vector<long> size(n_components, 0);
    for (int u = 0; u < g.n_nodes; ++u) ++size[label[u]];
    // First maximal component in label order wins; labels are assigned by
    // ascending smallest contained index, which encodes the tie rule.
    int best = 0;
    for (int c = 1; c < n_components; ++c) {
        if (size[c] > size[best]) best = c;
    }
    std::vector<int> remap(g.n_nodes, -1);
    SignedGraph out;
    for (int u = 0; u < g.n_nodes; ++u) {
        if (label[u] == best) {
            remap[u] = out.n_nodes++;
            out.node_ids.push_back(g.node_ids[u]);
        }
    }
    for (const Edge& e : g.edges) {
        if (remap[e.u] != -1 && remap[e.v] != -1) {
            out.edges.push_back({remap[e.u], remap[e.v], e.y});
        }
    }
    return out;
}

EdgeSplit split_connectivity_preserving(const SignedGraph& g, double fraction,
                                        double zero_multiplier, std::uint64_t seed) {
    if (g.edges.empty()) throw EmptyGraphError("cannot split a graph with no edges");
    int n_components = 0;
    component_labels(g, &n_components);
    if (n_components != 1) {
        throw InfeasibleSplitError("split requires a connected input graph");
    }
    const std::size_t target = static_cast<std::size_t>(fraction * g.edges.size());

    Rng rng(seed);
    std::vector<std::size_t> order(g.edges.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(order);

    std::vector<std::vector<int>> adj(g.n_nodes), edge_index(g.n_nodes);
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
        const Edge& e = g.edges[i];
        adj[e.u].push_back(e.v);
        edge_index[e.u].push_back(static_cast<int>(i));
        adj[e.v].push_back(e.u);
        edge_index[e.v].push_back(static_cast<int>(i));
    }

    // Removing other edges never turns a bridge into a removable edge, so a
    // single pass over the shuffled order finds a maximal removable set.
    std::vector<char> removed(g.edges.size(), 0);
    std::vector<std::size_t> taken;
    for (std::size_t idx : order) {
        if (taken.size() >= target) break;
        const Edge& e = g.edges[idx];
        if (connected_without(adj, g.n_nodes, removed, e.u, e.v, edge_index)) {
            removed[idx] = 1;
            taken.push_back(idx);
        }
    }
    if (taken.size() < target) {
        throw InfeasibleSplitError(
            "cannot remove " + std::to_string(target) + " edges and stay connected (managed " +
            std::to_string(taken.size()) + ")");
    }

    EdgeSplit split;
    split.fraction = fraction;
    split.zero_multiplier = zero_multiplier;
    split.seed = seed;
    split.train.n_nodes = g.n_nodes;
    split.train.node_ids = g.node_ids;
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
        (removed[i] ? split.test_edges : split.train.edges).push_back(g.edges[i]);
    }
    std::sort(split.test_edges.begin(), split.test_edges.end(),
              [](const Edge& a, const Edge& b) { return std::tie(a.u, a.v) < std::tie(b.u, b.v); });

    std::unordered_set<std::uint64_t> adjacent;
    adjacent.reserve(g.edges.size() * 2);
    for (const Edge& e : g.edges) adjacent.insert(pair_key(e.u, e.v));

    const std::size_t zero_target = static_cast<std::size_t>(zero_multiplier * taken.size());
    const long max_zeros = g.total_pairs() - static_cast<long>(g.edges.size());
    if (static_cast<long>(zero_target) > max_zeros) {
        throw InfeasibleSplitError("not enough non-adjacent pairs for the requested zero sample");
    }
    std::unordered_set<std::uint64_t> chosen;
    while (split.test_zeros.size() < zero_target) {
        const int u = static_cast<int>(rng.next_below(g.n_nodes));
        const int v = static_cast<int>(rng.next_below(g.n_nodes));
        if (u == v) continue;
        const auto [a, b] = std::minmax(u, v);
        const std::uint64_t key = pair_key(a, b);
        if (adjacent.count(key) || chosen.count(key)) continue;
        chosen.insert(key);
        split.test_zeros.emplace_back(a, b);
    }
    return split;
}

PlantedGraph generate_planted(const PlantedConfig& cfg) {
    if (cfg.n_nodes < cfg.k || cfg.k < 1) {
        throw TrainingDataError("planted generator needs n_nodes >= k >= 1");
    }
    Rng rng(cfg.seed);
    PlantedGraph out;

    auto draw_space = [&](Eigen::MatrixXd& member, std::vector<int>& corner) {
        member.resize(cfg.k, cfg.n_nodes);
        corner.resize(cfg.n_nodes);
        for (int i = 0; i < cfg.n_nodes; ++i) {
            corner[i] = static_cast<int>(rng.next_below(cfg.k));
            Eigen::VectorXd logit(cfg.k);
            for (int d = 0; d < cfg.k; ++d) logit(d) = cfg.noise_sigma * rng.next_normal();
            logit(corner[i]) += cfg.corner_strength;
            const double m = logit.maxCoeff();
            Eigen::VectorXd e = (logit.array() - m).exp();
            member.col(i) = e / e.sum();
        }
    };
    draw_space(out.membership_pos, out.corner_pos);
    draw_space(out.membership_neg, out.corner_neg);

    out.graph.n_nodes = cfg.n_nodes;
    out.graph.node_ids.resize(cfg.n_nodes);
    for (int i = 0; i < cfg.n_nodes; ++i) out.graph.node_ids[i] = "n" + std::to_string(i);

    for (int i = 0; i < cfg.n_nodes; ++i) {
        for (int j = i + 1; j < cfg.n_nodes; ++j) {
            const double dp =
                cfg.archetype_scale * (out.membership_pos.col(i) - out.membership_pos.col(j)).norm();
            const double dn =
                cfg.archetype_scale * (out.membership_neg.col(i) - out.membership_neg.col(j)).norm();
            const double lp = std::exp(2.0 * cfg.bias - dp);
            const double ln_rate = std::exp(2.0 * cfg.bias - dn);
            const long y = rng.next_poisson(lp) - rng.next_poisson(ln_rate);
            if (y != 0) out.graph.edges.push_back({i, j, y});
        }
    }
    return out;
}

void save_graph_json(const SignedGraph& g, const std::string& path) {
    nlohmann::json j;
    j["format"] = "s2spm-graph";
    j["version"] = 1;
    j["n_nodes"] = g.n_nodes;
    j["nodes"] = g.node_ids;
    auto& edges = j["edges"] = nlohmann::json::array();
    for (const Edge& e : g.edges) edges.push_back({e.u, e.v, e.y});
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write graph file '" + path + "'", 0);
    out << j.dump(1) << "\n";
}

SignedGraph load_graph_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open graph file '" + path + "'", 0);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid graph JSON: ") + e.what(), 0);
    }
    if (j.value("format", "") != "s2spm-graph") {
        throw ParseError("not a graph file: '" + path + "'", 0);
    }
    SignedGraph g;
    g.n_nodes = j.at("n_nodes").get<int>();
    g.node_ids = j.at("nodes").get<std::vector<std::string>>();
    for (const auto& e : j.at("edges")) {
        g.edges.push_back({e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<long>()});
    }
    return g;
}

void save_split_json(const EdgeSplit& split, const std::string& path) {
    const auto& ids = split.train.node_ids;
    nlohmann::json j;
    j["format"] = "s2spm-split";
    j["version"] = 1;
    j["seed"] = split.seed;
    j["fraction"] = split.fraction;
    j["zero_multiplier"] = split.zero_multiplier;
    j["nodes"] = ids;
    auto dump_edges = [&](const std::vector<Edge>& es) {
        nlohmann::json arr = nlohmann::json::array();
        for (const Edge& e : es) arr.push_back({ids[e.u], ids[e.v], e.y});
        return arr;
    };
    j["train_edges"] = dump_edges(split.train.edges);
    j["test_edges"] = dump_edges(split.test_edges);
    auto& zeros = j["test_zeros"] = nlohmann::json::array();
    for (const auto& [u, v] : split.test_zeros) zeros.push_back({ids[u], ids[v]});
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write split file '" + path + "'", 0);
    out << j.dump(1) << "\n";
}

EdgeSplit load_split_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open split file '" + path + "'", 0);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid split JSON: ") + e.what(), 0);
    }
    if (j.value("format", "") != "s2spm-split") {
        throw ParseError("not a split file: '" + path + "'", 0);
    }
    EdgeSplit split;
    split.seed = j.at("seed").get<std::uint64_t>();
    split.fraction = j.at("fraction").get<double>();
    split.zero_multiplier = j.at("zero_multiplier").get<double>();
    split.train.node_ids = j.at("nodes").get<std::vector<std::string>>();
    split.train.n_nodes = static_cast<int>(split.train.node_ids.size());
    std::unordered_map<std::string, int> index_of;
    for (int i = 0; i < split.train.n_nodes; ++i) index_of[split.train.node_ids[i]] = i;
    auto node = [&](const nlohmann::json& v) {
        const auto it = index_of.find(v.get<std::string>());
        if (it == index_of.end()) throw ParseError("split references unknown node id", 0);
        return it->second;
    };
    for (const auto& e : j.at("train_edges")) {
        split.train.edges.push_back({node(e.at(0)), node(e.at(1)), e.at(2).get<long>()});
    }
    for (const auto& e : j.at("test_edges")) {
        split.test_edges.push_back({node(e.at(0)), node(e.at(1)), e.at(2).get<long>()});
    }
    for (const auto& z : j.at("test_zeros")) {
        split.test_zeros.emplace_back(node(z.at(0)), node(z.at(1)));
    }
    return split;
}

}  // namespace s2spm
