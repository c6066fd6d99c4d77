#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <doctest.h>

#include "s2spm/errors.hpp"
#include "s2spm/sgraph.hpp"

using namespace s2spm;

namespace {

std::string data_path(const char* name) {
    return std::string(S2SPM_TEST_DATA_DIR) + "/" + name;
}

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& content, const char* name) {
        path = std::string("s2spm_test_") + name;
        std::ofstream out(path, std::ios::binary);
        out << content;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

bool is_connected(const SignedGraph& g) {
    if (g.n_nodes == 0) return false;
    std::vector<std::vector<int>> adj(g.n_nodes);
    for (const Edge& e : g.edges) {
        adj[e.u].push_back(e.v);
        adj[e.v].push_back(e.u);
    }
    std::vector<char> seen(g.n_nodes, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int reached = 1;
    while (!stack.empty()) {
        const int u = stack.back();
        stack.pop_back();
        for (int v : adj[u]) {
            if (!seen[v]) {
                seen[v] = 1;
                ++reached;
                stack.push_back(v);
            }
        }
    }
    return reached == g.n_nodes;
}

}  // namespace

TEST_SUITE("sgraph") {

TEST_CASE("sample file parses with net count aggregation") {
    const SignedGraph g = load_edge_list(data_path("sample_edges.tsv"));
    CHECK(g.n_nodes == 10);
    const std::vector<std::string> want_ids = {"P1", "P2", "P3", "P4", "P5",
                                               "P6", "P7", "P8", "P9", "P10"};
    CHECK(g.node_ids == want_ids);

    // P1-P2 twice positive, P3-P4 nets +1, the P8-P10 conflict cancels out.
    REQUIRE(g.edges.size() == 5);
    CHECK(g.edges[0].u == 0);
    CHECK(g.edges[0].v == 1);
    CHECK(g.edges[0].y == 2);
    CHECK(g.edges[1].u == 2);
    CHECK(g.edges[1].v == 3);
    CHECK(g.edges[1].y == 1);
    CHECK(g.edges[2].u == 4);
    CHECK(g.edges[2].v == 5);
    CHECK(g.edges[2].y == -1);
    CHECK(g.edges[3].u == 5);
    CHECK(g.edges[3].v == 6);
    CHECK(g.edges[3].y == -1);
    CHECK(g.edges[4].u == 7);
    CHECK(g.edges[4].v == 8);
    CHECK(g.edges[4].y == 1);

    CHECK(g.positive_count() == 3);
    CHECK(g.negative_count() == 2);
    CHECK(g.density() == doctest::Approx(2.0 * 5 / (10.0 * 9)).epsilon(1e-12));
    CHECK(g.total_pairs() == 45);

    const GraphStats stats = graph_stats(g);
    CHECK(stats.n_nodes == 10);
    CHECK(stats.n_edges == 5);
    CHECK(stats.n_positive == 3);
    CHECK(stats.n_negative == 2);
}

TEST_CASE("majority sign collapses repeats to one unit") {
    const SignedGraph g =
        load_edge_list(data_path("sample_edges.tsv"), AggregationPolicy::majority_sign);
    REQUIRE(g.edges.size() == 5);
    CHECK(g.edges[0].y == 1);  // net_count would say 2
    CHECK(g.edges[1].y == 1);
    CHECK(g.edges[2].y == -1);
}

TEST_CASE("comma delimiter, crlf endings, and headers are tolerated") {
    const TempFile f("source,target,sign\r\nA,B,+1\r\nB,C,-1\r\n", "crlf.csv");
    const SignedGraph g = load_edge_list(f.path);
    CHECK(g.n_nodes == 3);
    REQUIRE(g.edges.size() == 2);
    CHECK(g.edges[0].y == 1);
    CHECK(g.edges[1].y == -1);
}

TEST_CASE("headerless files keep their first row") {
    const TempFile f("A\tB\t+1\nC\tD\t-1\n", "noheader.tsv");
    const SignedGraph g = load_edge_list(f.path);
    CHECK(g.n_nodes == 4);
    CHECK(g.edges.size() == 2);
}

TEST_CASE("parse failures carry line numbers") {
    SUBCASE("unknown sign token") {
        const TempFile f("A\tB\t+1\nC\tD\tmaybe\n", "badsign.tsv");
        try {
            load_edge_list(f.path);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line() == 2);
        }
    }
    SUBCASE("short row after data") {
        const TempFile f("A\tB\t+1\nC\tD\n", "short.tsv");
        CHECK_THROWS_AS(load_edge_list(f.path), ParseError);
    }
    SUBCASE("empty node id") {
        const TempFile f("A\tB\t+1\n\tD\t-1\n", "emptyid.tsv");
        CHECK_THROWS_AS(load_edge_list(f.path), ParseError);
    }
    SUBCASE("missing file") { CHECK_THROWS_AS(load_edge_list("no_such_file"), ParseError); }
    SUBCASE("no data rows") {
        const TempFile f("# only comments\nsource\ttarget\tsign\n", "empty.tsv");
        CHECK_THROWS_AS(load_edge_list(f.path), EmptyGraphError);
    }
}

TEST_CASE("largest component keeps the biggest piece and reindexes in order") {
    const SignedGraph g = load_edge_list(data_path("sample_edges.tsv"));
    const SignedGraph lcc = largest_connected_component(g);
    CHECK(lcc.n_nodes == 3);
    const std::vector<std::string> want = {"P5", "P6", "P7"};
    CHECK(lcc.node_ids == want);
    REQUIRE(lcc.edges.size() == 2);
    CHECK(lcc.edges[0].u == 0);
    CHECK(lcc.edges[0].v == 1);
    CHECK(lcc.edges[1].u == 1);
    CHECK(lcc.edges[1].v == 2);
    CHECK(is_connected(lcc));
}

TEST_CASE("component size ties break to the smallest original index") {
    const TempFile f("C\tD\t+1\nA\tB\t-1\n", "tie.tsv");
    const SignedGraph lcc = largest_connected_component(load_edge_list(f.path));
    CHECK(lcc.n_nodes == 2);
    CHECK(lcc.node_ids[0] == "C");  // C appeared first
}

TEST_CASE("planted generator is deterministic and well formed") {
    PlantedConfig cfg;
    cfg.n_nodes = 100;
    cfg.k = 3;
    cfg.seed = 11;
    const PlantedGraph a = generate_planted(cfg);
    const PlantedGraph b = generate_planted(cfg);

    CHECK(a.graph.n_nodes == 100);
    CHECK(a.graph.node_ids[0] == "n0");
    CHECK(a.graph.node_ids[99] == "n99");
    CHECK(a.membership_pos.rows() == 3);
    CHECK(a.membership_pos.cols() == 100);
    for (int i = 0; i < 100; ++i) {
        CHECK(a.membership_pos.col(i).sum() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(a.membership_pos.col(i).minCoeff() >= 0.0);
        CHECK(a.corner_pos[i] >= 0);
        CHECK(a.corner_pos[i] < 3);
    }
    CHECK(a.graph.positive_count() > 0);
    CHECK(a.graph.negative_count() > 0);
    for (const Edge& e : a.graph.edges) {
        CHECK(e.u < e.v);
        CHECK(e.y != 0);
    }

    REQUIRE(a.graph.edges.size() == b.graph.edges.size());
    for (std::size_t i = 0; i < a.graph.edges.size(); ++i) {
        CHECK(a.graph.edges[i].y == b.graph.edges[i].y);
    }

    cfg.seed = 12;
    const PlantedGraph c = generate_planted(cfg);
    bool differs = a.graph.edges.size() != c.graph.edges.size();
    for (std::size_t i = 0; !differs && i < a.graph.edges.size(); ++i) {
        differs = a.graph.edges[i].u != c.graph.edges[i].u ||
                  a.graph.edges[i].v != c.graph.edges[i].v ||
                  a.graph.edges[i].y != c.graph.edges[i].y;
    }
    CHECK(differs);
}

TEST_CASE("split preserves connectivity and accounts for every edge") {
    PlantedConfig cfg;
    cfg.n_nodes = 80;
    cfg.k = 2;
    cfg.seed = 5;
    const SignedGraph g = largest_connected_component(generate_planted(cfg).graph);
    REQUIRE(is_connected(g));

    const EdgeSplit split = split_connectivity_preserving(g, 0.25, 2.0, 42);
    const std::size_t removed = split.test_edges.size();
    CHECK(removed == static_cast<std::size_t>(0.25 * g.edges.size()));
    CHECK(split.test_zeros.size() == static_cast<std::size_t>(2.0 * removed));
    CHECK(split.train.n_nodes == g.n_nodes);
    CHECK(split.train.edges.size() + removed == g.edges.size());
    CHECK(is_connected(split.train));

    std::set<std::pair<int, int>> original;
    for (const Edge& e : g.edges) original.emplace(e.u, e.v);
    std::set<std::pair<int, int>> seen;
    for (const Edge& e : split.train.edges) CHECK(seen.emplace(e.u, e.v).second);
    for (const Edge& e : split.test_edges) {
        CHECK(seen.emplace(e.u, e.v).second);
        CHECK(original.count({e.u, e.v}) == 1);
    }
    CHECK(seen == original);

    for (const auto& [u, v] : split.test_zeros) {
        CHECK(u < v);
        CHECK(original.count({u, v}) == 0);
    }
    std::set<std::pair<int, int>> zero_set(split.test_zeros.begin(), split.test_zeros.end());
    CHECK(zero_set.size() == split.test_zeros.size());

    SUBCASE("same seed reproduces the split") {
        const EdgeSplit again = split_connectivity_preserving(g, 0.25, 2.0, 42);
        CHECK(again.test_zeros == split.test_zeros);
        REQUIRE(again.test_edges.size() == split.test_edges.size());
        for (std::size_t i = 0; i < removed; ++i) {
            CHECK(again.test_edges[i].u == split.test_edges[i].u);
            CHECK(again.test_edges[i].v == split.test_edges[i].v);
        }
    }
    SUBCASE("another seed moves the held-out set") {
        const EdgeSplit other = split_connectivity_preserving(g, 0.25, 2.0, 43);
        bool differs = false;
        for (std::size_t i = 0; !differs && i < removed; ++i) {
            differs = other.test_edges[i].u != split.test_edges[i].u ||
                      other.test_edges[i].v != split.test_edges[i].v;
        }
        CHECK(differs);
    }
}

TEST_CASE("split refuses infeasible and disconnected requests") {
    SUBCASE("tree has no removable edges") {
        SignedGraph path;
        path.n_nodes = 5;
        path.node_ids = {"a", "b", "c", "d", "e"};
        path.edges = {{0, 1, 1}, {1, 2, 1}, {2, 3, -1}, {3, 4, 1}};
        CHECK_THROWS_AS(split_connectivity_preserving(path, 0.5, 1.0, 1),
                        InfeasibleSplitError);
    }
    SUBCASE("disconnected input") {
        SignedGraph two;
        two.n_nodes = 4;
        two.node_ids = {"a", "b", "c", "d"};
        two.edges = {{0, 1, 1}, {2, 3, 1}};
        CHECK_THROWS_AS(split_connectivity_preserving(two, 0.5, 1.0, 1),
                        InfeasibleSplitError);
    }
    SUBCASE("no edges") {
        SignedGraph empty;
        empty.n_nodes = 2;
        empty.node_ids = {"a", "b"};
        CHECK_THROWS_AS(split_connectivity_preserving(empty, 0.5, 1.0, 1), EmptyGraphError);
    }
}

TEST_CASE("graph json round trips exactly") {
    PlantedConfig cfg;
    cfg.n_nodes = 40;
    cfg.k = 2;
    cfg.seed = 9;
    const SignedGraph g = generate_planted(cfg).graph;
    const std::string path = "s2spm_test_graph.json";
    save_graph_json(g, path);
    const SignedGraph back = load_graph_json(path);
    std::remove(path.c_str());

    CHECK(back.n_nodes == g.n_nodes);
    CHECK(back.node_ids == g.node_ids);
    REQUIRE(back.edges.size() == g.edges.size());
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
        CHECK(back.edges[i].u == g.edges[i].u);
        CHECK(back.edges[i].v == g.edges[i].v);
        CHECK(back.edges[i].y == g.edges[i].y);
    }
}

TEST_CASE("split json round trips exactly") {
    PlantedConfig cfg;
    cfg.n_nodes = 60;
    cfg.k = 2;
    cfg.seed = 3;
    const SignedGraph g = largest_connected_component(generate_planted(cfg).graph);
    const EdgeSplit split = split_connectivity_preserving(g, 0.2, 1.5, 7);
    const std::string path = "s2spm_test_split.json";
    save_split_json(split, path);
    const EdgeSplit back = load_split_json(path);
    std::remove(path.c_str());

    CHECK(back.fraction == split.fraction);
    CHECK(back.zero_multiplier == split.zero_multiplier);
    CHECK(back.seed == split.seed);
    CHECK(back.train.n_nodes == split.train.n_nodes);
    CHECK(back.train.node_ids == split.train.node_ids);
    REQUIRE(back.train.edges.size() == split.train.edges.size());
    for (std::size_t i = 0; i < split.train.edges.size(); ++i) {
        CHECK(back.train.edges[i].y == split.train.edges[i].y);
    }
    REQUIRE(back.test_edges.size() == split.test_edges.size());
    for (std::size_t i = 0; i < split.test_edges.size(); ++i) {
        CHECK(back.test_edges[i].u == split.test_edges[i].u);
        CHECK(back.test_edges[i].v == split.test_edges[i].v);
        CHECK(back.test_edges[i].y == split.test_edges[i].y);
    }
    CHECK(back.test_zeros == split.test_zeros);
}

TEST_CASE("malformed json containers are rejected") {
    const TempFile f("{\"format\": \"other\"}", "badgraph.json");
    CHECK_THROWS_AS(load_graph_json(f.path), ParseError);
    CHECK_THROWS_AS(load_split_json(f.path), ParseError);
    const TempFile g("not json at all", "notjson.json");
    CHECK_THROWS_AS(load_graph_json(g.path), ParseError);
}

}  // TEST_SUITE
