#include "cli.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "s2spm/consistency.hpp"
#include "s2spm/enrich.hpp"
#include "s2spm/errors.hpp"
#include "s2spm/linkpred.hpp"
#include "s2spm/model.hpp"
#include "s2spm/rng.hpp"
#include "s2spm/sgraph.hpp"
#include "s2spm/skellam.hpp"
#include "s2spm/snapshot.hpp"
#include "s2spm/train.hpp"
#include "s2spm/viz.hpp"

namespace s2spm::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt6(double x) {
    if (x == 0.0) x = 0.0;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", x);
    return buf;
}

std::string fmt_sci(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6e", x);
    return buf;
}

// Full round-trip precision, for losses and echoed config values.
std::string fmt_full(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path, 0);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string iso_utc_now() {
    const std::time_t now = std::chrono::system_clock::to_time_t(
        std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Output directory with an exclusive lock file for the command's lifetime.
// Every produced file is registered so the manifest can list its digest.
class OutDir {
public:
    explicit OutDir(const std::string& path) : dir_(path) {
        fs::create_directories(dir_);
        lock_path_ = dir_ / ".s2spm.lock";
        lock_fd_ = ::open(lock_path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
        if (lock_fd_ < 0) {
            if (errno == EEXIST) {
                throw std::runtime_error("output directory is locked by another command: " +
                                         dir_.string());
            }
            throw std::runtime_error("cannot create lock file in " + dir_.string());
        }
    }

    OutDir(const OutDir&) = delete;
    OutDir& operator=(const OutDir&) = delete;

    ~OutDir() {
        if (lock_fd_ >= 0) {
            ::close(lock_fd_);
            ::unlink(lock_path_.c_str());
        }
    }

    const fs::path& dir() const { return dir_; }
    std::string path_of(const std::string& rel) const { return (dir_ / rel).string(); }

    void write(const std::string& rel, const std::string& content) {
        const fs::path full = dir_ / rel;
        fs::create_directories(full.parent_path());
        std::ofstream out(full, std::ios::binary);
        if (!out) throw ParseError("cannot write output file: " + full.string(), 0);
        out << content;
        out.close();
        outputs_[rel] = fnv1a_digest(content);
    }

    // For files written by library serializers.
    void record(const std::string& rel) { outputs_[rel] = digest_file(path_of(rel)); }

    void add_input(const std::string& path) { inputs_[path] = digest_file(path); }

    void finish(const std::string& command, const std::vector<std::string>& argv,
                const std::map<std::string, std::string>& config, std::uint64_t seed) {
        json j;
        j["format"] = "s2spm-manifest";
        j["version"] = 1;
        j["tool_version"] = kVersion;
        j["command"] = command;
        j["argv"] = argv;
        j["config"] = config;
        j["inputs"] = inputs_;
        j["outputs"] = outputs_;
        j["seed"] = seed;
        j["timestamp"] = iso_utc_now();
        std::ofstream out(dir_ / "manifest.json", std::ios::binary);
        if (!out) throw ParseError("cannot write manifest", 0);
        out << j.dump(1) << "\n";
    }

private:
    fs::path dir_;
    fs::path lock_path_;
    int lock_fd_ = -1;
    std::map<std::string, std::string> inputs_;
    std::map<std::string, std::string> outputs_;
};

AggregationPolicy parse_policy(const std::string& s) {
    if (s == "net_count") return AggregationPolicy::net_count;
    if (s == "majority_sign") return AggregationPolicy::majority_sign;
    throw std::invalid_argument("unknown aggregation policy: " + s);
}

ModelKind parse_kind(const std::string& s) {
    if (s == "two_space") return ModelKind::two_space;
    if (s == "single_space") return ModelKind::single_space;
    throw std::invalid_argument("unknown model kind: " + s);
}

Sampling parse_sampling(const std::string& s) {
    if (s == "auto") return Sampling::automatic;
    if (s == "full") return Sampling::full;
    if (s == "sampled") return Sampling::sampled;
    throw std::invalid_argument("unknown sampling mode: " + s);
}

struct SpaceSel {
    Space space;
    std::string label;
};

std::vector<SpaceSel> resolve_spaces(ModelKind kind, const std::string& flag) {
    if (kind == ModelKind::single_space) return {{Space::pos, "shared"}};
    if (flag == "both") return {{Space::pos, "pos"}, {Space::neg, "neg"}};
    if (flag == "pos") return {{Space::pos, "pos"}};
    if (flag == "neg") return {{Space::neg, "neg"}};
    throw std::invalid_argument("unknown space selector: " + flag);
}

std::string stats_tsv(const GraphStats& stats, int nodes_before_lcc) {
    std::string out = "metric\tvalue\n";
    out += "proteins\t" + std::to_string(stats.n_nodes) + "\n";
    out += "edges\t" + std::to_string(stats.n_edges) + "\n";
    out += "positive_edges\t" + std::to_string(stats.n_positive) + "\n";
    out += "negative_edges\t" + std::to_string(stats.n_negative) + "\n";
    out += "density\t" + fmt_sci(stats.density) + "\n";
    out += "nodes_outside_lcc\t" + std::to_string(nodes_before_lcc - stats.n_nodes) + "\n";
    return out;
}

std::string trace_csv(const std::vector<TracePoint>& trace) {
    std::string out = "iteration,loss\n";
    for (const TracePoint& t : trace) {
        out += std::to_string(t.iteration) + "," + fmt_full(t.loss) + "\n";
    }
    return out;
}

json three_class_json(const ThreeClassReport& r) {
    json j;
    j["confusion"] = {
        {r.confusion[0][0], r.confusion[0][1], r.confusion[0][2]},
        {r.confusion[1][0], r.confusion[1][1], r.confusion[1][2]},
        {r.confusion[2][0], r.confusion[2][1], r.confusion[2][2]},
    };
    j["f1_negative"] = r.f1_neg;
    j["f1_zero"] = r.f1_zero;
    j["f1_positive"] = r.f1_pos;
    j["f1_weighted"] = r.f1_weighted;
    return j;
}

json binary_json(const BinaryTasksReport& r) {
    auto task = [](const BinaryTaskReport& t) {
        return json{{"auc_roc", t.auc_roc}, {"auc_pr", t.auc_pr}};
    };
    return json{{"pos_vs_neg", task(r.pos_vs_neg)},
                {"pos_vs_zero", task(r.pos_vs_zero)},
                {"neg_vs_zero", task(r.neg_vs_zero)}};
}

std::string eval_report_txt(const EvalReport& rep) {
    const auto& c = rep.three_class.confusion;
    std::string out;
    out += "three-class link prediction (rows truth, cols predicted; neg/zero/pos)\n";
    for (int r = 0; r < 3; ++r) {
        out += "  " + std::to_string(c[r][0]) + "\t" + std::to_string(c[r][1]) + "\t" +
               std::to_string(c[r][2]) + "\n";
    }
    out += "f1 negative\t" + fmt6(rep.three_class.f1_neg) + "\n";
    out += "f1 zero\t" + fmt6(rep.three_class.f1_zero) + "\n";
    out += "f1 positive\t" + fmt6(rep.three_class.f1_pos) + "\n";
    out += "f1 weighted\t" + fmt6(rep.three_class.f1_weighted) + "\n";
    auto task = [&](const char* name, const BinaryTaskReport& t) {
        return std::string(name) + "\tauc-roc " + fmt6(t.auc_roc) + "\tauc-pr " +
               fmt6(t.auc_pr) + "\n";
    };
    out += task("pos vs neg", rep.binary.pos_vs_neg);
    out += task("pos vs zero", rep.binary.pos_vs_zero);
    out += task("neg vs zero", rep.binary.neg_vs_zero);
    return out;
}

// Shared training options, bound by the train, eval, and bnmi subcommands.
struct TrainOpts {
    int k = 8;
    int k_neg = 0;  // 0 means follow k
    std::string kind = "two_space";
    double lr = 0.05;
    int iterations = 5000;
    std::string sampling = "auto";
    double nonedge_mult = 10.0;
    int checkpoint_every = 500;
    double init_sigma = 0.1;

    void bind(CLI::App* sub, bool with_k = true) {
        if (with_k) sub->add_option("--k", k, "archetype count (positive space)");
        sub->add_option("--k-neg", k_neg, "archetype count of the negative space (default --k)");
        sub->add_option("--kind", kind, "two_space or single_space");
        sub->add_option("--lr", lr, "Adam learning rate");
        sub->add_option("--iterations", iterations, "optimizer iterations");
        sub->add_option("--sampling", sampling, "auto, full, or sampled objective");
        sub->add_option("--nonedge-mult", nonedge_mult, "sampled non-edges per edge");
        sub->add_option("--checkpoint-every", checkpoint_every, "trace/checkpoint interval");
        sub->add_option("--init-sigma", init_sigma, "initialization noise scale");
    }

    TrainConfig to_config(std::uint64_t seed) const {
        TrainConfig cfg;
        cfg.k_pos = k;
        cfg.k_neg = k_neg > 0 ? k_neg : k;
        cfg.kind = parse_kind(kind);
        cfg.lr = lr;
        cfg.iterations = iterations;
        cfg.seed = seed;
        cfg.sampling = parse_sampling(sampling);
        cfg.nonedge_multiplier = nonedge_mult;
        cfg.checkpoint_every = checkpoint_every;
        cfg.init_sigma = init_sigma;
        return cfg;
    }

    void echo(std::map<std::string, std::string>& cfg) const {
        cfg["k"] = std::to_string(k);
        cfg["k-neg"] = std::to_string(k_neg > 0 ? k_neg : k);
        cfg["kind"] = kind;
        cfg["lr"] = fmt_full(lr);
        cfg["iterations"] = std::to_string(iterations);
        cfg["sampling"] = sampling;
        cfg["nonedge-mult"] = fmt_full(nonedge_mult);
        cfg["checkpoint-every"] = std::to_string(checkpoint_every);
        cfg["init-sigma"] = fmt_full(init_sigma);
    }
};

json matrix_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

// ---- subcommand bodies ----------------------------------------------------

struct IngestArgs {
    std::string edges, out, policy = "net_count";
};

void cmd_ingest(const IngestArgs& a, const std::vector<std::string>& argv) {
    const SignedGraph raw = load_edge_list(a.edges, parse_policy(a.policy));
    const SignedGraph g = largest_connected_component(raw);

    OutDir out(a.out);
    out.add_input(a.edges);
    save_graph_json(g, out.path_of("graph.json"));
    out.record("graph.json");
    out.write("stats.tsv", stats_tsv(graph_stats(g), raw.n_nodes));
    out.finish("ingest", argv, {{"edges", a.edges}, {"policy", a.policy}}, 0);
    std::cout << "ingested " << g.n_nodes << " proteins, " << g.edges.size() << " edges ("
              << g.positive_count() << " positive, " << g.negative_count() << " negative)\n";
}

struct SynthArgs {
    int n = 500;
    int k = 8;
    std::uint64_t seed = 1;
    double bias = -0.5, corner = 4.0, noise = 0.5, scale = 3.0;
    std::string out;
};

void cmd_synth(const SynthArgs& a, const std::vector<std::string>& argv) {
    PlantedConfig cfg;
    cfg.n_nodes = a.n;
    cfg.k = a.k;
    cfg.seed = a.seed;
    cfg.bias = a.bias;
    cfg.corner_strength = a.corner;
    cfg.noise_sigma = a.noise;
    cfg.archetype_scale = a.scale;
    const PlantedGraph pg = generate_planted(cfg);

    OutDir out(a.out);
    save_graph_json(pg.graph, out.path_of("graph.json"));
    out.record("graph.json");

    json truth;
    truth["format"] = "s2spm-planted-truth";
    truth["version"] = 1;
    truth["membership_pos"] = matrix_json(pg.membership_pos);
    truth["membership_neg"] = matrix_json(pg.membership_neg);
    truth["corner_pos"] = pg.corner_pos;
    truth["corner_neg"] = pg.corner_neg;
    out.write("truth.json", truth.dump(1) + "\n");
    out.write("stats.tsv", stats_tsv(graph_stats(pg.graph), pg.graph.n_nodes));

    std::map<std::string, std::string> echo = {
        {"n", std::to_string(a.n)},        {"k", std::to_string(a.k)},
        {"bias", fmt_full(a.bias)},        {"corner-strength", fmt_full(a.corner)},
        {"noise-sigma", fmt_full(a.noise)}, {"archetype-scale", fmt_full(a.scale)},
    };
    out.finish("synth", argv, echo, a.seed);
    std::cout << "planted graph with " << pg.graph.n_nodes << " nodes, "
              << pg.graph.edges.size() << " edges\n";
}

struct TrainArgs {
    std::string graph, out;
    std::uint64_t seed = 1;
    int runs = 1;
    TrainOpts opts;
};

void cmd_train(const TrainArgs& a, const std::vector<std::string>& argv) {
    const SignedGraph g = load_graph_json(a.graph);
    OutDir out(a.out);
    out.add_input(a.graph);

    for (int r = 0; r < a.runs; ++r) {
        const std::uint64_t run_seed = a.seed + static_cast<std::uint64_t>(r);
        const TrainConfig cfg = a.opts.to_config(run_seed);
        const std::string run_dir = "run-" + std::to_string(run_seed);
        fs::create_directories(out.dir() / run_dir);

        const CheckpointFn save_iter = [&](int it, const ModelParams& p, double) {
            const std::string rel = run_dir + "/iter-" + std::to_string(it) + ".snapshot";
            save_snapshot(out.path_of(rel), {p, run_seed, it});
            out.record(rel);
        };
        const FitResult res = fit(g, cfg, save_iter);

        const std::string final_rel = run_dir + "/final.snapshot";
        save_snapshot(out.path_of(final_rel), {res.params, run_seed, res.iterations});
        out.record(final_rel);
        out.write(run_dir + "/trace.csv", trace_csv(res.trace));
        std::cout << run_dir << ": final loss " << fmt_full(res.trace.back().loss) << "\n";
    }

    std::map<std::string, std::string> echo;
    a.opts.echo(echo);
    echo["seed"] = std::to_string(a.seed);
    echo["runs"] = std::to_string(a.runs);
    out.finish("train", argv, echo, a.seed);
}

struct EvalArgs {
    std::string graph, out, snapshot, split;
    double fraction = 0.2;
    double zero_mult = 1.0;
    std::uint64_t seed = 1;
    TrainOpts opts;
};

void cmd_eval(const EvalArgs& a, const std::vector<std::string>& argv) {
    const SignedGraph g = load_graph_json(a.graph);
    if (!a.snapshot.empty() && a.split.empty()) {
        throw std::invalid_argument(
            "--snapshot needs the --split the model was trained on");
    }

    OutDir out(a.out);
    out.add_input(a.graph);

    EdgeSplit split;
    if (!a.split.empty()) {
        out.add_input(a.split);
        split = load_split_json(a.split);
    } else {
        split = split_connectivity_preserving(g, a.fraction, a.zero_mult, a.seed);
        save_split_json(split, out.path_of("split.json"));
        out.record("split.json");
    }
    if (split.train.n_nodes != g.n_nodes) {
        throw TrainingDataError("split does not match the graph's node count");
    }

    ModelParams params;
    if (!a.snapshot.empty()) {
        out.add_input(a.snapshot);
        params = load_snapshot(a.snapshot).params;
    } else {
        const FitResult res = fit(split.train, a.opts.to_config(a.seed));
        params = res.params;
        save_snapshot(out.path_of("model.snapshot"), {params, a.seed, res.iterations});
        out.record("model.snapshot");
        out.write("trace.csv", trace_csv(res.trace));
    }
    if (params.n_nodes() != g.n_nodes) {
        throw TrainingDataError("snapshot was trained on a different graph size");
    }

    const EvalReport rep = evaluate_link_prediction(params, split, a.seed);
    json j;
    j["format"] = "s2spm-eval-report";
    j["version"] = 1;
    j["seed"] = rep.seed;
    j["three_class"] = three_class_json(rep.three_class);
    j["binary"] = binary_json(rep.binary);
    out.write("eval_report.json", j.dump(1) + "\n");
    out.write("report.txt", eval_report_txt(rep));

    std::map<std::string, std::string> echo;
    a.opts.echo(echo);
    echo["fraction"] = fmt_full(a.fraction);
    echo["zero-mult"] = fmt_full(a.zero_mult);
    echo["seed"] = std::to_string(a.seed);
    out.finish("eval", argv, echo, a.seed);
    std::cout << "weighted f1 " << fmt6(rep.three_class.f1_weighted) << "\n";
}

struct BnmiArgs {
    std::string graph, out, k_list = "8";
    int runs = 5;
    int perm = 100;
    std::uint64_t seed = 1;
    TrainOpts opts;
};

void cmd_bnmi(const BnmiArgs& a, const std::vector<std::string>& argv) {
    const SignedGraph g = load_graph_json(a.graph);
    const std::vector<int> ks = parse_k_list(a.k_list);

    OutDir out(a.out);
    out.add_input(a.graph);

    std::string csv = "k,space,runs,pairs,bnmi_mean,bnmi_sd,perm_draws,null_mean,null_sd\n";
    for (const int k : ks) {
        TrainOpts opts = a.opts;
        opts.k = k;
        opts.k_neg = 0;
        const TrainConfig cfg = opts.to_config(a.seed);
        const std::vector<FitResult> ensemble = fit_ensemble(g, cfg, a.runs);

        const std::vector<SpaceSel> spaces = resolve_spaces(cfg.kind, "both");
        for (std::size_t si = 0; si < spaces.size(); ++si) {
            std::vector<Eigen::MatrixXd> mats;
            mats.reserve(ensemble.size());
            for (const FitResult& res : ensemble) {
                mats.push_back(memberships(res.params, spaces[si].space));
            }
            const BnmiSummary s = ensemble_bnmi(mats);
            const std::uint64_t null_seed =
                Rng(a.seed).derive(static_cast<std::uint64_t>(k)).derive(si).next_u64();
            const NullSummary nul = permutation_null(mats, a.perm, null_seed);
            csv += std::to_string(k) + "," + spaces[si].label + "," +
                   std::to_string(a.runs) + "," + std::to_string(s.pairs) + "," +
                   fmt6(s.mean) + "," + fmt6(s.sd) + "," + std::to_string(nul.draws) + "," +
                   fmt6(nul.mean) + "," + fmt6(nul.sd) + "\n";
        }
    }
    out.write("curve.csv", csv);

    std::map<std::string, std::string> echo;
    a.opts.echo(echo);
    echo["k"] = a.k_list;
    echo["runs"] = std::to_string(a.runs);
    echo["perm"] = std::to_string(a.perm);
    echo["seed"] = std::to_string(a.seed);
    out.finish("bnmi", argv, echo, a.seed);
    std::cout << "bnmi curve over " << ks.size() << " k values written\n";
}

struct EnrichArgs {
    std::string graph, snapshot, annotations, out, space = "both";
    int min_proteins = 20;
    double p_threshold = 0.002;
    double alpha = 0.05;
    double p_max_threshold = 0.5;
    double sar_threshold = 0.5;
    int boot = 1000;
    std::uint64_t seed = 1;
};

void cmd_enrich(const EnrichArgs& a, const std::vector<std::string>& argv) {
    const SignedGraph g = load_graph_json(a.graph);
    const Snapshot snap = load_snapshot(a.snapshot);
    if (snap.params.n_nodes() != g.n_nodes) {
        throw TrainingDataError("snapshot was trained on a different graph size");
    }
    const AnnotationTable table = load_annotations(a.annotations, g);

    EnrichConfig cfg;
    cfg.min_proteins = a.min_proteins;
    cfg.p_threshold = a.p_threshold;
    cfg.alpha = a.alpha;
    cfg.p_max_threshold = a.p_max_threshold;
    cfg.sar_threshold = a.sar_threshold;
    cfg.n_boot = a.boot;
    cfg.seed = a.seed;

    OutDir out(a.out);
    out.add_input(a.graph);
    out.add_input(a.snapshot);
    out.add_input(a.annotations);

    std::string summary;
    for (const SpaceSel& sel : resolve_spaces(snap.params.kind, a.space)) {
        const EnrichmentReport rep =
            enrich_all_archetypes(snap.params, table, sel.space, cfg);

        std::string records =
            "archetype\tterm\tfraction\te_first_bin\tp_value\tpasses_bh\tp_max\tsignificant\n";
        std::string enriched = "archetype\tterm\tsar\n";
        for (const ArchetypeReport& ar : rep.archetypes) {
            for (const EnrichmentRecord& rec : ar.records) {
                records += std::to_string(rec.archetype) + "\t" + rec.term + "\t" +
                           fmt6(rec.bin_fraction) + "\t" + fmt6(rec.e_first_bin) + "\t" +
                           fmt_sci(rec.p_value) + "\t" + (rec.passes_bh ? "1" : "0") + "\t" +
                           fmt6(rec.p_max) + "\t" + (rec.significant ? "1" : "0") + "\n";
            }
            summary += "space " + sel.label + " archetype " + std::to_string(ar.archetype) +
                       ": " + std::to_string(ar.enriched.size()) + " enriched term(s)\n";
            for (const TermSar& ts : ar.terms) {
                if (ts.enriched) {
                    enriched += std::to_string(ar.archetype) + "\t" + ts.term + "\t" +
                                fmt6(ts.sar) + "\n";
                    summary += "  " + ts.term + " (sar " + fmt6(ts.sar) + ")\n";
                }
            }
        }
        out.write("records_" + sel.label + ".tsv", records);
        out.write("enriched_" + sel.label + ".tsv", enriched);
    }
    out.write("report.txt", summary);

    std::map<std::string, std::string> echo = {
        {"space", a.space},
        {"min-proteins", std::to_string(a.min_proteins)},
        {"p-threshold", fmt_full(a.p_threshold)},
        {"alpha", fmt_full(a.alpha)},
        {"p-max-threshold", fmt_full(a.p_max_threshold)},
        {"sar-threshold", fmt_full(a.sar_threshold)},
        {"boot", std::to_string(a.boot)},
        {"seed", std::to_string(a.seed)},
    };
    out.finish("enrich", argv, echo, a.seed);
    std::cout << summary;
}

struct VizArgs {
    std::string graph, snapshot, out, space = "both";
};

void cmd_viz(const VizArgs& a, const std::vector<std::string>& argv) {
    const SignedGraph g = load_graph_json(a.graph);
    const Snapshot snap = load_snapshot(a.snapshot);
    if (snap.params.n_nodes() != g.n_nodes) {
        throw TrainingDataError("snapshot was trained on a different graph size");
    }
    const ModelState st = derive(snap.params);

    OutDir out(a.out);
    out.add_input(a.graph);
    out.add_input(a.snapshot);

    for (const SpaceSel& sel : resolve_spaces(snap.params.kind, a.space)) {
        const CircularLayout layout = circular_layout(snap.params, g, sel.space);
        out.write("circular_points_" + sel.label + ".csv", circular_points_csv(layout));
        out.write("circular_edges_" + sel.label + ".csv", circular_edges_csv(layout));
        out.write("circular_" + sel.label + ".svg", circular_layout_svg(layout));

        const OrderedAdjacency adj = ordered_adjacency(snap.params, g, sel.space);
        out.write("adjacency_" + sel.label + ".csv", adjacency_csv(adj));
        out.write("permutation_" + sel.label + ".csv", permutation_csv(adj));
        out.write("adjacency_" + sel.label + ".svg", adjacency_svg(adj));

        const Pca2d pca = pca_2d(st.space(sel.space).projected.transpose());
        out.write("pca_" + sel.label + ".csv", pca_csv(pca));
        out.write("pca_" + sel.label + ".svg", pca_svg(pca));
    }
    out.finish("viz", argv, {{"space", a.space}}, 0);
    std::cout << "figure data written to " << out.dir().string() << "\n";
}

}  // namespace

std::string fnv1a_digest(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string digest_file(const std::string& path) { return fnv1a_digest(read_file(path)); }

std::vector<int> parse_k_list(const std::string& text) {
    std::vector<int> ks;
    std::stringstream ss(text);
    std::string token;
    while (std::getline(ss, token, ',')) {
        if (token.empty()) continue;
        const auto dots = token.find("..");
        try {
            if (dots == std::string::npos) {
                ks.push_back(std::stoi(token));
            } else {
                const int lo = std::stoi(token.substr(0, dots));
                const int hi = std::stoi(token.substr(dots + 2));
                if (lo > hi) throw std::invalid_argument("descending range");
                for (int k = lo; k <= hi; ++k) ks.push_back(k);
            }
        } catch (const std::exception&) {
            throw std::invalid_argument("cannot parse k list entry: " + token);
        }
    }
    for (const int k : ks) {
        if (k < 1) throw std::invalid_argument("k must be positive");
    }
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    if (ks.empty()) throw std::invalid_argument("empty k list");
    return ks;
}

int run(int argc, const char* const* argv) {
    CLI::App app{"Signed two-space proximity model toolkit"};
    app.require_subcommand(1);

    IngestArgs ingest;
    CLI::App* sub_ingest = app.add_subcommand("ingest", "load an edge list, keep the LCC");
    sub_ingest->add_option("--edges", ingest.edges, "delimited edge file")
        ->required()
        ->check(CLI::ExistingFile);
    sub_ingest->add_option("--out", ingest.out, "output directory")->required();
    sub_ingest->add_option("--policy", ingest.policy, "net_count or majority_sign");

    SynthArgs synth;
    CLI::App* sub_synth = app.add_subcommand("synth", "generate a planted two-space graph");
    sub_synth->add_option("--n", synth.n, "node count")->required();
    sub_synth->add_option("--k", synth.k, "planted archetype count")->required();
    sub_synth->add_option("--seed", synth.seed, "generator seed");
    sub_synth->add_option("--bias", synth.bias, "rate bias");
    sub_synth->add_option("--corner-strength", synth.corner, "membership concentration");
    sub_synth->add_option("--noise-sigma", synth.noise, "membership logit noise");
    sub_synth->add_option("--archetype-scale", synth.scale, "planted archetype spread");
    sub_synth->add_option("--out", synth.out, "output directory")->required();

    TrainArgs train;
    CLI::App* sub_train = app.add_subcommand("train", "fit the model on a graph bundle");
    sub_train->set_config("--config", "", "flat key=value config file");
    sub_train->add_option("--graph", train.graph, "graph.json from ingest or synth")
        ->required()
        ->check(CLI::ExistingFile);
    sub_train->add_option("--out", train.out, "output directory")->required();
    sub_train->add_option("--seed", train.seed, "base seed");
    sub_train->add_option("--runs", train.runs, "independent restarts");
    train.opts.bind(sub_train);

    EvalArgs evalargs;
    CLI::App* sub_eval = app.add_subcommand("eval", "signed link prediction evaluation");
    sub_eval->set_config("--config", "", "flat key=value config file");
    sub_eval->add_option("--graph", evalargs.graph, "graph.json")
        ->required()
        ->check(CLI::ExistingFile);
    sub_eval->add_option("--out", evalargs.out, "output directory")->required();
    sub_eval->add_option("--snapshot", evalargs.snapshot,
                         "trained snapshot (requires --split)");
    sub_eval->add_option("--split", evalargs.split, "existing split.json");
    sub_eval->add_option("--fraction", evalargs.fraction, "held-out edge fraction");
    sub_eval->add_option("--zero-mult", evalargs.zero_mult, "test zeros per removed edge");
    sub_eval->add_option("--seed", evalargs.seed, "split/training/evaluation seed");
    evalargs.opts.bind(sub_eval);

    BnmiArgs bnmi;
    CLI::App* sub_bnmi = app.add_subcommand("bnmi", "consistency curve over a k sweep");
    sub_bnmi->set_config("--config", "", "flat key=value config file");
    sub_bnmi->add_option("--graph", bnmi.graph, "graph.json")
        ->required()
        ->check(CLI::ExistingFile);
    sub_bnmi->add_option("--out", bnmi.out, "output directory")->required();
    sub_bnmi->add_option("--k", bnmi.k_list, "k values, e.g. 3..64 or 3,5,8");
    sub_bnmi->add_option("--runs", bnmi.runs, "ensemble size per k");
    sub_bnmi->add_option("--perm", bnmi.perm, "permutation null draws");
    sub_bnmi->add_option("--seed", bnmi.seed, "base seed");
    bnmi.opts.bind(sub_bnmi, /*with_k=*/false);

    EnrichArgs enrich;
    CLI::App* sub_enrich = app.add_subcommand("enrich", "archetype annotation enrichment");
    sub_enrich->add_option("--graph", enrich.graph, "graph.json")
        ->required()
        ->check(CLI::ExistingFile);
    sub_enrich->add_option("--snapshot", enrich.snapshot, "trained snapshot")
        ->required()
        ->check(CLI::ExistingFile);
    sub_enrich->add_option("--annotations", enrich.annotations, "protein annotation table")
        ->required()
        ->check(CLI::ExistingFile);
    sub_enrich->add_option("--out", enrich.out, "output directory")->required();
    sub_enrich->add_option("--space", enrich.space, "pos, neg, or both");
    sub_enrich->add_option("--min-proteins", enrich.min_proteins, "smallest testable term");
    sub_enrich->add_option("--p-threshold", enrich.p_threshold, "candidate p-value cut");
    sub_enrich->add_option("--alpha", enrich.alpha, "BH false discovery rate");
    sub_enrich->add_option("--p-max-threshold", enrich.p_max_threshold, "first-bin win rate");
    sub_enrich->add_option("--sar-threshold", enrich.sar_threshold,
                           "significance appearance rate cut");
    sub_enrich->add_option("--boot", enrich.boot, "bootstrap replicates");
    sub_enrich->add_option("--seed", enrich.seed, "bootstrap seed");

    VizArgs viz;
    CLI::App* sub_viz = app.add_subcommand("viz", "figure data and SVG renderings");
    sub_viz->add_option("--graph", viz.graph, "graph.json")
        ->required()
        ->check(CLI::ExistingFile);
    sub_viz->add_option("--snapshot", viz.snapshot, "trained snapshot")
        ->required()
        ->check(CLI::ExistingFile);
    sub_viz->add_option("--out", viz.out, "output directory")->required();
    sub_viz->add_option("--space", viz.space, "pos, neg, or both");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    std::vector<std::string> argv_echo;
    for (int i = 0; i < argc; ++i) argv_echo.emplace_back(argv[i]);

    try {
        if (app.got_subcommand(sub_ingest)) cmd_ingest(ingest, argv_echo);
        else if (app.got_subcommand(sub_synth)) cmd_synth(synth, argv_echo);
        else if (app.got_subcommand(sub_train)) cmd_train(train, argv_echo);
        else if (app.got_subcommand(sub_eval)) cmd_eval(evalargs, argv_echo);
        else if (app.got_subcommand(sub_bnmi)) cmd_bnmi(bnmi, argv_echo);
        else if (app.got_subcommand(sub_enrich)) cmd_enrich(enrich, argv_echo);
        else if (app.got_subcommand(sub_viz)) cmd_viz(viz, argv_echo);
        return kExitOk;
    } catch (const NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const DegenerateGateError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const DegeneratePcaError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::domain_error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
}

int run(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("s2spm");
    for (const std::string& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace s2spm::cli
