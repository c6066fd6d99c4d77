#include "s2spm/enrich.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "s2spm/errors.hpp"
#include "s2spm/rng.hpp"

namespace s2spm {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_fields(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, delim)) out.push_back(trim(field));
    return out;
}

double lchoose(long n, long k) {
    if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
    return std::lgamma(static_cast<double>(n + 1)) - std::lgamma(static_cast<double>(k + 1)) -
           std::lgamma(static_cast<double>(n - k + 1));
}

}  // namespace

AnnotationTable load_annotations(const std::string& path, const SignedGraph& graph) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open annotation file: " + path, 0);

    std::unordered_map<std::string, int> index;
    for (int i = 0; i < graph.n_nodes; ++i) index.emplace(graph.node_ids[i], i);

    struct TermAccum {
        std::string category;
        std::string label;
        std::unordered_set<int> members;
    };
    std::map<std::string, TermAccum> terms;

    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string content = trim(line);
        if (content.empty() || content[0] == '#') continue;
        const char delim = content.find('\t') != std::string::npos ? '\t' : ',';
        const std::vector<std::string> fields = split_fields(content, delim);
        if (fields.size() < 2 || fields[0].empty() || fields[1].empty()) {
            throw ParseError("annotation row needs protein and term columns", line_no);
        }
        const auto it = index.find(fields[0]);
        if (it == index.end()) continue;  // protein not in this graph
        TermAccum& acc = terms[fields[1]];
        acc.members.insert(it->second);
        if (acc.category.empty() && fields.size() > 2) acc.category = fields[2];
        if (acc.label.empty() && fields.size() > 3) acc.label = fields[3];
    }

    AnnotationTable table;
    table.n_nodes = graph.n_nodes;
    for (auto& [id, acc] : terms) {
        AnnotationTerm term;
        term.id = id;
        term.category = acc.category;
        term.label = acc.label;
        term.members.assign(acc.members.begin(), acc.members.end());
        std::sort(term.members.begin(), term.members.end());
        table.terms.push_back(std::move(term));
    }
    return table;
}

std::vector<int> rank_by_archetype_distance(const ModelParams& params, const ModelState& st,
                                            Space space, int k) {
    const SpaceState& sp = st.space(space);
    const int n = params.n_nodes();
    if (k < 0 || k >= static_cast<int>(sp.archetype.cols())) {
        throw std::domain_error("archetype index out of range");
    }
    std::vector<double> dist(n);
    for (int i = 0; i < n; ++i) {
        dist[i] = (sp.projected.col(i) - sp.archetype.col(k)).norm();
    }
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (dist[a] != dist[b]) return dist[a] < dist[b];
        return a < b;
    });
    return order;
}

std::vector<Bin> make_bins(int n_ranked, double bin_fraction) {
    if (!(bin_fraction > 0.0) || bin_fraction > 0.5) {
        throw std::domain_error("bin fraction must lie in (0, 0.5]");
    }
    const int s = static_cast<int>(std::floor(bin_fraction * n_ranked));
    if (s < 1) throw std::domain_error("bin fraction yields an empty bin");
    const int b = n_ranked / s;
    std::vector<Bin> bins(b);
    for (int i = 0; i < b; ++i) bins[i] = {i * s, s};
    bins.back().size += n_ranked - b * s;  // remainder lands in the farthest bin
    return bins;
}

double enrichment_value(const std::vector<int>& bin, const std::vector<int>& term_nodes,
                        double global_density) {
    if (!(global_density > 0.0)) throw std::domain_error("global density must be positive");
    if (bin.empty()) return 0.0;
    long hits = 0;
    for (int node : bin) {
        if (std::binary_search(term_nodes.begin(), term_nodes.end(), node)) ++hits;
    }
    const double density = static_cast<double>(hits) / static_cast<double>(bin.size());
    return density / global_density;
}

double hypergeom_sf(long k, long draws, long successes, long population) {
    if (population < 0 || successes < 0 || successes > population || draws < 0 ||
        draws > population || k < 0 || k > draws) {
        throw std::domain_error("hypergeometric parameters out of range");
    }
    const long hi = std::min(draws, successes);
    if (k > hi) return 0.0;
    if (k <= std::max(0L, draws + successes - population)) return 1.0;
    const long lo = std::max(k, draws + successes - population);
    const double log_denom = lchoose(population, draws);
    double max_term = -std::numeric_limits<double>::infinity();
    std::vector<double> logs;
    logs.reserve(static_cast<std::size_t>(hi - lo + 1));
    for (long i = lo; i <= hi; ++i) {
        const double lt = lchoose(successes, i) + lchoose(population - successes, draws - i) -
                          log_denom;
        logs.push_back(lt);
        max_term = std::max(max_term, lt);
    }
    if (!std::isfinite(max_term)) return 0.0;
    double sum = 0.0;
    for (double lt : logs) sum += std::exp(lt - max_term);
    const double p = std::exp(max_term + std::log(sum));
    return std::min(1.0, std::max(0.0, p));
}

std::vector<char> bh_fdr(const std::vector<double>& p_values, double alpha) {
    const std::size_t m = p_values.size();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });
    std::size_t cutoff = 0;  // number of rejected ranks
    for (std::size_t r = m; r >= 1; --r) {
        if (p_values[order[r - 1]] <=
            static_cast<double>(r) * alpha / static_cast<double>(m)) {
            cutoff = r;
            break;
        }
    }
    std::vector<char> reject(m, 0);
    for (std::size_t r = 0; r < cutoff; ++r) reject[order[r]] = 1;
    return reject;
}

double p_max_bootstrap(const std::vector<std::vector<int>>& bins,
                       const std::vector<int>& term_nodes, int n_boot, std::uint64_t seed) {
    if (n_boot < 1) throw std::domain_error("bootstrap needs at least one replicate");
    if (bins.empty() || bins.front().empty()) {
        throw std::domain_error("bootstrap needs a non-empty first bin");
    }
    std::unordered_set<int> term(term_nodes.begin(), term_nodes.end());
    std::vector<std::vector<char>> is_term(bins.size());
    for (std::size_t b = 0; b < bins.size(); ++b) {
        is_term[b].resize(bins[b].size());
        for (std::size_t i = 0; i < bins[b].size(); ++i) {
            is_term[b][i] = term.count(bins[b][i]) ? 1 : 0;
        }
    }
    Rng rng(seed);
    long wins = 0;
    std::vector<long> hits(bins.size());
    for (int rep = 0; rep < n_boot; ++rep) {
        for (std::size_t b = 0; b < bins.size(); ++b) {
            long h = 0;
            const std::size_t size = bins[b].size();
            for (std::size_t i = 0; i < size; ++i) h += is_term[b][rng.next_below(size)];
            hits[b] = h;
        }
        // Strict density comparison via cross multiplication, exact in integers.
        bool strict_max = true;
        const long s0 = static_cast<long>(bins[0].size());
        for (std::size_t b = 1; b < bins.size() && strict_max; ++b) {
            const long sb = static_cast<long>(bins[b].size());
            if (hits[0] * sb <= hits[b] * s0) strict_max = false;
        }
        if (strict_max) ++wins;
    }
    return static_cast<double>(wins) / static_cast<double>(n_boot);
}

std::vector<double> EnrichConfig::default_fractions() {
    std::vector<double> fs(20);
    for (int i = 0; i < 20; ++i) fs[i] = (i + 1) / 100.0;
    return fs;
}

ArchetypeReport enrich_archetype_sweep(const ModelParams& params,
                                       const AnnotationTable& annotations, Space space, int k,
                                       const EnrichConfig& cfg) {
    if (annotations.n_nodes != params.n_nodes()) {
        throw std::invalid_argument("annotation table does not cover this graph");
    }
    if (cfg.fractions.empty()) throw std::domain_error("no bin fractions to sweep");
    const ModelState st = derive(params);
    const std::vector<int> ranked = rank_by_archetype_distance(params, st, space, k);
    const int n = annotations.n_nodes;

    std::vector<const AnnotationTerm*> eligible;
    for (const AnnotationTerm& t : annotations.terms) {
        if (static_cast<int>(t.members.size()) >= cfg.min_proteins) eligible.push_back(&t);
    }

    ArchetypeReport report;
    report.archetype = k;
    std::vector<int> significant_count(eligible.size(), 0);
    const Rng stream_root = Rng(cfg.seed).derive(static_cast<std::uint64_t>(k));

    for (std::size_t fi = 0; fi < cfg.fractions.size(); ++fi) {
        const double fraction = cfg.fractions[fi];
        const std::vector<Bin> bins = make_bins(n, fraction);
        std::vector<std::vector<int>> bin_nodes(bins.size());
        for (std::size_t b = 0; b < bins.size(); ++b) {
            bin_nodes[b].assign(ranked.begin() + bins[b].start,
                                ranked.begin() + bins[b].start + bins[b].size);
        }

        std::vector<EnrichmentRecord> batch(eligible.size());
        std::vector<double> pvals(eligible.size());
        for (std::size_t ti = 0; ti < eligible.size(); ++ti) {
            const AnnotationTerm& term = *eligible[ti];
            const double density = static_cast<double>(term.members.size()) / n;
            long hits0 = 0;
            for (int node : bin_nodes[0]) {
                if (std::binary_search(term.members.begin(), term.members.end(), node)) {
                    ++hits0;
                }
            }
            EnrichmentRecord& rec = batch[ti];
            rec.archetype = k;
            rec.term = term.id;
            rec.bin_fraction = fraction;
            rec.e_first_bin =
                (static_cast<double>(hits0) / bin_nodes[0].size()) / density;
            rec.p_value = hypergeom_sf(hits0, static_cast<long>(bin_nodes[0].size()),
                                       static_cast<long>(term.members.size()), n);
            pvals[ti] = rec.p_value;
        }

        const std::vector<char> bh = bh_fdr(pvals, cfg.alpha);
        for (std::size_t ti = 0; ti < eligible.size(); ++ti) {
            EnrichmentRecord& rec = batch[ti];
            rec.passes_bh = bh[ti] != 0;
            if (rec.p_value < cfg.p_threshold && rec.passes_bh) {
                const std::uint64_t boot_seed = stream_root.derive(fi).derive(ti).next_u64();
                rec.p_max = p_max_bootstrap(bin_nodes, eligible[ti]->members, cfg.n_boot,
                                            boot_seed);
                rec.significant = rec.p_max > cfg.p_max_threshold;
            }
            if (rec.significant) ++significant_count[ti];
            report.records.push_back(rec);
        }
    }

    for (std::size_t ti = 0; ti < eligible.size(); ++ti) {
        TermSar ts;
        ts.term = eligible[ti]->id;
        ts.sar = static_cast<double>(significant_count[ti]) /
                 static_cast<double>(cfg.fractions.size());
        ts.enriched = ts.sar >= cfg.sar_threshold;
        report.terms.push_back(std::move(ts));
    }
    std::sort(report.terms.begin(), report.terms.end(), [](const TermSar& a, const TermSar& b) {
        if (a.sar != b.sar) return a.sar > b.sar;
        return a.term < b.term;
    });
    for (const TermSar& ts : report.terms) {
        if (ts.enriched) report.enriched.push_back(ts.term);
    }
    return report;
}

EnrichmentReport enrich_all_archetypes(const ModelParams& params,
                                       const AnnotationTable& annotations, Space space,
                                       const EnrichConfig& cfg) {
    EnrichmentReport report;
    report.space = space;
    report.config = cfg;
    const int k_total =
        space == Space::pos || params.kind == ModelKind::single_space ? params.k_pos()
                                                                      : params.k_neg();
    for (int k = 0; k < k_total; ++k) {
        report.archetypes.push_back(enrich_archetype_sweep(params, annotations, space, k, cfg));
    }
    return report;
}

}  // namespace s2spm
