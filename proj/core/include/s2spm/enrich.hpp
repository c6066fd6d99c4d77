#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "s2spm/model.hpp"
#include "s2spm/sgraph.hpp"

namespace s2spm {

struct AnnotationTerm {
    std::string id;
    std::string category;
    std::string label;
    std::vector<int> members;  // node indices, sorted, distinct
};

// Terms keyed by id, sorted by id. Rows naming unknown proteins are dropped.
struct AnnotationTable {
    int n_nodes = 0;
    std::vector<AnnotationTerm> terms;
};

AnnotationTable load_annotations(const std::string& path, const SignedGraph& graph);

// All nodes ordered by ascending Euclidean distance between the projected
// embedding A*m_i and archetype column k of the chosen space; ties by index.
std::vector<int> rank_by_archetype_distance(const ModelParams& params, const ModelState& st,
                                            Space space, int k);

// Contiguous rank-order bins of floor(bin_fraction*N) nodes each; the
// remainder joins the last (farthest) bin so the first bin is exact.
struct Bin {
    int start = 0;
    int size = 0;
};
std::vector<Bin> make_bins(int n_ranked, double bin_fraction);

// (|bin ∩ term| / |bin|) / global_density.
double enrichment_value(const std::vector<int>& bin, const std::vector<int>& term_nodes,
                        double global_density);

// P(X >= k) for X ~ hypergeometric(population, successes, draws), in log space.
double hypergeom_sf(long k, long draws, long successes, long population);

// Benjamini-Hochberg step-up at level alpha; flags align with the input order.
std::vector<char> bh_fdr(const std::vector<double>& p_values, double alpha);

// Fraction of replicates in which the first bin's enrichment is strictly
// maximal after resampling every bin's members with replacement.
double p_max_bootstrap(const std::vector<std::vector<int>>& bins,
                       const std::vector<int>& term_nodes, int n_boot, std::uint64_t seed);

struct EnrichConfig {
    int min_proteins = 20;
    double p_threshold = 0.002;
    double alpha = 0.05;
    double p_max_threshold = 0.5;
    double sar_threshold = 0.5;
    int n_boot = 1000;
    std::uint64_t seed = 1;
    std::vector<double> fractions = default_fractions();

    static std::vector<double> default_fractions();  // 1% to 20%, step 1%
};

struct EnrichmentRecord {
    int archetype = 0;
    std::string term;
    double bin_fraction = 0.0;
    double e_first_bin = 0.0;
    double p_value = 1.0;
    bool passes_bh = false;
    double p_max = 0.0;  // bootstrapped only when the first two gates pass
    bool significant = false;
};

struct TermSar {
    std::string term;
    double sar = 0.0;
    bool enriched = false;
};

struct ArchetypeReport {
    int archetype = 0;
    std::vector<EnrichmentRecord> records;  // one per eligible (term, fraction)
    std::vector<TermSar> terms;             // sorted by sar desc, then id
    std::vector<std::string> enriched;      // sar >= threshold
};

ArchetypeReport enrich_archetype_sweep(const ModelParams& params,
                                       const AnnotationTable& annotations, Space space, int k,
                                       const EnrichConfig& cfg = {});

struct EnrichmentReport {
    Space space = Space::pos;
    EnrichConfig config;
    std::vector<ArchetypeReport> archetypes;
};

EnrichmentReport enrich_all_archetypes(const ModelParams& params,
                                       const AnnotationTable& annotations, Space space,
                                       const EnrichConfig& cfg = {});

}  // namespace s2spm
