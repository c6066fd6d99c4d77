#include "s2spm/viz.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

#include "s2spm/errors.hpp"

namespace s2spm {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Fixed six-decimal rendering keeps every emitted file byte-stable.
std::string fmt6(double x) {
    if (x == 0.0) x = 0.0;  // collapse negative zero
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", x);
    return buf;
}

std::string fmt_int(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%lld", static_cast<long long>(x));
    return buf;
}

bool sign_matches(long y, Space space) {
    return space == Space::pos ? y > 0 : y < 0;
}

}  // namespace

CircularLayout circular_layout(const ModelParams& params, const SignedGraph& g, Space space) {
    const Eigen::MatrixXd m = memberships(params, space);
    const int k = static_cast<int>(m.rows());

    CircularLayout layout;
    layout.anchors.resize(2, k);
    for (int a = 0; a < k; ++a) {
        const double angle = 2.0 * kPi * a / k;
        layout.anchors(0, a) = std::cos(angle);
        layout.anchors(1, a) = std::sin(angle);
    }
    layout.node_xy = layout.anchors * m;
    for (const Edge& e : g.edges) {
        if (sign_matches(e.y, space)) layout.edges.push_back(e);
    }
    return layout;
}

Eigen::MatrixXd OrderedAdjacency::to_dense() const {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n_nodes, n_nodes);
    for (const auto& [r, c, v] : entries) m(r, c) = v;
    return m;
}

OrderedAdjacency ordered_adjacency(const ModelParams& params, const SignedGraph& g,
                                   Space space) {
    const Eigen::MatrixXd m = memberships(params, space);
    const int n = static_cast<int>(m.cols());

    std::vector<int> corner(n);
    std::vector<double> strength(n);
    for (int i = 0; i < n; ++i) {
        int best = 0;
        for (int d = 1; d < m.rows(); ++d) {
            if (m(d, i) > m(best, i)) best = d;
        }
        corner[i] = best;
        strength[i] = m(best, i);
    }

    OrderedAdjacency adj;
    adj.n_nodes = n;
    adj.permutation.resize(n);
    std::iota(adj.permutation.begin(), adj.permutation.end(), 0);
    std::sort(adj.permutation.begin(), adj.permutation.end(), [&](int a, int b) {
        if (corner[a] != corner[b]) return corner[a] < corner[b];
        if (strength[a] != strength[b]) return strength[a] > strength[b];
        return a < b;
    });

    std::vector<int> position(n);
    for (int p = 0; p < n; ++p) position[adj.permutation[p]] = p;

    for (const Edge& e : g.edges) {
        if (!sign_matches(e.y, space)) continue;
        const int r = position[e.u];
        const int c = position[e.v];
        const double v = static_cast<double>(e.y);
        adj.entries.emplace_back(r, c, v);
        adj.entries.emplace_back(c, r, v);
    }
    std::sort(adj.entries.begin(), adj.entries.end());
    return adj;
}

Pca2d pca_2d(const Eigen::MatrixXd& points) {
    const Eigen::Index n = points.rows();
    const Eigen::Index d = points.cols();
    if (n < 2 || d < 1) throw std::domain_error("projection needs at least two points");

    const Eigen::RowVectorXd mean = points.colwise().mean();
    const Eigen::MatrixXd centered = points.rowwise() - mean;
    const Eigen::MatrixXd cov =
        centered.transpose() * centered / static_cast<double>(n - 1);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    if (es.info() != Eigen::Success) throw NumericError("eigendecomposition failed");
    Eigen::VectorXd values = es.eigenvalues().cwiseMax(0.0);  // ascending
    const double total = values.sum();
    if (!(total > 0.0)) throw DegeneratePcaError("points have no variance");

    auto direction = [&](Eigen::Index rank) {
        Eigen::VectorXd v = es.eigenvectors().col(d - 1 - rank);
        Eigen::Index arg = 0;
        for (Eigen::Index i = 1; i < d; ++i) {
            if (std::abs(v(i)) > std::abs(v(arg))) arg = i;
        }
        if (v(arg) < 0.0) v = -v;
        return v;
    };

    Pca2d out;
    out.coords.resize(n, 2);
    out.coords.col(0) = centered * direction(0);
    out.explained(0) = values(d - 1) / total;
    if (d >= 2) {
        out.coords.col(1) = centered * direction(1);
        out.explained(1) = values(d - 2) / total;
    } else {
        out.coords.col(1).setZero();
        out.explained(1) = 0.0;
    }
    return out;
}

std::string circular_points_csv(const CircularLayout& layout) {
    std::string out = "element,index,x,y\n";
    for (Eigen::Index a = 0; a < layout.anchors.cols(); ++a) {
        out += "anchor," + std::to_string(a) + "," + fmt6(layout.anchors(0, a)) + "," +
               fmt6(layout.anchors(1, a)) + "\n";
    }
    for (Eigen::Index i = 0; i < layout.node_xy.cols(); ++i) {
        out += "node," + std::to_string(i) + "," + fmt6(layout.node_xy(0, i)) + "," +
               fmt6(layout.node_xy(1, i)) + "\n";
    }
    return out;
}

std::string circular_edges_csv(const CircularLayout& layout) {
    std::string out = "u,v,weight\n";
    for (const Edge& e : layout.edges) {
        out += std::to_string(e.u) + "," + std::to_string(e.v) + "," + std::to_string(e.y) +
               "\n";
    }
    return out;
}

std::string adjacency_csv(const OrderedAdjacency& adj) {
    std::string out = "row,col,value\n";
    for (const auto& [r, c, v] : adj.entries) {
        out += std::to_string(r) + "," + std::to_string(c) + "," + fmt_int(v) + "\n";
    }
    return out;
}

std::string permutation_csv(const OrderedAdjacency& adj) {
    std::string out = "position,node\n";
    for (std::size_t p = 0; p < adj.permutation.size(); ++p) {
        out += std::to_string(p) + "," + std::to_string(adj.permutation[p]) + "\n";
    }
    return out;
}

std::string pca_csv(const Pca2d& pca) {
    std::string out =
        "# explained," + fmt6(pca.explained(0)) + "," + fmt6(pca.explained(1)) + "\n";
    out += "point,pc1,pc2\n";
    for (Eigen::Index i = 0; i < pca.coords.rows(); ++i) {
        out += std::to_string(i) + "," + fmt6(pca.coords(i, 0)) + "," +
               fmt6(pca.coords(i, 1)) + "\n";
    }
    return out;
}

namespace {

std::string svg_open(int w, int h) {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
           std::to_string(w) + "\" height=\"" + std::to_string(h) + "\" viewBox=\"0 0 " +
           std::to_string(w) + " " + std::to_string(h) + "\">\n" +
           "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
}

std::string svg_circle(double cx, double cy, double r, const std::string& fill,
                       const std::string& extra = "") {
    return "<circle cx=\"" + fmt6(cx) + "\" cy=\"" + fmt6(cy) + "\" r=\"" + fmt6(r) +
           "\" fill=\"" + fill + "\"" + extra + "/>\n";
}

std::string svg_line(double x1, double y1, double x2, double y2, const std::string& stroke,
                     const std::string& extra = "") {
    return "<line x1=\"" + fmt6(x1) + "\" y1=\"" + fmt6(y1) + "\" x2=\"" + fmt6(x2) +
           "\" y2=\"" + fmt6(y2) + "\" stroke=\"" + stroke + "\"" + extra + "/>\n";
}

const char* kPosColor = "#2166ac";
const char* kNegColor = "#b2182b";

}  // namespace

std::string circular_layout_svg(const CircularLayout& layout) {
    const double cx = 360.0, cy = 360.0, scale = 300.0;
    auto px = [&](double x) { return cx + scale * x; };
    auto py = [&](double y) { return cy - scale * y; };

    std::string out = svg_open(720, 720);
    out += "<circle cx=\"" + fmt6(cx) + "\" cy=\"" + fmt6(cy) + "\" r=\"" + fmt6(scale) +
           "\" fill=\"none\" stroke=\"#cccccc\"/>\n";
    for (const Edge& e : layout.edges) {
        const char* color = e.y > 0 ? kPosColor : kNegColor;
        out += svg_line(px(layout.node_xy(0, e.u)), py(layout.node_xy(1, e.u)),
                        px(layout.node_xy(0, e.v)), py(layout.node_xy(1, e.v)), color,
                        " stroke-width=\"0.500000\" stroke-opacity=\"0.350000\"");
    }
    for (Eigen::Index i = 0; i < layout.node_xy.cols(); ++i) {
        out += svg_circle(px(layout.node_xy(0, i)), py(layout.node_xy(1, i)), 3.0, "#444444",
                          " fill-opacity=\"0.800000\"");
    }
    for (Eigen::Index a = 0; a < layout.anchors.cols(); ++a) {
        out += svg_circle(px(layout.anchors(0, a)), py(layout.anchors(1, a)), 7.0, "#d95f02");
        out += "<text x=\"" + fmt6(px(1.08 * layout.anchors(0, a))) + "\" y=\"" +
               fmt6(py(1.08 * layout.anchors(1, a))) +
               "\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">A" +
               std::to_string(a) + "</text>\n";
    }
    out += "</svg>\n";
    return out;
}

std::string adjacency_svg(const OrderedAdjacency& adj) {
    const double margin = 20.0, span = 600.0;
    std::string out = svg_open(640, 640);
    out += "<rect x=\"" + fmt6(margin) + "\" y=\"" + fmt6(margin) + "\" width=\"" +
           fmt6(span) + "\" height=\"" + fmt6(span) +
           "\" fill=\"none\" stroke=\"#999999\"/>\n";
    if (adj.n_nodes > 0) {
        const double cell = span / adj.n_nodes;
        const double side = std::max(cell, 1.0);
        for (const auto& [r, c, v] : adj.entries) {
            out += "<rect x=\"" + fmt6(margin + c * cell) + "\" y=\"" +
                   fmt6(margin + r * cell) + "\" width=\"" + fmt6(side) + "\" height=\"" +
                   fmt6(side) + "\" fill=\"" + (v > 0 ? kPosColor : kNegColor) + "\"/>\n";
        }
    }
    out += "</svg>\n";
    return out;
}

std::string pca_svg(const Pca2d& pca) {
    const double margin = 20.0, span = 600.0;
    double lo[2], hi[2];
    for (int c = 0; c < 2; ++c) {
        lo[c] = pca.coords.col(c).minCoeff();
        hi[c] = pca.coords.col(c).maxCoeff();
        const double pad = 0.05 * (hi[c] - lo[c]);
        lo[c] -= pad;
        hi[c] += pad;
        if (hi[c] <= lo[c]) {  // flat axis, park points mid-span
            lo[c] -= 0.5;
            hi[c] += 0.5;
        }
    }
    auto sx = [&](double x) { return margin + span * (x - lo[0]) / (hi[0] - lo[0]); };
    auto sy = [&](double y) { return margin + span * (hi[1] - y) / (hi[1] - lo[1]); };

    std::string out = svg_open(640, 640);
    for (Eigen::Index i = 0; i < pca.coords.rows(); ++i) {
        out += svg_circle(sx(pca.coords(i, 0)), sy(pca.coords(i, 1)), 2.5, "#2c3e50",
                          " fill-opacity=\"0.800000\"");
    }
    out += "<text x=\"24\" y=\"16\" font-family=\"sans-serif\" font-size=\"13\">PC1 " +
           fmt6(100.0 * pca.explained(0)) + "%  PC2 " + fmt6(100.0 * pca.explained(1)) +
           "%</text>\n";
    out += "</svg>\n";
    return out;
}

}  // namespace s2spm
