#pragma once

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace biharm {

enum class GridKind { graded, uniform };

inline const char* to_string(GridKind k) { return k == GridKind::graded ? "graded" : "uniform"; }

/// Radial mesh on (0,1]. The origin is excluded; regularity there is handled
/// by the operator assembly (zero flux through the r=0 face). The default
/// spacing is the smoothstep map s^2(3-2s), which clusters nodes quadratically
/// at both endpoints.
struct RadialGrid {
    std::vector<double> nodes;  // strictly increasing, last node == 1
    int dim = 0;
    GridKind kind = GridKind::graded;

    static RadialGrid make(int node_count, int n, GridKind kind = GridKind::graded) {
        if (node_count < 4) throw std::invalid_argument("RadialGrid: need at least 4 nodes");
        if (n < 5) throw std::invalid_argument("RadialGrid: dimension must be >= 5");
        RadialGrid g;
        g.dim = n;
        g.kind = kind;
        g.nodes.resize(static_cast<std::size_t>(node_count));
        for (int j = 1; j <= node_count; ++j) {
            const double s = static_cast<double>(j) / node_count;
            g.nodes[static_cast<std::size_t>(j - 1)] = (kind == GridKind::graded) ? s * s * (3.0 - 2.0 * s) : s;
        }
        g.nodes.back() = 1.0;
        g.validate();
        return g;
    }

    void validate() const {
        if (nodes.size() < 4) throw std::invalid_argument("RadialGrid: too few nodes");
        if (!(nodes.front() > 0.0)) throw std::invalid_argument("RadialGrid: first node must be > 0");
        if (nodes.back() != 1.0) throw std::invalid_argument("RadialGrid: last node must be 1");
        for (std::size_t i = 1; i < nodes.size(); ++i)
            if (!(nodes[i] > nodes[i - 1])) throw std::invalid_argument("RadialGrid: nodes must strictly increase");
    }

    std::size_t size() const { return nodes.size(); }
};

/// Nodal values of a radial function on a RadialGrid.
struct RadialField {
    RadialGrid grid;
    std::vector<double> values;

    RadialField() = default;
    RadialField(RadialGrid g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
        if (grid.nodes.size() != values.size())
            throw std::invalid_argument("RadialField: value count must match grid");
        for (double x : values)
            if (!std::isfinite(x)) throw std::invalid_argument("RadialField: values must be finite");
    }
};

inline void write_csv(const RadialField& f, std::ostream& os) {
    os << "r,value\n";
    os.precision(17);
    for (std::size_t i = 0; i < f.values.size(); ++i)
        os << f.grid.nodes[i] << ',' << f.values[i] << '\n';
}

inline void write_csv(const RadialField& f, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_csv: cannot open " + path);
    write_csv(f, os);
}

inline RadialField read_csv(std::istream& is, int n) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("r,value", 0) != 0)
        throw std::runtime_error("read_csv: missing r,value header");
    RadialGrid g;
    g.dim = n;
    std::vector<double> vals;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        double r = 0, v = 0;
        char comma = 0;
        if (!(ls >> r >> comma >> v) || comma != ',')
            throw std::runtime_error("read_csv: malformed row '" + line + "'");
        g.nodes.push_back(r);
        vals.push_back(v);
    }
    g.validate();
    return RadialField(std::move(g), std::move(vals));
}

}  // namespace biharm
