#include "gmsfem/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "gmsfem/assemble.hpp"
#include "gmsfem/errors.hpp"

namespace gmsfem {

namespace {

constexpr const char* kCacheStamp = "gmsfem-snapshot-cache 1";

void append_value(std::string& out, double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
}

void write_matrix_file(const std::string& path, const char* header_tag, int n, const Vec& values) {
    std::string text;
    text.reserve(values.size() * 20 + 64);
    text += '#';
    text += header_tag;
    text += ' ' + std::to_string(n) + ' ' + std::to_string(n) + '\n';
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            if (i) text += ' ';
            append_value(text, values[j * n + i]);
        }
        text += '\n';
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw ConfigError("write failed for '" + path + "'");
}

} // namespace

void write_cell_field(const std::string& path, int n_fine, const Vec& cells) {
    if (cells.size() != static_cast<Eigen::Index>(n_fine) * n_fine)
        throw ContractError("write_cell_field: value count does not match n_fine");
    write_matrix_file(path, "cells", n_fine, cells);
}

void write_nodal_field(const std::string& path, int n_fine, const Vec& nodal) {
    if (nodal.size() != static_cast<Eigen::Index>(n_fine + 1) * (n_fine + 1))
        throw ContractError("write_nodal_field: value count does not match the node grid");
    write_matrix_file(path, "nodes", n_fine + 1, nodal);
}

Vec read_cell_field(const std::string& path, int& n_fine_out) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open field file '" + path + "'");
    std::string header;
    std::getline(in, header);
    std::istringstream hs(header);
    std::string tag;
    int rows = 0, cols = 0;
    hs >> tag >> rows >> cols;
    if (tag != "#cells" || rows < 1 || rows != cols)
        throw ConfigError("field file '" + path + "' has a malformed header: " + header);
    Vec values(static_cast<Eigen::Index>(rows) * rows);
    for (Eigen::Index k = 0; k < values.size(); ++k)
        if (!(in >> values[k]))
            throw ConfigError("field file '" + path + "' is truncated");
    n_fine_out = rows;
    return values;
}

void save_snapshot_cache(const std::string& path, const SnapshotSpace& space) {
    std::string text;
    text += kCacheStamp;
    text += '\n';
    const auto region_line = [&](const char* name, const Region& r) {
        text += name;
        text += ' ' + std::to_string(r.cx0) + ' ' + std::to_string(r.cy0) + ' ' +
                std::to_string(r.cx1) + ' ' + std::to_string(r.cy1) + ' ' +
                std::to_string(r.anchor) + '\n';
    };
    region_line("omega", space.omega);
    region_line("omega_plus", space.omega_plus);
    text += "columns " + std::to_string(space.size()) + " rows " +
            std::to_string(space.basis_plus.rows()) + '\n';
    for (const auto& c : space.columns)
        text += "col " + std::to_string(c.kind == SnapshotKind::spectral ? 1 : 0) + ' ' +
                std::to_string(c.mu_index) + ' ' + std::to_string(c.local_index) + '\n';
    text += "eigenvalues " + std::to_string(space.eigenvalues.size()) + '\n';
    for (Eigen::Index k = 0; k < space.eigenvalues.size(); ++k) {
        append_value(text, space.eigenvalues[k]);
        text += '\n';
    }
    for (Eigen::Index c = 0; c < space.basis_plus.cols(); ++c)
        for (Eigen::Index r = 0; r < space.basis_plus.rows(); ++r) {
            append_value(text, space.basis_plus(r, c));
            text += '\n';
        }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open snapshot cache '" + path + "' for writing");
    out << text;
    if (!out) throw ConfigError("write failed for snapshot cache '" + path + "'");
}

SnapshotSpace load_snapshot_cache(const std::string& path, const GridHierarchy& grid) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open snapshot cache '" + path + "'");
    std::string stamp;
    std::getline(in, stamp);
    if (stamp != kCacheStamp)
        throw ConfigError("snapshot cache '" + path + "' has unsupported stamp '" + stamp + "'");

    const auto read_region = [&](const char* name) {
        std::string tag;
        int cx0, cy0, cx1, cy1, anchor;
        if (!(in >> tag >> cx0 >> cy0 >> cx1 >> cy1 >> anchor) || tag != name)
            throw ConfigError("snapshot cache '" + path + "': bad region line");
        return make_region(grid, cx0, cy0, cx1, cy1, anchor);
    };
    SnapshotSpace s;
    s.omega = read_region("omega");
    s.omega_plus = read_region("omega_plus");

    std::string tag;
    Eigen::Index m = 0, rows = 0;
    if (!(in >> tag >> m) || tag != "columns" || !(in >> tag >> rows) || tag != "rows")
        throw ConfigError("snapshot cache '" + path + "': bad size line");
    if (rows != s.omega_plus.num_nodes())
        throw ConfigError("snapshot cache '" + path + "' does not match the grid");
    for (Eigen::Index k = 0; k < m; ++k) {
        int kind, mu, local;
        if (!(in >> tag >> kind >> mu >> local) || tag != "col")
            throw ConfigError("snapshot cache '" + path + "': bad column line");
        s.columns.push_back(
            {kind ? SnapshotKind::spectral : SnapshotKind::harmonic, mu, local});
    }
    Eigen::Index n_eigs = 0;
    if (!(in >> tag >> n_eigs) || tag != "eigenvalues")
        throw ConfigError("snapshot cache '" + path + "': bad eigenvalue line");
    s.eigenvalues.resize(n_eigs);
    for (Eigen::Index k = 0; k < n_eigs; ++k)
        if (!(in >> s.eigenvalues[k]))
            throw ConfigError("snapshot cache '" + path + "' is truncated");
    s.basis_plus.resize(rows, m);
    for (Eigen::Index c = 0; c < m; ++c)
        for (Eigen::Index r = 0; r < rows; ++r)
            if (!(in >> s.basis_plus(r, c)))
                throw ConfigError("snapshot cache '" + path + "' is truncated");
    s.basis = restrict_to(grid, s.basis_plus, s.omega_plus, s.omega);
    return s;
}

} // namespace gmsfem
