#include "sfvem/polymesh.hpp"

#include <cmath>
#include <map>
#include <set>

namespace sfvem {

namespace {

double orient(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c)
{
    return (b - a).x() * (c - a).y() - (b - a).y() * (c - a).x();
}

/// Segments [a,b] and [c,d] cross or touch away from shared endpoints. `tol` is an area
/// tolerance for the orientation tests.
bool segments_intersect(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                        const Eigen::Vector2d& c, const Eigen::Vector2d& d, double tol)
{
    const double o1 = orient(a, b, c);
    const double o2 = orient(a, b, d);
    const double o3 = orient(c, d, a);
    const double o4 = orient(c, d, b);
    if (((o1 > tol && o2 < -tol) || (o1 < -tol && o2 > tol))
        && ((o3 > tol && o4 < -tol) || (o3 < -tol && o4 > tol))) {
        return true;
    }
    auto on_segment = [tol](const Eigen::Vector2d& p, const Eigen::Vector2d& q, const Eigen::Vector2d& r,
                            double o) {
        if (std::abs(o) > tol) {
            return false;
        }
        const double t = (r - p).dot(q - p) / (q - p).squaredNorm();
        return t > 1e-12 && t < 1 - 1e-12;
    };
    return on_segment(a, b, c, o1) || on_segment(a, b, d, o2) || on_segment(c, d, a, o3)
           || on_segment(c, d, b, o4);
}

/// First pair of non-adjacent loop edges that intersect, or {-1,-1}.
std::pair<int, int> self_intersection(const std::vector<Eigen::Vector2d>& loop, double tol)
{
    const int n = static_cast<int>(loop.size());
    for (int i = 0; i < n; ++i) {
        for (int j = i + 2; j < n; ++j) {
            if (i == 0 && j == n - 1) {
                continue;
            }
            if (segments_intersect(loop[i], loop[(i + 1) % n], loop[j], loop[(j + 1) % n], tol)) {
                return {i, j};
            }
        }
    }
    return {-1, -1};
}

bool strictly_inside(const Eigen::Vector2d& p, const std::vector<Eigen::Vector2d>& loop, double tol)
{
    const int n = static_cast<int>(loop.size());
    int winding = 0;
    for (int i = 0; i < n; ++i) {
        const auto& a = loop[i];
        const auto& b = loop[(i + 1) % n];
        // on the boundary counts as outside
        const double o = orient(a, b, p);
        if (std::abs(o) <= tol) {
            const double t = (p - a).dot(b - a) / (b - a).squaredNorm();
            if (t >= -1e-12 && t <= 1 + 1e-12) {
                return false;
            }
        }
        if (a.y() <= p.y()) {
            if (b.y() > p.y() && o > 0) {
                ++winding;
            }
        } else if (b.y() <= p.y() && o < 0) {
            --winding;
        }
    }
    return winding != 0;
}

bool distinct_count_ok(const std::vector<int>& loop)
{
    std::set<int> s(loop.begin(), loop.end());
    return s.size() == loop.size() && s.size() >= 3;
}

/// Pairs of cells whose bounding boxes overlap, via a uniform bucket grid.
std::set<std::pair<int, int>> candidate_pairs(const std::vector<Eigen::AlignedBox2d>& boxes)
{
    std::set<std::pair<int, int>> pairs;
    if (boxes.empty()) {
        return pairs;
    }
    Eigen::AlignedBox2d all;
    for (const auto& b : boxes) {
        all.extend(b);
    }
    const int g = std::max(1, static_cast<int>(std::sqrt(double(boxes.size()))));
    const Eigen::Vector2d lo = all.min();
    const Eigen::Vector2d span = (all.max() - all.min()).cwiseMax(1e-300);
    auto bucket = [&](double v, int axis) {
        return std::clamp(static_cast<int>((v - lo[axis]) / span[axis] * g), 0, g - 1);
    };
    std::vector<std::vector<int>> grid(static_cast<std::size_t>(g) * g);
    for (int c = 0; c < static_cast<int>(boxes.size()); ++c) {
        for (int j = bucket(boxes[c].min().y(), 1); j <= bucket(boxes[c].max().y(), 1); ++j) {
            for (int i = bucket(boxes[c].min().x(), 0); i <= bucket(boxes[c].max().x(), 0); ++i) {
                grid[i + g * j].push_back(c);
            }
        }
    }
    for (const auto& cellset : grid) {
        for (std::size_t a = 0; a < cellset.size(); ++a) {
            for (std::size_t b = a + 1; b < cellset.size(); ++b) {
                const int p = std::min(cellset[a], cellset[b]);
                const int q = std::max(cellset[a], cellset[b]);
                if (boxes[p].intersects(boxes[q])) {
                    pairs.insert({p, q});
                }
            }
        }
    }
    return pairs;
}

} // namespace

ValidationReport validate_mesh(const PolyMesh2D& mesh)
{
    ValidationReport report;
    const int nc = mesh.num_cells();
    const double h = mesh_size(mesh);
    const double tol = 1e-12 * h * h;

    std::string bad_count, bad_orient, bad_simple;
    std::vector<std::vector<Eigen::Vector2d>> loops(nc);
    std::vector<Eigen::AlignedBox2d> boxes(nc);
    double area_sum = 0.0;
    for (int c = 0; c < nc; ++c) {
        loops[c] = cell_points(mesh, c);
        for (const auto& p : loops[c]) {
            boxes[c].extend(p);
        }
        if (bad_count.empty() && !distinct_count_ok(mesh.cells[c])) {
            bad_count = "cell " + std::to_string(c);
        }
        const double a = signed_area(loops[c]);
        area_sum += a;
        if (bad_orient.empty() && !(a > 0.0)) {
            bad_orient = "cell " + std::to_string(c);
        }
        if (bad_simple.empty()) {
            const auto [i, j] = self_intersection(loops[c], tol);
            if (i >= 0) {
                bad_simple = "cell " + std::to_string(c) + " edges " + std::to_string(i) + " and "
                             + std::to_string(j);
            }
        }
    }
    report.add("cell-vertex-count", bad_count.empty(), bad_count);
    report.add("cell-orientation", bad_orient.empty(), bad_orient);
    report.add("cell-simple", bad_simple.empty(), bad_simple);

    std::string bad_manifold, bad_edge_orient;
    for (int e = 0; e < mesh.num_edges(); ++e) {
        const auto& edge = mesh.edges[e];
        if (edge.cells[0] < 0 && bad_manifold.empty()) {
            bad_manifold = "edge " + std::to_string(e);
        }
        if (edge.cells[1] < 0) {
            continue;
        }
        // an interior edge must be traversed in opposite directions by its two cells
        auto direction = [&](int c) {
            const auto& loop = mesh.cells[c];
            const int n = static_cast<int>(loop.size());
            for (int i = 0; i < n; ++i) {
                if (mesh.cell_edges[c][i] == e) {
                    return loop[i] == edge.vertices[0] ? 1 : -1;
                }
            }
            return 0;
        };
        if (direction(edge.cells[0]) != -direction(edge.cells[1]) && bad_edge_orient.empty()) {
            bad_edge_orient = "edge " + std::to_string(e);
        }
    }
    report.add("edge-manifold", bad_manifold.empty(), bad_manifold);
    report.add("edge-orientation", bad_edge_orient.empty(), bad_edge_orient);

    // Tiling: no two cells overlap and the cell areas add up to the area bounded by the
    // boundary edges.
    std::string bad_tiling;
    for (const auto& [p, q] : candidate_pairs(boxes)) {
        const auto& lp = loops[p];
        const auto& lq = loops[q];
        for (std::size_t i = 0; i < lp.size() && bad_tiling.empty(); ++i) {
            for (std::size_t j = 0; j < lq.size() && bad_tiling.empty(); ++j) {
                if (segments_intersect(lp[i], lp[(i + 1) % lp.size()], lq[j], lq[(j + 1) % lq.size()], tol)) {
                    bad_tiling = "cells " + std::to_string(p) + " and " + std::to_string(q) + " overlap";
                }
            }
        }
        for (const auto& v : lp) {
            if (bad_tiling.empty() && strictly_inside(v, lq, tol)) {
                bad_tiling = "cells " + std::to_string(p) + " and " + std::to_string(q) + " overlap";
            }
        }
        for (const auto& v : lq) {
            if (bad_tiling.empty() && strictly_inside(v, lp, tol)) {
                bad_tiling = "cells " + std::to_string(p) + " and " + std::to_string(q) + " overlap";
            }
        }
        if (!bad_tiling.empty()) {
            break;
        }
    }
    double domain_area = 0.0;
    for (int c = 0; c < nc; ++c) {
        const auto& loop = mesh.cells[c];
        const int n = static_cast<int>(loop.size());
        for (int i = 0; i < n; ++i) {
            if (!mesh.boundary_edge[mesh.cell_edges[c][i]]) {
                continue;
            }
            const auto& a = mesh.vertices[loop[i]];
            const auto& b = mesh.vertices[loop[(i + 1) % n]];
            domain_area += 0.5 * (a.x() * b.y() - b.x() * a.y());
        }
    }
    if (bad_tiling.empty() && std::abs(area_sum - domain_area) > 1e-12 * std::abs(domain_area)) {
        bad_tiling = "cell areas " + std::to_string(area_sum) + " vs domain " + std::to_string(domain_area);
    }
    report.add("area-sum", bad_tiling.empty(), bad_tiling);
    return report;
}

ValidationReport validate_mesh(const PolyMesh3D& mesh)
{
    ValidationReport report;

    std::string bad_count, bad_planar, bad_simple;
    std::vector<FaceFrame> frames(mesh.num_faces());
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const auto& loop = mesh.faces[f];
        if (!distinct_count_ok(loop)) {
            if (bad_count.empty()) {
                bad_count = "face " + std::to_string(f);
            }
            continue;
        }
        frames[f] = face_frame(mesh, f);
        const auto& fr = frames[f];
        double dist = 0.0;
        std::vector<Eigen::Vector2d> planar;
        for (int v : loop) {
            dist = std::max(dist, std::abs((mesh.vertices[v] - fr.origin).dot(fr.normal)));
            planar.push_back(fr.to_plane(mesh.vertices[v]));
        }
        if (dist > 1e-10 * fr.diameter && bad_planar.empty()) {
            bad_planar = "face " + std::to_string(f);
        }
        if (bad_simple.empty()
            && (self_intersection(planar, 1e-12 * fr.diameter * fr.diameter).first >= 0
                || signed_area(planar) <= 0.0)) {
            bad_simple = "face " + std::to_string(f);
        }
    }
    report.add("face-vertex-count", bad_count.empty(), bad_count);
    report.add("face-planarity", bad_planar.empty(), bad_planar);
    report.add("face-simple", bad_simple.empty(), bad_simple);

    std::string bad_manifold, bad_orient;
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const auto& fc = mesh.face_cells[f];
        if (fc[0] < 0 && bad_manifold.empty()) {
            bad_manifold = "face " + std::to_string(f) + " belongs to no cell";
        }
        if (fc[1] < 0) {
            continue;
        }
        auto sign_in = [&](int c) {
            for (const auto& sf : mesh.cells[c]) {
                if (sf.face == f) {
                    return sf.sign;
                }
            }
            return 0;
        };
        if (sign_in(fc[0]) != -sign_in(fc[1]) && bad_orient.empty()) {
            bad_orient = "face " + std::to_string(f);
        }
    }
    report.add("face-manifold", bad_manifold.empty(), bad_manifold);
    report.add("face-orientation", bad_orient.empty(), bad_orient);

    std::string bad_closed, bad_volume;
    double volume_sum = 0.0;
    for (int c = 0; c < mesh.num_cells(); ++c) {
        std::map<std::pair<int, int>, int> directed;
        double divergence = 0.0;
        for (const auto& sf : mesh.cells[c]) {
            const auto& loop = mesh.faces[sf.face];
            const int n = static_cast<int>(loop.size());
            for (int i = 0; i < n; ++i) {
                int a = loop[i];
                int b = loop[(i + 1) % n];
                if (sf.sign < 0) {
                    std::swap(a, b);
                }
                ++directed[{a, b}];
            }
            const auto& fr = frames[sf.face];
            divergence += sf.sign * fr.origin.dot(fr.normal) * fr.area / 3.0;
        }
        bool closed = true;
        for (const auto& [edge, count] : directed) {
            auto rev = directed.find({edge.second, edge.first});
            closed = closed && count == 1 && rev != directed.end() && rev->second == 1;
        }
        if (!closed && bad_closed.empty()) {
            bad_closed = "cell " + std::to_string(c);
        }
        const double tet_volume = cell_volume(mesh, c);
        volume_sum += tet_volume;
        if (bad_volume.empty()
            && (!(divergence > 0.0) || std::abs(divergence - tet_volume) > 1e-10 * std::abs(tet_volume))) {
            bad_volume = "cell " + std::to_string(c);
        }
    }
    report.add("cell-watertight", bad_closed.empty(), bad_closed);
    report.add("cell-volume", bad_volume.empty(), bad_volume);

    double domain_volume = 0.0;
    for (int c = 0; c < mesh.num_cells(); ++c) {
        for (const auto& sf : mesh.cells[c]) {
            if (mesh.boundary_face[sf.face]) {
                const auto& fr = frames[sf.face];
                domain_volume += sf.sign * fr.origin.dot(fr.normal) * fr.area / 3.0;
            }
        }
    }
    const bool vol_ok = std::abs(volume_sum - domain_volume) <= 1e-10 * std::abs(domain_volume);
    report.add("volume-sum", vol_ok,
               vol_ok ? std::string{} : "cell volumes " + std::to_string(volume_sum) + " vs domain "
                                            + std::to_string(domain_volume));
    return report;
}

} // namespace sfvem
