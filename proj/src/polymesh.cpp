#include "sfvem/polymesh.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace sfvem {

namespace {

std::string edge_name(int a, int b)
{
    return "edge (" + std::to_string(std::min(a, b)) + "," + std::to_string(std::max(a, b)) + ")";
}

} // namespace

double signed_area(std::span<const Eigen::Vector2d> loop)
{
    // anchored at the first vertex: small cells far from the origin keep full precision
    const std::size_t n = loop.size();
    double a = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const Eigen::Vector2d p = loop[i] - loop[0];
        const Eigen::Vector2d q = loop[i + 1] - loop[0];
        a += p.x() * q.y() - q.x() * p.y();
    }
    return 0.5 * a;
}

Eigen::Vector2d polygon_centroid(std::span<const Eigen::Vector2d> loop)
{
    const std::size_t n = loop.size();
    Eigen::Vector2d c = Eigen::Vector2d::Zero();
    double a = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const Eigen::Vector2d p = loop[i] - loop[0];
        const Eigen::Vector2d q = loop[i + 1] - loop[0];
        const double cr = p.x() * q.y() - q.x() * p.y();
        a += cr;
        c += cr * (p + q);
    }
    return loop[0] + c / (3.0 * a);
}

PolyMesh2D make_mesh(std::vector<Eigen::Vector2d> vertices,
                     std::vector<std::vector<int>> cells,
                     Orientation mode)
{
    PolyMesh2D mesh;
    mesh.vertices = std::move(vertices);
    mesh.cells = std::move(cells);
    const int nv = mesh.num_vertices();

    for (int c = 0; c < mesh.num_cells(); ++c) {
        auto& loop = mesh.cells[c];
        if (loop.size() < 3) {
            throw TopologyError("cell " + std::to_string(c) + " has fewer than 3 vertices");
        }
        for (int v : loop) {
            if (v < 0 || v >= nv) {
                throw TopologyError("cell " + std::to_string(c) + " references vertex "
                                    + std::to_string(v) + " out of range");
            }
        }
        if (cell_area(mesh, c) < 0.0) {
            if (mode == Orientation::Strict) {
                throw TopologyError("cell " + std::to_string(c) + " is clockwise");
            }
            std::reverse(loop.begin(), loop.end());
        }
    }

    std::map<std::pair<int, int>, int> edge_ids;
    mesh.cell_edges.resize(mesh.cells.size());
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const auto& loop = mesh.cells[c];
        const int n = static_cast<int>(loop.size());
        for (int i = 0; i < n; ++i) {
            const int a = loop[i];
            const int b = loop[(i + 1) % n];
            const auto key = ordered_pair(a, b);
            auto [it, inserted] = edge_ids.try_emplace({key.first, key.second}, mesh.num_edges());
            if (inserted) {
                MeshEdge e;
                e.vertices = {key.first, key.second};
                e.cells = {c, -1};
                mesh.edges.push_back(e);
            } else {
                auto& e = mesh.edges[it->second];
                if (e.cells[1] >= 0) {
                    throw TopologyError(edge_name(a, b) + " is used by more than two cells");
                }
                e.cells[1] = c;
            }
            mesh.cell_edges[c].push_back(it->second);
        }
    }

    mesh.boundary_edge.assign(mesh.edges.size(), false);
    mesh.boundary_vertex.assign(mesh.vertices.size(), false);
    for (int e = 0; e < mesh.num_edges(); ++e) {
        if (mesh.edges[e].cells[1] < 0) {
            mesh.boundary_edge[e] = true;
            mesh.boundary_vertex[mesh.edges[e].vertices[0]] = true;
            mesh.boundary_vertex[mesh.edges[e].vertices[1]] = true;
        }
    }
    return mesh;
}

std::vector<Eigen::Vector2d> cell_points(const PolyMesh2D& mesh, int cell)
{
    std::vector<Eigen::Vector2d> pts;
    pts.reserve(mesh.cells[cell].size());
    for (int v : mesh.cells[cell]) {
        pts.push_back(mesh.vertices[v]);
    }
    return pts;
}

double cell_area(const PolyMesh2D& mesh, int cell)
{
    const auto pts = cell_points(mesh, cell);
    return signed_area(pts);
}

double cell_diameter(const PolyMesh2D& mesh, int cell)
{
    const auto pts = cell_points(mesh, cell);
    return diameter<Eigen::Vector2d>(pts);
}

double mesh_size(const PolyMesh2D& mesh)
{
    double h = 0.0;
    for (int c = 0; c < mesh.num_cells(); ++c) {
        h = std::max(h, cell_diameter(mesh, c));
    }
    return h;
}

// 3D ---------------------------------------------------------------------------------------

namespace {

/// Newell normal scaled by area.
Eigen::Vector3d area_vector(const PolyMesh3D& mesh, const std::vector<int>& loop)
{
    Eigen::Vector3d n = Eigen::Vector3d::Zero();
    const std::size_t m = loop.size();
    for (std::size_t i = 0; i < m; ++i) {
        n += mesh.vertices[loop[i]].cross(mesh.vertices[loop[(i + 1) % m]]);
    }
    return 0.5 * n;
}

/// Signed volume of the cone from `apex` over all signed faces of a cell (fan-triangulated).
double cone_volume(const PolyMesh3D& mesh, int cell, const Eigen::Vector3d& apex)
{
    double vol = 0.0;
    for (const auto& sf : mesh.cells[cell]) {
        const auto& loop = mesh.faces[sf.face];
        const Eigen::Vector3d& p0 = mesh.vertices[loop[0]];
        for (std::size_t i = 1; i + 1 < loop.size(); ++i) {
            const Eigen::Vector3d& p1 = mesh.vertices[loop[i]];
            const Eigen::Vector3d& p2 = mesh.vertices[loop[i + 1]];
            vol += sf.sign * (p0 - apex).dot((p1 - apex).cross(p2 - apex)) / 6.0;
        }
    }
    return vol;
}

} // namespace

FaceFrame face_frame(const PolyMesh3D& mesh, int face)
{
    const auto& loop = mesh.faces[face];
    FaceFrame fr;
    const Eigen::Vector3d av = area_vector(mesh, loop);
    fr.area = av.norm();
    fr.normal = av / fr.area;
    fr.t1 = (mesh.vertices[loop[1]] - mesh.vertices[loop[0]]).normalized();
    fr.t1 = (fr.t1 - fr.t1.dot(fr.normal) * fr.normal).normalized();
    fr.t2 = fr.normal.cross(fr.t1);

    // centroid of the fan triangles
    Eigen::Vector3d c = Eigen::Vector3d::Zero();
    double total = 0.0;
    const Eigen::Vector3d& p0 = mesh.vertices[loop[0]];
    for (std::size_t i = 1; i + 1 < loop.size(); ++i) {
        const Eigen::Vector3d& p1 = mesh.vertices[loop[i]];
        const Eigen::Vector3d& p2 = mesh.vertices[loop[i + 1]];
        const double a = 0.5 * (p1 - p0).cross(p2 - p0).dot(fr.normal);
        c += a * (p0 + p1 + p2) / 3.0;
        total += a;
    }
    fr.origin = c / total;

    std::vector<Eigen::Vector3d> pts;
    for (int v : loop) {
        pts.push_back(mesh.vertices[v]);
    }
    fr.diameter = diameter<Eigen::Vector3d>(pts);
    return fr;
}

double cell_volume(const PolyMesh3D& mesh, int cell)
{
    Eigen::Vector3d apex = Eigen::Vector3d::Zero();
    for (int v : mesh.cell_vertices[cell]) {
        apex += mesh.vertices[v];
    }
    apex /= static_cast<double>(mesh.cell_vertices[cell].size());
    return cone_volume(mesh, cell, apex);
}

Eigen::Vector3d cell_centroid(const PolyMesh3D& mesh, int cell)
{
    Eigen::Vector3d apex = Eigen::Vector3d::Zero();
    for (int v : mesh.cell_vertices[cell]) {
        apex += mesh.vertices[v];
    }
    apex /= static_cast<double>(mesh.cell_vertices[cell].size());

    Eigen::Vector3d c = Eigen::Vector3d::Zero();
    double vol = 0.0;
    for (const auto& sf : mesh.cells[cell]) {
        const auto& loop = mesh.faces[sf.face];
        const Eigen::Vector3d& p0 = mesh.vertices[loop[0]];
        for (std::size_t i = 1; i + 1 < loop.size(); ++i) {
            const Eigen::Vector3d& p1 = mesh.vertices[loop[i]];
            const Eigen::Vector3d& p2 = mesh.vertices[loop[i + 1]];
            const double v = sf.sign * (p0 - apex).dot((p1 - apex).cross(p2 - apex)) / 6.0;
            c += v * (apex + p0 + p1 + p2) / 4.0;
            vol += v;
        }
    }
    return c / vol;
}

double cell_diameter(const PolyMesh3D& mesh, int cell)
{
    std::vector<Eigen::Vector3d> pts;
    for (int v : mesh.cell_vertices[cell]) {
        pts.push_back(mesh.vertices[v]);
    }
    return diameter<Eigen::Vector3d>(pts);
}

double mesh_size(const PolyMesh3D& mesh)
{
    double h = 0.0;
    for (int c = 0; c < mesh.num_cells(); ++c) {
        h = std::max(h, cell_diameter(mesh, c));
    }
    return h;
}

PolyMesh3D make_mesh(std::vector<Eigen::Vector3d> vertices,
                     std::vector<std::vector<int>> faces,
                     std::vector<std::vector<SignedFace>> cells,
                     Orientation mode)
{
    PolyMesh3D mesh;
    mesh.vertices = std::move(vertices);
    mesh.faces = std::move(faces);
    mesh.cells = std::move(cells);
    const int nv = mesh.num_vertices();
    const int nf = mesh.num_faces();

    std::map<std::pair<int, int>, int> edge_ids;
    mesh.face_edges.resize(nf);
    for (int f = 0; f < nf; ++f) {
        const auto& loop = mesh.faces[f];
        if (loop.size() < 3) {
            throw TopologyError("face " + std::to_string(f) + " has fewer than 3 vertices");
        }
        const int n = static_cast<int>(loop.size());
        for (int i = 0; i < n; ++i) {
            if (loop[i] < 0 || loop[i] >= nv) {
                throw TopologyError("face " + std::to_string(f) + " references vertex "
                                    + std::to_string(loop[i]) + " out of range");
            }
        }
        for (int i = 0; i < n; ++i) {
            const auto key = ordered_pair(loop[i], loop[(i + 1) % n]);
            auto [it, inserted] = edge_ids.try_emplace({key.first, key.second}, mesh.num_edges());
            if (inserted) {
                mesh.edges.push_back({key.first, key.second});
            }
            mesh.face_edges[f].push_back(it->second);
        }
    }

    mesh.face_cells.assign(nf, {-1, -1});
    mesh.cell_vertices.resize(mesh.cells.size());
    mesh.cell_edges.resize(mesh.cells.size());
    for (int c = 0; c < mesh.num_cells(); ++c) {
        std::set<int> verts;
        std::set<int> cedges;
        for (auto& sf : mesh.cells[c]) {
            if (sf.face < 0 || sf.face >= nf) {
                throw TopologyError("cell " + std::to_string(c) + " references face "
                                    + std::to_string(sf.face) + " out of range");
            }
            if (sf.sign != 1 && sf.sign != -1) {
                throw TopologyError("cell " + std::to_string(c) + " has a face sign other than +/-1");
            }
            auto& fc = mesh.face_cells[sf.face];
            if (fc[0] < 0) {
                fc[0] = c;
            } else if (fc[1] < 0) {
                fc[1] = c;
            } else {
                throw TopologyError("face " + std::to_string(sf.face)
                                    + " is used by more than two cells");
            }
            verts.insert(mesh.faces[sf.face].begin(), mesh.faces[sf.face].end());
            cedges.insert(mesh.face_edges[sf.face].begin(), mesh.face_edges[sf.face].end());
        }
        mesh.cell_vertices[c].assign(verts.begin(), verts.end());
        mesh.cell_edges[c].assign(cedges.begin(), cedges.end());

        if (cell_volume(mesh, c) < 0.0) {
            if (mode == Orientation::Strict) {
                throw TopologyError("cell " + std::to_string(c) + " has inward face orientation");
            }
            for (auto& sf : mesh.cells[c]) {
                sf.sign = -sf.sign;
            }
        }
    }

    mesh.boundary_face.assign(nf, false);
    mesh.boundary_edge.assign(mesh.edges.size(), false);
    mesh.boundary_vertex.assign(nv, false);
    for (int f = 0; f < nf; ++f) {
        if (mesh.face_cells[f][1] >= 0) {
            continue;
        }
        mesh.boundary_face[f] = true;
        for (int e : mesh.face_edges[f]) {
            mesh.boundary_edge[e] = true;
        }
        for (int v : mesh.faces[f]) {
            mesh.boundary_vertex[v] = true;
        }
    }
    return mesh;
}

bool operator==(const PolyMesh2D& a, const PolyMesh2D& b)
{
    return a.vertices == b.vertices && a.cells == b.cells;
}

bool operator==(const PolyMesh3D& a, const PolyMesh3D& b)
{
    return a.vertices == b.vertices && a.faces == b.faces && a.cells == b.cells;
}

} // namespace sfvem
