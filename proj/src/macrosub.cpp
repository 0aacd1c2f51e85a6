#include "sfvem/macrosub.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace sfvem {

template <int Dim>
double MacroSubdivision<Dim>::simplex_measure(int s) const
{
    Eigen::Matrix<double, Dim, Dim> jac;
    for (int j = 0; j < Dim; ++j) {
        jac.col(j) = points[simplices[s][j + 1]] - points[simplices[s][0]];
    }
    return jac.determinant() / (Dim == 2 ? 2.0 : 6.0);
}

template struct MacroSubdivision<2>;
template struct MacroSubdivision<3>;

namespace {

double cross2(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c)
{
    return (b - a).x() * (c - a).y() - (b - a).y() * (c - a).x();
}

/// Triangles of a CCW polygon as loop positions; n denotes the added barycenter.
std::vector<std::array<int, 3>> triangulate_loop(std::span<const Eigen::Vector2d> loop)
{
    const int n = static_cast<int>(loop.size());
    if (n < 3) {
        throw GeometryError("polygon has fewer than 3 vertices");
    }
    const double h = diameter<Eigen::Vector2d>(loop);
    const double area = signed_area(loop);
    if (!(area >= kShapeTolerance * h * h)) {
        throw GeometryError("degenerate or clockwise polygon (area " + std::to_string(area) + ")");
    }
    std::vector<std::array<int, 3>> tris;
    if (n == 3) {
        for (int i = 0; i < 3; ++i) {
            tris.push_back({i, (i + 1) % 3, 3});
        }
        return tris;
    }

    const double eps = 1e-12 * h * h;
    std::vector<int> remaining(n);
    for (int i = 0; i < n; ++i) {
        remaining[i] = i;
    }
    while (remaining.size() > 3) {
        const int m = static_cast<int>(remaining.size());
        bool clipped = false;
        for (int i = 0; i < m && !clipped; ++i) {
            const int a = remaining[(i + m - 1) % m];
            const int b = remaining[i];
            const int c = remaining[(i + 1) % m];
            if (cross2(loop[a], loop[b], loop[c]) <= eps) {
                continue;
            }
            bool blocked = false;
            for (int v : remaining) {
                if (v == a || v == b || v == c) {
                    continue;
                }
                // closed triangle: a vertex on the diagonal also blocks the ear
                if (cross2(loop[a], loop[b], loop[v]) >= -eps && cross2(loop[b], loop[c], loop[v]) >= -eps
                    && cross2(loop[c], loop[a], loop[v]) >= -eps) {
                    blocked = true;
                    break;
                }
            }
            if (blocked) {
                continue;
            }
            tris.push_back({a, b, c});
            remaining.erase(remaining.begin() + i);
            clipped = true;
        }
        if (!clipped) {
            throw GeometryError("ear clipping failed: polygon is not simple");
        }
    }
    tris.push_back({remaining[0], remaining[1], remaining[2]});
    return tris;
}

} // namespace

MacroSubdivision<2> subdivide_polygon(std::span<const Eigen::Vector2d> loop)
{
    const int n = static_cast<int>(loop.size());
    const auto tris = triangulate_loop(loop);

    MacroSubdivision<2> sub;
    sub.points.assign(loop.begin(), loop.end());
    for (int i = 0; i < n; ++i) {
        sub.parent_vertices.push_back(i);
        sub.parent_edges.push_back({i, (i + 1) % n});
        sub.parent_edge_ids.push_back(i);
    }
    if (n == 3) {
        AddedPoint<2> p;
        p.coords = (loop[0] + loop[1] + loop[2]) / 3.0;
        p.host = HostKind::CellInterior;
        sub.added.push_back(p);
        sub.points.push_back(p.coords);
    }
    sub.measure = signed_area(loop);
    sub.diameter = diameter<Eigen::Vector2d>(loop);

    std::map<std::pair<int, int>, int> edge_index;
    for (int i = 0; i < n; ++i) {
        const auto key = ordered_pair(i, (i + 1) % n);
        edge_index[{key.first, key.second}] = i;
    }
    for (const auto& t : tris) {
        sub.simplices.push_back({t[0], t[1], t[2]});
        std::array<FacetParent, 3> facets;
        for (int j = 0; j < 3; ++j) {
            const auto key = ordered_pair(t[(j + 1) % 3], t[(j + 2) % 3]);
            if (auto it = edge_index.find({key.first, key.second}); it != edge_index.end()) {
                facets[j] = {FacetKind::ParentEdge, it->second};
            }
        }
        sub.facets.push_back(facets);
    }
    return sub;
}

MacroSubdivision<2> subdivide_cell(const PolyMesh2D& mesh, int cell)
{
    const auto pts = cell_points(mesh, cell);
    MacroSubdivision<2> sub = subdivide_polygon(pts);
    sub.cell = cell;
    sub.parent_vertices = mesh.cells[cell];
    sub.parent_edge_ids = mesh.cell_edges[cell];
    return sub;
}

MeshSubdivision<2> subdivide_mesh(const PolyMesh2D& mesh)
{
    MeshSubdivision<2> out;
    out.cells.reserve(mesh.num_cells());
    for (int c = 0; c < mesh.num_cells(); ++c) {
        out.cells.push_back(subdivide_cell(mesh, c));
    }
    return out;
}

// 3D ---------------------------------------------------------------------------------------

SubdivisionStrategy parse_strategy(const std::string& name)
{
    if (name == "auto") {
        return SubdivisionStrategy::Auto;
    }
    if (name == "kuhn") {
        return SubdivisionStrategy::Kuhn;
    }
    if (name == "center") {
        return SubdivisionStrategy::Center;
    }
    throw std::invalid_argument("unknown subdivision strategy '" + name + "'");
}

std::string to_string(SubdivisionStrategy strategy)
{
    switch (strategy) {
    case SubdivisionStrategy::Auto: return "auto";
    case SubdivisionStrategy::Kuhn: return "kuhn";
    case SubdivisionStrategy::Center: return "center";
    }
    return "?";
}

bool is_axis_aligned_box(const PolyMesh3D& mesh, int cell)
{
    const auto& verts = mesh.cell_vertices[cell];
    if (verts.size() != 8 || mesh.cells[cell].size() != 6) {
        return false;
    }
    Eigen::AlignedBox3d box;
    for (int v : verts) {
        box.extend(mesh.vertices[v]);
    }
    const Eigen::Vector3d ext = box.sizes();
    const double tol = 1e-12 * ext.maxCoeff();
    if (ext.minCoeff() <= tol) {
        return false;
    }
    std::set<int> corners;
    for (int v : verts) {
        const Eigen::Vector3d& p = mesh.vertices[v];
        int bits = 0;
        for (int d = 0; d < 3; ++d) {
            if (std::abs(p[d] - box.min()[d]) <= tol) {
                continue;
            }
            if (std::abs(p[d] - box.max()[d]) <= tol) {
                bits |= 1 << d;
                continue;
            }
            return false;
        }
        corners.insert(bits);
    }
    return corners.size() == 8;
}

SubdivisionStrategy resolve_strategy(const PolyMesh3D& mesh, int cell, SubdivisionStrategy strategy)
{
    if (strategy == SubdivisionStrategy::Auto) {
        return is_axis_aligned_box(mesh, cell) ? SubdivisionStrategy::Kuhn : SubdivisionStrategy::Center;
    }
    if (strategy == SubdivisionStrategy::Kuhn && !is_axis_aligned_box(mesh, cell)) {
        throw GeometryError("kuhn subdivision requires an axis-aligned box (cell "
                            + std::to_string(cell) + ")");
    }
    return strategy;
}

namespace {

bool lex_less(const Eigen::Vector3d& a, const Eigen::Vector3d& b)
{
    return std::lexicographical_compare(a.data(), a.data() + 3, b.data(), b.data() + 3);
}

} // namespace

FaceTriangulation triangulate_face(const PolyMesh3D& mesh, int face, bool lex_diagonal)
{
    FaceTriangulation ft;
    ft.face = face;
    ft.loop = mesh.faces[face];
    const int n = static_cast<int>(ft.loop.size());

    if (lex_diagonal && n == 4) {
        int lo = 0;
        for (int i = 1; i < 4; ++i) {
            if (lex_less(mesh.vertices[ft.loop[i]], mesh.vertices[ft.loop[lo]])) {
                lo = i;
            }
        }
        ft.triangles = {{lo, (lo + 1) % 4, (lo + 2) % 4}, {lo, (lo + 2) % 4, (lo + 3) % 4}};
        return ft;
    }

    const FaceFrame fr = face_frame(mesh, face);
    std::vector<Eigen::Vector2d> planar;
    for (int v : ft.loop) {
        planar.push_back(fr.to_plane(mesh.vertices[v]));
    }
    ft.triangles = triangulate_loop(planar);
    if (n == 3) {
        ft.has_barycenter = true;
        ft.barycenter = (mesh.vertices[ft.loop[0]] + mesh.vertices[ft.loop[1]] + mesh.vertices[ft.loop[2]]) / 3.0;
    }
    return ft;
}

std::vector<FaceTriangulation> triangulate_faces(const PolyMesh3D& mesh, SubdivisionStrategy strategy)
{
    std::vector<bool> kuhn(mesh.num_cells());
    for (int c = 0; c < mesh.num_cells(); ++c) {
        kuhn[c] = resolve_strategy(mesh, c, strategy) == SubdivisionStrategy::Kuhn;
    }
    std::vector<FaceTriangulation> out;
    out.reserve(mesh.num_faces());
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const auto& fc = mesh.face_cells[f];
        const bool lex = (fc[0] >= 0 && kuhn[fc[0]]) || (fc[1] >= 0 && kuhn[fc[1]]);
        out.push_back(triangulate_face(mesh, f, lex));
    }
    return out;
}

namespace {

using Tri = std::array<int, 3>;

Tri sorted(Tri t)
{
    std::sort(t.begin(), t.end());
    return t;
}

/// Kuhn tetrahedra of an axis-aligned box as local ids, from corner bit codes.
std::vector<std::array<int, 4>> kuhn_tets(const PolyMesh3D& mesh, int cell, const std::vector<int>& verts)
{
    Eigen::AlignedBox3d box;
    for (int v : verts) {
        box.extend(mesh.vertices[v]);
    }
    std::array<int, 8> corner_local{};
    for (int l = 0; l < static_cast<int>(verts.size()); ++l) {
        const Eigen::Vector3d& p = mesh.vertices[verts[l]];
        int bits = 0;
        for (int d = 0; d < 3; ++d) {
            if (std::abs(p[d] - box.max()[d]) < std::abs(p[d] - box.min()[d])) {
                bits |= 1 << d;
            }
        }
        corner_local[bits] = l;
    }
    (void)cell;
    std::vector<std::array<int, 4>> tets;
    std::array<int, 3> axes{0, 1, 2};
    do {
        const int c1 = 1 << axes[0];
        const int c2 = c1 | (1 << axes[1]);
        tets.push_back({corner_local[0], corner_local[c1], corner_local[c2], corner_local[7]});
    } while (std::next_permutation(axes.begin(), axes.end()));
    return tets;
}

} // namespace

MacroSubdivision<3> subdivide_polyhedron(const PolyMesh3D& mesh, int cell, SubdivisionStrategy strategy,
                                         std::span<const FaceTriangulation> faces)
{
    const SubdivisionStrategy resolved = resolve_strategy(mesh, cell, strategy);

    MacroSubdivision<3> sub;
    sub.cell = cell;
    sub.parent_vertices = mesh.cell_vertices[cell];
    std::map<int, int> local_of;
    for (int l = 0; l < sub.num_parent_vertices(); ++l) {
        local_of[sub.parent_vertices[l]] = l;
        sub.points.push_back(mesh.vertices[sub.parent_vertices[l]]);
    }
    for (int e : mesh.cell_edges[cell]) {
        sub.parent_edges.push_back({local_of.at(mesh.edges[e][0]), local_of.at(mesh.edges[e][1])});
        sub.parent_edge_ids.push_back(e);
    }
    sub.measure = cell_volume(mesh, cell);
    sub.diameter = cell_diameter(mesh, cell);

    // outward face triangles in local ids, tagged with the local face index
    std::vector<std::pair<Tri, int>> boundary_tris;
    for (const auto& sf : mesh.cells[cell]) {
        const FaceTriangulation& ft = faces[sf.face];
        if (ft.face != sf.face) {
            throw std::invalid_argument("face triangulation list is not indexed by face id");
        }
        const int lf = static_cast<int>(sub.parent_faces.size());
        std::vector<int> loop;
        for (int v : ft.loop) {
            loop.push_back(local_of.at(v));
        }
        if (sf.sign < 0) {
            std::reverse(loop.begin(), loop.end());
        }
        sub.parent_faces.push_back(loop);
        sub.parent_face_ids.push_back(sf.face);

        int bary = -1;
        if (ft.has_barycenter) {
            AddedPoint<3> p;
            p.coords = ft.barycenter;
            p.host = HostKind::FaceInterior;
            p.host_id = sf.face;
            bary = sub.num_points();
            sub.added.push_back(p);
            sub.points.push_back(p.coords);
        }
        const int n = static_cast<int>(ft.loop.size());
        for (const auto& t : ft.triangles) {
            Tri lt;
            for (int j = 0; j < 3; ++j) {
                lt[j] = t[j] == n ? bary : local_of.at(ft.loop[t[j]]);
            }
            if (sf.sign < 0) {
                std::swap(lt[1], lt[2]);
            }
            boundary_tris.push_back({lt, lf});
        }
    }

    if (resolved == SubdivisionStrategy::Kuhn) {
        for (const auto& t : kuhn_tets(mesh, cell, sub.parent_vertices)) {
            sub.simplices.push_back(t);
        }
    } else {
        AddedPoint<3> p;
        p.coords = cell_centroid(mesh, cell);
        p.host = HostKind::CellInterior;
        const int apex = sub.num_points();
        sub.added.push_back(p);
        sub.points.push_back(p.coords);
        for (const auto& [t, lf] : boundary_tris) {
            // outward triangle + interior apex is negatively oriented; swap to fix
            sub.simplices.push_back({t[0], t[2], t[1], apex});
        }
    }

    const double min_measure = kShapeTolerance * std::pow(sub.diameter, 3);
    for (int s = 0; s < sub.num_simplices(); ++s) {
        if (resolved != SubdivisionStrategy::Center && sub.simplex_measure(s) < 0.0) {
            std::swap(sub.simplices[s][0], sub.simplices[s][1]);
        }
        // a cone tet that comes out inverted means the centroid lies behind that face
        if (resolved == SubdivisionStrategy::Center && sub.simplex_measure(s) < min_measure) {
            throw GeometryError("cell " + std::to_string(cell)
                                + ": centroid does not see every face triangle; the cell is not "
                                  "star-shaped about its centroid, place the interior point manually");
        }
    }

    std::map<Tri, int> facet_face;
    for (const auto& [t, lf] : boundary_tris) {
        facet_face[sorted(t)] = lf;
    }
    std::size_t matched = 0;
    for (const auto& s : sub.simplices) {
        std::array<FacetParent, 4> fp;
        for (int j = 0; j < 4; ++j) {
            Tri t;
            for (int i = 0, m = 0; i < 4; ++i) {
                if (i != j) {
                    t[m++] = s[i];
                }
            }
            if (auto it = facet_face.find(sorted(t)); it != facet_face.end()) {
                fp[j] = {FacetKind::ParentFace, it->second};
                ++matched;
            }
        }
        sub.facets.push_back(fp);
    }
    if (matched != boundary_tris.size()) {
        throw GeometryError("cell " + std::to_string(cell)
                            + ": tetrahedra do not match the face triangulations");
    }
    return sub;
}

MacroSubdivision<3> subdivide_polyhedron(const PolyMesh3D& mesh, int cell, SubdivisionStrategy strategy)
{
    const bool lex = resolve_strategy(mesh, cell, strategy) == SubdivisionStrategy::Kuhn;
    std::vector<FaceTriangulation> faces(mesh.num_faces());
    for (const auto& sf : mesh.cells[cell]) {
        faces[sf.face] = triangulate_face(mesh, sf.face, lex);
    }
    return subdivide_polyhedron(mesh, cell, strategy, faces);
}

MeshSubdivision<3> subdivide_mesh(const PolyMesh3D& mesh, SubdivisionStrategy strategy)
{
    MeshSubdivision<3> out;
    out.faces = triangulate_faces(mesh, strategy);
    out.cells.reserve(mesh.num_cells());
    for (int c = 0; c < mesh.num_cells(); ++c) {
        out.cells.push_back(subdivide_polyhedron(mesh, c, strategy, out.faces));
    }
    return out;
}

// constraints ------------------------------------------------------------------------------

namespace {

template <int Dim>
std::vector<int> facet_vertices(const typename MacroSubdivision<Dim>::Simplex& s, int opposite)
{
    std::vector<int> f;
    for (int i = 0; i <= Dim; ++i) {
        if (i != opposite) {
            f.push_back(s[i]);
        }
    }
    std::sort(f.begin(), f.end());
    return f;
}

} // namespace

template <int Dim>
ValidationReport check_constraints(const MacroSubdivision<Dim>& sub)
{
    ValidationReport report;
    const int ns = sub.num_simplices();

    double total = 0.0;
    std::string bad_shape;
    const double min_measure = kShapeTolerance * std::pow(sub.diameter, Dim);
    for (int s = 0; s < ns; ++s) {
        const double m = sub.simplex_measure(s);
        total += m;
        if (m < min_measure && bad_shape.empty()) {
            bad_shape = "simplex " + std::to_string(s);
        }
    }
    const bool measure_ok = std::abs(total - sub.measure) <= 1e-12 * std::abs(sub.measure);
    report.add("partition-measure", measure_ok,
               measure_ok ? std::string{} : "sum " + std::to_string(total) + " vs " + std::to_string(sub.measure));

    // facets: internal ones shared by two simplices, parent ones used once
    std::map<std::vector<int>, std::vector<std::pair<int, int>>> facet_users;
    for (int s = 0; s < ns; ++s) {
        for (int j = 0; j <= Dim; ++j) {
            facet_users[facet_vertices<Dim>(sub.simplices[s], j)].push_back({s, j});
        }
    }
    std::string bad_facet;
    for (const auto& [verts, users] : facet_users) {
        const bool internal = sub.facets[users[0].first][users[0].second].kind == FacetKind::Internal;
        const std::size_t expected = internal ? 2 : 1;
        bool consistent = users.size() == expected;
        for (const auto& [s, j] : users) {
            consistent = consistent && ((sub.facets[s][j].kind == FacetKind::Internal) == internal);
        }
        if (!consistent && bad_facet.empty()) {
            bad_facet = "facet of simplex " + std::to_string(users[0].first);
        }
    }
    report.add("facet-matching", bad_facet.empty(), bad_facet);

    // Edges lying on the boundary of K: edges of boundary facets.
    std::set<std::pair<int, int>> boundary_edges;
    std::vector<std::vector<std::vector<int>>> face_triangles(sub.parent_faces.size());
    for (int s = 0; s < ns; ++s) {
        for (int j = 0; j <= Dim; ++j) {
            if (sub.facets[s][j].kind == FacetKind::Internal) {
                continue;
            }
            const auto f = facet_vertices<Dim>(sub.simplices[s], j);
            for (std::size_t a = 0; a < f.size(); ++a) {
                for (std::size_t b = a + 1; b < f.size(); ++b) {
                    boundary_edges.insert({f[a], f[b]});
                }
            }
            if constexpr (Dim == 3) {
                face_triangles[sub.facets[s][j].index].push_back(f);
            }
        }
    }

    std::string bad_split;
    std::string bad_count;
    std::string bad_internal;
    if constexpr (Dim == 2) {
        std::map<std::pair<int, int>, int> uses;
        for (int s = 0; s < ns; ++s) {
            for (int j = 0; j < 3; ++j) {
                if (sub.facets[s][j].kind == FacetKind::ParentEdge) {
                    const auto f = facet_vertices<2>(sub.simplices[s], j);
                    ++uses[{f[0], f[1]}];
                }
            }
        }
        for (std::size_t e = 0; e < sub.parent_edges.size(); ++e) {
            const auto key = ordered_pair(sub.parent_edges[e][0], sub.parent_edges[e][1]);
            auto it = uses.find({key.first, key.second});
            if ((it == uses.end() || it->second != 1) && bad_split.empty()) {
                bad_split = "parent edge " + std::to_string(e);
            }
        }
        if (ns < 2) {
            bad_count = "polygon has " + std::to_string(ns) + " triangle(s)";
        }
        report.add("parent-edges-unsplit", bad_split.empty(), bad_split);
        report.add("min-triangles", bad_count.empty(), bad_count);
    } else {
        for (std::size_t lf = 0; lf < sub.parent_faces.size(); ++lf) {
            const auto& loop = sub.parent_faces[lf];
            const int n = static_cast<int>(loop.size());
            for (int i = 0; i < n && bad_split.empty(); ++i) {
                const auto key = ordered_pair(loop[i], loop[(i + 1) % n]);
                int count = 0;
                for (const auto& t : face_triangles[lf]) {
                    const bool has_a = std::find(t.begin(), t.end(), key.first) != t.end();
                    const bool has_b = std::find(t.begin(), t.end(), key.second) != t.end();
                    count += (has_a && has_b) ? 1 : 0;
                }
                if (count != 1) {
                    bad_split = "face " + std::to_string(lf) + " edge " + std::to_string(i);
                }
            }
            if (face_triangles[lf].size() < 2 && bad_count.empty()) {
                bad_count = "face " + std::to_string(lf) + " has " + std::to_string(face_triangles[lf].size())
                            + " triangle(s)";
            }
        }
        for (int s = 0; s < ns; ++s) {
            int internal = 0;
            for (int j = 0; j < 4; ++j) {
                internal += sub.facets[s][j].kind == FacetKind::Internal ? 1 : 0;
            }
            if (internal < 2 && bad_internal.empty()) {
                bad_internal = "tetrahedron " + std::to_string(s) + " has " + std::to_string(internal)
                               + " internal facet(s)";
            }
        }
        report.add("parent-edges-unsplit", bad_split.empty(), bad_split);
        report.add("min-face-triangles", bad_count.empty(), bad_count);
        report.add("min-internal-facets", bad_internal.empty(), bad_internal);
    }
    report.add("shape", bad_shape.empty(), bad_shape);

    // Bubble support: every simplex owns an edge interior to K, whose midpoint is a P2 node
    // of the internal bubble.
    std::string bad_bubble;
    int internal_edges = 0;
    std::set<std::pair<int, int>> seen;
    for (int s = 0; s < ns; ++s) {
        bool touches = false;
        for (int a = 0; a <= Dim; ++a) {
            for (int b = a + 1; b <= Dim; ++b) {
                const auto key = ordered_pair(sub.simplices[s][a], sub.simplices[s][b]);
                if (!boundary_edges.count({key.first, key.second})) {
                    touches = true;
                    if (seen.insert({key.first, key.second}).second) {
                        ++internal_edges;
                    }
                }
            }
        }
        if (!touches && bad_bubble.empty()) {
            bad_bubble = "simplex " + std::to_string(s) + " has no internal edge";
        }
    }
    if (internal_edges == 0) {
        bad_bubble = "no internal mid-edge nodes";
    }
    report.add("bubble-support", bad_bubble.empty(), bad_bubble);
    return report;
}

template ValidationReport check_constraints<2>(const MacroSubdivision<2>&);
template ValidationReport check_constraints<3>(const MacroSubdivision<3>&);

ValidationReport check_face_matching(const PolyMesh3D& mesh, const MeshSubdivision<3>& sub)
{
    ValidationReport report;
    // face id -> per-side triangle sets keyed by global vertex ids (face barycenter -> -1)
    std::map<int, std::vector<std::set<std::vector<int>>>> sides;
    for (const auto& cs : sub.cells) {
        auto global = [&](int local) {
            return cs.is_added(local) ? -1 : cs.parent_vertices[local];
        };
        std::map<int, std::set<std::vector<int>>> per_face;
        for (int s = 0; s < cs.num_simplices(); ++s) {
            for (int j = 0; j < 4; ++j) {
                if (cs.facets[s][j].kind != FacetKind::ParentFace) {
                    continue;
                }
                std::vector<int> t;
                for (int i = 0; i < 4; ++i) {
                    if (i != j) {
                        t.push_back(global(cs.simplices[s][i]));
                    }
                }
                std::sort(t.begin(), t.end());
                per_face[cs.parent_face_ids[cs.facets[s][j].index]].insert(t);
            }
        }
        for (auto& [f, tris] : per_face) {
            sides[f].push_back(std::move(tris));
        }
    }
    std::string bad;
    for (int f = 0; f < mesh.num_faces() && bad.empty(); ++f) {
        if (mesh.boundary_face[f]) {
            continue;
        }
        const auto& s = sides[f];
        if (s.size() != 2 || s[0] != s[1]) {
            bad = "face " + std::to_string(f);
        }
    }
    report.add("face-matching", bad.empty(), bad);
    return report;
}

} // namespace sfvem
