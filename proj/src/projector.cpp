#include "sfvem/projector.hpp"
#include "sfvem/quadrature.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace sfvem {

TildeDofLayout build_layout(const PolyMesh2D& mesh, int k)
{
    TildeDofLayout l;
    l.dim = 2;
    l.degree = k;
    l.num_vertices = mesh.num_vertices();
    l.num_edges = mesh.num_edges();
    l.num_cells = mesh.num_cells();
    l.per_edge = k - 1;
    l.per_cell = poly_dim(k - 2, 2);
    l.edge_offset = l.num_vertices;
    l.face_offset = l.edge_offset + l.per_edge * l.num_edges;
    l.cell_offset = l.face_offset;
    l.size = l.cell_offset + l.per_cell * l.num_cells;
    l.boundary_mask.assign(l.size, false);
    for (int v = 0; v < l.num_vertices; ++v) {
        l.boundary_mask[v] = mesh.boundary_vertex[v];
    }
    for (int e = 0; e < l.num_edges; ++e) {
        for (int j = 0; j < l.per_edge; ++j) {
            l.boundary_mask[l.edge_dof(e, j)] = mesh.boundary_edge[e];
        }
    }
    return l;
}

TildeDofLayout build_layout(const PolyMesh3D& mesh, int k)
{
    TildeDofLayout l;
    l.dim = 3;
    l.degree = k;
    l.num_vertices = mesh.num_vertices();
    l.num_edges = mesh.num_edges();
    l.num_faces = mesh.num_faces();
    l.num_cells = mesh.num_cells();
    l.per_edge = k - 1;
    l.per_face = poly_dim(k - 2, 2);
    l.per_cell = poly_dim(k - 2, 3);
    l.edge_offset = l.num_vertices;
    l.face_offset = l.edge_offset + l.per_edge * l.num_edges;
    l.cell_offset = l.face_offset + l.per_face * l.num_faces;
    l.size = l.cell_offset + l.per_cell * l.num_cells;
    l.boundary_mask.assign(l.size, false);
    for (int v = 0; v < l.num_vertices; ++v) {
        l.boundary_mask[v] = mesh.boundary_vertex[v];
    }
    for (int e = 0; e < l.num_edges; ++e) {
        for (int j = 0; j < l.per_edge; ++j) {
            l.boundary_mask[l.edge_dof(e, j)] = mesh.boundary_edge[e];
        }
    }
    for (int f = 0; f < l.num_faces; ++f) {
        for (int a = 0; a < l.per_face; ++a) {
            l.boundary_mask[l.face_dof(f, a)] = mesh.boundary_face[f];
        }
    }
    return l;
}

namespace {

/// Key of the j-th Gauss-Lobatto node (j = 1..k-1) on the segment from local point a to b.
NodeKey edge_key(int a, int b, int j, int k)
{
    NodeKey key{{a, k - j}, {b, j}};
    std::sort(key.begin(), key.end());
    return key;
}

template <int Dim>
int require_node(const MacroFeSpace<Dim>& space, const NodeKey& key)
{
    const int id = space.find_node(key);
    if (id < 0) {
        throw GeometryError("macro space of cell " + std::to_string(space.sub.cell)
                            + " has no node for a boundary degree of freedom");
    }
    return id;
}

/// Fill the interior rows of `projection` from its boundary rows:
/// S_II x_I = -S_IB x_B + M_I q, where q occupies columns [q_offset, q_offset + nq).
template <int Dim>
void solve_interior(const MacroFeSpace<Dim>& space, const Eigen::MatrixXd& S, const Eigen::MatrixXd& moments,
                    int q_offset, Eigen::MatrixXd& projection)
{
    const auto& I = space.interior_nodes;
    const auto& B = space.boundary_nodes;
    const int ni = static_cast<int>(I.size());
    if (ni == 0) {
        return;
    }
    const int ncols = static_cast<int>(projection.cols());
    Eigen::MatrixXd Sii(ni, ni);
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(ni, ncols);
    for (int a = 0; a < ni; ++a) {
        for (int b = 0; b < ni; ++b) {
            Sii(a, b) = S(I[a], I[b]);
        }
        for (int b : B) {
            rhs.row(a) -= S(I[a], b) * projection.row(b);
        }
        for (int q = 0; q < moments.cols(); ++q) {
            rhs(a, q_offset + q) += moments(I[a], q);
        }
    }
    Eigen::LLT<Eigen::MatrixXd> llt(Sii);
    if (llt.info() != Eigen::Success) {
        throw GeometryError("cell " + std::to_string(space.sub.cell)
                            + ": singular interior stiffness block (subdivision constraint violated)");
    }
    const Eigen::MatrixXd xi = llt.solve(rhs);
    for (int a = 0; a < ni; ++a) {
        projection.row(I[a]) = xi.row(a);
    }
}

} // namespace

ElementProjector<2> project_element(const PolyMesh2D& mesh, const TildeDofLayout& layout,
                                   const MacroSubdivision<2>& sub)
{
    const int k = layout.degree;
    const int c = sub.cell;
    ElementProjector<2> el;
    el.cell = c;
    el.space = build_macro_space(sub, k);
    el.basis = cell_basis(sub, k);

    const auto& loop = mesh.cells[c];
    const int n = static_cast<int>(loop.size());
    for (int v : loop) {
        el.dofs.push_back(layout.vertex_dof(v));
    }
    for (int e : mesh.cell_edges[c]) {
        for (int j = 0; j < layout.per_edge; ++j) {
            el.dofs.push_back(layout.edge_dof(e, j));
        }
    }
    const int q_offset = static_cast<int>(el.dofs.size());
    for (int a = 0; a < layout.per_cell; ++a) {
        el.dofs.push_back(layout.cell_dof(c, a));
    }

    const auto& space = el.space;
    el.projection = Eigen::MatrixXd::Zero(space.num_nodes(), el.num_local_dofs());
    for (int i = 0; i < n; ++i) {
        el.projection(require_node(space, {{i, k}}), i) = 1.0;
    }
    for (int i = 0; i < n; ++i) {
        const int e = mesh.cell_edges[c][i];
        const int lo = mesh.edges[e].vertices[0] == loop[i] ? i : (i + 1) % n;
        const int hi = lo == i ? (i + 1) % n : i;
        for (int j = 1; j < k; ++j) {
            el.projection(require_node(space, edge_key(lo, hi, j, k)), n + i * layout.per_edge + j - 1) = 1.0;
        }
    }

    const Eigen::MatrixXd S = local_stiffness(space);
    solve_interior(space, S, moment_matrix(space, el.basis), q_offset, el.projection);
    el.stiffness = el.projection.transpose() * S * el.projection;
    el.stiffness = 0.5 * (el.stiffness + el.stiffness.transpose()).eval();
    return el;
}

FaceProjector build_face_projector(const PolyMesh3D& mesh, const TildeDofLayout& layout,
                                   const FaceTriangulation& tri)
{
    const int k = layout.degree;
    const int f = tri.face;
    const auto& loop = mesh.faces[f];
    const int n = static_cast<int>(loop.size());

    FaceProjector fp;
    fp.face = f;
    fp.frame = face_frame(mesh, f);

    MacroSubdivision<2> sub;
    sub.cell = f;
    std::vector<Eigen::Vector2d> planar;
    for (int v : loop) {
        planar.push_back(fp.frame.to_plane(mesh.vertices[v]));
    }
    sub.points = planar;
    sub.parent_vertices = loop;
    if (tri.has_barycenter) {
        AddedPoint<2> p;
        p.coords = fp.frame.to_plane(tri.barycenter);
        p.host = HostKind::FaceInterior;
        p.host_id = f;
        sub.added.push_back(p);
        sub.points.push_back(p.coords);
    }
    std::map<std::pair<int, int>, int> loop_edge;
    for (int i = 0; i < n; ++i) {
        sub.parent_edges.push_back({i, (i + 1) % n});
        sub.parent_edge_ids.push_back(mesh.face_edges[f][i]);
        const auto key = ordered_pair(i, (i + 1) % n);
        loop_edge[{key.first, key.second}] = i;
    }
    for (const auto& t : tri.triangles) {
        std::array<int, 3> s{t[0], t[1], t[2]};
        sub.simplices.push_back(s);
        if (sub.simplex_measure(sub.num_simplices() - 1) < 0.0) {
            std::swap(sub.simplices.back()[1], sub.simplices.back()[2]);
        }
        std::array<FacetParent, 3> facets;
        for (int j = 0; j < 3; ++j) {
            const auto& sj = sub.simplices.back();
            const auto key = ordered_pair(sj[(j + 1) % 3], sj[(j + 2) % 3]);
            if (auto it = loop_edge.find({key.first, key.second}); it != loop_edge.end()) {
                facets[j] = {FacetKind::ParentEdge, it->second};
            }
        }
        sub.facets.push_back(facets);
    }
    sub.measure = signed_area(planar);
    sub.diameter = fp.frame.diameter;

    fp.space = build_macro_space(sub, k);
    fp.basis = ScaledMonomialBasis<double, 2>(Eigen::Vector2d::Zero(), fp.frame.diameter, k - 2);

    for (int v : loop) {
        fp.dofs.push_back(layout.vertex_dof(v));
    }
    for (int e : mesh.face_edges[f]) {
        for (int j = 0; j < layout.per_edge; ++j) {
            fp.dofs.push_back(layout.edge_dof(e, j));
        }
    }
    const int q_offset = static_cast<int>(fp.dofs.size());
    for (int a = 0; a < layout.per_face; ++a) {
        fp.dofs.push_back(layout.face_dof(f, a));
    }

    const auto& space = fp.space;
    fp.projection = Eigen::MatrixXd::Zero(space.num_nodes(), static_cast<int>(fp.dofs.size()));
    for (int i = 0; i < n; ++i) {
        fp.projection(require_node(space, {{i, k}}), i) = 1.0;
    }
    for (int i = 0; i < n; ++i) {
        const int e = mesh.face_edges[f][i];
        const int lo = mesh.edges[e][0] == loop[i] ? i : (i + 1) % n;
        const int hi = lo == i ? (i + 1) % n : i;
        for (int j = 1; j < k; ++j) {
            fp.projection(require_node(space, edge_key(lo, hi, j, k)), n + i * layout.per_edge + j - 1) = 1.0;
        }
    }
    solve_interior(space, local_stiffness(space), moment_matrix(space, fp.basis), q_offset, fp.projection);
    return fp;
}

Eigen::VectorXd project_face(const FaceProjector& face, const Eigen::VectorXd& local_dofs)
{
    return face.projection * local_dofs;
}

ElementProjector<3> project_element(const PolyMesh3D& mesh, const TildeDofLayout& layout,
                                    const MacroSubdivision<3>& sub, const std::vector<FaceProjector>& faces)
{
    const int k = layout.degree;
    const int c = sub.cell;
    ElementProjector<3> el;
    el.cell = c;
    el.space = build_macro_space(sub, k);
    el.basis = cell_basis(sub, k);

    for (int v : sub.parent_vertices) {
        el.dofs.push_back(layout.vertex_dof(v));
    }
    for (int e : sub.parent_edge_ids) {
        for (int j = 0; j < layout.per_edge; ++j) {
            el.dofs.push_back(layout.edge_dof(e, j));
        }
    }
    for (int f : sub.parent_face_ids) {
        for (int a = 0; a < layout.per_face; ++a) {
            el.dofs.push_back(layout.face_dof(f, a));
        }
    }
    const int q_offset = static_cast<int>(el.dofs.size());
    for (int a = 0; a < layout.per_cell; ++a) {
        el.dofs.push_back(layout.cell_dof(c, a));
    }

    std::map<int, int> local_dof;
    for (int i = 0; i < q_offset; ++i) {
        local_dof[el.dofs[i]] = i;
    }
    std::map<int, int> local_point;
    for (int l = 0; l < sub.num_parent_vertices(); ++l) {
        local_point[sub.parent_vertices[l]] = l;
    }

    const auto& space = el.space;
    el.projection = Eigen::MatrixXd::Zero(space.num_nodes(), el.num_local_dofs());
    for (int f : sub.parent_face_ids) {
        const FaceProjector& fp = faces[f];
        const auto& loop = mesh.faces[f];
        const int n = static_cast<int>(loop.size());
        int bary = -1;
        for (std::size_t a = 0; a < sub.added.size(); ++a) {
            if (sub.added[a].host == HostKind::FaceInterior && sub.added[a].host_id == f) {
                bary = sub.num_parent_vertices() + static_cast<int>(a);
            }
        }
        std::vector<int> columns;
        for (int g : fp.dofs) {
            columns.push_back(local_dof.at(g));
        }
        for (int node = 0; node < fp.space.num_nodes(); ++node) {
            NodeKey key;
            for (const auto& [p, count] : fp.space.keys[node]) {
                const int lp = p < n ? local_point.at(loop[p]) : bary;
                if (lp < 0) {
                    throw GeometryError("cell " + std::to_string(c) + " lacks the barycenter of face "
                                        + std::to_string(f));
                }
                key.emplace_back(lp, count);
            }
            std::sort(key.begin(), key.end());
            const int row = require_node(space, key);
            el.projection.row(row).setZero();
            for (std::size_t i = 0; i < columns.size(); ++i) {
                el.projection(row, columns[i]) = fp.projection(node, static_cast<int>(i));
            }
        }
    }

    const Eigen::MatrixXd S = local_stiffness(space);
    solve_interior(space, S, moment_matrix(space, el.basis), q_offset, el.projection);
    el.stiffness = el.projection.transpose() * S * el.projection;
    el.stiffness = 0.5 * (el.stiffness + el.stiffness.transpose()).eval();
    return el;
}

Discretization<2> discretize(const PolyMesh2D& mesh, int k)
{
    Discretization<2> d;
    d.mesh = mesh;
    d.degree = k;
    d.layout = build_layout(mesh, k);
    d.elements.reserve(mesh.num_cells());
    for (int c = 0; c < mesh.num_cells(); ++c) {
        d.elements.push_back(project_element(mesh, d.layout, subdivide_cell(mesh, c)));
    }
    return d;
}

Discretization<3> discretize(const PolyMesh3D& mesh, int k, SubdivisionStrategy strategy)
{
    Discretization<3> d;
    d.mesh = mesh;
    d.degree = k;
    d.strategy = strategy;
    d.layout = build_layout(mesh, k);
    const std::vector<FaceTriangulation> tris = triangulate_faces(mesh, strategy);
    d.faces.reserve(mesh.num_faces());
    for (const auto& t : tris) {
        d.faces.push_back(build_face_projector(mesh, d.layout, t));
    }
    d.elements.reserve(mesh.num_cells());
    for (int c = 0; c < mesh.num_cells(); ++c) {
        d.elements.push_back(project_element(mesh, d.layout, subdivide_polyhedron(mesh, c, strategy, tris), d.faces));
    }
    return d;
}

template <int Dim>
Eigen::VectorXd l2_projection(const MacroSubdivision<Dim>& sub, const ScaledMonomialBasis<double, Dim>& basis,
                              const std::function<double(const Eigen::Matrix<double, Dim, 1>&)>& f, int exactness)
{
    const int n = basis.size();
    if (n == 0) {
        return Eigen::VectorXd();
    }
    const auto& quad = simplex_quadrature<double, Dim>(std::min(exactness, kMaxQuadratureExactness));
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    for (int s = 0; s < sub.num_simplices(); ++s) {
        Eigen::Matrix<double, Dim, Dim> jac;
        const auto& x0 = sub.points[sub.simplices[s][0]];
        for (int j = 0; j < Dim; ++j) {
            jac.col(j) = sub.points[sub.simplices[s][j + 1]] - x0;
        }
        const double det = std::abs(jac.determinant());
        for (int q = 0; q < quad.size(); ++q) {
            const Eigen::Matrix<double, Dim, 1> x = x0 + jac * quad.points.col(q);
            const Eigen::VectorXd m = basis.values(x);
            const double w = quad.weights[q] * det;
            gram.noalias() += w * m * m.transpose();
            rhs += (w * f(x)) * m;
        }
    }
    return gram.llt().solve(rhs);
}

template Eigen::VectorXd l2_projection<2>(const MacroSubdivision<2>&, const ScaledMonomialBasis<double, 2>&,
                                          const std::function<double(const Eigen::Vector2d&)>&, int);
template Eigen::VectorXd l2_projection<3>(const MacroSubdivision<3>&, const ScaledMonomialBasis<double, 3>&,
                                          const std::function<double(const Eigen::Vector3d&)>&, int);

namespace {

template <typename Mesh>
void interpolate_vertices_edges(const Mesh& mesh, const TildeDofLayout& layout, const ScalarField& u,
                                Eigen::VectorXd& dofs)
{
    const auto gl = gauss_lobatto_nodes<double>(layout.degree);
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        dofs[layout.vertex_dof(v)] = u.value(lift(mesh.vertices[v]));
    }
    for (int e = 0; e < mesh.num_edges(); ++e) {
        std::array<int, 2> ends;
        if constexpr (std::is_same_v<Mesh, PolyMesh2D>) {
            ends = mesh.edges[e].vertices;
        } else {
            ends = mesh.edges[e];
        }
        const auto a = lift(mesh.vertices[ends[0]]);
        const auto b = lift(mesh.vertices[ends[1]]);
        for (int j = 0; j < layout.per_edge; ++j) {
            dofs[layout.edge_dof(e, j)] = u.value(a + gl[j + 1] * (b - a));
        }
    }
}

// Only the reference interpolant uses this; the highest rule keeps its quadrature error
// below the cell-moment tolerance on coarse meshes.
int projection_exactness(int)
{
    return kMaxQuadratureExactness;
}

} // namespace

template <int Dim>
Eigen::VectorXd interpolate_exact(const Discretization<Dim>& disc, const ScalarField& u)
{
    const auto& layout = disc.layout;
    Eigen::VectorXd dofs = Eigen::VectorXd::Zero(layout.size);
    interpolate_vertices_edges(disc.mesh, layout, u, dofs);
    const int exactness = projection_exactness(disc.degree);
    if (layout.per_face > 0) {
        for (const auto& fp : disc.faces) {
            const FaceFrame& fr = fp.frame;
            auto neg_lap = [&](const Eigen::Vector2d& y) {
                const Eigen::Matrix3d h = u.hessian(fr.to_space(y));
                return -(fr.t1.dot(h * fr.t1) + fr.t2.dot(h * fr.t2));
            };
            const Eigen::VectorXd q = l2_projection<2>(fp.space.sub, fp.basis, neg_lap, exactness);
            for (int a = 0; a < layout.per_face; ++a) {
                dofs[layout.face_dof(fp.face, a)] = q[a];
            }
        }
    }
    if (layout.per_cell > 0) {
        for (const auto& el : disc.elements) {
            auto neg_lap = [&](const Eigen::Matrix<double, Dim, 1>& x) { return -u.laplacian(lift(x)); };
            const Eigen::VectorXd q = l2_projection<Dim>(el.space.sub, el.basis, neg_lap, exactness);
            for (int a = 0; a < layout.per_cell; ++a) {
                dofs[layout.cell_dof(el.cell, a)] = q[a];
            }
        }
    }
    return dofs;
}

template Eigen::VectorXd interpolate_exact<2>(const Discretization<2>&, const ScalarField&);
template Eigen::VectorXd interpolate_exact<3>(const Discretization<3>&, const ScalarField&);

template <int Dim>
Eigen::VectorXd gather(const ElementProjector<Dim>& element, const Eigen::VectorXd& global)
{
    Eigen::VectorXd local(element.num_local_dofs());
    for (int i = 0; i < element.num_local_dofs(); ++i) {
        local[i] = global[element.dofs[i]];
    }
    return local;
}

template Eigen::VectorXd gather<2>(const ElementProjector<2>&, const Eigen::VectorXd&);
template Eigen::VectorXd gather<3>(const ElementProjector<3>&, const Eigen::VectorXd&);

} // namespace sfvem
