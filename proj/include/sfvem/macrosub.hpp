#pragma once

#include "sfvem/polymesh.hpp"
#include "sfvem/validation.hpp"

#include <Eigen/Dense>

#include <array>
#include <span>
#include <string>
#include <vector>

namespace sfvem {

/// Sliver threshold: every sub-simplex must have measure >= kShapeTolerance * h_K^d.
inline constexpr double kShapeTolerance = 1e-6;

enum class FacetKind { Internal, ParentEdge, ParentFace };

/// Parent entity of a sub-simplex facet. `index` is local to the subdivision: a position in
/// parent_edges (2D) or parent_faces (3D).
struct FacetParent
{
    FacetKind kind = FacetKind::Internal;
    int index = -1;
};

enum class HostKind { CellInterior, FaceInterior };

template <int Dim>
struct AddedPoint
{
    Eigen::Matrix<double, Dim, 1> coords;
    HostKind host = HostKind::CellInterior;
    int host_id = -1; // global face id for FaceInterior
};

/// Simplicial decomposition K = T_1 u ... u T_m of one polytope.
///
/// Local vertex ids index `points`: the parent's own vertices come first, followed by the
/// added points. Simplices are positively oriented.
template <int Dim>
struct MacroSubdivision
{
    using Point = Eigen::Matrix<double, Dim, 1>;
    using Simplex = std::array<int, Dim + 1>;

    int cell = -1;
    std::vector<Point> points;
    std::vector<int> parent_vertices; // global ids of points[0 .. num_parent_vertices())
    std::vector<AddedPoint<Dim>> added;
    std::vector<Simplex> simplices;
    std::vector<std::array<FacetParent, Dim + 1>> facets; // facet opposite local vertex j

    std::vector<std::array<int, 2>> parent_edges; // local vertex pairs of the edges of K
    std::vector<int> parent_edge_ids;             // global ids (loop positions when standalone)
    std::vector<std::vector<int>> parent_faces;   // 3D: outward local loops of the faces of K
    std::vector<int> parent_face_ids;             // 3D: global face ids

    double measure = 0.0;  // |K|
    double diameter = 0.0; // h_K

    int num_parent_vertices() const { return static_cast<int>(parent_vertices.size()); }
    int num_points() const { return static_cast<int>(points.size()); }
    int num_simplices() const { return static_cast<int>(simplices.size()); }
    bool is_added(int local) const { return local >= num_parent_vertices(); }

    double simplex_measure(int s) const;
};

extern template struct MacroSubdivision<2>;
extern template struct MacroSubdivision<3>;

/// Triangulate a simple counter-clockwise polygon: a triangle gets its barycenter and three
/// sub-triangles, anything larger is ear-clipped (lowest-index valid ear first) with no new
/// points. Parent vertex ids are loop positions. Throws GeometryError when degenerate.
MacroSubdivision<2> subdivide_polygon(std::span<const Eigen::Vector2d> loop);

/// subdivide_polygon applied to a mesh cell, with global vertex and edge ids filled in.
MacroSubdivision<2> subdivide_cell(const PolyMesh2D& mesh, int cell);

enum class SubdivisionStrategy { Auto, Kuhn, Center };

SubdivisionStrategy parse_strategy(const std::string& name);
std::string to_string(SubdivisionStrategy strategy);

/// Triangulation of one face polygon shared by both adjacent cells. Triangle corners index
/// the face loop; the value loop.size() denotes the added barycenter.
struct FaceTriangulation
{
    int face = -1;
    std::vector<int> loop;
    bool has_barycenter = false;
    Eigen::Vector3d barycenter = Eigen::Vector3d::Zero();
    std::vector<std::array<int, 3>> triangles; // oriented like the face loop
};

/// True for a hexahedral cell whose vertices are the corners of an axis-aligned box.
bool is_axis_aligned_box(const PolyMesh3D& mesh, int cell);

/// Triangulate a face: quads split along the diagonal through the lexicographically smallest
/// vertex when `lex_diagonal`, otherwise the 2D polygon rule in the face plane.
FaceTriangulation triangulate_face(const PolyMesh3D& mesh, int face, bool lex_diagonal);

/// Every face triangulated exactly once. A quad face next to a cell that resolves to the
/// Kuhn split takes the lexicographic diagonal so that the split matches on both sides.
std::vector<FaceTriangulation> triangulate_faces(const PolyMesh3D& mesh, SubdivisionStrategy strategy);

/// Split a polyhedron into tetrahedra using the given face triangulations.
/// Kuhn: six tetrahedra around the lexicographic main diagonal of an axis-aligned box.
/// Center: every face triangle coned to the cell centroid (throws GeometryError if the
/// centroid does not see every face triangle).
MacroSubdivision<3> subdivide_polyhedron(const PolyMesh3D& mesh, int cell, SubdivisionStrategy strategy,
                                         std::span<const FaceTriangulation> faces);
MacroSubdivision<3> subdivide_polyhedron(const PolyMesh3D& mesh, int cell, SubdivisionStrategy strategy);

SubdivisionStrategy resolve_strategy(const PolyMesh3D& mesh, int cell, SubdivisionStrategy strategy);

template <int Dim>
struct MeshSubdivision
{
    std::vector<MacroSubdivision<Dim>> cells;
    std::vector<FaceTriangulation> faces; // 3D only
};

MeshSubdivision<2> subdivide_mesh(const PolyMesh2D& mesh);
MeshSubdivision<3> subdivide_mesh(const PolyMesh3D& mesh, SubdivisionStrategy strategy);

/// Partition, unsplit-edge, minimum-count, shape and bubble-support checks.
template <int Dim>
ValidationReport check_constraints(const MacroSubdivision<Dim>& sub);

/// Both cells adjacent to each interior face see the same set of face triangles.
ValidationReport check_face_matching(const PolyMesh3D& mesh, const MeshSubdivision<3>& sub);

} // namespace sfvem
