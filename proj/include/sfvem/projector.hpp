#pragma once

#include "sfvem/field.hpp"
#include "sfvem/macrofe.hpp"

#include <Eigen/Dense>

#include <vector>

namespace sfvem {

/// Global numbering of the tilde degrees of freedom: vertex values, k-1 Gauss-Lobatto values
/// per edge (ordered from the lower to the higher vertex id), then the coefficients of the
/// negative face Laplacian (3D) and the negative cell Laplacian in scaled monomials of
/// degree k-2.
struct TildeDofLayout
{
    int dim = 2;
    int degree = 1;
    int num_vertices = 0;
    int num_edges = 0;
    int num_faces = 0;
    int num_cells = 0;
    int per_edge = 0;
    int per_face = 0;
    int per_cell = 0;
    int edge_offset = 0;
    int face_offset = 0;
    int cell_offset = 0;
    int size = 0;
    std::vector<bool> boundary_mask;

    int vertex_dof(int v) const { return v; }
    int edge_dof(int e, int j) const { return edge_offset + e * per_edge + j; }
    int face_dof(int f, int a) const { return face_offset + f * per_face + a; }
    int cell_dof(int c, int a) const { return cell_offset + c * per_cell + a; }
};

TildeDofLayout build_layout(const PolyMesh2D& mesh, int k);
TildeDofLayout build_layout(const PolyMesh3D& mesh, int k);

/// Face projection in the plane of one mesh face. Local DOFs: face loop vertices, loop edges
/// (k-1 each), face Laplacian coefficients.
struct FaceProjector
{
    int face = -1;
    FaceFrame frame;
    MacroFeSpace<2> space;
    ScaledMonomialBasis<double, 2> basis; // plane coordinates, centered at the frame origin
    std::vector<int> dofs;                // global tilde DOF ids
    Eigen::MatrixXd projection;           // face nodes x local DOFs
};

FaceProjector build_face_projector(const PolyMesh3D& mesh, const TildeDofLayout& layout,
                                   const FaceTriangulation& triangulation);

/// Face macro coefficients for given local DOF values.
Eigen::VectorXd project_face(const FaceProjector& face, const Eigen::VectorXd& local_dofs);

/// Local projection of one cell: tilde DOFs -> macro nodal coefficients.
template <int Dim>
struct ElementProjector
{
    int cell = -1;
    MacroFeSpace<Dim> space;
    ScaledMonomialBasis<double, Dim> basis; // P_{k-2} on the cell
    std::vector<int> dofs;                  // global tilde DOF ids in local order
    Eigen::MatrixXd projection;             // macro nodes x local DOFs
    Eigen::MatrixXd stiffness;              // projection^T S_K projection

    int num_local_dofs() const { return static_cast<int>(dofs.size()); }
};

/// Boundary macro nodes take the trace given by vertex and edge values; interior nodes solve
/// S_II x_I = -S_IB x_B + M_I q with q the cell Laplacian coefficients.
ElementProjector<2> project_element(const PolyMesh2D& mesh, const TildeDofLayout& layout,
                                    const MacroSubdivision<2>& sub);

/// Face values come from the face projectors, then the same interior solve.
ElementProjector<3> project_element(const PolyMesh3D& mesh, const TildeDofLayout& layout,
                                    const MacroSubdivision<3>& sub, const std::vector<FaceProjector>& faces);

template <int Dim>
using MeshType = std::conditional_t<Dim == 2, PolyMesh2D, PolyMesh3D>;

/// Mesh, layout and every local projector for one degree.
template <int Dim>
struct Discretization
{
    MeshType<Dim> mesh;
    int degree = 1;
    SubdivisionStrategy strategy = SubdivisionStrategy::Auto;
    TildeDofLayout layout;
    std::vector<FaceProjector> faces; // 3D only
    std::vector<ElementProjector<Dim>> elements;
};

Discretization<2> discretize(const PolyMesh2D& mesh, int k);
Discretization<3> discretize(const PolyMesh3D& mesh, int k, SubdivisionStrategy strategy);

/// L2(region) projection of f onto `basis`, integrated on the subdivision simplices.
template <int Dim>
Eigen::VectorXd l2_projection(const MacroSubdivision<Dim>& sub, const ScaledMonomialBasis<double, Dim>& basis,
                              const std::function<double(const Eigen::Matrix<double, Dim, 1>&)>& f, int exactness);

/// Tilde DOFs of the interpolant of u: point values at vertices and edge nodes, L2
/// projections of -Delta_F u and -Delta u on faces and cells.
template <int Dim>
Eigen::VectorXd interpolate_exact(const Discretization<Dim>& disc, const ScalarField& u);

/// Local DOF values of one element gathered from a global vector.
template <int Dim>
Eigen::VectorXd gather(const ElementProjector<Dim>& element, const Eigen::VectorXd& global);

} // namespace sfvem
