#pragma once

#include "sfvem/macrosub.hpp"
#include "sfvem/polybasis.hpp"

#include <Eigen/Dense>

#include <functional>
#include <map>
#include <utility>
#include <vector>

namespace sfvem {

/// Exact identity of a macro node: sorted (local point id, lattice count) pairs, counts
/// summing to k. Two sub-simplices sharing a node produce the same key.
using NodeKey = std::vector<std::pair<int, int>>;

/// Continuous piecewise P_k functions on a macro subdivision.
template <int Dim>
struct MacroFeSpace
{
    using Point = Eigen::Matrix<double, Dim, 1>;

    MacroSubdivision<Dim> sub;
    int degree = 1;
    std::vector<Point> nodes;
    std::vector<NodeKey> keys;
    std::vector<std::vector<int>> simplex_nodes; // per simplex, in reference lattice order
    std::vector<bool> boundary_mask;             // node lies on the boundary of the cell
    std::vector<int> boundary_nodes;
    std::vector<int> interior_nodes;

    int num_nodes() const { return static_cast<int>(nodes.size()); }
    int num_simplices() const { return sub.num_simplices(); }

    /// -1 if absent.
    int find_node(const NodeKey& key) const;

    /// Affine map of simplex s: x = origin + jacobian * xi.
    Point origin(int s) const { return sub.points[sub.simplices[s][0]]; }
    Eigen::Matrix<double, Dim, Dim> jacobian(int s) const;

    std::map<NodeKey, int> index;
};

extern template struct MacroFeSpace<2>;
extern template struct MacroFeSpace<3>;

/// Node numbering deduplicated by lattice key. Throws GeometryError if the subdivision
/// fails its constraints.
template <int Dim>
MacroFeSpace<Dim> build_macro_space(const MacroSubdivision<Dim>& sub, int k);

/// Stiffness (grad w_i, grad w_j)_K.
template <int Dim>
Eigen::MatrixXd local_stiffness(const MacroFeSpace<Dim>& space);

/// Mass (w_i, w_j)_K.
template <int Dim>
Eigen::MatrixXd local_mass(const MacroFeSpace<Dim>& space);

/// Column a holds (w_i, m_a)_K for the scaled monomials m_a of `basis`.
template <int Dim>
Eigen::MatrixXd moment_matrix(const MacroFeSpace<Dim>& space, const ScaledMonomialBasis<double, Dim>& basis);

/// (w_i, m_alpha)_K for a single basis member.
template <int Dim>
Eigen::VectorXd moment_vector(const MacroFeSpace<Dim>& space, const ScaledMonomialBasis<double, Dim>& basis,
                              int alpha);

/// (w_i, f)_K with a sub-simplex rule of the given exactness.
template <int Dim>
Eigen::VectorXd load_vector(const MacroFeSpace<Dim>& space,
                            const std::function<double(const Eigen::Matrix<double, Dim, 1>&)>& f,
                            int exactness);

/// Nodal interpolant.
template <int Dim>
Eigen::VectorXd interpolate(const MacroFeSpace<Dim>& space,
                            const std::function<double(const Eigen::Matrix<double, Dim, 1>&)>& f);

/// Sub-simplex containing x (largest minimal barycentric coordinate), and its reference point.
template <int Dim>
std::pair<int, Eigen::Matrix<double, Dim, 1>> locate(const MacroFeSpace<Dim>& space,
                                                     const Eigen::Matrix<double, Dim, 1>& x);

template <int Dim>
double evaluate(const MacroFeSpace<Dim>& space, const Eigen::VectorXd& coeffs,
                const Eigen::Matrix<double, Dim, 1>& x);

template <int Dim>
Eigen::Matrix<double, Dim, 1> evaluate_gradient(const MacroFeSpace<Dim>& space, const Eigen::VectorXd& coeffs,
                                                const Eigen::Matrix<double, Dim, 1>& x);

/// Unique solvability needs the interior moment map P_{k-2} -> span{w_i : interior} to be
/// injective: at least dim P_{k-2} interior nodes and full column rank.
struct DimensionCheck
{
    int interior_nodes = 0;
    int required = 0;
    int rank = 0;
    bool ok() const { return interior_nodes >= required && rank == required; }
};

template <int Dim>
DimensionCheck check_dimension(const MacroFeSpace<Dim>& space, const ScaledMonomialBasis<double, Dim>& cell_basis);

/// Scaled monomial basis of P_{k-2} on the subdivided cell (centroid, diameter).
template <int Dim>
ScaledMonomialBasis<double, Dim> cell_basis(const MacroSubdivision<Dim>& sub, int k);

/// Integral centroid of the subdivided region.
template <int Dim>
Eigen::Matrix<double, Dim, 1> subdivision_centroid(const MacroSubdivision<Dim>& sub);

} // namespace sfvem
