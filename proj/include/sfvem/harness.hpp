#pragma once

#include "sfvem/system.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace sfvem {

/// Exact solution u with f = -Delta u; the Dirichlet data is u on the boundary.
struct ManufacturedProblem
{
    std::string id;
    int dim = 2;
    ScalarField u;
    std::function<double(const Eigen::Vector3d&)> f;
};

/// "sinsin2d": sin(pi x) sin(pi y) on the unit square.
/// "poly3d": 64 (x - x^2)(y - y^2)(z - z^2) on the unit cube.
ManufacturedProblem problem_registry(const std::string& id);

std::vector<std::string> problem_ids();

/// u = p, f = -Delta p.
ManufacturedProblem polynomial_problem(const Polynomial& p);

struct ErrorReport
{
    int level = 0;
    double h = 0.0;
    double l2_error = 0.0;
    double h1_error = 0.0;
    int num_dofs = 0;
    int num_free = 0;
    int iterations = 0;
};

/// Errors of u_h against r_h = Pi(I_h u), both piecewise P_k on the macro subdivisions.
template <int Dim>
ErrorReport error_norms(const Discretization<Dim>& disc, const std::vector<Eigen::VectorXd>& uh,
                        const ManufacturedProblem& problem);

template <int Dim>
struct Solution
{
    Discretization<Dim> disc;
    GlobalSystem system;
    SolveResult result;
    Eigen::VectorXd dofs;                // global tilde DOFs
    std::vector<Eigen::VectorXd> fields; // per-cell macro coefficients
};

/// discretize -> assemble -> solve -> reconstruct.
Solution<2> solve_problem(const PolyMesh2D& mesh, int k, const ManufacturedProblem& problem,
                          const SolverConfig& config);
Solution<3> solve_problem(const PolyMesh3D& mesh, int k, const ManufacturedProblem& problem,
                          SubdivisionStrategy strategy, const SolverConfig& config);

/// log2(coarse / fine); NaN unless both errors are positive.
double observed_rate(double coarse, double fine);

struct ConvergenceReport
{
    std::string family;
    std::string problem;
    int degree = 1;
    std::vector<ErrorReport> rows;

    /// Rate between row i-1 and row i; NaN for the first row or a zero error.
    double l2_rate(std::size_t i) const;
    double h1_rate(std::size_t i) const;
};

ConvergenceReport convergence_study(MeshFamily family, int k, int first_level, int last_level,
                                    const ManufacturedProblem& problem, SubdivisionStrategy strategy,
                                    const SolverConfig& config);

/// Columns grid,l2_err,l2_rate,h1_err,h1_rate,ndof,iters; undefined rates are left empty.
void write_csv(const ConvergenceReport& report, std::ostream& os);
void write_csv(const ConvergenceReport& report, const std::string& path);

struct CsvRow
{
    int grid = 0;
    double l2_err = 0.0;
    std::optional<double> l2_rate;
    double h1_err = 0.0;
    std::optional<double> h1_rate;
    int ndof = 0;
    int iters = 0;
};

std::vector<CsvRow> read_csv(std::istream& is);

/// FNV-1a 64-bit hash, hex encoded.
std::string fnv1a_hex(const std::string& bytes);

/// Solution document: mesh hash, degree, DOF vector, per-cell macro coefficients, errors.
template <int Dim>
void write_solution_json(const Solution<Dim>& sol, const std::string& mesh_hash, const std::string& problem,
                         const std::optional<ErrorReport>& errors, std::ostream& os);

} // namespace sfvem
