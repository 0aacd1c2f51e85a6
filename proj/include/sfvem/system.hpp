#pragma once

#include "sfvem/projector.hpp"

#include <Eigen/Sparse>

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sfvem {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Stiffness system over the free tilde DOFs after symmetric elimination of Dirichlet DOFs.
struct GlobalSystem
{
    SparseMatrix matrix;
    Eigen::VectorXd rhs;
    std::vector<int> free_to_global;
    std::vector<int> global_to_free; // -1 for constrained DOFs
    Eigen::VectorXd lift;            // global vector carrying the Dirichlet values

    int num_free() const { return static_cast<int>(free_to_global.size()); }
    int num_global() const { return static_cast<int>(global_to_free.size()); }
};

/// Sum of the element matrices over all tilde DOFs, before elimination.
template <int Dim>
SparseMatrix assemble_matrix(const Discretization<Dim>& disc);

/// Element load vectors P_K^T m_K with (m_K)_i = (f, w_i)_K.
template <int Dim>
Eigen::VectorXd assemble_load(const Discretization<Dim>& disc, const std::function<double(const Eigen::Vector3d&)>& f);

/// Full system with boundary data g (zero when null). Throws std::invalid_argument if the
/// projectors do not match the layout.
template <int Dim>
GlobalSystem assemble(const Discretization<Dim>& disc, const std::function<double(const Eigen::Vector3d&)>& f,
                      const ScalarField* dirichlet = nullptr);

enum class Preconditioner { Jacobi, None };
enum class SolverKind { CG, Dense };

struct SolverConfig
{
    double tolerance = 1e-12;
    int max_iterations = 0; // 0: ten times the system size; shared by all passes
    int refinement_passes = 1; // CG restarts on the true residual
    Preconditioner preconditioner = Preconditioner::Jacobi;
    SolverKind solver = SolverKind::CG;

    void validate() const;
};

/// Largest system handled by the dense path.
inline constexpr int kDenseLimit = 2000;

struct SolveResult
{
    Eigen::VectorXd x;
    int iterations = 0;
    double residual = 0.0;        // relative, recomputed from b - Ax
    std::vector<double> history;  // relative residual after each iteration, starting with the initial one
};

class SolverError : public std::runtime_error
{
public:
    SolverError(const std::string& what, std::vector<double> history)
        : std::runtime_error(what), history_(std::move(history))
    {}
    const std::vector<double>& history() const { return history_; }

private:
    std::vector<double> history_;
};

SolveResult conjugate_gradient(const SparseMatrix& A, const Eigen::VectorXd& b, const SolverConfig& config);
SolveResult dense_solve(const SparseMatrix& A, const Eigen::VectorXd& b);
SolveResult solve(const GlobalSystem& system, const SolverConfig& config);

/// Dense Cholesky of A: succeeds iff A is numerically SPD.
struct SpdCertificate
{
    bool ok = false;
    double min_pivot = 0.0; // smallest squared diagonal of the Cholesky factor
};

SpdCertificate spd_certificate(const SparseMatrix& A);

/// Global tilde-DOF vector from the free solution and the lifting.
Eigen::VectorXd expand(const GlobalSystem& system, const Eigen::VectorXd& free);

/// Per-cell macro coefficients P_K * (local DOFs).
template <int Dim>
std::vector<Eigen::VectorXd> reconstruct(const Discretization<Dim>& disc, const Eigen::VectorXd& global);

/// Solver settings with SFVEM_CG_TOL applied when set.
SolverConfig solver_config_from_env(SolverConfig base = {});

} // namespace sfvem
