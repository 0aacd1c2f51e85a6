#include "sfvem/system.hpp"

#include "sfvem/quadrature.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <cstdlib>
#include <sstream>

namespace sfvem {

namespace {

template <int Dim>
void check_layout(const Discretization<Dim>& disc)
{
    if (static_cast<int>(disc.elements.size()) != disc.mesh.num_cells()) {
        throw std::invalid_argument("projector count does not match the mesh");
    }
    for (int c = 0; c < static_cast<int>(disc.elements.size()); ++c) {
        const auto& el = disc.elements[c];
        if (el.cell != c) {
            throw std::invalid_argument("projector " + std::to_string(c) + " belongs to cell " + std::to_string(el.cell));
        }
        for (int g : el.dofs) {
            if (g < 0 || g >= disc.layout.size) {
                throw std::invalid_argument("projector of cell " + std::to_string(c) + " refers to DOF "
                                            + std::to_string(g) + " outside the layout");
            }
        }
        if (el.stiffness.rows() != el.num_local_dofs() || el.projection.cols() != el.num_local_dofs()) {
            throw std::invalid_argument("projector of cell " + std::to_string(c) + " has inconsistent sizes");
        }
    }
}

} // namespace

template <int Dim>
SparseMatrix assemble_matrix(const Discretization<Dim>& disc)
{
    check_layout(disc);
    std::vector<Eigen::Triplet<double>> triplets;
    for (const auto& el : disc.elements) {
        const int n = el.num_local_dofs();
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                triplets.emplace_back(el.dofs[i], el.dofs[j], el.stiffness(i, j));
            }
        }
    }
    SparseMatrix A(disc.layout.size, disc.layout.size);
    A.setFromTriplets(triplets.begin(), triplets.end());
    return A;
}

template <int Dim>
Eigen::VectorXd assemble_load(const Discretization<Dim>& disc, const std::function<double(const Eigen::Vector3d&)>& f)
{
    check_layout(disc);
    const int exactness = std::min(2 * disc.degree + 4, kMaxQuadratureExactness);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(disc.layout.size);
    for (const auto& el : disc.elements) {
        const Eigen::VectorXd m =
            load_vector<Dim>(el.space, [&](const Eigen::Matrix<double, Dim, 1>& x) { return f(lift(x)); }, exactness);
        const Eigen::VectorXd local = el.projection.transpose() * m;
        for (int i = 0; i < el.num_local_dofs(); ++i) {
            b[el.dofs[i]] += local[i];
        }
    }
    return b;
}

template <int Dim>
GlobalSystem assemble(const Discretization<Dim>& disc, const std::function<double(const Eigen::Vector3d&)>& f,
                      const ScalarField* dirichlet)
{
    const auto& layout = disc.layout;
    const SparseMatrix A = assemble_matrix(disc);
    const Eigen::VectorXd b = assemble_load(disc, f);

    GlobalSystem sys;
    sys.global_to_free.assign(layout.size, -1);
    for (int g = 0; g < layout.size; ++g) {
        if (!layout.boundary_mask[g]) {
            sys.global_to_free[g] = sys.num_free();
            sys.free_to_global.push_back(g);
        }
    }
    sys.lift = Eigen::VectorXd::Zero(layout.size);
    if (dirichlet != nullptr) {
        const Eigen::VectorXd values = interpolate_exact(disc, *dirichlet);
        for (int g = 0; g < layout.size; ++g) {
            if (layout.boundary_mask[g]) {
                sys.lift[g] = values[g];
            }
        }
    }
    const Eigen::VectorXd Ag = A * sys.lift;

    const int n = sys.num_free();
    sys.rhs.resize(n);
    std::vector<Eigen::Triplet<double>> triplets;
    for (int i = 0; i < n; ++i) {
        const int g = sys.free_to_global[i];
        sys.rhs[i] = b[g] - Ag[g];
        for (SparseMatrix::InnerIterator it(A, g); it; ++it) {
            const int j = sys.global_to_free[it.col()];
            if (j >= 0) {
                triplets.emplace_back(i, j, it.value());
            }
        }
    }
    sys.matrix.resize(n, n);
    sys.matrix.setFromTriplets(triplets.begin(), triplets.end());
    return sys;
}

void SolverConfig::validate() const
{
    if (!(tolerance > 0.0 && tolerance < 1.0)) {
        throw std::invalid_argument("solver tolerance must lie in (0, 1)");
    }
    if (max_iterations < 0) {
        throw std::invalid_argument("max iterations must be positive");
    }
    if (refinement_passes < 0) {
        throw std::invalid_argument("refinement passes must be non-negative");
    }
}

namespace {

// One Jacobi-PCG run from zero. Appends residuals relative to `scale` to `history`;
// returns false if the budget runs out.
bool cg_pass(const SparseMatrix& A, const Eigen::VectorXd& b, const Eigen::VectorXd& inv_diag, double tolerance,
             double scale, int& budget, Eigen::VectorXd& x, SolveResult& out)
{
    const int n = static_cast<int>(b.size());
    const double bnorm = b.norm();
    x = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd r = b;
    Eigen::VectorXd z = inv_diag.cwiseProduct(r);
    Eigen::VectorXd p = z;
    Eigen::VectorXd q(n);
    double rz = r.dot(z);
    while (budget > 0) {
        --budget;
        q.noalias() = A * p;
        const double alpha = rz / p.dot(q);
        x += alpha * p;
        r -= alpha * q;
        const double rel = r.norm() / bnorm;
        out.history.push_back(rel * bnorm / scale);
        ++out.iterations;
        if (rel <= tolerance) {
            return true;
        }
        z = inv_diag.cwiseProduct(r);
        const double rz_next = r.dot(z);
        p = z + (rz_next / rz) * p;
        rz = rz_next;
    }
    return false;
}

} // namespace

SolveResult conjugate_gradient(const SparseMatrix& A, const Eigen::VectorXd& b, const SolverConfig& config)
{
    config.validate();
    const int n = static_cast<int>(b.size());
    SolveResult out;
    out.x = Eigen::VectorXd::Zero(n);
    const double bnorm = b.norm();
    if (bnorm == 0.0) {
        out.history.push_back(0.0);
        return out;
    }
    Eigen::VectorXd inv_diag = Eigen::VectorXd::Ones(n);
    if (config.preconditioner == Preconditioner::Jacobi) {
        inv_diag = A.diagonal().cwiseInverse();
    }
    const int max_it = config.max_iterations > 0 ? config.max_iterations : 10 * std::max(n, 1);
    int budget = max_it;
    out.history.push_back(1.0);

    Eigen::VectorXd dx;
    bool converged = cg_pass(A, b, inv_diag, config.tolerance, bnorm, budget, out.x, out);
    // Restarting on the true residual removes the drift of the recursive one, which otherwise
    // leaves errors far above the residual bound on the weakly scaled cell moments.
    for (int pass = 0; converged && pass < config.refinement_passes; ++pass) {
        const Eigen::VectorXd r = b - A * out.x;
        if (r.norm() == 0.0) {
            break;
        }
        converged = cg_pass(A, r, inv_diag, config.tolerance, bnorm, budget, dx, out);
        out.x += dx;
    }
    out.residual = (b - A * out.x).norm() / bnorm;
    if (converged) {
        return out;
    }
    std::ostringstream os;
    os << "conjugate gradients did not reach relative residual " << config.tolerance << " in " << max_it
       << " iterations (final " << out.history.back() << ")";
    throw SolverError(os.str(), out.history);
}

SolveResult dense_solve(const SparseMatrix& A, const Eigen::VectorXd& b)
{
    if (A.rows() > kDenseLimit) {
        throw std::invalid_argument("dense solver is limited to " + std::to_string(kDenseLimit) + " unknowns");
    }
    const Eigen::MatrixXd dense = Eigen::MatrixXd(A);
    Eigen::LLT<Eigen::MatrixXd> llt(dense);
    if (llt.info() != Eigen::Success) {
        throw SolverError("dense Cholesky failed: matrix is not positive definite", {});
    }
    SolveResult out;
    out.x = llt.solve(b);
    const double bnorm = b.norm();
    out.residual = bnorm > 0.0 ? (b - dense * out.x).norm() / bnorm : 0.0;
    out.history.push_back(out.residual);
    return out;
}

SolveResult solve(const GlobalSystem& system, const SolverConfig& config)
{
    config.validate();
    if (config.solver == SolverKind::Dense) {
        return dense_solve(system.matrix, system.rhs);
    }
    return conjugate_gradient(system.matrix, system.rhs, config);
}

SpdCertificate spd_certificate(const SparseMatrix& A)
{
    SpdCertificate cert;
    if (A.rows() == 0) {
        cert.ok = true;
        return cert;
    }
    const Eigen::MatrixXd dense = Eigen::MatrixXd(A);
    Eigen::LLT<Eigen::MatrixXd> llt(dense);
    if (llt.info() != Eigen::Success) {
        return cert;
    }
    const Eigen::VectorXd diag = Eigen::MatrixXd(llt.matrixL()).diagonal();
    cert.min_pivot = diag.cwiseAbs2().minCoeff();
    cert.ok = cert.min_pivot > 0.0;
    return cert;
}

Eigen::VectorXd expand(const GlobalSystem& system, const Eigen::VectorXd& free)
{
    Eigen::VectorXd global = system.lift;
    for (int i = 0; i < system.num_free(); ++i) {
        global[system.free_to_global[i]] = free[i];
    }
    return global;
}

template <int Dim>
std::vector<Eigen::VectorXd> reconstruct(const Discretization<Dim>& disc, const Eigen::VectorXd& global)
{
    std::vector<Eigen::VectorXd> fields;
    fields.reserve(disc.elements.size());
    for (const auto& el : disc.elements) {
        fields.push_back(el.projection * gather(el, global));
    }
    return fields;
}

SolverConfig solver_config_from_env(SolverConfig base)
{
    if (const char* env = std::getenv("SFVEM_CG_TOL")) {
        char* end = nullptr;
        const double tol = std::strtod(env, &end);
        if (end == env || *end != '\0') {
            throw std::invalid_argument(std::string("SFVEM_CG_TOL is not a number: '") + env + "'");
        }
        base.tolerance = tol;
    }
    base.validate();
    return base;
}

template SparseMatrix assemble_matrix<2>(const Discretization<2>&);
template SparseMatrix assemble_matrix<3>(const Discretization<3>&);
template Eigen::VectorXd assemble_load<2>(const Discretization<2>&, const std::function<double(const Eigen::Vector3d&)>&);
template Eigen::VectorXd assemble_load<3>(const Discretization<3>&, const std::function<double(const Eigen::Vector3d&)>&);
template GlobalSystem assemble<2>(const Discretization<2>&, const std::function<double(const Eigen::Vector3d&)>&,
                                  const ScalarField*);
template GlobalSystem assemble<3>(const Discretization<3>&, const std::function<double(const Eigen::Vector3d&)>&,
                                  const ScalarField*);
template std::vector<Eigen::VectorXd> reconstruct<2>(const Discretization<2>&, const Eigen::VectorXd&);
template std::vector<Eigen::VectorXd> reconstruct<3>(const Discretization<3>&, const Eigen::VectorXd&);

} // namespace sfvem
