#include "support.hpp"

#include <doctest.h>

#include <cstdlib>
#include <cstring>

using namespace sfvem;
using namespace sfvem::testing;

namespace {

double zero_source(const Eigen::Vector3d&)
{
    return 0.0;
}

Polynomial linear_xy()
{
    Polynomial p;
    p.dim = 2;
    p.exponents = {{1, 0, 0}, {0, 1, 0}};
    p.coefficients = {1.0, 2.0};
    return p;
}

Polynomial linear_xyz()
{
    Polynomial p;
    p.dim = 3;
    p.exponents = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    p.coefficients = {1.0, 2.0, -0.5};
    return p;
}

Eigen::VectorXd random_vector(std::mt19937_64& rng, int n)
{
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) {
        v[i] = uniform(rng, -1.0, 1.0);
    }
    return v;
}

bool bitwise_equal(const SparseMatrix& a, const SparseMatrix& b)
{
    if (a.rows() != b.rows() || a.cols() != b.cols() || a.nonZeros() != b.nonZeros()) {
        return false;
    }
    for (int r = 0; r < a.outerSize(); ++r) {
        SparseMatrix::InnerIterator ia(a, r);
        SparseMatrix::InnerIterator ib(b, r);
        for (; ia && ib; ++ia, ++ib) {
            if (ia.col() != ib.col() || std::memcmp(&ia.valueRef(), &ib.valueRef(), sizeof(double)) != 0) {
                return false;
            }
        }
        if (ia || ib) {
            return false;
        }
    }
    return true;
}

} // namespace

TEST_CASE("zero data gives a zero right-hand side and a zero solution")
{
    const auto disc = discretize(generate_pentagon_mesh(2), 2);
    const auto sys = assemble(disc, zero_source);
    CHECK(sys.rhs.size() == sys.num_free());
    CHECK(max_abs(sys.rhs) == 0.0);
    const auto result = solve(sys, SolverConfig{});
    CHECK(result.iterations == 0);
    CHECK(max_abs(result.x) == 0.0);
    const auto fields = reconstruct(disc, expand(sys, result.x));
    for (const auto& f : fields) {
        CHECK(max_abs(f) == 0.0);
    }
}

TEST_CASE("constants are in the kernel of the unconstrained matrix")
{
    for (int k = 1; k <= 3; ++k) {
        const auto disc = discretize(generate_pentagon_mesh(2), k);
        const SparseMatrix A = assemble_matrix(disc);
        Eigen::VectorXd ones = Eigen::VectorXd::Zero(disc.layout.size);
        ones.head(disc.layout.cell_offset).setOnes();
        CHECK(max_abs(A * ones) < 1e-12);
    }
    // Interior rows: the free block's row sums cancel the couplings to the boundary.
    const auto disc = discretize(generate_pentagon_mesh(2), 1);
    const SparseMatrix A = assemble_matrix(disc);
    const auto sys = assemble(disc, zero_source);
    for (int i = 0; i < sys.num_free(); ++i) {
        const int g = sys.free_to_global[i];
        double free_sum = 0.0;
        for (SparseMatrix::InnerIterator it(sys.matrix, i); it; ++it) {
            free_sum += it.value();
        }
        double boundary_sum = 0.0;
        for (SparseMatrix::InnerIterator it(A, g); it; ++it) {
            if (sys.global_to_free[it.col()] < 0) {
                boundary_sum += it.value();
            }
        }
        CHECK(std::abs(free_sum + boundary_sum) < 1e-13);
    }
}

TEST_CASE("square cell load with f = 1 equals the hat integrals")
{
    const auto disc = discretize(unit_square_mesh(), 1);
    const Eigen::VectorXd b = assemble_load(disc, [](const Eigen::Vector3d&) { return 1.0; });
    REQUIRE(b.size() == 4);
    // Split along the diagonal 1-3: those two hats live on both triangles.
    CHECK(b[0] == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
    CHECK(b[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(b[2] == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
    CHECK(b[3] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("mismatched projectors are rejected")
{
    auto disc = discretize(generate_pentagon_mesh(1), 2);
    std::swap(disc.elements[0], disc.elements[1]);
    CHECK_THROWS_AS(assemble(disc, zero_source), std::invalid_argument);
    disc = discretize(generate_pentagon_mesh(1), 2);
    disc.elements.pop_back();
    CHECK_THROWS_AS(assemble(disc, zero_source), std::invalid_argument);
}

TEST_CASE("matrix invariants")
{
    for (int k = 1; k <= 3; ++k) {
        const auto disc = discretize(generate_hexagon_mesh(2), k);
        const auto sys = assemble(disc, zero_source);
        const SparseMatrix At = sys.matrix.transpose();
        const double scale = Eigen::MatrixXd(sys.matrix).cwiseAbs().maxCoeff();
        CHECK(Eigen::MatrixXd(SparseMatrix(sys.matrix - At)).cwiseAbs().maxCoeff() <= 1e-12 * scale);
        CHECK(sys.matrix.diagonal().minCoeff() > 0.0);
    }
}

TEST_CASE("CG agrees with the dense solver")
{
    const auto problem = problem_registry("sinsin2d");
    const auto disc = discretize(generate_pentagon_mesh(2), 2);
    const auto sys = assemble(disc, problem.f, &problem.u);
    const auto cg = solve(sys, SolverConfig{});
    SolverConfig dense_config;
    dense_config.solver = SolverKind::Dense;
    const auto dense = solve(sys, dense_config);
    CHECK(cg.residual <= 1e-12);
    CHECK(cg.iterations > 0);
    CHECK(max_abs(cg.x - dense.x) <= 1e-10);
}

TEST_CASE("refinement pass recovers the dense solution at high degree")
{
    // Unscaled condition number near 1e12: one CG run stops with errors around 1e-8.
    const auto problem = problem_registry("sinsin2d");
    const auto disc = discretize(generate_hexagon_mesh(2), 5);
    const auto sys = assemble(disc, problem.f, &problem.u);
    SolverConfig dense_config;
    dense_config.solver = SolverKind::Dense;
    const auto dense = solve(sys, dense_config);

    const auto refined = solve(sys, SolverConfig{});
    CHECK(refined.residual <= 1e-12);
    CHECK(static_cast<int>(refined.history.size()) == refined.iterations + 1);
    CHECK(max_abs(refined.x - dense.x) <= 1e-10);

    SolverConfig single;
    single.refinement_passes = 0;
    const auto plain = solve(sys, single);
    CHECK(plain.iterations < refined.iterations);
    CHECK(max_abs(plain.x - dense.x) > max_abs(refined.x - dense.x));
}

TEST_CASE("patch test: linear data is reproduced")
{
    const auto problem = polynomial_problem(linear_xy());
    for (const auto family : {MeshFamily::Pentagon, MeshFamily::Hexagon}) {
        for (int k = 1; k <= kMaxDegree; ++k) {
            const auto sol = solve_problem(std::get<PolyMesh2D>(generate_mesh(family, 2)), k, problem, SolverConfig{});
            for (std::size_t c = 0; c < sol.fields.size(); ++c) {
                const auto& space = sol.disc.elements[c].space;
                for (int i = 0; i < space.num_nodes(); ++i) {
                    const auto& x = space.nodes[i];
                    CHECK(std::abs(sol.fields[c][i] - (x.x() + 2.0 * x.y())) <= 1e-9);
                }
            }
        }
    }
    const auto problem3 = polynomial_problem(linear_xyz());
    for (const auto strategy : {SubdivisionStrategy::Kuhn, SubdivisionStrategy::Center}) {
        for (int k = 1; k <= 2; ++k) {
            const auto sol = solve_problem(generate_cube_mesh(2), k, problem3, strategy, SolverConfig{});
            for (std::size_t c = 0; c < sol.fields.size(); ++c) {
                const auto& space = sol.disc.elements[c].space;
                for (int i = 0; i < space.num_nodes(); ++i) {
                    CHECK(std::abs(sol.fields[c][i] - problem3.u.value(space.nodes[i])) <= 1e-9);
                }
            }
        }
    }
}

TEST_CASE("discrete solution is continuous across shared edges")
{
    auto rng = make_rng(43);
    const auto problem = problem_registry("sinsin2d");
    const auto mesh = generate_pentagon_mesh(2);
    const auto sol = solve_problem(mesh, 3, problem, SolverConfig{});
    std::vector<int> interior;
    for (int e = 0; e < mesh.num_edges(); ++e) {
        if (!mesh.boundary_edge[e]) {
            interior.push_back(e);
        }
    }
    std::uniform_int_distribution<std::size_t> pick(0, interior.size() - 1);
    double jump = 0.0;
    for (int t = 0; t < 200; ++t) {
        const auto& edge = mesh.edges[interior[pick(rng)]];
        const double s = uniform(rng, 0.0, 1.0);
        const Eigen::Vector2d x =
            mesh.vertices[edge.vertices[0]] + s * (mesh.vertices[edge.vertices[1]] - mesh.vertices[edge.vertices[0]]);
        const int a = edge.cells[0];
        const int b = edge.cells[1];
        const double ua = evaluate(sol.disc.elements[a].space, sol.fields[a], x);
        const double ub = evaluate(sol.disc.elements[b].space, sol.fields[b], x);
        jump = std::max(jump, std::abs(ua - ub));
    }
    CHECK(jump <= 1e-10);
}

TEST_CASE("SPD certificate on small systems")
{
    for (int k = 1; k <= kMaxDegree; ++k) {
        const auto disc = discretize(generate_pentagon_mesh(2), k);
        const auto cert = spd_certificate(assemble(disc, zero_source).matrix);
        CHECK(cert.ok);
        CHECK(cert.min_pivot > 0.0);
    }
    SparseMatrix indefinite(2, 2);
    indefinite.insert(0, 0) = 1.0;
    indefinite.insert(1, 1) = -1.0;
    CHECK_FALSE(spd_certificate(indefinite).ok);
}

TEST_CASE("Galerkin residual against element-wise forms")
{
    auto rng = make_rng(47);
    const auto problem = problem_registry("sinsin2d");
    const int k = 2;
    const auto sol = solve_problem(generate_hexagon_mesh(2), k, problem, SolverConfig{});
    const auto& disc = sol.disc;
    std::vector<Eigen::MatrixXd> stiffness;
    std::vector<Eigen::VectorXd> loads;
    for (const auto& el : disc.elements) {
        stiffness.push_back(local_stiffness(el.space));
        loads.push_back(load_vector<2>(el.space, [&](const Eigen::Vector2d& x) { return problem.f(lift(x)); },
                                       2 * k + 4));
    }
    for (int t = 0; t < 20; ++t) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(disc.layout.size);
        v(sol.system.free_to_global) = random_vector(rng, sol.system.num_free());
        const auto vh = reconstruct(disc, v);
        double a = 0.0;
        double l = 0.0;
        double scale = 0.0;
        for (std::size_t c = 0; c < vh.size(); ++c) {
            a += sol.fields[c].dot(stiffness[c] * vh[c]);
            l += loads[c].dot(vh[c]);
            scale += std::abs(loads[c].dot(vh[c]));
        }
        CHECK(std::abs(a - l) <= 1e-12 * std::sqrt(static_cast<double>(v.size())) * std::max(1.0, scale));
    }
}

TEST_CASE("assembly is deterministic")
{
    const auto disc = discretize(generate_cube_mesh(2), 2, SubdivisionStrategy::Center);
    const auto problem = problem_registry("poly3d");
    const auto a = assemble(disc, problem.f, &problem.u);
    const auto b = assemble(disc, problem.f, &problem.u);
    CHECK(bitwise_equal(a.matrix, b.matrix));
    CHECK(std::memcmp(a.rhs.data(), b.rhs.data(), sizeof(double) * a.rhs.size()) == 0);
}

TEST_CASE("solver configuration")
{
    SolverConfig config;
    CHECK(config.tolerance == 1e-12);
    CHECK_NOTHROW(config.validate());
    config.tolerance = 0.0;
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
    config.tolerance = 1.0;
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
    config = SolverConfig{};
    config.max_iterations = -1;
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
    config = SolverConfig{};
    config.refinement_passes = -1;
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);

    ::setenv("SFVEM_CG_TOL", "1e-8", 1);
    CHECK(solver_config_from_env().tolerance == 1e-8);
    ::setenv("SFVEM_CG_TOL", "tight", 1);
    CHECK_THROWS_AS(solver_config_from_env(), std::invalid_argument);
    ::unsetenv("SFVEM_CG_TOL");
    CHECK(solver_config_from_env().tolerance == 1e-12);
}

TEST_CASE("non-convergence reports the residual history")
{
    const auto problem = problem_registry("sinsin2d");
    const auto disc = discretize(generate_pentagon_mesh(3), 2);
    const auto sys = assemble(disc, problem.f);
    SolverConfig config;
    config.max_iterations = 3;
    try {
        solve(sys, config);
        FAIL("expected a solver error");
    } catch (const SolverError& e) {
        REQUIRE(e.history().size() == 4);
        CHECK(e.history().front() == 1.0);
        CHECK(e.history().back() > config.tolerance);
    }
}

TEST_CASE("dense path limits")
{
    SparseMatrix big(kDenseLimit + 1, kDenseLimit + 1);
    big.setIdentity();
    CHECK_THROWS_AS(dense_solve(big, Eigen::VectorXd::Ones(kDenseLimit + 1)), std::invalid_argument);
}
