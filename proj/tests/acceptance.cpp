// Acceptance run: one PASS/FAIL line per criterion, details indented below it.
//   acceptance         all criteria
//   acceptance 4 6     the listed ones

#include "support.hpp"

#include "sfvem/quadrature.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>

using namespace sfvem;
using namespace sfvem::testing;

namespace {

class Log
{
public:
    template <typename... Args>
    void note(Args&&... args)
    {
        std::ostringstream os;
        (os << ... << args);
        lines_.push_back("    " + os.str());
    }

    void check(bool ok, const std::string& what)
    {
        if (!ok) {
            passed_ = false;
            note("FAILED ", what);
        }
    }

    bool passed() const { return passed_; }
    const std::vector<std::string>& lines() const { return lines_; }

private:
    bool passed_ = true;
    std::vector<std::string> lines_;
};

std::string fmt(double v, int digits = 3)
{
    std::ostringstream os;
    os << std::setprecision(digits) << v;
    return os.str();
}

std::string fixed2(double v)
{
    std::ostringstream os;
    os << std::fixed << std::setprecision(2) << v;
    return os.str();
}

// ---------------------------------------------------------------- 1

struct CellCase
{
    std::string name;
    std::variant<PolyMesh2D, PolyMesh3D> mesh;
    SubdivisionStrategy strategy = SubdivisionStrategy::Auto;
};

std::vector<CellCase> single_cells()
{
    std::vector<CellCase> cells;
    cells.push_back({"triangle", reference_triangle_mesh(), SubdivisionStrategy::Auto});
    const auto pent = generate_pentagon_mesh(1);
    for (int c = 0; c < pent.num_cells(); ++c) {
        cells.push_back({"pentagon " + std::to_string(c), single_polygon(cell_points(pent, c)), SubdivisionStrategy::Auto});
    }
    const auto hex = generate_hexagon_mesh(1);
    for (int c = 0; c < hex.num_cells(); ++c) {
        cells.push_back({"hexagon " + std::to_string(c), single_polygon(cell_points(hex, c)), SubdivisionStrategy::Auto});
    }
    cells.push_back({"cube (kuhn)", unit_cube_mesh(), SubdivisionStrategy::Kuhn});
    cells.push_back({"cube (center)", unit_cube_mesh(), SubdivisionStrategy::Center});
    cells.push_back({"tetrahedron (center)", unit_tetrahedron_mesh(), SubdivisionStrategy::Center});
    return cells;
}

template <int Dim>
double reproduction_error(const Discretization<Dim>& disc, const Polynomial& p)
{
    const Eigen::VectorXd dofs = interpolate_exact(disc, p.field());
    double err = 0.0;
    double scale = 0.0;
    for (const auto& el : disc.elements) {
        const Eigen::VectorXd c = el.projection * gather(el, dofs);
        for (int i = 0; i < el.space.num_nodes(); ++i) {
            const double exact = p(lift(el.space.nodes[i]));
            err = std::max(err, std::abs(c[i] - exact));
            scale = std::max(scale, std::abs(exact));
        }
    }
    return err / std::max(scale, 1e-300);
}

bool criterion_reproduction(Log& log)
{
    auto rng = make_rng(1001);
    for (const auto& cell : single_cells()) {
        double worst = 0.0;
        for (int k = 1; k <= kMaxDegree; ++k) {
            const int dim = cell.mesh.index() == 0 ? 2 : 3;
            for (int t = 0; t < 10; ++t) {
                const auto p = random_polynomial(dim, k, rng);
                double e = 0.0;
                if (dim == 2) {
                    e = reproduction_error(discretize(std::get<PolyMesh2D>(cell.mesh), k), p);
                } else {
                    e = reproduction_error(discretize(std::get<PolyMesh3D>(cell.mesh), k, cell.strategy), p);
                }
                worst = std::max(worst, e);
                log.check(e <= 1e-9, cell.name + " k=" + std::to_string(k) + " relative error " + fmt(e));
            }
        }
        log.note(cell.name, ": worst relative node error ", fmt(worst), " over k=1..5");
    }
    return log.passed();
}

// ---------------------------------------------------------------- 2

bool criterion_spd(Log& log)
{
    auto zero = [](const Eigen::Vector3d&) { return 0.0; };
    for (const auto family : {MeshFamily::Pentagon, MeshFamily::Hexagon}) {
        for (int level = 1; level <= 3; ++level) {
            const auto mesh = std::get<PolyMesh2D>(generate_mesh(family, level));
            for (int k = 1; k <= kMaxDegree; ++k) {
                const auto sys = assemble(discretize(mesh, k), zero);
                const auto cert = spd_certificate(sys.matrix);
                log.check(cert.ok, to_string(family) + " level " + std::to_string(level) + " k=" + std::to_string(k));
            }
        }
        log.note(to_string(family), " levels 1-3, k=1..5: factorized");
    }
    for (const auto strategy : {SubdivisionStrategy::Kuhn, SubdivisionStrategy::Center}) {
        for (int level = 1; level <= 2; ++level) {
            const auto mesh = generate_cube_mesh(level);
            for (int k = 1; k <= kMaxDegree; ++k) {
                const auto sys = assemble(discretize(mesh, k, strategy), zero);
                const auto cert = spd_certificate(sys.matrix);
                log.check(cert.ok, "cube (" + to_string(strategy) + ") level " + std::to_string(level)
                                       + " k=" + std::to_string(k));
            }
        }
        log.note("cube (", to_string(strategy), ") levels 1-2, k=1..5: factorized");
    }
    return log.passed();
}

// ---------------------------------------------------------------- 3

bool criterion_patch(Log& log)
{
    auto rng = make_rng(3003);
    for (const auto family : {MeshFamily::Pentagon, MeshFamily::Hexagon}) {
        double worst = 0.0;
        for (int level = 1; level <= 3; ++level) {
            const auto mesh = std::get<PolyMesh2D>(generate_mesh(family, level));
            for (int k = 1; k <= 3; ++k) {
                const auto problem = random_polynomial_problem(2, k, rng);
                const auto sol = solve_problem(mesh, k, problem, SolverConfig{});
                const auto r = error_norms(sol.disc, sol.fields, problem);
                worst = std::max({worst, r.l2_error, r.h1_error});
                log.check(r.l2_error <= 1e-8 && r.h1_error <= 1e-8,
                          to_string(family) + " level " + std::to_string(level) + " k=" + std::to_string(k) + ": "
                              + fmt(r.l2_error) + " / " + fmt(r.h1_error));
            }
        }
        log.note(to_string(family), " levels 1-3, k=1..3: worst error ", fmt(worst));
    }
    for (const auto strategy : {SubdivisionStrategy::Kuhn, SubdivisionStrategy::Center}) {
        double worst = 0.0;
        for (int level = 1; level <= 3; ++level) {
            for (int k = 1; k <= 3; ++k) {
                if (level == 3 && k == 3) {
                    continue;
                }
                const auto problem = random_polynomial_problem(3, k, rng);
                const auto sol = solve_problem(generate_cube_mesh(level), k, problem, strategy, SolverConfig{});
                const auto r = error_norms(sol.disc, sol.fields, problem);
                worst = std::max({worst, r.l2_error, r.h1_error});
                log.check(r.l2_error <= 1e-8 && r.h1_error <= 1e-8,
                          "cube (" + to_string(strategy) + ") level " + std::to_string(level) + " k="
                              + std::to_string(k) + ": " + fmt(r.l2_error) + " / " + fmt(r.h1_error));
            }
        }
        log.note("cube (", to_string(strategy), ") levels 1-3, k=1..3: worst error ", fmt(worst));
    }
    return log.passed();
}

// ---------------------------------------------------------------- 4-6

struct RatePlan
{
    int k;
    int first;
    int last;
};

ConvergenceReport study(Log& log, MeshFamily family, int k, int first, int last, SubdivisionStrategy strategy)
{
    const auto problem = problem_registry(family_dimension(family) == 2 ? "sinsin2d" : "poly3d");
    const auto report = convergence_study(family, k, first, last, problem, strategy, SolverConfig{});
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        const auto& r = report.rows[i];
        std::ostringstream os;
        os << "  level " << r.level << "  l2 " << std::scientific << std::setprecision(4) << r.l2_error;
        os << "  " << (i == 0 ? "    " : fixed2(report.l2_rate(i)));
        os << "  h1 " << std::scientific << std::setprecision(4) << r.h1_error;
        os << "  " << (i == 0 ? "    " : fixed2(report.h1_rate(i)));
        os << "  free " << r.num_free << "  cg " << r.iterations;
        log.note(os.str());
    }
    return report;
}

bool optimal_rates(Log& log, MeshFamily family, const std::vector<RatePlan>& plans)
{
    for (const auto& plan : plans) {
        log.note(to_string(family), " k=", plan.k, " levels ", plan.first, "-", plan.last);
        const auto report = study(log, family, plan.k, plan.first, plan.last, SubdivisionStrategy::Auto);
        const std::size_t last = report.rows.size() - 1;
        const double l2 = report.l2_rate(last);
        const double h1 = report.h1_rate(last);
        log.check(std::abs(l2 - (plan.k + 1)) <= 0.15, "final L2 rate " + fixed2(l2) + " vs " + std::to_string(plan.k + 1));
        log.check(std::abs(h1 - plan.k) <= 0.15, "final H1 rate " + fixed2(h1) + " vs " + std::to_string(plan.k));
    }
    return log.passed();
}

bool criterion_pentagon(Log& log)
{
    optimal_rates(log, MeshFamily::Pentagon, {{1, 4, 7}, {2, 4, 7}, {3, 3, 6}, {4, 3, 6}, {5, 2, 5}});

    // Absolute errors at k=1, level 7 against reference values.
    const auto mesh = generate_pentagon_mesh(7);
    const auto problem = problem_registry("sinsin2d");
    const auto sol = solve_problem(mesh, 1, problem, SolverConfig{});
    const auto r = error_norms(sol.disc, sol.fields, problem);
    const double l2_ref = 0.4462e-4;
    const double h1_ref = 0.5834e-2;
    auto within = [](double v, double ref) { return v <= 1.5 * ref && v >= ref / 1.5; };
    log.note("k=1 level 7 absolute: l2 ", fmt(r.l2_error, 4), " (reference ", l2_ref, ", ratio ",
             fmt(r.l2_error / l2_ref), "), h1 ", fmt(r.h1_error, 4), " (reference ", h1_ref, ", ratio ",
             fmt(r.h1_error / h1_ref), ")");
    log.check(within(r.l2_error, l2_ref), "k=1 level 7 L2 error not within x1.5 of the reference");
    log.check(within(r.h1_error, h1_ref), "k=1 level 7 H1 error not within x1.5 of the reference");
    return log.passed();
}

bool criterion_hexagon(Log& log)
{
    return optimal_rates(log, MeshFamily::Hexagon, {{1, 4, 7}, {2, 4, 7}, {3, 3, 6}, {4, 2, 5}, {5, 1, 4}});
}

bool cube_floors(const ConvergenceReport& report, int k)
{
    const std::size_t last = report.rows.size() - 1;
    return report.l2_rate(last) >= k + 1 - 0.2 && report.h1_rate(last) >= k - 0.2;
}

bool criterion_cube(Log& log)
{
    // Observed superconvergence for k = 1, 2 (reported, not asserted).
    struct Super
    {
        int k;
        double l2;
        double h1;
    };
    for (const Super s : {Super{1, std::nan(""), 2.0}, Super{2, 3.9, 2.9}}) {
        bool floors = false;
        for (const auto strategy : {SubdivisionStrategy::Kuhn, SubdivisionStrategy::Center}) {
            log.note("cube k=", s.k, " levels 1-4, ", to_string(strategy));
            const auto report = study(log, MeshFamily::Cube, s.k, 1, 4, strategy);
            const std::size_t last = report.rows.size() - 1;
            const double l2 = report.l2_rate(last);
            const double h1 = report.h1_rate(last);
            const bool super = (std::isnan(s.l2) || std::abs(l2 - s.l2) <= 0.2) && std::abs(h1 - s.h1) <= 0.2;
            std::ostringstream target;
            if (!std::isnan(s.l2)) {
                target << "L2 " << s.l2 << ", ";
            }
            target << "H1 " << s.h1;
            log.note("INFO superconvergence (", target.str(), " +-0.2): ", super ? "reproduced" : "not reproduced",
                     " with final rates ", fixed2(l2), " / ", fixed2(h1));
            const bool ok = cube_floors(report, s.k);
            log.note("optimal floors (L2 >= ", s.k + 1 - 0.2, ", H1 >= ", s.k - 0.2, "): ", ok ? "met" : "missed");
            floors = floors || ok;
            if (ok && super) {
                break;
            }
        }
        log.check(floors, "cube k=" + std::to_string(s.k) + " optimal floors missed with both strategies");
    }
    for (const RatePlan plan : {RatePlan{3, 2, 4}, RatePlan{4, 2, 4}, RatePlan{5, 1, 3}}) {
        log.note("cube k=", plan.k, " levels ", plan.first, "-", plan.last, ", center");
        const auto report = study(log, MeshFamily::Cube, plan.k, plan.first, plan.last, SubdivisionStrategy::Center);
        const std::size_t last = report.rows.size() - 1;
        log.check(cube_floors(report, plan.k), "cube k=" + std::to_string(plan.k) + " final rates "
                                                   + fixed2(report.l2_rate(last)) + " / "
                                                   + fixed2(report.h1_rate(last)) + " below the optimal floors");
    }
    return log.passed();
}

// ---------------------------------------------------------------- 7

template <int Dim>
void compare_solvers(Log& log, const Discretization<Dim>& disc, const ManufacturedProblem& problem,
                     const std::string& name, int& count, double& worst)
{
    const auto sys = assemble(disc, problem.f, &problem.u);
    if (sys.num_free() == 0 || sys.num_free() > kDenseLimit) {
        return;
    }
    const auto cg = solve(sys, SolverConfig{});
    SolverConfig dense;
    dense.solver = SolverKind::Dense;
    const auto direct = solve(sys, dense);
    const double diff = max_abs(cg.x - direct.x);
    worst = std::max(worst, diff);
    ++count;
    log.check(diff <= 1e-10, name + ": max difference " + fmt(diff));
}

bool criterion_oracle(Log& log)
{
    int count = 0;
    double worst = 0.0;
    auto rng = make_rng(7007);
    for (const auto family : {MeshFamily::Pentagon, MeshFamily::Hexagon}) {
        for (int level = 1; level <= 5; ++level) {
            const auto mesh = std::get<PolyMesh2D>(generate_mesh(family, level));
            for (int k = 1; k <= kMaxDegree; ++k) {
                if (build_layout(mesh, k).size > 4 * kDenseLimit) {
                    continue;
                }
                const auto disc = discretize(mesh, k);
                const std::string name = to_string(family) + " level " + std::to_string(level) + " k=" + std::to_string(k);
                compare_solvers(log, disc, problem_registry("sinsin2d"), name, count, worst);
                if (k <= 3) {
                    compare_solvers(log, disc, random_polynomial_problem(2, k, rng), name + " patch", count, worst);
                }
            }
        }
    }
    for (const auto strategy : {SubdivisionStrategy::Kuhn, SubdivisionStrategy::Center}) {
        for (int level = 1; level <= 4; ++level) {
            const auto mesh = generate_cube_mesh(level);
            for (int k = 1; k <= kMaxDegree; ++k) {
                if (build_layout(mesh, k).size > 4 * kDenseLimit) {
                    continue;
                }
                const auto disc = discretize(mesh, k, strategy);
                const std::string name =
                    "cube (" + to_string(strategy) + ") level " + std::to_string(level) + " k=" + std::to_string(k);
                compare_solvers(log, disc, problem_registry("poly3d"), name, count, worst);
                if (k <= 3) {
                    compare_solvers(log, disc, random_polynomial_problem(3, k, rng), name + " patch", count, worst);
                }
            }
        }
    }
    log.note(count, " systems with at most ", kDenseLimit, " free DOFs, worst max-norm difference ", fmt(worst));
    return log.passed();
}

// ---------------------------------------------------------------- 8

template <int Dim>
void quadrature_properties(Log& log, double& worst)
{
    for (int e = 0; e <= kMaxQuadratureExactness; ++e) {
        const auto& q = simplex_quadrature<double, Dim>(e);
        double measure = 1.0;
        for (int i = 2; i <= Dim; ++i) {
            measure /= i;
        }
        log.check(std::abs(q.weights.sum() - measure) <= 1e-13 * measure, "weight sum, d=" + std::to_string(Dim));
        for (const auto& alpha : graded_multi_indices<Dim>(e)) {
            double approx = 0.0;
            for (int p = 0; p < q.size(); ++p) {
                double m = q.weights[p];
                for (int d = 0; d < Dim; ++d) {
                    m *= std::pow(q.points(d, p), alpha[d]);
                }
                approx += m;
            }
            const double exact = reference_monomial_integral(Dim, alpha[0], Dim > 1 ? alpha[1] : 0, Dim > 2 ? alpha[2] : 0);
            const double rel = std::abs(approx - exact) / exact;
            worst = std::max(worst, rel);
            log.check(rel <= 1e-13, "quadrature d=" + std::to_string(Dim) + " exactness " + std::to_string(e));
        }
    }
}

template <int Dim>
void lagrange_properties(Log& log, std::mt19937_64& rng, double& worst)
{
    for (int k = 1; k <= kMaxDegree; ++k) {
        const auto& basis = lagrange_basis<double, Dim>(k);
        log.check(basis.size() == poly_dim(k, Dim), "Lagrange size d=" + std::to_string(Dim));
        for (int i = 0; i < basis.size(); ++i) {
            const Eigen::VectorXd v = basis.values(basis.nodes()[i]);
            Eigen::VectorXd delta = Eigen::VectorXd::Zero(basis.size());
            delta[i] = 1.0;
            log.check(max_abs(v - delta) <= 1e-11, "Kronecker delta d=" + std::to_string(Dim));
        }
        const ScaledMonomialBasis<double, Dim> mono(Eigen::Matrix<double, Dim, 1>::Constant(0.25), 0.8, k);
        Eigen::MatrixXd nodal(basis.size(), mono.size());
        for (int i = 0; i < basis.size(); ++i) {
            nodal.row(i) = mono.values(basis.nodes()[i]).transpose();
        }
        for (int t = 0; t < 50; ++t) {
            std::array<Eigen::Matrix<double, Dim, 1>, Dim + 1> verts;
            for (int j = 0; j <= Dim; ++j) {
                verts[j] = LagrangeBasis<double, Dim>::vertex(j);
            }
            const auto x = random_point_in_simplex<Dim>(rng, verts);
            const Eigen::VectorXd phi = basis.values(x);
            log.check(std::abs(phi.sum() - 1.0) <= 1e-13, "partition of unity d=" + std::to_string(Dim));
            const Eigen::VectorXd exact = mono.values(x);
            const double rel = max_abs(nodal.transpose() * phi - exact) / std::max(1.0, max_abs(exact));
            worst = std::max(worst, rel);
            log.check(rel <= 1e-11, "monomial reproduction d=" + std::to_string(Dim) + " k=" + std::to_string(k));
        }
    }
}

template <int Dim>
void monomial_gradients(Log& log, std::mt19937_64& rng)
{
    const double step = 1e-6;
    for (int t = 0; t < 10; ++t) {
        Eigen::Matrix<double, Dim, 1> c;
        Eigen::Matrix<double, Dim, 1> x;
        const double h = uniform(rng, 0.5, 2.0);
        for (int d = 0; d < Dim; ++d) {
            c[d] = uniform(rng, -1.0, 1.0);
            x[d] = c[d] + 0.5 * h * uniform(rng, -1.0, 1.0);
        }
        const ScaledMonomialBasis<double, Dim> b(c, h, 4);
        const auto g = b.gradients(x);
        for (int d = 0; d < Dim; ++d) {
            Eigen::Matrix<double, Dim, 1> dx = Eigen::Matrix<double, Dim, 1>::Zero();
            dx[d] = step;
            const Eigen::VectorXd fd = (b.values(x + dx) - b.values(x - dx)) / (2 * step);
            log.check(max_abs(fd - g.col(d)) <= 1e-8, "monomial gradient d=" + std::to_string(Dim));
        }
    }
}

bool criterion_polybasis(Log& log)
{
    for (int k = 0; k <= kMaxDegree; ++k) {
        log.check(poly_dim(k, 2) == (k + 1) * (k + 2) / 2, "dim P_k in 2D");
        log.check(poly_dim(k, 3) == (k + 1) * (k + 2) * (k + 3) / 6, "dim P_k in 3D");
    }
    for (int k = 1; k <= kMaxDegree; ++k) {
        const auto t = gauss_lobatto_nodes<double>(k);
        bool ok = static_cast<int>(t.size()) == k + 1 && t.front() == 0.0 && t.back() == 1.0;
        for (int j = 0; j <= k; ++j) {
            ok = ok && std::abs(t[j] + t[k - j] - 1.0) <= 1e-15;
            ok = ok && (j == 0 || t[j] > t[j - 1]);
        }
        log.check(ok, "Gauss-Lobatto nodes k=" + std::to_string(k));
    }
    double quad_worst = 0.0;
    quadrature_properties<1>(log, quad_worst);
    quadrature_properties<2>(log, quad_worst);
    quadrature_properties<3>(log, quad_worst);
    log.note("quadrature: d=1..3, exactness 0..14, worst relative monomial error ", fmt(quad_worst));

    auto rng = make_rng(8008);
    double lagrange_worst = 0.0;
    lagrange_properties<1>(log, rng, lagrange_worst);
    lagrange_properties<2>(log, rng, lagrange_worst);
    lagrange_properties<3>(log, rng, lagrange_worst);
    log.note("Lagrange: d=1..3, k=1..5, worst relative reproduction error ", fmt(lagrange_worst));
    monomial_gradients<2>(log, rng);
    monomial_gradients<3>(log, rng);
    log.note("scaled monomial gradients agree with central differences");
    return log.passed();
}

struct Criterion
{
    std::string title;
    std::function<bool(Log&)> run;
};

const std::vector<Criterion>& criteria()
{
    static const std::vector<Criterion> all{
        {"polynomial reproduction", criterion_reproduction},
        {"SPD and unique solvability", criterion_spd},
        {"patch test", criterion_patch},
        {"pentagon rates", criterion_pentagon},
        {"hexagon rates", criterion_hexagon},
        {"cube rates", criterion_cube},
        {"CG vs dense solver", criterion_oracle},
        {"quadrature and basis properties", criterion_polybasis},
    };
    return all;
}

} // namespace

int main(int argc, char** argv)
{
    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) {
        const int n = std::atoi(argv[i]);
        if (n < 1 || n > static_cast<int>(criteria().size())) {
            std::cerr << "usage: acceptance [criterion 1-" << criteria().size() << "]...\n";
            return 2;
        }
        selected.push_back(n);
    }
    if (selected.empty()) {
        for (int n = 1; n <= static_cast<int>(criteria().size()); ++n) {
            selected.push_back(n);
        }
    }

    bool all = true;
    for (int n : selected) {
        const auto& c = criteria()[n - 1];
        Log log;
        const auto start = std::chrono::steady_clock::now();
        bool ok = false;
        try {
            ok = c.run(log);
        } catch (const std::exception& e) {
            log.note("exception: ", e.what());
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::cout << (ok ? "PASS" : "FAIL") << "  criterion " << n << ": " << c.title << "  (" << fixed2(seconds)
                  << " s)\n";
        for (const auto& line : log.lines()) {
            std::cout << line << '\n';
        }
        std::cout.flush();
        all = all && ok;
    }
    return all ? 0 : 1;
}
