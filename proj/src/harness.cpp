#include "sfvem/harness.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

namespace sfvem {

ManufacturedProblem problem_registry(const std::string& id)
{
    using std::numbers::pi;
    ManufacturedProblem p;
    p.id = id;
    if (id == "sinsin2d") {
        p.dim = 2;
        p.u.dim = 2;
        p.u.value = [](const Eigen::Vector3d& x) { return std::sin(pi * x[0]) * std::sin(pi * x[1]); };
        p.u.gradient = [](const Eigen::Vector3d& x) {
            return Eigen::Vector3d(pi * std::cos(pi * x[0]) * std::sin(pi * x[1]),
                                   pi * std::sin(pi * x[0]) * std::cos(pi * x[1]), 0.0);
        };
        p.u.hessian = [](const Eigen::Vector3d& x) {
            const double sx = std::sin(pi * x[0]);
            const double sy = std::sin(pi * x[1]);
            const double cx = std::cos(pi * x[0]);
            const double cy = std::cos(pi * x[1]);
            Eigen::Matrix3d h = Eigen::Matrix3d::Zero();
            h(0, 0) = -pi * pi * sx * sy;
            h(1, 1) = -pi * pi * sx * sy;
            h(0, 1) = h(1, 0) = pi * pi * cx * cy;
            return h;
        };
        p.f = [](const Eigen::Vector3d& x) { return 2.0 * pi * pi * std::sin(pi * x[0]) * std::sin(pi * x[1]); };
        return p;
    }
    if (id == "poly3d") {
        auto b = [](double t) { return t - t * t; };
        auto db = [](double t) { return 1.0 - 2.0 * t; };
        p.dim = 3;
        p.u.dim = 3;
        p.u.value = [b](const Eigen::Vector3d& x) { return 64.0 * b(x[0]) * b(x[1]) * b(x[2]); };
        p.u.gradient = [b, db](const Eigen::Vector3d& x) {
            return Eigen::Vector3d(64.0 * db(x[0]) * b(x[1]) * b(x[2]), 64.0 * b(x[0]) * db(x[1]) * b(x[2]),
                                   64.0 * b(x[0]) * b(x[1]) * db(x[2]));
        };
        p.u.hessian = [b, db](const Eigen::Vector3d& x) {
            const Eigen::Vector3d v(b(x[0]), b(x[1]), b(x[2]));
            const Eigen::Vector3d d(db(x[0]), db(x[1]), db(x[2]));
            Eigen::Matrix3d h;
            for (int i = 0; i < 3; ++i) {
                for (int j = 0; j < 3; ++j) {
                    double t = 64.0;
                    for (int a = 0; a < 3; ++a) {
                        if (a == i && a == j) {
                            t *= -2.0;
                        } else if (a == i || a == j) {
                            t *= d[a];
                        } else {
                            t *= v[a];
                        }
                    }
                    h(i, j) = t;
                }
            }
            return h;
        };
        p.f = [b](const Eigen::Vector3d& x) {
            return 128.0 * (b(x[1]) * b(x[2]) + b(x[0]) * b(x[2]) + b(x[0]) * b(x[1]));
        };
        return p;
    }
    throw std::invalid_argument("unknown problem '" + id + "' (expected sinsin2d or poly3d)");
}

std::vector<std::string> problem_ids()
{
    return {"sinsin2d", "poly3d"};
}

ManufacturedProblem polynomial_problem(const Polynomial& poly)
{
    ManufacturedProblem p;
    p.id = "polynomial";
    p.dim = poly.dim;
    p.u = poly.field();
    const ScalarField u = p.u;
    p.f = [u](const Eigen::Vector3d& x) { return -u.laplacian(x); };
    return p;
}

template <int Dim>
ErrorReport error_norms(const Discretization<Dim>& disc, const std::vector<Eigen::VectorXd>& uh,
                        const ManufacturedProblem& problem)
{
    const Eigen::VectorXd ref = interpolate_exact(disc, problem.u);
    double l2 = 0.0;
    double h1 = 0.0;
    for (std::size_t c = 0; c < disc.elements.size(); ++c) {
        const auto& el = disc.elements[c];
        const Eigen::VectorXd e = el.projection * gather(el, ref) - uh[c];
        l2 += e.dot(local_mass(el.space) * e);
        h1 += e.dot(local_stiffness(el.space) * e);
    }
    ErrorReport r;
    r.l2_error = std::sqrt(std::max(l2, 0.0));
    r.h1_error = std::sqrt(std::max(h1, 0.0));
    r.h = mesh_size(disc.mesh);
    r.num_dofs = disc.layout.size;
    return r;
}

template ErrorReport error_norms<2>(const Discretization<2>&, const std::vector<Eigen::VectorXd>&,
                                    const ManufacturedProblem&);
template ErrorReport error_norms<3>(const Discretization<3>&, const std::vector<Eigen::VectorXd>&,
                                    const ManufacturedProblem&);

namespace {

template <int Dim>
void finish(Solution<Dim>& sol, const ManufacturedProblem& problem, const SolverConfig& config)
{
    if (problem.dim != Dim) {
        throw std::invalid_argument("problem '" + problem.id + "' is " + std::to_string(problem.dim)
                                    + "D but the mesh is " + std::to_string(Dim) + "D");
    }
    sol.system = assemble(sol.disc, problem.f, &problem.u);
    sol.result = solve(sol.system, config);
    sol.dofs = expand(sol.system, sol.result.x);
    sol.fields = reconstruct(sol.disc, sol.dofs);
}

} // namespace

Solution<2> solve_problem(const PolyMesh2D& mesh, int k, const ManufacturedProblem& problem,
                          const SolverConfig& config)
{
    Solution<2> sol;
    sol.disc = discretize(mesh, k);
    finish(sol, problem, config);
    return sol;
}

Solution<3> solve_problem(const PolyMesh3D& mesh, int k, const ManufacturedProblem& problem,
                          SubdivisionStrategy strategy, const SolverConfig& config)
{
    Solution<3> sol;
    sol.disc = discretize(mesh, k, strategy);
    finish(sol, problem, config);
    return sol;
}

double observed_rate(double coarse, double fine)
{
    if (!(coarse > 0.0 && fine > 0.0)) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    return std::log2(coarse / fine);
}

double ConvergenceReport::l2_rate(std::size_t i) const
{
    if (i == 0 || i >= rows.size()) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    return observed_rate(rows[i - 1].l2_error, rows[i].l2_error);
}

double ConvergenceReport::h1_rate(std::size_t i) const
{
    if (i == 0 || i >= rows.size()) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    return observed_rate(rows[i - 1].h1_error, rows[i].h1_error);
}

namespace {

template <int Dim>
ErrorReport run_level(const MeshType<Dim>& mesh, int level, int k, const ManufacturedProblem& problem,
                      SubdivisionStrategy strategy, const SolverConfig& config)
{
    Solution<Dim> sol;
    if constexpr (Dim == 2) {
        (void)strategy;
        sol = solve_problem(mesh, k, problem, config);
    } else {
        sol = solve_problem(mesh, k, problem, strategy, config);
    }
    ErrorReport r = error_norms(sol.disc, sol.fields, problem);
    r.level = level;
    r.num_free = sol.system.num_free();
    r.iterations = sol.result.iterations;
    return r;
}

} // namespace

ConvergenceReport convergence_study(MeshFamily family, int k, int first_level, int last_level,
                                    const ManufacturedProblem& problem, SubdivisionStrategy strategy,
                                    const SolverConfig& config)
{
    if (first_level < 1 || last_level < first_level) {
        throw std::invalid_argument("levels must satisfy 1 <= first <= last");
    }
    ConvergenceReport report;
    report.family = to_string(family);
    report.problem = problem.id;
    report.degree = k;
    for (int level = first_level; level <= last_level; ++level) {
        if (family == MeshFamily::Cube) {
            report.rows.push_back(run_level<3>(generate_cube_mesh(level), level, k, problem, strategy, config));
        } else {
            report.rows.push_back(run_level<2>(std::get<PolyMesh2D>(generate_mesh(family, level)), level, k,
                                               problem, strategy, config));
        }
    }
    return report;
}

void write_csv(const ConvergenceReport& report, std::ostream& os)
{
    const auto old = os.precision(std::numeric_limits<double>::max_digits10);
    os << "grid,l2_err,l2_rate,h1_err,h1_rate,ndof,iters\n";
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        const auto& r = report.rows[i];
        os << r.level << ',' << r.l2_error << ',';
        if (const double rate = report.l2_rate(i); !std::isnan(rate)) {
            os << rate;
        }
        os << ',' << r.h1_error << ',';
        if (const double rate = report.h1_rate(i); !std::isnan(rate)) {
            os << rate;
        }
        os << ',' << r.num_free << ',' << r.iterations << '\n';
    }
    os.precision(old);
}

void write_csv(const ConvergenceReport& report, const std::string& path)
{
    std::ofstream os(path);
    if (!os) {
        throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    write_csv(report, os);
}

std::vector<CsvRow> read_csv(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line) || line != "grid,l2_err,l2_rate,h1_err,h1_rate,ndof,iters") {
        throw std::runtime_error("unexpected CSV header");
    }
    std::vector<CsvRow> rows;
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) {
            cells.push_back(cell);
        }
        if (!line.empty() && line.back() == ',') {
            cells.emplace_back();
        }
        if (cells.size() != 7) {
            throw std::runtime_error("CSV line " + std::to_string(lineno) + ": expected 7 fields");
        }
        auto optional = [](const std::string& s) -> std::optional<double> {
            if (s.empty()) {
                return std::nullopt;
            }
            return std::stod(s);
        };
        CsvRow r;
        r.grid = std::stoi(cells[0]);
        r.l2_err = std::stod(cells[1]);
        r.l2_rate = optional(cells[2]);
        r.h1_err = std::stod(cells[3]);
        r.h1_rate = optional(cells[4]);
        r.ndof = std::stoi(cells[5]);
        r.iters = std::stoi(cells[6]);
        rows.push_back(r);
    }
    return rows;
}

std::string fnv1a_hex(const std::string& bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

template <int Dim>
void write_solution_json(const Solution<Dim>& sol, const std::string& mesh_hash, const std::string& problem,
                         const std::optional<ErrorReport>& errors, std::ostream& os)
{
    nlohmann::json doc;
    doc["mesh_hash"] = "fnv1a64:" + mesh_hash;
    doc["dimension"] = Dim;
    doc["degree"] = sol.disc.degree;
    doc["problem"] = problem;
    doc["dofs"] = std::vector<double>(sol.dofs.data(), sol.dofs.data() + sol.dofs.size());
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& f : sol.fields) {
        cells.push_back(std::vector<double>(f.data(), f.data() + f.size()));
    }
    doc["cells"] = std::move(cells);
    doc["solver"] = {{"iterations", sol.result.iterations}, {"relative_residual", sol.result.residual}};
    if (errors) {
        doc["errors"] = {{"l2", errors->l2_error}, {"h1", errors->h1_error}, {"h", errors->h}};
    } else {
        doc["errors"] = nullptr;
    }
    os << doc.dump() << '\n';
}

template void write_solution_json<2>(const Solution<2>&, const std::string&, const std::string&,
                                     const std::optional<ErrorReport>&, std::ostream&);
template void write_solution_json<3>(const Solution<3>&, const std::string&, const std::string&,
                                     const std::optional<ErrorReport>&, std::ostream&);

} // namespace sfvem
