#include "cli.hpp"

#include "sfvem/harness.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

namespace sfvem {

namespace {

constexpr const char* kSynopsis =
    "usage: sfvem mesh --family pentagon|hexagon|cube --level L --out FILE\n"
    "       sfvem check --mesh FILE --degree K [--strategy auto|kuhn|center]\n"
    "       sfvem solve --mesh FILE --degree K --problem ID [--strategy S] [--out sol.json] [--errors]\n"
    "       sfvem converge --family F --degree K --levels A..B --problem ID [--strategy S] --csv FILE\n";

class UsageError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

std::pair<int, int> parse_levels(const std::string& text)
{
    const auto dots = text.find("..");
    if (dots == std::string::npos) {
        throw UsageError("--levels expects A..B, got '" + text + "'");
    }
    try {
        std::size_t used_a = 0;
        std::size_t used_b = 0;
        const std::string a = text.substr(0, dots);
        const std::string b = text.substr(dots + 2);
        const int first = std::stoi(a, &used_a);
        const int last = std::stoi(b, &used_b);
        if (used_a != a.size() || used_b != b.size() || first < 1 || last < first) {
            throw UsageError("");
        }
        return {first, last};
    } catch (const std::exception&) {
        throw UsageError("--levels expects A..B with 1 <= A <= B, got '" + text + "'");
    }
}

std::string slurp(const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw std::runtime_error("cannot open '" + path + "'");
    }
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

// Folds per-cell reports into one line per check; the locus names the first failing cell.
class CheckAggregate
{
public:
    void add(const ValidationReport& report, const std::string& where)
    {
        for (const auto& c : report.checks) {
            auto [it, fresh] = index_.try_emplace(c.name, static_cast<int>(merged_.checks.size()));
            if (fresh) {
                merged_.add(c.name, true);
            }
            auto& slot = merged_.checks[it->second];
            if (!c.passed && slot.passed) {
                slot.passed = false;
                slot.locus = where.empty() ? c.locus : where + (c.locus.empty() ? "" : ": " + c.locus);
            }
        }
    }
    void add(const std::string& name, bool passed, const std::string& locus)
    {
        ValidationReport r;
        r.add(name, passed, locus);
        add(r, "");
    }
    const ValidationReport& report() const { return merged_; }

private:
    ValidationReport merged_;
    std::map<std::string, int> index_;
};

std::string dimension_locus(const std::string& where, const DimensionCheck& d)
{
    return where + ": " + std::to_string(d.interior_nodes) + " interior nodes, rank " + std::to_string(d.rank)
           + " of " + std::to_string(d.required);
}

int check_cells(const PolyMesh2D& mesh, int k, SubdivisionStrategy, std::ostream& out)
{
    const auto subs = subdivide_mesh(mesh);
    CheckAggregate constraints;
    for (int c = 0; c < mesh.num_cells(); ++c) {
        constraints.add(check_constraints(subs.cells[c]), "cell " + std::to_string(c));
    }
    out << "subdivision\n" << constraints.report();
    if (!constraints.report().ok()) {
        return kExitValidation;
    }
    CheckAggregate dimension;
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const auto space = build_macro_space(subs.cells[c], k);
        const auto d = check_dimension(space, cell_basis(subs.cells[c], k));
        dimension.add("cell-dimension", d.ok(), d.ok() ? "" : dimension_locus("cell " + std::to_string(c), d));
    }
    out << "degree " << k << '\n' << dimension.report();
    return dimension.report().ok() ? kExitOk : kExitValidation;
}

int check_cells(const PolyMesh3D& mesh, int k, SubdivisionStrategy strategy, std::ostream& out)
{
    MeshSubdivision<3> subs;
    try {
        subs = subdivide_mesh(mesh, strategy);
    } catch (const GeometryError& e) {
        out << "subdivision\nFAIL subdivide [" << e.what() << "]\n";
        return kExitValidation;
    }
    CheckAggregate constraints;
    for (int c = 0; c < mesh.num_cells(); ++c) {
        constraints.add(check_constraints(subs.cells[c]), "cell " + std::to_string(c));
    }
    constraints.add(check_face_matching(mesh, subs), "");
    out << "subdivision (" << to_string(strategy) << ")\n" << constraints.report();
    if (!constraints.report().ok()) {
        return kExitValidation;
    }
    CheckAggregate dimension;
    const TildeDofLayout layout = build_layout(mesh, k);
    for (const auto& tri : subs.faces) {
        const std::string where = "face " + std::to_string(tri.face);
        try {
            const FaceProjector fp = build_face_projector(mesh, layout, tri);
            const auto d = check_dimension(fp.space, fp.basis);
            dimension.add("face-dimension", d.ok(), d.ok() ? "" : dimension_locus(where, d));
        } catch (const GeometryError& e) {
            dimension.add("face-dimension", false, where + ": " + e.what());
        }
    }
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const auto space = build_macro_space(subs.cells[c], k);
        const auto d = check_dimension(space, cell_basis(subs.cells[c], k));
        dimension.add("cell-dimension", d.ok(), d.ok() ? "" : dimension_locus("cell " + std::to_string(c), d));
    }
    out << "degree " << k << '\n' << dimension.report();
    return dimension.report().ok() ? kExitOk : kExitValidation;
}

int run_check(const std::string& path, int k, SubdivisionStrategy strategy, std::ostream& out)
{
    const AnyMesh any = read_mesh(path);
    return std::visit(
        [&](const auto& mesh) {
            const ValidationReport report = validate_mesh(mesh);
            out << "mesh " << path << ": " << mesh.num_vertices() << " vertices, " << mesh.num_cells() << " cells\n"
                << report;
            if (!report.ok()) {
                return kExitValidation;
            }
            return check_cells(mesh, k, strategy, out);
        },
        any);
}

ManufacturedProblem problem_for(const std::string& id, int dim)
{
    ManufacturedProblem p = problem_registry(id);
    if (p.dim != dim) {
        throw UsageError("problem '" + id + "' is " + std::to_string(p.dim) + "D but the mesh is "
                         + std::to_string(dim) + "D");
    }
    return p;
}

template <int Dim>
int finish_solve(const Solution<Dim>& sol, const ManufacturedProblem& problem, const std::string& hash,
                 const std::string& json_path, bool errors, std::ostream& out)
{
    out << "dofs " << sol.disc.layout.size << ", free " << sol.system.num_free() << ", iterations "
        << sol.result.iterations << ", relative residual " << sol.result.residual << '\n';
    std::optional<ErrorReport> report;
    if (errors) {
        report = error_norms(sol.disc, sol.fields, problem);
        out << std::setprecision(6) << std::scientific << "l2 " << report->l2_error << ", h1 " << report->h1_error
            << '\n'
            << std::defaultfloat;
    }
    if (!json_path.empty()) {
        std::ofstream os(json_path);
        if (!os) {
            throw std::runtime_error("cannot open '" + json_path + "' for writing");
        }
        write_solution_json(sol, hash, problem.id, report, os);
    }
    return kExitOk;
}

int run_solve(const std::string& path, int k, SubdivisionStrategy strategy, const std::string& problem_id,
              const std::string& json_path, bool errors, std::ostream& out)
{
    const std::string bytes = slurp(path);
    std::istringstream is(bytes);
    const AnyMesh any = read_mesh(is);
    const std::string hash = fnv1a_hex(bytes);
    const SolverConfig config = solver_config_from_env();
    if (const auto* mesh = std::get_if<PolyMesh2D>(&any)) {
        const auto problem = problem_for(problem_id, 2);
        return finish_solve(solve_problem(*mesh, k, problem, config), problem, hash, json_path, errors, out);
    }
    const auto& mesh = std::get<PolyMesh3D>(any);
    const auto problem = problem_for(problem_id, 3);
    return finish_solve(solve_problem(mesh, k, problem, strategy, config), problem, hash, json_path, errors, out);
}

void print_rate(std::ostream& out, double rate)
{
    if (std::isnan(rate)) {
        out << std::setw(8) << "-";
    } else {
        out << std::setw(8) << std::fixed << std::setprecision(2) << rate << std::defaultfloat;
    }
}

int run_converge(MeshFamily family, int k, std::pair<int, int> levels, const std::string& problem_id,
                 SubdivisionStrategy strategy, const std::string& csv, std::ostream& out)
{
    const auto problem = problem_for(problem_id, family_dimension(family));
    const ConvergenceReport report =
        convergence_study(family, k, levels.first, levels.second, problem, strategy, solver_config_from_env());
    write_csv(report, csv);
    out << "grid      l2_err    rate      h1_err    rate     ndof   iters\n";
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        const auto& r = report.rows[i];
        out << std::setw(4) << r.level << std::setw(12) << std::scientific << std::setprecision(4) << r.l2_error;
        print_rate(out, report.l2_rate(i));
        out << std::setw(12) << std::scientific << std::setprecision(4) << r.h1_error;
        print_rate(out, report.h1_rate(i));
        out << std::setw(9) << r.num_free << std::setw(8) << r.iterations << '\n';
    }
    return kExitOk;
}

int usage(std::ostream& err, const std::string& message)
{
    err << "sfvem: " << message << '\n' << kSynopsis;
    return kExitUsage;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Stabilizer-free virtual elements for the Poisson equation", "sfvem"};
    app.require_subcommand(1);

    const std::vector<std::string> families{"pentagon", "hexagon", "cube"};
    const std::vector<std::string> strategies{"auto", "kuhn", "center"};

    std::string family;
    int level = 0;
    std::string out_path;
    std::string mesh_path;
    int degree = 0;
    std::string strategy = "auto";
    std::string problem;
    bool errors = false;
    std::string levels;
    std::string csv;

    auto* mesh_cmd = app.add_subcommand("mesh", "write a generated mesh");
    mesh_cmd->add_option("--family", family)->required()->check(CLI::IsMember(families));
    mesh_cmd->add_option("--level", level)->required()->check(CLI::PositiveNumber);
    mesh_cmd->add_option("--out", out_path)->required();

    auto* check_cmd = app.add_subcommand("check", "validate a mesh and its macro subdivisions");
    check_cmd->add_option("--mesh", mesh_path)->required();
    check_cmd->add_option("--degree", degree)->required()->check(CLI::Range(1, kMaxDegree));
    check_cmd->add_option("--strategy", strategy)->check(CLI::IsMember(strategies));

    auto* solve_cmd = app.add_subcommand("solve", "solve a manufactured problem on a mesh file");
    solve_cmd->add_option("--mesh", mesh_path)->required();
    solve_cmd->add_option("--degree", degree)->required()->check(CLI::Range(1, kMaxDegree));
    solve_cmd->add_option("--problem", problem)->required()->check(CLI::IsMember(problem_ids()));
    solve_cmd->add_option("--strategy", strategy)->check(CLI::IsMember(strategies));
    solve_cmd->add_option("--out", out_path);
    solve_cmd->add_flag("--errors", errors);

    auto* converge_cmd = app.add_subcommand("converge", "run a convergence study and write a CSV table");
    converge_cmd->add_option("--family", family)->required()->check(CLI::IsMember(families));
    converge_cmd->add_option("--degree", degree)->required()->check(CLI::Range(1, kMaxDegree));
    converge_cmd->add_option("--levels", levels)->required();
    converge_cmd->add_option("--problem", problem)->required()->check(CLI::IsMember(problem_ids()));
    converge_cmd->add_option("--strategy", strategy)->check(CLI::IsMember(strategies));
    converge_cmd->add_option("--csv", csv)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help() << kSynopsis;
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        return usage(err, e.what());
    }

    try {
        const SubdivisionStrategy strat = parse_strategy(strategy);
        if (*mesh_cmd) {
            write_mesh(generate_mesh(parse_family(family), level), out_path);
            return kExitOk;
        }
        if (*check_cmd) {
            return run_check(mesh_path, degree, strat, out);
        }
        if (*solve_cmd) {
            return run_solve(mesh_path, degree, strat, problem, out_path, errors, out);
        }
        return run_converge(parse_family(family), degree, parse_levels(levels), problem, strat, csv, out);
    } catch (const UsageError& e) {
        return usage(err, e.what());
    } catch (const std::invalid_argument& e) {
        return usage(err, e.what());
    } catch (const std::exception& e) {
        err << "sfvem: " << e.what() << '\n';
        return kExitValidation;
    }
}

} // namespace sfvem
