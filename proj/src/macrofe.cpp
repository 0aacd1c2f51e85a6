#include "sfvem/macrofe.hpp"
#include "sfvem/quadrature.hpp"

#include <algorithm>
#include <array>
#include <sstream>

namespace sfvem {

template <int Dim>
int MacroFeSpace<Dim>::find_node(const NodeKey& key) const
{
    auto it = index.find(key);
    return it == index.end() ? -1 : it->second;
}

template <int Dim>
Eigen::Matrix<double, Dim, Dim> MacroFeSpace<Dim>::jacobian(int s) const
{
    Eigen::Matrix<double, Dim, Dim> jac;
    for (int j = 0; j < Dim; ++j) {
        jac.col(j) = sub.points[sub.simplices[s][j + 1]] - sub.points[sub.simplices[s][0]];
    }
    return jac;
}

template struct MacroFeSpace<2>;
template struct MacroFeSpace<3>;

namespace {

template <int Dim>
constexpr double reference_measure()
{
    return Dim == 2 ? 0.5 : 1.0 / 6.0;
}

/// Reference-simplex integrals of basis products, shared by all spaces of the same (Dim, k).
template <int Dim>
struct ReferenceIntegrals
{
    std::array<std::array<Eigen::MatrixXd, Dim>, Dim> grad; // grad[a][b](i,j) = int d_a phi_i d_b phi_j
    Eigen::MatrixXd mass;
};

template <int Dim>
const ReferenceIntegrals<Dim>& reference_integrals(int k)
{
    static const std::vector<ReferenceIntegrals<Dim>> table = [] {
        std::vector<ReferenceIntegrals<Dim>> t;
        for (int deg = 1; deg <= kMaxDegree; ++deg) {
            const auto& basis = lagrange_basis<double, Dim>(deg);
            const auto& quad = simplex_quadrature<double, Dim>(2 * deg);
            const int n = basis.size();
            ReferenceIntegrals<Dim> r;
            r.mass = Eigen::MatrixXd::Zero(n, n);
            for (auto& row : r.grad) {
                for (auto& m : row) {
                    m = Eigen::MatrixXd::Zero(n, n);
                }
            }
            for (int q = 0; q < quad.size(); ++q) {
                const Eigen::Matrix<double, Dim, 1> xi = quad.points.col(q);
                const Eigen::VectorXd phi = basis.values(xi);
                const Eigen::MatrixXd dphi = basis.gradients(xi);
                r.mass.noalias() += quad.weights[q] * phi * phi.transpose();
                for (int a = 0; a < Dim; ++a) {
                    for (int b = 0; b < Dim; ++b) {
                        r.grad[a][b].noalias() += quad.weights[q] * dphi.col(a) * dphi.col(b).transpose();
                    }
                }
            }
            t.push_back(std::move(r));
        }
        return t;
    }();
    return table.at(k - 1);
}

template <int Dim>
NodeKey make_key(const typename MacroSubdivision<Dim>::Simplex& simplex, const std::array<int, Dim + 1>& counts)
{
    NodeKey key;
    for (int j = 0; j <= Dim; ++j) {
        if (counts[j] > 0) {
            key.emplace_back(simplex[j], counts[j]);
        }
    }
    std::sort(key.begin(), key.end());
    return key;
}

template <int Dim>
void scatter(Eigen::MatrixXd& global, const std::vector<int>& ids, const Eigen::MatrixXd& local)
{
    const int n = static_cast<int>(ids.size());
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            global(ids[i], ids[j]) += local(i, j);
        }
    }
}

} // namespace

template <int Dim>
MacroFeSpace<Dim> build_macro_space(const MacroSubdivision<Dim>& sub, int k)
{
    const ValidationReport report = check_constraints(sub);
    if (!report.ok()) {
        std::ostringstream os;
        os << "macro subdivision of cell " << sub.cell << " violates its constraints:\n" << report;
        throw GeometryError(os.str());
    }
    const auto& basis = lagrange_basis<double, Dim>(k);

    MacroFeSpace<Dim> space;
    space.sub = sub;
    space.degree = k;
    for (int s = 0; s < sub.num_simplices(); ++s) {
        const auto& simplex = sub.simplices[s];
        std::vector<int> ids;
        ids.reserve(basis.size());
        for (int i = 0; i < basis.size(); ++i) {
            NodeKey key = make_key<Dim>(simplex, basis.lattice()[i]);
            auto [it, inserted] = space.index.try_emplace(std::move(key), space.num_nodes());
            if (inserted) {
                space.nodes.push_back(space.origin(s) + space.jacobian(s) * basis.nodes()[i]);
                space.keys.push_back(it->first);
                space.boundary_mask.push_back(false);
            }
            ids.push_back(it->second);
        }
        space.simplex_nodes.push_back(std::move(ids));
    }

    // A node is on the boundary of K iff it lies on some parent facet: the lattice count of
    // the opposite vertex is zero.
    for (int s = 0; s < sub.num_simplices(); ++s) {
        for (int j = 0; j <= Dim; ++j) {
            if (sub.facets[s][j].kind == FacetKind::Internal) {
                continue;
            }
            for (int i = 0; i < basis.size(); ++i) {
                if (basis.lattice()[i][j] == 0) {
                    space.boundary_mask[space.simplex_nodes[s][i]] = true;
                }
            }
        }
    }
    for (int i = 0; i < space.num_nodes(); ++i) {
        (space.boundary_mask[i] ? space.boundary_nodes : space.interior_nodes).push_back(i);
    }
    return space;
}

template <int Dim>
Eigen::MatrixXd local_stiffness(const MacroFeSpace<Dim>& space)
{
    const auto& ref = reference_integrals<Dim>(space.degree);
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(space.num_nodes(), space.num_nodes());
    for (int s = 0; s < space.num_simplices(); ++s) {
        const Eigen::Matrix<double, Dim, Dim> jac = space.jacobian(s);
        const Eigen::Matrix<double, Dim, Dim> inv = jac.inverse();
        const Eigen::Matrix<double, Dim, Dim> metric = inv * inv.transpose();
        const double det = std::abs(jac.determinant());
        Eigen::MatrixXd local = Eigen::MatrixXd::Zero(ref.mass.rows(), ref.mass.cols());
        for (int a = 0; a < Dim; ++a) {
            for (int b = 0; b < Dim; ++b) {
                local += metric(a, b) * ref.grad[a][b];
            }
        }
        scatter<Dim>(S, space.simplex_nodes[s], det * local);
    }
    return S;
}

template <int Dim>
Eigen::MatrixXd local_mass(const MacroFeSpace<Dim>& space)
{
    const auto& ref = reference_integrals<Dim>(space.degree);
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(space.num_nodes(), space.num_nodes());
    for (int s = 0; s < space.num_simplices(); ++s) {
        scatter<Dim>(M, space.simplex_nodes[s], std::abs(space.jacobian(s).determinant()) * ref.mass);
    }
    return M;
}

template <int Dim>
Eigen::MatrixXd moment_matrix(const MacroFeSpace<Dim>& space, const ScaledMonomialBasis<double, Dim>& basis)
{
    const auto& lag = lagrange_basis<double, Dim>(space.degree);
    const auto& quad = simplex_quadrature<double, Dim>(space.degree + std::max(basis.degree, 0));
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(space.num_nodes(), basis.size());
    if (basis.size() == 0) {
        return out;
    }
    for (int s = 0; s < space.num_simplices(); ++s) {
        const auto jac = space.jacobian(s);
        const double det = std::abs(jac.determinant());
        const auto& ids = space.simplex_nodes[s];
        for (int q = 0; q < quad.size(); ++q) {
            const Eigen::Matrix<double, Dim, 1> xi = quad.points.col(q);
            const Eigen::VectorXd phi = lag.values(xi);
            const Eigen::VectorXd m = basis.values(space.origin(s) + jac * xi);
            const double w = quad.weights[q] * det;
            for (int i = 0; i < lag.size(); ++i) {
                out.row(ids[i]) += (w * phi[i]) * m.transpose();
            }
        }
    }
    return out;
}

template <int Dim>
Eigen::VectorXd moment_vector(const MacroFeSpace<Dim>& space, const ScaledMonomialBasis<double, Dim>& basis,
                              int alpha)
{
    return moment_matrix(space, basis).col(alpha);
}

template <int Dim>
Eigen::VectorXd load_vector(const MacroFeSpace<Dim>& space,
                            const std::function<double(const Eigen::Matrix<double, Dim, 1>&)>& f, int exactness)
{
    const auto& lag = lagrange_basis<double, Dim>(space.degree);
    const auto& quad = simplex_quadrature<double, Dim>(std::min(exactness, kMaxQuadratureExactness));
    Eigen::VectorXd out = Eigen::VectorXd::Zero(space.num_nodes());
    for (int s = 0; s < space.num_simplices(); ++s) {
        const auto jac = space.jacobian(s);
        const double det = std::abs(jac.determinant());
        const auto& ids = space.simplex_nodes[s];
        for (int q = 0; q < quad.size(); ++q) {
            const Eigen::Matrix<double, Dim, 1> xi = quad.points.col(q);
            const Eigen::VectorXd phi = lag.values(xi);
            const double w = quad.weights[q] * det * f(space.origin(s) + jac * xi);
            for (int i = 0; i < lag.size(); ++i) {
                out[ids[i]] += w * phi[i];
            }
        }
    }
    return out;
}

template <int Dim>
Eigen::VectorXd interpolate(const MacroFeSpace<Dim>& space,
                            const std::function<double(const Eigen::Matrix<double, Dim, 1>&)>& f)
{
    Eigen::VectorXd out(space.num_nodes());
    for (int i = 0; i < space.num_nodes(); ++i) {
        out[i] = f(space.nodes[i]);
    }
    return out;
}

template <int Dim>
std::pair<int, Eigen::Matrix<double, Dim, 1>> locate(const MacroFeSpace<Dim>& space,
                                                     const Eigen::Matrix<double, Dim, 1>& x)
{
    int best = -1;
    double best_min = -std::numeric_limits<double>::infinity();
    Eigen::Matrix<double, Dim, 1> best_xi = Eigen::Matrix<double, Dim, 1>::Zero();
    for (int s = 0; s < space.num_simplices(); ++s) {
        const Eigen::Matrix<double, Dim, 1> xi = space.jacobian(s).inverse() * (x - space.origin(s));
        const double lowest = std::min(1.0 - xi.sum(), xi.minCoeff());
        if (lowest > best_min) {
            best_min = lowest;
            best = s;
            best_xi = xi;
        }
    }
    return {best, best_xi};
}

template <int Dim>
double evaluate(const MacroFeSpace<Dim>& space, const Eigen::VectorXd& coeffs, const Eigen::Matrix<double, Dim, 1>& x)
{
    const auto [s, xi] = locate(space, x);
    const Eigen::VectorXd phi = lagrange_basis<double, Dim>(space.degree).values(xi);
    double v = 0.0;
    for (int i = 0; i < phi.size(); ++i) {
        v += phi[i] * coeffs[space.simplex_nodes[s][i]];
    }
    return v;
}

template <int Dim>
Eigen::Matrix<double, Dim, 1> evaluate_gradient(const MacroFeSpace<Dim>& space, const Eigen::VectorXd& coeffs,
                                                const Eigen::Matrix<double, Dim, 1>& x)
{
    const auto [s, xi] = locate(space, x);
    const Eigen::MatrixXd dphi = lagrange_basis<double, Dim>(space.degree).gradients(xi);
    Eigen::Matrix<double, Dim, 1> ref = Eigen::Matrix<double, Dim, 1>::Zero();
    for (int i = 0; i < dphi.rows(); ++i) {
        ref += coeffs[space.simplex_nodes[s][i]] * dphi.row(i).transpose();
    }
    return space.jacobian(s).inverse().transpose() * ref;
}

template <int Dim>
Eigen::Matrix<double, Dim, 1> subdivision_centroid(const MacroSubdivision<Dim>& sub)
{
    Eigen::Matrix<double, Dim, 1> c = Eigen::Matrix<double, Dim, 1>::Zero();
    double total = 0.0;
    for (int s = 0; s < sub.num_simplices(); ++s) {
        Eigen::Matrix<double, Dim, 1> mid = Eigen::Matrix<double, Dim, 1>::Zero();
        for (int v : sub.simplices[s]) {
            mid += sub.points[v];
        }
        const double m = sub.simplex_measure(s);
        c += m * mid / double(Dim + 1);
        total += m;
    }
    return c / total;
}

template <int Dim>
ScaledMonomialBasis<double, Dim> cell_basis(const MacroSubdivision<Dim>& sub, int k)
{
    return ScaledMonomialBasis<double, Dim>(subdivision_centroid(sub), sub.diameter, k - 2);
}

template <int Dim>
DimensionCheck check_dimension(const MacroFeSpace<Dim>& space, const ScaledMonomialBasis<double, Dim>& basis)
{
    DimensionCheck out;
    out.interior_nodes = static_cast<int>(space.interior_nodes.size());
    out.required = basis.size();
    if (out.required == 0) {
        return out;
    }
    const Eigen::MatrixXd moments = moment_matrix(space, basis);
    Eigen::MatrixXd interior(out.interior_nodes, out.required);
    for (int i = 0; i < out.interior_nodes; ++i) {
        interior.row(i) = moments.row(space.interior_nodes[i]);
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(interior);
    qr.setThreshold(1e-10);
    out.rank = static_cast<int>(qr.rank());
    return out;
}

#define SFVEM_INSTANTIATE(D)                                                                                  \
    template MacroFeSpace<D> build_macro_space<D>(const MacroSubdivision<D>&, int);                        \
    template Eigen::MatrixXd local_stiffness<D>(const MacroFeSpace<D>&);                                   \
    template Eigen::MatrixXd local_mass<D>(const MacroFeSpace<D>&);                                        \
    template Eigen::MatrixXd moment_matrix<D>(const MacroFeSpace<D>&, const ScaledMonomialBasis<double, D>&); \
    template Eigen::VectorXd moment_vector<D>(const MacroFeSpace<D>&, const ScaledMonomialBasis<double, D>&,  \
                                              int);                                                         \
    template Eigen::VectorXd load_vector<D>(const MacroFeSpace<D>&,                                          \
                                            const std::function<double(const Eigen::Matrix<double, D, 1>&)>&, \
                                            int);                                                           \
    template Eigen::VectorXd interpolate<D>(const MacroFeSpace<D>&,                                          \
                                            const std::function<double(const Eigen::Matrix<double, D, 1>&)>&); \
    template std::pair<int, Eigen::Matrix<double, D, 1>> locate<D>(const MacroFeSpace<D>&,                  \
                                                                   const Eigen::Matrix<double, D, 1>&);     \
    template double evaluate<D>(const MacroFeSpace<D>&, const Eigen::VectorXd&, const Eigen::Matrix<double, D, 1>&); \
    template Eigen::Matrix<double, D, 1> evaluate_gradient<D>(const MacroFeSpace<D>&, const Eigen::VectorXd&, \
                                                              const Eigen::Matrix<double, D, 1>&);          \
    template Eigen::Matrix<double, D, 1> subdivision_centroid<D>(const MacroSubdivision<D>&);              \
    template ScaledMonomialBasis<double, D> cell_basis<D>(const MacroSubdivision<D>&, int);                \
    template DimensionCheck check_dimension<D>(const MacroFeSpace<D>&, const ScaledMonomialBasis<double, D>&);

SFVEM_INSTANTIATE(2)
SFVEM_INSTANTIATE(3)

#undef SFVEM_INSTANTIATE

} // namespace sfvem
