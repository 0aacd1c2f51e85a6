#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace sfvem {

inline constexpr int kMaxDegree = 5;

template <int Dim>
using MultiIndex = std::array<int, Dim>;

/// Number of monomials of total degree <= degree in dim variables, C(degree+dim, dim).
/// Zero for negative degree (P_{-1} = {0}).
constexpr int poly_dim(int degree, int dim)
{
    if (degree < 0) {
        return 0;
    }
    long num = 1;
    long den = 1;
    for (int i = 1; i <= dim; ++i) {
        num *= degree + i;
        den *= i;
    }
    return static_cast<int>(num / den);
}

/// Multi-indices of total degree <= degree, graded, lexicographically descending within a
/// degree: (0,0), (1,0), (0,1), (2,0), (1,1), (0,2), ...
template <int Dim>
std::vector<MultiIndex<Dim>> graded_multi_indices(int degree)
{
    std::vector<MultiIndex<Dim>> out;
    for (int total = 0; total <= degree; ++total) {
        MultiIndex<Dim> alpha{};
        // recursive fill of exponents summing to `total`, first exponent descending
        auto fill = [&](auto&& self, int slot, int remaining) -> void {
            if (slot == Dim - 1) {
                alpha[slot] = remaining;
                out.push_back(alpha);
                return;
            }
            for (int e = remaining; e >= 0; --e) {
                alpha[slot] = e;
                self(self, slot + 1, remaining - e);
            }
        };
        fill(fill, 0, total);
    }
    return out;
}

namespace detail {

template <typename Scalar, int Dim>
Eigen::Array<Scalar, Dim, Eigen::Dynamic> coordinate_powers(
    const Eigen::Matrix<Scalar, Dim, 1>& y,
    int degree)
{
    Eigen::Array<Scalar, Dim, Eigen::Dynamic> pw(Dim, degree + 1);
    pw.col(0).setOnes();
    for (int e = 1; e <= degree; ++e) {
        pw.col(e) = pw.col(e - 1) * y.array();
    }
    return pw;
}

} // namespace detail

/// Monomials ((x - center) / scale)^alpha, |alpha| <= degree, in graded order.
template <typename Scalar, int Dim>
struct ScaledMonomialBasis
{
    using Point = Eigen::Matrix<Scalar, Dim, 1>;
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    using Gradients = Eigen::Matrix<Scalar, Eigen::Dynamic, Dim>;

    Point center = Point::Zero();
    Scalar scale = Scalar(1);
    int degree = 0;

    ScaledMonomialBasis() = default;
    ScaledMonomialBasis(const Point& c, Scalar h, int m)
        : center(c), scale(h), degree(m), indices_(graded_multi_indices<Dim>(m))
    {}

    int size() const { return degree < 0 ? 0 : static_cast<int>(indices_.size()); }
    const std::vector<MultiIndex<Dim>>& indices() const { return indices_; }

    Vector values(const Point& x) const
    {
        Vector out(size());
        if (size() == 0) {
            return out;
        }
        const auto pw = detail::coordinate_powers<Scalar, Dim>((x - center) / scale, degree);
        for (int i = 0; i < size(); ++i) {
            Scalar v(1);
            for (int d = 0; d < Dim; ++d) {
                v *= pw(d, indices_[i][d]);
            }
            out[i] = v;
        }
        return out;
    }

    Gradients gradients(const Point& x) const
    {
        Gradients out(size(), Dim);
        if (size() == 0) {
            return out;
        }
        const auto pw = detail::coordinate_powers<Scalar, Dim>((x - center) / scale, degree);
        for (int i = 0; i < size(); ++i) {
            for (int d = 0; d < Dim; ++d) {
                const int e = indices_[i][d];
                if (e == 0) {
                    out(i, d) = Scalar(0);
                    continue;
                }
                Scalar v = Scalar(e) * pw(d, e - 1) / scale;
                for (int o = 0; o < Dim; ++o) {
                    if (o != d) {
                        v *= pw(o, indices_[i][o]);
                    }
                }
                out(i, d) = v;
            }
        }
        return out;
    }

private:
    std::vector<MultiIndex<Dim>> indices_;
};

/// k+1 Gauss-Lobatto abscissae on [0,1], endpoints included, ascending.
template <typename Scalar>
std::vector<Scalar> gauss_lobatto_nodes(int k)
{
    using std::sqrt;
    const Scalar half(0.5);
    std::vector<Scalar> t; // symmetric interior points on [-1,1], ascending
    switch (k) {
    case 1: break;
    case 2: t = {Scalar(0)}; break;
    case 3: {
        const Scalar a = sqrt(Scalar(1) / Scalar(5));
        t = {-a, a};
        break;
    }
    case 4: {
        const Scalar a = sqrt(Scalar(3) / Scalar(7));
        t = {-a, Scalar(0), a};
        break;
    }
    case 5: {
        const Scalar r = Scalar(2) * sqrt(Scalar(7)) / Scalar(21);
        const Scalar a = sqrt(Scalar(1) / Scalar(3) - r);
        const Scalar b = sqrt(Scalar(1) / Scalar(3) + r);
        t = {-b, -a, a, b};
        break;
    }
    default: throw std::invalid_argument("gauss_lobatto_nodes: degree must be in 1..5");
    }
    std::vector<Scalar> out;
    out.reserve(k + 1);
    out.push_back(Scalar(0));
    for (const auto& s : t) {
        out.push_back(half * (s + Scalar(1)));
    }
    out.push_back(Scalar(1));
    return out;
}

/// Nodal P_k basis on the reference simplex {x >= 0, sum x <= 1}.
///
/// Nodes are the principal lattice of order k, except that nodes on an edge of the simplex
/// sit at Gauss-Lobatto positions along that edge, so every edge trace is interpolated at
/// the same points as a Gauss-Lobatto edge DOF set. Nodes are ordered by the number of
/// simplex vertices supporting them (vertices, edge nodes, face nodes, interior).
template <typename Scalar, int Dim>
class LagrangeBasis
{
public:
    using Point = Eigen::Matrix<Scalar, Dim, 1>;
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Gradients = Eigen::Matrix<Scalar, Eigen::Dynamic, Dim>;
    using Barycentric = std::array<int, Dim + 1>;

    // Monomials centred at the simplex centroid keep the Vandermonde well conditioned.
    explicit LagrangeBasis(int degree)
        : degree_(degree)
        , monomials_(Point::Constant(Scalar(1) / (Dim + 1)), Scalar(1), degree)
    {
        if (degree < 1 || degree > kMaxDegree) {
            throw std::invalid_argument("lagrange basis: degree must be in 1..5");
        }
        build_lattice();
        const auto gl = gauss_lobatto_nodes<Scalar>(degree);
        nodes_.reserve(lattice_.size());
        for (const auto& c : lattice_) {
            nodes_.push_back(node_position(c, gl));
        }
        const int n = size();
        Matrix vandermonde(n, n);
        for (int i = 0; i < n; ++i) {
            vandermonde.row(i) = monomials_.values(nodes_[i]).transpose();
        }
        coefficients_ = vandermonde.fullPivLu().inverse();
    }

    int degree() const { return degree_; }
    int size() const { return static_cast<int>(lattice_.size()); }
    const std::vector<Barycentric>& lattice() const { return lattice_; }
    const std::vector<Point>& nodes() const { return nodes_; }

    Vector values(const Point& x) const
    {
        return coefficients_.transpose() * monomials_.values(x);
    }

    Gradients gradients(const Point& x) const
    {
        return coefficients_.transpose() * monomials_.gradients(x);
    }

    static Point vertex(int j)
    {
        Point v = Point::Zero();
        if (j > 0) {
            v[j - 1] = Scalar(1);
        }
        return v;
    }

private:
    void build_lattice()
    {
        Barycentric c{};
        auto fill = [&](auto&& self, int slot, int remaining) -> void {
            if (slot == Dim) {
                c[slot] = remaining;
                lattice_.push_back(c);
                return;
            }
            for (int e = remaining; e >= 0; --e) {
                c[slot] = e;
                self(self, slot + 1, remaining - e);
            }
        };
        fill(fill, 0, degree_);
        auto support = [](const Barycentric& b) {
            int s = 0;
            for (int v : b) {
                s += v > 0 ? 1 : 0;
            }
            return s;
        };
        std::stable_sort(lattice_.begin(), lattice_.end(), [&](const auto& a, const auto& b) {
            return support(a) < support(b);
        });
    }

    Point node_position(const Barycentric& c, const std::vector<Scalar>& gl) const
    {
        int p = -1;
        int q = -1;
        int support = 0;
        for (int j = 0; j <= Dim; ++j) {
            if (c[j] > 0) {
                (p < 0 ? p : q) = j;
                ++support;
            }
        }
        if (support == 2) {
            return vertex(p) + gl[c[q]] * (vertex(q) - vertex(p));
        }
        Point x = Point::Zero();
        for (int j = 0; j <= Dim; ++j) {
            x += (Scalar(c[j]) / Scalar(degree_)) * vertex(j);
        }
        return x;
    }

    int degree_;
    ScaledMonomialBasis<Scalar, Dim> monomials_;
    std::vector<Barycentric> lattice_;
    std::vector<Point> nodes_;
    Matrix coefficients_; // column i holds the monomial coefficients of basis function i
};

/// Shared, lazily built basis tables for k = 1..5.
template <typename Scalar, int Dim>
const LagrangeBasis<Scalar, Dim>& lagrange_basis(int degree)
{
    static const std::vector<LagrangeBasis<Scalar, Dim>> table = [] {
        std::vector<LagrangeBasis<Scalar, Dim>> t;
        for (int k = 1; k <= kMaxDegree; ++k) {
            t.emplace_back(k);
        }
        return t;
    }();
    if (degree < 1 || degree > kMaxDegree) {
        throw std::invalid_argument("lagrange basis: degree must be in 1..5");
    }
    return table[degree - 1];
}

} // namespace sfvem
