#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace sfvem {

inline constexpr int kMaxQuadratureExactness = 14;

/// Quadrature on the reference simplex {x >= 0, sum x <= 1}. Points are reference
/// coordinates stored column-wise.
template <typename Scalar, int Dim>
struct SimplexQuadrature
{
    Eigen::Matrix<Scalar, Dim, Eigen::Dynamic> points;
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> weights;
    int exactness = 0;

    int size() const { return static_cast<int>(weights.size()); }
};

/// n-point Gauss-Legendre rule on [0,1] by Golub-Welsch.
template <typename Scalar>
std::pair<std::vector<Scalar>, std::vector<Scalar>> gauss_legendre_01(int n)
{
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    Matrix jacobi = Matrix::Zero(n, n);
    for (int i = 1; i < n; ++i) {
        const Scalar b = Scalar(i) / std::sqrt(Scalar(4 * i * i - 1));
        jacobi(i, i - 1) = b;
        jacobi(i - 1, i) = b;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(jacobi);
    std::vector<Scalar> x(n);
    std::vector<Scalar> w(n);
    for (int i = 0; i < n; ++i) {
        x[i] = Scalar(0.5) * (eig.eigenvalues()[i] + Scalar(1));
        const Scalar v0 = eig.eigenvectors()(0, i);
        w[i] = v0 * v0; // 2 v0^2 on [-1,1], halved for [0,1]
    }
    return {x, w};
}

namespace detail {

template <typename Scalar, int Dim>
SimplexQuadrature<Scalar, Dim> collapsed_rule(int exactness)
{
    // Duffy collapse; direction j carries a Jacobian factor (1-u)^(Dim-1-j).
    std::array<std::pair<std::vector<Scalar>, std::vector<Scalar>>, Dim> rules;
    for (int j = 0; j < Dim; ++j) {
        const int deg = exactness + (Dim - 1 - j);
        rules[j] = gauss_legendre_01<Scalar>(deg / 2 + 1);
    }
    int total = 1;
    for (const auto& r : rules) {
        total *= static_cast<int>(r.first.size());
    }
    SimplexQuadrature<Scalar, Dim> q;
    q.exactness = exactness;
    q.points.resize(Dim, total);
    q.weights.resize(total);
    std::array<int, Dim> idx{};
    for (int p = 0; p < total; ++p) {
        int rem = p;
        for (int j = Dim - 1; j >= 0; --j) {
            const int nj = static_cast<int>(rules[j].first.size());
            idx[j] = rem % nj;
            rem /= nj;
        }
        Scalar remaining(1);
        Scalar w(1);
        for (int j = 0; j < Dim; ++j) {
            const Scalar u = rules[j].first[idx[j]];
            w *= rules[j].second[idx[j]];
            for (int e = 0; e < Dim - 1 - j; ++e) {
                w *= (Scalar(1) - u);
            }
            q.points(j, p) = remaining * u;
            remaining *= (Scalar(1) - u);
        }
        q.weights[p] = w;
    }
    return q;
}

} // namespace detail

/// Rule exact for polynomials of total degree <= exactness (0..14).
template <typename Scalar, int Dim>
const SimplexQuadrature<Scalar, Dim>& simplex_quadrature(int exactness)
{
    static const std::vector<SimplexQuadrature<Scalar, Dim>> table = [] {
        std::vector<SimplexQuadrature<Scalar, Dim>> t;
        for (int e = 0; e <= kMaxQuadratureExactness; ++e) {
            t.push_back(detail::collapsed_rule<Scalar, Dim>(e));
        }
        return t;
    }();
    if (exactness < 0 || exactness > kMaxQuadratureExactness) {
        throw std::invalid_argument("simplex_quadrature: exactness must be in 0..14");
    }
    return table[exactness];
}

} // namespace sfvem
