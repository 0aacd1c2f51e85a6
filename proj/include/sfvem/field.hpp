#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace sfvem {

/// Closed-form scalar field with derivatives. 2D fields take points with z = 0 and ignore z.
struct ScalarField
{
    int dim = 2;
    std::function<double(const Eigen::Vector3d&)> value;
    std::function<Eigen::Vector3d(const Eigen::Vector3d&)> gradient;
    std::function<Eigen::Matrix3d(const Eigen::Vector3d&)> hessian;

    double laplacian(const Eigen::Vector3d& x) const { return hessian(x).trace(); }
};

inline Eigen::Vector3d lift(const Eigen::Vector2d& x)
{
    return {x.x(), x.y(), 0.0};
}

inline Eigen::Vector3d lift(const Eigen::Vector3d& x)
{
    return x;
}

/// Polynomial sum_t c_t prod_d x_d^{e_{t,d}}.
struct Polynomial
{
    int dim = 2;
    std::vector<std::array<int, 3>> exponents;
    std::vector<double> coefficients;

    double operator()(const Eigen::Vector3d& x, const std::array<int, 3>& derivative = {0, 0, 0}) const
    {
        double total = 0.0;
        for (std::size_t t = 0; t < exponents.size(); ++t) {
            double term = coefficients[t];
            for (int d = 0; d < 3 && term != 0.0; ++d) {
                const int e = exponents[t][d];
                const int r = derivative[d];
                if (r > e) {
                    term = 0.0;
                    break;
                }
                for (int i = 0; i < r; ++i) {
                    term *= e - i;
                }
                term *= std::pow(x[d], e - r);
            }
            total += term;
        }
        return total;
    }

    ScalarField field() const
    {
        const Polynomial p = *this;
        ScalarField f;
        f.dim = dim;
        f.value = [p](const Eigen::Vector3d& x) { return p(x); };
        f.gradient = [p](const Eigen::Vector3d& x) {
            return Eigen::Vector3d(p(x, {1, 0, 0}), p(x, {0, 1, 0}), p(x, {0, 0, 1}));
        };
        f.hessian = [p](const Eigen::Vector3d& x) {
            Eigen::Matrix3d h;
            for (int a = 0; a < 3; ++a) {
                for (int b = 0; b < 3; ++b) {
                    std::array<int, 3> r{0, 0, 0};
                    ++r[a];
                    ++r[b];
                    h(a, b) = p(x, r);
                }
            }
            return h;
        };
        return f;
    }
};

/// Random polynomial of total degree <= k with coefficients uniform in [-1, 1].
template <typename Rng>
Polynomial random_polynomial(int dim, int k, Rng& rng)
{
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    Polynomial p;
    p.dim = dim;
    for (int a = 0; a <= k; ++a) {
        for (int b = 0; a + b <= k; ++b) {
            for (int c = 0; a + b + c <= k && (dim == 3 || c == 0); ++c) {
                p.exponents.push_back({a, b, c});
                p.coefficients.push_back(coef(rng));
            }
        }
    }
    return p;
}

} // namespace sfvem
