#pragma once

#include "sfvem/harness.hpp"

#include <cmath>
#include <random>

namespace sfvem::testing {

// Fixed-seed generators; every property test starts from its own seed.
inline std::mt19937_64 make_rng(std::uint64_t seed)
{
    return std::mt19937_64(seed);
}

inline double uniform(std::mt19937_64& rng, double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Uniform barycentric weights (sorted-spacings method).
template <int Dim>
Eigen::Matrix<double, Dim + 1, 1> random_barycentric(std::mt19937_64& rng)
{
    std::array<double, Dim + 2> cuts{};
    cuts[0] = 0.0;
    cuts[Dim + 1] = 1.0;
    for (int i = 1; i <= Dim; ++i) {
        cuts[i] = uniform(rng, 0.0, 1.0);
    }
    std::sort(cuts.begin(), cuts.end());
    Eigen::Matrix<double, Dim + 1, 1> w;
    for (int i = 0; i <= Dim; ++i) {
        w[i] = cuts[i + 1] - cuts[i];
    }
    return w;
}

template <int Dim>
Eigen::Matrix<double, Dim, 1> random_point_in_simplex(std::mt19937_64& rng,
                                                      const std::array<Eigen::Matrix<double, Dim, 1>, Dim + 1>& v)
{
    const auto w = random_barycentric<Dim>(rng);
    Eigen::Matrix<double, Dim, 1> x = Eigen::Matrix<double, Dim, 1>::Zero();
    for (int i = 0; i <= Dim; ++i) {
        x += w[i] * v[i];
    }
    return x;
}

// Random point of a macro subdivision, uniform within a randomly chosen simplex.
template <int Dim>
Eigen::Matrix<double, Dim, 1> random_point(std::mt19937_64& rng, const MacroSubdivision<Dim>& sub)
{
    const int s = std::uniform_int_distribution<int>(0, sub.num_simplices() - 1)(rng);
    std::array<Eigen::Matrix<double, Dim, 1>, Dim + 1> v;
    for (int i = 0; i <= Dim; ++i) {
        v[i] = sub.points[sub.simplices[s][i]];
    }
    return random_point_in_simplex<Dim>(rng, v);
}

// Integral of x^a y^b z^c over the reference simplex: a! b! c! / (a + b + c + d)!.
inline double reference_monomial_integral(int dim, int a, int b, int c)
{
    return std::exp(std::lgamma(a + 1.0) + std::lgamma(b + 1.0) + std::lgamma(c + 1.0)
                    - std::lgamma(a + b + c + dim + 1.0));
}

inline PolyMesh2D single_polygon(std::vector<Eigen::Vector2d> loop)
{
    std::vector<int> ids(loop.size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
        ids[i] = static_cast<int>(i);
    }
    return make_mesh(std::move(loop), {ids});
}

inline PolyMesh2D reference_triangle_mesh()
{
    return single_polygon({{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}});
}

inline PolyMesh2D unit_square_mesh()
{
    return single_polygon({{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}});
}

inline std::vector<Eigen::Vector2d> pentagon_p1()
{
    return {{0.0, 0.0}, {0.5, 0.0}, {0.5, 0.5}, {0.25, 0.25}, {0.0, 0.5}};
}

inline PolyMesh3D unit_tetrahedron_mesh()
{
    std::vector<Eigen::Vector3d> v{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    std::vector<std::vector<int>> faces{{0, 2, 1}, {0, 1, 3}, {0, 3, 2}, {1, 2, 3}};
    return make_mesh(std::move(v), std::move(faces), {{{0, 1}, {1, 1}, {2, 1}, {3, 1}}});
}

inline PolyMesh3D unit_cube_mesh()
{
    return generate_cube_mesh(1);
}

// Random element of P_k together with f = -Delta p.
inline ManufacturedProblem random_polynomial_problem(int dim, int k, std::mt19937_64& rng)
{
    return polynomial_problem(random_polynomial(dim, k, rng));
}

inline double max_abs(const Eigen::VectorXd& v)
{
    return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

} // namespace sfvem::testing
