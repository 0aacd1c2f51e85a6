#include "sfvem/polymesh.hpp"

#include <map>

namespace sfvem {

namespace {

struct UnitCell
{
    std::vector<Eigen::Vector2d> points;
    std::vector<std::vector<int>> cells;
};

// Four pentagons; the interior nodes (.25,.25) and (.75,.75) make P1 and P4 non-convex.
const UnitCell& pentagon_cell()
{
    static const UnitCell cell = [] {
        UnitCell u;
        u.points = {{0, 0}, {.5, 0}, {1, 0}, {0, .5}, {.25, .25}, {.5, .5},
                    {.75, .75}, {1, .5}, {0, 1}, {.5, 1}, {1, 1}};
        u.cells = {
            {0, 1, 5, 4, 3},  // P1
            {1, 2, 7, 6, 5},  // P2
            {3, 4, 5, 9, 8},  // P3
            {5, 6, 7, 10, 9}, // P4
        };
        return u;
    }();
    return cell;
}

// Six hexagons; interior node coordinates to four decimals.
const UnitCell& hexagon_cell()
{
    static const UnitCell cell = [] {
        UnitCell u;
        u.points = {
            {0, 0}, {.5, 0}, {1, 0}, {0, .5}, {1, .5}, {0, 1}, {.5, 1}, {1, 1}, // 0..7
            {.4444, .1429},                                                 // 8  a
            {.2222, .2222},                                                 // 9  b
            {.1818, .4444},                                                 // 10 c
            {.7273, .2857},                                                 // 11 d
            {.8182, .5},                                                    // 12 e
            {.5556, .5},                                                    // 13 f
            {.4444, .8571},                                                 // 14 g
            {.7273, .6667},                                                 // 15 h
            {.2222, .6667},                                                 // 16 i
        };
        u.cells = {
            {0, 1, 8, 9, 10, 3},    // H1
            {1, 2, 4, 12, 11, 8},   // H2
            {9, 8, 13, 14, 16, 10}, // H3
            {13, 8, 11, 12, 15, 14},// H4
            {12, 4, 7, 6, 14, 15},  // H5
            {3, 10, 16, 14, 6, 5},  // H6
        };
        return u;
    }();
    return cell;
}

PolyMesh2D tile(const UnitCell& unit, int level)
{
    if (level < 1) {
        throw std::invalid_argument("mesh level must be >= 1");
    }
    const int n = 1 << (level - 1);
    const double nd = static_cast<double>(n);
    // Boundary nodes of the unit cell sit at dyadic coordinates, so translated copies of a
    // shared node are bitwise equal and an exact-key map merges them.
    std::map<std::pair<double, double>, int> ids;
    std::vector<Eigen::Vector2d> vertices;
    std::vector<std::vector<int>> cells;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            std::vector<int> local(unit.points.size());
            for (std::size_t p = 0; p < unit.points.size(); ++p) {
                const double x = (i + unit.points[p].x()) / nd;
                const double y = (j + unit.points[p].y()) / nd;
                auto [it, inserted] = ids.try_emplace({x, y}, static_cast<int>(vertices.size()));
                if (inserted) {
                    vertices.emplace_back(x, y);
                }
                local[p] = it->second;
            }
            for (const auto& c : unit.cells) {
                std::vector<int> loop;
                for (int p : c) {
                    loop.push_back(local[p]);
                }
                cells.push_back(std::move(loop));
            }
        }
    }
    return make_mesh(std::move(vertices), std::move(cells), Orientation::Fix);
}

} // namespace

MeshFamily parse_family(const std::string& name)
{
    if (name == "pentagon") {
        return MeshFamily::Pentagon;
    }
    if (name == "hexagon") {
        return MeshFamily::Hexagon;
    }
    if (name == "cube") {
        return MeshFamily::Cube;
    }
    throw std::invalid_argument("unknown mesh family '" + name + "'");
}

std::string to_string(MeshFamily family)
{
    switch (family) {
    case MeshFamily::Pentagon: return "pentagon";
    case MeshFamily::Hexagon: return "hexagon";
    case MeshFamily::Cube: return "cube";
    }
    return "?";
}

int family_dimension(MeshFamily family)
{
    return family == MeshFamily::Cube ? 3 : 2;
}

PolyMesh2D generate_pentagon_mesh(int level)
{
    return tile(pentagon_cell(), level);
}

PolyMesh2D generate_hexagon_mesh(int level)
{
    return tile(hexagon_cell(), level);
}

PolyMesh3D generate_cube_mesh(int level)
{
    if (level < 1) {
        throw std::invalid_argument("mesh level must be >= 1");
    }
    const int n = 1 << (level - 1);
    const int m = n + 1;
    auto vid = [m](int i, int j, int k) { return i + m * (j + m * k); };

    std::vector<Eigen::Vector3d> vertices;
    vertices.reserve(static_cast<std::size_t>(m) * m * m);
    for (int k = 0; k < m; ++k) {
        for (int j = 0; j < m; ++j) {
            for (int i = 0; i < m; ++i) {
                vertices.emplace_back(double(i) / n, double(j) / n, double(k) / n);
            }
        }
    }

    // Faces normal to axis a at grid plane p, loops oriented with +a normals.
    std::vector<std::vector<int>> faces;
    std::vector<int> xface(static_cast<std::size_t>(m) * n * n);
    std::vector<int> yface(xface.size());
    std::vector<int> zface(xface.size());
    for (int k = 0; k < n; ++k) {
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < m; ++i) {
                xface[i + m * (j + n * k)] = static_cast<int>(faces.size());
                faces.push_back({vid(i, j, k), vid(i, j + 1, k), vid(i, j + 1, k + 1), vid(i, j, k + 1)});
            }
        }
    }
    for (int k = 0; k < n; ++k) {
        for (int j = 0; j < m; ++j) {
            for (int i = 0; i < n; ++i) {
                yface[i + n * (j + m * k)] = static_cast<int>(faces.size());
                faces.push_back({vid(i, j, k), vid(i, j, k + 1), vid(i + 1, j, k + 1), vid(i + 1, j, k)});
            }
        }
    }
    for (int k = 0; k < m; ++k) {
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < n; ++i) {
                zface[i + n * (j + n * k)] = static_cast<int>(faces.size());
                faces.push_back({vid(i, j, k), vid(i + 1, j, k), vid(i + 1, j + 1, k), vid(i, j + 1, k)});
            }
        }
    }

    std::vector<std::vector<SignedFace>> cells;
    for (int k = 0; k < n; ++k) {
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < n; ++i) {
                cells.push_back({
                    {xface[i + m * (j + n * k)], -1},
                    {xface[i + 1 + m * (j + n * k)], 1},
                    {yface[i + n * (j + m * k)], -1},
                    {yface[i + n * (j + 1 + m * k)], 1},
                    {zface[i + n * (j + n * k)], -1},
                    {zface[i + n * (j + n * (k + 1))], 1},
                });
            }
        }
    }
    return make_mesh(std::move(vertices), std::move(faces), std::move(cells), Orientation::Fix);
}

AnyMesh generate_mesh(MeshFamily family, int level)
{
    switch (family) {
    case MeshFamily::Pentagon: return generate_pentagon_mesh(level);
    case MeshFamily::Hexagon: return generate_hexagon_mesh(level);
    case MeshFamily::Cube: return generate_cube_mesh(level);
    }
    throw std::invalid_argument("unknown mesh family");
}

} // namespace sfvem
