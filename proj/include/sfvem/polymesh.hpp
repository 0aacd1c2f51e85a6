#pragma once

#include "sfvem/validation.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <utility>
#include <vector>

namespace sfvem {

class GeometryError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class TopologyError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class MeshParseError : public std::runtime_error
{
public:
    MeshParseError(int line, std::string field, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ", " + field + ": " + what)
        , line_(line)
        , field_(std::move(field))
    {}
    int line() const { return line_; }
    const std::string& field() const { return field_; }

private:
    int line_;
    std::string field_;
};

/// (min, max) by value.
inline std::pair<int, int> ordered_pair(int a, int b)
{
    return a < b ? std::pair{a, b} : std::pair{b, a};
}

/// What to do with cells given in the wrong orientation.
enum class Orientation { Fix, Strict };

struct MeshEdge
{
    std::array<int, 2> vertices{-1, -1}; // ascending
    std::array<int, 2> cells{-1, -1};    // second is -1 on the boundary
};

/// Polygonal mesh. Cells are counter-clockwise vertex loops; cell_edges[c][i] is the edge
/// between cells[c][i] and cells[c][i+1].
struct PolyMesh2D
{
    std::vector<Eigen::Vector2d> vertices;
    std::vector<std::vector<int>> cells;

    std::vector<MeshEdge> edges;
    std::vector<std::vector<int>> cell_edges;
    std::vector<bool> boundary_edge;
    std::vector<bool> boundary_vertex;

    int num_vertices() const { return static_cast<int>(vertices.size()); }
    int num_edges() const { return static_cast<int>(edges.size()); }
    int num_cells() const { return static_cast<int>(cells.size()); }
};

struct SignedFace
{
    int face = -1;
    int sign = 1; // +1: the face loop's right-hand normal points out of the cell

    friend bool operator==(const SignedFace&, const SignedFace&) = default;
};

/// Polyhedral mesh with planar polygonal faces shared between cells.
struct PolyMesh3D
{
    std::vector<Eigen::Vector3d> vertices;
    std::vector<std::vector<int>> faces;
    std::vector<std::vector<SignedFace>> cells;

    std::vector<std::array<int, 2>> edges;       // ascending vertex pairs
    std::vector<std::vector<int>> face_edges;    // per face loop position
    std::vector<std::array<int, 2>> face_cells;  // second is -1 on the boundary
    std::vector<std::vector<int>> cell_vertices; // sorted
    std::vector<std::vector<int>> cell_edges;    // sorted
    std::vector<bool> boundary_face;
    std::vector<bool> boundary_edge;
    std::vector<bool> boundary_vertex;

    int num_vertices() const { return static_cast<int>(vertices.size()); }
    int num_edges() const { return static_cast<int>(edges.size()); }
    int num_faces() const { return static_cast<int>(faces.size()); }
    int num_cells() const { return static_cast<int>(cells.size()); }
};

using AnyMesh = std::variant<PolyMesh2D, PolyMesh3D>;

/// Build a 2D mesh and its derived topology. Clockwise loops are reversed unless `mode`
/// is Strict, in which case they are an error. Throws TopologyError for bad indices or an
/// edge used by more than two cells.
PolyMesh2D make_mesh(std::vector<Eigen::Vector2d> vertices,
                     std::vector<std::vector<int>> cells,
                     Orientation mode = Orientation::Fix);

/// Build a 3D mesh. Cells whose signed faces enclose negative volume are flipped (Fix) or
/// rejected (Strict).
PolyMesh3D make_mesh(std::vector<Eigen::Vector3d> vertices,
                     std::vector<std::vector<int>> faces,
                     std::vector<std::vector<SignedFace>> cells,
                     Orientation mode = Orientation::Fix);

bool operator==(const PolyMesh2D& a, const PolyMesh2D& b);
bool operator==(const PolyMesh3D& a, const PolyMesh3D& b);

// geometry -------------------------------------------------------------------------------

double signed_area(std::span<const Eigen::Vector2d> loop);
Eigen::Vector2d polygon_centroid(std::span<const Eigen::Vector2d> loop);

template <typename Point>
double diameter(std::span<const Point> points)
{
    double h = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            h = std::max(h, (points[i] - points[j]).norm());
        }
    }
    return h;
}

std::vector<Eigen::Vector2d> cell_points(const PolyMesh2D& mesh, int cell);
double cell_area(const PolyMesh2D& mesh, int cell);
double cell_diameter(const PolyMesh2D& mesh, int cell);

/// Orthonormal in-plane frame of a face, oriented by its stored loop.
struct FaceFrame
{
    Eigen::Vector3d origin; // area centroid
    Eigen::Vector3d normal;
    Eigen::Vector3d t1;
    Eigen::Vector3d t2;
    double area = 0.0;
    double diameter = 0.0;

    Eigen::Vector2d to_plane(const Eigen::Vector3d& x) const
    {
        const Eigen::Vector3d d = x - origin;
        return {d.dot(t1), d.dot(t2)};
    }
    Eigen::Vector3d to_space(const Eigen::Vector2d& y) const { return origin + y[0] * t1 + y[1] * t2; }
};

FaceFrame face_frame(const PolyMesh3D& mesh, int face);
double cell_volume(const PolyMesh3D& mesh, int cell);
Eigen::Vector3d cell_centroid(const PolyMesh3D& mesh, int cell);
double cell_diameter(const PolyMesh3D& mesh, int cell);

/// h = max cell diameter.
double mesh_size(const PolyMesh2D& mesh);
double mesh_size(const PolyMesh3D& mesh);

// generators ------------------------------------------------------------------------------

enum class MeshFamily { Pentagon, Hexagon, Cube };

MeshFamily parse_family(const std::string& name);
std::string to_string(MeshFamily family);
int family_dimension(MeshFamily family);

/// (0,1)^2 tiled by N x N copies of the four-pentagon unit cell, N = 2^(level-1).
PolyMesh2D generate_pentagon_mesh(int level);
/// (0,1)^2 tiled by N x N copies of the six-hexagon unit cell.
PolyMesh2D generate_hexagon_mesh(int level);
/// (0,1)^3 split into N^3 axis-aligned cubes.
PolyMesh3D generate_cube_mesh(int level);
AnyMesh generate_mesh(MeshFamily family, int level);

// validation and I/O ---------------------------------------------------------------------

ValidationReport validate_mesh(const PolyMesh2D& mesh);
ValidationReport validate_mesh(const PolyMesh3D& mesh);

void write_mesh(const AnyMesh& mesh, std::ostream& os);
void write_mesh(const AnyMesh& mesh, const std::string& path);
AnyMesh read_mesh(std::istream& is, Orientation mode = Orientation::Fix);
AnyMesh read_mesh(const std::string& path, Orientation mode = Orientation::Fix);

} // namespace sfvem
