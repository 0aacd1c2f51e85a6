#include "sfvem/polymesh.hpp"

#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace sfvem {

void write_mesh(const AnyMesh& any, std::ostream& os)
{
    os << std::setprecision(std::numeric_limits<double>::max_digits10);
    if (const auto* mesh = std::get_if<PolyMesh2D>(&any)) {
        os << "sfvem-mesh 2 " << mesh->num_vertices() << ' ' << mesh->num_cells() << '\n';
        for (const auto& v : mesh->vertices) {
            os << "v " << v.x() << ' ' << v.y() << '\n';
        }
        for (const auto& loop : mesh->cells) {
            os << 'c';
            for (int v : loop) {
                os << ' ' << v;
            }
            os << '\n';
        }
        return;
    }
    const auto& mesh = std::get<PolyMesh3D>(any);
    os << "sfvem-mesh 3 " << mesh.num_vertices() << ' ' << mesh.num_cells() << ' ' << mesh.num_faces()
       << '\n';
    for (const auto& v : mesh.vertices) {
        os << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
    }
    for (const auto& loop : mesh.faces) {
        os << 'f';
        for (int v : loop) {
            os << ' ' << v;
        }
        os << '\n';
    }
    for (const auto& cell : mesh.cells) {
        os << 'c';
        for (const auto& sf : cell) {
            os << ' ' << (sf.sign > 0 ? '+' : '-') << sf.face;
        }
        os << '\n';
    }
}

void write_mesh(const AnyMesh& mesh, const std::string& path)
{
    std::ofstream os(path);
    if (!os) {
        throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    write_mesh(mesh, os);
}

namespace {

template <typename T>
T parse_number(const std::string& token, int line, const std::string& field)
{
    std::istringstream ss(token);
    T value{};
    ss >> value;
    if (ss.fail() || !ss.eof()) {
        throw MeshParseError(line, field, "cannot parse '" + token + "'");
    }
    return value;
}

} // namespace

AnyMesh read_mesh(std::istream& is, Orientation mode)
{
    std::string raw;
    int lineno = 0;
    int dim = 0;
    int nv = 0;
    int nc = 0;
    int nf = 0;
    bool header = false;

    std::vector<Eigen::Vector3d> vertices;
    std::vector<std::vector<int>> faces;
    std::vector<std::vector<int>> cells2;
    std::vector<std::vector<SignedFace>> cells3;

    while (std::getline(is, raw)) {
        ++lineno;
        if (const auto hash = raw.find('#'); hash != std::string::npos) {
            raw.erase(hash);
        }
        std::istringstream ls(raw);
        std::vector<std::string> tok;
        for (std::string t; ls >> t;) {
            tok.push_back(t);
        }
        if (tok.empty()) {
            continue;
        }
        if (!header) {
            if (tok[0] != "sfvem-mesh") {
                throw MeshParseError(lineno, "header", "expected 'sfvem-mesh <dim> <nv> <ncell> [nface]'");
            }
            if (tok.size() < 4) {
                throw MeshParseError(lineno, "header", "missing counts");
            }
            dim = parse_number<int>(tok[1], lineno, "dim");
            if (dim != 2 && dim != 3) {
                throw MeshParseError(lineno, "dim", "must be 2 or 3");
            }
            nv = parse_number<int>(tok[2], lineno, "nv");
            nc = parse_number<int>(tok[3], lineno, "ncell");
            if (dim == 3) {
                if (tok.size() != 5) {
                    throw MeshParseError(lineno, "nface", "3D header needs a face count");
                }
                nf = parse_number<int>(tok[4], lineno, "nface");
            } else if (tok.size() != 4) {
                throw MeshParseError(lineno, "header", "unexpected trailing fields");
            }
            header = true;
            continue;
        }
        const std::string& kind = tok[0];
        if (kind == "v") {
            if (static_cast<int>(tok.size()) != dim + 1) {
                throw MeshParseError(lineno, "v", "expected " + std::to_string(dim) + " coordinates");
            }
            Eigen::Vector3d p = Eigen::Vector3d::Zero();
            for (int d = 0; d < dim; ++d) {
                p[d] = parse_number<double>(tok[d + 1], lineno, "v." + std::string(1, char('x' + d)));
            }
            vertices.push_back(p);
        } else if (kind == "f") {
            if (dim != 3) {
                throw MeshParseError(lineno, "f", "face lines are only valid in 3D files");
            }
            std::vector<int> loop;
            for (std::size_t i = 1; i < tok.size(); ++i) {
                loop.push_back(parse_number<int>(tok[i], lineno, "f[" + std::to_string(i - 1) + "]"));
            }
            faces.push_back(std::move(loop));
        } else if (kind == "c") {
            if (dim == 2) {
                std::vector<int> loop;
                for (std::size_t i = 1; i < tok.size(); ++i) {
                    loop.push_back(parse_number<int>(tok[i], lineno, "c[" + std::to_string(i - 1) + "]"));
                }
                cells2.push_back(std::move(loop));
            } else {
                std::vector<SignedFace> cell;
                for (std::size_t i = 1; i < tok.size(); ++i) {
                    const std::string field = "c[" + std::to_string(i - 1) + "]";
                    const std::string& t = tok[i];
                    if (t.size() < 2 || (t[0] != '+' && t[0] != '-')) {
                        throw MeshParseError(lineno, field, "expected signed face id '+id' or '-id'");
                    }
                    cell.push_back({parse_number<int>(t.substr(1), lineno, field), t[0] == '+' ? 1 : -1});
                }
                cells3.push_back(std::move(cell));
            }
        } else {
            throw MeshParseError(lineno, "record", "unknown record type '" + kind + "'");
        }
    }
    if (!header) {
        throw MeshParseError(lineno, "header", "missing header");
    }
    if (static_cast<int>(vertices.size()) != nv) {
        throw MeshParseError(lineno, "nv", "header says " + std::to_string(nv) + " vertices, found "
                                               + std::to_string(vertices.size()));
    }
    const int found_cells = static_cast<int>(dim == 2 ? cells2.size() : cells3.size());
    if (found_cells != nc) {
        throw MeshParseError(lineno, "ncell", "header says " + std::to_string(nc) + " cells, found "
                                                  + std::to_string(found_cells));
    }
    if (dim == 3 && static_cast<int>(faces.size()) != nf) {
        throw MeshParseError(lineno, "nface", "header says " + std::to_string(nf) + " faces, found "
                                                  + std::to_string(faces.size()));
    }

    if (dim == 2) {
        std::vector<Eigen::Vector2d> v2;
        v2.reserve(vertices.size());
        for (const auto& p : vertices) {
            v2.emplace_back(p.x(), p.y());
        }
        return make_mesh(std::move(v2), std::move(cells2), mode);
    }
    return make_mesh(std::move(vertices), std::move(faces), std::move(cells3), mode);
}

AnyMesh read_mesh(const std::string& path, Orientation mode)
{
    std::ifstream is(path);
    if (!is) {
        throw std::runtime_error("cannot open '" + path + "'");
    }
    return read_mesh(is, mode);
}

} // namespace sfvem
