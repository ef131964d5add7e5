#include "slsim/mesh_io.hpp"

#include "slsim/error.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <charconv>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <string_view>
#include <tuple>

namespace slsim
{
namespace
{

std::string lower(std::string s)
{
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return char(std::tolower(c)); });
    return s;
}

[[noreturn]] void fail_line(const std::filesystem::path& path, std::size_t line, const std::string& what)
{
    std::ostringstream msg;
    msg << path.string() << ":" << line << ": " << what;
    throw FormatError(msg.str());
}

[[noreturn]] void fail_offset(const std::filesystem::path& path, std::streamoff offset, const std::string& what)
{
    std::ostringstream msg;
    msg << path.string() << " @ byte " << offset << ": " << what;
    throw FormatError(msg.str());
}

std::vector< std::string_view > split_ws(std::string_view s)
{
    std::vector< std::string_view > out;
    std::size_t i = 0;
    while (i < s.size())
    {
        while (i < s.size() && std::isspace(static_cast< unsigned char >(s[i])))
            ++i;
        const std::size_t start = i;
        while (i < s.size() && !std::isspace(static_cast< unsigned char >(s[i])))
            ++i;
        if (i > start)
            out.push_back(s.substr(start, i - start));
    }
    return out;
}

bool parse_double(std::string_view s, double& out)
{
    // std::from_chars for double is available in libstdc++ 11.
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

bool parse_int(std::string_view s, long& out)
{
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

std::ifstream open(const std::filesystem::path& path, std::ios::openmode mode = std::ios::in)
{
    std::ifstream in(path, mode);
    if (!in)
        throw IoError("cannot open mesh file: " + path.string());
    return in;
}

// OBJ ---------------------------------------------------------------------

Mesh parse_obj(const std::filesystem::path& path)
{
    auto in = open(path);
    std::vector< Vec3 > positions, normals;
    std::vector< Vec2 > texcoords;
    struct Corner
    {
        long v, vt, vn;
    };
    std::vector< std::array< Corner, 3 > > faces;

    auto resolve = [](long idx, std::size_t count) -> long {
        if (idx > 0)
            return idx - 1;
        if (idx < 0)
            return static_cast< long >(count) + idx;
        return -1;
    };

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line))
    {
        ++lineno;
        const auto hash = line.find('#');
        std::string_view view(line.data(), hash == std::string::npos ? line.size() : hash);
        const auto tok = split_ws(view);
        if (tok.empty())
            continue;
        if (tok[0] == "v" || tok[0] == "vn")
        {
            if (tok.size() < 4)
                fail_line(path, lineno, "expected three coordinates");
            Vec3 p;
            for (int k = 0; k < 3; ++k)
                if (!parse_double(tok[1 + k], p[k]))
                    fail_line(path, lineno, "malformed number '" + std::string(tok[1 + k]) + "'");
            (tok[0] == "v" ? positions : normals).push_back(p);
        }
        else if (tok[0] == "vt")
        {
            if (tok.size() < 3)
                fail_line(path, lineno, "expected two texture coordinates");
            Vec2 uv;
            if (!parse_double(tok[1], uv[0]) || !parse_double(tok[2], uv[1]))
                fail_line(path, lineno, "malformed texture coordinate");
            texcoords.push_back(uv);
        }
        else if (tok[0] == "f")
        {
            if (tok.size() < 4)
                fail_line(path, lineno, "face needs at least three vertices");
            std::vector< Corner > poly;
            for (std::size_t k = 1; k < tok.size(); ++k)
            {
                Corner c{-1, -1, -1};
                std::string_view s = tok[k];
                long* slots[3] = {&c.v, &c.vt, &c.vn};
                const std::size_t counts[3] = {positions.size(), texcoords.size(), normals.size()};
                for (int part = 0; part < 3 && !s.empty(); ++part)
                {
                    const auto slash = s.find('/');
                    const std::string_view field = s.substr(0, slash);
                    if (!field.empty())
                    {
                        long raw = 0;
                        if (!parse_int(field, raw))
                            fail_line(path, lineno, "malformed face index '" + std::string(tok[k]) + "'");
                        *slots[part] = resolve(raw, counts[part]);
                        if (*slots[part] < 0 || *slots[part] >= static_cast< long >(counts[part]))
                            fail_line(path, lineno, "face index out of range '" + std::string(tok[k]) + "'");
                    }
                    if (slash == std::string_view::npos)
                        break;
                    s = s.substr(slash + 1);
                }
                if (c.v < 0)
                    fail_line(path, lineno, "face corner without a vertex index");
                poly.push_back(c);
            }
            for (std::size_t k = 1; k + 1 < poly.size(); ++k)
                faces.push_back({poly[0], poly[k], poly[k + 1]});
        }
        // Other statements (o, g, s, usemtl, mtllib, l, p) carry nothing we render.
    }

    // Split vertices per unique (v, vt, vn) triple so shading attributes stay per-vertex.
    Mesh mesh;
    const bool use_normals = !normals.empty() && std::all_of(faces.begin(), faces.end(), [](const auto& f) {
        return f[0].vn >= 0 && f[1].vn >= 0 && f[2].vn >= 0;
    });
    const bool use_uvs = !texcoords.empty() && std::all_of(faces.begin(), faces.end(), [](const auto& f) {
        return f[0].vt >= 0 && f[1].vt >= 0 && f[2].vt >= 0;
    });
    if (!use_normals && !use_uvs)
    {
        mesh.vertices = positions;
        for (const auto& f : faces)
            mesh.triangles.emplace_back(int(f[0].v), int(f[1].v), int(f[2].v));
    }
    else
    {
        std::map< std::tuple< long, long, long >, int > remap;
        for (const auto& f : faces)
        {
            Eigen::Vector3i tri;
            for (int k = 0; k < 3; ++k)
            {
                const auto key = std::make_tuple(f[k].v, use_uvs ? f[k].vt : -1, use_normals ? f[k].vn : -1);
                auto it = remap.find(key);
                if (it == remap.end())
                {
                    it = remap.emplace(key, int(mesh.vertices.size())).first;
                    mesh.vertices.push_back(positions[f[k].v]);
                    if (use_uvs)
                        mesh.uvs.push_back(texcoords[f[k].vt]);
                    if (use_normals)
                    {
                        const Vec3& n = normals[f[k].vn];
                        mesh.vertex_normals.push_back(n.norm() > 0 ? Vec3(n.normalized()) : Vec3::UnitZ());
                    }
                }
                tri[k] = it->second;
            }
            mesh.triangles.push_back(tri);
        }
    }
    return mesh;
}

// PLY ---------------------------------------------------------------------

enum class PlyEncoding
{
    ascii,
    binary_le,
    binary_be
};

struct PlyProperty
{
    std::string name;
    std::string type;       // scalar type, or list item type
    std::string count_type; // non-empty for list properties
};

struct PlyElement
{
    std::string name;
    std::size_t count = 0;
    std::vector< PlyProperty > props;
};

std::size_t ply_type_size(const std::string& t)
{
    if (t == "char" || t == "uchar" || t == "int8" || t == "uint8")
        return 1;
    if (t == "short" || t == "ushort" || t == "int16" || t == "uint16")
        return 2;
    if (t == "int" || t == "uint" || t == "float" || t == "int32" || t == "uint32" || t == "float32")
        return 4;
    if (t == "double" || t == "float64")
        return 8;
    return 0;
}

template < typename T >
T read_raw(std::istream& in, bool swap)
{
    unsigned char buf[sizeof(T)];
    in.read(reinterpret_cast< char* >(buf), sizeof(T));
    if (swap)
        std::reverse(buf, buf + sizeof(T));
    T v;
    std::memcpy(&v, buf, sizeof(T));
    return v;
}

double read_ply_binary(std::istream& in, const std::string& t, bool swap)
{
    if (t == "char" || t == "int8")
        return read_raw< std::int8_t >(in, swap);
    if (t == "uchar" || t == "uint8")
        return read_raw< std::uint8_t >(in, swap);
    if (t == "short" || t == "int16")
        return read_raw< std::int16_t >(in, swap);
    if (t == "ushort" || t == "uint16")
        return read_raw< std::uint16_t >(in, swap);
    if (t == "int" || t == "int32")
        return read_raw< std::int32_t >(in, swap);
    if (t == "uint" || t == "uint32")
        return read_raw< std::uint32_t >(in, swap);
    if (t == "float" || t == "float32")
        return read_raw< float >(in, swap);
    return read_raw< double >(in, swap);
}

Mesh parse_ply(const std::filesystem::path& path)
{
    auto in = open(path, std::ios::in | std::ios::binary);
    std::string line;
    std::size_t lineno = 0;
    auto next_line = [&]() -> bool {
        if (!std::getline(in, line))
            return false;
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        return true;
    };

    if (!next_line() || line != "ply")
        fail_line(path, 1, "missing 'ply' magic");
    PlyEncoding enc = PlyEncoding::ascii;
    std::vector< PlyElement > elements;
    bool header_done = false;
    while (next_line())
    {
        const auto tok = split_ws(line);
        if (tok.empty() || tok[0] == "comment" || tok[0] == "obj_info")
            continue;
        if (tok[0] == "format")
        {
            if (tok.size() < 2)
                fail_line(path, lineno, "malformed format line");
            if (tok[1] == "ascii")
                enc = PlyEncoding::ascii;
            else if (tok[1] == "binary_little_endian")
                enc = PlyEncoding::binary_le;
            else if (tok[1] == "binary_big_endian")
                enc = PlyEncoding::binary_be;
            else
                fail_line(path, lineno, "unknown encoding '" + std::string(tok[1]) + "'");
        }
        else if (tok[0] == "element")
        {
            long count = 0;
            if (tok.size() != 3 || !parse_int(tok[2], count) || count < 0)
                fail_line(path, lineno, "malformed element line");
            elements.push_back({std::string(tok[1]), std::size_t(count), {}});
        }
        else if (tok[0] == "property")
        {
            if (elements.empty())
                fail_line(path, lineno, "property before any element");
            if (tok.size() == 5 && tok[1] == "list")
                elements.back().props.push_back({std::string(tok[4]), std::string(tok[3]), std::string(tok[2])});
            else if (tok.size() == 3)
                elements.back().props.push_back({std::string(tok[2]), std::string(tok[1]), {}});
            else
                fail_line(path, lineno, "malformed property line");
            const auto& p = elements.back().props.back();
            if (ply_type_size(p.type) == 0 || (!p.count_type.empty() && ply_type_size(p.count_type) == 0))
                fail_line(path, lineno, "unknown property type");
        }
        else if (tok[0] == "end_header")
        {
            header_done = true;
            break;
        }
        else
            fail_line(path, lineno, "unexpected header keyword '" + std::string(tok[0]) + "'");
    }
    if (!header_done)
        fail_line(path, lineno, "header not terminated by end_header");

    Mesh mesh;
    std::vector< Vec3 > normals;
    bool has_normals = false;
    const bool swap = (enc == PlyEncoding::binary_le) != (std::endian::native == std::endian::little);

    for (const auto& el : elements)
    {
        auto index_of = [&](const char* name) {
            for (std::size_t i = 0; i < el.props.size(); ++i)
                if (el.props[i].name == name)
                    return int(i);
            return -1;
        };
        const int ix = index_of("x"), iy = index_of("y"), iz = index_of("z");
        const int inx = index_of("nx"), iny = index_of("ny"), inz = index_of("nz");
        int ilist = index_of("vertex_indices");
        if (ilist < 0)
            ilist = index_of("vertex_index");
        if (el.name == "vertex" && (ix < 0 || iy < 0 || iz < 0))
            fail_line(path, lineno, "vertex element lacks x/y/z");
        if (el.name == "vertex")
            has_normals = inx >= 0 && iny >= 0 && inz >= 0;

        for (std::size_t r = 0; r < el.count; ++r)
        {
            std::vector< double > scalars(el.props.size(), 0.0);
            std::vector< long > list;
            if (enc == PlyEncoding::ascii)
            {
                if (!next_line())
                    fail_line(path, lineno, "unexpected end of file in element '" + el.name + "'");
                const auto tok = split_ws(line);
                std::size_t t = 0;
                for (std::size_t p = 0; p < el.props.size(); ++p)
                {
                    if (t >= tok.size())
                        fail_line(path, lineno, "too few values");
                    if (el.props[p].count_type.empty())
                    {
                        if (!parse_double(tok[t++], scalars[p]))
                            fail_line(path, lineno, "malformed number");
                    }
                    else
                    {
                        long n = 0;
                        if (!parse_int(tok[t++], n) || n < 0)
                            fail_line(path, lineno, "malformed list count");
                        for (long k = 0; k < n; ++k)
                        {
                            long v = 0;
                            if (t >= tok.size() || !parse_int(tok[t++], v))
                                fail_line(path, lineno, "malformed list entry");
                            if (int(p) == ilist)
                                list.push_back(v);
                        }
                    }
                }
            }
            else
            {
                for (std::size_t p = 0; p < el.props.size(); ++p)
                {
                    if (el.props[p].count_type.empty())
                        scalars[p] = read_ply_binary(in, el.props[p].type, swap);
                    else
                    {
                        const auto n = static_cast< long >(read_ply_binary(in, el.props[p].count_type, swap));
                        for (long k = 0; k < n; ++k)
                        {
                            const auto v = static_cast< long >(read_ply_binary(in, el.props[p].type, swap));
                            if (int(p) == ilist)
                                list.push_back(v);
                        }
                    }
                    if (!in)
                        fail_offset(path, in.tellg(), "unexpected end of binary data in element '" + el.name + "'");
                }
            }

            if (el.name == "vertex")
            {
                mesh.vertices.emplace_back(scalars[ix], scalars[iy], scalars[iz]);
                if (has_normals)
                    normals.emplace_back(scalars[inx], scalars[iny], scalars[inz]);
            }
            else if (el.name == "face")
            {
                if (ilist < 0)
                    fail_line(path, lineno, "face element lacks vertex_indices");
                if (list.size() < 3)
                    fail_line(path, lineno, "face with fewer than three vertices");
                for (std::size_t k = 1; k + 1 < list.size(); ++k)
                    mesh.triangles.emplace_back(int(list[0]), int(list[k]), int(list[k + 1]));
            }
        }
    }
    const auto nv = static_cast< int >(mesh.vertices.size());
    for (const auto& tri : mesh.triangles)
        if ((tri.array() < 0).any() || (tri.array() >= nv).any())
            throw FormatError(path.string() + ": face index out of range");
    if (has_normals && std::all_of(normals.begin(), normals.end(), [](const Vec3& n) { return n.norm() > 0; }))
    {
        for (auto& n : normals)
            n.normalize();
        mesh.vertex_normals = std::move(normals);
    }
    return mesh;
}

// STL ---------------------------------------------------------------------

Mesh weld(const std::vector< Vec3 >& soup)
{
    Mesh mesh;
    std::map< std::tuple< double, double, double >, int > ids;
    for (std::size_t i = 0; i < soup.size(); i += 3)
    {
        Eigen::Vector3i tri;
        for (int k = 0; k < 3; ++k)
        {
            const auto& p = soup[i + k];
            auto [it, inserted] = ids.try_emplace({p.x(), p.y(), p.z()}, int(mesh.vertices.size()));
            if (inserted)
                mesh.vertices.push_back(p);
            tri[k] = it->second;
        }
        mesh.triangles.push_back(tri);
    }
    return mesh;
}

Mesh parse_stl(const std::filesystem::path& path)
{
    const auto size = std::filesystem::file_size(path);
    auto in = open(path, std::ios::in | std::ios::binary);
    char header[80] = {};
    in.read(header, 80);
    std::uint32_t count = 0;
    if (in && size >= 84)
    {
        in.read(reinterpret_cast< char* >(&count), 4);
        if constexpr (std::endian::native == std::endian::big)
            count = ((count & 0xffu) << 24) | ((count & 0xff00u) << 8) | ((count >> 8) & 0xff00u) | (count >> 24);
    }
    const bool looks_ascii = std::string_view(header, 5) == "solid";
    if (size >= 84 && size == 84 + std::uint64_t(count) * 50)
    {
        std::vector< Vec3 > soup;
        soup.reserve(std::size_t(count) * 3);
        const bool swap = std::endian::native == std::endian::big;
        for (std::uint32_t t = 0; t < count; ++t)
        {
            for (int k = 0; k < 3; ++k)
                read_raw< float >(in, swap); // facet normal; recomputed from winding
            for (int v = 0; v < 3; ++v)
            {
                Vec3 p;
                for (int k = 0; k < 3; ++k)
                    p[k] = read_raw< float >(in, swap);
                soup.push_back(p);
            }
            read_raw< std::uint16_t >(in, swap);
            if (!in)
                fail_offset(path, std::streamoff(84 + std::uint64_t(t) * 50), "truncated triangle record");
        }
        return weld(soup);
    }
    if (!looks_ascii)
        fail_offset(path, 80, "binary STL size does not match triangle count");

    in.clear();
    in.seekg(0);
    std::vector< Vec3 > soup;
    std::string line;
    std::size_t lineno = 0;
    int in_facet = 0;
    while (std::getline(in, line))
    {
        ++lineno;
        const auto tok = split_ws(line);
        if (tok.empty())
            continue;
        const std::string key = lower(std::string(tok[0]));
        if (key == "vertex")
        {
            Vec3 p;
            if (tok.size() != 4)
                fail_line(path, lineno, "vertex needs three coordinates");
            for (int k = 0; k < 3; ++k)
                if (!parse_double(tok[1 + k], p[k]))
                    fail_line(path, lineno, "malformed number '" + std::string(tok[1 + k]) + "'");
            soup.push_back(p);
            ++in_facet;
        }
        else if (key == "facet")
            in_facet = 0;
        else if (key == "endfacet" && in_facet != 3)
            fail_line(path, lineno, "facet without exactly three vertices");
    }
    if (soup.size() % 3 != 0)
        fail_line(path, lineno, "vertex count not a multiple of three");
    return weld(soup);
}

} // namespace

std::optional< MeshFormat > mesh_format_from_extension(const std::filesystem::path& path)
{
    const std::string ext = lower(path.extension().string());
    if (ext == ".obj")
        return MeshFormat::obj;
    if (ext == ".ply")
        return MeshFormat::ply;
    if (ext == ".stl")
        return MeshFormat::stl;
    return std::nullopt;
}

LoadedMesh load_mesh(const std::filesystem::path& path, MeshFormat format, double unit_scale)
{
    if (!std::filesystem::exists(path))
        throw IoError("mesh file not found: " + path.string());
    LoadedMesh out;
    switch (format)
    {
    case MeshFormat::obj: out.mesh = parse_obj(path); break;
    case MeshFormat::ply: out.mesh = parse_ply(path); break;
    case MeshFormat::stl: out.mesh = parse_stl(path); break;
    }
    scale(out.mesh, unit_scale);
    compute_face_normals(out.mesh);
    out.dropped_degenerate = drop_degenerate(out.mesh);
    validate(out.mesh);
    return out;
}

LoadedMesh load_mesh(const std::filesystem::path& path, double unit_scale)
{
    const auto format = mesh_format_from_extension(path);
    if (!format)
        throw FormatError("unrecognized mesh extension: " + path.string());
    return load_mesh(path, *format, unit_scale);
}

} // namespace slsim
