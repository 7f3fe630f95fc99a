#include "vrecon/geometry/mesh_io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <map>
#include <sstream>
#include <string_view>
#include <tuple>

#include "vrecon/core/binary_io.hpp"

namespace vrecon::geometry {
namespace {

std::string lower_ext(const std::string& path) {
  const auto dot = path.find_last_of('.');
  std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

double parse_double(std::string_view s, std::size_t line) {
  // std::from_chars for double is available in libstdc++ 11.
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw ParseError("invalid number '" + std::string(s) + "'", line);
  return v;
}

TriangleMesh load_obj(std::span<const std::uint8_t> bytes) {
  TriangleMesh mesh;
  const std::string_view text(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  std::vector<std::int32_t> groups;
  std::int32_t current_group = -1;
  bool any_group = false;
  std::size_t line_no = 0, pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto tok = split_ws(line);
    if (tok.empty()) {
      if (end == text.size()) break;
      continue;
    }
    if (tok[0] == "v") {
      if (tok.size() < 4) throw ParseError("vertex needs 3 coordinates", line_no);
      mesh.vertices.push_back({parse_double(tok[1], line_no), parse_double(tok[2], line_no),
                               parse_double(tok[3], line_no)});
    } else if (tok[0] == "f") {
      if (tok.size() < 4) throw ParseError("face needs at least 3 vertices", line_no);
      std::vector<std::uint32_t> idx;
      for (std::size_t k = 1; k < tok.size(); ++k) {
        const auto slash = tok[k].find('/');
        const auto first = tok[k].substr(0, slash);
        long v = 0;
        auto [p, ec] = std::from_chars(first.data(), first.data() + first.size(), v);
        if (ec != std::errc() || p != first.data() + first.size() || v == 0)
          throw ParseError("invalid face index '" + std::string(tok[k]) + "'", line_no);
        const long n = static_cast<long>(mesh.vertices.size());
        const long resolved = v > 0 ? v - 1 : n + v;
        if (resolved < 0 || resolved >= n)
          throw ParseError("face index out of range", line_no);
        idx.push_back(static_cast<std::uint32_t>(resolved));
      }
      for (std::size_t k = 1; k + 1 < idx.size(); ++k) {
        mesh.triangles.push_back({idx[0], idx[k], idx[k + 1]});
        groups.push_back(current_group);
      }
    } else if (tok[0] == "g" || tok[0] == "o") {
      const std::string name = tok.size() > 1 ? std::string(tok[1]) : "default";
      any_group = true;
      auto it = std::find(mesh.group_names.begin(), mesh.group_names.end(), name);
      if (it == mesh.group_names.end()) {
        mesh.group_names.push_back(name);
        it = mesh.group_names.end() - 1;
      }
      current_group = static_cast<std::int32_t>(it - mesh.group_names.begin());
    }
    if (end == text.size()) break;
  }
  if (any_group) {
    std::int32_t fallback = -1;
    for (auto& g : groups) {
      if (g >= 0) continue;
      if (fallback < 0) {
        mesh.group_names.push_back("default");
        fallback = static_cast<std::int32_t>(mesh.group_names.size() - 1);
      }
      g = fallback;
    }
    mesh.face_groups = std::move(groups);
  } else {
    mesh.group_names.clear();
  }
  return mesh;
}

std::vector<std::uint8_t> save_obj(const TriangleMesh& mesh) {
  std::string out;
  char buf[128];
  for (const auto& v : mesh.vertices) {
    std::snprintf(buf, sizeof buf, "v %.9g %.9g %.9g\n", v.x, v.y, v.z);
    out += buf;
  }
  std::int32_t last = -1;
  for (std::size_t i = 0; i < mesh.triangles.size(); ++i) {
    if (mesh.has_groups() && mesh.face_groups[i] != last) {
      last = mesh.face_groups[i];
      out += "g " + mesh.group_names[last] + "\n";
    }
    const auto& t = mesh.triangles[i];
    std::snprintf(buf, sizeof buf, "f %u %u %u\n", t[0] + 1, t[1] + 1, t[2] + 1);
    out += buf;
  }
  return {out.begin(), out.end()};
}

TriangleMesh load_stl(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  std::uint8_t header[80];
  r.bytes(header, 80);
  const std::uint32_t count = r.u32();
  if (r.remaining() < static_cast<std::size_t>(count) * 50)
    throw DecodeError("STL triangle data truncated", r.offset());
  TriangleMesh mesh;
  std::map<std::tuple<float, float, float>, std::uint32_t> weld;
  for (std::uint32_t i = 0; i < count; ++i) {
    for (int k = 0; k < 3; ++k) r.f32();
    Triangle tri{};
    for (int k = 0; k < 3; ++k) {
      const float x = r.f32(), y = r.f32(), z = r.f32();
      auto [it, inserted] =
          weld.try_emplace({x, y, z}, static_cast<std::uint32_t>(mesh.vertices.size()));
      if (inserted) mesh.vertices.push_back({x, y, z});
      tri[k] = it->second;
    }
    r.bytes(header, 2);
    mesh.triangles.push_back(tri);
  }
  return mesh;
}

std::vector<std::uint8_t> save_stl(const TriangleMesh& mesh) {
  ByteWriter w;
  std::string header = "vrecon binary STL";
  header.resize(80, ' ');
  w.tag(header);
  w.u32(static_cast<std::uint32_t>(mesh.triangles.size()));
  for (std::size_t i = 0; i < mesh.triangles.size(); ++i) {
    const Vec3 n = triangle_normal(mesh, i);
    w.f32(static_cast<float>(n.x)); w.f32(static_cast<float>(n.y)); w.f32(static_cast<float>(n.z));
    for (auto vi : mesh.triangles[i]) {
      const Vec3& v = mesh.vertices[vi];
      w.f32(static_cast<float>(v.x)); w.f32(static_cast<float>(v.y)); w.f32(static_cast<float>(v.z));
    }
    w.u8(0); w.u8(0);
  }
  return w.take();
}

std::size_t ply_type_size(std::string_view t) {
  if (t == "char" || t == "uchar" || t == "int8" || t == "uint8") return 1;
  if (t == "short" || t == "ushort" || t == "int16" || t == "uint16") return 2;
  if (t == "int" || t == "uint" || t == "float" || t == "int32" || t == "uint32" || t == "float32") return 4;
  if (t == "double" || t == "float64") return 8;
  return 0;
}

double ply_read_scalar(ByteReader& r, std::string_view t) {
  if (t == "float" || t == "float32") return r.f32();
  if (t == "double" || t == "float64") { double d; r.bytes(&d, 8); return d; }
  if (t == "uchar" || t == "uint8") return r.u8();
  if (t == "char" || t == "int8") return static_cast<std::int8_t>(r.u8());
  if (t == "int" || t == "int32") return r.i32();
  if (t == "uint" || t == "uint32") return r.u32();
  if (t == "short" || t == "int16") { std::int16_t v; r.bytes(&v, 2); return v; }
  if (t == "ushort" || t == "uint16") { std::uint16_t v; r.bytes(&v, 2); return v; }
  throw DecodeError("unsupported PLY type '" + std::string(t) + "'", r.offset());
}

struct PlyProperty {
  std::string name, type, list_count_type;
  bool is_list = false;
};
struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> props;
};

TriangleMesh load_ply(std::span<const std::uint8_t> bytes) {
  const std::string_view text(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  const auto header_end = text.find("end_header\n");
  if (text.substr(0, 4) != "ply\n" || header_end == std::string_view::npos)
    throw DecodeError("missing PLY header", 0);
  std::vector<PlyElement> elements;
  std::istringstream hs{std::string(text.substr(0, header_end))};
  std::string line;
  bool binary_le = false;
  while (std::getline(hs, line)) {
    std::istringstream ls(line);
    std::string kw;
    ls >> kw;
    if (kw == "format") {
      std::string fmt;
      ls >> fmt;
      binary_le = fmt == "binary_little_endian";
    } else if (kw == "element") {
      PlyElement e;
      ls >> e.name >> e.count;
      elements.push_back(e);
    } else if (kw == "property") {
      if (elements.empty()) throw DecodeError("PLY property before element", 0);
      PlyProperty p;
      std::string t;
      ls >> t;
      if (t == "list") {
        p.is_list = true;
        ls >> p.list_count_type >> p.type >> p.name;
      } else {
        p.type = t;
        ls >> p.name;
      }
      elements.back().props.push_back(p);
    }
  }
  if (!binary_le) throw DecodeError("only binary_little_endian PLY is supported", 0);
  ByteReader r(bytes);
  std::vector<std::uint8_t> skip(header_end + 11);
  r.bytes(skip.data(), skip.size());
  TriangleMesh mesh;
  for (const auto& e : elements) {
    for (std::size_t i = 0; i < e.count; ++i) {
      Vec3 v{};
      for (const auto& p : e.props) {
        if (p.is_list) {
          const auto n = static_cast<std::size_t>(ply_read_scalar(r, p.list_count_type));
          std::vector<std::uint32_t> idx(n);
          for (auto& k : idx) {
            const double d = ply_read_scalar(r, p.type);
            if (d < 0) throw DecodeError("negative PLY face index", r.offset());
            k = static_cast<std::uint32_t>(d);
          }
          if (e.name == "face" && (p.name == "vertex_indices" || p.name == "vertex_index"))
            for (std::size_t k = 1; k + 1 < n; ++k) mesh.triangles.push_back({idx[0], idx[k], idx[k + 1]});
        } else {
          if (ply_type_size(p.type) == 0) throw DecodeError("unknown PLY type", r.offset());
          const double d = ply_read_scalar(r, p.type);
          if (e.name == "vertex") {
            if (p.name == "x") v.x = d;
            else if (p.name == "y") v.y = d;
            else if (p.name == "z") v.z = d;
          }
        }
      }
      if (e.name == "vertex") mesh.vertices.push_back(v);
    }
  }
  for (const auto& t : mesh.triangles)
    for (auto k : t)
      if (k >= mesh.vertices.size()) throw DecodeError("PLY face index out of range", r.offset());
  return mesh;
}

std::vector<std::uint8_t> save_ply(const TriangleMesh& mesh) {
  ByteWriter w;
  w.tag("ply\nformat binary_little_endian 1.0\nelement vertex " +
        std::to_string(mesh.vertices.size()) +
        "\nproperty float x\nproperty float y\nproperty float z\nelement face " +
        std::to_string(mesh.triangles.size()) +
        "\nproperty list uchar int vertex_indices\nend_header\n");
  for (const auto& v : mesh.vertices) {
    w.f32(static_cast<float>(v.x)); w.f32(static_cast<float>(v.y)); w.f32(static_cast<float>(v.z));
  }
  for (const auto& t : mesh.triangles) {
    w.u8(3);
    for (auto k : t) w.i32(static_cast<std::int32_t>(k));
  }
  return w.take();
}

}  // namespace

MeshFormat format_from_path(const std::string& path) {
  const auto ext = lower_ext(path);
  if (ext == "obj") return MeshFormat::Obj;
  if (ext == "stl") return MeshFormat::Stl;
  if (ext == "ply") return MeshFormat::Ply;
  throw Error(ErrorCode::Format, "unknown mesh extension for '" + path + "'");
}

TriangleMesh load_mesh(std::span<const std::uint8_t> bytes, MeshFormat format) {
  TriangleMesh mesh;
  switch (format) {
    case MeshFormat::Obj: mesh = load_obj(bytes); break;
    case MeshFormat::Stl: mesh = load_stl(bytes); break;
    case MeshFormat::Ply: mesh = load_ply(bytes); break;
  }
  mesh.validate();
  return mesh;
}

std::vector<std::uint8_t> save_mesh(const TriangleMesh& mesh, MeshFormat format) {
  switch (format) {
    case MeshFormat::Obj: return save_obj(mesh);
    case MeshFormat::Stl: return save_stl(mesh);
    case MeshFormat::Ply: return save_ply(mesh);
  }
  return {};
}

TriangleMesh load_mesh_file(const std::string& path) {
  return load_mesh(read_file(path), format_from_path(path));
}

void save_mesh_file(const TriangleMesh& mesh, const std::string& path) {
  write_file(path, save_mesh(mesh, format_from_path(path)));
}

}  // namespace vrecon::geometry
