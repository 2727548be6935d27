#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "sliceparse/mesh.hpp"

namespace sliceparse {

namespace {

std::runtime_error parse_error(const std::string& what, std::size_t line) {
  return std::runtime_error("line " + std::to_string(line) + ": " + what);
}

// "7", "7/1", "7//3", "-2" -> zero-based index.
std::uint32_t obj_vertex_ref(const std::string& token, std::size_t vertex_count,
                             std::size_t line) {
  const std::string head = token.substr(0, token.find('/'));
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(head.data(), head.data() + head.size(), value);
  if (ec != std::errc{} || ptr != head.data() + head.size() || value == 0) {
    throw parse_error("bad face index '" + token + "'", line);
  }
  const long long resolved = value > 0 ? value - 1 : static_cast<long long>(vertex_count) + value;
  if (resolved < 0 || resolved >= static_cast<long long>(vertex_count)) {
    throw parse_error("face index '" + token + "' out of range", line);
  }
  return static_cast<std::uint32_t>(resolved);
}

}  // namespace

TriMesh read_obj(std::istream& in) {
  TriMesh mesh;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.resize(hash);
    std::istringstream line(raw);
    std::string tag;
    if (!(line >> tag)) continue;
    if (tag == "v") {
      Vec3 p;
      if (!(line >> p.x >> p.y >> p.z)) throw parse_error("malformed vertex", line_no);
      mesh.vertices.push_back(p);
    } else if (tag == "f") {
      std::vector<std::string> refs;
      for (std::string t; line >> t;) refs.push_back(t);
      if (refs.size() != 3) {
        throw parse_error("only triangular faces are supported (got " +
                              std::to_string(refs.size()) + " vertices)",
                          line_no);
      }
      Triangle tri;
      for (int c = 0; c < 3; ++c) tri[c] = obj_vertex_ref(refs[c], mesh.vertices.size(), line_no);
      mesh.triangles.push_back(tri);
    } else {
      throw parse_error("unsupported OBJ record '" + tag + "'", line_no);
    }
  }
  return mesh;
}

TriMesh read_off(std::istream& in) {
  // Tokenize ignoring comments; OFF is whitespace-separated.
  std::vector<std::string> tokens;
  std::string raw;
  while (std::getline(in, raw)) {
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.resize(hash);
    std::istringstream line(raw);
    for (std::string t; line >> t;) tokens.push_back(t);
  }
  std::size_t pos = 0;
  auto next = [&]() -> const std::string& {
    if (pos >= tokens.size()) throw std::runtime_error("OFF: unexpected end of file");
    return tokens[pos++];
  };
  auto next_number = [&]() {
    const std::string& t = next();
    try {
      std::size_t used = 0;
      const double v = std::stod(t, &used);
      if (used != t.size()) throw std::invalid_argument(t);
      return v;
    } catch (const std::exception&) {
      throw std::runtime_error("OFF: expected a number, got '" + t + "'");
    }
  };
  if (next() != "OFF") throw std::runtime_error("OFF: missing 'OFF' header");
  const auto nv = static_cast<long long>(next_number());
  const auto nf = static_cast<long long>(next_number());
  next_number();  // edge count, unused
  if (nv < 0 || nf < 0) throw std::runtime_error("OFF: negative element count");
  TriMesh mesh;
  mesh.vertices.reserve(static_cast<std::size_t>(nv));
  for (long long i = 0; i < nv; ++i) {
    Vec3 p;
    p.x = next_number();
    p.y = next_number();
    p.z = next_number();
    mesh.vertices.push_back(p);
  }
  for (long long f = 0; f < nf; ++f) {
    const auto n = static_cast<long long>(next_number());
    if (n != 3) {
      throw std::runtime_error("OFF: face " + std::to_string(f) +
                               " is not a triangle (" + std::to_string(n) + " vertices)");
    }
    Triangle tri;
    for (int c = 0; c < 3; ++c) {
      const auto idx = static_cast<long long>(next_number());
      if (idx < 0 || idx >= nv) throw std::runtime_error("OFF: face index out of range");
      tri[c] = static_cast<std::uint32_t>(idx);
    }
    mesh.triangles.push_back(tri);
  }
  if (pos != tokens.size()) throw std::runtime_error("OFF: trailing data after faces");
  return mesh;
}

TriMesh read_mesh(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open mesh file " + path.string());
  auto ext = path.extension().string();
  for (auto& ch : ext) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  try {
    if (ext == ".obj") return read_obj(in);
    if (ext == ".off") return read_off(in);
  } catch (const std::exception& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
  throw std::runtime_error("unsupported mesh extension '" + ext + "' (expected .obj or .off)");
}

void write_obj(const TriMesh& mesh, std::ostream& out) {
  out << std::setprecision(17);
  for (const auto& v : mesh.vertices) out << "v " << v.x << ' ' << v.y << ' ' << v.z << '\n';
  for (const auto& t : mesh.triangles) {
    out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
  }
}

void write_obj(const TriMesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_obj(mesh, out);
}

}  // namespace sliceparse
