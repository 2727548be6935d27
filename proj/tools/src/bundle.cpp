#include "bundle.hpp"

#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "sliceparse/geomcore.hpp"
#include "sliceparse/image_io.hpp"

namespace sliceparse::cli {

namespace fs = std::filesystem;
using nlohmann::json;

const BundleShape& Bundle::find(const std::string& name) const {
  for (const auto& s : shapes) {
    if (s.name == name) return s;
  }
  throw std::invalid_argument("bundle has no shape '" + name + "'");
}

namespace {

void write_corners_csv(const CornerSet& corners, const fs::path& path) {
  std::ofstream out(path);
  out << "row,col,response\n" << std::setprecision(17);
  for (const auto& c : corners.points) out << c.row << ',' << c.col << ',' << c.response << '\n';
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

}  // namespace

void write_bundle(const Bundle& bundle, const fs::path& dir, const HarrisParams& harris) {
  std::set<std::string> names;
  json shapes = json::array();
  for (const auto& s : bundle.shapes) {
    if (!names.insert(s.name).second) throw std::invalid_argument("duplicate shape name " + s.name);
    const fs::path root = dir / "shapes" / s.name;
    fs::create_directories(root / "slices");
    write_grid_dump(s.grid, root / "grid.bin");
    write_obj(s.reference, root / "reference.obj");
    for (View v : kAllViews) {
      const ProjectionImage p = project(s.grid, v);
      write_pgm(p.pixels, root / (to_string(v) + ".pgm"));
      write_corners_csv(detect_corners(p, harris), root / ("corners_" + to_string(v) + ".csv"));
    }
    const int extent = s.grid.dims()[axis_index(bundle.slice_axis)];
    for (const auto& slice : extract_slices(s.grid, bundle.slice_axis, std::min(bundle.slice_count, extent))) {
      std::ostringstream name;
      name << to_string(slice.axis) << '_' << std::setw(3) << std::setfill('0') << slice.plane_index << ".pgm";
      write_pgm(slice.mask, root / "slices" / name.str());
    }
    const Vec3 o = s.grid.origin();
    shapes.push_back({{"name", s.name},
                      {"source", s.source},
                      {"voxel_size", s.grid.voxel_size()},
                      {"origin", {o.x, o.y, o.z}}});
  }
  const json doc{{"format", 1},
                 {"resolution", bundle.resolution},
                 {"slice_axis", to_string(bundle.slice_axis)},
                 {"slice_count", bundle.slice_count},
                 {"shapes", shapes}};
  std::ofstream out(dir / "bundle.json");
  out << doc.dump(2) << '\n';
  if (!out) throw std::runtime_error("cannot write " + (dir / "bundle.json").string());
}

Bundle read_bundle(const fs::path& dir) {
  std::ifstream in(dir / "bundle.json");
  if (!in) throw std::runtime_error("not a shape bundle: " + dir.string() + " (missing bundle.json)");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw std::runtime_error("bad bundle.json: " + std::string(e.what()));
  }
  Bundle b;
  b.resolution = doc.at("resolution").get<int>();
  b.slice_axis = parse_axis(doc.at("slice_axis").get<std::string>());
  b.slice_count = doc.at("slice_count").get<int>();
  for (const auto& s : doc.at("shapes")) {
    BundleShape shape;
    shape.name = s.at("name").get<std::string>();
    shape.source = s.at("source").get<std::string>();
    const auto origin = s.at("origin").get<std::vector<double>>();
    if (origin.size() != 3) throw std::runtime_error("bad origin for " + shape.name);
    const fs::path root = dir / "shapes" / shape.name;
    shape.grid = read_grid_dump(root / "grid.bin", s.at("voxel_size").get<double>(),
                                Vec3{origin[0], origin[1], origin[2]});
    shape.reference = read_mesh(root / "reference.obj");
    b.shapes.push_back(std::move(shape));
  }
  return b;
}

std::vector<VoxelGrid> grids_of(const Bundle& bundle) {
  std::vector<VoxelGrid> out;
  for (const auto& s : bundle.shapes) out.push_back(s.grid);
  return out;
}

}  // namespace sliceparse::cli
