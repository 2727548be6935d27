#include <gtest/gtest.h>

#include <sstream>

#include "fixtures.hpp"
#include "sliceparse/mesh.hpp"
#include "sliceparse/shapes.hpp"

using namespace sliceparse;

TEST(Mesh, BoxIsClosedWithVolume) {
  const TriMesh m = box_mesh({0, 0, 0}, {1, 2, 3});
  EXPECT_EQ(m.triangles.size(), 12u);
  EXPECT_TRUE(is_edge_manifold(m));
  EXPECT_TRUE(has_consistent_winding(m));
  EXPECT_NEAR(signed_volume(m), 6.0, 1e-12);
  EXPECT_NEAR(surface_area(m), 22.0, 1e-12);
  TriMesh flipped = m;
  flip_winding(flipped);
  EXPECT_NEAR(signed_volume(flipped), -6.0, 1e-12);
}

TEST(Mesh, CylinderPrism) {
  const TriMesh m = cylinder_mesh(1.0, 2.0, 64);
  EXPECT_TRUE(is_edge_manifold(m));
  EXPECT_TRUE(has_consistent_winding(m));
  // Inscribed 64-gon area times height.
  EXPECT_NEAR(signed_volume(m), 0.5 * 64 * std::sin(2 * M_PI / 64) * 2.0, 1e-9);
}

TEST(Mesh, OpenMeshIsNotManifold) {
  TriMesh m = box_mesh({0, 0, 0}, {1, 1, 1});
  m.triangles.pop_back();
  EXPECT_FALSE(is_edge_manifold(m));
}

TEST(Mesh, ValidateRejectsBadTriangles) {
  TriMesh m = box_mesh({0, 0, 0}, {1, 1, 1});
  EXPECT_NO_THROW(validate(m));
  m.triangles.push_back({0, 1, 99});
  EXPECT_THROW(validate(m), std::invalid_argument);
  m.triangles.back() = {0, 0, 1};
  EXPECT_THROW(validate(m), std::invalid_argument);
}

TEST(Mesh, WeldMergesIdenticalVertices) {
  TriMesh a = box_mesh({0, 0, 0}, {1, 1, 1});
  TriMesh b = box_mesh({0, 0, 0}, {1, 1, 1});
  a.append(b);
  EXPECT_EQ(a.vertices.size(), 16u);
  EXPECT_EQ(weld_exact(a).vertices.size(), 8u);
}

TEST(MeshIo, ObjRoundTrip) {
  const TriMesh m = box_mesh({0.25, -1, 2}, {1.5, 0, 3.75});
  std::stringstream ss;
  write_obj(m, ss);
  EXPECT_EQ(read_obj(ss), m);
}

TEST(MeshIo, ObjAcceptsSlashesAndComments) {
  std::istringstream in("# tri\nv 0 0 0\nv 1 0 0\nv 0 1 0 # comment\n\nf 1/1/1 2//2 -1\n");
  const TriMesh m = read_obj(in);
  ASSERT_EQ(m.triangles.size(), 1u);
  EXPECT_EQ(m.triangles[0], (Triangle{0, 1, 2}));
}

TEST(MeshIo, ObjRejectsOtherRecords) {
  std::istringstream quad("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n");
  EXPECT_THROW(read_obj(quad), std::runtime_error);
  std::istringstream normal("vn 0 0 1\n");
  EXPECT_THROW(read_obj(normal), std::runtime_error);
  std::istringstream range("v 0 0 0\nf 1 2 3\n");
  EXPECT_THROW(read_obj(range), std::runtime_error);
}

TEST(MeshIo, Off) {
  std::istringstream in("OFF\n4 1 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n3 0 1 2\n");
  const TriMesh m = read_off(in);
  EXPECT_EQ(m.vertices.size(), 4u);
  EXPECT_EQ(m.triangles.size(), 1u);
  std::istringstream quad("OFF\n4 1 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n");
  EXPECT_THROW(read_off(quad), std::runtime_error);
}

TEST(MeshIo, ReadMeshByExtension) {
  fixtures::TempDir dir("mesh");
  const TriMesh m = box_mesh({0, 0, 0}, {1, 1, 1});
  write_obj(m, dir / "box.obj");
  EXPECT_EQ(read_mesh(dir / "box.obj"), m);
  EXPECT_THROW(read_mesh(dir / "missing.obj"), std::runtime_error);
}
