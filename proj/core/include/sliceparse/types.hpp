#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace sliceparse {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
  double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

  friend Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend Vec3 operator*(Vec3 a, double s) { return {a.x * s, a.y * s, a.z * s}; }
  friend Vec3 operator*(double s, Vec3 a) { return a * s; }
  friend bool operator==(const Vec3&, const Vec3&) = default;
};

inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(Vec3 a, Vec3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(Vec3 a) { return std::sqrt(dot(a, a)); }

struct Point2 {
  double x = 0.0, y = 0.0;
  friend bool operator==(const Point2&, const Point2&) = default;
};

/// Integer cell coordinate in a voxel grid.
struct Index3 {
  int i = 0, j = 0, k = 0;

  int& operator[](int a) { return a == 0 ? i : (a == 1 ? j : k); }
  int operator[](int a) const { return a == 0 ? i : (a == 1 ? j : k); }
  friend bool operator==(const Index3&, const Index3&) = default;
  friend auto operator<=>(const Index3&, const Index3&) = default;
};

struct Pixel {
  int row = 0, col = 0;
  friend bool operator==(const Pixel&, const Pixel&) = default;
  friend auto operator<=>(const Pixel&, const Pixel&) = default;
};

enum class Axis : std::uint8_t { X = 0, Y = 1, Z = 2 };

inline int axis_index(Axis a) { return static_cast<int>(a); }
std::string to_string(Axis a);
Axis parse_axis(const std::string& s);

/// The two axes spanning a plane perpendicular to `a`, in increasing order.
/// Image rows run along the first, columns along the second.
inline std::array<int, 2> perpendicular_axes(Axis a) {
  switch (a) {
    case Axis::X: return {1, 2};
    case Axis::Y: return {0, 2};
    case Axis::Z: return {0, 1};
  }
  return {0, 1};
}

/// Orthographic views. The enum value doubles as the plane id `c` of a cut action.
enum class View : std::uint8_t { Front = 0, Top = 1, End = 2 };

inline constexpr std::array<View, 3> kAllViews{View::Front, View::Top, View::End};

/// Axis the view looks along: front along Y, top along Z, end along X.
inline Axis view_axis(View v) {
  switch (v) {
    case View::Front: return Axis::Y;
    case View::Top: return Axis::Z;
    case View::End: return Axis::X;
  }
  return Axis::Z;
}

std::string to_string(View v);
View parse_view(const std::string& s);

/// Row-major 2D image.
template <typename T>
class Image {
 public:
  Image() = default;
  Image(int rows, int cols, T fill = T{}) : rows_(rows), cols_(cols) {
    if (rows < 0 || cols < 0) throw std::invalid_argument("image dims must be nonnegative");
    data_.assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), fill);
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }
  bool in_bounds(int r, int c) const { return r >= 0 && c >= 0 && r < rows_ && c < cols_; }

  T& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  const T& operator()(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  T& at(Pixel p) { return (*this)(p.row, p.col); }
  const T& at(Pixel p) const { return (*this)(p.row, p.col); }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<T> data_;
};

using Mask = Image<std::uint8_t>;
using RealImage = Image<double>;

std::size_t count_true(const Mask& m);

/// Inclusive axis-aligned box of cells.
struct Cuboid {
  Index3 min_corner;
  Index3 max_corner;

  bool contains(int i, int j, int k) const {
    return i >= min_corner.i && i <= max_corner.i && j >= min_corner.j && j <= max_corner.j &&
           k >= min_corner.k && k <= max_corner.k;
  }
  bool valid() const {
    return min_corner.i <= max_corner.i && min_corner.j <= max_corner.j &&
           min_corner.k <= max_corner.k;
  }
  long long cell_count() const {
    if (!valid()) return 0;
    return static_cast<long long>(max_corner.i - min_corner.i + 1) *
           (max_corner.j - min_corner.j + 1) * (max_corner.k - min_corner.k + 1);
  }
  friend bool operator==(const Cuboid&, const Cuboid&) = default;
};

}  // namespace sliceparse
