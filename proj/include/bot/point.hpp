#pragma once

#include <array>
#include <cmath>
#include <initializer_list>
#include <span>
#include <string>

namespace bot {

// A coordinate in 2 or 3 dimensions. Arithmetic between points of different
// dimension is a programming error and throws ParameterError.
class Point {
 public:
  static constexpr int kMaxDim = 3;

  Point() = default;
  Point(std::initializer_list<double> coords);
  explicit Point(std::span<const double> coords);

  static Point zero(int dim);

  int dim() const { return dim_; }
  double operator[](int k) const { return c_[k]; }
  double& operator[](int k) { return c_[k]; }
  std::span<const double> coords() const { return {c_.data(), static_cast<std::size_t>(dim_)}; }

  Point& operator+=(const Point& o);
  Point& operator-=(const Point& o);
  Point& operator*=(double s);
  Point& operator/=(double s);

  friend Point operator+(Point a, const Point& b) { return a += b; }
  friend Point operator-(Point a, const Point& b) { return a -= b; }
  friend Point operator*(Point a, double s) { return a *= s; }
  friend Point operator*(double s, Point a) { return a *= s; }
  friend Point operator/(Point a, double s) { return a /= s; }
  friend bool operator==(const Point& a, const Point& b);

  std::string to_string() const;

 private:
  std::array<double, kMaxDim> c_{};
  int dim_ = 0;
};

double dot(const Point& a, const Point& b);
double norm(const Point& a);
double distance(const Point& a, const Point& b);

}  // namespace bot
