#pragma once

#include <cstddef>
#include <vector>

namespace multiflow {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// Uniform periodic grid on the torus [0,2pi)^dim, dim in {1,2},
// N nodes per axis. Node x_j = 2pi j / N. 2D data is stored row-major
// with x outermost: index = ix*N + iy.
class Grid {
  public:
    Grid(int dim, int n);

    int dim() const { return dim_; }
    int n() const { return n_; }
    std::size_t size() const { return size_; }

    double spacing() const { return kTwoPi / n_; }
    // Quadrature weight of one node, (2pi/N)^dim.
    double cell_volume() const { return cell_volume_; }
    double volume() const { return cell_volume_ * static_cast<double>(size_); }

    double x(std::size_t idx) const;
    double y(std::size_t idx) const;  // 2D only; 0.0 in 1D

    bool operator==(const Grid& o) const { return dim_ == o.dim_ && n_ == o.n_; }
    bool operator!=(const Grid& o) const { return !(*this == o); }

  private:
    int dim_;
    int n_;
    std::size_t size_;
    double cell_volume_;
};

}  // namespace multiflow
