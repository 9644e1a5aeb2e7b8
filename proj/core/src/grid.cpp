#include "multiflow/grid.hpp"

#include <cmath>
#include <string>

#include "multiflow/errors.hpp"

namespace multiflow {

Grid::Grid(int dim, int n) : dim_(dim), n_(n) {
    if (dim != 1 && dim != 2)
        throw StructuralError("Grid: dim must be 1 or 2, got " + std::to_string(dim));
    if (n < 8 || n % 2 != 0)
        throw StructuralError("Grid: N must be even and >= 8, got " + std::to_string(n));
    size_ = static_cast<std::size_t>(n);
    for (int d = 1; d < dim; ++d) size_ *= static_cast<std::size_t>(n);
    cell_volume_ = std::pow(kTwoPi / n, dim);
}

double Grid::x(std::size_t idx) const {
    std::size_t ix = (dim_ == 1) ? idx : idx / static_cast<std::size_t>(n_);
    return kTwoPi * static_cast<double>(ix) / n_;
}

double Grid::y(std::size_t idx) const {
    if (dim_ == 1) return 0.0;
    std::size_t iy = idx % static_cast<std::size_t>(n_);
    return kTwoPi * static_cast<double>(iy) / n_;
}

}  // namespace multiflow
