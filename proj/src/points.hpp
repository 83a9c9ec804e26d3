#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace lyapnet {

// Non-owning view over a row-major block of state vectors.
struct PointsView {
    const double* data = nullptr;
    std::size_t count = 0;
    int dim = 0;

    PointsView() = default;
    PointsView(const double* d, std::size_t c, int n) : data(d), count(c), dim(n) {}
    PointsView(const std::vector<double>& flat, int n)
        : data(flat.data()), count(n > 0 ? flat.size() / static_cast<std::size_t>(n) : 0), dim(n) {}

    [[nodiscard]] std::span<const double> point(std::size_t i) const {
        return {data + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
    }

    [[nodiscard]] PointsView slice(std::size_t offset, std::size_t n_points) const {
        return {data + offset * static_cast<std::size_t>(dim), n_points, dim};
    }
};

}  // namespace lyapnet
