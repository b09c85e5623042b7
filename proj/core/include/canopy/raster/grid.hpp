#pragma once

#include <cstddef>
#include <vector>

namespace canopy::raster {

// Dense row-major grid.
template <typename T>
class Grid {
public:
    Grid() = default;
    Grid(int width, int height, T fill = T{})
        : width_(width), height_(height),
          data_(static_cast<std::size_t>(width) * height, fill) {}

    int width() const { return width_; }
    int height() const { return height_; }
    bool empty() const { return data_.empty(); }
    std::size_t size() const { return data_.size(); }

    T& at(int row, int col) { return data_[static_cast<std::size_t>(row) * width_ + col]; }
    const T& at(int row, int col) const {
        return data_[static_cast<std::size_t>(row) * width_ + col];
    }

    std::vector<T>& data() { return data_; }
    const std::vector<T>& data() const { return data_; }

    bool operator==(const Grid&) const = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<T> data_;
};

} // namespace canopy::raster
