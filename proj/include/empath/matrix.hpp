// matrix.hpp - row-major dense matrix
#pragma once

#include <span>
#include <vector>

#include "empath/common.hpp"

namespace empath {

struct Matrix {
    size_t rows = 0;
    size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(size_t r, size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    double& at(size_t r, size_t c) { return data[r * cols + c]; }
    double at(size_t r, size_t c) const { return data[r * cols + c]; }

    std::span<const double> row(size_t r) const { return {data.data() + r * cols, cols}; }
    std::span<double> row(size_t r) { return {data.data() + r * cols, cols}; }

    static Matrix from_rows(const std::vector<std::vector<double>>& rows_in) {
        if (rows_in.empty()) return {};
        Matrix m(rows_in.size(), rows_in[0].size());
        for (size_t r = 0; r < rows_in.size(); ++r) {
            if (rows_in[r].size() != m.cols) throw ValidationError("ragged matrix rows");
            for (size_t c = 0; c < m.cols; ++c) m.at(r, c) = rows_in[r][c];
        }
        return m;
    }
};

}  // namespace empath
