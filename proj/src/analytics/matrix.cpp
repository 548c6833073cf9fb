// Copyright 2026-present the unvd project
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "unvd/analytics/matrix.hpp"

#include <cmath>

#include "unvd/common/error.hpp"

namespace unvd::analytics {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

namespace {

template <typename T>
Matrix rows_to_matrix(const std::vector<std::vector<T>>& rows) {
    if (rows.empty()) {
        return {};
    }
    Matrix m(rows.size(), rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != m.cols()) {
            raise(ErrorCode::DimensionMismatch, "row " + std::to_string(r) + " has " +
                                                    std::to_string(rows[r].size()) + " columns, expected " +
                                                    std::to_string(m.cols()));
        }
        for (std::size_t c = 0; c < m.cols(); ++c) {
            m(r, c) = static_cast<double>(rows[r][c]);
        }
    }
    return m;
}

}  // namespace

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) { return rows_to_matrix(rows); }
Matrix Matrix::from_rows(const std::vector<std::vector<float>>& rows) { return rows_to_matrix(rows); }

void require_finite(const Matrix& m, std::string_view what) {
    if (m.empty()) {
        raise(ErrorCode::InvalidArgument, std::string(what) + " is empty");
    }
    for (double v : m.data()) {
        if (!std::isfinite(v)) {
            raise(ErrorCode::InvalidArgument, std::string(what) + " has a non-finite entry");
        }
    }
}

double squared_euclidean(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

double euclidean(std::span<const double> a, std::span<const double> b) {
    return std::sqrt(squared_euclidean(a, b));
}

Matrix pairwise_distances(const Matrix& x) {
    const auto n = x.rows();
    Matrix d(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            d(i, j) = d(j, i) = euclidean(x.row(i), x.row(j));
        }
    }
    return d;
}

Matrix center_columns(const Matrix& x) {
    Matrix out = x;
    for (std::size_t c = 0; c < x.cols(); ++c) {
        double mean = 0.0;
        for (std::size_t r = 0; r < x.rows(); ++r) {
            mean += x(r, c);
        }
        mean /= static_cast<double>(x.rows());
        for (std::size_t r = 0; r < x.rows(); ++r) {
            out(r, c) -= mean;
        }
    }
    return out;
}

}  // namespace unvd::analytics
