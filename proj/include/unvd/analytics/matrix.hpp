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

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace unvd::analytics {

/// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);

    static Matrix from_rows(const std::vector<std::vector<double>>& rows);
    static Matrix from_rows(const std::vector<std::vector<float>>& rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return rows_ == 0 || cols_ == 0; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Throws InvalidArgument unless the matrix is non-empty with finite entries.
void require_finite(const Matrix& m, std::string_view what = "matrix");

double euclidean(std::span<const double> a, std::span<const double> b);
double squared_euclidean(std::span<const double> a, std::span<const double> b);

/// n x n Euclidean distances between rows.
Matrix pairwise_distances(const Matrix& x);

/// Copy with the column means subtracted.
Matrix center_columns(const Matrix& x);

/// Output of a reduction: n x k coordinates plus non-fatal diagnostics such
/// as zero-padded columns or clamped eigenvalues.
struct ProjectedPoints {
    Matrix points;
    std::vector<std::string> warnings;
};

}  // namespace unvd::analytics
