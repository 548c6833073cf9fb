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

#include "unvd/analytics/projection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <spdlog/spdlog.h>

#include "unvd/common/error.hpp"

namespace unvd::analytics {

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::MatrixXd to_eigen(const Matrix& m) {
    return Eigen::Map<const RowMajor>(m.data().data(), static_cast<Eigen::Index>(m.rows()),
                                      static_cast<Eigen::Index>(m.cols()));
}

void check_k(std::size_t k, std::size_t limit, std::string_view what) {
    if (k < 1 || k > limit) {
        raise(ErrorCode::InvalidArgument, std::string(what) + " needs 1 <= k <= " + std::to_string(limit) +
                                              ", got k=" + std::to_string(k));
    }
}

/// +1 or -1 so that the entry of largest magnitude (first on near-ties) is positive.
template <typename Vec>
double sign_of_dominant(const Vec& v) {
    double peak = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        peak = std::max(peak, std::abs(v(i)));
    }
    const double tie = peak * 1e-9;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::abs(v(i)) >= peak - tie) {
            return v(i) < 0 ? -1.0 : 1.0;
        }
    }
    return 1.0;
}

std::string rank_warning(std::string_view what, std::size_t k, std::size_t rank) {
    return std::string(to_string(ErrorCode::RankDeficient)) + ": " + std::string(what) + " asked for " +
           std::to_string(k) + " components but the numerical rank is " + std::to_string(rank) +
           "; padded with zero columns";
}

ProjectedPoints svd_scores(const Eigen::MatrixXd& x, std::size_t k, std::string_view what) {
    const auto n = static_cast<std::size_t>(x.rows());
    ProjectedPoints out{Matrix(n, k), {}};
    Eigen::BDCSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sigma = svd.singularValues();
    const double top = sigma.size() > 0 ? sigma(0) : 0.0;
    const double tol = top * static_cast<double>(std::max(x.rows(), x.cols())) *
                       std::numeric_limits<double>::epsilon();
    std::size_t rank = 0;
    while (rank < static_cast<std::size_t>(sigma.size()) && sigma(static_cast<Eigen::Index>(rank)) > tol &&
           top > 0.0) {
        ++rank;
    }
    for (std::size_t c = 0; c < std::min(k, rank); ++c) {
        const auto ci = static_cast<Eigen::Index>(c);
        const double s = sign_of_dominant(svd.matrixV().col(ci)) * sigma(ci);
        for (std::size_t r = 0; r < n; ++r) {
            out.points(r, c) = svd.matrixU()(static_cast<Eigen::Index>(r), ci) * s;
        }
    }
    if (k > rank) {
        out.warnings.push_back(rank_warning(what, k, rank));
        spdlog::warn("{}", out.warnings.back());
    }
    return out;
}

}  // namespace

ProjectedPoints pca(const Matrix& x, std::size_t k) {
    require_finite(x, "pca input");
    if (x.rows() < 2) {
        raise(ErrorCode::InvalidArgument, "pca needs at least two rows");
    }
    check_k(k, std::min(x.rows() - 1, x.cols()), "pca");
    return svd_scores(to_eigen(center_columns(x)), k, "pca");
}

ProjectedPoints tsvd(const Matrix& x, std::size_t k) {
    require_finite(x, "tsvd input");
    check_k(k, std::min(x.rows(), x.cols()), "tsvd");
    return svd_scores(to_eigen(x), k, "tsvd");
}

ProjectedPoints mds_from_distances(const Matrix& distances, std::size_t k) {
    require_finite(distances, "distance matrix");
    const auto n = distances.rows();
    if (distances.cols() != n) {
        raise(ErrorCode::InvalidArgument, "distance matrix must be square");
    }
    if (k < 1) {
        raise(ErrorCode::InvalidArgument, "mds needs k >= 1");
    }
    ProjectedPoints out{Matrix(n, k), {}};
    if (n == 1) {
        return out;
    }
    if (n < k + 1) {
        raise(ErrorCode::InvalidArgument, "mds needs n >= k + 1, got n=" + std::to_string(n) +
                                              " k=" + std::to_string(k));
    }
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (distances(i, i) != 0.0) {
            raise(ErrorCode::InvalidArgument, "distance matrix has a non-zero diagonal");
        }
        for (std::size_t j = 0; j < n; ++j) {
            const double d = distances(i, j);
            if (d < 0.0 || std::abs(d - distances(j, i)) > 1e-9 * std::max(1.0, std::abs(d))) {
                raise(ErrorCode::InvalidArgument, "distance matrix must be symmetric and non-negative");
            }
            scale = std::max(scale, d);
        }
    }
    if (scale == 0.0) {
        out.warnings.push_back(std::string(to_string(ErrorCode::DegenerateInput)) + ": all points coincide");
        spdlog::warn("mds: {}", out.warnings.back());
        return out;
    }

    const auto ni = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd d2(ni, ni);
    for (Eigen::Index i = 0; i < ni; ++i) {
        for (Eigen::Index j = 0; j < ni; ++j) {
            const double d = distances(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
            d2(i, j) = d * d;
        }
    }
    const Eigen::VectorXd row_mean = d2.rowwise().mean();
    const double grand = row_mean.mean();
    Eigen::MatrixXd b(ni, ni);
    for (Eigen::Index i = 0; i < ni; ++i) {
        for (Eigen::Index j = 0; j < ni; ++j) {
            b(i, j) = -0.5 * (d2(i, j) - row_mean(i) - row_mean(j) + grand);
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(b);
    if (eig.info() != Eigen::Success) {
        raise(ErrorCode::DegenerateInput, "eigen decomposition of the centred distance matrix did not converge");
    }
    const auto& values = eig.eigenvalues();  // ascending
    const double top = values(ni - 1);
    const double tol = std::max(top, 0.0) * static_cast<double>(n) * std::numeric_limits<double>::epsilon() * 16;
    bool clamped = false;
    for (std::size_t c = 0; c < k; ++c) {
        const Eigen::Index idx = ni - 1 - static_cast<Eigen::Index>(c);
        const double lambda = values(idx);
        if (lambda <= tol) {
            clamped = clamped || lambda < -tol;
            continue;
        }
        const auto vec = eig.eigenvectors().col(idx);
        const double s = sign_of_dominant(vec) * std::sqrt(lambda);
        for (std::size_t r = 0; r < n; ++r) {
            out.points(r, c) = vec(static_cast<Eigen::Index>(r)) * s;
        }
    }
    if (clamped) {
        out.warnings.emplace_back("negative eigenvalues among the top components were clamped to zero");
        spdlog::warn("mds: {}", out.warnings.back());
    }
    return out;
}

ProjectedPoints mds_classical(const Matrix& x, std::size_t k) {
    require_finite(x, "mds input");
    return mds_from_distances(pairwise_distances(x), k);
}

}  // namespace unvd::analytics
