#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "wmgf/graph.hpp"
#include "wmgf/volume.hpp"

namespace wmgf {

/// Exponential smoothing profile on the Laplacian spectrum; tau sets the
/// spatial extent, tau = 0 is the identity filter.
struct HeatKernel {
    double tau = 1.4;

    double operator()(double lambda) const;
    std::string label() const;
};

/// K(lambda) = exp(-tau * lambda). Throws std::domain_error for negative
/// lambda or negative tau.
double heat_kernel_eval(double tau, double lambda);

/// Truncated shifted-Chebyshev expansion of a spectral kernel on
/// [0, lambda_max]: P(lambda) = c_0 + sum_k c_k T_k((lambda - a)/a), a = lambda_max/2.
struct ChebApprox {
    unsigned order = 0;               // K
    std::vector<double> coefficients; // c_0 .. c_K
    double lambda_max = 2.0;
    std::string label;                // kernel description, informational

    /// Scalar evaluation by Clenshaw recurrence (diagnostics and grid oracles).
    double evaluate(double lambda) const;

    void validate() const;
};

/// Chebyshev coefficients by Gauss-Chebyshev quadrature with
/// max(4*order, 200) nodes.
ChebApprox cheb_coefficients(const std::function<double(double)>& kernel, unsigned order,
                             double lambda_max, std::string label = "");
ChebApprox cheb_coefficients(const HeatKernel& kernel, unsigned order, double lambda_max = 2.0);

struct FilterResult {
    std::vector<double> values;
    std::string kernel;
    unsigned cheb_order = 0; // 0 on the exact path
    std::uint64_t graph_hash = 0;
};

/// Filters a graph signal through the polynomial, using only repeated
/// laplacian_apply calls; no eigendecomposition.
FilterResult cheb_filter_apply(const VoxelGraph& graph, const ChebApprox& approx,
                               std::span<const double> f);

/// In-place variant without metadata; workhorse for per-frame filtering.
void cheb_apply(const VoxelGraph& graph, const ChebApprox& approx, std::span<const double> f,
                std::span<double> out);

inline constexpr std::size_t kDenseVertexLimit = 2000;

/// Exact spectral filtering via dense symmetric eigendecomposition.
/// Oracle for the Chebyshev path; limited to kDenseVertexLimit vertices.
FilterResult exact_filter_apply(const VoxelGraph& graph, const HeatKernel& kernel,
                                std::span<const double> f,
                                std::size_t dense_limit = kDenseVertexLimit);

/// Dense normalized Laplacian, row-major n x n.
std::vector<double> dense_laplacian(const VoxelGraph& graph);

/// Ascending eigenvalues of the dense normalized Laplacian.
std::vector<double> laplacian_eigenvalues(const VoxelGraph& graph,
                                          std::size_t dense_limit = kDenseVertexLimit);

/// Filters every time frame independently. Masked voxels that are graph
/// vertices are filtered; isolated and out-of-mask voxels pass through
/// unchanged. Frames are distributed across threads.
Volume4D filter_timeseries(const VoxelGraph& graph, const ChebApprox& approx,
                           const Volume4D& series, const Mask& mask, unsigned threads = 1);

} // namespace wmgf
