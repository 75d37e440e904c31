#include "wmgf/spectral.hpp"

#include <cmath>
#include <stdexcept>

#include "wmgf/parallel.hpp"

namespace wmgf {

double heat_kernel_eval(double tau, double lambda) {
    if (lambda < 0.0) throw std::domain_error("heat_kernel_eval: negative lambda");
    if (tau < 0.0) throw std::domain_error("heat_kernel_eval: negative tau");
    return std::exp(-tau * lambda);
}

double HeatKernel::operator()(double lambda) const { return heat_kernel_eval(tau, lambda); }

std::string HeatKernel::label() const {
    return "heat(tau=" + std::to_string(tau) + ")";
}

void ChebApprox::validate() const {
    if (order < 1) throw std::domain_error("ChebApprox: order must be >= 1");
    if (!(lambda_max > 0.0 && lambda_max <= 2.0))
        throw std::domain_error("ChebApprox: lambda_max must lie in (0, 2]");
    if (coefficients.size() != static_cast<std::size_t>(order) + 1)
        throw shape_error("ChebApprox: need order + 1 coefficients");
    for (double c : coefficients)
        if (!std::isfinite(c)) throw std::runtime_error("ChebApprox: non-finite coefficient");
}

double ChebApprox::evaluate(double lambda) const {
    const double a = lambda_max / 2.0;
    const double y = (lambda - a) / a;
    double b1 = 0.0, b2 = 0.0;
    for (unsigned k = order; k >= 1; --k) {
        const double b0 = 2.0 * y * b1 - b2 + coefficients[k];
        b2 = b1;
        b1 = b0;
    }
    return coefficients[0] + y * b1 - b2;
}

ChebApprox cheb_coefficients(const std::function<double(double)>& kernel, unsigned order,
                             double lambda_max, std::string label) {
    if (order < 1) throw std::domain_error("cheb_coefficients: order must be >= 1");
    if (!(lambda_max > 0.0 && lambda_max <= 2.0))
        throw std::domain_error("cheb_coefficients: lambda_max must lie in (0, 2]");

    const std::size_t n_nodes = std::max<std::size_t>(4 * order, 200);
    const double a = lambda_max / 2.0;

    // Kernel samples at the Chebyshev nodes of [0, lambda_max].
    std::vector<double> theta(n_nodes), samples(n_nodes);
    for (std::size_t m = 0; m < n_nodes; ++m) {
        theta[m] = M_PI * (static_cast<double>(m) + 0.5) / static_cast<double>(n_nodes);
        samples[m] = kernel(a * std::cos(theta[m]) + a);
    }

    ChebApprox approx;
    approx.order = order;
    approx.lambda_max = lambda_max;
    approx.label = std::move(label);
    approx.coefficients.resize(order + 1);
    for (unsigned k = 0; k <= order; ++k) {
        double sum = 0.0;
        for (std::size_t m = 0; m < n_nodes; ++m)
            sum += std::cos(static_cast<double>(k) * theta[m]) * samples[m];
        const double scale = (k == 0 ? 1.0 : 2.0) / static_cast<double>(n_nodes);
        approx.coefficients[k] = scale * sum;
        if (!std::isfinite(approx.coefficients[k]))
            throw std::runtime_error("cheb_coefficients: non-finite quadrature result");
    }
    return approx;
}

ChebApprox cheb_coefficients(const HeatKernel& kernel, unsigned order, double lambda_max) {
    return cheb_coefficients([&kernel](double l) { return kernel(l); }, order, lambda_max,
                             kernel.label());
}

void cheb_apply(const VoxelGraph& graph, const ChebApprox& approx, std::span<const double> f,
                std::span<double> out) {
    approx.validate();
    const std::size_t n = graph.n_vertices();
    if (f.size() != n || out.size() != n)
        throw shape_error("cheb_apply: signal length must equal vertex count");
    if (n == 0) return;

    const double a = approx.lambda_max / 2.0;
    const auto& c = approx.coefficients;

    // Three-term recurrence on shifted Chebyshev polynomials of the
    // Laplacian: T_0 f = f, T_1 f = (L f - a f)/a,
    // T_{k+1} f = (2/a)(L T_k f - a T_k f) - T_{k-1} f.
    std::vector<double> t_prev(f.begin(), f.end());
    for (std::size_t i = 0; i < n; ++i) out[i] = c[0] * t_prev[i];

    std::vector<double> t_cur(n), scratch(n);
    laplacian_apply(graph, t_prev, scratch);
    for (std::size_t i = 0; i < n; ++i) t_cur[i] = (scratch[i] - a * t_prev[i]) / a;
    for (std::size_t i = 0; i < n; ++i) out[i] += c[1] * t_cur[i];

    for (unsigned k = 2; k <= approx.order; ++k) {
        laplacian_apply(graph, t_cur, scratch);
        for (std::size_t i = 0; i < n; ++i) {
            const double t_next = (2.0 / a) * (scratch[i] - a * t_cur[i]) - t_prev[i];
            t_prev[i] = t_cur[i];
            t_cur[i] = t_next;
            out[i] += c[k] * t_next;
        }
    }
}

FilterResult cheb_filter_apply(const VoxelGraph& graph, const ChebApprox& approx,
                               std::span<const double> f) {
    FilterResult result;
    result.values.resize(f.size());
    cheb_apply(graph, approx, f, result.values);
    result.kernel = approx.label;
    result.cheb_order = approx.order;
    result.graph_hash = graph.content_hash();
    return result;
}

std::vector<double> dense_laplacian(const VoxelGraph& graph) {
    const std::size_t n = graph.n_vertices();
    std::vector<double> lap(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        lap[i * n + i] = 1.0;
        const double di = graph.degrees[i];
        for (std::uint64_t k = graph.row_ptr[i]; k < graph.row_ptr[i + 1]; ++k) {
            const std::size_t j = graph.col_idx[k];
            lap[i * n + j] = -graph.weights[k] / std::sqrt(di * graph.degrees[j]);
        }
    }
    return lap;
}

Volume4D filter_timeseries(const VoxelGraph& graph, const ChebApprox& approx,
                           const Volume4D& series, const Mask& mask, unsigned threads) {
    series.validate();
    if (series.dims != mask.dims || series.dims != graph.dims)
        throw shape_error("filter_timeseries: series/mask/graph dimension mismatch");
    for (std::uint64_t v : graph.vertex_to_voxel)
        if (!mask.at_flat(v))
            throw shape_error("filter_timeseries: graph vertex outside the mask");
    if (graph.n_vertices() > mask.count())
        throw shape_error("filter_timeseries: more graph vertices than masked voxels");

    Volume4D out = series;
    const std::size_t n = graph.n_vertices();
    if (n == 0) return out;

    parallel_for(series.n_frames, threads, [&](std::size_t t) {
        std::vector<double> signal(n), filtered(n);
        const double* in_frame = series.frame(t);
        double* out_frame = out.frame(t);
        for (std::size_t i = 0; i < n; ++i) signal[i] = in_frame[graph.vertex_to_voxel[i]];
        cheb_apply(graph, approx, signal, filtered);
        for (std::size_t i = 0; i < n; ++i) out_frame[graph.vertex_to_voxel[i]] = filtered[i];
    });
    return out;
}

} // namespace wmgf
