#include <Eigen/Dense>

#include "wmgf/spectral.hpp"

namespace wmgf {

namespace {

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> decompose(const VoxelGraph& graph,
                                                         std::size_t dense_limit) {
    const std::size_t n = graph.n_vertices();
    if (n > dense_limit)
        throw std::length_error("exact filtering limited to " + std::to_string(dense_limit) +
                                " vertices; use the Chebyshev path");
    const auto lap = dense_laplacian(graph);
    Eigen::MatrixXd mat = Eigen::Map<const Eigen::MatrixXd>(lap.data(), static_cast<long>(n),
                                                            static_cast<long>(n));
    // dense_laplacian is row-major but symmetric, so the map is safe.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(mat);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("exact_filter_apply: eigendecomposition failed");
    return solver;
}

} // namespace

FilterResult exact_filter_apply(const VoxelGraph& graph, const HeatKernel& kernel,
                                std::span<const double> f, std::size_t dense_limit) {
    const std::size_t n = graph.n_vertices();
    if (f.size() != n)
        throw shape_error("exact_filter_apply: signal length must equal vertex count");

    FilterResult result;
    result.kernel = kernel.label();
    result.cheb_order = 0;
    result.graph_hash = graph.content_hash();
    result.values.resize(n);
    if (n == 0) return result;

    const auto solver = decompose(graph, dense_limit);
    const Eigen::VectorXd coords =
        solver.eigenvectors().transpose() *
        Eigen::Map<const Eigen::VectorXd>(f.data(), static_cast<long>(n));

    Eigen::VectorXd shaped(static_cast<long>(n));
    for (long l = 0; l < static_cast<long>(n); ++l) {
        double lambda = solver.eigenvalues()[l];
        if (lambda < 0.0) {
            if (lambda < -1e-9)
                throw std::logic_error("exact_filter_apply: eigenvalue below spectrum bound");
            lambda = 0.0;
        }
        shaped[l] = heat_kernel_eval(kernel.tau, lambda) * coords[l];
    }
    Eigen::Map<Eigen::VectorXd>(result.values.data(), static_cast<long>(n)) =
        solver.eigenvectors() * shaped;
    return result;
}

std::vector<double> laplacian_eigenvalues(const VoxelGraph& graph, std::size_t dense_limit) {
    const std::size_t n = graph.n_vertices();
    if (n == 0) return {};
    if (n > dense_limit)
        throw std::length_error("laplacian_eigenvalues limited to " +
                                std::to_string(dense_limit) + " vertices");
    const auto lap = dense_laplacian(graph);
    const Eigen::MatrixXd mat = Eigen::Map<const Eigen::MatrixXd>(
        lap.data(), static_cast<long>(n), static_cast<long>(n));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(mat, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("laplacian_eigenvalues: eigendecomposition failed");
    return {solver.eigenvalues().data(), solver.eigenvalues().data() + n};
}

} // namespace wmgf
