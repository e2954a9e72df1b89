#include "tfnet/fft.hpp"

#include <unsupported/Eigen/FFT>

namespace tfnet::fft {

namespace {

Eigen::VectorXcd run(const Eigen::VectorXcd& x, bool inverse_direction) {
    // Plans are cached per length inside the engine; one engine per thread.
    thread_local Eigen::FFT<double> engine;
    Eigen::VectorXcd out(x.size());
    if (inverse_direction) {
        engine.inv(out, x);
    } else {
        engine.fwd(out, x);
    }
    return out;
}

}  // namespace

Eigen::VectorXcd forward(const Eigen::VectorXcd& x) { return run(x, false); }

Eigen::VectorXcd inverse(const Eigen::VectorXcd& x) { return run(x, true); }

Eigen::MatrixXcd forward_rows(const Eigen::MatrixXcd& m) {
    Eigen::MatrixXcd out(m.rows(), m.cols());
    for (Eigen::Index r = 0; r < m.rows(); ++r) out.row(r) = forward(m.row(r).transpose()).transpose();
    return out;
}

Eigen::MatrixXcd inverse_rows(const Eigen::MatrixXcd& m) {
    Eigen::MatrixXcd out(m.rows(), m.cols());
    for (Eigen::Index r = 0; r < m.rows(); ++r) out.row(r) = inverse(m.row(r).transpose()).transpose();
    return out;
}

Eigen::MatrixXcd forward_cols(const Eigen::MatrixXcd& m) {
    Eigen::MatrixXcd out(m.rows(), m.cols());
    for (Eigen::Index c = 0; c < m.cols(); ++c) out.col(c) = forward(m.col(c));
    return out;
}

Eigen::MatrixXcd inverse_cols(const Eigen::MatrixXcd& m) {
    Eigen::MatrixXcd out(m.rows(), m.cols());
    for (Eigen::Index c = 0; c < m.cols(); ++c) out.col(c) = inverse(m.col(c));
    return out;
}

}  // namespace tfnet::fft
