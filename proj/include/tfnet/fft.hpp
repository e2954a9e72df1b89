#pragma once

#include <Eigen/Dense>

namespace tfnet::fft {

// Unnormalized forward DFT uses exp(-j*2*pi*k*n/N); the inverse carries the 1/N factor.

Eigen::VectorXcd forward(const Eigen::VectorXcd& x);
Eigen::VectorXcd inverse(const Eigen::VectorXcd& x);

/// Transforms each row (along the column index).
Eigen::MatrixXcd forward_rows(const Eigen::MatrixXcd& m);
Eigen::MatrixXcd inverse_rows(const Eigen::MatrixXcd& m);

/// Transforms each column (along the row index).
Eigen::MatrixXcd forward_cols(const Eigen::MatrixXcd& m);
Eigen::MatrixXcd inverse_cols(const Eigen::MatrixXcd& m);

}  // namespace tfnet::fft
