#ifndef HYPERTRI_FFT_HPP
#define HYPERTRI_FFT_HPP

#include <Eigen/Dense>

namespace hypertri::fft {

/// Unnormalised forward DFT: uhat_k = sum_j u_j exp(-2 pi i j k / n).
Eigen::VectorXcd forward(const Eigen::VectorXcd& u);

/// Inverse DFT carrying the 1/n factor, so inverse(forward(u)) == u.
Eigen::VectorXcd inverse(const Eigen::VectorXcd& uhat);

} // namespace hypertri::fft

#endif
