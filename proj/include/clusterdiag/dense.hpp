#pragma once

// Dense-matrix oracle machinery (Eigen). Basis convention: bit q of a basis
// index is the state of qubit q, qubit 0 least significant. All cluster-state
// objects here are real; complex enters only for generic Pauli matrices in
// unit tests.

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <vector>

#include "clusterdiag/pauli.hpp"

namespace clusterdiag {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;

inline int checked_dim(int num_qubits, int budget = 14) {
  if (num_qubits > budget) throw std::invalid_argument("dense oracle: qubit budget exceeded");
  return 1 << num_qubits;
}

// Full complex matrix of a PauliString (small systems only).
inline CMat pauli_matrix(const PauliString& p) {
  int dim = checked_dim(p.num_qubits);
  CMat m = CMat::Zero(dim, dim);
  uint64_t x = 0, z = 0;
  for (int q = 0; q < p.num_qubits; ++q) {
    if (p.x_mask.get(q)) x |= uint64_t(1) << q;
    if (p.z_mask.get(q)) z |= uint64_t(1) << q;
  }
  for (int k = 0; k < dim; ++k) {
    double sign = (__builtin_popcountll(uint64_t(k) & z) & 1) ? -1.0 : 1.0;
    m(k ^ x, k) = sign * p.phase();
  }
  return m;
}

// In-place rho := (P rho) for a real X/Z-only string P (phase exponent 0 or 2).
inline void left_mul_xz(Mat& rho, uint64_t x, uint64_t z, double sign = 1.0) {
  const int dim = rho.rows();
  Mat out(dim, dim);
  for (int j = 0; j < dim; ++j)
    for (int i = 0; i < dim; ++i) {
      double s = (__builtin_popcountll(uint64_t(i ^ x) & z) & 1) ? -sign : sign;
      out(i, j) = s * rho(int(i ^ x), j);
    }
  rho.swap(out);
}

inline void right_mul_xz(Mat& rho, uint64_t x, uint64_t z, double sign = 1.0) {
  const int dim = rho.rows();
  Mat out(dim, dim);
  for (int j = 0; j < dim; ++j) {
    double s = (__builtin_popcountll(uint64_t(j) & z) & 1) ? -sign : sign;
    for (int i = 0; i < dim; ++i) out(i, j) = s * rho(i, int(j ^ x));
  }
  rho.swap(out);
}

inline void apply_pauli_channel_dense(Mat& rho, int q, double p, char axis) {
  if (p == 0.0) return;
  const int dim = rho.rows();
  const uint64_t bit = uint64_t(1) << q;
  Mat conj(dim, dim);
  if (axis == 'X') {
    for (int j = 0; j < dim; ++j)
      for (int i = 0; i < dim; ++i) conj(i, j) = rho(int(i ^ bit), int(j ^ bit));
  } else {  // Z
    for (int j = 0; j < dim; ++j)
      for (int i = 0; i < dim; ++i) {
        double s = ((i & bit) != 0) == ((j & bit) != 0) ? 1.0 : -1.0;
        conj(i, j) = s * rho(i, j);
      }
  }
  rho = (1.0 - p) * rho + p * conj;
}

inline Mat partial_transpose(const Mat& rho, uint64_t region_bits) {
  const int dim = rho.rows();
  Mat out(dim, dim);
  const uint64_t keep = ~region_bits;
  for (int j = 0; j < dim; ++j)
    for (int i = 0; i < dim; ++i) {
      uint64_t ii = (uint64_t(i) & keep) | (uint64_t(j) & region_bits);
      uint64_t jj = (uint64_t(j) & keep) | (uint64_t(i) & region_bits);
      out(ii, jj) = rho(i, j);
    }
  return out;
}

inline double trace_power(const Mat& m, int power) {
  switch (power) {
    case 1:
      return m.trace();
    case 2:
      return m.cwiseProduct(m.transpose()).sum();
    case 3: {
      Mat m2 = m * m;
      return m2.cwiseProduct(m.transpose()).sum();
    }
    case 4: {
      Mat m2 = m * m;
      return m2.cwiseProduct(m2.transpose()).sum();
    }
    default: {
      Mat acc = m;
      for (int k = 1; k < power; ++k) acc = acc * m;
      return acc.trace();
    }
  }
}

// Expectation <vec| prod_q O_q |vec> of a product of single-qubit operators.
inline double product_op_expectation(const Vec& vec, int num_qubits,
                                     const std::vector<Eigen::Matrix2d>& ops) {
  Vec w = vec;
  const int dim = vec.size();
  for (int q = 0; q < num_qubits; ++q) {
    const auto& o = ops[q];
    const uint64_t bit = uint64_t(1) << q;
    Vec nw(dim);
    for (int i = 0; i < dim; ++i) {
      int b = (i & bit) ? 1 : 0;
      nw(i) = o(b, b) * w(i) + o(b, 1 - b) * w(int(i ^ bit));
    }
    w.swap(nw);
  }
  return vec.dot(w);
}

}  // namespace clusterdiag
