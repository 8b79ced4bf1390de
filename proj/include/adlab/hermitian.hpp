// hermitian.hpp — Hermiticity validation and the Pauli basis

#pragma once

#include <adlab/types.hpp>

#include <sstream>

namespace adlab {

// Throws ValidationError naming the worst entry pair if H deviates from
// H = H† by more than tol relative to the largest-magnitude entry.
inline void require_hermitian(const Matrix& h, double tol = 1e-12,
                              const char* what = "matrix") {
    if (h.rows() != h.cols())
        throw ValidationError(std::string(what) + ": not square");
    if (h.rows() == 0)
        throw ValidationError(std::string(what) + ": empty");
    const double scale = std::max(h.cwiseAbs().maxCoeff(), 1.0);
    double worst = 0.0;
    Eigen::Index wi = 0, wj = 0;
    for (Eigen::Index i = 0; i < h.rows(); ++i) {
        for (Eigen::Index j = i; j < h.cols(); ++j) {
            const double dev = std::abs(h(i, j) - std::conj(h(j, i)));
            if (dev > worst) {
                worst = dev;
                wi = i;
                wj = j;
            }
        }
    }
    if (worst > tol * scale) {
        std::ostringstream msg;
        msg << what << ": not Hermitian, worst entry pair (" << wi << "," << wj
            << ") deviates by " << worst << " (tolerance " << tol * scale << ")";
        throw ValidationError(msg.str());
    }
}

inline Matrix pauli_x() {
    Matrix s(2, 2);
    s << 0, 1, 1, 0;
    return s;
}

inline Matrix pauli_y() {
    Matrix s(2, 2);
    s << 0, Complex(0, -1), Complex(0, 1), 0;
    return s;
}

inline Matrix pauli_z() {
    Matrix s(2, 2);
    s << 1, 0, 0, -1;
    return s;
}

inline Matrix identity2() { return Matrix::Identity(2, 2); }

} // namespace adlab
