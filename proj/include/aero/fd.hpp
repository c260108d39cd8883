//
// Project     : aerosketch
// Module      : fd.hpp
// Description : deterministic shrink-and-forget reductions (Frequent
//               Directions and Co-occurring Directions)
//

#ifndef AERO_FD_HPP
#define AERO_FD_HPP

#include <utility>
#include <vector>

#include "aero/linalg.hpp"

namespace aero {

// Frequent Directions reduce of a full 2*ell x d buffer: subtract the
// ell-th squared singular value from every direction and drop what's left
// below it. Output has the same shape with at most ell-1 nonzero rows.
Matrix fd_reduce(const Matrix& b, int ell);

// streaming Frequent Directions buffer with capacity 2*ell rows
class FdStream {
  public:
    FdStream(int d, int ell);

    void insert(const Vector& row);

    // current sketch matrix (2*ell x d; trailing rows zero)
    const Matrix& sketch() const { return buf_; }
    int filled() const { return filled_; }
    int ell() const { return ell_; }
    int reduce_count() const { return reduces_; }

  private:
    int d_;
    int ell_;
    int filled_;
    int reduces_;
    Matrix buf_;
};

// convenience wrapper: run the whole stream, return the final 2*ell x d sketch
Matrix fd_stream(const std::vector<Vector>& rows, int ell);

// Co-occurring Directions reduce of paired column buffers a (d_x x 2*ell)
// and b (d_y x 2*ell): QR both, SVD the small cross product, shrink its
// singular values by the ell-th one, split the shrink across both factors.
std::pair<Matrix, Matrix> cod_reduce(const Matrix& a, const Matrix& b, int ell);

}  // namespace aero

#endif  // AERO_FD_HPP
