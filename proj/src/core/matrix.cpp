#include "matrix.hpp"

#include <cmath>
#include <stdexcept>

namespace ict {

bool Matrix::all_finite() const {
    for (double v : data) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

Matrix mix(const Matrix& a, const Matrix& b, double lam) {
    if (!a.same_shape(b)) {
        throw std::invalid_argument("mix: shape mismatch");
    }
    // Endpoints must be exact, not just within rounding.
    if (lam == 1.0) return a;
    if (lam == 0.0) return b;
    Matrix out(a.rows, a.cols);
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        out.data[i] = lam * a.data[i] + (1.0 - lam) * b.data[i];
    }
    return out;
}

} // namespace ict
