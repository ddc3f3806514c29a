#include "dainf/matrix.hpp"

namespace dainf {

Mat mat_mul(const Ring& ring, const Mat& a, const Mat& b) {
    if (a.cols() != b.rows()) throw DimensionMismatch("mat_mul: inner dimensions disagree");
    Mat out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const Scalar& aik = a.at(i, k);
            if (is_zero(aik)) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) {
                const Scalar& bkj = b.at(k, j);
                if (is_zero(bkj)) continue;
                out.at(i, j) = add(ring, out.at(i, j), mul(ring, aik, bkj));
            }
        }
    return out;
}

Mat mat_add(const Ring& ring, const Mat& a, const Mat& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionMismatch("mat_add: shapes disagree");
    Mat out(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out.at(i, j) = add(ring, a.at(i, j), b.at(i, j));
    return out;
}

Mat mat_sub(const Ring& ring, const Mat& a, const Mat& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionMismatch("mat_sub: shapes disagree");
    Mat out(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out.at(i, j) = sub(ring, a.at(i, j), b.at(i, j));
    return out;
}

Mat mat_scale(const Ring& ring, const Scalar& c, const Mat& a) {
    Mat out(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out.at(i, j) = mul(ring, c, a.at(i, j));
    return out;
}

Mat hstack(const Mat& a, const Mat& b) {
    if (a.empty()) return b;
    if (b.empty()) return a;
    if (a.rows() != b.rows()) throw DimensionMismatch("hstack: row counts disagree");
    Mat out(a.rows(), a.cols() + b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) out.at(i, j) = a.at(i, j);
        for (std::size_t j = 0; j < b.cols(); ++j) out.at(i, a.cols() + j) = b.at(i, j);
    }
    return out;
}

std::vector<Scalar> mat_apply(const Ring& ring, const Mat& a, const std::vector<Scalar>& v) {
    if (a.cols() != v.size()) throw DimensionMismatch("mat_apply: size disagrees");
    std::vector<Scalar> out(a.rows());
    for (std::size_t j = 0; j < a.cols(); ++j) {
        if (is_zero(v[j])) continue;
        for (std::size_t i = 0; i < a.rows(); ++i) {
            if (is_zero(a.at(i, j))) continue;
            out[i] = add(ring, out[i], mul(ring, a.at(i, j), v[j]));
        }
    }
    return out;
}

}  // namespace dainf
