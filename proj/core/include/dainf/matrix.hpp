#pragma once

#include "dainf/scalar.hpp"

#include <vector>

namespace dainf {

/* Dense matrix of ring elements. Blocks at a single bidegree are small, so a
 * dense layout keeps the normal-form code simple. */
class Mat {
  public:
    Mat() : rows_(0), cols_(0) {}
    Mat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols) {}

    static Mat identity(std::size_t n) {
        Mat m(n, n);
        for (std::size_t i = 0; i < n; ++i) m.at(i, i) = Scalar(1, 1);
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return rows_ == 0 || cols_ == 0; }

    Scalar& at(std::size_t r, std::size_t c) { return a_[r * cols_ + c]; }
    const Scalar& at(std::size_t r, std::size_t c) const { return a_[r * cols_ + c]; }

    bool is_zero() const {
        for (const auto& x : a_)
            if (!dainf::is_zero(x)) return false;
        return true;
    }

    bool operator==(const Mat& o) const { return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_; }

    Mat transposed() const {
        Mat t(cols_, rows_);
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c) t.at(c, r) = at(r, c);
        return t;
    }

    std::vector<Scalar> col(std::size_t c) const {
        std::vector<Scalar> v(rows_);
        for (std::size_t r = 0; r < rows_; ++r) v[r] = at(r, c);
        return v;
    }

    void set_col(std::size_t c, const std::vector<Scalar>& v) {
        for (std::size_t r = 0; r < rows_; ++r) at(r, c) = v[r];
    }

  private:
    std::size_t rows_, cols_;
    std::vector<Scalar> a_;
};

Mat mat_mul(const Ring& ring, const Mat& a, const Mat& b);
Mat mat_add(const Ring& ring, const Mat& a, const Mat& b);
Mat mat_sub(const Ring& ring, const Mat& a, const Mat& b);
Mat mat_scale(const Ring& ring, const Scalar& c, const Mat& a);
Mat hstack(const Mat& a, const Mat& b);
std::vector<Scalar> mat_apply(const Ring& ring, const Mat& a, const std::vector<Scalar>& v);

}  // namespace dainf
