#include "dainf/linalg.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>

namespace dainf {

namespace {

Int abs_int(const Int& a) { return a < 0 ? Int(-a) : a; }

/* ---------- integer matrices and Smith normal form ---------- */

struct IMat {
    std::size_t rows = 0, cols = 0;
    std::vector<Int> a;
    IMat() = default;
    IMat(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c) {}
    Int& at(std::size_t r, std::size_t c) { return a[r * cols + c]; }
    const Int& at(std::size_t r, std::size_t c) const { return a[r * cols + c]; }
    static IMat identity(std::size_t n) {
        IMat m(n, n);
        for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
        return m;
    }
};

IMat imat_mul(const IMat& x, const IMat& y) {
    IMat out(x.rows, y.cols);
    for (std::size_t i = 0; i < x.rows; ++i)
        for (std::size_t k = 0; k < x.cols; ++k) {
            if (x.at(i, k) == 0) continue;
            for (std::size_t j = 0; j < y.cols; ++j) {
                if (y.at(k, j) == 0) continue;
                out.at(i, j) += x.at(i, k) * y.at(k, j);
            }
        }
    return out;
}

/* Smith normal form over Z with optional transform tracking.
 * Maintains U*A_orig*V = A with Uinv, Vinv the inverses. */
struct IntSnf2 {
    IMat A, U, Uinv, V, Vinv;
    std::size_t rank = 0;
    bool want_u = false, want_v = false;

    void row_swap(std::size_t i, std::size_t j) {
        if (i == j) return;
        for (std::size_t c = 0; c < A.cols; ++c) std::swap(A.at(i, c), A.at(j, c));
        if (want_u) {
            for (std::size_t c = 0; c < U.cols; ++c) std::swap(U.at(i, c), U.at(j, c));
            for (std::size_t r = 0; r < Uinv.rows; ++r) std::swap(Uinv.at(r, i), Uinv.at(r, j));
        }
    }
    void col_swap(std::size_t i, std::size_t j) {
        if (i == j) return;
        for (std::size_t r = 0; r < A.rows; ++r) std::swap(A.at(r, i), A.at(r, j));
        if (want_v) {
            for (std::size_t r = 0; r < V.rows; ++r) std::swap(V.at(r, i), V.at(r, j));
            for (std::size_t c = 0; c < Vinv.cols; ++c) std::swap(Vinv.at(i, c), Vinv.at(j, c));
        }
    }
    void row_neg(std::size_t i) {
        for (std::size_t c = 0; c < A.cols; ++c) A.at(i, c) = -A.at(i, c);
        if (want_u) {
            for (std::size_t c = 0; c < U.cols; ++c) U.at(i, c) = -U.at(i, c);
            for (std::size_t r = 0; r < Uinv.rows; ++r) Uinv.at(r, i) = -Uinv.at(r, i);
        }
    }
    void row_axpy(std::size_t i, std::size_t j, const Int& q) {
        if (q == 0) return;
        for (std::size_t c = 0; c < A.cols; ++c) A.at(i, c) += q * A.at(j, c);
        if (want_u) {
            for (std::size_t c = 0; c < U.cols; ++c) U.at(i, c) += q * U.at(j, c);
            for (std::size_t r = 0; r < Uinv.rows; ++r) Uinv.at(r, j) -= q * Uinv.at(r, i);
        }
    }
    void col_axpy(std::size_t i, std::size_t j, const Int& q) {
        if (q == 0) return;
        for (std::size_t r = 0; r < A.rows; ++r) A.at(r, i) += q * A.at(r, j);
        if (want_v) {
            for (std::size_t r = 0; r < V.rows; ++r) V.at(r, i) += q * V.at(r, j);
            for (std::size_t c = 0; c < Vinv.cols; ++c) Vinv.at(j, c) -= q * Vinv.at(i, c);
        }
    }

    void run(IMat input, bool track_u, bool track_v) {
        A = std::move(input);
        want_u = track_u;
        want_v = track_v;
        if (want_u) {
            U = IMat::identity(A.rows);
            Uinv = IMat::identity(A.rows);
        }
        if (want_v) {
            V = IMat::identity(A.cols);
            Vinv = IMat::identity(A.cols);
        }
        const std::size_t n = std::min(A.rows, A.cols);
        std::size_t t = 0;
        for (; t < n; ++t) {
            bool found = false;
            std::size_t pr = t, pc = t;
            Int best;
            for (std::size_t r = t; r < A.rows; ++r)
                for (std::size_t c = t; c < A.cols; ++c) {
                    const Int& x = A.at(r, c);
                    if (x == 0) continue;
                    Int ax = abs_int(x);
                    if (!found || ax < best) {
                        found = true;
                        best = ax;
                        pr = r;
                        pc = c;
                    }
                }
            if (!found) break;
            row_swap(t, pr);
            col_swap(t, pc);
            for (;;) {
                bool clean = true;
                for (std::size_t r = t + 1; r < A.rows; ++r) {
                    if (A.at(r, t) == 0) continue;
                    Int q = A.at(r, t) / A.at(t, t);
                    row_axpy(r, t, -q);
                    if (A.at(r, t) != 0) {
                        row_swap(t, r);
                        clean = false;
                    }
                }
                for (std::size_t c = t + 1; c < A.cols; ++c) {
                    if (A.at(t, c) == 0) continue;
                    Int q = A.at(t, c) / A.at(t, t);
                    col_axpy(c, t, -q);
                    if (A.at(t, c) != 0) {
                        col_swap(t, c);
                        clean = false;
                    }
                }
                if (!clean) continue;
                bool fixed = false;
                for (std::size_t r = t + 1; r < A.rows && !fixed; ++r)
                    for (std::size_t c = t + 1; c < A.cols && !fixed; ++c)
                        if (A.at(r, c) % A.at(t, t) != 0) {
                            row_axpy(t, r, 1);
                            fixed = true;
                        }
                if (!fixed) break;
            }
            if (A.at(t, t) < 0) row_neg(t);
        }
        rank = t;
    }
};

IMat to_imat(const Ring&, const Mat& m) {
    IMat out(m.rows(), m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) {
            const Scalar& x = m.at(r, c);
            if (x.den != 1) throw DainfError("integer lift of a non-integral scalar");
            out.at(r, c) = x.num;
        }
    return out;
}

Mat from_imat(const Ring& ring, const IMat& m) {
    Mat out(m.rows, m.cols);
    for (std::size_t r = 0; r < m.rows; ++r)
        for (std::size_t c = 0; c < m.cols; ++c) out.at(r, c) = canon(ring, m.at(r, c));
    return out;
}

/* Solve K * x = b over Z for K with full column rank using a precomputed SNF
 * of K; returns nullopt when b is outside the column lattice. */
struct LatticeSolver {
    IntSnf2 snf;
    std::size_t k;
    explicit LatticeSolver(const IMat& K) : k(K.cols) { snf.run(K, true, true); }
    std::optional<std::vector<Int>> solve(const std::vector<Int>& b) const {
        std::vector<Int> c(snf.A.rows);
        for (std::size_t i = 0; i < snf.A.rows; ++i) {
            Int acc = 0;
            for (std::size_t j = 0; j < snf.U.cols; ++j)
                if (snf.U.at(i, j) != 0) acc += snf.U.at(i, j) * b[j];
            c[i] = acc;
        }
        std::vector<Int> y(k);
        for (std::size_t i = 0; i < snf.A.rows; ++i) {
            if (i < snf.rank) {
                const Int& d = snf.A.at(i, i);
                if (c[i] % d != 0) return std::nullopt;
                y[i] = c[i] / d;
            } else if (c[i] != 0) {
                return std::nullopt;
            }
        }
        std::vector<Int> x(k);
        for (std::size_t i = 0; i < k; ++i) {
            Int acc = 0;
            for (std::size_t j = 0; j < k; ++j)
                if (snf.V.at(i, j) != 0) acc += snf.V.at(i, j) * y[j];
            x[i] = acc;
        }
        return x;
    }
};

/* ---------- field Gaussian elimination ---------- */

struct FieldGauss {
    Ring ring;
    Mat A;                       /* row echelon of the input */
    Mat T;                       /* row transform: A = T * input */
    std::vector<long> pivot_col; /* per echelon row */
    std::vector<long> col_pivot; /* per column: echelon row or -1 */

    FieldGauss(const Ring& rg, const Mat& input) : ring(rg), A(input) {
        const std::size_t m = A.rows(), n = A.cols();
        T = Mat::identity(m);
        col_pivot.assign(n, -1);
        std::size_t row = 0;
        for (std::size_t c = 0; c < n && row < m; ++c) {
            std::size_t pr = row;
            while (pr < m && is_zero(A.at(pr, c))) ++pr;
            if (pr == m) continue;
            if (pr != row)
                for (std::size_t j = 0; j < n; ++j) std::swap(A.at(row, j), A.at(pr, j));
            if (pr != row)
                for (std::size_t j = 0; j < m; ++j) std::swap(T.at(row, j), T.at(pr, j));
            Scalar inv = *inverse(ring, A.at(row, c));
            for (std::size_t j = 0; j < n; ++j) A.at(row, j) = mul(ring, inv, A.at(row, j));
            for (std::size_t j = 0; j < m; ++j) T.at(row, j) = mul(ring, inv, T.at(row, j));
            for (std::size_t r = 0; r < m; ++r) {
                if (r == row || is_zero(A.at(r, c))) continue;
                Scalar f = A.at(r, c);
                for (std::size_t j = 0; j < n; ++j)
                    A.at(r, j) = sub(ring, A.at(r, j), mul(ring, f, A.at(row, j)));
                for (std::size_t j = 0; j < m; ++j)
                    T.at(r, j) = sub(ring, T.at(r, j), mul(ring, f, T.at(row, j)));
            }
            pivot_col.push_back(static_cast<long>(c));
            col_pivot[c] = static_cast<long>(row);
            ++row;
        }
    }

    std::size_t rank() const { return pivot_col.size(); }

    std::optional<std::vector<Scalar>> solve(const std::vector<Scalar>& b) const {
        std::vector<Scalar> c = mat_apply(ring, T, b);
        for (std::size_t r = rank(); r < A.rows(); ++r)
            if (!is_zero(c[r])) return std::nullopt;
        std::vector<Scalar> x(A.cols());
        for (std::size_t r = 0; r < rank(); ++r) {
            Scalar acc = c[r];
            for (std::size_t j = static_cast<std::size_t>(pivot_col[r]) + 1; j < A.cols(); ++j)
                if (!is_zero(x[j]) && !is_zero(A.at(r, j)))
                    acc = sub(ring, acc, mul(ring, A.at(r, j), x[j]));
            x[static_cast<std::size_t>(pivot_col[r])] = acc;
        }
        return x;
    }

    std::vector<std::vector<Scalar>> kernel() const {
        std::vector<std::vector<Scalar>> out;
        for (std::size_t c = 0; c < A.cols(); ++c) {
            if (col_pivot[c] >= 0) continue;
            std::vector<Scalar> v(A.cols());
            v[c] = from_int(ring, 1);
            for (std::size_t r = 0; r < rank(); ++r)
                v[static_cast<std::size_t>(pivot_col[r])] = neg(ring, A.at(r, c));
            out.push_back(std::move(v));
        }
        return out;
    }
};

/* incremental span over a field, used to pick deterministic complements */
struct FieldSpan {
    Ring ring;
    std::size_t dim;
    std::vector<std::vector<Scalar>> rows; /* reduced vectors */
    std::vector<std::size_t> lead;
    explicit FieldSpan(const Ring& rg, std::size_t d) : ring(rg), dim(d) {}
    bool add(std::vector<Scalar> v) {
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (is_zero(v[lead[i]])) continue;
            Scalar f = v[lead[i]];
            for (std::size_t j = 0; j < dim; ++j) v[j] = sub(ring, v[j], mul(ring, f, rows[i][j]));
        }
        std::size_t l = 0;
        while (l < dim && is_zero(v[l])) ++l;
        if (l == dim) return false;
        Scalar inv = *inverse(ring, v[l]);
        for (std::size_t j = 0; j < dim; ++j) v[j] = mul(ring, inv, v[j]);
        rows.push_back(std::move(v));
        lead.push_back(l);
        return true;
    }
};

/* ---------- SNF-based solve over Z and Z/n ---------- */

std::optional<std::vector<Scalar>> solve_integers(const Ring& ring, const Mat& A, const std::vector<Scalar>& b) {
    IntSnf2 s;
    s.run(to_imat(ring, A), true, true);
    std::vector<Int> bi(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) bi[i] = b[i].num;
    std::vector<Int> c(A.rows());
    for (std::size_t i = 0; i < A.rows(); ++i) {
        Int acc = 0;
        for (std::size_t j = 0; j < A.rows(); ++j)
            if (s.U.at(i, j) != 0) acc += s.U.at(i, j) * bi[j];
        c[i] = acc;
    }
    std::vector<Int> y(A.cols());
    for (std::size_t i = 0; i < A.rows(); ++i) {
        if (i < s.rank) {
            if (c[i] % s.A.at(i, i) != 0) return std::nullopt;
            y[i] = c[i] / s.A.at(i, i);
        } else if (c[i] != 0) {
            return std::nullopt;
        }
    }
    std::vector<Scalar> x(A.cols());
    for (std::size_t i = 0; i < A.cols(); ++i) {
        Int acc = 0;
        for (std::size_t j = 0; j < A.cols(); ++j)
            if (s.V.at(i, j) != 0) acc += s.V.at(i, j) * y[j];
        x[i] = canon(ring, acc);
    }
    return x;
}

std::optional<std::vector<Scalar>> solve_mod(const Ring& ring, const Mat& A, const std::vector<Scalar>& b) {
    const Int& n = ring.modulus();
    IntSnf2 s;
    s.run(to_imat(ring, A), true, true);
    std::vector<Int> c(A.rows());
    for (std::size_t i = 0; i < A.rows(); ++i) {
        Int acc = 0;
        for (std::size_t j = 0; j < A.rows(); ++j)
            if (s.U.at(i, j) != 0) acc += s.U.at(i, j) * b[j].num;
        c[i] = acc % n;
        if (c[i] < 0) c[i] += n;
    }
    std::vector<Int> y(A.cols());
    for (std::size_t i = 0; i < A.rows(); ++i) {
        Int rhs = (i < c.size()) ? c[i] : Int(0);
        Int d = (i < s.rank) ? s.A.at(i, i) : Int(0);
        if (i >= A.cols()) {
            /* no unknown: need rhs == 0 mod n */
            if (rhs % n != 0) return std::nullopt;
            continue;
        }
        /* solve d * y_i = rhs (mod n) */
        Xgcd e = xgcd(d % n, n);
        if (rhs % e.g != 0) return std::nullopt;
        Int nn = n / e.g;
        Int yi = ((rhs / e.g) % nn) * (e.x % nn) % nn;
        if (yi < 0) yi += nn;
        y[i] = yi;
    }
    std::vector<Scalar> x(A.cols());
    for (std::size_t i = 0; i < A.cols(); ++i) {
        Int acc = 0;
        for (std::size_t j = 0; j < A.cols(); ++j)
            if (s.V.at(i, j) != 0) acc += s.V.at(i, j) * y[j];
        x[i] = canon(ring, acc);
    }
    return x;
}

std::vector<std::vector<Scalar>> kernel_integers(const Ring& ring, const Mat& A) {
    IntSnf2 s;
    s.run(to_imat(ring, A), false, true);
    std::vector<std::vector<Scalar>> out;
    for (std::size_t c = s.rank; c < A.cols(); ++c) {
        std::vector<Scalar> v(A.cols());
        for (std::size_t r = 0; r < A.cols(); ++r) v[r] = canon(ring, s.V.at(r, c));
        out.push_back(std::move(v));
    }
    return out;
}

std::vector<std::vector<Scalar>> kernel_mod(const Ring& ring, const Mat& A) {
    const Int& n = ring.modulus();
    IntSnf2 s;
    s.run(to_imat(ring, A), false, true);
    std::vector<std::vector<Scalar>> out;
    for (std::size_t c = 0; c < A.cols(); ++c) {
        Int g = (c < s.rank) ? n / gcd(s.A.at(c, c), n) : Int(1);
        if (g % n == 0) continue;
        std::vector<Scalar> v(A.cols());
        bool nonzero = false;
        for (std::size_t r = 0; r < A.cols(); ++r) {
            v[r] = canon(ring, s.V.at(r, c) * g);
            nonzero = nonzero || !is_zero(v[r]);
        }
        if (nonzero) out.push_back(std::move(v));
    }
    return out;
}

struct PrimePowerEarly {
    long long p = 0;
    int e = 0;
};

std::optional<PrimePowerEarly> as_prime_power_early(const Int& n) {
    if (n > Int(1'000'000'000)) return std::nullopt;
    long long nn = n.convert_to<long long>();
    for (long long p = 2; p * p <= nn; ++p) {
        if (nn % p == 0) {
            int e = 0;
            long long m = nn;
            while (m % p == 0) {
                m /= p;
                ++e;
            }
            if (m != 1) return std::nullopt;
            return PrimePowerEarly{p, e};
        }
    }
    return PrimePowerEarly{nn, 1};
}

long long mod_pos_early(long long x, long long q) {
    x %= q;
    return x < 0 ? x + q : x;
}

long long mod_inv_early(long long a, long long q) {
    long long old_r = a, r = q, old_s = 1, s = 0;
    while (r != 0) {
        long long quot = old_r / r;
        long long tmp = old_r - quot * r;
        old_r = r;
        r = tmp;
        tmp = old_s - quot * s;
        old_s = s;
        s = tmp;
    }
    return mod_pos_early(old_s, q);
}

int valuation_early(long long x, long long p, int e) {
    if (x == 0) return e;
    int v = 0;
    while (x % p == 0 && v < e) {
        x /= p;
        ++v;
    }
    return v;
}

/* dense int64 solve of A x = b over Z/p^e */
std::optional<std::vector<Scalar>> solve_mod_prime_power(const Ring& ring, const Mat& A,
                                                         const std::vector<Scalar>& b, long long p, int e) {
    long long q = 1;
    for (int i = 0; i < e; ++i) q *= p;
    const long rows = static_cast<long>(A.rows()), cols = static_cast<long>(A.cols());
    std::vector<long long> a(static_cast<std::size_t>(rows) * cols);
    for (long r = 0; r < rows; ++r)
        for (long c2 = 0; c2 < cols; ++c2)
            a[static_cast<std::size_t>(r) * cols + c2] =
                mod_pos_early(A.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c2)).num.convert_to<long long>(), q);
    std::vector<long long> rhs(rows);
    for (long r = 0; r < rows; ++r) rhs[static_cast<std::size_t>(r)] = mod_pos_early(b[static_cast<std::size_t>(r)].num.convert_to<long long>(), q);
    /* V tracks column ops so x = V y */
    std::vector<long long> V(static_cast<std::size_t>(cols) * cols, 0);
    for (long i = 0; i < cols; ++i) V[static_cast<std::size_t>(i) * cols + i] = 1;
    auto at = [&](long r, long c2) -> long long& { return a[static_cast<std::size_t>(r) * cols + c2]; };
    auto vat = [&](long r, long c2) -> long long& { return V[static_cast<std::size_t>(r) * cols + c2]; };

    const long n = std::min(rows, cols);
    std::vector<int> vals(static_cast<std::size_t>(n), e);
    long t = 0;
    for (; t < n; ++t) {
        int best_v = e + 1;
        long pr = -1, pc = -1;
        for (long r = t; r < rows && best_v > 0; ++r)
            for (long c2 = t; c2 < cols; ++c2) {
                long long x = at(r, c2);
                if (x == 0) continue;
                int v = valuation_early(x, p, e);
                if (v < best_v) {
                    best_v = v;
                    pr = r;
                    pc = c2;
                    if (v == 0) break;
                }
            }
        if (pr < 0) break;
        vals[static_cast<std::size_t>(t)] = best_v;
        if (pr != t) {
            for (long c2 = 0; c2 < cols; ++c2) std::swap(at(t, c2), at(pr, c2));
            std::swap(rhs[static_cast<std::size_t>(t)], rhs[static_cast<std::size_t>(pr)]);
        }
        if (pc != t)
            for (long r = 0; r < rows; ++r) std::swap(at(r, t), at(r, pc));
        if (pc != t)
            for (long r = 0; r < cols; ++r) std::swap(vat(r, t), vat(r, pc));
        long long pv = 1;
        for (int i = 0; i < best_v; ++i) pv *= p;
        long long unit = at(t, t) / pv;
        long long uinv = mod_inv_early(mod_pos_early(unit, q), q);
        if (uinv != 1) {
            for (long r = 0; r < rows; ++r) at(r, t) = mod_pos_early(static_cast<long long>((__int128)at(r, t) * uinv % q), q);
            for (long r = 0; r < cols; ++r) vat(r, t) = mod_pos_early(static_cast<long long>((__int128)vat(r, t) * uinv % q), q);
        }
        for (long r = t + 1; r < rows; ++r) {
            long long x = at(r, t);
            if (x == 0) continue;
            long long f = mod_pos_early(x / pv, q);
            for (long c2 = t; c2 < cols; ++c2)
                at(r, c2) = mod_pos_early(at(r, c2) - static_cast<long long>((__int128)f * at(t, c2) % q), q);
            rhs[static_cast<std::size_t>(r)] =
                mod_pos_early(rhs[static_cast<std::size_t>(r)] - static_cast<long long>((__int128)f * rhs[static_cast<std::size_t>(t)] % q), q);
        }
        for (long c2 = t + 1; c2 < cols; ++c2) {
            long long x = at(t, c2);
            if (x == 0) continue;
            long long f = mod_pos_early(x / pv, q);
            for (long r = t; r < rows; ++r)
                at(r, c2) = mod_pos_early(at(r, c2) - static_cast<long long>((__int128)f * at(r, t) % q), q);
            for (long r = 0; r < cols; ++r)
                vat(r, c2) = mod_pos_early(vat(r, c2) - static_cast<long long>((__int128)f * vat(r, t) % q), q);
        }
    }
    /* back-substitute on the diagonal form */
    std::vector<long long> y(cols, 0);
    for (long i = 0; i < rows; ++i) {
        long long r = rhs[static_cast<std::size_t>(i)];
        if (i < n && i < t) {
            long long pv = 1;
            for (int k = 0; k < vals[static_cast<std::size_t>(i)]; ++k) pv *= p;
            if (r % pv != 0) return std::nullopt;
            y[static_cast<std::size_t>(i)] = r / pv;
        } else if (r % q != 0) {
            return std::nullopt;
        }
    }
    std::vector<Scalar> x(static_cast<std::size_t>(cols));
    for (long i = 0; i < cols; ++i) {
        __int128 acc = 0;
        for (long j = 0; j < cols; ++j) acc += (__int128)vat(i, j) * y[static_cast<std::size_t>(j)];
        x[static_cast<std::size_t>(i)] = canon(ring, Int(static_cast<long long>(((acc % q) + q) % q)));
    }
    return x;
}

}  // namespace

std::optional<std::vector<Scalar>> ring_solve(const Ring& ring, const Mat& A, const std::vector<Scalar>& b) {
    if (A.rows() != b.size()) throw DimensionMismatch("ring_solve: rhs size disagrees with matrix");
    if (A.cols() == 0) {
        for (const auto& x : b)
            if (!is_zero(x)) return std::nullopt;
        return std::vector<Scalar>{};
    }
    switch (ring.kind()) {
        case RingKind::rationals:
        case RingKind::prime_field: {
            FieldGauss fg(ring, A);
            return fg.solve(b);
        }
        case RingKind::integers: return solve_integers(ring, A, b);
        case RingKind::integers_mod: {
            if (auto pp = as_prime_power_early(ring.modulus()))
                return solve_mod_prime_power(ring, A, b, pp->p, pp->e);
            return solve_mod(ring, A, b);
        }
    }
    return std::nullopt;
}

std::vector<std::vector<Scalar>> ring_kernel(const Ring& ring, const Mat& A) {
    if (A.cols() == 0) return {};
    switch (ring.kind()) {
        case RingKind::rationals:
        case RingKind::prime_field: {
            FieldGauss fg(ring, A);
            return fg.kernel();
        }
        case RingKind::integers: return kernel_integers(ring, A);
        case RingKind::integers_mod: return kernel_mod(ring, A);
    }
    return {};
}

SmithForm smith_normal_form(const Ring& ring, const Mat& A) {
    IntSnf2 s;
    s.run(to_imat(ring, A), true, true);
    SmithForm out;
    out.U = from_imat(ring, s.U);
    out.D = from_imat(ring, s.A);
    out.V = from_imat(ring, s.V);
    out.rank = s.rank;
    return out;
}

std::string ModuleInvariants::str() const {
    std::string s;
    if (free_rank > 0) {
        s += "free^" + std::to_string(free_rank);
    }
    for (const auto& t : torsion) {
        if (!s.empty()) s += " + ";
        s += "Z/" + t.str();
    }
    if (s.empty()) s = "0";
    return s;
}

namespace {

void check_complex(const Ring& ring, const Mat& d_in, const Mat& d_out) {
    if (d_in.rows() != d_out.cols()) throw DimensionMismatch("cell_homology: ambient dimensions disagree");
    if (!mat_mul(ring, d_out, d_in).is_zero()) throw NotAComplex("d_out * d_in != 0");
}

CellHomology cell_field(const Ring& ring, const Mat& d_in, const Mat& d_out) {
    const std::size_t m = d_in.rows();
    FieldGauss out_g(ring, d_out);
    auto kvecs = out_g.kernel();
    const std::size_t k = kvecs.size();
    Mat K(m, k);
    for (std::size_t c = 0; c < k; ++c) K.set_col(c, kvecs[c]);

    /* coordinates of the image inside the kernel */
    FieldGauss ksolve(ring, K);
    Mat C(k, d_in.cols());
    for (std::size_t j = 0; j < d_in.cols(); ++j) {
        auto sol = ksolve.solve(d_in.col(j));
        if (!sol) throw NotAComplex("image not contained in kernel");
        C.set_col(j, *sol);
    }

    FieldSpan im_span(ring, k);
    std::vector<std::size_t> im_cols;
    for (std::size_t j = 0; j < C.cols(); ++j)
        if (im_span.add(C.col(j))) im_cols.push_back(j);
    const std::size_t rho = im_cols.size();

    FieldSpan pick(ring, k);
    for (std::size_t j : im_cols) pick.add(C.col(j));
    std::vector<std::size_t> sec_idx;
    for (std::size_t i = 0; i < k; ++i) {
        std::vector<Scalar> e(k);
        e[i] = from_int(ring, 1);
        if (pick.add(std::move(e))) sec_idx.push_back(i);
    }

    CellHomology H;
    H.rank = static_cast<long>(k - rho);
    H.section = Mat(m, H.rank);
    for (std::size_t j = 0; j < sec_idx.size(); ++j) H.section.set_col(j, K.col(sec_idx[j]));

    /* ambient basis [image | section | extension]; projection reads off the
     * middle block of the inverse */
    Mat M(m, m);
    std::size_t at = 0;
    for (std::size_t j : im_cols) M.set_col(at++, mat_apply(ring, K, C.col(j)));
    for (std::size_t j = 0; j < sec_idx.size(); ++j) M.set_col(at++, H.section.col(j));
    FieldSpan amb(ring, m);
    for (std::size_t c = 0; c < k; ++c) amb.add(K.col(c));
    for (std::size_t i = 0; i < m && at < m; ++i) {
        std::vector<Scalar> e(m);
        e[i] = from_int(ring, 1);
        if (amb.add(e)) M.set_col(at++, e);
    }
    if (at != m) throw DainfError("cell_field: basis completion failed");
    FieldGauss minv(ring, M);
    Mat P(static_cast<std::size_t>(H.rank), m);
    for (std::size_t col = 0; col < m; ++col) {
        std::vector<Scalar> e(m);
        e[col] = from_int(ring, 1);
        auto coords = minv.solve(e);
        if (!coords) throw DainfError("cell_field: singular basis matrix");
        for (std::size_t r = 0; r < static_cast<std::size_t>(H.rank); ++r) P.at(r, col) = (*coords)[rho + r];
    }
    H.projection = std::move(P);
    return H;
}

CellHomology cell_integers(const Ring& ring, const Mat& d_in, const Mat& d_out) {
    const std::size_t m = d_in.rows();
    IntSnf2 sout;
    sout.run(to_imat(ring, d_out), false, true);
    const std::size_t k = m - sout.rank;
    IMat K(m, k);
    for (std::size_t c = 0; c < k; ++c)
        for (std::size_t r = 0; r < m; ++r) K.at(r, c) = sout.V.at(r, sout.rank + c);

    LatticeSolver ksolve(K);
    IMat C(k, d_in.cols());
    IMat din = to_imat(ring, d_in);
    for (std::size_t j = 0; j < d_in.cols(); ++j) {
        std::vector<Int> b(m);
        for (std::size_t r = 0; r < m; ++r) b[r] = din.at(r, j);
        auto sol = ksolve.solve(b);
        if (!sol) throw NotAComplex("image not contained in kernel (over Z)");
        for (std::size_t r = 0; r < k; ++r) C.at(r, j) = (*sol)[r];
    }

    IntSnf2 sc;
    sc.run(C, true, false);
    std::vector<Int> bad;
    for (std::size_t i = 0; i < sc.rank; ++i)
        if (sc.A.at(i, i) != 1) bad.push_back(sc.A.at(i, i));
    if (!bad.empty()) throw FreenessFailure("homology has torsion over Z", bad);
    const std::size_t rho = sc.rank;

    /* new kernel basis adapted to the image */
    IMat Kp = imat_mul(K, sc.Uinv);
    CellHomology H;
    H.rank = static_cast<long>(k - rho);
    H.section = Mat(m, H.rank);
    for (long j = 0; j < H.rank; ++j)
        for (std::size_t r = 0; r < m; ++r)
            H.section.at(r, static_cast<std::size_t>(j)) = canon(ring, Kp.at(r, rho + static_cast<std::size_t>(j)));

    /* complete the kernel to a basis of the ambient lattice */
    IntSnf2 skr;
    skr.run(K, true, false);
    for (std::size_t i = 0; i < skr.rank; ++i)
        if (abs_int(skr.A.at(i, i)) != 1)
            throw DainfError("internal: kernel of an integer matrix must be saturated");
    IMat M(m, m);
    for (std::size_t c = 0; c < k; ++c)
        for (std::size_t r = 0; r < m; ++r) M.at(r, c) = Kp.at(r, c);
    for (std::size_t c = k; c < m; ++c)
        for (std::size_t r = 0; r < m; ++r) M.at(r, c) = skr.Uinv.at(r, c);
    IntSnf2 sm;
    sm.run(M, true, true);
    for (std::size_t i = 0; i < m; ++i)
        if (abs_int(sm.A.at(i, i)) != 1) throw DainfError("internal: adapted basis is not unimodular");
    /* M^{-1} = V * D^{-1} * U with unit diagonal D */
    IMat Minv(m, m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            Int acc = 0;
            for (std::size_t l = 0; l < m; ++l) {
                Int d = sm.A.at(l, l);
                acc += sm.V.at(i, l) * d * sm.U.at(l, j); /* d = ±1 */
            }
            Minv.at(i, j) = acc;
        }
    H.projection = Mat(static_cast<std::size_t>(H.rank), m);
    for (long r = 0; r < H.rank; ++r)
        for (std::size_t c = 0; c < m; ++c)
            H.projection.at(static_cast<std::size_t>(r), c) = canon(ring, Minv.at(rho + static_cast<std::size_t>(r), c));
    return H;
}

CellHomology cell_mod(const Ring& ring, const Mat& d_in, const Mat& d_out) {
    const Int& n = ring.modulus();
    const std::size_t m = d_in.rows();
    IntSnf2 sout;
    sout.run(to_imat(ring, d_out), false, true);
    /* kernel lattice basis K = V * diag(g_i), full rank m */
    IMat K(m, m);
    for (std::size_t c = 0; c < m; ++c) {
        Int g = (c < sout.rank) ? n / gcd(sout.A.at(c, c), n) : Int(1);
        for (std::size_t r = 0; r < m; ++r) K.at(r, c) = sout.V.at(r, c) * g;
    }
    LatticeSolver ksolve(K);
    const std::size_t ncols = d_in.cols() + m;
    IMat C(m, ncols);
    IMat din = to_imat(ring, d_in);
    for (std::size_t j = 0; j < ncols; ++j) {
        std::vector<Int> b(m);
        if (j < d_in.cols())
            for (std::size_t r = 0; r < m; ++r) b[r] = din.at(r, j);
        else
            b[j - d_in.cols()] = n;
        auto sol = ksolve.solve(b);
        if (!sol) throw NotAComplex("image not contained in kernel (mod n)");
        for (std::size_t r = 0; r < m; ++r) C.at(r, j) = (*sol)[r];
    }
    IntSnf2 sc;
    sc.run(C, true, false);
    std::vector<Int> bad;
    std::vector<std::size_t> h_idx;
    for (std::size_t i = 0; i < m; ++i) {
        Int d = (i < sc.rank) ? sc.A.at(i, i) : Int(0);
        if (d == 0) throw DainfError("internal: mod-n relation matrix must have full rank");
        if (d == n)
            h_idx.push_back(i);
        else if (d != 1)
            bad.push_back(d);
    }
    if (!bad.empty()) throw FreenessFailure("homology is not free over " + ring.name(), bad);

    IMat Kp = imat_mul(K, sc.Uinv);
    CellHomology H;
    H.rank = static_cast<long>(h_idx.size());
    H.section = Mat(m, H.rank);
    for (std::size_t j = 0; j < h_idx.size(); ++j)
        for (std::size_t r = 0; r < m; ++r) H.section.at(r, j) = canon(ring, Kp.at(r, h_idx[j]));

    /* projection: solve P * K' = selector over Z/n (transpose system) */
    Mat KpT(m, m);
    for (std::size_t r = 0; r < m; ++r)
        for (std::size_t c = 0; c < m; ++c) KpT.at(r, c) = canon(ring, Kp.at(c, r));
    H.projection = Mat(static_cast<std::size_t>(H.rank), m);
    for (std::size_t j = 0; j < h_idx.size(); ++j) {
        std::vector<Scalar> rhs(m);
        rhs[h_idx[j]] = from_int(ring, 1);
        auto sol = ring_solve(ring, KpT, rhs);
        if (!sol) throw DainfError("internal: mod-n projection system unsolvable");
        for (std::size_t c = 0; c < m; ++c) H.projection.at(j, c) = (*sol)[c];
    }
    return H;
}

}  // namespace

CellHomology cell_homology(const Ring& ring, const Mat& d_in, const Mat& d_out) {
    check_complex(ring, d_in, d_out);
    switch (ring.kind()) {
        case RingKind::rationals: return cell_field(ring, d_in, d_out);
        case RingKind::prime_field: return cell_field(ring, d_in, d_out);
        case RingKind::integers: return cell_integers(ring, d_in, d_out);
        case RingKind::integers_mod: return cell_mod(ring, d_in, d_out);
    }
    throw DainfError("unreachable");
}

ModuleInvariants homology_invariants(const Ring& ring, const Mat& d_in, const Mat& d_out) {
    check_complex(ring, d_in, d_out);
    ModuleInvariants inv;
    switch (ring.kind()) {
        case RingKind::rationals:
        case RingKind::prime_field: {
            FieldGauss og(ring, d_out);
            FieldGauss ig(ring, d_in);
            inv.free_rank = static_cast<long>(d_in.rows() - og.rank() - ig.rank());
            return inv;
        }
        case RingKind::integers: {
            const std::size_t m = d_in.rows();
            IntSnf2 sout;
            sout.run(to_imat(ring, d_out), false, true);
            const std::size_t k = m - sout.rank;
            IMat K(m, k);
            for (std::size_t c = 0; c < k; ++c)
                for (std::size_t r = 0; r < m; ++r) K.at(r, c) = sout.V.at(r, sout.rank + c);
            LatticeSolver ksolve(K);
            IMat C(k, d_in.cols());
            IMat din = to_imat(ring, d_in);
            for (std::size_t j = 0; j < d_in.cols(); ++j) {
                std::vector<Int> b(m);
                for (std::size_t r = 0; r < m; ++r) b[r] = din.at(r, j);
                auto sol = ksolve.solve(b);
                if (!sol) throw NotAComplex("image not contained in kernel (over Z)");
                for (std::size_t r = 0; r < k; ++r) C.at(r, j) = (*sol)[r];
            }
            IntSnf2 sc;
            sc.run(C, false, false);
            inv.free_rank = static_cast<long>(k - sc.rank);
            for (std::size_t i = 0; i < sc.rank; ++i)
                if (sc.A.at(i, i) != 1) inv.torsion.push_back(sc.A.at(i, i));
            return inv;
        }
        case RingKind::integers_mod: {
            const Int& n = ring.modulus();
            const std::size_t m = d_in.rows();
            IntSnf2 sout;
            sout.run(to_imat(ring, d_out), false, true);
            IMat K(m, m);
            for (std::size_t c = 0; c < m; ++c) {
                Int g = (c < sout.rank) ? n / gcd(sout.A.at(c, c), n) : Int(1);
                for (std::size_t r = 0; r < m; ++r) K.at(r, c) = sout.V.at(r, c) * g;
            }
            LatticeSolver ksolve(K);
            const std::size_t ncols = d_in.cols() + m;
            IMat C(m, ncols);
            IMat din = to_imat(ring, d_in);
            for (std::size_t j = 0; j < ncols; ++j) {
                std::vector<Int> b(m);
                if (j < d_in.cols())
                    for (std::size_t r = 0; r < m; ++r) b[r] = din.at(r, j);
                else
                    b[j - d_in.cols()] = n;
                auto sol = ksolve.solve(b);
                if (!sol) throw NotAComplex("image not contained in kernel (mod n)");
                for (std::size_t r = 0; r < m; ++r) C.at(r, j) = (*sol)[r];
            }
            IntSnf2 sc;
            sc.run(C, false, false);
            for (std::size_t i = 0; i < m; ++i) {
                Int d = (i < sc.rank) ? sc.A.at(i, i) : Int(0);
                Int g = gcd(d, n);
                if (g == n)
                    inv.free_rank += 1;
                else if (g != 1)
                    inv.torsion.push_back(g);
            }
            std::sort(inv.torsion.begin(), inv.torsion.end());
            return inv;
        }
    }
    throw DainfError("unreachable");
}

ModuleInvariants subquotient_invariants(const Ring& ring, const Mat& zgens, const Mat& bgens) {
    if (zgens.rows() != bgens.rows()) throw DimensionMismatch("subquotient_invariants: ambient dims disagree");
    const std::size_t m = zgens.rows();
    ModuleInvariants inv;
    switch (ring.kind()) {
        case RingKind::rationals:
        case RingKind::prime_field: {
            FieldGauss zg(ring, zgens);
            FieldGauss bg(ring, bgens);
            inv.free_rank = static_cast<long>(zg.rank()) - static_cast<long>(bg.rank());
            if (inv.free_rank < 0) throw NotAComplex("subquotient: boundaries exceed cycles");
            return inv;
        }
        case RingKind::integers: {
            IntSnf2 sz;
            sz.run(to_imat(ring, zgens), true, false);
            const std::size_t r = sz.rank;
            /* basis of the span: K = Uinv * D restricted to the rank block */
            IMat K(m, r);
            for (std::size_t c = 0; c < r; ++c)
                for (std::size_t row = 0; row < m; ++row) K.at(row, c) = sz.Uinv.at(row, c) * sz.A.at(c, c);
            if (r == 0) {
                if (!bgens.empty() && !bgens.is_zero()) throw NotAComplex("subquotient: boundaries outside cycles");
                return inv;
            }
            LatticeSolver ksolve(K);
            IMat C(r, bgens.cols());
            IMat bl = to_imat(ring, bgens);
            for (std::size_t j = 0; j < bgens.cols(); ++j) {
                std::vector<Int> b(m);
                for (std::size_t row = 0; row < m; ++row) b[row] = bl.at(row, j);
                auto sol = ksolve.solve(b);
                if (!sol) throw NotAComplex("subquotient: boundaries outside cycles (Z)");
                for (std::size_t row = 0; row < r; ++row) C.at(row, j) = (*sol)[row];
            }
            IntSnf2 sc;
            sc.run(C, false, false);
            inv.free_rank = static_cast<long>(r - sc.rank);
            for (std::size_t i = 0; i < sc.rank; ++i)
                if (sc.A.at(i, i) != 1) inv.torsion.push_back(sc.A.at(i, i));
            return inv;
        }
        case RingKind::integers_mod: {
            const Int& n = ring.modulus();
            /* lattice spanned by the cycle lifts together with n Z^m */
            IMat zl(m, zgens.cols() + m);
            IMat zin = to_imat(ring, zgens);
            for (std::size_t j = 0; j < zgens.cols(); ++j)
                for (std::size_t row = 0; row < m; ++row) zl.at(row, j) = zin.at(row, j);
            for (std::size_t row = 0; row < m; ++row) zl.at(row, zgens.cols() + row) = n;
            IntSnf2 sz;
            sz.run(zl, true, false);
            IMat K(m, m);
            for (std::size_t c = 0; c < m; ++c)
                for (std::size_t row = 0; row < m; ++row) K.at(row, c) = sz.Uinv.at(row, c) * sz.A.at(c, c);
            LatticeSolver ksolve(K);
            IMat C(m, bgens.cols() + m);
            IMat bl = to_imat(ring, bgens);
            for (std::size_t j = 0; j < bgens.cols() + m; ++j) {
                std::vector<Int> b(m);
                if (j < bgens.cols())
                    for (std::size_t row = 0; row < m; ++row) b[row] = bl.at(row, j);
                else
                    b[j - bgens.cols()] = n;
                auto sol = ksolve.solve(b);
                if (!sol) throw NotAComplex("subquotient: boundaries outside cycles (mod n)");
                for (std::size_t row = 0; row < m; ++row) C.at(row, j) = (*sol)[row];
            }
            IntSnf2 sc;
            sc.run(C, false, false);
            for (std::size_t i = 0; i < m; ++i) {
                Int d = (i < sc.rank) ? sc.A.at(i, i) : Int(0);
                Int g = gcd(d, n);
                if (g == n)
                    inv.free_rank += 1;
                else if (g != 1)
                    inv.torsion.push_back(g);
            }
            std::sort(inv.torsion.begin(), inv.torsion.end());
            return inv;
        }
    }
    throw DainfError("unreachable");
}

/* ---------- int64 fast path for prime-power moduli ---------- */

namespace {

struct PrimePower {
    long long p = 0;
    int e = 0;
};

std::optional<PrimePower> as_prime_power(const Int& n) {
    if (n > Int(1'000'000'000)) return std::nullopt;
    long long nn = n.convert_to<long long>();
    for (long long p = 2; p * p <= nn; ++p) {
        if (nn % p == 0) {
            int e = 0;
            long long m = nn;
            while (m % p == 0) {
                m /= p;
                ++e;
            }
            if (m != 1) return std::nullopt;
            return PrimePower{p, e};
        }
    }
    return PrimePower{nn, 1};
}

long long mod_pos(long long x, long long q) {
    x %= q;
    return x < 0 ? x + q : x;
}

long long mod_inv64(long long a, long long q) {
    long long old_r = a, r = q, old_s = 1, s = 0;
    while (r != 0) {
        long long quot = old_r / r;
        long long tmp = old_r - quot * r;
        old_r = r;
        r = tmp;
        tmp = old_s - quot * s;
        old_s = s;
        s = tmp;
    }
    return mod_pos(old_s, q);
}

int valuation(long long x, long long p, int e) {
    if (x == 0) return e;
    int v = 0;
    while (x % p == 0 && v < e) {
        x /= p;
        ++v;
    }
    return v;
}

/* Dense diagonalization of a matrix over Z/p^e: returns the valuation of each
 * diagonal entry (length min(rows,cols), trailing entries e for zero block).
 * If vinv != nullptr it receives the inverse column transform (cols x cols):
 * input = (row ops) * D * Vinv-ish; concretely ker(input) = V * ker(D) and
 * coordinates in the V basis are Vinv * x. */
struct DenseMod {
    long rows, cols;
    long long q, p;
    int e;
    std::vector<long long> a;
    long long& at(long r, long c) { return a[static_cast<std::size_t>(r) * cols + c]; }

    std::vector<int> diagonalize(std::vector<long long>* vinv) {
        std::vector<long long>& VI = *([&]() {
            static thread_local std::vector<long long> dummy;
            return vinv ? vinv : &dummy;
        }());
        if (vinv) {
            VI.assign(static_cast<std::size_t>(cols) * cols, 0);
            for (long i = 0; i < cols; ++i) VI[static_cast<std::size_t>(i) * cols + i] = 1;
        }
        auto vi_at = [&](long r, long c) -> long long& { return VI[static_cast<std::size_t>(r) * cols + c]; };

        const long n = std::min(rows, cols);
        std::vector<int> vals(static_cast<std::size_t>(n), e);
        for (long t = 0; t < n; ++t) {
            int best_v = e + 1;
            long pr = -1, pc = -1;
            for (long r = t; r < rows && best_v > 0; ++r)
                for (long c = t; c < cols; ++c) {
                    long long x = at(r, c);
                    if (x == 0) continue;
                    int v = valuation(x, p, e);
                    if (v < best_v) {
                        best_v = v;
                        pr = r;
                        pc = c;
                        if (v == 0) break;
                    }
                }
            if (pr < 0) break;
            vals[static_cast<std::size_t>(t)] = best_v;
            if (pr != t)
                for (long c = 0; c < cols; ++c) std::swap(at(t, c), at(pr, c));
            if (pc != t) {
                for (long r = 0; r < rows; ++r) std::swap(at(r, t), at(r, pc));
                if (vinv)
                    for (long c = 0; c < cols; ++c) std::swap(vi_at(t, c), vi_at(pc, c));
            }
            /* normalize pivot to p^v: multiply column by the unit inverse */
            long long pv = 1;
            for (int i = 0; i < best_v; ++i) pv *= p;
            long long unit = at(t, t) / pv;
            long long uinv = mod_inv64(mod_pos(unit, q), q);
            if (uinv != 1) {
                for (long r = 0; r < rows; ++r) at(r, t) = mod_pos(static_cast<long long>((__int128)at(r, t) * uinv), q);
                if (vinv)
                    for (long c = 0; c < cols; ++c) vi_at(t, c) = mod_pos(static_cast<long long>((__int128)vi_at(t, c) * unit), q);
            }
            /* clear row and column; all entries have valuation >= best_v */
            for (long r = t + 1; r < rows; ++r) {
                long long x = at(r, t);
                if (x == 0) continue;
                long long f = mod_pos(x / pv, q);
                for (long c = t; c < cols; ++c)
                    at(r, c) = mod_pos(at(r, c) - static_cast<long long>((__int128)f * at(t, c) % q), q);
            }
            for (long c = t + 1; c < cols; ++c) {
                long long x = at(t, c);
                if (x == 0) continue;
                long long f = mod_pos(x / pv, q);
                for (long r = t; r < rows; ++r)
                    at(r, c) = mod_pos(at(r, c) - static_cast<long long>((__int128)f * at(r, t) % q), q);
                if (vinv)
                    for (long cc = 0; cc < cols; ++cc)
                        vi_at(t, cc) = mod_pos(vi_at(t, cc) + static_cast<long long>((__int128)f * vi_at(c, cc) % q), q);
            }
        }
        return vals;
    }
};

}  // namespace

ModuleInvariants homology_invariants_sparse(const Ring& ring, const SparseIntMat& d_in, const SparseIntMat& d_out) {
    if (d_in.rows != d_out.cols) throw DimensionMismatch("homology_invariants_sparse: ambient dimensions disagree");
    const long m = d_in.rows;
    if (ring.kind() == RingKind::integers || ring.kind() == RingKind::rationals) {
        Mat din(static_cast<std::size_t>(m), static_cast<std::size_t>(d_in.cols));
        for (long c = 0; c < d_in.cols; ++c)
            for (auto& [r, v] : d_in.col_entries[static_cast<std::size_t>(c)])
                din.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = canon(ring, Int(v));
        Mat dout(static_cast<std::size_t>(d_out.rows), static_cast<std::size_t>(m));
        for (long c = 0; c < m; ++c)
            for (auto& [r, v] : d_out.col_entries[static_cast<std::size_t>(c)])
                dout.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = canon(ring, Int(v));
        return homology_invariants(ring, din, dout);
    }
    auto pp = as_prime_power(ring.modulus());
    if (!pp) {
        /* general composite: fall back to the exact path */
        Mat din(static_cast<std::size_t>(m), static_cast<std::size_t>(d_in.cols));
        for (long c = 0; c < d_in.cols; ++c)
            for (auto& [r, v] : d_in.col_entries[static_cast<std::size_t>(c)])
                din.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = canon(ring, Int(v));
        Mat dout(static_cast<std::size_t>(d_out.rows), static_cast<std::size_t>(m));
        for (long c = 0; c < m; ++c)
            for (auto& [r, v] : d_out.col_entries[static_cast<std::size_t>(c)])
                dout.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = canon(ring, Int(v));
        return homology_invariants(ring, din, dout);
    }
    const long long p = pp->p;
    const int e = pp->e;
    long long q = 1;
    for (int i = 0; i < e; ++i) q *= p;

    /* B = d_out dense mod q, track inverse column transform */
    DenseMod B;
    B.rows = d_out.rows;
    B.cols = m;
    B.q = q;
    B.p = p;
    B.e = e;
    B.a.assign(static_cast<std::size_t>(B.rows) * B.cols, 0);
    for (long c = 0; c < m; ++c)
        for (auto& [r, v] : d_out.col_entries[static_cast<std::size_t>(c)]) B.at(r, c) = mod_pos(v, q);
    std::vector<long long> vinv;
    std::vector<int> bvals_partial = B.diagonalize(&vinv);
    std::vector<int> bvals(static_cast<std::size_t>(m), e);
    for (std::size_t i = 0; i < bvals_partial.size(); ++i) bvals[i] = bvals_partial[i];

    /* kernel generators E_i = p^{e-b_i} V[:,i] with annihilator p^{b_i};
     * express the d_in columns in the V coordinates and divide. */
    DenseMod R;
    R.rows = m;
    R.cols = m + d_in.cols;
    R.q = q;
    R.p = p;
    R.e = e;
    R.a.assign(static_cast<std::size_t>(R.rows) * R.cols, 0);
    for (long i = 0; i < m; ++i) {
        long long pb = 1;
        for (int t = 0; t < bvals[static_cast<std::size_t>(i)]; ++t) pb *= p;
        R.at(i, i) = mod_pos(pb, q);
    }
    for (long j = 0; j < d_in.cols; ++j) {
        /* y = Vinv * a */
        for (long i = 0; i < m; ++i) {
            __int128 acc = 0;
            for (auto& [r, v] : d_in.col_entries[static_cast<std::size_t>(j)])
                acc += (__int128)vinv[static_cast<std::size_t>(i) * m + r] * mod_pos(v, q);
            long long y = mod_pos(static_cast<long long>(acc % q), q);
            int b = bvals[static_cast<std::size_t>(i)];
            long long div = 1;
            for (int t = 0; t < e - b; ++t) div *= p;
            if (y % div != 0) throw NotAComplex("image not contained in kernel (mod p^e)");
            R.at(i, m + j) = y / div;
        }
    }
    std::vector<int> cvals = R.diagonalize(nullptr);
    ModuleInvariants inv;
    std::vector<int> all(static_cast<std::size_t>(m), e);
    for (std::size_t i = 0; i < cvals.size(); ++i) all[i] = cvals[i];
    for (long i = 0; i < m; ++i) {
        int c = all[static_cast<std::size_t>(i)];
        if (c >= e)
            inv.free_rank += 1;
        else if (c > 0) {
            Int t = 1;
            for (int x = 0; x < c; ++x) t *= p;
            inv.torsion.push_back(t);
        }
    }
    std::sort(inv.torsion.begin(), inv.torsion.end());
    return inv;
}

}  // namespace dainf
