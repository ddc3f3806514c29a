#pragma once

#include "dainf/matrix.hpp"

#include <optional>
#include <vector>

namespace dainf {

class NotAComplex : public DainfError {
  public:
    explicit NotAComplex(const std::string& what) : DainfError(what) {}
};

class FreenessFailure : public DainfError {
  public:
    FreenessFailure(const std::string& what, std::vector<Int> divisors)
        : DainfError(what), divisors(std::move(divisors)) {}
    std::vector<Int> divisors;
};

/* Deterministic exact solve: the first solution under the fixed normal-form
 * pivot order, or nullopt when A x = b has no solution. */
std::optional<std::vector<Scalar>> ring_solve(const Ring& ring, const Mat& A, const std::vector<Scalar>& b);

/* Generating set of { x : A x = 0 }: a basis over fields and Z, a canonical
 * generating set over Z/n. */
std::vector<std::vector<Scalar>> ring_kernel(const Ring& ring, const Mat& A);

/* U * A * V = D with U, V unimodular over Z and D diagonal, d_i | d_{i+1}. */
struct SmithForm {
    Mat U, D, V;
    std::size_t rank = 0;
};
SmithForm smith_normal_form(const Ring& ring, const Mat& A);

/* Isomorphism invariants of a finitely generated module: free rank plus the
 * nontrivial torsion divisors (each dividing the next). */
struct ModuleInvariants {
    long free_rank = 0;
    std::vector<Int> torsion;
    bool operator==(const ModuleInvariants& o) const {
        return free_rank == o.free_rank && torsion == o.torsion;
    }
    bool is_zero() const { return free_rank == 0 && torsion.empty(); }
    std::string str() const;
};

/* Homology at one spot of  . --d_in--> ambient --d_out--> .
 * d_in: ambient x n_in, d_out: n_out x ambient.  `section` embeds the chosen
 * H-basis into the ambient module (ambient x rank), `projection` retracts
 * (rank x ambient): projection*section = I, projection kills im d_in, section
 * lands in ker d_out.  Throws NotAComplex or FreenessFailure. */
struct CellHomology {
    long rank = 0;
    std::vector<Int> divisor_certificate;
    Mat section;
    Mat projection;
};
CellHomology cell_homology(const Ring& ring, const Mat& d_in, const Mat& d_out);

/* Invariants of ker(d_out)/im(d_in); freeness is not required. */
ModuleInvariants homology_invariants(const Ring& ring, const Mat& d_in, const Mat& d_out);

/* Invariants of span(zgens)/span(bgens) inside a free ambient module;
 * requires span(bgens) contained in span(zgens). */
ModuleInvariants subquotient_invariants(const Ring& ring, const Mat& zgens, const Mat& bgens);

/* Sparse column-major integer matrix for the large totalized homology solves.
 * Entries are lifts of ring elements (for modular rings, in [0, n)). */
struct SparseIntMat {
    long rows = 0, cols = 0;
    std::vector<std::vector<std::pair<long, long long>>> col_entries;  // per column: (row, value)
    void init(long r, long c) {
        rows = r;
        cols = c;
        col_entries.assign(static_cast<std::size_t>(c), {});
    }
    void add(long r, long c, long long v) {
        if (v != 0) col_entries[static_cast<std::size_t>(c)].push_back({r, v});
    }
};
ModuleInvariants homology_invariants_sparse(const Ring& ring, const SparseIntMat& d_in, const SparseIntMat& d_out);

}  // namespace dainf
