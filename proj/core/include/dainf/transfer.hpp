#pragma once

#include "dainf/algebra.hpp"

namespace dainf {

class NotBidga : public DainfError {
  public:
    explicit NotBidga(const std::string& what) : DainfError(what) {}
};
class NotE2Equivalence : public DainfError {
  public:
    explicit NotE2Equivalence(const std::string& what) : DainfError(what) {}
};
class UnitNotSplit : public DainfError {
  public:
    explicit UnitNotSplit(const std::string& what) : DainfError(what) {}
};
class MissingPrerequisite : public DainfError {
  public:
    explicit MissingPrerequisite(const std::string& what) : DainfError(what) {}
};

/* Non-canonical choices of the transfer induction, made deterministic and
 * overridable: cycle selections per homology cell (with fresh labels) and
 * lift choices per (l,n) and basis tuple. */
struct TransferHints {
    struct SectionEntry {
        std::string label;
        SparseVec cycle; /* in the B basis, a d_0 cycle */
    };
    std::map<Bidegree, std::vector<SectionEntry>> section;
    /* (l,n) -> tuple of E labels -> unsuspended f_{ln} value in B */
    std::map<std::pair<int, int>, std::map<std::vector<std::string>, SparseVec>> lifts;
    bool empty() const { return section.empty() && lifts.empty(); }
};

/* Certified input for the transfer: a bidga resolving a dga. */
struct ResolutionWitness {
    AlgebraPtr B, A;
    DAInfMorphism phi;
    VerticalHomology vh; /* of the underlying twisted complex of B */
    E2Result e2;
    std::vector<Scalar> unit_retraction; /* row with r * proj(eta_B) = 1 at (0,0) */
};

ResolutionWitness verify_e1_resolution(const AlgebraPtr& B, const AlgebraPtr& A, const DAInfMorphism& phi);

/* The obstruction ztilde_{ln}; exposed for the obstruction-lemma suite.
 * Prerequisites: all mtilde^{E,1}_{ij}, ftilde^1_{ij} with i+j < l+n. */
MultiOp compute_z(const DAInfAlgebra& E_partial, const DAInfMorphism& f_partial, const AlgebraPtr& B, int l, int n);

struct TransferResult {
    AlgebraPtr E;
    DAInfMorphism f;       /* E -> B */
    GradedMap section;     /* E -> B, the chosen f_01 */
    GradedMap projection;  /* B -> E */
    long obstruction_checks = 0; /* ztilde cocycle assertions that ran */
    long escaped_entries = 0;    /* table entries lost to truncation */
};

TransferResult transfer_minimal(const ResolutionWitness& w, const TransferHints& hints = {});

struct CompareResult {
    DAInfMorphism beta;  /* E -> F */
    DAInfHomotopy h;     /* from g beta to alpha f */
    long obstruction_checks = 0;
};

/* alpha: strict bidga map B -> C; (E,f), (F,g) transfer outputs over B, C */
CompareResult compare_minimal(const DAInfMorphism& alpha, const TransferResult& ef, const TransferResult& fg);

/* serialize the choices a run actually made, for hint idempotence */
TransferHints extract_hints(const TransferResult& r);

}  // namespace dainf
