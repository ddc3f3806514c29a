#pragma once

#include "dainf/algebra.hpp"

namespace dainf {

/* Module over a dA-infinity algebra, stored in suspended coordinates:
 * mtilde^{M,1}_{ij}: SM (x) (SE)^{(x)j-1} -> SM of shift (i, 1-i). */
class DAModule {
  public:
    DAModule() = default;
    DAModule(AlgebraPtr algebra, ModulePtr module);

    const AlgebraPtr& algebra() const { return algebra_; }
    const ModulePtr& module() const { return module_; }
    const ModulePtr& smodule() const { return smodule_; }

    void set_op(int i, int j, MultiOp op); /* sources {SM, SE,...}, shift (i,1-i) */
    const MultiOp* op(int i, int j) const;
    const std::map<std::pair<int, int>, MultiOp>& ops() const { return ops_; }
    int max_i() const;
    int max_j() const;

  private:
    AlgebraPtr algebra_;
    ModulePtr module_, smodule_;
    std::map<std::pair<int, int>, MultiOp> ops_;
};

/* mtilde^{M,q}_{i,n} applied to an element of SM (x) (SE)^{(x)n-1} */
TensorElem mod_mtilde_q(const DAModule& M, int i, int q, const TensorElem& x, std::size_t n);

OpCheckReport check_module(const DAModule& M, CheckOptions opt = {});

/* the rank-one free module: the algebra acting on itself */
DAModule free_module(const AlgebraPtr& E);

/* restriction of an F-module along f: E -> F */
DAModule restrict_module(const DAInfMorphism& f, const DAModule& M);

/* Windowed model of the twisted complex Hom(SM (x) TSE, SN): basis elements
 * are the elementary homs (input tuple -> output), truncated at tensor
 * length L and to hom bidegrees inside the window. */
struct EnrHom {
    DAModule M, N;
    int tensor_len = 0;
    SupportBox window;
    ModulePtr X; /* hom module; labels "[in|...=>out]" */
    struct Elem {
        TupleKey in; /* indices into SM, SE, ..., SE */
        Index out;   /* index into SN */
    };
    std::vector<Elem> elems; /* aligned with X indices */
    TwistedComplex complex;

    long elem_index(const TupleKey& in, Index out) const; /* -1 if outside */
};

EnrHom enrhom(const DAModule& M, const DAModule& N, int tensor_len, const SupportBox& window);

/* the endomorphism twisted dga on enrhom(M,M); the identity element becomes
 * the designated unit basis vector */
struct EndoTdga {
    EnrHom hom;
    AlgebraPtr dga; /* tdga structure: m_{i1} = d_i, m_{02} = composition */
};
EndoTdga endo_tdga(const DAModule& M, int tensor_len, const SupportBox& window);

/* randomized tdga verification: twisted relations are checked exactly; the
 * Leibniz rules, associativity and unit laws on sampled element pairs */
OpCheckReport check_endo_tdga(const EndoTdga& endo, std::uint64_t seed, int samples);

enum class InducedKind { pushforward, pullback, restriction };

/* f^*, h_* between enrhom complexes (components only defined on horizontal
 * degree >= i: columns below the cut are reported as escaped), and res_f */
TwistedMap induced_pushforward(const EnrHom& src, const EnrHom& tgt, const DAModule& Nmap,
                               const std::map<std::pair<int, int>, MultiOp>& hcomps);
TwistedMap induced_restriction(const DAInfMorphism& f, const EnrHom& src, const EnrHom& tgt);

/* psi^E: E -> endo_tdga(E) as a dA-infinity morphism */
DAInfMorphism psi_algebra(const AlgebraPtr& E, const EndoTdga& endo);

/* psi^{M,E}: M -> enrhom(E,M) as a twisted map, with the explicit retraction
 * tau and homotopy H of the E_1-equivalence */
struct PsiModule {
    TwistedMap psi;
    GradedMap tau; /* X -> SM, evaluation at the suspended unit */
    GradedMap H;   /* X -> X[0,-1] */
    OpCheckReport identities; /* tau psi_0 = id and d_0 H + H d_0 = id - psi_0 tau */
};
PsiModule psi_module(const DAModule& M, const EnrHom& hom);

/* Tot of the endomorphism tdga with a homology report against H_*(A) */
struct AntiMinimal {
    EndoTdga endo;
    TotDga tot;
    std::map<int, ModuleInvariants> homology;          /* per total degree */
    std::map<int, ModuleInvariants> reference;         /* H_*(A) */
    std::map<int, bool> certified;                     /* window-certified degrees */
    bool stable = true;                                /* agrees at L and L+1 */
    std::vector<int> compared_degrees;
};
AntiMinimal anti_minimal(const AlgebraPtr& E, const AlgebraPtr& A, int tensor_len, const SupportBox& window,
                         const std::vector<int>& degrees, bool check_stability = true);

}  // namespace dainf
