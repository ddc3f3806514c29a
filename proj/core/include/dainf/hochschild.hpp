#pragma once

#include "dainf/algebra.hpp"

namespace dainf {

class NotMinimal : public DainfError {
  public:
    explicit NotMinimal(const std::string& what) : DainfError(what) {}
};

/* The trigraded complex C^{rst}(E,F) = Hom(E^{(x)r}, F[s,t]) of a termwise
 * free resolution E (bidga with trivial vertical differential) with
 * coefficients in F.  The bimodule structure enters through the two action
 * tables; the diagonal case takes both to be the multiplication of E. */
struct HochschildComplex {
    AlgebraPtr E;
    ModulePtr F;
    MultiOp left_act;  /* E (x) F -> F, shift (0,0) */
    MultiOp right_act; /* F (x) E -> F, shift (0,0) */
    GradedMap d1F;     /* shift (1,0) */
};

HochschildComplex diagonal_complex(const AlgebraPtr& E);
/* actions through an algebra-map component f01: E -> F */
HochschildComplex twosided_complex(const AlgebraPtr& E, const AlgebraPtr& F, const MultiOp& f01);

/* A cochain in C^{rst}: a multilinear block map E^{(x)r} -> F of shift (s,t).
 * The trigrading is read off the operation: r = arity, (s,t) = shift. */

/* c -> mu(1 (x) c) + (-1)^{r+1} mu(c (x) 1) + sum_j (-1)^j c(1 (x) mu (x) 1) */
MultiOp d_hochschild(const HochschildComplex& C, const MultiOp& c);
/* c -> d_1^F c - (-1)^s sum_j c(1 (x) d_1^E (x) 1) */
MultiOp d_horizontal(const HochschildComplex& C, const MultiOp& c);

/* element of Tot^{qt} = sum over r+s=q of C^{rst}, stored by arity r >= 1 */
struct TotCochain {
    int q = 0;
    int t = 0;
    std::map<int, MultiOp> comps;
    bool is_certified_zero() const;
};

/* d_Tot(c) = d_Hom(c) - (-1)^q d_HH(c) */
TotCochain d_total(const HochschildComplex& C, const TotCochain& c);

struct GammaResult {
    TotCochain gamma; /* m_{03} + m_{12} + m_{21} in Tot^{3,-1} */
    bool cocycle = false;
    OpCheckReport report;
};
GammaResult gamma_class(const AlgebraPtr& E);

/* bounds that make the coboundary system finite: input tuples with factor
 * vertical degrees in [t_min, t_max] and horizontal degree sum <= s_sum_max */
struct WitnessWindow {
    int s_sum_max = 8;
    int t_factor_min = -1;
    int t_factor_max = 6;
};

struct WitnessResult {
    bool found = false;
    TotCochain witness;       /* when found */
    long unknowns = 0, equations = 0;
};
/* some b in Tot^{q-1,t} with d_Tot(b) = c on the window, or none; a "none"
 * verdict is only "no coboundary within the window" */
WitnessResult coboundary_witness(const HochschildComplex& C, const TotCochain& c, const WitnessWindow& win);

/* lambda with lambda*c != 0 while lambda annihilates d_Tot of every window
 * generator on the support of c; only searched over modular rings */
std::optional<Scalar> torsion_certificate(const HochschildComplex& C, const TotCochain& c, const WitnessWindow& win);

/* (f01)_* c: postcompose each component with f01 */
TotCochain push_cochain(const TotCochain& c, const MultiOp& f01, const ModulePtr& F);
/* (f01)^* c: precompose each slot with f01 */
TotCochain pull_cochain(const TotCochain& c, const MultiOp& f01, const ModulePtr& Esrc);

}  // namespace dainf
