#pragma once

#include "dainf/twisted.hpp"

namespace dainf {

struct Truncation {
    SupportBox box;
    int arity_max = 4;
    int relation_bound = -1; /* default 2*s_max + 2 */
    int transfer_bound = 5;
    int effective_relation_bound() const { return relation_bound >= 0 ? relation_bound : 2 * box.s_max + 2; }
};

class DAInfAlgebra;
using AlgebraPtr = std::shared_ptr<const DAInfAlgebra>;

/* dA-infinity algebra: operations m_{ij}: E^{(x)j} -> E of shift
 * (i, 2-(i+j)), strict unit, explicit truncation data. */
class DAInfAlgebra {
  public:
    DAInfAlgebra(ModulePtr module, const std::string& unit_label, Truncation trunc);

    const ModulePtr& module() const { return module_; }
    const ModulePtr& smodule() const { return smodule_; }
    Index unit() const { return unit_; }
    const std::string& unit_label() const { return module_->label(unit_); }
    const Ring& ring() const { return module_->ring(); }
    const Truncation& truncation() const { return trunc_; }

    void set_op(int i, int j, MultiOp op);
    const MultiOp* op(int i, int j) const;
    const std::map<std::pair<int, int>, MultiOp>& ops() const { return ops_; }

    /* suspended structure map mtilde^{E,1}_{ij} (cached); nullptr if absent */
    const MultiOp* tilde(int i, int j) const;
    int max_i() const;
    int max_j() const;

  private:
    ModulePtr module_, smodule_;
    Index unit_;
    Truncation trunc_;
    std::map<std::pair<int, int>, MultiOp> ops_;
    mutable std::map<std::pair<int, int>, MultiOp> tilde_;
};

class DAInfMorphism {
  public:
    DAInfMorphism() = default;
    DAInfMorphism(AlgebraPtr source, AlgebraPtr target) : source_(std::move(source)), target_(std::move(target)) {}

    const AlgebraPtr& source() const { return source_; }
    const AlgebraPtr& target() const { return target_; }

    void set_comp(int p, int q, MultiOp f);
    const MultiOp* comp(int p, int q) const;
    const std::map<std::pair<int, int>, MultiOp>& comps() const { return comps_; }
    const MultiOp* tilde(int p, int q) const;
    int max_p() const;

    static DAInfMorphism identity(const AlgebraPtr& E);
    bool equal_to(const DAInfMorphism& o) const;

  private:
    AlgebraPtr source_, target_;
    std::map<std::pair<int, int>, MultiOp> comps_;
    mutable std::map<std::pair<int, int>, MultiOp> tilde_;
};

/* Homotopy between morphisms from a minimal algebra E to a bidga C, stored in
 * suspended coordinates: htilde^1_{ij}: (SE)^{(x)j} -> SC of shift (i,-1-i). */
class DAInfHomotopy {
  public:
    DAInfHomotopy() = default;
    DAInfHomotopy(DAInfMorphism g, DAInfMorphism f) : g_(std::move(g)), f_(std::move(f)) {}

    const DAInfMorphism& from_g() const { return g_; }
    const DAInfMorphism& to_f() const { return f_; }
    void set_comp(int i, int j, MultiOp h);
    const MultiOp* comp(int i, int j) const;
    const std::map<std::pair<int, int>, MultiOp>& comps() const { return comps_; }

  private:
    DAInfMorphism g_, f_;
    std::map<std::pair<int, int>, MultiOp> comps_;
};

struct OpCheckReport {
    long checked = 0;
    long unchecked = 0;
    std::vector<std::string> failures;
    bool pass() const { return failures.empty(); }
    std::string summary() const;
    void merge(const OpCheckReport& o);
};

struct CheckOptions {
    int arity_max = -1;      /* default: truncation */
    int relation_bound = -1; /* default: truncation */
    bool assert_unit_zero = true;
    bool check_units = true; /* unit laws are separate from the (uv) relations */
};

/* evaluation helpers shared with the transfer and module layers */

/* mtilde^{E,q}_{i,n} applied to an element of (SE)^{(x)n} */
TensorElem alg_mtilde_q(const DAInfAlgebra& E, int i, int q, const TensorElem& x, std::size_t n);
/* ftilde^{j}_{p,n} applied to an element of (SE)^{(x)n}; output length j */
TensorElem mor_ftilde_j(const DAInfMorphism& f, int p, std::size_t j, const TensorElem& x, std::size_t n);
TensorElem tuple_elem(const TupleKey& k);

/* Definition-level relation check on basis tuples inside the box. */
OpCheckReport check_algebra(const DAInfAlgebra& E, CheckOptions opt = {});

/* reduced tensor algebra encoding: Tbar SE truncated at tensor length L with
 * d_i assembled from the suspended structure maps */
TwistedComplex encode_algebra(const DAInfAlgebra& E, int tensor_len);

/* direct check with the explicit sign exponent of the definition */
OpCheckReport check_morphism(const DAInfMorphism& f, CheckOptions opt = {});
TwistedMap encode_morphism(const DAInfMorphism& f, int tensor_len);

DAInfMorphism compose_morphisms(const DAInfMorphism& f, const DAInfMorphism& g);

/* componentwise certified agreement; absent components are zero */
bool morphisms_agree(const DAInfMorphism& a, const DAInfMorphism& b);

enum class AlgebraClass { dga, bidga, tdga, general };
AlgebraClass classify(const DAInfAlgebra& E);
inline bool class_is_bidga(AlgebraClass c) { return c == AlgebraClass::dga || c == AlgebraClass::bidga; }
inline bool class_is_tdga(AlgebraClass c) { return c != AlgebraClass::general; }
std::string class_name(AlgebraClass c);

TwistedComplex underlying_twisted(const DAInfAlgebra& E);

class NotATdga : public DainfError {
  public:
    explicit NotATdga(const std::string& what) : DainfError(what) {}
};

class PreconditionViolated : public DainfError {
  public:
    explicit PreconditionViolated(const std::string& what) : DainfError(what) {}
};

/* Tot of a tdga as a dga concentrated in horizontal degree 0; the
 * multiplication carries the totalization sign (-1)^{(s+t) u'} for factors at
 * (s,t) and (u',v'). */
struct TotDga {
    AlgebraPtr dga;
    TotalComplex tot;
};
TotDga tot_tdga(const DAInfAlgebra& T);
DAInfMorphism rho_tdga(const AlgebraPtr& T, const TotDga& tot);

OpCheckReport check_homotopy(const DAInfHomotopy& h, CheckOptions opt = {});

}  // namespace dainf
