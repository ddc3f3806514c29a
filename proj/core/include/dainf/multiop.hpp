#pragma once

#include "dainf/bigraded.hpp"

#include <functional>

namespace dainf {

using Index = BigradedModule::Index;
using TupleKey = std::vector<Index>;

/* A value of a multilinear operation at one basis tuple. */
struct OpVal {
    enum class State : std::uint8_t { zero, set, escaped };
    State state = State::zero;
    SparseVec vec;
    static OpVal escaped_val() { return OpVal{State::escaped, {}}; }
    static OpVal zero_val() { return OpVal{State::zero, {}}; }
    bool is_escaped() const { return state == State::escaped; }
};

/* A linear combination of basis tuples (the factor modules are supplied by
 * the caller); `escaped` poisons the whole element. */
struct TensorElem {
    std::map<TupleKey, Scalar> terms;
    bool escaped = false;
    void add(const Ring& ring, const TupleKey& k, const Scalar& c) {
        if (is_zero(c)) return;
        auto [it, fresh] = terms.try_emplace(k, c);
        if (!fresh) {
            it->second = add_scalars(ring, it->second, c);
            if (is_zero(it->second)) terms.erase(it);
        }
    }
    void add_all(const Ring& ring, const TensorElem& o, const Scalar& scale) {
        escaped = escaped || o.escaped;
        for (const auto& [k, c] : o.terms) add(ring, k, mul(ring, scale, c));
    }
    bool is_zero_elem() const { return !escaped && terms.empty(); }

  private:
    static Scalar add_scalars(const Ring& ring, const Scalar& a, const Scalar& b) { return dainf::add(ring, a, b); }
};

/* Multilinear block map  S_1 (x) ... (x) S_j -> T  of homogeneous shift
 * bidegree (dh, dv): a tuple of total degree (S,T) lands in the target cell
 * (S-dh, T-dv).  The table stores nonzero and escaped entries; an absent
 * entry is zero when the off-shift degree lies inside the target box, and
 * escapes when it lies outside a truncated target. */
class MultiOp {
  public:
    MultiOp() = default;
    MultiOp(std::vector<ModulePtr> sources, ModulePtr target, int dh, int dv)
        : sources_(std::move(sources)), target_(std::move(target)), dh_(dh), dv_(dv) {}
    static MultiOp uniform(const ModulePtr& source, std::size_t arity, const ModulePtr& target, int dh, int dv) {
        return MultiOp(std::vector<ModulePtr>(arity, source), target, dh, dv);
    }

    std::size_t arity() const { return sources_.size(); }
    const std::vector<ModulePtr>& sources() const { return sources_; }
    const ModulePtr& target() const { return target_; }
    int dh() const { return dh_; }
    int dv() const { return dv_; }
    Bidegree shift() const { return {dh_, dv_}; }
    bool defined() const { return target_ != nullptr; }

    Bidegree tuple_degree(const TupleKey& k) const {
        Bidegree d{0, 0};
        for (std::size_t w = 0; w < k.size(); ++w) d = d + sources_[w]->degree(k[w]);
        return d;
    }

    void set_value(const TupleKey& k, SparseVec v);
    void mark_escaped(const TupleKey& k) { table_[k] = OpVal::escaped_val(); }
    OpVal value(const TupleKey& k) const;
    const std::map<TupleKey, OpVal>& table() const { return table_; }
    bool is_zero_op() const;
    bool equal_to(const MultiOp& o) const;
    void accumulate(const TupleKey& k, const OpVal& v, const Scalar& scale);

    std::string str() const;

  private:
    std::vector<ModulePtr> sources_;
    ModulePtr target_;
    int dh_ = 0, dv_ = 0;
    std::map<TupleKey, OpVal> table_;
};

/* certified-entry comparisons: escaped entries assert nothing.  With
 * `require_certified` every non-escaped nonzero entry of `expected` must be
 * non-escaped (and equal) in `got`. */
bool ops_agree(const MultiOp& got, const MultiOp& expected, bool require_certified = false);
/* no certified nonzero entry */
bool op_certified_zero(const MultiOp& op);
long op_escape_count(const MultiOp& op);

/* arity-1 conversions */
GradedMap multiop_to_graded(const MultiOp& op);
MultiOp graded_to_multiop(const GradedMap& f);

/* Apply 1^{(x)r} (x) op (x) 1^{(x)t} to an element whose factors live in
 * `factor_mods`; the Koszul sign (-1)^{<prefix, op>} is applied per term. */
TensorElem apply_middle(const MultiOp& op, std::size_t r, const TensorElem& x,
                        const std::vector<ModulePtr>& factor_mods);

/* Apply op to the full tuple (arity must match), yielding an arity-1 elem. */
OpVal apply_full(const MultiOp& op, const TensorElem& x, const std::vector<ModulePtr>& factor_mods);

/* The suspension isomorphism on operations:
 *   Psi_j(f)(sx_1 (x) ... (x) sx_j) = (-1)^e s(f(x_1 (x) ... (x) x_j)),
 *   e = (dv + j - 1) + sum_{w<j} (t_w + 1)(j - w).
 * suspend_op transports an op along it; unsuspend_op is the inverse. */
MultiOp suspend_op(const MultiOp& op, const std::vector<ModulePtr>& s_sources, const ModulePtr& s_target);
MultiOp unsuspend_op(const MultiOp& op, const std::vector<ModulePtr>& plain_sources, const ModulePtr& plain_target);

/* enumerate basis tuples of given arity with horizontal degree sum <= s_cap;
 * calls fn(tuple).  Deterministic lexicographic order. */
void for_each_tuple(const std::vector<ModulePtr>& mods, int s_cap, const std::function<void(const TupleKey&)>& fn);

}  // namespace dainf
