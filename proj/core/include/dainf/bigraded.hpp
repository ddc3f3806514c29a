#pragma once

#include "dainf/linalg.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace dainf {

/* (N,Z)-bidegree: s horizontal, t vertical. */
struct Bidegree {
    int s = 0;
    int t = 0;
    friend bool operator==(const Bidegree& a, const Bidegree& b) { return a.s == b.s && a.t == b.t; }
    friend bool operator!=(const Bidegree& a, const Bidegree& b) { return !(a == b); }
    friend bool operator<(const Bidegree& a, const Bidegree& b) {
        if (a.s != b.s) return a.s < b.s;
        return a.t < b.t;
    }
    Bidegree operator+(const Bidegree& o) const { return {s + o.s, t + o.t}; }
    Bidegree operator-(const Bidegree& o) const { return {s - o.s, t - o.t}; }
    std::string str() const { return "(" + std::to_string(s) + "," + std::to_string(t) + ")"; }
};

struct SupportBox {
    int s_max = 0;
    int t_min = 0;
    int t_max = 0;
    bool contains(const Bidegree& d) const { return d.s >= 0 && d.s <= s_max && d.t >= t_min && d.t <= t_max; }
};

/* The Koszul sign from moving an element (or map) of bidegree `left` past a
 * map of shift bidegree `op`: (-1)^{s*p + t*q}. */
inline int koszul_exponent(const Bidegree& left, const Bidegree& op) {
    return (left.s * op.s + left.t * op.t) & 1;
}

class BigradedModule;
using ModulePtr = std::shared_ptr<const BigradedModule>;

/* Finitely supported free bigraded module with a chosen, canonically ordered
 * basis.  `truncated` records that the module is a window into a larger
 * object, so values falling outside the box are unknown rather than zero. */
class BigradedModule {
  public:
    using Index = std::uint32_t;

    struct BasisElem {
        std::string label;
        Bidegree deg;
    };

    class Builder {
      public:
        Builder(Ring ring, SupportBox box, bool truncated = false)
            : ring_(std::move(ring)), box_(box), faithful_(box), truncated_(truncated) {}
        Builder& add(const std::string& label, int s, int t);
        /* sub-box of cells whose basis is complete relative to the object
         * being modelled; defaults to the whole support box */
        Builder& faithful(SupportBox fb) {
            faithful_ = fb;
            return *this;
        }
        ModulePtr build();

      private:
        Ring ring_;
        SupportBox box_, faithful_;
        bool truncated_;
        std::vector<BasisElem> elems_;
    };

    const Ring& ring() const { return ring_; }
    const SupportBox& box() const { return box_; }
    const SupportBox& faithful_box() const { return faithful_; }
    /* a truncated module only vouches for cells inside the faithful box */
    bool cell_complete(const Bidegree& d) const { return !truncated_ || faithful_.contains(d); }
    bool truncated() const { return truncated_; }
    std::size_t dim() const { return elems_.size(); }
    const BasisElem& elem(Index i) const { return elems_[i]; }
    const Bidegree& degree(Index i) const { return elems_[i].deg; }
    const std::string& label(Index i) const { return elems_[i].label; }

    const std::vector<Index>& cell(const Bidegree& d) const;
    std::size_t cell_rank(const Bidegree& d) const { return cell(d).size(); }
    const std::map<Bidegree, std::vector<Index>>& cells() const { return cells_; }
    /* position of index i within its cell */
    std::size_t cell_pos(Index i) const { return cell_pos_[i]; }

    bool has_label(const std::string& label) const { return by_label_.count(label) > 0; }
    Index index_of(const std::string& label) const;

    /* shift [0,1]: same labels, vertical degree raised by one */
    ModulePtr suspended() const;

    static bool same_basis(const BigradedModule& a, const BigradedModule& b);

  private:
    friend class Builder;
    Ring ring_;
    SupportBox box_, faithful_;
    bool truncated_ = false;
    std::vector<BasisElem> elems_;
    std::map<Bidegree, std::vector<Index>> cells_;
    std::map<std::string, Index> by_label_;
    std::vector<std::size_t> cell_pos_;
};

/* sorted sparse vector in a module's basis */
struct SparseVec {
    std::vector<std::pair<BigradedModule::Index, Scalar>> terms;
    bool empty() const { return terms.empty(); }
    void add_term(const Ring& ring, BigradedModule::Index i, const Scalar& c);
    void add_scaled(const Ring& ring, const SparseVec& other, const Scalar& c);
    SparseVec negated(const Ring& ring) const;
    bool operator==(const SparseVec& o) const { return terms == o.terms; }
    std::string str(const BigradedModule& mod) const;
};

SparseVec unit_vec(BigradedModule::Index i);

/* tensor of bigraded modules, clipped to the given box; labels are
 * "(a|b)" pairs */
ModulePtr tensor_modules(const ModulePtr& m, const ModulePtr& n, const SupportBox& box);

class TruncationEscape : public DainfError {
  public:
    explicit TruncationEscape(const std::string& what) : DainfError(what) {}
};

/* Map of homogeneous bidegree between bigraded modules: sends a basis element
 * at (s,t) into the target cell (s-dh, t-dv).  Columns may be marked escaped
 * when the model cannot represent the true value (truncation). */
class GradedMap {
  public:
    enum class ColState : std::uint8_t { zero, set, escaped };

    GradedMap() = default;
    GradedMap(ModulePtr source, ModulePtr target, int dh, int dv);

    static GradedMap identity(const ModulePtr& m);
    static GradedMap zero(const ModulePtr& source, const ModulePtr& target, int dh, int dv) {
        return GradedMap(source, target, dh, dv);
    }

    const ModulePtr& source() const { return source_; }
    const ModulePtr& target() const { return target_; }
    int dh() const { return dh_; }
    int dv() const { return dv_; }
    Bidegree shift() const { return {dh_, dv_}; }

    void set_col(BigradedModule::Index i, SparseVec v);
    void mark_escaped(BigradedModule::Index i);
    ColState col_state(BigradedModule::Index i) const { return state_[i]; }
    const SparseVec& col(BigradedModule::Index i) const { return cols_[i]; }
    bool any_escaped() const;

    /* apply to a vector; nullopt when an escaped column is touched */
    std::optional<SparseVec> apply(const SparseVec& v) const;

    /* dense block source cell (s,t) -> target cell (s-dh,t-dv); nullopt when
     * a contributing column is escaped */
    std::optional<Mat> block_at(const Bidegree& d) const;

    bool is_zero_map() const;
    bool equal_to(const GradedMap& o) const;

    GradedMap negated() const;
    GradedMap plus(const GradedMap& o) const;
    GradedMap scaled(const Scalar& c) const;

  private:
    ModulePtr source_, target_;
    int dh_ = 0, dv_ = 0;
    std::vector<SparseVec> cols_;
    std::vector<ColState> state_;
};

/* g after f, shifts add */
GradedMap compose_graded_maps(const GradedMap& g, const GradedMap& f);

/* f (x) g on tensor modules with the Koszul sign (-1)^{<x,g>} */
GradedMap tensor_graded_maps(const GradedMap& f, const GradedMap& g, const ModulePtr& source_tensor,
                             const ModulePtr& target_tensor);

/* homology of  . --d_in--> M --d_out--> .  per bidegree; H gets fresh labels
 * "h<k>@(s,t)".  Throws FreenessFailure / NotAComplex / TruncationEscape. */
struct FreeHomology {
    ModulePtr H;
    GradedMap section;    /* H -> M */
    GradedMap projection; /* M -> H */
};
FreeHomology free_homology(const GradedMap& d_in, const GradedMap& d_out);

}  // namespace dainf
