#pragma once

#include "dainf/multiop.hpp"

namespace dainf {

/* Twisted chain complex (multicomplex): differentials d_i of shift (i, 1-i)
 * with sum_{i+p=u} (-1)^i d_i d_p = 0. */
struct TwistedComplex {
    ModulePtr module;
    std::map<int, GradedMap> diffs;

    const GradedMap* diff(int i) const {
        auto it = diffs.find(i);
        return it == diffs.end() ? nullptr : &it->second;
    }
    int max_index() const { return diffs.empty() ? -1 : diffs.rbegin()->first; }
    void set_diff(int i, GradedMap d);
};

/* Map of twisted complexes: components f_i of shift (i, -i). */
struct TwistedMap {
    TwistedComplex source, target;
    std::map<int, GradedMap> comps;

    const GradedMap* comp(int i) const {
        auto it = comps.find(i);
        return it == comps.end() ? nullptr : &it->second;
    }
    int max_index() const { return comps.empty() ? -1 : comps.rbegin()->first; }
    void set_comp(int i, GradedMap f);

    static TwistedMap identity(const TwistedComplex& x);
};

struct CheckIssue {
    int u = 0;
    Bidegree at;
    std::string detail;
};

struct CheckReport {
    std::vector<CheckIssue> failures;
    long checked = 0;
    long unchecked = 0;
    bool pass() const { return failures.empty(); }
    std::string summary() const;
    void merge(const CheckReport& o);
};

/* relation (u): lists every (u, bidegree) where it fails; escaped data is
 * counted as unchecked, never as a failure */
CheckReport check_twisted_complex(const TwistedComplex& X);
CheckReport check_twisted_map(const TwistedMap& f);

TwistedMap compose_twisted_maps(const TwistedMap& g, const TwistedMap& f);

/* Single-graded chain complex with degree -1 differential. */
struct ChainComplex {
    Ring ring;
    std::map<int, std::vector<std::string>> basis;
    std::map<int, Mat> diff;          /* block n -> n-1 */
    std::map<int, bool> diff_escaped; /* degree n differential incomplete */

    ModuleInvariants homology_at(int n) const;
    bool certified_at(int n) const;
};

/* Tot_n X = sum over s+t=n of X_{st}.  The differential on a component of
 * horizontal degree s is sum_i (-1)^{s+i} d_i: the unique component signs for
 * which d^2 = 0 follows from the twisted relations and the horizontal
 * inclusions X -> Tot X form a map of twisted complexes. */
struct TotalComplex {
    ModulePtr module0;      /* as bigraded module concentrated at s = 0 */
    TwistedComplex twisted; /* d_0 = total differential */
    ChainComplex plain;
};
TotalComplex total_complex(const TwistedComplex& X);

/* induced chain map Tot f: plain sum of the components */
GradedMap total_map(const TwistedMap& f, const TotalComplex& src_tot, const TotalComplex& tgt_tot);

/* rho_X: X -> Tot X, component i the inclusion of X_{i*} */
TwistedMap rho(const TwistedComplex& X, const TotalComplex& tot);

/* vertical homology with the induced d_1 */
struct VerticalHomology {
    ModulePtr Hv;
    GradedMap section, projection;
    GradedMap induced_d1;
};
VerticalHomology vertical_homology(const TwistedComplex& X);

/* E2 pages as isomorphism invariants, plus the equivalence verdict.  The
 * page cell at (s,t) is the iterated homology Z/B with
 *   Z = { x : d_0 x = 0, d_1 x in im d_0 },
 *   B = d_0 X_{s,t+1} + d_1 (ker d_0 at (s+1,t)),
 * computed by presentation invariants, so no freeness is needed. */
struct E2Page {
    std::map<Bidegree, ModuleInvariants> cells;
    std::map<Bidegree, bool> certified;
};
E2Page e2_page(const TwistedComplex& X);

struct E2Result {
    E2Page source_page, target_page;
    bool equivalence = false;
    long cells_checked = 0, cells_unchecked = 0;
    std::vector<std::string> notes;
};
E2Result e2_and_equivalence(const TwistedMap& f);

}  // namespace dainf
