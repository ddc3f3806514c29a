#include "dainf/hochschild.hpp"

#include <algorithm>

namespace dainf {

namespace {

void put_val(MultiOp& op, const TupleKey& k, bool escaped, const SparseVec& v) {
    if (escaped) {
        op.mark_escaped(k);
        return;
    }
    if (v.empty()) {
        Bidegree out = op.tuple_degree(k) - op.shift();
        if (op.target()->truncated() && !op.target()->box().contains(out)) op.set_value(k, SparseVec{});
        return;
    }
    op.set_value(k, v);
}

MultiOp action_via(const AlgebraPtr& E, const ModulePtr& F, const MultiOp& mu_F, const MultiOp& f01, bool left) {
    const Ring& ring = E->ring();
    std::vector<ModulePtr> srcs = left ? std::vector<ModulePtr>{E->module(), F} : std::vector<ModulePtr>{F, E->module()};
    MultiOp act(srcs, F, 0, 0);
    int cap = E->module()->box().s_max;
    for_each_tuple(srcs, cap, [&](const TupleKey& k) {
        Index xe = left ? k[0] : k[1];
        Index xf = left ? k[1] : k[0];
        OpVal fv = f01.value({xe});
        if (fv.is_escaped()) {
            act.mark_escaped(k);
            return;
        }
        SparseVec acc;
        bool escaped = false;
        for (const auto& [l, c] : fv.vec.terms) {
            OpVal mv = left ? mu_F.value({l, xf}) : mu_F.value({xf, l});
            if (mv.is_escaped()) {
                escaped = true;
                break;
            }
            acc.add_scaled(ring, mv.vec, c);
        }
        put_val(act, k, escaped, acc);
    });
    return act;
}

}  // namespace

HochschildComplex diagonal_complex(const AlgebraPtr& E) {
    if (E->op(0, 1) && !E->op(0, 1)->is_zero_op())
        throw PreconditionViolated("hochschild complex needs a trivial vertical differential");
    const MultiOp* mu = E->op(0, 2);
    const MultiOp* d1 = E->op(1, 1);
    if (!mu) throw PreconditionViolated("hochschild complex needs a multiplication");
    HochschildComplex C;
    C.E = E;
    C.F = E->module();
    C.left_act = *mu;
    C.right_act = *mu;
    C.d1F = d1 ? multiop_to_graded(*d1) : GradedMap::zero(E->module(), E->module(), 1, 0);
    return C;
}

HochschildComplex twosided_complex(const AlgebraPtr& E, const AlgebraPtr& F, const MultiOp& f01) {
    if (E->op(0, 1) && !E->op(0, 1)->is_zero_op())
        throw PreconditionViolated("hochschild complex needs a trivial vertical differential");
    const MultiOp* muF = F->op(0, 2);
    const MultiOp* d1F = F->op(1, 1);
    if (!muF) throw PreconditionViolated("coefficient algebra needs a multiplication");
    HochschildComplex C;
    C.E = E;
    C.F = F->module();
    C.left_act = action_via(E, F->module(), *muF, f01, true);
    C.right_act = action_via(E, F->module(), *muF, f01, false);
    C.d1F = d1F ? multiop_to_graded(*d1F) : GradedMap::zero(F->module(), F->module(), 1, 0);
    return C;
}

MultiOp d_hochschild(const HochschildComplex& C, const MultiOp& c) {
    const Ring& ring = C.E->ring();
    const ModulePtr& ME = C.E->module();
    int r = static_cast<int>(c.arity());
    MultiOp out = MultiOp::uniform(ME, static_cast<std::size_t>(r + 1), C.F, c.dh(), c.dv());
    const MultiOp* mu = C.E->op(0, 2);
    std::vector<ModulePtr> mods(static_cast<std::size_t>(r + 1), ME);
    for_each_tuple(mods, ME->box().s_max, [&](const TupleKey& key) {
        SparseVec acc;
        bool escaped = false;
        /* mu(1 (x) c): Koszul from x_0 crossing c, then the left action */
        {
            TensorElem mid = apply_middle(c, 1, tuple_elem(key), mods);
            if (mid.escaped) escaped = true;
            for (const auto& [k2, cf] : mid.terms) {
                OpVal av = C.left_act.value(k2);
                if (av.is_escaped()) {
                    escaped = true;
                    break;
                }
                acc.add_scaled(ring, av.vec, cf);
            }
        }
        /* (-1)^{r+1} mu(c (x) 1) */
        if (!escaped) {
            TensorElem mid = apply_middle(c, 0, tuple_elem(key), mods);
            if (mid.escaped) escaped = true;
            Scalar sgn = from_int(ring, (r + 1) % 2 ? -1 : 1);
            for (const auto& [k2, cf] : mid.terms) {
                OpVal av = C.right_act.value(k2);
                if (av.is_escaped()) {
                    escaped = true;
                    break;
                }
                acc.add_scaled(ring, av.vec, mul(ring, sgn, cf));
            }
        }
        /* sum_j (-1)^j c(1^{j-1} (x) mu (x) 1^{r-j}) */
        for (int j = 1; j <= r && !escaped && mu; ++j) {
            TensorElem mid = apply_middle(*mu, static_cast<std::size_t>(j - 1), tuple_elem(key), mods);
            if (mid.escaped) {
                escaped = true;
                break;
            }
            OpVal cv = apply_full(c, mid, mods);
            if (cv.is_escaped()) {
                escaped = true;
                break;
            }
            acc.add_scaled(ring, cv.vec, from_int(ring, j % 2 ? -1 : 1));
        }
        put_val(out, key, escaped, acc);
    });
    return out;
}

MultiOp d_horizontal(const HochschildComplex& C, const MultiOp& c) {
    const Ring& ring = C.E->ring();
    const ModulePtr& ME = C.E->module();
    int r = static_cast<int>(c.arity());
    MultiOp out = MultiOp::uniform(ME, static_cast<std::size_t>(r), C.F, c.dh() + 1, c.dv());
    const MultiOp* d1E = C.E->op(1, 1);
    int s = c.dh();
    std::vector<ModulePtr> mods(static_cast<std::size_t>(r), ME);
    for_each_tuple(mods, ME->box().s_max, [&](const TupleKey& key) {
        SparseVec acc;
        bool escaped = false;
        OpVal cv = c.value(key);
        if (cv.is_escaped())
            escaped = true;
        else {
            auto img = C.d1F.apply(cv.vec);
            if (!img)
                escaped = true;
            else
                acc.add_scaled(ring, *img, Scalar(1, 1));
        }
        for (int j = 1; j <= r && !escaped && d1E; ++j) {
            TensorElem mid = apply_middle(*d1E, static_cast<std::size_t>(j - 1), tuple_elem(key), mods);
            if (mid.escaped) {
                escaped = true;
                break;
            }
            OpVal val = apply_full(c, mid, mods);
            if (val.is_escaped()) {
                escaped = true;
                break;
            }
            acc.add_scaled(ring, val.vec, from_int(ring, s % 2 ? 1 : -1));
        }
        put_val(out, key, escaped, acc);
    });
    return out;
}

bool TotCochain::is_certified_zero() const {
    for (const auto& [r, op] : comps) {
        (void)r;
        if (!op_certified_zero(op)) return false;
    }
    return true;
}

TotCochain d_total(const HochschildComplex& C, const TotCochain& c) {
    const Ring& ring = C.E->ring();
    TotCochain out;
    out.q = c.q + 1;
    out.t = c.t;
    for (const auto& [r, op] : c.comps) {
        MultiOp dh = d_horizontal(C, op);
        MultiOp dhh = d_hochschild(C, op);
        /* d_Hom lands in arity r, d_HH in arity r+1, both with q+1 */
        auto add_into = [&](int arity, MultiOp&& piece, int negate) {
            auto it = out.comps.find(arity);
            if (it == out.comps.end()) {
                if (negate) {
                    MultiOp neg_op = piece;
                    for (const auto& [k, v] : piece.table()) {
                        if (v.is_escaped()) continue;
                        neg_op.set_value(k, v.vec.negated(ring));
                    }
                    out.comps.emplace(arity, std::move(neg_op));
                } else {
                    out.comps.emplace(arity, std::move(piece));
                }
                return;
            }
            MultiOp& tgt = it->second;
            for (const auto& [k, v] : piece.table()) {
                Scalar sgn = from_int(ring, negate ? -1 : 1);
                tgt.accumulate(k, v, sgn);
            }
        };
        add_into(r, std::move(dh), 0);
        add_into(r + 1, std::move(dhh), (c.q % 2) == 0 ? 1 : 0); /* -(-1)^q */
    }
    return out;
}

GammaResult gamma_class(const AlgebraPtr& E) {
    if (E->op(0, 1) && !E->op(0, 1)->is_zero_op()) throw NotMinimal("gamma_class needs a minimal algebra");
    GammaResult out;
    out.gamma.q = 3;
    out.gamma.t = -1;
    auto keep = [](const MultiOp* m) { return m && !m->is_zero_op(); };
    if (keep(E->op(0, 3))) out.gamma.comps.emplace(3, *E->op(0, 3));
    if (keep(E->op(1, 2))) out.gamma.comps.emplace(2, *E->op(1, 2));
    if (keep(E->op(2, 1))) out.gamma.comps.emplace(1, *E->op(2, 1));
    HochschildComplex C = diagonal_complex(E);
    TotCochain d = d_total(C, out.gamma);
    out.cocycle = d.is_certified_zero();
    for (const auto& [r, op] : d.comps) {
        long esc = op_escape_count(op);
        long nz = 0;
        for (const auto& [k, v] : op.table()) {
            (void)k;
            if (v.state == OpVal::State::set && !v.vec.empty()) ++nz;
        }
        out.report.checked += static_cast<long>(op.table().size()) - esc;
        out.report.unchecked += esc;
        if (nz)
            out.report.failures.push_back("d_Tot(gamma) has " + std::to_string(nz) +
                                          " nonzero entries in arity " + std::to_string(r));
    }
    return out;
}

namespace {

struct UnknownSlot {
    int r;
    TupleKey key;
    Index target;
};

std::vector<TupleKey> window_tuples(const ModulePtr& M, int arity, const WitnessWindow& win) {
    std::vector<TupleKey> out;
    std::vector<ModulePtr> mods(static_cast<std::size_t>(arity), M);
    for_each_tuple(mods, win.s_sum_max, [&](const TupleKey& k) {
        for (Index i : k) {
            int t = M->degree(i).t;
            if (t < win.t_factor_min || t > win.t_factor_max) return;
        }
        out.push_back(k);
    });
    return out;
}

/* the linear system d_Tot(b) = c over the window, assembled row by row:
 * each output coordinate touches only the few unknown slots the three
 * differentials reference */
struct WitnessSystem {
    std::vector<UnknownSlot> slots;
    std::map<std::tuple<int, TupleKey, Index>, std::size_t> slot_of;
    Mat A;
    std::vector<Scalar> rhs;
    std::vector<std::tuple<int, TupleKey, Index>> row_keys; /* kept rows */
    std::vector<char> row_on_support;
    long dropped_rows = 0;
};

WitnessSystem assemble_system(const HochschildComplex& C, const TotCochain& c, const WitnessWindow& win) {
    const Ring& ring = C.E->ring();
    const ModulePtr& ME = C.E->module();
    const ModulePtr& MF = C.F;
    const MultiOp* mu = C.E->op(0, 2);
    const MultiOp* d1E = C.E->op(1, 1);
    WitnessSystem sys;

    for (int rp = 1; rp <= c.q - 1; ++rp) {
        int sp = c.q - 1 - rp;
        if (sp < 0) continue;
        for (const auto& k : window_tuples(ME, rp, win)) {
            Bidegree total{0, 0};
            for (Index i : k) total = total + ME->degree(i);
            Bidegree outdeg = total - Bidegree{sp, c.t};
            for (Index tgt : MF->cell(outdeg)) {
                sys.slot_of[{rp, k, tgt}] = sys.slots.size();
                sys.slots.push_back({rp, k, tgt});
            }
        }
    }

    struct Row {
        std::map<std::size_t, Scalar> coeffs;
        Scalar rhs;
        bool on_support = false;
    };
    std::map<std::tuple<int, TupleKey, Index>, Row> rows;
    auto row_at = [&](int r, const TupleKey& k, Index tgt) -> Row& { return rows[{r, k, tgt}]; };

    auto slot_lookup = [&](int r, const TupleKey& k, Index e) -> long {
        auto it = sys.slot_of.find({r, k, e});
        return it == sys.slot_of.end() ? -1 : static_cast<long>(it->second);
    };

    for (int r = 1; r <= c.q; ++r) {
        int s_out = c.q - r; /* horizontal degree of the output component */
        if (s_out < 0) continue;
        std::vector<ModulePtr> mods(static_cast<std::size_t>(r), ME);
        for (const auto& x : window_tuples(ME, r, win)) {
            Bidegree total{0, 0};
            for (Index i : x) total = total + ME->degree(i);
            Bidegree outdeg = total - Bidegree{s_out, c.t + 1};
            const auto& outcell = MF->cell(outdeg);
            if (outcell.empty() && !c.comps.count(r)) continue;
            bool dropped = false;
            std::map<std::size_t, std::map<std::size_t, Scalar>> contrib; /* row-local: target pos -> slot -> coef */
            auto addc = [&](Index tgt, std::size_t slot, const Scalar& coef) {
                if (is_zero(coef)) return;
                auto& m = contrib[MF->cell_pos(tgt)];
                auto it = m.find(slot);
                if (it == m.end())
                    m.emplace(slot, coef);
                else {
                    it->second = dainf::add(ring, it->second, coef);
                    if (is_zero(it->second)) m.erase(it);
                }
            };

            /* ---- d_Hom of b_r ---- */
            int sp_r = c.q - 1 - r;
            if (sp_r >= 0) {
                /* d1F after b_r(x) */
                Bidegree bdeg = total - Bidegree{sp_r, c.t};
                for (Index e : MF->cell(bdeg)) {
                    long sl = slot_lookup(r, x, e);
                    if (sl < 0) continue;
                    if (C.d1F.col_state(e) == GradedMap::ColState::escaped) {
                        dropped = true;
                        break;
                    }
                    for (const auto& [tgt, coef] : C.d1F.col(e).terms) addc(tgt, static_cast<std::size_t>(sl), coef);
                }
                /* -(-1)^{sp_r} sum_j b_r((1 (x) d1E (x) 1)(x)) */
                if (!dropped && d1E) {
                    Scalar sgn = from_int(ring, sp_r % 2 ? 1 : -1);
                    for (int j = 1; j <= r && !dropped; ++j) {
                        TensorElem mid = apply_middle(*d1E, static_cast<std::size_t>(j - 1), tuple_elem(x), mods);
                        if (mid.escaped) {
                            dropped = true;
                            break;
                        }
                        for (const auto& [y, cf] : mid.terms) {
                            Bidegree ydeg{0, 0};
                            for (Index i : y) ydeg = ydeg + ME->degree(i);
                            for (Index e : MF->cell(ydeg - Bidegree{sp_r, c.t})) {
                                long sl = slot_lookup(r, y, e);
                                if (sl < 0) {
                                    dropped = true; /* references an unknown outside the window */
                                    break;
                                }
                                addc(e, static_cast<std::size_t>(sl), mul(ring, sgn, cf));
                            }
                            if (dropped) break;
                        }
                    }
                }
            }
            /* ---- -(-1)^{q-1} d_HH of b_{r-1} ---- */
            int rb = r - 1;
            int sp_b = c.q - 1 - rb;
            if (rb >= 1 && sp_b >= 0 && !dropped) {
                Scalar outer = from_int(ring, (c.q - 1) % 2 ? 1 : -1);
                /* mu(1 (x) b): Koszul from x_0 */
                {
                    TupleKey tail(x.begin() + 1, x.end());
                    Bidegree taildeg{0, 0};
                    for (Index i : tail) taildeg = taildeg + ME->degree(i);
                    int ks = koszul_exponent(ME->degree(x[0]), Bidegree{sp_b, c.t});
                    for (Index e : MF->cell(taildeg - Bidegree{sp_b, c.t})) {
                        long sl = slot_lookup(rb, tail, e);
                        if (sl < 0) {
                            dropped = true;
                            break;
                        }
                        OpVal av = C.left_act.value({x[0], e});
                        if (av.is_escaped()) {
                            dropped = true;
                            break;
                        }
                        Scalar coef = mul(ring, outer, from_int(ring, ks ? -1 : 1));
                        for (const auto& [tgt, cc] : av.vec.terms)
                            addc(tgt, static_cast<std::size_t>(sl), mul(ring, coef, cc));
                    }
                }
                /* (-1)^{rb+1} mu(b (x) 1) */
                if (!dropped) {
                    TupleKey head(x.begin(), x.end() - 1);
                    Bidegree headdeg{0, 0};
                    for (Index i : head) headdeg = headdeg + ME->degree(i);
                    Scalar sgn = mul(ring, outer, from_int(ring, (rb + 1) % 2 ? -1 : 1));
                    for (Index e : MF->cell(headdeg - Bidegree{sp_b, c.t})) {
                        long sl = slot_lookup(rb, head, e);
                        if (sl < 0) {
                            dropped = true;
                            break;
                        }
                        OpVal av = C.right_act.value({e, x.back()});
                        if (av.is_escaped()) {
                            dropped = true;
                            break;
                        }
                        for (const auto& [tgt, cc] : av.vec.terms)
                            addc(tgt, static_cast<std::size_t>(sl), mul(ring, sgn, cc));
                    }
                }
                /* sum_j (-1)^j b(1 (x) mu (x) 1) */
                if (!dropped && mu) {
                    for (int j = 1; j <= rb && !dropped; ++j) {
                        TensorElem mid = apply_middle(*mu, static_cast<std::size_t>(j - 1), tuple_elem(x), mods);
                        if (mid.escaped) {
                            dropped = true;
                            break;
                        }
                        Scalar sgn = mul(ring, outer, from_int(ring, j % 2 ? -1 : 1));
                        for (const auto& [y, cf] : mid.terms) {
                            Bidegree ydeg{0, 0};
                            for (Index i : y) ydeg = ydeg + ME->degree(i);
                            for (Index e : MF->cell(ydeg - Bidegree{sp_b, c.t})) {
                                long sl = slot_lookup(rb, y, e);
                                if (sl < 0) {
                                    dropped = true;
                                    break;
                                }
                                addc(e, static_cast<std::size_t>(sl), mul(ring, sgn, cf));
                            }
                            if (dropped) break;
                        }
                    }
                }
            }
            /* rhs from c */
            std::map<std::size_t, Scalar> rhs_here;
            bool on_support = false;
            if (auto it = c.comps.find(r); it != c.comps.end()) {
                OpVal v = it->second.value(x);
                if (v.is_escaped())
                    dropped = true;
                else
                    for (const auto& [tgt, coef] : v.vec.terms) {
                        rhs_here[MF->cell_pos(tgt)] = coef;
                        on_support = true;
                    }
            }
            if (dropped) {
                sys.dropped_rows += static_cast<long>(outcell.size());
                continue;
            }
            for (std::size_t pos = 0; pos < outcell.size(); ++pos) {
                Row& row = row_at(r, x, outcell[pos]);
                auto cit = contrib.find(pos);
                if (cit != contrib.end()) row.coeffs = std::move(cit->second);
                auto rit = rhs_here.find(pos);
                if (rit != rhs_here.end()) row.rhs = rit->second;
                row.on_support = on_support && rit != rhs_here.end() && !is_zero(row.rhs);
            }
        }
    }

    /* pack */
    sys.A = Mat(rows.size(), sys.slots.size());
    sys.rhs.resize(rows.size());
    sys.row_on_support.resize(rows.size());
    std::size_t ri = 0;
    for (auto& [key, row] : rows) {
        sys.row_keys.push_back(key);
        for (auto& [sl, coef] : row.coeffs) sys.A.at(ri, sl) = coef;
        sys.rhs[ri] = row.rhs;
        sys.row_on_support[ri] = row.on_support ? 1 : 0;
        ++ri;
    }
    return sys;
}

}  // namespace

WitnessResult coboundary_witness(const HochschildComplex& C, const TotCochain& c, const WitnessWindow& win) {
    const Ring& ring = C.E->ring();
    const ModulePtr& ME = C.E->module();
    const ModulePtr& MF = C.F;
    WitnessSystem sys = assemble_system(C, c, win);
    WitnessResult res;
    res.unknowns = static_cast<long>(sys.slots.size());
    res.equations = static_cast<long>(sys.rhs.size());
    auto sol = ring_solve(ring, sys.A, sys.rhs);
    if (!sol) return res;
    res.found = true;
    res.witness.q = c.q - 1;
    res.witness.t = c.t;
    for (int rp = 1; rp <= c.q - 1; ++rp) {
        int sp = c.q - 1 - rp;
        if (sp < 0) continue;
        res.witness.comps.emplace(rp, MultiOp::uniform(ME, static_cast<std::size_t>(rp), MF, sp, c.t));
    }
    for (std::size_t u = 0; u < sys.slots.size(); ++u) {
        if (is_zero((*sol)[u])) continue;
        const UnknownSlot& sl = sys.slots[u];
        MultiOp& comp = res.witness.comps.at(sl.r);
        OpVal cur = comp.value(sl.key);
        cur.vec.add_term(ring, sl.target, (*sol)[u]);
        comp.set_value(sl.key, cur.vec);
    }
    return res;
}

std::optional<Scalar> torsion_certificate(const HochschildComplex& C, const TotCochain& c, const WitnessWindow& win) {
    const Ring& ring = C.E->ring();
    if (!ring.is_modular()) return std::nullopt;
    const Int& n = ring.modulus();
    WitnessSystem sys = assemble_system(C, c, win);
    bool any_support = false;
    for (char f : sys.row_on_support) any_support |= (f != 0);
    if (!any_support) return std::nullopt;

    std::vector<Int> candidates;
    Int m = n;
    for (Int p = 2; p * p <= m; ++p)
        if (m % p == 0) {
            candidates.push_back(n / p);
            while (m % p == 0) m /= p;
        }
    if (m > 1) candidates.push_back(n / m);

    for (const Int& lam : candidates) {
        Scalar lambda = from_int(ring, lam);
        bool nonzero = false, annihilates = true;
        for (std::size_t ri = 0; ri < sys.rhs.size() && annihilates; ++ri) {
            if (!sys.row_on_support[ri]) continue;
            if (!is_zero(mul(ring, lambda, sys.rhs[ri]))) nonzero = true;
            for (std::size_t u = 0; u < sys.slots.size(); ++u)
                if (!is_zero(mul(ring, lambda, sys.A.at(ri, u)))) {
                    annihilates = false;
                    break;
                }
        }
        if (nonzero && annihilates) return lambda;
    }
    return std::nullopt;
}

TotCochain push_cochain(const TotCochain& c, const MultiOp& f01, const ModulePtr& F) {
    TotCochain out;
    out.q = c.q;
    out.t = c.t;
    const Ring& ring = F->ring();
    for (const auto& [r, op] : c.comps) {
        MultiOp comp(op.sources(), F, op.dh(), op.dv());
        for (const auto& [k, v] : op.table()) {
            if (v.is_escaped()) {
                comp.mark_escaped(k);
                continue;
            }
            SparseVec acc;
            bool escaped = false;
            for (const auto& [l, cf] : v.vec.terms) {
                OpVal fv = f01.value({l});
                if (fv.is_escaped()) {
                    escaped = true;
                    break;
                }
                acc.add_scaled(ring, fv.vec, cf);
            }
            put_val(comp, k, escaped, acc);
        }
        out.comps.emplace(r, std::move(comp));
    }
    return out;
}

TotCochain pull_cochain(const TotCochain& c, const MultiOp& f01, const ModulePtr& Esrc) {
    TotCochain out;
    out.q = c.q;
    out.t = c.t;
    const Ring& ring = Esrc->ring();
    for (const auto& [r, op] : c.comps) {
        MultiOp comp = MultiOp::uniform(Esrc, static_cast<std::size_t>(r), op.target(), op.dh(), op.dv());
        std::vector<ModulePtr> mods(static_cast<std::size_t>(r), Esrc);
        for_each_tuple(mods, Esrc->box().s_max, [&](const TupleKey& key) {
            /* map every slot through f01 (degree (0,0): no Koszul signs) */
            TensorElem x = tuple_elem(key);
            for (std::size_t w = 0; w < static_cast<std::size_t>(r); ++w) x = apply_middle(f01, w, x, mods);
            OpVal v = apply_full(op, x, mods);
            put_val(comp, key, v.is_escaped(), v.vec);
            (void)ring;
        });
        out.comps.emplace(r, std::move(comp));
    }
    return out;
}

}  // namespace dainf
